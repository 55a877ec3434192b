from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

SIGNAL_FILENAME = "signal.pgm"
FWM_FILENAME = "fwm.pgm"
SWEEP_FILENAME = "sweep.csv"


@dataclass(frozen=True)
class Paths:
    out_dir: Path
    signal_pgm: Path
    fwm_pgm: Path
    sweep_csv: Path
    frames: Path

    def frame_pgm(self, index: int) -> Path:
        return self.frames / f"fwm-{index:03d}.pgm"


def build_paths(out_dir: Path) -> Paths:
    return Paths(
        out_dir=out_dir,
        signal_pgm=out_dir / SIGNAL_FILENAME,
        fwm_pgm=out_dir / FWM_FILENAME,
        sweep_csv=out_dir / SWEEP_FILENAME,
        frames=out_dir / "frames",
    )
