"""Command-line front end: ``render``, ``sweep`` and ``fit``.

Angles on the command line and in files are degrees.

Exit codes:
    0 = success
    1 = fitted slope outside the tolerance
    2 = invalid input (config, CSV, simulation precondition)
    3 = internal error
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import traceback
from pathlib import Path
from typing import Any, Optional, Sequence

from .config import SAMPLING_MODES, GearConfig, load_config, resolve_out_dir
from .csvio import read_sweep_csv, write_sweep_csv
from .errors import ConfigError, FlatProfileError, GearError
from .field_render import render, write_pgm
from .fwm_process import power_ratio
from .models import RunConfig
from .paths import Paths, build_paths
from .pattern_analysis import control_ratio, fit_alpha_vs_theta, pattern_period, petal_count, visibility
from .runconfig import build_run_config, read_run_document
from .sweep import FrameSetup, profile_of, run_sweep, simulate_frame, sweep_thetas

log = logging.getLogger(__name__)

DEFAULT_SCRIPT = Path(__file__).resolve().parent.parent / "gear.py"


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run document")
    common.add_argument("--l", type=int, help="OAM topological charge")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--theta0-deg", type=float, help="preparation HWP angle from vertical")
    sim.add_argument("--beta", type=float, help="FWM amplitude ratio (default 2.1)")
    sim.add_argument("--detect-mode", choices=("dominant", "full"))
    sim.add_argument("--out-dir", type=Path)
    sim.add_argument("--sampling", choices=SAMPLING_MODES, help="angular profile source")

    parser = argparse.ArgumentParser(prog="gear", description="Polarization-controlled FWM gear simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_render = sub.add_parser("render", parents=[common, sim], help="write signal.pgm and fwm.pgm")
    p_render.add_argument("--theta-deg", type=float, help="pump HWP angle from vertical")

    p_sweep = sub.add_parser("sweep", parents=[common, sim], help="measure rotation over a theta sweep")
    p_sweep.add_argument("--theta-start-deg", type=float, default=0.0)
    p_sweep.add_argument("--theta-end-deg", type=float, default=90.0)
    p_sweep.add_argument("--steps", type=int, default=7)
    p_sweep.add_argument("--write-frames", action="store_true", help="also store every frame as PGM")

    p_fit = sub.add_parser("fit", parents=[common], help="fit alpha against theta from a sweep CSV")
    p_fit.add_argument("csv_path", type=Path)
    p_fit.add_argument("--tolerance", type=float, help="allowed |slope - 2/|l||")
    return parser


def _run_config(args: argparse.Namespace, cfg: GearConfig) -> RunConfig:
    doc = read_run_document(args.config) if args.config else {}
    overrides: dict[str, Any] = {"l": args.l}
    for key in ("theta0_deg", "theta_deg", "beta", "detect_mode"):
        overrides[key] = getattr(args, key, None)
    return build_run_config(doc, render=cfg.render, overrides=overrides)


def _setup(run: RunConfig, args: argparse.Namespace, cfg: GearConfig) -> FrameSetup:
    # argument validation in the library speaks ValueError; here it is user input
    try:
        return FrameSetup(
            l=run.l,
            theta0=run.theta0,
            beta=run.beta,
            detect_mode=run.detect_mode,
            grid=run.grid(cfg.render.waist),
            annulus=run.annulus,
            bins=cfg.render.bins,
            sampling=args.sampling or cfg.render.sampling,
            radial_samples=cfg.render.radial_samples,
        )
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _out_paths(args: argparse.Namespace, cfg: GearConfig, cfg_dir: Path) -> Paths:
    out_dir = args.out_dir or resolve_out_dir(cfg, config_dir=cfg_dir)
    return build_paths(Path(out_dir))


def cmd_render(args: argparse.Namespace, cfg: GearConfig, cfg_dir: Path) -> int:
    run = _run_config(args, cfg)
    setup = _setup(run, args, cfg)
    paths = _out_paths(args, cfg, cfg_dir)
    frame = simulate_frame(setup, run.theta)

    signal_img = render(frame.signal, setup.grid)
    fwm_img = render(frame.detected, setup.grid)
    write_pgm(signal_img, paths.signal_pgm)
    write_pgm(fwm_img, paths.fwm_pgm)
    print(f"WROTE {paths.signal_pgm}")
    print(f"WROTE {paths.fwm_pgm}")

    try:
        signal_petals = str(petal_count(profile_of(setup, frame.signal, signal_img), setup.flat_tol))
    except FlatProfileError:
        signal_petals = "flat"
    fwm_profile = profile_of(setup, frame.detected, fwm_img)
    petals = petal_count(fwm_profile, setup.flat_tol)
    print(f"signal petals={signal_petals}")
    print(f"fwm petals={petals} visibility={visibility(fwm_profile, petals):.6f}")
    print(f"fwm power_ratio_HV={power_ratio(frame.fwm):.6g} wavelength_nm={run.fwm_params().wavelength_nm:g}")
    return 0


def cmd_sweep(args: argparse.Namespace, cfg: GearConfig, cfg_dir: Path) -> int:
    run = _run_config(args, cfg)
    setup = _setup(run, args, cfg)
    paths = _out_paths(args, cfg, cfg_dir)
    if not (math.isfinite(args.theta_start_deg) and math.isfinite(args.theta_end_deg)):
        raise ConfigError(f"sweep range must be finite, got {args.theta_start_deg!r}..{args.theta_end_deg!r}")
    thetas = sweep_thetas(math.radians(args.theta_start_deg), math.radians(args.theta_end_deg), args.steps, run.l)

    result = run_sweep(setup, thetas, workers=cfg.sweep.workers)
    write_sweep_csv(result.samples_deg(), paths.sweep_csv)
    print(f"WROTE {paths.sweep_csv}")

    if args.write_frames:
        for i, frame in enumerate(result.frames):
            write_pgm(render(frame.detected, setup.grid), paths.frame_pgm(i))
        print(f"WROTE {len(result.frames)} frame(s) to {paths.frames}")
    return 0


def cmd_fit(args: argparse.Namespace, cfg: GearConfig, cfg_dir: Path) -> int:
    doc = read_run_document(args.config) if args.config else {}
    l = args.l if args.l is not None else doc.get("l")
    if not isinstance(l, int) or isinstance(l, bool) or l == 0:
        print("ERROR fit needs a non-zero integer --l (the CSV does not record it)")
        return 2
    tolerance = args.tolerance if args.tolerance is not None else cfg.fit.tolerance

    samples = read_sweep_csv(args.csv_path)
    res = fit_alpha_vs_theta(samples, period=math.degrees(pattern_period(l)))
    expected = control_ratio(l)
    deviation = abs(abs(res.slope) - expected)
    ok = deviation < tolerance

    print(f"slope={res.slope!r}")
    print(f"intercept={res.intercept!r}")
    print(f"max_residual_deg={res.max_residual!r}")
    print(f"expected_slope={expected!r} (2/|l|, |l|={abs(l)})")
    print(f"{'OK' if ok else 'FAIL'} |slope| deviation {deviation:.3g} vs tolerance {tolerance:g}")
    return 0 if ok else 1


COMMANDS = {"render": cmd_render, "sweep": cmd_sweep, "fit": cmd_fit}


def main(argv: Optional[Sequence[str]] = None, *, script_path: Path = DEFAULT_SCRIPT) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg, cfg_dir = load_config(script_path)
        level = logging.DEBUG if args.verbose else getattr(logging, cfg.log.level)
        logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        return COMMANDS[args.command](args, cfg, cfg_dir)
    except GearError as e:
        print(f"ERROR {e}")
        return 2
    except Exception as e:
        traceback.print_exc(file=sys.stderr)
        print(f"ERROR internal: {e}")
        return 3
