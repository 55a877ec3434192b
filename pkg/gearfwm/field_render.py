"""Waist-plane intensity images of hybrid states.

Each OAM index l is carried by the p = 0 Laguerre-Gaussian mode
``LG_l(r, phi) = N_l (sqrt(2) r / w)^|l| exp(-r^2/w^2) exp(i l phi)`` with unit
power. Amplitudes add coherently within a polarization; orthogonal
polarizations add in intensity, as on a polarization-blind camera. No
propagation or Gouy phase is applied.

Image coordinates: x to the right, y up, top row first; azimuth phi is
counterclockwise from +x.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
from scipy.special import gammaln

from .errors import AllZeroImageError
from .fs import write_bytes_atomic
from .hybrid_state import HybridState

log = logging.getLogger(__name__)

MIN_PIXELS = 32
RING_FILL = 0.6  # ring radius as a fraction of the window half-width, at most
PGM_MAXVAL = 65535

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class GridSpec:
    n: int = 512
    extent: float = 2.5
    waist: float = 1.0

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < MIN_PIXELS:
            raise ValueError(f"grid needs n >= {MIN_PIXELS} pixels per side, got {self.n!r}")
        if not self.extent > 0:
            raise ValueError(f"extent must be positive, got {self.extent!r}")
        if not self.waist > 0:
            raise ValueError(f"waist must be positive, got {self.waist!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def half_width(self) -> float:
        return self.extent * self.waist

    @property
    def pitch(self) -> float:
        return 2 * self.half_width / self.n

    def effective_waist(self, l_abs: int) -> float:
        """Mode waist, shrunk when the ring would sit past 60% of the half-width."""
        if l_abs == 0:
            return self.waist
        scale = math.sqrt(l_abs / 2)
        limit = RING_FILL * self.half_width
        return self.waist if self.waist * scale <= limit else limit / scale

    def ring_radius(self, l_abs: int) -> float:
        return self.effective_waist(l_abs) * math.sqrt(l_abs / 2)

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Pixel-centre (x, y) grids, row 0 at the top."""
        c = (np.arange(self.n) - (self.n - 1) / 2) * self.pitch
        x, y = np.meshgrid(c, -c)
        return x, y


@dataclass(frozen=True, eq=False)
class IntensityImage:
    pixels: np.ndarray
    grid: Optional[GridSpec] = None
    normalization: Literal["raw", "unit-peak"] = "raw"
    l_abs: int = 0

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels, dtype=float)
        if px.ndim != 2:
            raise ValueError(f"image must be 2-D, got shape {px.shape}")
        if self.grid is not None and px.shape != (self.grid.n, self.grid.n):
            raise ValueError(f"image shape {px.shape} does not match grid n={self.grid.n}")
        if np.any(px < 0) or not np.all(np.isfinite(px)):
            raise ValueError("intensities must be finite and non-negative")
        object.__setattr__(self, "pixels", px)

    @property
    def peak(self) -> float:
        return float(self.pixels.max())

    def unit_peak(self) -> IntensityImage:
        if self.peak <= 0:
            raise AllZeroImageError("image has no positive pixel")
        return IntensityImage(self.pixels / self.peak, self.grid, "unit-peak", self.l_abs)


def _lg_log_norm(l_abs: int, w: float) -> float:
    return 0.5 * (math.log(2 / math.pi) - float(gammaln(l_abs + 1))) - math.log(w)


def _lg_radial(l_abs: int, r: np.ndarray, w: float) -> np.ndarray:
    return math.exp(_lg_log_norm(l_abs, w)) * (math.sqrt(2) * r / w) ** l_abs * np.exp(-(r ** 2) / w ** 2)


def lg_amplitude(l: int, r: ArrayLike, phi: ArrayLike, w: float = 1.0) -> Union[complex, np.ndarray]:
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise ValueError("radius must be non-negative")
    out = _lg_radial(abs(l), r_arr, w) * np.exp(1j * l * np.asarray(phi, dtype=float))
    return complex(out) if out.ndim == 0 else out


def evaluate_intensity(state: HybridState, grid: GridSpec, r: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Camera intensity at polar points, waist chosen from the state's largest |l|."""
    r = np.asarray(r, dtype=float)
    phi = np.asarray(phi, dtype=float)
    w = grid.effective_waist(state.max_abs_oam())
    radial: dict[int, np.ndarray] = {}
    fields: dict[object, np.ndarray] = {}
    for (l, p), a in state.amplitudes.items():
        if abs(l) not in radial:
            radial[abs(l)] = _lg_radial(abs(l), r, w)
        term = a * radial[abs(l)] * np.exp(1j * l * phi)
        fields[p] = fields[p] + term if p in fields else term
    total = np.zeros(np.broadcast(r, phi).shape)
    for f in fields.values():
        total += f.real ** 2 + f.imag ** 2
    return total


def render(state: HybridState, grid: GridSpec) -> IntensityImage:
    x, y = grid.coordinates()
    pixels = evaluate_intensity(state, grid, np.hypot(x, y), np.arctan2(y, x))
    log.debug("rendered %dx%d image, |l|max=%d", grid.n, grid.n, state.max_abs_oam())
    return IntensityImage(pixels, grid, "raw", state.max_abs_oam())


def encode_pgm(img: IntensityImage) -> bytes:
    """Binary 16-bit PGM, samples scaled to the peak and rounded half up."""
    peak = img.peak
    if peak <= 0:
        raise AllZeroImageError("refusing to write an all-zero image")
    h, w = img.pixels.shape
    q = np.floor(img.pixels * (PGM_MAXVAL / peak) + 0.5)
    samples = np.clip(q, 0, PGM_MAXVAL).astype(">u2")
    return f"P5\n{w} {h}\n{PGM_MAXVAL}\n".encode("ascii") + samples.tobytes()


def write_pgm(img: IntensityImage, path: Path) -> Path:
    return write_bytes_atomic(Path(path), encode_pgm(img))


_PGM_HEADER = re.compile(rb"P5(?:\s|#[^\n]*\n)+(\d+)(?:\s|#[^\n]*\n)+(\d+)(?:\s|#[^\n]*\n)+(\d+)\s")


def read_pgm(path: Path) -> np.ndarray:
    data = Path(path).read_bytes()
    m = _PGM_HEADER.match(data)
    if not m:
        raise ValueError(f"{path}: not a binary PGM")
    width, height, maxval = (int(g) for g in m.groups())
    dtype = ">u2" if maxval > 255 else "u1"
    body = np.frombuffer(data, dtype=dtype, count=width * height, offset=m.end())
    return body.reshape(height, width).astype(np.uint16)
