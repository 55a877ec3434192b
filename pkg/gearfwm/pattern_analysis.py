"""Petal count, pattern rotation and the alpha-vs-theta line.

Rotation is read from the phase of the m-th angular Fourier coefficient

    C_m = (1/K) sum_k p_k exp(+i m phi_k),    phi_k = 2 pi (k + 1/2) / K

so that a profile shifted counterclockwise by alpha has its phase advanced by
m * alpha. Counterclockwise is positive (x right, y up). A single frame fixes
alpha only modulo the pattern period 2 pi / m = pi / |l|.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np
from scipy.ndimage import map_coordinates

from .errors import (
    EmptyAnnulusError,
    FlatProfileError,
    InsufficientSamplesError,
    UnwrapAmbiguityError,
)
from .field_render import GridSpec, IntensityImage, evaluate_intensity
from .hybrid_state import HybridState

log = logging.getLogger(__name__)

DEFAULT_BINS = 720
FLAT_TOL = 1e-9
IMAGE_FLAT_TOL = 1e-6  # spline resampling error sits well below this
SPLINE_ORDER = 5
MIN_FIT_SAMPLES = 3
THETA_CYCLE = math.pi / 2
TWO_PI = 2 * math.pi


def control_ratio(l: int) -> float:
    """Pattern rotation per unit of pump HWP rotation, 2/|l|."""
    if l == 0:
        raise ValueError("a Gaussian (l = 0) has no petals to rotate")
    return pattern_period(l) / THETA_CYCLE


def pattern_period(l: int) -> float:
    if l == 0:
        raise ValueError("a Gaussian (l = 0) has no petals to rotate")
    return math.pi / abs(l)


def predicted_rotation(l: int, theta: float, theta0: float = 0.0) -> float:
    """Gear rotation relative to the theta = theta0 pattern (signed by l)."""
    if l == 0:
        raise ValueError("a Gaussian (l = 0) has no petals to rotate")
    return 2.0 * (theta - theta0) / l


def wrap(x: float, period: float) -> float:
    """Fold into (-period/2, period/2]."""
    return x - period * math.ceil(x / period - 0.5)


@dataclass(frozen=True)
class Annulus:
    r_inner: float
    r_outer: float

    def __post_init__(self) -> None:
        if not (0 <= self.r_inner < self.r_outer):
            raise ValueError(f"annulus needs 0 <= r_inner < r_outer, got [{self.r_inner}, {self.r_outer}]")


def default_annulus(grid: GridSpec, l_abs: int) -> Annulus:
    """Ring radius plus or minus half a mode waist."""
    r = grid.ring_radius(l_abs)
    w = grid.effective_waist(l_abs)
    return Annulus(max(0.0, r - 0.5 * w), r + 0.5 * w)


@dataclass(frozen=True, eq=False)
class AngularProfile:
    bins: np.ndarray
    annulus: Optional[Annulus] = None

    def __post_init__(self) -> None:
        b = np.asarray(self.bins, dtype=float)
        if b.ndim != 1 or b.size < 8:
            raise ValueError("a profile needs at least 8 azimuth bins")
        object.__setattr__(self, "bins", b)

    @property
    def size(self) -> int:
        return int(self.bins.size)

    def centers(self) -> np.ndarray:
        return TWO_PI * (np.arange(self.size) + 0.5) / self.size

    @property
    def mean(self) -> float:
        return float(self.bins.mean())


@dataclass(frozen=True)
class RotationMeasurement:
    m: int
    phase: float
    alpha: float


def check_geometry(grid: GridSpec, l_abs: int, annulus: Optional[Annulus] = None, bins: int = DEFAULT_BINS) -> Annulus:
    """Validate a profile request up front and return the annulus it will use."""
    if bins < 8 * max(l_abs, 1):
        raise ValueError(f"{bins} bins cannot resolve harmonic {2 * l_abs}; need at least {8 * l_abs}")
    annulus = annulus or default_annulus(grid, l_abs)
    if annulus.r_outer > grid.half_width:
        raise ValueError(f"annulus outer radius {annulus.r_outer:g} leaves the window (half-width {grid.half_width:g})")
    return annulus


def _polar_grid(annulus: Annulus, bins: int, radial_samples: int) -> tuple[np.ndarray, np.ndarray]:
    """Area-weighted radial midpoints and bin-centre azimuths."""
    if radial_samples < 1:
        raise ValueError(f"radial_samples must be at least 1, got {radial_samples}")
    dr = (annulus.r_outer - annulus.r_inner) / radial_samples
    r = annulus.r_inner + (np.arange(radial_samples) + 0.5) * dr
    phi = TWO_PI * (np.arange(bins) + 0.5) / bins
    return r, phi


def _ring_average(r: np.ndarray, intensity: np.ndarray) -> np.ndarray:
    return r @ intensity / r.sum()


def angular_profile(
    img: IntensityImage,
    annulus: Optional[Annulus] = None,
    bins: int = DEFAULT_BINS,
    radial_samples: int = 64,
) -> AngularProfile:
    """Profile read off a rendered image.

    The image is resampled with a quintic spline at the same polar points
    ``polar_profile`` evaluates, so the lattice does not leak into the bins.
    """
    grid = img.grid
    if grid is None:
        raise ValueError("image carries no grid; pixel radii are unknown")
    annulus = check_geometry(grid, img.l_abs, annulus, bins)
    if annulus.r_outer - annulus.r_inner < grid.pitch:
        width = annulus.r_outer - annulus.r_inner
        raise EmptyAnnulusError(
            f"annulus width {width:g} is below one pixel ({grid.pitch:g}); the grid is too coarse"
        )

    r, phi = _polar_grid(annulus, bins, radial_samples)
    centre = (grid.n - 1) / 2
    col = centre + np.outer(r, np.cos(phi)) / grid.pitch
    row = centre - np.outer(r, np.sin(phi)) / grid.pitch
    samples = map_coordinates(img.pixels, [row, col], order=SPLINE_ORDER, mode="nearest")
    return AngularProfile(_ring_average(r, samples), annulus)


def polar_profile(
    state: HybridState,
    grid: GridSpec,
    annulus: Optional[Annulus] = None,
    bins: int = DEFAULT_BINS,
    radial_samples: int = 64,
) -> AngularProfile:
    """Profile evaluated analytically on the polar grid, no image involved."""
    annulus = check_geometry(grid, state.max_abs_oam(), annulus, bins)
    r, phi = _polar_grid(annulus, bins, radial_samples)
    intensity = evaluate_intensity(state, grid, r[:, None], phi[None, :])
    return AngularProfile(_ring_average(r, intensity), annulus)


def harmonic(profile: AngularProfile, m: int) -> complex:
    return complex(np.mean(profile.bins * np.exp(1j * m * profile.centers())))


def _check_harmonic(profile: AngularProfile, m: int) -> None:
    if not 1 <= m < profile.size / 2:
        raise ValueError(f"harmonic {m} is outside 1..{profile.size // 2 - 1}")


def petal_count(profile: AngularProfile, flat_tol: float = FLAT_TOL) -> int:
    """Dominant non-zero angular harmonic."""
    mags = np.abs(np.fft.rfft(profile.bins)) / profile.size
    mean = abs(profile.mean)
    if mean == 0.0 or mags[1:].max() < flat_tol * mean:
        raise FlatProfileError("profile has no azimuthal modulation (donut)")
    return int(np.argmax(mags[1:]) + 1)


def _modulation(profile: AngularProfile, m: int, flat_tol: float) -> complex:
    _check_harmonic(profile, m)
    c = harmonic(profile, m)
    if abs(c) < flat_tol * abs(profile.mean) or abs(c) == 0.0:
        raise FlatProfileError(f"profile has no harmonic {m} to track")
    return c


def rotation_between(ref: AngularProfile, cur: AngularProfile, m: int, flat_tol: float = FLAT_TOL) -> float:
    """Counterclockwise rotation of ``cur`` relative to ``ref``, in (-pi/m, pi/m]."""
    c_ref = _modulation(ref, m, flat_tol)
    c_cur = _modulation(cur, m, flat_tol)
    return wrap(np.angle(c_cur) - np.angle(c_ref), TWO_PI) / m


def measure_rotation(ref: AngularProfile, cur: AngularProfile, m: Optional[int] = None) -> RotationMeasurement:
    m = petal_count(cur) if m is None else m
    return RotationMeasurement(m=m, phase=float(np.angle(harmonic(cur, m))), alpha=rotation_between(ref, cur, m))


def visibility(profile: AngularProfile, m: int) -> float:
    """Fringe visibility of harmonic m: 1 for the ideal gear, 0 for a donut."""
    _check_harmonic(profile, m)
    return 2 * abs(harmonic(profile, m)) / abs(profile.mean)


def peak_angles(profile: AngularProfile, m: int) -> np.ndarray:
    """Azimuths of the m brightest spots, parabolically refined, ascending."""
    _check_harmonic(profile, m)
    y = profile.bins
    left, right = np.roll(y, 1), np.roll(y, -1)
    maxima = np.flatnonzero((y > left) & (y >= right))
    if maxima.size < m:
        raise FlatProfileError(f"found {maxima.size} spots, expected {m}")
    top = maxima[np.argsort(y[maxima])[::-1][:m]]
    denom = left[top] - 2 * y[top] + right[top]
    offset = np.where(denom != 0, 0.5 * (left[top] - right[top]) / np.where(denom != 0, denom, 1), 0.0)
    step = TWO_PI / profile.size
    return np.sort(np.mod((top + 0.5 + offset) * step, TWO_PI))


def rotation_by_peaks(ref: AngularProfile, cur: AngularProfile, m: int) -> float:
    """Rotation from the spot positions themselves, the way a cross line through
    opposite spots is read off a photograph."""

    def spot_phase(p: AngularProfile) -> float:
        return float(np.angle(np.exp(1j * m * peak_angles(p, m)).sum()))

    return wrap(spot_phase(cur) - spot_phase(ref), TWO_PI) / m


def unwrap_alpha(alphas: Sequence[float], m: int) -> list[float]:
    """Accumulate wrapped increments; each step must stay under a quarter period."""
    period = TWO_PI / m
    if not alphas:
        return []
    out = [float(alphas[0])]
    for prev, nxt in zip(alphas, alphas[1:]):
        step = wrap(nxt - prev, period)
        if abs(step) > period / 4:
            raise UnwrapAmbiguityError(
                f"rotation step {math.degrees(step):.6g} deg exceeds a quarter of the "
                f"{math.degrees(period):.6g} deg pattern period; sample theta more finely"
            )
        out.append(out[-1] + step)
    return out


class FitResult(NamedTuple):
    slope: float
    intercept: float
    max_residual: float
    samples: int


def fit_alpha_vs_theta(
    samples: Iterable[tuple[float, float]], period: Optional[float] = None
) -> FitResult:
    """Ordinary least squares alpha = slope * theta + intercept on unwrapped data.

    Units are the caller's; with ``period`` given, consecutive alpha values more
    than half a period apart are rejected.
    """
    pts = sorted((float(t), float(a)) for t, a in samples)
    if len(pts) < MIN_FIT_SAMPLES:
        raise InsufficientSamplesError(f"need at least {MIN_FIT_SAMPLES} samples, got {len(pts)}")
    theta = np.array([t for t, _ in pts])
    alpha = np.array([a for _, a in pts])
    if np.ptp(theta) == 0.0:
        raise InsufficientSamplesError("all samples share one theta")
    if period is not None:
        jumps = np.abs(np.diff(alpha))
        if np.any(jumps > period / 2):
            raise UnwrapAmbiguityError(
                f"alpha jumps by {jumps.max():.6g}, more than half the pattern period {period:.6g}"
            )
    design = np.column_stack([theta, np.ones_like(theta)])
    (slope, intercept), *_ = np.linalg.lstsq(design, alpha, rcond=None)
    residual = alpha - (slope * theta + intercept)
    result = FitResult(float(slope), float(intercept), float(np.abs(residual).max()), len(pts))
    log.info("fit over %d samples: slope=%.12g intercept=%.6g", result.samples, result.slope, result.intercept)
    return result
