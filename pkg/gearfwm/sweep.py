"""Frame pipeline: prepared signal -> FWM -> detected gear -> angular profile.

Frames at different theta are independent; a sweep may render them on a
thread pool and still reports them in theta order.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import InsufficientSamplesError, UnwrapAmbiguityError
from .field_render import GridSpec, IntensityImage, render
from .fwm_process import DEFAULT_BETA, DetectMode, FwmParams, detected_state, fwm_transfer
from .hybrid_state import HybridState
from .pattern_analysis import (
    DEFAULT_BINS,
    FLAT_TOL,
    IMAGE_FLAT_TOL,
    MIN_FIT_SAMPLES,
    AngularProfile,
    Annulus,
    FitResult,
    angular_profile,
    check_geometry,
    control_ratio,
    fit_alpha_vs_theta,
    pattern_period,
    polar_profile,
    rotation_between,
    unwrap_alpha,
)
from .signal_prep import PrepConfig, eq1_by_composition

log = logging.getLogger(__name__)

SAMPLING_MODES = ("pixel", "polar")


@dataclass(frozen=True)
class FrameSetup:
    """Everything about a frame except the pump HWP angle theta."""

    l: int
    theta0: float = 0.0
    beta: float = DEFAULT_BETA
    detect_mode: DetectMode = DetectMode.DOMINANT
    grid: GridSpec = field(default_factory=GridSpec)
    annulus: Optional[Annulus] = None
    bins: int = DEFAULT_BINS
    sampling: str = "pixel"
    radial_samples: int = 64

    def __post_init__(self) -> None:
        if self.sampling not in SAMPLING_MODES:
            raise ValueError(f"sampling must be one of {', '.join(SAMPLING_MODES)}, got {self.sampling!r}")
        if self.l == 0:
            raise ValueError("a Gaussian (l = 0) has no petals to rotate")
        if self.radial_samples < 1:
            raise ValueError(f"radial_samples must be at least 1, got {self.radial_samples}")
        check_geometry(self.grid, abs(self.l), self.annulus, self.bins)

    @property
    def flat_tol(self) -> float:
        return FLAT_TOL if self.sampling == "polar" else IMAGE_FLAT_TOL

    @property
    def petals(self) -> int:
        return 2 * abs(self.l)


class Frame(NamedTuple):
    theta: float
    signal: HybridState
    fwm: HybridState
    detected: HybridState


def simulate_frame(setup: FrameSetup, theta: float) -> Frame:
    signal = eq1_by_composition(PrepConfig(l=setup.l, theta0=setup.theta0, theta=theta))
    params = FwmParams(beta=setup.beta, theta=theta, detect_mode=setup.detect_mode)
    fwm = fwm_transfer(signal, params)
    return Frame(theta, signal, fwm, detected_state(fwm, params))


def profile_of(setup: FrameSetup, state: HybridState, image: Optional[IntensityImage] = None) -> AngularProfile:
    """Angular profile of ``state``; pixel sampling reads ``image`` when it is already rendered."""
    if setup.sampling == "polar":
        return polar_profile(state, setup.grid, setup.annulus, setup.bins, setup.radial_samples)
    img = image if image is not None else render(state, setup.grid)
    return angular_profile(img, setup.annulus, setup.bins, setup.radial_samples)


def sweep_thetas(start: float, end: float, steps: int, l: int) -> np.ndarray:
    """Evenly spaced pump angles, checked to be fine enough to unwrap."""
    if steps < MIN_FIT_SAMPLES:
        raise InsufficientSamplesError(f"a sweep needs at least {MIN_FIT_SAMPLES} steps, got {steps}")
    thetas = np.linspace(start, end, steps)
    step_alpha = abs(thetas[1] - thetas[0]) * control_ratio(l)
    if step_alpha >= pattern_period(l) / 4:
        raise UnwrapAmbiguityError(
            f"theta step {math.degrees(abs(thetas[1] - thetas[0])):.6g} deg turns the gear by "
            f"{math.degrees(step_alpha):.6g} deg, not below a quarter period; add steps"
        )
    return thetas


@dataclass(frozen=True)
class SweepResult:
    thetas: tuple[float, ...]
    alphas: tuple[float, ...]
    m: int
    frames: tuple[Frame, ...] = field(repr=False, default=())

    def samples_deg(self) -> list[tuple[float, float]]:
        return [(math.degrees(t), math.degrees(a)) for t, a in zip(self.thetas, self.alphas)]

    def fit_deg(self) -> FitResult:
        return fit_alpha_vs_theta(self.samples_deg(), period=math.degrees(2 * math.pi / self.m))


def run_sweep(
    setup: FrameSetup,
    thetas: Sequence[float],
    *,
    reference: Optional[HybridState] = None,
    workers: int = 1,
) -> SweepResult:
    """Measure the gear rotation at each theta.

    Rotation is relative to the first frame unless ``reference`` (a detected
    state) is given, and is unwrapped along increasing theta.
    """
    thetas = sorted(float(t) for t in thetas)
    if not thetas:
        raise InsufficientSamplesError("empty sweep")
    m = setup.petals

    def one(theta: float) -> tuple[Frame, AngularProfile]:
        frame = simulate_frame(setup, theta)
        log.debug("frame theta=%.6g deg", math.degrees(theta))
        return frame, profile_of(setup, frame.detected)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(one, thetas))

    ref_profile = profile_of(setup, reference) if reference is not None else results[0][1]
    wrapped = [rotation_between(ref_profile, prof, m, setup.flat_tol) for _, prof in results]
    alphas = unwrap_alpha(wrapped, m)
    log.info("sweep of %d frames, |l|=%d, sampling=%s", len(thetas), abs(setup.l), setup.sampling)
    return SweepResult(tuple(thetas), tuple(alphas), m, tuple(f for f, _ in results))
