from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .field_render import GridSpec
from .fwm_process import DEFAULT_BETA, DetectMode, FwmParams
from .pattern_analysis import Annulus
from .signal_prep import PrepConfig


@dataclass(frozen=True)
class RunConfig:
    """One simulated configuration, angles in degrees as in the run document."""

    l: int
    theta0_deg: float = 0.0
    theta_deg: float = 0.0
    beta: float = DEFAULT_BETA
    detect_mode: DetectMode = DetectMode.DOMINANT
    grid_n: int = 512
    grid_extent: float = 2.5
    annulus: Optional[Annulus] = None

    @property
    def theta0(self) -> float:
        return math.radians(self.theta0_deg)

    @property
    def theta(self) -> float:
        return math.radians(self.theta_deg)

    def prep(self) -> PrepConfig:
        return PrepConfig(l=self.l, theta0=self.theta0, theta=self.theta)

    def fwm_params(self) -> FwmParams:
        return FwmParams(beta=self.beta, theta=self.theta, detect_mode=self.detect_mode)

    def grid(self, waist: float = 1.0) -> GridSpec:
        return GridSpec(n=self.grid_n, extent=self.grid_extent, waist=waist)
