"""Polarization transfer through the four-wave-mixing stage.

The signal component parallel to pump 2 (|P_theta>) is generated with
amplitude weight beta and leaves horizontally polarized; the perpendicular
component (|P_gamma>) is generated with weight 1 and leaves vertically
polarized. OAM amplitudes pass through unchanged. beta is an amplitude
factor, so the H/V power ratio is beta**2.

The Zeeman-sublevel reason for beta != 1 (pi-pi versus pi-sigma transitions)
is not simulated. Phase matching and energy conservation are taken as exact.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ZeroNormError
from .hybrid_state import HybridState, PolAxis, block, project_pol
from .optics_elements import ElementOperator, OperatorKind
from .signal_prep import pump_frame

log = logging.getLogger(__name__)

DEFAULT_BETA = 2.1


class DetectMode(str, Enum):
    FULL = "full"
    DOMINANT = "dominant"


@dataclass(frozen=True)
class FwmParams:
    beta: float = DEFAULT_BETA
    theta: float = 0.0
    detect_mode: DetectMode = DetectMode.DOMINANT
    # generated light wavelength; reported, never used in the model
    wavelength_nm: float = 795.0

    def __post_init__(self) -> None:
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be a positive finite number, got {self.beta!r}")
        object.__setattr__(self, "detect_mode", DetectMode(self.detect_mode))


def fwm_operator(params: FwmParams) -> ElementOperator:
    """beta |H><P_theta| + |V><P_gamma| in the lab frame."""
    g = pump_frame(params.theta)
    p_theta = np.array([math.sin(g), math.cos(g)])
    p_gamma = np.array([math.cos(g), -math.sin(g)])
    jones = np.vstack([params.beta * p_theta, p_gamma]).astype(complex)
    return ElementOperator(name=f"fwm(beta={params.beta:g})", kind=OperatorKind.LINEAR, jones=jones)


def fwm_transfer(signal: HybridState, params: FwmParams) -> HybridState:
    """Generated light, left unnormalized."""
    return fwm_operator(params).apply(signal)


def detected_state(fwm: HybridState, params: FwmParams) -> HybridState:
    if params.detect_mode is DetectMode.DOMINANT:
        kept = project_pol(fwm, PolAxis.H, strict=True).state
        assert kept is not None
        return kept
    if fwm.norm() == 0.0:
        raise ZeroNormError("generated light vanishes")
    return fwm.normalized()


def block_power(s: HybridState, p: PolAxis) -> float:
    return sum(abs(a) ** 2 for a in block(s.in_lab(), p).values())


def power_ratio(fwm: HybridState) -> float:
    """H over V power of the generated light."""
    v = block_power(fwm, PolAxis.V)
    if v == 0.0:
        return math.inf
    return block_power(fwm, PolAxis.H) / v


def h_probability(params: FwmParams) -> float:
    b2 = params.beta ** 2
    return b2 / (b2 + 1.0)
