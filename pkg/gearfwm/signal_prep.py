"""Input signal of the FWM stage, built in closed form and from the optics.

Pump basis: pump 2 reaches the HWP at C horizontally polarized, so the pump
polarization after a dial angle theta is hwp(theta)|H>, linear at
2*theta + pi/2 from vertical. In that frame key V is |P_theta> and key H is
|P_gamma>. The composed chain equals the closed form up to the global phase
e^{i 3pi/4}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .hybrid_state import HybridState, Key, OamIndex, PolAxis, basis_state, rotate_pol_basis
from .optics_elements import compose, hwp, qwp, sagnac

H, V = PolAxis.H, PolAxis.V

COMPOSITION_PHASE = cmath.exp(3j * math.pi / 4)


@dataclass(frozen=True)
class PrepConfig:
    l: OamIndex
    theta0: float = 0.0
    theta: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta0) and math.isfinite(self.theta)):
            raise ValueError(f"angles must be finite, got theta0={self.theta0!r}, theta={self.theta!r}")

    @property
    def delta(self) -> float:
        return self.theta - self.theta0

    def reduced(self) -> tuple[float, float]:
        """(theta0, theta) folded into [0, pi); a HWP repeats every pi."""
        return self.theta0 % math.pi, self.theta % math.pi


def _accumulate(terms: list[tuple[Key, complex]], *, frame: float = 0.0) -> HybridState:
    acc: dict[Key, complex] = {}
    for key, amp in terms:
        acc[key] = acc.get(key, 0j) + amp
    return HybridState(acc, frame=frame, unit=True)


def eq1_closed_form(cfg: PrepConfig) -> HybridState:
    l = cfg.l
    e = cmath.exp(2j * cfg.theta0)
    ec = e.conjugate()
    return _accumulate([
        ((l, H), 0.5j * e),
        ((-l, H), 0.5 * ec),
        ((l, V), -0.5 * e),
        ((-l, V), -0.5j * ec),
    ])


def balanced_gaussian() -> HybridState:
    """(|0,H> + |0,V>)/sqrt 2, from a vertical Gaussian through a QWP and a HWP."""
    return compose(hwp(math.pi / 8), qwp(0.0)).apply(basis_state(0, V))


def eq1_by_composition(cfg: PrepConfig) -> HybridState:
    chain = compose(hwp(cfg.theta0), qwp(math.pi / 4), sagnac(cfg.l))
    return chain.apply(balanced_gaussian())


def pump_frame(theta: float) -> float:
    return 2 * theta + math.pi / 2


def pump_polarization(theta: float) -> np.ndarray:
    """Jones vector (H, V) of pump 2 after the HWP at C."""
    return hwp(theta).jones @ np.array([1.0, 0.0], dtype=complex)


def eq2_pump_basis(cfg: PrepConfig) -> HybridState:
    return rotate_pol_basis(eq1_closed_form(cfg), pump_frame(cfg.theta))


def eq2_closed_form(cfg: PrepConfig) -> HybridState:
    """The pump-basis coefficients written out; V is P_theta, H is P_gamma."""
    l = cfg.l
    e = cmath.exp(-2j * cfg.delta)
    ec = e.conjugate()
    return _accumulate(
        [
            ((l, V), 0.5j * e),
            ((-l, V), 0.5 * ec),
            ((l, H), 0.5 * e),
            ((-l, H), 0.5j * ec),
        ],
        frame=pump_frame(cfg.theta),
    )
