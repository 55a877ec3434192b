"""Jones-calculus elements of the signal and pump paths.

Angles are fast-axis angles measured from the vertical axis (``chi``). The
textbook matrices are written for the from-horizontal angle
``psi = pi/2 - chi``; rows and columns are ordered (H, V). No global phase
factor is attached to the retarders, so hwp(chi) @ hwp(chi) is exactly I.

Sense convention: hwp(chi) maps |V> to linear polarization at +2*chi from
vertical, tilted toward +H.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import UnbalancedInputWarning, UnsupportedInputError
from .hybrid_state import (
    UNIT_TOL,
    HybridState,
    Key,
    OamIndex,
    PolAxis,
    map_polarization,
)

log = logging.getLogger(__name__)

BALANCE_TOL = 1e-9

_EYE = np.eye(2, dtype=complex)


class OperatorKind(str, Enum):
    UNITARY = "unitary"
    PARTIAL_ISOMETRY = "partial-isometry"
    LINEAR = "linear"


@dataclass(frozen=True, eq=False)
class ElementOperator:
    """Linear map on HybridState.

    ``jones`` acts on polarization (lab frame). ``imprint`` adds a charge per
    output polarization (phase plate); ``support`` restricts the accepted input
    OAM indices. ``oam_turn`` multiplies each l component by e^{-i l oam_turn},
    which rotates the transverse pattern counterclockwise by that angle.
    """

    name: str
    kind: OperatorKind
    jones: np.ndarray
    imprint: Optional[Mapping[PolAxis, int]] = None
    support: Optional[frozenset[int]] = None
    oam_turn: float = 0.0
    precheck: Optional[Callable[[HybridState], None]] = None

    def apply(self, s: HybridState) -> HybridState:
        return self._apply(s, check=True)

    def _apply(self, s: HybridState, *, check: bool) -> HybridState:
        s = s.in_lab()
        if self.support is not None:
            outside = [l for l in s.oam_indices() if l not in self.support]
            if outside:
                raise UnsupportedInputError(
                    f"{self.name} accepts OAM {sorted(self.support)} only, input carries {outside}"
                )
        if check and self.precheck is not None:
            self.precheck(s)

        out = map_polarization(s, self.jones)
        if self.imprint:
            out = HybridState(
                {(l + self.imprint.get(p, 0), p): a for (l, p), a in out.amplitudes.items()},
                frame=out.frame,
            )
        if self.oam_turn:
            out = HybridState(
                {(l, p): a * complex(math.cos(l * self.oam_turn), -math.sin(l * self.oam_turn))
                 for (l, p), a in out.amplitudes.items()},
                frame=out.frame,
            )
        unit = s.unit and self.kind is not OperatorKind.LINEAR and abs(out.norm() - 1.0) <= UNIT_TOL
        return HybridState(out.amplitudes, frame=out.frame, unit=unit)

    def __call__(self, s: HybridState) -> HybridState:
        return self.apply(s)

    def matrix(self, keys: Sequence[Key]) -> np.ndarray:
        """Dense matrix on the span of ``keys`` (columns in, rows out)."""
        index = {k: i for i, k in enumerate(keys)}
        m = np.zeros((len(keys), len(keys)), dtype=complex)
        for j, key in enumerate(keys):
            if self.support is not None and key[0] not in self.support:
                continue
            image = self._apply(HybridState({key: 1.0}), check=False)
            for out_key, a in image.amplitudes.items():
                if out_key not in index:
                    raise ValueError(f"{self.name} maps {key} outside the given basis ({out_key})")
                m[index[out_key], j] = a
        return m

    def is_unitary(self, tol: float = UNIT_TOL) -> bool:
        gram = self.jones.conj().T @ self.jones
        return bool(np.allclose(gram, _EYE, rtol=0.0, atol=tol))


class OpticalChain:
    """Operators applied right to left, the way the matrix product reads."""

    def __init__(self, *ops: ElementOperator) -> None:
        self.ops = ops

    def apply(self, s: HybridState) -> HybridState:
        for op in reversed(self.ops):
            s = op.apply(s)
        return s

    def __call__(self, s: HybridState) -> HybridState:
        return self.apply(s)

    def __repr__(self) -> str:
        return " @ ".join(op.name for op in self.ops)


def compose(*ops: ElementOperator) -> OpticalChain:
    return OpticalChain(*ops)


def _from_horizontal(chi: float) -> float:
    return math.pi / 2 - chi


def hwp(chi: float) -> ElementOperator:
    psi = _from_horizontal(chi)
    c, s = math.cos(2 * psi), math.sin(2 * psi)
    jones = np.array([[c, s], [s, -c]], dtype=complex)
    return ElementOperator(name=f"hwp({chi:.6g})", kind=OperatorKind.UNITARY, jones=jones)


def qwp(chi: float) -> ElementOperator:
    psi = _from_horizontal(chi)
    c, s = math.cos(psi), math.sin(psi)
    off = (1 - 1j) * s * c
    jones = np.array([[c * c + 1j * s * s, off], [off, s * s + 1j * c * c]], dtype=complex)
    return ElementOperator(name=f"qwp({chi:.6g})", kind=OperatorKind.UNITARY, jones=jones)


def linear_polarizer(chi: float) -> ElementOperator:
    """Projector onto linear polarization at ``chi`` from vertical."""
    v = np.array([math.sin(chi), math.cos(chi)], dtype=complex)
    return ElementOperator(
        name=f"polarizer({chi:.6g})", kind=OperatorKind.PARTIAL_ISOMETRY, jones=np.outer(v, v.conj())
    )


def oam_rotation(delta: float) -> ElementOperator:
    """Rotate the transverse pattern by ``delta`` counterclockwise."""
    return ElementOperator(name=f"rot({delta:.6g})", kind=OperatorKind.UNITARY, jones=_EYE, oam_turn=delta)


def phase_plate(l: OamIndex) -> ElementOperator:
    """|0,H> -> |l,H>, |0,V> -> |-l,V>; only OAM 0 is accepted."""
    return ElementOperator(
        name=f"phase_plate({l})",
        kind=OperatorKind.PARTIAL_ISOMETRY,
        jones=_EYE,
        imprint={PolAxis.H: l, PolAxis.V: -l},
        support=frozenset({0}),
    )


def _check_balanced(s: HybridState) -> None:
    h = abs(s.amplitude(0, PolAxis.H))
    v = abs(s.amplitude(0, PolAxis.V))
    if abs(h - v) > BALANCE_TOL:
        msg = f"Sagnac input is unbalanced: |H|={h:.6g}, |V|={v:.6g}"
        log.warning(msg)
        warnings.warn(msg, UnbalancedInputWarning, stacklevel=4)


def sagnac(l: OamIndex) -> ElementOperator:
    """The interferometer loop with its phase plate; mirror phases are absorbed."""
    plate = phase_plate(l)
    return ElementOperator(
        name=f"sagnac({l})",
        kind=plate.kind,
        jones=plate.jones,
        imprint=plate.imprint,
        support=plate.support,
        precheck=_check_balanced,
    )


def pbs() -> tuple[ElementOperator, ElementOperator]:
    """Transmit (H) and reflect (V) ports."""
    transmit = ElementOperator(
        name="pbs.transmit", kind=OperatorKind.PARTIAL_ISOMETRY, jones=np.diag([1.0, 0.0]).astype(complex)
    )
    reflect = ElementOperator(
        name="pbs.reflect", kind=OperatorKind.PARTIAL_ISOMETRY, jones=np.diag([0.0, 1.0]).astype(complex)
    )
    return transmit, reflect
