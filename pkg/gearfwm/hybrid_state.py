"""Pure states over the joint (OAM, polarization) basis.

A state is a sparse map from ``(l, PolAxis)`` to a complex amplitude plus the
polarization frame the keys refer to. In frame ``chi`` (radians from vertical)
key ``V`` is linear polarization at ``chi`` and key ``H`` the orthogonal axis at
``chi + pi/2``; frame 0 is the laboratory basis. Only the radial index p = 0 is
modeled, so a key is fully described by its topological charge.

Global phase is kept in storage. Compare states with :func:`overlap`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Optional, Tuple

import numpy as np

from .errors import ZeroNormError

OamIndex = int

PRUNE_BELOW = 1e-15
UNIT_TOL = 1e-12


class PolAxis(str, Enum):
    H = "H"
    V = "V"


Key = Tuple[OamIndex, PolAxis]

_AXES = (PolAxis.H, PolAxis.V)


def _check_key(key: Key) -> Key:
    l, p = key
    if isinstance(l, bool) or not isinstance(l, (int, np.integer)):
        raise ValueError(f"OAM index must be an integer, got {l!r}")
    return int(l), PolAxis(p)


@dataclass(frozen=True)
class HybridState:
    amplitudes: Mapping[Key, complex]
    frame: float = 0.0
    unit: bool = False
    _norm: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        clean: dict[Key, complex] = {}
        for key, amp in self.amplitudes.items():
            a = complex(amp)
            if abs(a) < PRUNE_BELOW:
                continue
            clean[_check_key(key)] = a
        object.__setattr__(self, "amplitudes", MappingProxyType(clean))
        object.__setattr__(self, "frame", float(self.frame))
        norm = math.sqrt(sum(abs(a) ** 2 for a in clean.values()))
        object.__setattr__(self, "_norm", norm)
        if self.unit and abs(norm - 1.0) > UNIT_TOL:
            raise ValueError(f"state flagged unit has norm {norm!r}")

    def __hash__(self) -> int:
        # MappingProxyType is unhashable; hash the items instead
        return hash((tuple(sorted(self.amplitudes.items())), self.frame, self.unit))

    def norm(self) -> float:
        return self._norm

    def amplitude(self, l: OamIndex, p: PolAxis) -> complex:
        return self.amplitudes.get((l, PolAxis(p)), 0j)

    def oam_indices(self) -> list[int]:
        return sorted({l for l, _ in self.amplitudes})

    def max_abs_oam(self) -> int:
        return max((abs(l) for l, _ in self.amplitudes), default=0)

    def normalized(self) -> HybridState:
        n = self.norm()
        if n == 0.0:
            raise ZeroNormError("cannot normalize a vanishing state")
        return HybridState({k: a / n for k, a in self.amplitudes.items()}, frame=self.frame, unit=True)

    def scaled(self, c: complex) -> HybridState:
        return HybridState({k: c * a for k, a in self.amplitudes.items()}, frame=self.frame)

    def in_frame(self, frame: float) -> HybridState:
        return self if frame == self.frame else rotate_pol_basis(self, frame - self.frame)

    def in_lab(self) -> HybridState:
        return self.in_frame(0.0)


def block(s: HybridState, p: PolAxis) -> dict[int, complex]:
    """OAM amplitudes carried by polarization key ``p`` in the state's own frame."""
    p = PolAxis(p)
    return {l: a for (l, q), a in s.amplitudes.items() if q is p}


def basis_state(l: OamIndex, p: PolAxis) -> HybridState:
    return HybridState({(l, PolAxis(p)): 1.0 + 0j}, unit=True)


def combine(terms: Iterable[Tuple[complex, HybridState]]) -> HybridState:
    """Linear combination without renormalization, in the first term's frame."""
    terms = list(terms)
    if not terms:
        raise ValueError("combine needs at least one term")
    frame = terms[0][1].frame
    acc: dict[Key, complex] = {}
    for c, s in terms:
        for key, a in s.in_frame(frame).amplitudes.items():
            acc[key] = acc.get(key, 0j) + complex(c) * a
    return HybridState(acc, frame=frame)


def superpose(terms: Iterable[Tuple[complex, HybridState]]) -> HybridState:
    combo = combine(terms)
    if combo.norm() == 0.0:
        raise ZeroNormError("superposition cancels to the zero vector")
    return combo.normalized()


def inner_product(a: HybridState, b: HybridState) -> complex:
    """<a|b>, conjugating ``a``; ``b`` is re-expressed in ``a``'s frame first."""
    b = b.in_frame(a.frame)
    return sum((a_amp.conjugate() * b.amplitudes.get(key, 0j) for key, a_amp in a.amplitudes.items()), 0j)


def overlap(a: HybridState, b: HybridState) -> float:
    return abs(inner_product(a, b))


class Projection(NamedTuple):
    state: Optional[HybridState]
    probability: float


def project_pol(s: HybridState, p: PolAxis, *, strict: bool = False) -> Projection:
    """Keep the ``p`` component. Probability is its squared norm over the state's.

    A vanishing component comes back as ``Projection(None, 0.0)``; with
    ``strict=True`` it raises ZeroNormError instead.
    """
    p = PolAxis(p)
    total = s.norm() ** 2
    if total == 0.0:
        raise ZeroNormError("cannot project a vanishing state")
    part = HybridState({k: a for k, a in s.amplitudes.items() if k[1] is p}, frame=s.frame)
    prob = part.norm() ** 2 / total
    if part.norm() == 0.0:
        if strict:
            raise ZeroNormError(f"state has no {p.value} component")
        return Projection(None, 0.0)
    return Projection(part.normalized(), prob)


def map_polarization(s: HybridState, matrix: np.ndarray, *, frame: Optional[float] = None) -> HybridState:
    """Apply a 2x2 matrix (rows/cols ordered H, V) to every OAM block."""
    by_l: dict[int, np.ndarray] = {}
    for (l, p), a in s.amplitudes.items():
        vec = by_l.setdefault(l, np.zeros(2, dtype=complex))
        vec[0 if p is PolAxis.H else 1] = a
    out: dict[Key, complex] = {}
    for l, vec in by_l.items():
        h, v = matrix @ vec
        out[(l, PolAxis.H)] = complex(h)
        out[(l, PolAxis.V)] = complex(v)
    return HybridState(out, frame=s.frame if frame is None else frame)


def frame_rotation(chi: float) -> np.ndarray:
    """Coefficient map taking frame f amplitudes to frame f + chi."""
    c, s = math.cos(chi), math.sin(chi)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rotate_pol_basis(s: HybridState, chi: float) -> HybridState:
    """Same physical state, keys re-expressed in the frame rotated by ``chi``.

    Starting from the lab frame, key V then means linear polarization at ``chi``
    from vertical (toward +H) and key H the axis perpendicular to it.
    """
    out = map_polarization(s, frame_rotation(chi), frame=s.frame + chi)
    if s.unit and abs(out.norm() - 1.0) <= UNIT_TOL:
        return HybridState(out.amplitudes, frame=out.frame, unit=True)
    return out
