"""The six anchored contraction conditions and their minimal constants.

Each kind compares, at every moved point ``x``, an aggregate of
``d(x,Tx)``, ``phi(Tx)`` and ``phi(x)`` against ``k`` times a reference
aggregate taken at the anchor ``x0``.  Generalized kinds swap ``d(x,x0)``
for ``M(x,x0)`` and only admit ``k`` in (0, 1/2).

Per point we split the inequality as ``lhs <= k * scaled + offset``; the
offset is the unscaled ``phi(x0)`` of the second family and zero otherwise.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .analysis import System
from .space import Point


class KOutOfRange(ValueError):
    pass


class ContractionKind(enum.Enum):
    TYPE1 = ("type1", 1, False)
    GEN_TYPE1 = ("gentype1", 1, True)
    TYPE2 = ("type2", 2, False)
    GEN_TYPE2 = ("gentype2", 2, True)
    TYPE3 = ("type3", 3, False)
    GEN_TYPE3 = ("gentype3", 3, True)

    def __init__(self, label, family, generalized):
        self.label = label
        self.family = family
        self.generalized = generalized

    @property
    def bound(self) -> float:
        return 0.5 if self.generalized else 1.0

    @classmethod
    def from_label(cls, label: str) -> "ContractionKind":
        for kind in cls:
            if kind.label == label.lower():
                return kind
        raise ValueError(f"unknown contraction kind {label!r}; "
                         f"expected one of {', '.join(k.label for k in cls)}")

    def __str__(self):
        return self.label


class _Vacuous(enum.Enum):
    VACUOUS = "vacuous"

    def __repr__(self):
        return self.value


VACUOUS = _Vacuous.VACUOUS


class Sides(NamedTuple):
    lhs: float
    rhs: float  # the part multiplied by k
    offset: float = 0.0  # added to k * rhs unscaled

    def ratio(self) -> float:
        """Least k for which ``lhs <= k * rhs + offset`` holds at this point."""
        residual = self.lhs - self.offset
        if self.rhs <= 0:
            return 0.0 if residual <= 0 else math.inf
        return residual / self.rhs


def lhs_rhs(kind: ContractionKind, system: System, x: Point, x0: Point) -> Sides:
    tx = system.image(x)
    dxt = system.d(x, tx)
    phi_tx, phi_x, phi_x0 = system.phi(tx), system.phi(x), system.phi(x0)
    ref = system.big_m(x, x0) if kind.generalized else system.d(x, x0)
    if kind.family == 1:
        return Sides(max(dxt, phi_tx, phi_x), max(ref, phi_x, phi_x0))
    if kind.family == 2:
        return Sides(max(dxt, phi_tx) + phi_x, max(ref, phi_x), phi_x0)
    return Sides(dxt + phi_tx + phi_x, ref + phi_x + phi_x0)


def _worst(kind: ContractionKind, system: System, x0: Point):
    key = ("worst", kind, x0)
    if key not in system.memo:
        worst, witness = -math.inf, None
        moved = system.moved()
        for x in moved:
            r = lhs_rhs(kind, system, x, x0).ratio()
            if r > worst:
                worst, witness = r, x
        system.memo[key] = (worst, witness, len(moved))
    return system.memo[key]


@dataclass
class ContractionVerdict:
    kind: ContractionKind
    x0: Point
    k: float
    holds: bool
    worst_ratio: float  # -inf when there are no moved points, inf when unbounded
    witness: Optional[Point]
    checked_points: int

    @property
    def vacuous(self) -> bool:
        return self.checked_points == 0


def check(kind: ContractionKind, system: System, x0: Point, k: float) -> ContractionVerdict:
    if not (0 < k < kind.bound):
        raise KOutOfRange(f"{kind.label} needs k in (0, {kind.bound:g}), got {k!r}")
    worst, witness, n = _worst(kind, system, x0)
    return ContractionVerdict(kind, x0, k, worst <= k, worst, witness, n)


def minimal_k(kind: ContractionKind, system: System, x0: Point):
    """Least k passing :func:`check` (ignoring the admissible range).

    Returns ``VACUOUS`` without moved points and ``math.inf`` when some moved
    point has a zero reference aggregate but a positive residual.
    """
    worst, _, n = _worst(kind, system, x0)
    if n == 0:
        return VACUOUS
    return max(worst, 0.0)
