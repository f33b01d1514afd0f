"""Fixed points, zeros, displacement infima and the auxiliary number M.

Everything here works off a :class:`System`, which bundles a space, a
self-map ``T``, a nonnegative function ``phi`` and the run tolerance, and
memoises point evaluations.  The module-level functions mirror the usual
notation and build a throwaway system when handed raw ingredients.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .space import DEFAULT_ANGULAR_N, DEFAULT_TOL, Locus, MetricSpace, Point, as_point


class NegativePhi(ValueError):
    pass


class EvaluationFailed(ArithmeticError):
    """A map could not be evaluated at a point; ``point`` names it."""

    def __init__(self, what: str, point, cause: Exception):
        self.point = point
        self.cause = cause
        super().__init__(f"{what} failed at {point!r}: {cause}")


class _Sentinel(enum.Enum):
    NO_MOVED_POINTS = "no moved points"

    def __repr__(self):
        return self.value


NO_MOVED_POINTS = _Sentinel.NO_MOVED_POINTS


class TableMap:
    """A self-map (or function) given pointwise as a lookup table."""

    def __init__(self, mapping: dict, tol: float = DEFAULT_TOL):
        self.mapping = dict(mapping)
        self.tol = tol

    def __call__(self, p):
        try:
            return self.mapping[p]
        except KeyError:
            for k, v in self.mapping.items():
                if abs(k - p) <= self.tol:
                    return v
        raise KeyError(f"{p!r} has no table entry")

    def __eq__(self, other):
        return isinstance(other, TableMap) and self.mapping == other.mapping

    def __hash__(self):
        return hash(tuple(sorted(self.mapping.items(), key=lambda kv: (kv[0].real, kv[0].imag))))

    def __repr__(self):
        return f"TableMap({self.mapping!r})"


def zero_function(p) -> float:
    return 0.0


class System:
    """A space together with ``T`` and ``phi``; evaluations are memoised."""

    def __init__(self, space: MetricSpace, T: Callable, phi: Optional[Callable] = None,
                 tol: Optional[float] = None):
        self.space = space
        self.T = T
        self.phi_fn = phi if phi is not None else zero_function
        self.tol = space.tol if tol is None else tol
        self._image: dict = {}
        self._phi: dict = {}
        self.memo: dict = {}

    def d(self, p: Point, q: Point) -> float:
        return self.space.distance(p, q)

    def image(self, p: Point) -> Point:
        try:
            return self._image[p]
        except KeyError:
            pass
        try:
            v = as_point(self.T(p), self.space.is_complex)
        except Exception as exc:
            raise EvaluationFailed("T", p, exc) from exc
        self._image[p] = v
        return v

    def phi(self, p: Point) -> float:
        try:
            return self._phi[p]
        except KeyError:
            pass
        try:
            v = self.phi_fn(p)
        except Exception as exc:
            raise EvaluationFailed("phi", p, exc) from exc
        if isinstance(v, complex):
            if abs(v.imag) > self.tol:
                raise EvaluationFailed("phi", p, ValueError(f"complex value {v}"))
            v = v.real
        v = float(v)
        if v < -self.tol:
            raise NegativePhi(f"phi({p!r}) = {v} is negative")
        self._phi[p] = v
        return v

    def displacement(self, p: Point) -> float:
        """d(Tx, x)."""
        return self.d(self.image(p), p)

    def is_fixed(self, p: Point) -> bool:
        return self.displacement(p) <= self.tol

    def is_zero(self, p: Point) -> bool:
        return abs(self.phi(p)) <= self.tol

    @property
    def points(self):
        return self.space.points

    def moved(self) -> list[Point]:
        if "moved" not in self.memo:
            self.memo["moved"] = [p for p in self.points if not self.is_fixed(p)]
        return self.memo["moved"]

    def fix_set(self) -> list[Point]:
        return [p for p in self.points if self.is_fixed(p)]

    def zero_set(self) -> list[Point]:
        return [p for p in self.points if self.is_zero(p)]

    def rho(self):
        moved = self.moved()
        if not moved:
            return NO_MOVED_POINTS
        return min(self.displacement(p) for p in moved)

    def mu(self):
        moved = self.moved()
        if not moved:
            return NO_MOVED_POINTS
        return min(math.sqrt(self.displacement(p)) for p in moved)

    def big_m(self, x: Point, y: Point) -> float:
        d = self.d
        tx, ty = self.image(x), self.image(y)
        dxy, dx, dy = d(x, y), d(x, tx), d(y, ty)
        cross = (d(x, ty) + d(y, tx)) / (1 + dx + dy) * dxy
        return max(dxy, dx, dy, cross)

    def analysis(self) -> "MapAnalysis":
        fixed = self.fix_set()
        return MapAnalysis(
            fixed_points=fixed,
            zero_points=self.zero_set(),
            moved_points=list(self.moved()),
            rho=self.rho(),
            mu=self.mu(),
            sampled=self.space.is_sampled,
            step=self.space.step,
            tol=self.tol,
        )


@dataclass
class MapAnalysis:
    fixed_points: list
    zero_points: list
    moved_points: list
    rho: object
    mu: object
    sampled: bool = False
    step: Optional[float] = None
    tol: float = DEFAULT_TOL

    @property
    def estimate(self) -> bool:
        """Infima over a sampled continuum are upper estimates, not exact values."""
        return self.sampled


def _system(space, T, phi=None, tol=None) -> System:
    return System(space, T, phi, tol)


def fix_set(T, space: MetricSpace, tol: Optional[float] = None) -> list[Point]:
    return _system(space, T, None, tol).fix_set()


def zero_set(phi, space: MetricSpace, tol: Optional[float] = None) -> list[Point]:
    s = _system(space, lambda p: p, phi, tol)
    return s.zero_set()


def rho(T, space: MetricSpace, tol: Optional[float] = None):
    return _system(space, T, None, tol).rho()


def mu(T, space: MetricSpace, tol: Optional[float] = None):
    return _system(space, T, None, tol).mu()


def big_m(T, space: MetricSpace, x: Point, y: Point) -> float:
    return _system(space, T).big_m(x, y)


@dataclass
class LocusVerdict:
    holds: bool
    locus: Locus
    violations: list = field(default_factory=list)  # (point, reason)


def locus_verdict(system: System, locus: Locus) -> LocusVerdict:
    """Check ``locus`` against Fix(T) and the zeros of phi, reporting every failure."""
    violations = []
    for x in locus.points:
        disp = system.displacement(x)
        if disp > system.tol:
            violations.append((x, f"moved: d(Tx,x) = {disp!r}"))
        ph = system.phi(x)
        if abs(ph) > system.tol:
            violations.append((x, f"phi(x) = {ph!r} != 0"))
    return LocusVerdict(not violations, locus, violations)


def phi_fixed_circle(system: System, x0: Point, r: float,
                     angular_n: int = DEFAULT_ANGULAR_N) -> LocusVerdict:
    return locus_verdict(system, system.space.circle(x0, r, angular_n))


def phi_fixed_disc(system: System, x0: Point, r: float,
                   angular_n: int = DEFAULT_ANGULAR_N) -> LocusVerdict:
    return locus_verdict(system, system.space.disc(x0, r, angular_n))


def is_phi_fixed_circle(space, T, phi, x0, r, tol=None, angular_n=DEFAULT_ANGULAR_N):
    return phi_fixed_circle(_system(space, T, phi, tol), x0, r, angular_n)


def is_phi_fixed_disc(space, T, phi, x0, r, tol=None, angular_n=DEFAULT_ANGULAR_N):
    return phi_fixed_disc(_system(space, T, phi, tol), x0, r, angular_n)
