"""Metric-space carriers, distances and circle/disc loci.

Points are plain Python numbers: ``float`` on real spaces and ``complex``
on the plane.  A carrier is an ordered union of segments (finite point
sets, sampled real intervals, sampled complex rectangles); every carrier
enumerates to a finite, sorted, duplicate-free list.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Sequence, Union

import numpy as np

Point = Union[float, complex]

DEFAULT_TOL = 1e-9
DEFAULT_ANGULAR_N = 360


class SpaceError(ValueError):
    pass


class TableMiss(SpaceError, LookupError):
    pass


class CenterNotInSpace(SpaceError):
    pass


class InvalidMetric(SpaceError):
    pass


def sort_key(p: Point):
    return (p.real, p.imag)


def _finite(p: Point) -> bool:
    return math.isfinite(p.real) and math.isfinite(p.imag)


def _grid(lo: float, hi: float, step: float, tol: float) -> list[float]:
    # Decimal stepping so that e.g. -3 + 20 * 0.1 lands on the float nearest -1.
    dlo, dstep = Decimal(repr(float(lo))), Decimal(repr(float(step)))
    n = int(math.floor((hi - lo) / step + 1e-9))
    values = [float(dlo + i * dstep) for i in range(n + 1)]
    if hi - values[-1] > tol:
        values.append(float(hi))
    return values


def dedup(points: Sequence[Point], tol: float) -> list[Point]:
    """Sort by (re, im) and drop points within ``tol`` of an earlier one."""
    kept: list[Point] = []
    for p in sorted(points, key=sort_key):
        j = len(kept) - 1
        duplicate = False
        while j >= 0 and p.real - kept[j].real <= tol:
            if abs(p - kept[j]) <= tol:
                duplicate = True
                break
            j -= 1
        if not duplicate:
            kept.append(p)
    return kept


# -- carrier segments ------------------------------------------------------

@dataclass(frozen=True)
class FiniteSet:
    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        for p in self.points:
            if not _finite(p):
                raise SpaceError(f"non-finite point {p!r}")

    @property
    def is_complex(self) -> bool:
        return any(isinstance(p, complex) for p in self.points)

    def samples(self, tol: float) -> list[Point]:
        return list(self.points)

    def contains(self, p: Point, tol: float) -> bool:
        return any(abs(p - q) <= tol for q in self.points)

    def with_step(self, step: float) -> "FiniteSet":
        return self


@dataclass(frozen=True)
class RealInterval:
    lo: float
    hi: float
    step: float
    open_lo: bool = False
    open_hi: bool = False

    def __post_init__(self):
        for name in ("lo", "hi", "step"):
            if not math.isfinite(getattr(self, name)):
                raise SpaceError(f"interval {name} must be finite, got {getattr(self, name)}")
        if self.lo > self.hi:
            raise SpaceError(f"interval lo {self.lo} exceeds hi {self.hi}")
        if self.step <= 0:
            raise SpaceError(f"interval step must be positive, got {self.step}")

    is_complex = False

    def samples(self, tol: float) -> list[float]:
        values = _grid(self.lo, self.hi, self.step, tol)
        return [v for v in values if self.contains(v, tol)]

    def contains(self, p: Point, tol: float) -> bool:
        if isinstance(p, complex):
            if abs(p.imag) > tol:
                return False
            p = p.real
        if self.open_lo:
            if p - self.lo <= tol:
                return False
        elif p < self.lo - tol:
            return False
        if self.open_hi:
            return self.hi - p > tol
        return p <= self.hi + tol

    def with_step(self, step: float) -> "RealInterval":
        return RealInterval(self.lo, self.hi, step, self.open_lo, self.open_hi)


@dataclass(frozen=True)
class ComplexGrid:
    re_lo: float
    re_hi: float
    im_lo: float
    im_hi: float
    step: float

    def __post_init__(self):
        for name in ("re_lo", "re_hi", "im_lo", "im_hi", "step"):
            if not math.isfinite(getattr(self, name)):
                raise SpaceError(f"grid {name} must be finite")
        if self.re_lo > self.re_hi or self.im_lo > self.im_hi:
            raise SpaceError("grid bounds are inverted")
        if self.step <= 0:
            raise SpaceError(f"grid step must be positive, got {self.step}")

    is_complex = True

    def samples(self, tol: float) -> list[complex]:
        res = _grid(self.re_lo, self.re_hi, self.step, tol)
        ims = _grid(self.im_lo, self.im_hi, self.step, tol)
        return [complex(a, b) for a in res for b in ims]

    def contains(self, p: Point, tol: float) -> bool:
        return (self.re_lo - tol <= p.real <= self.re_hi + tol
                and self.im_lo - tol <= p.imag <= self.im_hi + tol)

    def with_step(self, step: float) -> "ComplexGrid":
        return ComplexGrid(self.re_lo, self.re_hi, self.im_lo, self.im_hi, step)


Segment = Union[FiniteSet, RealInterval, ComplexGrid]


# -- metrics ---------------------------------------------------------------

class AbsoluteDifference:
    name = "absolute-difference"

    def __call__(self, p: Point, q: Point) -> float:
        if isinstance(p, complex) or isinstance(q, complex):
            raise InvalidMetric("absolute-difference metric is defined on real points only")
        return abs(p - q)

    def __eq__(self, other):
        return type(other) is type(self)

    def __hash__(self):
        return hash(self.name)


class EuclideanModulus:
    name = "euclidean-modulus"

    def __call__(self, p: Point, q: Point) -> float:
        return abs(p - q)

    def __eq__(self, other):
        return type(other) is type(self)

    def __hash__(self):
        return hash(self.name)


class ExplicitTable:
    """A distance matrix over labelled real points.

    The matrix is validated on construction: square, symmetric, zero
    diagonal, nonnegative off the diagonal and satisfying every triangle
    inequality (all triples are scanned).
    """

    name = "explicit-table"

    def __init__(self, points: Sequence[float], matrix, tol: float = DEFAULT_TOL):
        d = np.asarray(matrix, dtype=float)
        n = len(points)
        if d.shape != (n, n):
            raise InvalidMetric(f"table shape {d.shape} does not match {n} points")
        if not np.all(np.isfinite(d)):
            raise InvalidMetric("table contains non-finite entries")
        if np.any(np.abs(np.diag(d)) > 0):
            raise InvalidMetric("table diagonal must be zero")
        if np.any(d != d.T):
            raise InvalidMetric("table is not symmetric")
        if np.any(d < 0):
            raise InvalidMetric("table has negative entries")
        off = d + np.eye(n)
        if n and np.any(off <= 0):
            raise InvalidMetric("distinct points at distance zero")
        # d[i,k] <= d[i,j] + d[j,k] for every (i, j, k)
        via = d[:, :, None] + d[None, :, :]
        bad = np.argwhere(d[:, None, :] > via + tol)
        if len(bad):
            i, j, k = bad[0]
            raise InvalidMetric(
                f"triangle inequality fails: d({points[i]},{points[k]})={d[i, k]} > "
                f"d({points[i]},{points[j]}) + d({points[j]},{points[k]})")
        self.points = tuple(float(p) for p in points)
        self.matrix = tuple(tuple(float(v) for v in row) for row in d)
        self.tol = tol
        self._index = {p: i for i, p in enumerate(self.points)}

    def index(self, p: Point) -> int:
        i = self._index.get(p)
        if i is not None:
            return i
        for j, q in enumerate(self.points):
            if abs(p - q) <= self.tol:
                return j
        raise TableMiss(f"point {p!r} is not in the distance table")

    def __call__(self, p: Point, q: Point) -> float:
        return self.matrix[self.index(p)][self.index(q)]

    def __eq__(self, other):
        return (isinstance(other, ExplicitTable) and self.points == other.points
                and self.matrix == other.matrix)

    def __hash__(self):
        return hash((self.points, self.matrix))


def metric_closure(weights) -> np.ndarray:
    """Shortest-path closure of a symmetric positive weight matrix."""
    d = np.array(weights, dtype=float)
    n = len(d)
    np.fill_diagonal(d, 0.0)
    for k in range(n):
        d = np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :])
    return d


Metric = Union[AbsoluteDifference, EuclideanModulus, ExplicitTable]


# -- loci ------------------------------------------------------------------

@dataclass(frozen=True)
class Locus:
    kind: str  # "circle" or "disc"
    center: Point
    radius: float
    points: tuple = field(default_factory=tuple)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def _circle_offsets(center: complex, r: float, n: int) -> list[complex]:
    out = []
    for j in range(n):
        theta = 2 * math.pi * j / n
        px, py = center.real + r * math.cos(theta), center.imag + r * math.sin(theta)
        # Push rounding outward so the computed distance to the center is never below r.
        for _ in range(64):
            if math.hypot(px - center.real, py - center.imag) >= r:
                break
            if px != center.real:
                px = math.nextafter(px, math.inf if px > center.real else -math.inf)
            if py != center.imag:
                py = math.nextafter(py, math.inf if py > center.imag else -math.inf)
        out.append(complex(px, py))
    return out


# -- the space -------------------------------------------------------------

@dataclass(frozen=True)
class MetricSpace:
    segments: tuple
    metric: Metric
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise SpaceError("a space needs at least one carrier segment")
        kinds = {seg.is_complex for seg in self.segments if not (
            isinstance(seg, FiniteSet) and not seg.points)}
        if len(kinds) > 1:
            raise SpaceError("cannot mix real and complex carrier segments")
        if self.is_complex and isinstance(self.metric, (AbsoluteDifference, ExplicitTable)):
            raise SpaceError(f"{self.metric.name} metric cannot measure complex points")
        if isinstance(self.metric, ExplicitTable):
            if any(not isinstance(seg, FiniteSet) for seg in self.segments):
                raise SpaceError("an explicit distance table needs a finite carrier")
            for p in self.points:
                self.metric.index(p)  # raises TableMiss

    @classmethod
    def reals(cls, *segments: Segment, tol: float = DEFAULT_TOL) -> "MetricSpace":
        return cls(segments, AbsoluteDifference(), tol)

    @classmethod
    def plane(cls, *segments: Segment, tol: float = DEFAULT_TOL) -> "MetricSpace":
        return cls(segments, EuclideanModulus(), tol)

    @classmethod
    def finite(cls, points: Sequence[Point], tol: float = DEFAULT_TOL) -> "MetricSpace":
        seg = FiniteSet(tuple(points))
        metric = EuclideanModulus() if seg.is_complex else AbsoluteDifference()
        return cls((seg,), metric, tol)

    @classmethod
    def table(cls, points: Sequence[float], matrix, tol: float = DEFAULT_TOL) -> "MetricSpace":
        return cls((FiniteSet(tuple(float(p) for p in points)),),
                   ExplicitTable(points, matrix, tol), tol)

    @property
    def is_complex(self) -> bool:
        return any(seg.is_complex for seg in self.segments)

    @property
    def is_sampled(self) -> bool:
        return any(not isinstance(seg, FiniteSet) for seg in self.segments)

    @property
    def step(self) -> float | None:
        steps = [seg.step for seg in self.segments if not isinstance(seg, FiniteSet)]
        return min(steps) if steps else None

    def with_step(self, step: float) -> "MetricSpace":
        return MetricSpace(tuple(seg.with_step(step) for seg in self.segments),
                           self.metric, self.tol)

    def with_tol(self, tol: float) -> "MetricSpace":
        return MetricSpace(self.segments, self.metric, tol)

    @property
    def points(self) -> tuple:
        cached = self.__dict__.get("_points")
        if cached is None:
            raw: list[Point] = []
            for seg in self.segments:
                raw.extend(seg.samples(self.tol))
            if self.is_complex:
                raw = [complex(p) for p in raw]
            else:
                raw = [float(p) for p in raw]
            cached = tuple(dedup(raw, self.tol))
            object.__setattr__(self, "_points", cached)
        return cached

    def enumerate(self) -> list[Point]:
        return list(self.points)

    def __len__(self):
        return len(self.points)

    def contains(self, p: Point) -> bool:
        return any(seg.contains(p, self.tol) for seg in self.segments)

    def distance(self, p: Point, q: Point) -> float:
        return self.metric(p, q)

    def _snap(self, p: Point) -> Point:
        for seg in self.segments:
            if isinstance(seg, FiniteSet):
                for q in seg.points:
                    if abs(p - q) <= self.tol:
                        return q
        return p

    def _check_center(self, x0: Point, r: float) -> Point:
        if r < 0 or not math.isfinite(r):
            raise SpaceError(f"radius must be a nonnegative real, got {r}")
        if not self.contains(x0):
            raise CenterNotInSpace(f"center {x0!r} is not in the carrier")
        return self._snap(x0)

    def _finite_points(self) -> list[Point]:
        return [q for seg in self.segments if isinstance(seg, FiniteSet) for q in seg.points]

    def _boundary(self, x0: Point, r: float, angular_n: int) -> list[Point]:
        """Analytic circle points lying in the continuous part of the carrier."""
        if isinstance(self.metric, ExplicitTable):
            return []
        continuous = [seg for seg in self.segments if not isinstance(seg, FiniteSet)]
        if self.is_complex:
            cands = _circle_offsets(complex(x0), r, angular_n)
        else:
            cands = [x0 - r, x0 + r]
        return [p for p in cands if any(seg.contains(p, self.tol) for seg in continuous)]

    def circle(self, x0: Point, r: float, angular_n: int = DEFAULT_ANGULAR_N) -> Locus:
        x0 = self._check_center(x0, r)
        if r <= self.tol:
            return Locus("circle", x0, r, (x0,))
        pts = [q for q in self._finite_points() if abs(self.distance(q, x0) - r) <= self.tol]
        pts += self._boundary(x0, r, angular_n)
        return Locus("circle", x0, r, tuple(dedup(pts, self.tol)))

    def disc(self, x0: Point, r: float, angular_n: int = DEFAULT_ANGULAR_N) -> Locus:
        x0 = self._check_center(x0, r)
        if r <= self.tol:
            return Locus("disc", x0, r, (x0,))
        pts = [q for q in self.points if self.distance(q, x0) <= r + self.tol]
        pts += self._boundary(x0, r, angular_n)
        return Locus("disc", x0, r, tuple(dedup(pts, self.tol)))


def as_point(value, complex_space: bool) -> Point:
    if complex_space:
        return complex(value)
    if isinstance(value, complex):
        if value.imag != 0:
            raise SpaceError(f"complex value {value} given for a real space")
        return value.real
    return float(value)


__all__ = [
    "AbsoluteDifference", "CenterNotInSpace", "ComplexGrid", "DEFAULT_ANGULAR_N",
    "DEFAULT_TOL", "EuclideanModulus", "ExplicitTable", "FiniteSet", "InvalidMetric",
    "Locus", "MetricSpace", "Point", "RealInterval", "SpaceError", "TableMiss",
    "as_point", "dedup", "metric_closure", "sort_key",
]
