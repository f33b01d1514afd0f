"""Certification of the twelve circle/disc theorems, plus a random scanner.

A theorem pairs a contraction kind with a locus shape.  Plain kinds use the
radius rho; generalized kinds use mu and add the image bound
``d(Tx, x0) <= mu`` on the locus.  Every theorem also asks that ``x0`` is a
zero of phi and that ``phi(x) <= d(Tx, x)`` on the locus.  Hypotheses and the
conclusion (the locus lies in Fix(T) and in the zeros of phi) are evaluated
independently, so a certification can expose a theorem that fails.
"""
from __future__ import annotations

import enum
import hashlib
import math
import random
from dataclasses import dataclass, field
from typing import Optional

from .analysis import NO_MOVED_POINTS, LocusVerdict, System, TableMap, locus_verdict
from .contraction import (VACUOUS, ContractionKind, ContractionVerdict, check,
                          minimal_k)
from .space import DEFAULT_ANGULAR_N, MetricSpace, Point, SpaceError, metric_closure


class TheoremId(enum.Enum):
    TYPE1_CIRCLE = (ContractionKind.TYPE1, "circle")
    TYPE1_DISC = (ContractionKind.TYPE1, "disc")
    GEN_TYPE1_CIRCLE = (ContractionKind.GEN_TYPE1, "circle")
    GEN_TYPE1_DISC = (ContractionKind.GEN_TYPE1, "disc")
    TYPE2_CIRCLE = (ContractionKind.TYPE2, "circle")
    TYPE2_DISC = (ContractionKind.TYPE2, "disc")
    GEN_TYPE2_CIRCLE = (ContractionKind.GEN_TYPE2, "circle")
    GEN_TYPE2_DISC = (ContractionKind.GEN_TYPE2, "disc")
    TYPE3_CIRCLE = (ContractionKind.TYPE3, "circle")
    TYPE3_DISC = (ContractionKind.TYPE3, "disc")
    GEN_TYPE3_CIRCLE = (ContractionKind.GEN_TYPE3, "circle")
    GEN_TYPE3_DISC = (ContractionKind.GEN_TYPE3, "disc")

    def __init__(self, kind, shape):
        self.kind = kind
        self.shape = shape

    @property
    def radius_source(self) -> str:
        return "mu" if self.kind.generalized else "rho"

    @property
    def image_bound(self) -> bool:
        return self.kind.generalized

    @property
    def label(self) -> str:
        return f"{self.kind.label}-{self.shape}"

    @classmethod
    def from_label(cls, label: str) -> "TheoremId":
        for t in cls:
            if t.label == label.lower():
                return t
        raise ValueError(f"unknown theorem {label!r}; expected one of "
                         + ", ".join(t.label for t in cls))

    def __str__(self):
        return self.label


@dataclass
class Check:
    passed: bool
    witnesses: list = field(default_factory=list)


@dataclass
class Certification:
    theorem: TheoremId
    x0: Point
    k: float
    radius_used: float
    radius_source: str  # rho | mu | degenerate | override
    h_contraction: ContractionVerdict
    h_center_zero: bool
    h_phi_bound: Check
    h_image_bound: Optional[Check]  # None where the theorem has no image bound
    conclusion: LocusVerdict
    sampled: bool

    @property
    def hypotheses_pass(self) -> bool:
        return (self.h_contraction.holds and self.h_center_zero and self.h_phi_bound.passed
                and (self.h_image_bound is None or self.h_image_bound.passed))

    @property
    def consistent(self) -> bool:
        return self.conclusion.holds or not self.hypotheses_pass

    @property
    def converse_failure(self) -> bool:
        return self.conclusion.holds and not self.hypotheses_pass

    def failed_hypotheses(self) -> list[str]:
        out = []
        if not self.h_contraction.holds:
            out.append("contraction")
        if not self.h_center_zero:
            out.append("center_zero")
        if not self.h_phi_bound.passed:
            out.append("phi_bound")
        if self.h_image_bound is not None and not self.h_image_bound.passed:
            out.append("image_bound")
        return out


def theorem_radius(theorem: TheoremId, system: System):
    value = system.mu() if theorem.kind.generalized else system.rho()
    if value is NO_MOVED_POINTS:
        return 0.0, "degenerate"
    return value, theorem.radius_source


def certify(theorem: TheoremId, system: System, x0: Point, k: float,
            radius: Optional[float] = None,
            angular_n: int = DEFAULT_ANGULAR_N) -> Certification:
    """Evaluate one theorem's hypotheses and, separately, its conclusion.

    ``radius`` replaces the sampled rho/mu, e.g. with an infimum known in
    closed form on a continuum; it may not exceed the sampled value, since
    an infimum is never above any of its terms.
    """
    space = system.space
    tol = system.tol
    sampled_r, source = theorem_radius(theorem, system)
    if radius is not None:
        if radius < 0 or radius > sampled_r + tol:
            raise SpaceError(f"radius override {radius} exceeds the sampled "
                             f"{theorem.radius_source} = {sampled_r}")
        r, source = radius, "override"
    else:
        r = sampled_r
    locus = space.circle(x0, r, angular_n) if theorem.shape == "circle" \
        else space.disc(x0, r, angular_n)
    x0 = locus.center
    verdict = check(theorem.kind, system, x0, k)

    center_zero = abs(system.phi(x0)) <= tol

    bound_bad = [x for x in locus.points if system.phi(x) > system.displacement(x) + tol]
    phi_bound = Check(not bound_bad, bound_bad)

    image = None
    if theorem.image_bound:
        far = [x for x in locus.points if system.d(system.image(x), x0) > r + tol]
        image = Check(not far, far)

    return Certification(
        theorem=theorem, x0=x0, k=k, radius_used=r, radius_source=source,
        h_contraction=verdict, h_center_zero=center_zero, h_phi_bound=phi_bound,
        h_image_bound=image, conclusion=locus_verdict(system, locus),
        sampled=space.is_sampled,
    )


def certify_all(system: System, x0: Point, k_map: dict,
                angular_n: int = DEFAULT_ANGULAR_N) -> dict:
    """Certify every theorem whose kind has a constant in ``k_map``.

    Values are Certifications, or the exception raised for that theorem.
    """
    out = {}
    for theorem in TheoremId:
        if theorem.kind not in k_map:
            continue
        try:
            out[theorem] = certify(theorem, system, x0, k_map[theorem.kind],
                                   angular_n=angular_n)
        except (SpaceError, ValueError, ArithmeticError) as exc:
            out[theorem] = exc
    return out


# -- random scanning -------------------------------------------------------

@dataclass(frozen=True)
class ScanConfig:
    trials: int = 1000
    max_points: int = 8
    anchors: int = 2  # x0 values sampled per trial
    scale: float = 1.0  # spacing unit of generated distances

    def __post_init__(self):
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")
        if not 2 <= self.max_points <= 8:
            raise ValueError("max_points must be between 2 and 8")
        if self.anchors < 1:
            raise ValueError("anchors must be positive")
        if not self.scale > 0:
            raise ValueError("scale must be positive")


@dataclass
class Finding:
    trial: int
    digest: str
    theorem: TheoremId
    x0: Point
    k: float
    radius: float
    failed_hypotheses: list
    violations: list

    def as_dict(self) -> dict:
        return {
            "trial": self.trial, "scenario": self.digest, "theorem": self.theorem.label,
            "x0": self.x0, "k": self.k, "radius": self.radius,
            "failed_hypotheses": list(self.failed_hypotheses),
            "violations": [[p, why] for p, why in self.violations],
        }


@dataclass
class ScanReport:
    seed: int
    config: ScanConfig
    trials: int = 0
    certifications: int = 0
    soundness_violations: list = field(default_factory=list)
    converse_failures: list = field(default_factory=list)

    @property
    def sound(self) -> bool:
        return not self.soundness_violations


@dataclass
class Trial:
    index: int
    system: System
    description: dict

    @property
    def digest(self) -> str:
        return scenario_digest(self.description)


def scenario_digest(description: dict) -> str:
    text = repr(sorted(description.items()))
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def random_trial(index: int, seed: int, config: ScanConfig) -> Trial:
    rng = random.Random(seed + index)
    n = rng.randint(2, config.max_points)
    if rng.random() < 0.5:
        labels = sorted(rng.sample(range(-10, 11), n))
        points = [float(v * config.scale) for v in labels]
        space = MetricSpace.finite(points)
        metric = "line"
        table = None
    else:
        points = [float(i) for i in range(n)]
        w = [[0.0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                w[i][j] = w[j][i] = rng.randint(1, 9) * config.scale
        d = metric_closure(w)
        space = MetricSpace.table(points, d)
        metric = "table"
        table = tuple(tuple(float(v) for v in row) for row in d)
    p_fix = rng.uniform(0.3, 0.9)
    t_map = {p: (p if rng.random() < p_fix else rng.choice(points)) for p in points}
    phi_map = {p: (0.0 if rng.random() < 0.5 else float(rng.randint(1, 5))) for p in points}
    system = System(space, TableMap(t_map), TableMap(phi_map))
    description = {"metric": metric, "points": tuple(points), "table": table,
                   "T": tuple(t_map[p] for p in points),
                   "phi": tuple(phi_map[p] for p in points)}
    return Trial(index, system, description)


def k_samples(kind: ContractionKind, system: System, x0: Point) -> list[float]:
    ks = [kind.bound / 4, kind.bound / 2]
    mk = minimal_k(kind, system, x0)
    if mk is not VACUOUS and math.isfinite(mk):
        just = mk + 1e-6
        if 0 < just < kind.bound:
            ks.append(just)
    return ks


def scan_trial(trial: Trial, report: ScanReport, anchors: int) -> None:
    system = trial.system
    rng = random.Random(f"anchors:{report.seed}:{trial.index}")
    points = list(system.points)
    zeros = [p for p in points if system.is_zero(p)]
    # Theorems need x0 among the zeros of phi; bias anchors there.
    pool = zeros if zeros and rng.random() < 0.8 else points
    chosen = sorted(rng.sample(pool, min(anchors, len(pool))))
    for x0 in chosen:
        for theorem in TheoremId:
            for k in k_samples(theorem.kind, system, x0):
                cert = certify(theorem, system, x0, k)
                report.certifications += 1
                if not cert.consistent:
                    report.soundness_violations.append(_finding(trial, cert))
                elif cert.converse_failure:
                    report.converse_failures.append(_finding(trial, cert))


def _finding(trial: Trial, cert: Certification) -> Finding:
    return Finding(trial.index, trial.digest, cert.theorem, cert.x0, cert.k,
                   cert.radius_used, cert.failed_hypotheses(), cert.conclusion.violations)


def scan_random(config: ScanConfig = ScanConfig(), seed: int = 0) -> ScanReport:
    """Certify all twelve theorems on random finite scenarios.

    Trial ``i`` draws from ``random.Random(seed + i)``, so the report depends
    on nothing but ``seed`` and ``config``.
    """
    report = ScanReport(seed=seed, config=config)
    for i in range(config.trials):
        scan_trial(random_trial(i, seed, config), report, config.anchors)
        report.trials += 1
    return report
