"""Running scenarios and rendering their reports.

A report is first turned into plain JSON-ready data; the JSON writer and the
text writer both walk that same structure, so they always carry the same
numbers.  Floats are written with 17 significant digits.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from .analysis import NO_MOVED_POINTS, System, locus_verdict
from .certify import Certification, TheoremId, certify, certify_all
from .contraction import VACUOUS, check, minimal_k
from .scenario import Query, Scenario, SetExpr, corpus_paths, load_scenario
from .space import DEFAULT_ANGULAR_N, SpaceError, dedup, sort_key

TOOL = "phifix"


@dataclass
class QueryResult:
    query: Query
    value: object = None
    sampled: bool = False
    witnesses: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)
    error: Optional[str] = None

    def field_value(self, name: Optional[str]):
        if name is None or name == "value":
            return self.value
        node = self.detail
        for part in name.split("."):
            if not isinstance(node, dict) or part not in node:
                raise KeyError(f"{self.query.text} has no field {name!r}")
            node = node[part]
        return node


@dataclass
class ExpectationResult:
    quantity: str
    expected: object
    actual: object
    tol: float
    passed: bool
    line: int
    note: str = ""


@dataclass
class Report:
    scenario: str
    params: dict
    results: list
    expectations: list
    warnings: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.expectations)

    @property
    def failures(self) -> list:
        return [e for e in self.expectations if not e.passed]


# -- query execution -------------------------------------------------------

def _points(pts) -> list:
    return dedup(list(pts), 0.0)


def _sentinel(v):
    if v is NO_MOVED_POINTS or v is VACUOUS:
        return v.value
    return v


def _cert_detail(cert: Certification) -> dict:
    return {
        "theorem": cert.theorem.label,
        "x0": cert.x0,
        "k": cert.k,
        "radius": cert.radius_used,
        "radius_source": cert.radius_source,
        "consistent": cert.consistent,
        "hypotheses": cert.hypotheses_pass,
        "conclusion": cert.conclusion.holds,
        "converse_failure": cert.converse_failure,
        "contraction": cert.h_contraction.holds,
        "worst_ratio": cert.h_contraction.worst_ratio,
        "center_zero": cert.h_center_zero,
        "phi_bound": cert.h_phi_bound.passed,
        "image_bound": None if cert.h_image_bound is None else cert.h_image_bound.passed,
        "failed_hypotheses": cert.failed_hypotheses(),
        "locus": _points(cert.conclusion.locus.points),
        "violations": [[p, why] for p, why in cert.conclusion.violations],
    }


def _cert_witnesses(cert: Certification) -> list:
    pts = [p for p, _ in cert.conclusion.violations] + list(cert.h_phi_bound.witnesses)
    if cert.h_image_bound is not None:
        pts += cert.h_image_bound.witnesses
    if not cert.h_contraction.holds and cert.h_contraction.witness is not None:
        pts.append(cert.h_contraction.witness)
    return _points(pts)


def evaluate_query(query: Query, system: System, angular_n: int) -> QueryResult:
    space = system.space
    res = QueryResult(query, sampled=space.is_sampled)
    kind = query.kind
    try:
        if kind in ("rho", "mu"):
            v = system.rho() if kind == "rho" else system.mu()
            res.value = _sentinel(v)
            res.detail = {"estimate": space.is_sampled, "step": space.step}
        elif kind in ("fixset", "zeroset"):
            pts = system.fix_set() if kind == "fixset" else system.zero_set()
            res.value = _points(pts)
            res.detail = {"count": len(pts)}
        elif kind == "M":
            x, y = query.get("x"), query.get("y")
            for p in (x, y):
                if not space.contains(p):
                    raise SpaceError(f"{p!r} is not in the carrier")
            res.value = system.big_m(space._snap(x), space._snap(y))
            res.sampled = False
        elif kind in ("circle", "disc"):
            x0, r = query.get("x0"), query.get("r")
            locus = space.circle(x0, r, angular_n) if kind == "circle" \
                else space.disc(x0, r, angular_n)
            verdict = locus_verdict(system, locus)
            res.value = _points(locus.points)
            res.witnesses = _points(p for p, _ in verdict.violations)
            res.detail = {"holds": verdict.holds, "count": len(locus.points),
                          "violations": [[p, why] for p, why in verdict.violations]}
        elif kind == "contraction":
            x0 = space._check_center(query.get("x0"), 0.0)
            v = check(query.get("kind"), system, x0, query.get("k"))
            res.value = v.holds
            res.witnesses = [] if v.holds or v.witness is None else [v.witness]
            res.detail = {"holds": v.holds, "worst_ratio": v.worst_ratio,
                          "witness": v.witness, "checked_points": v.checked_points,
                          "vacuous": v.vacuous}
        elif kind == "minimal_k":
            x0 = space._check_center(query.get("x0"), 0.0)
            res.value = _sentinel(minimal_k(query.get("kind"), system, x0))
        elif kind == "certify":
            cert = certify(query.get("theorem"), system, query.get("x0"), query.get("k"),
                           radius=query.get("r"), angular_n=angular_n)
            res.value = cert.consistent
            res.witnesses = _cert_witnesses(cert)
            res.detail = _cert_detail(cert)
        elif kind == "certify_all":
            k_map = dict(query.get("k_map"))
            out = certify_all(system, query.get("x0"), k_map, angular_n)
            detail, ok, wit = {}, True, []
            for theorem in TheoremId:
                if theorem not in out:
                    continue
                cert = out[theorem]
                if isinstance(cert, Exception):
                    detail[theorem.label] = {"error": f"{type(cert).__name__}: {cert}"}
                    ok = False
                    continue
                detail[theorem.label] = _cert_detail(cert)
                ok = ok and cert.consistent
                wit += _cert_witnesses(cert)
            res.value = ok
            res.witnesses = _points(wit)
            res.detail = detail
        else:  # pragma: no cover - the loader rejects unknown kinds
            raise ValueError(f"unknown query {kind!r}")
    except (SpaceError, ValueError, ArithmeticError, LookupError) as exc:
        res.error = f"{type(exc).__name__}: {exc}"
        res.value = None
    return res


# -- expectations ----------------------------------------------------------

def _close(a, b, tol) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return a is b
    if isinstance(a, str) or isinstance(b, str):
        return a == b
    if not isinstance(a, (int, float, complex)) or not isinstance(b, (int, float, complex)):
        return False
    if isinstance(a, float) and isinstance(b, float) and math.isinf(a) and math.isinf(b):
        return a == b
    return abs(a - b) <= tol


def compare(actual, expected, tol: float) -> bool:
    if isinstance(expected, list):
        if not isinstance(actual, list) or len(actual) != len(expected):
            return False
        a = sorted(actual, key=sort_key)
        e = sorted(expected, key=sort_key)
        return all(_close(x, y, tol) for x, y in zip(a, e))
    return _close(actual, expected, tol)


def _resolve_expected(expected, space):
    if isinstance(expected, SetExpr):
        return expected.resolve(space)
    return expected


# -- running ---------------------------------------------------------------

def run(scenario: Scenario, tol: Optional[float] = None, step: Optional[float] = None,
        angular_n: int = DEFAULT_ANGULAR_N, seed=None) -> Report:
    space = scenario.space
    if step is not None:
        space = space.with_step(step)
    if tol is not None:
        space = space.with_tol(tol)
    system = System(space, scenario.map_T, scenario.phi, space.tol)

    cache: dict = {}

    def result_for(q: Query) -> QueryResult:
        if q.text not in cache:
            cache[q.text] = evaluate_query(q, system, angular_n)
        return cache[q.text]

    for q in scenario.queries:
        result_for(q)
    checked = []
    for exp in scenario.expectations:
        res = result_for(exp.query)
        etol = space.tol if exp.tol is None else exp.tol
        expected = _resolve_expected(exp.expected, space)
        note = ""
        if res.error is not None:
            actual, ok, note = None, False, res.error
        else:
            try:
                actual = res.field_value(exp.field)
                ok = compare(actual, expected, etol)
            except KeyError as e:
                actual, ok, note = None, False, str(e.args[0])
        checked.append(ExpectationResult(exp.quantity, expected, actual, etol, ok,
                                         exp.line, note))
    params = {"tol": space.tol, "step": space.step, "angular_n": angular_n, "seed": seed}
    return Report(scenario.name, params, list(cache.values()), checked,
                  [str(w) for w in scenario.warnings])


def run_corpus(tol: Optional[float] = None, angular_n: int = DEFAULT_ANGULAR_N) -> list:
    return [run(load_scenario(p), tol=tol, angular_n=angular_n) for p in corpus_paths()]


# -- serialization ---------------------------------------------------------

def jsonable(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (int, float)):
        return v
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if hasattr(v, "label"):
        return v.label
    if hasattr(v, "value"):
        return v.value
    return str(v)


def report_data(report: Report) -> dict:
    results = []
    for r in report.results:
        entry = {"query": r.query.text, "value": jsonable(r.value), "sampled": r.sampled,
                 "witnesses": jsonable(r.witnesses)}
        if r.detail:
            entry["detail"] = jsonable(r.detail)
        if r.error is not None:
            entry["error"] = r.error
        results.append(entry)
    expectations = []
    for e in report.expectations:
        item = {"quantity": e.quantity, "expected": jsonable(e.expected),
                "actual": jsonable(e.actual), "tol": e.tol, "pass": e.passed, "line": e.line}
        if e.note:
            item["note"] = e.note
        expectations.append(item)
    passed = sum(e.passed for e in report.expectations)
    return {
        "scenario": report.scenario,
        "tool": {"name": TOOL, "version": __version__},
        "params": jsonable(report.params),
        "warnings": list(report.warnings),
        "results": results,
        "expectations": expectations,
        "summary": {"passed": passed, "total": len(report.expectations),
                    "ok": passed == len(report.expectations)},
    }


def corpus_data(reports: list, tol: Optional[float] = None) -> dict:
    ok = sum(r.passed for r in reports)
    return {
        "tool": {"name": TOOL, "version": __version__},
        "params": {"tol": tol},
        "scenarios": [report_data(r) for r in reports],
        "summary": {"passed": ok, "total": len(reports), "ok": ok == len(reports)},
    }


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with fixed key order and 17-digit floats; infinities become strings."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        s = fmt_float(obj)
        return s if math.isfinite(obj) else json.dumps(s)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _text_scalar(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return v
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_text_scalar(x) for x in v) + "]"
    return str(v)


def _text_tree(obj, indent: int, out: list) -> None:
    pad = "  " * indent
    for key, v in obj.items():
        if isinstance(v, dict):
            out.append(f"{pad}{key}:")
            _text_tree(v, indent + 1, out)
        elif isinstance(v, list) and any(isinstance(x, dict) for x in v):
            out.append(f"{pad}{key}:")
            for x in v:
                _text_tree(x, indent + 1, out)
        else:
            out.append(f"{pad}{key}: {_text_scalar(v)}")


def report_text(data: dict) -> str:
    lines = [f"scenario {data['scenario']}  ({data['tool']['name']} {data['tool']['version']})"]
    lines.append("params: " + ", ".join(f"{k}={_text_scalar(v)}"
                                        for k, v in data["params"].items()))
    for w in data["warnings"]:
        lines.append(f"warning: {w}")
    lines.append("results:")
    for r in data["results"]:
        tag = " (sampled)" if r["sampled"] else ""
        if "error" in r:
            lines.append(f"  {r['query']}: error: {r['error']}")
            continue
        lines.append(f"  {r['query']} = {_text_scalar(r['value'])}{tag}")
        if r["witnesses"]:
            lines.append(f"    witnesses: {_text_scalar(r['witnesses'])}")
        if "detail" in r:
            _text_tree(r["detail"], 2, lines)
    lines.append("expectations:")
    for e in data["expectations"]:
        mark = "PASS" if e["pass"] else "FAIL"
        lines.append(f"  {mark} {e['quantity']} (line {e['line']}): expected "
                     f"{_text_scalar(e['expected'])}, actual {_text_scalar(e['actual'])}, "
                     f"tol {_text_scalar(e['tol'])}" + (f" [{e['note']}]" if "note" in e else ""))
    s = data["summary"]
    lines.append(f"summary: {s['passed']}/{s['total']} expectations passed")
    return "\n".join(lines) + "\n"


def corpus_text(data: dict) -> str:
    chunks = [report_text(d) for d in data["scenarios"]]
    s = data["summary"]
    tol = data["params"]["tol"]
    chunks.append(f"corpus: {s['passed']}/{s['total']} scenarios passed"
                  + (f" (tol {_text_scalar(tol)})" if tol is not None else "") + "\n")
    return "\n".join(chunks)
