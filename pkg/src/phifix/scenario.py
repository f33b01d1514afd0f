"""Scenario files: one space, one map, one phi, queries and expectations.

    # comments run to end of line
    name    halving tail
    space   reals from -3 to 2 step 0.25 union reals from 2 to 10 step 0.25 open left
    map     piecewise { x > 2 : x / 2 ; otherwise : x }
    phi     piecewise { x > 0 : x / 4 ; otherwise : 0 }
    query   rho
    expect  circle x0=-1 r=1 = {-2, 0}
    expect  contraction type1 x0=-1 k=1/2 : holds = true

``space`` segments are ``finite { v, ... }``, ``reals from A to B step S``
(optionally ``open left``/``open right``/``open both``) and
``complex re A to B im C to D step S``, joined with ``union``.  ``map`` and
``phi`` take a piecewise definition (which may span lines) or
``table { v -> w ; ... }``.  Numbers anywhere may be constant expressions
such as ``126/5`` or ``-5+i``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import pwdsl
from .analysis import EvaluationFailed, NegativePhi, System, TableMap
from .contraction import ContractionKind
from .certify import TheoremId
from .space import (ComplexGrid, FiniteSet, MetricSpace, RealInterval,
                    SpaceError, as_point, dedup)
from .pwdsl import ParseError


class ValidationError(ValueError):
    def __init__(self, entity: str, message: str):
        self.entity = entity
        super().__init__(f"{entity}: {message}")


class ClosureWarning(UserWarning):
    pass


QUERY_KINDS = ("rho", "mu", "fixset", "zeroset", "M", "circle", "disc", "contraction",
               "minimal_k", "certify", "certify_all")


@dataclass(frozen=True)
class Query:
    kind: str
    params: tuple = ()  # ordered (key, value) pairs, values already evaluated
    text: str = ""

    def get(self, key, default=None):
        for k, v in self.params:
            if k == key:
                return v
        return default

    def __str__(self):
        return self.text


@dataclass(frozen=True)
class Expectation:
    query: Query
    field: Optional[str]
    expected: object
    expected_text: str
    tol: Optional[float]
    line: int

    @property
    def quantity(self) -> str:
        return f"{self.query.text} : {self.field}" if self.field else self.query.text


@dataclass
class Scenario:
    name: str
    space: MetricSpace
    map_T: object
    phi: object
    queries: list = field(default_factory=list)
    expectations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    source: str = ""
    path: Optional[str] = None

    def system(self, tol: Optional[float] = None) -> System:
        space = self.space if tol is None else self.space.with_tol(tol)
        return System(space, self.map_T, self.phi, space.tol)


# -- expected values -------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    open_lo: bool
    open_hi: bool

    def inside(self, p: float, tol: float) -> bool:
        lo_ok = p - self.lo > tol if self.open_lo else p >= self.lo - tol
        hi_ok = self.hi - p > tol if self.open_hi else p <= self.hi + tol
        return lo_ok and hi_ok


@dataclass(frozen=True)
class SetExpr:
    """A set written as unions/differences of ``{...}``, intervals and ``carrier``.

    An interval stands for the carrier samples inside it together with its
    closed endpoints when they lie in the carrier.
    """
    terms: tuple  # (op, term) with op in {"union", "minus"}

    def resolve(self, space: MetricSpace) -> list:
        tol = space.tol
        out: list = []
        for op, term in self.terms:
            if term == "carrier":
                pts = list(space.points)
            elif isinstance(term, Interval):
                pts = [p for p in space.points if term.inside(p, tol)]
                for end, is_open in ((term.lo, term.open_lo), (term.hi, term.open_hi)):
                    if not is_open and space.contains(end):
                        pts.append(end)
            else:
                pts = [as_point(v, space.is_complex) for v in term]
            if op == "union":
                out.extend(pts)
            else:
                out = [p for p in out if all(abs(p - q) > tol for q in pts)]
        return dedup(out, tol)


_SENTINELS = {"true": True, "false": False, "vacuous": "vacuous",
              "none": "no moved points", "inf": math.inf}


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_value(text: str):
    text = text.strip()
    if text.lower() in _SENTINELS:
        return _SENTINELS[text.lower()]
    if text.startswith("{") or text.startswith("[") or "carrier" in text or (
            text.startswith("(") and "," in text):
        return _parse_set(text)
    return pwdsl.constant(text)


def _parse_set(text: str) -> SetExpr:
    tokens = re.split(r"\s+(union|minus)\s+", text.strip())
    terms = []
    op = "union"
    for i, tok in enumerate(tokens):
        if i % 2 == 1:
            op = tok
            continue
        tok = tok.strip()
        if tok == "carrier":
            term = "carrier"
        elif tok.startswith("{") and tok.endswith("}"):
            body = tok[1:-1].strip()
            term = tuple(pwdsl.constant(v) for v in _split_top(body, ",")) if body else ()
        elif tok[:1] in "[(" and tok[-1:] in "])":
            ends = _split_top(tok[1:-1], ",")
            if len(ends) != 2:
                raise ValueError(f"interval {tok!r} needs two endpoints")
            term = Interval(float(pwdsl.constant(ends[0])), float(pwdsl.constant(ends[1])),
                            tok[0] == "(", tok[-1] == ")")
        else:
            raise ValueError(f"cannot read set term {tok!r}")
        terms.append((op, term))
    return SetExpr(tuple(terms))


# -- loader ----------------------------------------------------------------

DIRECTIVES = ("name", "space", "map", "phi", "query", "expect")


class _Loader:
    def __init__(self, text: str, path: Optional[str]):
        self.text = text.replace("\r\n", "\n")
        self.path = path

    def fail(self, message, offset, expected=None):
        raise ParseError(message, self.text, offset, expected)

    def directives(self):
        """Yield (keyword, argument text, argument offset, line offset)."""
        text = self.text
        pos = 0
        while pos < len(text):
            end = text.find("\n", pos)
            end = len(text) if end < 0 else end
            line = text[pos:end]
            body = line.split("#", 1)[0]
            stripped = body.strip()
            if not stripped:
                pos = end + 1
                continue
            lead = len(body) - len(body.lstrip())
            keyword = stripped.split(None, 1)[0]
            if keyword not in DIRECTIVES:
                self.fail(f"unknown directive {keyword!r}", pos + lead, " or ".join(DIRECTIVES))
            arg_off = pos + lead + len(keyword)
            arg_end = end
            if keyword in ("map", "phi"):
                # a definition continues across lines until its braces balance
                depth = 0
                cur = arg_off
                while True:
                    seg_end = text.find("\n", cur)
                    seg_end = len(text) if seg_end < 0 else seg_end
                    seg = text[cur:seg_end].split("#", 1)[0]
                    depth += seg.count("{") - seg.count("}")
                    arg_end = seg_end
                    if depth <= 0 or seg_end >= len(text):
                        break
                    cur = seg_end + 1
            arg = text[arg_off:arg_end]
            yield keyword, arg, arg_off
            pos = arg_end + 1

    def load(self) -> Scenario:
        name = Path(self.path).stem if self.path else "scenario"
        space = map_src = phi_src = None
        queries, expects = [], []
        for keyword, arg, off in self.directives():
            if keyword == "name":
                name = arg.split("#", 1)[0].strip()
            elif keyword == "space":
                if space is not None:
                    self.fail("duplicate space directive", off)
                space = self.space(arg, off)
            elif keyword == "map":
                if map_src is not None:
                    self.fail("duplicate map directive", off)
                map_src = (arg, off)
            elif keyword == "phi":
                if phi_src is not None:
                    self.fail("duplicate phi directive", off)
                phi_src = (arg, off)
            elif keyword == "query":
                queries.append((arg, off))
            else:
                expects.append((arg, off))
        if space is None:
            raise ValidationError("space", "missing space directive")
        if map_src is None:
            raise ValidationError("map", "missing map directive")
        if phi_src is None:
            raise ValidationError("phi", "missing phi directive")
        T = self.function(*map_src, space)
        phi = self.function(*phi_src, space)
        scenario = Scenario(name=name, space=space, map_T=T, phi=phi,
                            source=self.text, path=self.path)
        scenario.queries = [self.query(a, o, space) for a, o in queries]
        scenario.expectations = [self.expectation(a, o, space) for a, o in expects]
        validate(scenario)
        return scenario

    # numbers -------------------------------------------------------------
    def number(self, text: str, off: int, entity: str):
        t = text.strip()
        if re.fullmatch(r"[+-]?(inf|infinity|∞)", t, re.IGNORECASE):
            raise ValidationError(entity, f"unbounded value {t!r}; truncate the carrier "
                                          "to a finite range")
        try:
            return pwdsl.constant(t)
        except ParseError as e:
            self.fail(f"bad number {t!r}: {e.message}", off + e.offset, e.expected)
        except ArithmeticError as e:
            self.fail(f"bad number {t!r}: {e}", off)

    def real(self, text, off, entity) -> float:
        v = self.number(text, off, entity)
        if isinstance(v, complex):
            self.fail(f"expected a real number, got {text.strip()!r}", off)
        return float(v)

    # space ---------------------------------------------------------------
    def space(self, arg: str, off: int) -> MetricSpace:
        body = arg.split("#", 1)[0]
        pieces = re.split(r"\bunion\b", body)
        segments = []
        cursor = off
        for piece in pieces:
            segments.append(self.segment(piece, cursor))
            cursor += len(piece) + len("union")
        try:
            if any(s.is_complex for s in segments):
                return MetricSpace.plane(*segments)
            return MetricSpace.reals(*segments)
        except SpaceError as e:
            raise ValidationError("space", str(e)) from e

    def segment(self, text: str, off: int):
        lead = len(text) - len(text.lstrip())
        off += lead
        t = text.strip()
        if t.startswith("finite"):
            m = re.fullmatch(r"finite\s*\{(.*)\}", t, re.S)
            if not m:
                self.fail("malformed finite set", off, "finite { v1, v2, ... }")
            inner_off = off + t.index("{") + 1
            values = []
            for item in _split_top(m.group(1), ","):
                if item.strip():
                    values.append(self.number(item, inner_off, "space"))
                inner_off += len(item) + 1
            try:
                return FiniteSet(tuple(values))
            except SpaceError as e:
                raise ValidationError("space", str(e)) from e
        m = re.fullmatch(r"reals\s+from\s+(\S+)\s+to\s+(\S+)\s+step\s+(\S+)"
                         r"(?:\s+open\s+(left|right|both))?", t)
        if m:
            lo = self.real(m.group(1), off + m.start(1), "space")
            hi = self.real(m.group(2), off + m.start(2), "space")
            step = self.real(m.group(3), off + m.start(3), "space")
            side = m.group(4)
            try:
                return RealInterval(lo, hi, step, side in ("left", "both"),
                                    side in ("right", "both"))
            except SpaceError as e:
                raise ValidationError("space", str(e)) from e
        m = re.fullmatch(r"complex\s+re\s+(\S+)\s+to\s+(\S+)\s+im\s+(\S+)\s+to\s+(\S+)"
                         r"\s+step\s+(\S+)", t)
        if m:
            vals = [self.real(m.group(g), off + m.start(g), "space") for g in range(1, 6)]
            try:
                return ComplexGrid(*vals)
            except SpaceError as e:
                raise ValidationError("space", str(e)) from e
        self.fail(f"cannot read space segment {t!r}", off,
                  "finite {...} | reals from A to B step S | complex re A to B im C to D step S")

    # functions -----------------------------------------------------------
    def function(self, arg: str, off: int, space: MetricSpace):
        lead = len(arg) - len(arg.lstrip())
        src = arg.strip()
        start = off + lead
        if src.startswith("table"):
            m = re.fullmatch(r"table\s*\{(.*)\}", src, re.S)
            if not m:
                self.fail("malformed table", start, "table { v -> w ; ... }")
            mapping = {}
            inner = start + src.index("{") + 1
            for entry in m.group(1).split(";"):
                body = entry.split("#", 1)[0]
                if body.strip():
                    if "->" not in body:
                        self.fail(f"table entry {body.strip()!r} lacks '->'", inner, "'->'")
                    a, b = body.split("->", 1)
                    key = as_point(self.number(a, inner, "table"), space.is_complex)
                    mapping[key] = as_point(self.number(b, inner + len(a) + 2, "table"),
                                            space.is_complex)
                inner += len(entry) + 1
            return TableMap(mapping, space.tol)
        # strip trailing comments inside multi-line definitions
        cleaned = "\n".join(line.split("#", 1)[0].ljust(len(line)) for line in src.split("\n"))
        try:
            return pwdsl.parse(cleaned)
        except ParseError as e:
            self.fail(e.message, start + e.offset, e.expected)

    # queries -------------------------------------------------------------
    def query(self, arg: str, off: int, space: MetricSpace) -> Query:
        body = arg.split("#", 1)[0]
        lead = len(body) - len(body.lstrip())
        text = " ".join(body.split())
        start = off + lead
        if not text:
            self.fail("empty query", start, " | ".join(QUERY_KINDS))
        m = re.fullmatch(r"M\s*\((.*)\)", text)
        if m:
            args = _split_top(m.group(1), ",")
            if len(args) != 2:
                self.fail("M takes two points", start, "M(a, b)")
            x, y = (as_point(self.number(a, start, "query"), space.is_complex) for a in args)
            return Query("M", (("x", x), ("y", y)), f"M({args[0].strip()}, {args[1].strip()})")
        words = text.split(" ")
        kind = words[0]
        if kind not in QUERY_KINDS:
            self.fail(f"unknown query {kind!r}", start, " | ".join(QUERY_KINDS))
        params = []
        rest = words[1:]
        if kind in ("contraction", "minimal_k"):
            if not rest:
                self.fail(f"{kind} needs a contraction kind", start)
            try:
                params.append(("kind", ContractionKind.from_label(rest[0])))
            except ValueError as e:
                self.fail(str(e), start)
            rest = rest[1:]
        elif kind == "certify":
            if not rest:
                self.fail("certify needs a theorem", start)
            try:
                params.append(("theorem", TheoremId.from_label(rest[0])))
            except ValueError as e:
                self.fail(str(e), start)
            rest = rest[1:]
        kmap = {}
        for word in rest:
            if "=" not in word:
                self.fail(f"expected key=value, got {word!r}", start)
            key, val = word.split("=", 1)
            if kind == "certify_all":
                if key == "x0":
                    params.append(("x0", as_point(self.number(val, start, "query"),
                                                  space.is_complex)))
                    continue
                try:
                    kmap[ContractionKind.from_label(key)] = self.real(val, start, "query")
                except ValueError as e:
                    self.fail(str(e), start)
                continue
            if key == "x0":
                params.append((key, as_point(self.number(val, start, "query"), space.is_complex)))
            elif key in ("r", "k"):
                params.append((key, self.real(val, start, "query")))
            else:
                self.fail(f"unknown parameter {key!r} for {kind}", start)
        if kind == "certify_all":
            params.append(("k_map", tuple(sorted(kmap.items(), key=lambda kv: kv[0].value))))
        required = {"circle": ("x0", "r"), "disc": ("x0", "r"), "contraction": ("x0", "k"),
                    "minimal_k": ("x0",), "certify": ("x0", "k"), "certify_all": ("x0",)}
        have = {k for k, _ in params}
        for key in required.get(kind, ()):
            if key not in have:
                self.fail(f"{kind} needs {key}=", start)
        if kind not in required and rest:
            self.fail(f"{kind} takes no parameters", start)
        return Query(kind, tuple(params), text)

    def expectation(self, arg: str, off: int, space: MetricSpace) -> Expectation:
        body = arg.split("#", 1)[0]
        m = re.search(r"\s=\s", body)
        if not m:
            self.fail("expectation needs ' = '", off, "<quantity> = <value> [tol <t>]")
        left, right = body[:m.start()], body[m.end():]
        fld = None
        if " : " in left:
            left, fld = left.rsplit(" : ", 1)
            fld = fld.strip()
        q = self.query(left, off, space)
        tol = None
        tm = re.search(r"\s+tol\s+(\S+)\s*$", right)
        if tm:
            tol = self.real(tm.group(1), off + m.end() + tm.start(1), "expect")
            right = right[:tm.start()]
        try:
            expected = parse_value(right)
        except (ParseError, ValueError, ArithmeticError) as e:
            self.fail(f"cannot read expected value {right.strip()!r}: {e}", off + m.end())
        line = self.text.count("\n", 0, off) + 1
        return Expectation(q, fld, expected, " ".join(right.split()), tol, line)


def validate(scenario: Scenario) -> None:
    """Evaluate T and phi over the carrier; attach closure warnings."""
    system = scenario.system()
    space = scenario.space
    for p in space.points:
        try:
            system.image(p)
        except EvaluationFailed as e:
            raise ValidationError("map", str(e)) from e
        try:
            system.phi(p)
        except NegativePhi as e:
            raise ValidationError("phi", str(e)) from e
        except EvaluationFailed as e:
            raise ValidationError("phi", str(e)) from e
    finite = [q for seg in space.segments if isinstance(seg, FiniteSet) for q in seg.points]
    escaped = [p for p in finite if not space.contains(system.image(p))]
    if escaped:
        shown = ", ".join(f"{p!r} -> {system.image(p)!r}" for p in escaped[:5])
        scenario.warnings.append(ClosureWarning(
            f"T maps {len(escaped)} finite carrier point(s) outside the carrier: {shown}"))


def loads(text: str, path: Optional[str] = None) -> Scenario:
    return _Loader(text, path).load()


def load_scenario(path) -> Scenario:
    path = Path(path)
    return loads(path.read_text(encoding="utf-8"), str(path))


def corpus_paths() -> list[Path]:
    root = Path(__file__).parent / "corpus"
    return sorted(root.glob("*.fxl"))


