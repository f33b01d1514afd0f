"""A small language for guarded piecewise maps.

    piecewise { x > 2 : x / 2 ; otherwise : x }

Branches are tried in order and the first guard that holds selects its
expression; ``otherwise`` is mandatory, so evaluation is total.  The free
variable is ``x`` on real spaces and ``z`` on complex ones.  Guards compare
real quantities with exact floating-point comparison.

Precedence, tightest first: function application and parentheses, ``^``
(integer literal exponent), unary minus, ``*`` ``/``, ``+`` ``-``.  Binary
operators are left-associative, so ``-x^2`` is ``-(x^2)`` and ``a - b - c``
is ``(a - b) - c``.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Union

FUNCTIONS = ("abs", "sqrt", "re", "im", "conj")
RELOPS = ("<", "<=", ">", ">=", "==")
KEYWORDS = {"piecewise", "otherwise", "and", "i", "x", "z", *FUNCTIONS}


class ParseError(ValueError):
    def __init__(self, message: str, text: str, offset: int, expected: str | None = None):
        self.message = message
        self.offset = max(0, min(offset, len(text)))
        self.line = text.count("\n", 0, self.offset) + 1
        self.column = self.offset - (text.rfind("\n", 0, self.offset) + 1) + 1
        self.expected = expected
        hint = f" (expected {expected})" if expected else ""
        super().__init__(f"line {self.line}, column {self.column}: {message}{hint}")


class EvalError(ArithmeticError):
    pass


class DomainError(EvalError):
    pass


class KindMismatch(EvalError, TypeError):
    pass


# -- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class ImaginaryUnit:
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # neg | abs | sqrt | re | im | conj
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / ^
    left: "Expr"
    right: "Expr"


Expr = Union[Num, ImaginaryUnit, Var, Unary, Binary]


@dataclass(frozen=True)
class Compare:
    op: str
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Guard:
    comparisons: tuple


@dataclass(frozen=True)
class Piecewise:
    branches: tuple  # of (Guard, Expr)
    otherwise: Expr

    @property
    def variable(self) -> str | None:
        names = {n.name for n in _walk_piecewise(self) if isinstance(n, Var)}
        return names.pop() if names else None

    @property
    def is_complex(self) -> bool:
        if self.variable == "z":
            return True
        return any(isinstance(n, ImaginaryUnit) or (isinstance(n, Unary) and n.op == "conj")
                   for n in _walk_piecewise(self))

    def __call__(self, p):
        return evaluate(self, p)

    def __str__(self):
        return to_text(self)


def _walk(e):
    yield e
    if isinstance(e, Unary):
        yield from _walk(e.arg)
    elif isinstance(e, Binary):
        yield from _walk(e.left)
        yield from _walk(e.right)


def _walk_piecewise(f: Piecewise):
    for guard, expr in f.branches:
        for c in guard.comparisons:
            yield from _walk(c.lhs)
            yield from _walk(c.rhs)
        yield from _walk(expr)
    yield from _walk(f.otherwise)


# -- lexer -----------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op><=|>=|==|[-+*/^(){};:<>,])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # num | name | op | eof
    text: str
    offset: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


# -- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message, expected=None, tok=None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"{message}, found {found}", self.text, tok.offset, expected)

    def at(self, text):
        return self.tok.text == text and self.tok.kind in ("op", "name")

    def expect(self, text):
        if not self.at(text):
            self.error(f"expected {text!r}", repr(text))
        self.i += 1

    def piecewise(self) -> Piecewise:
        self.expect("piecewise")
        self.expect("{")
        branches = []
        while not self.at("otherwise"):
            if self.tok.kind == "eof" or self.at("}"):
                self.error("missing 'otherwise' branch", "'otherwise'")
            guard = self.guard()
            self.expect(":")
            expr = self.expr()
            self.expect(";")
            branches.append((guard, expr))
        self.expect("otherwise")
        self.expect(":")
        otherwise = self.expr()
        self.expect("}")
        f = Piecewise(tuple(branches), otherwise)
        names = {n.name for n in _walk_piecewise(f) if isinstance(n, Var)}
        if len(names) > 1:
            raise ParseError("expression mixes variables x and z", self.text, 0)
        return f

    def guard(self) -> Guard:
        cmps = [self.compare()]
        while self.at("and"):
            self.i += 1
            cmps.append(self.compare())
        return Guard(tuple(cmps))

    def compare(self) -> Compare:
        lhs = self.expr()
        if not (self.tok.kind == "op" and self.tok.text in RELOPS):
            self.error("expected a comparison operator", "one of < <= > >= ==")
        op = self.tok.text
        self.i += 1
        return Compare(op, lhs, self.expr())

    def expr(self) -> Expr:
        e = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            e = Binary(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            e = Binary(op, e, self.factor())
        return e

    def factor(self) -> Expr:
        if self.at("-"):
            self.i += 1
            return Unary("neg", self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.base()
        if self.at("^"):
            self.i += 1
            sign = 1
            if self.at("-"):
                sign = -1
                self.i += 1
            tok = self.tok
            if tok.kind != "num" or not re.fullmatch(r"\d+", tok.text):
                self.error("exponent must be an integer literal", "integer literal")
            self.i += 1
            return Binary("^", base, Num(float(sign * int(tok.text))))
        return base

    def base(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "name":
            if tok.text == "i":
                self.i += 1
                return ImaginaryUnit()
            if tok.text in ("x", "z"):
                self.i += 1
                return Var(tok.text)
            if tok.text in FUNCTIONS:
                self.i += 1
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(tok.text, arg)
            self.error(f"unknown name {tok.text!r}",
                       "a number, x, z, i, '(' or one of " + ", ".join(FUNCTIONS))
        if self.at("("):
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        self.error("expected an expression", "a number, variable, function call or '('")

    def finish(self):
        if self.tok.kind != "eof":
            self.error("unexpected trailing input", "end of input")


def parse(text: str) -> Piecewise:
    """Parse a ``piecewise { ... }`` definition; raises ParseError."""
    p = _Parser(text)
    f = p.piecewise()
    p.finish()
    return f


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    p.finish()
    return e


# -- printer ---------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _num_text(v: float) -> str:
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _prec(e: Expr) -> int:
    if isinstance(e, Binary):
        return _PREC[e.op]
    if isinstance(e, Unary) and e.op == "neg":
        return _PREC["neg"]
    return 5


def expr_text(e: Expr) -> str:
    if isinstance(e, Num):
        return _num_text(e.value)
    if isinstance(e, ImaginaryUnit):
        return "i"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        if e.op == "neg":
            inner = expr_text(e.arg)
            return "-" + (f"({inner})" if _prec(e.arg) < _PREC["neg"] else inner)
        return f"{e.op}({expr_text(e.arg)})"
    if e.op == "^":
        base = expr_text(e.left)
        if _prec(e.left) <= _PREC["^"]:
            base = f"({base})"
        return f"{base} ^ {_num_text(e.right.value)}"
    p = _PREC[e.op]
    left, right = expr_text(e.left), expr_text(e.right)
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


def to_text(f: Piecewise) -> str:
    """Canonical text; ``parse(to_text(f)) == f``."""
    parts = []
    for guard, expr in f.branches:
        cond = " and ".join(f"{expr_text(c.lhs)} {c.op} {expr_text(c.rhs)}"
                            for c in guard.comparisons)
        parts.append(f"{cond} : {expr_text(expr)} ; ")
    return "piecewise { " + "".join(parts) + f"otherwise : {expr_text(f.otherwise)} }}"


# -- evaluation ------------------------------------------------------------

def _real(v, what):
    if isinstance(v, complex):
        if v.imag != 0:
            raise KindMismatch(f"{what} is complex ({v}); wrap it in re(), im() or abs()")
        return v.real
    return v


def eval_expr(e: Expr, p, complex_mode: bool):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return p
    if isinstance(e, ImaginaryUnit):
        if not complex_mode:
            raise KindMismatch("imaginary unit used on a real space")
        return 1j
    if isinstance(e, Unary):
        a = eval_expr(e.arg, p, complex_mode)
        if e.op == "neg":
            return -a
        if e.op == "abs":
            return abs(a)
        if e.op == "re":
            return a.real
        if e.op == "im":
            return a.imag
        if e.op == "conj":
            return a.conjugate() if isinstance(a, complex) else a
        # sqrt
        if isinstance(a, complex):
            return cmath.sqrt(a)
        if a < 0:
            if complex_mode:
                return cmath.sqrt(a)
            raise DomainError(f"sqrt of negative number {a}")
        return math.sqrt(a)
    a = eval_expr(e.left, p, complex_mode)
    b = eval_expr(e.right, p, complex_mode)
    try:
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            if b == 0:
                raise DomainError("division by zero")
            return a / b
        n = int(b)
        if n < 0 and a == 0:
            raise DomainError("zero raised to a negative power")
        return a ** n
    except OverflowError as exc:
        raise DomainError(f"overflow evaluating {expr_text(e)}") from exc


_CMP = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
}


def evaluate(f: Piecewise, p):
    """Value of ``f`` at point ``p`` (float on real spaces, complex on the plane)."""
    complex_mode = isinstance(p, complex)
    if not complex_mode and f.is_complex:
        raise KindMismatch(f"complex map evaluated at real point {p!r}")
    if complex_mode and f.variable == "x":
        raise KindMismatch(f"real map evaluated at complex point {p!r}")
    for guard, expr in f.branches:
        if all(_CMP[c.op](_real(eval_expr(c.lhs, p, complex_mode), "guard operand"),
                          _real(eval_expr(c.rhs, p, complex_mode), "guard operand"))
               for c in guard.comparisons):
            value = eval_expr(expr, p, complex_mode)
            break
    else:
        value = eval_expr(f.otherwise, p, complex_mode)
    if complex_mode:
        return complex(value)
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"non-finite value at {p!r}")
    return value


def constant(text: str):
    """Evaluate a variable-free expression such as ``126/5`` or ``-5+i``."""
    e = parse_expr(text)
    if any(isinstance(n, Var) for n in _walk(e)):
        raise ParseError("a constant may not mention x or z", text, 0)
    complex_mode = any(isinstance(n, ImaginaryUnit) for n in _walk(e))
    v = eval_expr(e, 0j if complex_mode else 0.0, complex_mode)
    if isinstance(v, complex) and v.imag == 0:
        v = v.real
    return v
