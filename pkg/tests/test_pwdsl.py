import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from phifix import pwdsl
from phifix.pwdsl import (Binary, Compare, DomainError, Guard, ImaginaryUnit, KindMismatch,
                          Num, ParseError, Piecewise, Unary, Var, constant, evaluate, parse,
                          parse_expr, to_text)
from phifix.scenario import corpus_paths, load_scenario

X = Var("x")


def neg(e):
    return Unary("neg", e)


@pytest.mark.parametrize("text, tree", [
    ("-x^2", neg(Binary("^", X, Num(2)))),
    ("(-x)^2", Binary("^", neg(X), Num(2))),
    ("2*x^3", Binary("*", Num(2), Binary("^", X, Num(3)))),
    ("a_b", None),
    ("1 - 2 - 3", Binary("-", Binary("-", Num(1), Num(2)), Num(3))),
    ("8 / 4 / 2", Binary("/", Binary("/", Num(8), Num(4)), Num(2))),
    ("1 + 2 * 3", Binary("+", Num(1), Binary("*", Num(2), Num(3)))),
    ("(1 + 2) * 3", Binary("*", Binary("+", Num(1), Num(2)), Num(3))),
    ("-x * 2", Binary("*", neg(X), Num(2))),
    ("2 * -x", Binary("*", Num(2), neg(X))),
    ("--x", neg(neg(X))),
    ("abs(x)^2", Binary("^", Unary("abs", X), Num(2))),
    ("x^-1", Binary("^", X, Num(-1))),
    ("abs(x - 1) + abs(x + 1) - 2",
     Binary("-", Binary("+", Unary("abs", Binary("-", X, Num(1))),
                        Unary("abs", Binary("+", X, Num(1)))), Num(2))),
])
def test_precedence_table(text, tree):
    if tree is None:
        with pytest.raises(ParseError):
            parse_expr(text)
        return
    assert parse_expr(text) == tree


def test_minus_square_evaluates_negative():
    f = parse("piecewise { otherwise : -x^2 }")
    assert evaluate(f, 3.0) == -9.0


def test_single_branch_and_identity():
    f = parse("piecewise { x > 2 : x/2 ; otherwise : x }")
    assert f.branches == ((Guard((Compare(">", X, Num(2)),)), Binary("/", X, Num(2))),)
    assert f.otherwise == X
    assert parse("piecewise { otherwise : x }") == Piecewise((), X)


@pytest.mark.parametrize("text, expected", [
    ("piecewise{x>2:x/2;otherwise:x}", "piecewise { x > 2 : x / 2 ; otherwise : x }"),
    ("piecewise { otherwise : x }", "piecewise { otherwise : x }"),
    ("piecewise { otherwise : abs(x-1)+abs(x+1)-2 }",
     "piecewise { otherwise : abs(x - 1) + abs(x + 1) - 2 }"),
])
def test_canonical_print(text, expected):
    assert to_text(parse(text)) == expected


def test_evaluation_examples():
    halve = parse("piecewise { x > 2 : x/2 ; otherwise : x }")
    assert evaluate(halve, 4.0) == 2.0
    assert evaluate(halve, 2.0) == 2.0
    abs_minus = parse("piecewise { otherwise : abs(x) - x }")
    assert evaluate(abs_minus, -3.0) == 6.0
    flip = parse("piecewise { re(z) < -4 : -conj(z) ; otherwise : z }")
    assert evaluate(flip, complex(-5, 1)) == complex(5, 1)
    assert evaluate(flip, complex(-1, 1)) == complex(-1, 1)


def test_guards_are_exact_and_first_match_wins():
    f = parse("piecewise { x <= 1 : 10 ; x <= 2 : 20 ; otherwise : 30 }")
    assert [evaluate(f, v) for v in (1.0, 1.0000000001, 2.0, 2.5)] == [10, 20, 20, 30]
    g = parse("piecewise { x >= 0 and x < 1 : 1 ; otherwise : 0 }")
    assert evaluate(g, 0.0) == 1 and evaluate(g, 1.0) == 0
    h = parse("piecewise { x == 5 : 1 ; otherwise : x }")
    assert evaluate(h, 5.0) == 1 and evaluate(h, 5.000001) == 5.000001


def test_complex_abs_is_modulus():
    f = parse("piecewise { otherwise : abs(z) }")
    assert evaluate(f, complex(3, 4)) == 5
    assert evaluate(parse("piecewise { otherwise : im(z) * i }"), 2 + 3j) == 3j


@pytest.mark.parametrize("text, point, error", [
    ("piecewise { otherwise : sqrt(x) }", -1.0, DomainError),
    ("piecewise { otherwise : 1 / x }", 0.0, DomainError),
    ("piecewise { otherwise : x ^ -1 }", 0.0, DomainError),
    ("piecewise { otherwise : z }", 1.0, KindMismatch),
    ("piecewise { otherwise : x }", 1j, KindMismatch),
    ("piecewise { z > 0 : 1 ; otherwise : 0 }", 1j, KindMismatch),
])
def test_evaluation_errors(text, point, error):
    with pytest.raises(error):
        evaluate(parse(text), point)


def test_complex_sqrt_allows_negative():
    assert evaluate(parse("piecewise { otherwise : sqrt(re(z)) }"), complex(-4, 0)) == 2j


def test_constants():
    assert constant("126/5") == pytest.approx(25.2)
    assert constant("-5+i") == complex(-5, 1)
    assert constant("-6") == -6
    with pytest.raises(ParseError):
        constant("x + 1")


# -- malformed input -------------------------------------------------------

def test_malformed_guard_points_at_colon():
    text = "piecewise { x > : 1 ; otherwise : 0 }"
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert exc.value.offset == text.index(":")
    assert (exc.value.line, exc.value.column) == (1, text.index(":") + 1)
    assert exc.value.expected


@pytest.mark.parametrize("text", [
    "", "piecewise", "piecewise {", "piecewise { }", "piecewise { x > 1 : 2 }",
    "piecewise { otherwise : }", "piecewise { otherwise : x } trailing",
    "piecewise { otherwise : x ^ 1.5 }", "piecewise { otherwise : x ^ x }",
    "piecewise { otherwise : sin(x) }", "piecewise { otherwise : (x }",
    "piecewise { otherwise : x + z }", "piecewise { x : 1 ; otherwise : 0 }",
    "piecewise { otherwise : 2 $ 3 }", "piecewise { x >> 1 : 1 ; otherwise : 0 }",
    "piecewise {\n  x > 1 : 1 ;\n  otherwise : @\n}",
])
def test_malformed_inputs_raise_positioned_errors(text):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert 0 <= exc.value.offset <= len(text)
    assert exc.value.line >= 1 and exc.value.column >= 1


def test_multiline_error_location():
    text = "piecewise {\n  x > 1 : 1 ;\n  otherwise : @\n}"
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert exc.value.line == 3
    assert exc.value.column == 15


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="piecewise{}otherwxz:;<>=+-*/^()0123456789.abssqrtconjreim #\n", max_size=60))
def test_fuzzed_text_never_crashes(text):
    try:
        parse(text)
    except ParseError as exc:
        assert 0 <= exc.offset <= len(text)


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=40))
def test_arbitrary_unicode_never_crashes(text):
    try:
        parse(text)
    except ParseError as exc:
        assert 0 <= exc.offset <= len(text)


# -- round trip ------------------------------------------------------------

NUMBERS = (0, 1, 2, 3, 0.5, 0.25, 1.5, 4, 10, 2.75)


def random_expr(rng: random.Random, var: str, depth: int):
    if depth <= 0 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.45:
            return Var(var)
        if var == "z" and roll < 0.55:
            return ImaginaryUnit()
        return Num(float(rng.choice(NUMBERS)))
    roll = rng.random()
    if roll < 0.2:
        ops = ["neg", "abs", "sqrt"] + (["re", "im", "conj"] if var == "z" else [])
        return Unary(rng.choice(ops), random_expr(rng, var, depth - 1))
    if roll < 0.35:
        return Binary("^", random_expr(rng, var, depth - 1), Num(float(rng.randint(-3, 5))))
    return Binary(rng.choice("+-*/"), random_expr(rng, var, depth - 1),
                  random_expr(rng, var, depth - 1))


def random_piecewise(rng: random.Random) -> Piecewise:
    var = rng.choice("xz")
    branches = []
    for _ in range(rng.randint(0, 3)):
        comps = tuple(Compare(rng.choice(pwdsl.RELOPS), random_expr(rng, var, 2),
                              random_expr(rng, var, 2)) for _ in range(rng.randint(1, 2)))
        branches.append((Guard(comps), random_expr(rng, var, 4)))
    return Piecewise(tuple(branches), random_expr(rng, var, 4))


@pytest.mark.parametrize("seed", range(200))
def test_random_ast_round_trip(seed):
    f = random_piecewise(random.Random(seed))
    text = to_text(f)
    g = parse(text)
    assert g == f
    assert to_text(g) == text


@pytest.mark.parametrize("path", corpus_paths(), ids=lambda p: p.stem)
def test_corpus_functions_round_trip(path):
    scenario = load_scenario(path)
    for fn in (scenario.map_T, scenario.phi):
        if isinstance(fn, Piecewise):
            assert parse(to_text(fn)) == fn


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-50, max_value=50, allow_nan=False))
def test_evaluation_is_deterministic(x):
    f = parse("piecewise { x > 2 : x^4 - 5*x^2 + x + 4 ; otherwise : abs(x - 1) / 3 }")
    a, b = evaluate(f, x), evaluate(f, x)
    assert a == b and math.isfinite(a)
