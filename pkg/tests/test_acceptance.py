"""Acceptance criteria, one test per criterion (criterion 3 per sub-claim).

Each test prints a single ``[PASS]``/``[FAIL]`` line; the lines are also
collected and repeated in the terminal summary.  Run alone with

    pytest tests/test_acceptance.py -v -s
"""
import math
import random
import subprocess
import sys
import time

from phifix.analysis import NO_MOVED_POINTS, System, phi_fixed_circle, phi_fixed_disc
from phifix.certify import ScanConfig, random_trial, scan_random
from phifix.contraction import VACUOUS, ContractionKind, check, minimal_k
from phifix.pwdsl import ParseError, Piecewise, parse, to_text
from phifix.scenario import corpus_paths, load_scenario
from phifix.space import MetricSpace, RealInterval

from conftest import CORPUS, corpus_system
from test_pwdsl import random_piecewise

TOL = 1e-9
LINES: list = []


def verdict(label: str, checks: list):
    """``checks`` holds (description, ok) pairs; print one line, then assert."""
    bad = [d for d, ok in checks if not ok]
    line = f"[{'PASS' if not bad else 'FAIL'}] {label}" + (f"  -- failed: {'; '.join(bad)}" if bad else "")
    LINES.append(line)
    print(line)
    assert not bad, line


def same_points(actual, expected, tol=TOL):
    a, e = sorted(actual), sorted(expected)
    return len(a) == len(e) and all(abs(x - y) <= tol for x, y in zip(a, e))


def test_c1_finite_corpus_exactness():
    s = corpus_system("finite_mixed")
    sp = s.space
    verdict("C1 finite-carrier values (rho, mu, M, Fix, zeros, circles, discs)", [
        ("rho = 4", abs(s.rho() - 4) <= TOL),
        ("mu = 2", abs(s.mu() - 2) <= TOL),
        ("M(5,-4) = 25.2", abs(s.big_m(5.0, -4.0) - 25.2) <= TOL),
        ("Fix = X minus {5}", same_points(s.fix_set(), [p for p in sp.points if p != 5])),
        ("zeros", same_points(s.zero_set(), [-6, -4, -2, 0, 1, 2, 4, 5])),
        ("C(0,4)", same_points(sp.circle(0.0, 4.0).points, [-4, 4])),
        ("C(-4,2)", same_points(sp.circle(-4.0, 2.0).points, [-6, -2])),
        ("D(0,4)", same_points(sp.disc(0.0, 4.0).points, [-4, -2, 0, 1, 2, 4])),
        ("D(-4,2)", same_points(sp.disc(-4.0, 2.0).points, [-6, -4, -2])),
    ])


def test_c2_grid_corpus_exactness():
    quartic = corpus_system("quartic_circle")
    plateau = corpus_system("plateau_disc")
    real = corpus_system("activation_real")
    cplx = corpus_system("activation_complex")
    c01 = phi_fixed_circle(quartic, 0.0, 1.0)
    ring = phi_fixed_circle(cplx, 0j, 1.0, 360)
    ring_ok = len(ring.locus.points) == 360 and all(
        abs(abs(z) - 1) <= TOL and cplx.displacement(z) <= TOL and cplx.phi(z) <= TOL
        for z in ring.locus.points)
    d21 = phi_fixed_disc(real, 2.0, 1.0)
    verdict("C2 grid-carrier loci (quartic, plateau, real and complex activations)", [
        ("quartic Fix = {-2,-1,1,2}", same_points(quartic.fix_set(), [-2, -1, 1, 2])),
        ("quartic C(0,1) = {-1,1} phi-fixed", c01.holds and same_points(c01.locus.points, [-1, 1])),
        ("plateau D(0,1) phi-fixed", phi_fixed_disc(plateau, 0.0, 1.0).holds),
        ("plateau D(0,1/2) phi-fixed", phi_fixed_disc(plateau, 0.0, 0.5).holds),
        ("real activation rho = 1", abs(real.rho() - 1) <= TOL),
        ("real activation C(2,1) = {1,3}", phi_fixed_circle(real, 2.0, 1.0).holds and
         same_points(phi_fixed_circle(real, 2.0, 1.0).locus.points, [1, 3])),
        ("real activation D(2,1) phi-fixed", d21.holds and min(d21.locus.points) == 1
         and max(d21.locus.points) == 3),
        ("complex activation C(0,1), 360 samples", ring.holds and ring_ok),
    ])


def test_c3a_halving_type1():
    s = corpus_system("halving_tail")
    verdict("C3a halving map: type1 holds at x0=-1, k=1/2",
            [("holds", check(ContractionKind.TYPE1, s, -1.0, 0.5).holds)])


def test_c3b_shifted_gentype1_quarter():
    s = corpus_system("shifted_tail")
    v = check(ContractionKind.GEN_TYPE1, s, 0.0, 0.25)
    verdict("C3b shifted map: gentype1 holds at x0=0, k=1/4",
            [(f"holds (worst ratio {v.worst_ratio:.4g} at x={v.witness})", v.holds)])


def test_c3c_shifted_type1_minimal_k():
    mk = minimal_k(ContractionKind.TYPE1, corpus_system("shifted_tail"), 0.0)
    verdict("C3c shifted map: type1 minimal_k = 1 at x0=0",
            [(f"minimal_k = 1 (got {mk:.17g})", mk is not VACUOUS and abs(mk - 1) <= TOL)])


def test_c3d_doubling_type1_minimal_k():
    mk = minimal_k(ContractionKind.TYPE1, corpus_system("doubling_tail"), 0.0)
    verdict("C3d doubling map: type1 minimal_k = 1 at x0=0",
            [(f"minimal_k = 1 (got {mk:.17g})", mk is not VACUOUS and abs(mk - 1) <= TOL)])


def test_c3e_final_example_contractions():
    s = corpus_system("finite_mixed")
    mk = minimal_k(ContractionKind.TYPE1, s, 0.0)
    verdict("C3e finite map: type1 at (0, 9/10), gentype1 at (-4, 1/4), minimal_k = 0.8", [
        ("type1 holds", check(ContractionKind.TYPE1, s, 0.0, 0.9).holds),
        ("gentype1 holds", check(ContractionKind.GEN_TYPE1, s, -4.0, 0.25).holds),
        ("minimal_k = 0.8", abs(mk - 0.8) <= TOL),
    ])


def test_c4_sampled_infimum_convergence():
    T = parse("piecewise { x > 2 : x / 2 ; otherwise : x }")
    checks, previous = [], math.inf
    for step in (0.1, 0.01, 0.001):
        space = MetricSpace.reals(RealInterval(2, 10, step, open_lo=True))
        est = System(space, T).rho()
        checks.append((f"step {step}: |{est!r} - 1| <= step/2 + 1e-9",
                       abs(est - 1) <= step / 2 + 1e-9))
        checks.append((f"step {step}: decreasing", 1 <= est < previous))
        previous = est
    verdict("C4 sampled rho converges to 1 on (2, 10]", checks)


def test_c5_soundness_sweep():
    start = time.perf_counter()
    report = scan_random(ScanConfig(trials=1000, max_points=8), seed=42)
    elapsed = time.perf_counter() - start
    verdict(f"C5 scan seed 42, 1000 trials ({report.certifications} certifications, "
            f"{elapsed:.2f}s)", [
        ("zero soundness violations", not report.soundness_violations),
        (f"converse failures found ({len(report.converse_failures)})",
         len(report.converse_failures) >= 1),
        ("under 10 s", elapsed < 10),
    ])


def _random_systems(n, seed):
    return [random_trial(i, seed, ScanConfig()).system for i in range(n)]


def test_c6_property_suites():
    corpus = [corpus_system(stem) for stem in sorted(CORPUS)]
    m_ok, diag_ok = True, True
    for s in corpus:
        pts = s.points
        for x in pts:
            diag_ok &= s.big_m(x, x) == s.displacement(x)
            for y in pts:
                m = s.big_m(x, y)
                m_ok &= m == s.big_m(y, x) and m >= s.d(x, y)
    randoms = _random_systems(1000, 4242)
    root_ok = True
    for s in corpus + randoms:
        r, m = s.rho(), s.mu()
        if r is not NO_MOVED_POINTS:
            root_ok &= abs(m - math.sqrt(r)) <= TOL
    consistent = True
    for s in corpus + randoms:
        zeros = s.zero_set()
        anchors = [zeros[0], zeros[-1]] if zeros else [s.points[0]]
        for x0 in anchors:
            for kind in ContractionKind:
                mk = minimal_k(kind, s, x0)
                for frac in (0.1, 0.5, 0.9, 0.999):
                    k = kind.bound * frac
                    consistent &= check(kind, s, x0, k).holds == (mk is VACUOUS or mk <= k)
    verdict("C6 property suites (M symmetry/bound/diagonal, mu = sqrt(rho), check vs minimal_k)", [
        ("M symmetric and >= d over all corpus pairs", m_ok),
        ("M(x,x) = d(x,Tx)", diag_ok),
        ("mu = sqrt(rho)", root_ok),
        ("check consistent with minimal_k", consistent),
    ])


MALFORMED = [
    "piecewise { x > : 1 ; otherwise : 0 }", "", "piecewise { }", "piecewise { otherwise : x ^ 0.5 }",
    "piecewise { otherwise : sin(x) }", "piecewise { otherwise : (x }", "piecewise { x : 1 ; otherwise : 0 }",
    "piecewise { otherwise : x } extra", "piecewise { otherwise : x + z }", "piecewise { otherwise : 1 $ 2 }",
]


def test_c7_parser_round_trip():
    corpus_ok = True
    for path in corpus_paths():
        sc = load_scenario(path)
        for fn in (sc.map_T, sc.phi):
            if isinstance(fn, Piecewise):
                corpus_ok &= parse(to_text(fn)) == fn
    random_ok = all(parse(to_text(f)) == f for f in
                    (random_piecewise(random.Random(seed)) for seed in range(200)))
    positioned = True
    for text in MALFORMED:
        try:
            parse(text)
            positioned = False
        except ParseError as exc:
            positioned &= 0 <= exc.offset <= len(text) and exc.line >= 1
    verdict("C7 parser round trip (corpus + 200 random ASTs) and positioned errors", [
        ("corpus functions", corpus_ok), ("random ASTs", random_ok),
        ("malformed inputs give positioned ParseError", positioned),
    ])


def _cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "phifix", *args], capture_output=True,
                          cwd=cwd, check=False).stdout


def test_c8_determinism(tmp_path):
    a = _cli(["corpus", "--json"], tmp_path)
    b = _cli(["corpus", "--json"], tmp_path)
    s1 = _cli(["scan", "--seed", "42", "--trials", "1000", "--max-points", "8", "--json"], tmp_path)
    g1 = (tmp_path / "scan_gallery.json").read_bytes()
    s2 = _cli(["scan", "--seed", "42", "--trials", "1000", "--max-points", "8", "--json"], tmp_path)
    g2 = (tmp_path / "scan_gallery.json").read_bytes()
    verdict("C8 determinism (corpus --json, scan --seed 42)", [
        ("corpus output identical", a == b and len(a) > 0),
        ("scan output identical", s1 == s2 and len(s1) > 0),
        ("scan gallery identical", g1 == g2),
    ])
