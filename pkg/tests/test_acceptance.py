"""Acceptance criteria, one test per criterion, each under its runtime limit.

Run under pytest (a PASS/FAIL line per criterion appears in the terminal
summary) or directly: ``python tests/test_acceptance.py``.
"""

import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mahlercert.algebra import Poly, RatFun, is_monomial, mahler_substitute, theta_derive, z  # noqa: E402
from mahlercert.certifier import (  # noqa: E402
    Hyperalgebraic,
    NotHyperalgebraicWithin,
    ScalarMahlerEq,
    Verdict,
    certify,
    certify_equation,
    classify_order1,
    companion_matrix,
    replay_certificate,
    sl_assumption,
)
from mahlercert.cli import JobSpec, render, run_job  # noqa: E402
from mahlercert.linalg import mat_inv, mat_mul  # noqa: E402
from mahlercert.parser import evaluate  # noqa: E402
from mahlercert.series import (  # noqa: E402
    TruncatedSeries,
    evaluate_relation,
    find_relations,
    gen_baum_sweet,
    gen_rudin_shapiro,
    series_negate_z,
    series_substitute,
    verify_series_solution,
)
from mahlercert.solvers import (  # noqa: E402
    SolveBounds,
    solve_integrability,
    solve_multiplicative,
    solve_telescoper,
    telescoper_residual,
    verify_integrability,
)
from mahlercert.systems import MahlerSystem, baum_sweet_system, rudin_shapiro_system  # noqa: E402
from oracles import leibniz_det  # noqa: E402

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # script mode
    ACCEPTANCE_LINES = []

BS_CITE = "Baum-Sweet system: difference Galois group equals mu_4 SL_2(C) (published classification)"
RS_CITE = "Rudin-Shapiro system: difference Galois group equals GL_2(C) (published classification)"


def zero_matrix(n):
    return tuple(tuple(RatFun() for _ in range(n)) for _ in range(n))


def random_unit(rng, degree):
    """Rational f with f(0) = 1 and numerator/denominator degree <= degree."""
    num = Poly([1] + [rng.randint(-3, 3) for _ in range(rng.randint(0, degree))])
    den = Poly([1] + [rng.randint(-3, 3) for _ in range(rng.randint(0, degree))])
    return RatFun(num, den)


def random_ratfun(rng, degree=3):
    num = Poly([Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(rng.randint(1, degree + 1))])
    den = Poly([rng.randint(-4, 4) for _ in range(rng.randint(1, degree + 1))])
    if den.is_zero():
        den = Poly([1])
    return RatFun(num, den)


def random_constant_invertible(rng, n=2):
    while True:
        P = tuple(tuple(RatFun.coerce(rng.randint(-3, 3)) for _ in range(n)) for _ in range(n))
        if not leibniz_det(P).is_zero():
            return P


# -- criteria ---------------------------------------------------------------------


def criterion_1():
    A = evaluate("[[0,1],[1,-z]]")
    system = MahlerSystem(A, 2)
    assert system.det == RatFun.coerce(-1)
    cert = certify(system, sl_assumption(BS_CITE, n=2))
    assert cert.verdict == Verdict.HYPERTRANSCENDENTAL
    assert cert.branch == "monomial determinant"
    return "verdict Hypertranscendental, monomial determinant, det = -1"


def criterion_2():
    system = MahlerSystem(evaluate("(1/2)*[[1,1],[1/z,-1/z]]"), 2)
    assert system.det == RatFun.z_power(-1, Fraction(-1, 2))
    assert is_monomial(system.det)
    cert = certify(system, sl_assumption(RS_CITE, n=2))
    assert cert.verdict == Verdict.HYPERTRANSCENDENTAL
    assert cert.branch == "monomial determinant"
    return "verdict Hypertranscendental, det = -1/(2z) monomial"


def criterion_3_bs():
    bs = gen_baum_sweet(512)
    v = verify_series_solution(baum_sweet_system(), [bs, series_substitute(bs, 2)], 512)
    assert v >= 510, v
    return f"Baum-Sweet residual valuation {v} >= 510"


def criterion_3_rs():
    rs = gen_rudin_shapiro(512)
    v = verify_series_solution(rudin_shapiro_system(), [rs, series_negate_z(rs)], 512)
    assert v >= 510, v
    return f"Rudin-Shapiro residual valuation {v} >= 510"


def criterion_4():
    rng = random.Random(2024)
    res = classify_order1((1 + z() ** 2) / (1 + z()), 2)
    assert isinstance(res, Hyperalgebraic) and (res.c, res.m, res.f) == (1, 0, 1 + z())
    for _ in range(20):
        c = Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9))
        m = rng.randint(-6, 6)
        p = rng.choice([2, 3, 5])
        res = classify_order1(RatFun.z_power(m, c), p)
        assert isinstance(res, Hyperalgebraic) and (res.c, res.m, res.f) == (c, m, RatFun.coerce(1))
    a = 1 / (1 - z())
    res = classify_order1(a, 2, SolveBounds.default_for(a))
    assert isinstance(res, NotHyperalgebraicWithin) and res.bounds == SolveBounds.default_for(a)
    found = 0
    for i in range(100):
        p = rng.choice([2, 3])
        f = random_unit(rng, 3)
        a = RatFun.z_power(rng.randint(-3, 3), rng.randint(1, 5)) * mahler_substitute(f, p) / f
        if i % 2:
            a = a * random_unit(rng, 2) if rng.random() < 0.5 else a / (1 - rng.randint(2, 4) * z())
        bounds = SolveBounds.default_for(a)
        mult = solve_multiplicative(a, p, bounds)
        tele = solve_telescoper(theta_derive(a) / a, p, p, bounds)
        assert mult.found == tele.found, (str(a), p)
        found += mult.found
    return f"fixtures ok; criteria agree on 100 instances ({found} hyperalgebraic)"


def criterion_5():
    rng = random.Random(5)
    for _ in range(50):
        p = rng.choice([2, 3])
        f = random_ratfun(rng, 4)
        while f.is_zero():
            f = random_ratfun(rng, 4)
        m = rng.randint(-3, 3)
        a = RatFun.z_power(m) * mahler_substitute(f, p) / f
        b = theta_derive(a) / a
        res = solve_telescoper(b, p, p)
        assert res.found, (str(f), p, m)
        assert telescoper_residual(res.witness, b, p, p).is_zero()
    return "50 of 50 Found with zero residual"


def criterion_6():
    rng = random.Random(6)
    const = MahlerSystem(((2, 1), (1, 1)), 3)
    res = solve_integrability(const)
    assert res.found and res.witness == zero_matrix(2)
    diag = MahlerSystem(((z(), 0), (0, 1)), 2)
    res = solve_integrability(diag, traceless=False)
    expected = ((RatFun.coerce(1), RatFun()), (RatFun(), RatFun()))
    assert res.found and res.witness == expected and verify_integrability(diag, res.witness, False)
    assert not solve_integrability(baum_sweet_system(), traceless=False).found
    for _ in range(20):
        P = random_constant_invertible(rng)
        Pi = mat_inv(P)
        conj = MahlerSystem(mat_mul(mat_mul(P, diag.A), Pi), 2)
        assert verify_integrability(conj, mat_mul(mat_mul(P, expected), Pi), False)
        assert solve_integrability(conj).found
        bs_conj = MahlerSystem(mat_mul(mat_mul(P, baum_sweet_system().A), Pi), 2)
        assert not solve_integrability(bs_conj).found
    return "constant -> 0, diag(z,1) -> diag(1,0), BS not found, 20 conjugations equivariant"


def criterion_7():
    rng = random.Random(7)
    for i in range(200):
        p = (2, 3, 5)[i % 3]
        f = random_ratfun(rng, 4)
        assert theta_derive(mahler_substitute(f, p)) == p * mahler_substitute(theta_derive(f), p)
    return "200 exact equalities"


def criterion_8():
    g = TruncatedSeries.from_ratfun(1 / (1 - z()), 40)
    report = find_relations([g], 0, 1, 1, 40)
    assert [dict(r.terms) for r in report.relations] == [{(0,): Poly([1]), (1,): Poly([-1, 1])}]
    for rel in report.relations:
        assert evaluate_relation(rel, [g], 40).valuation() >= 40
    bs = gen_baum_sweet(400)
    assert find_relations([bs, series_substitute(bs, 2)], 1, 2, 8, 400).relations == ()
    bs, rs = gen_baum_sweet(600), gen_rudin_shapiro(600)
    for variant in (series_substitute(rs, 2), series_negate_z(rs)):
        quad = [bs, series_substitute(bs, 2), rs, variant]
        assert find_relations(quad, 1, 2, 6, 600).relations == ()
    return "(1-z)g - 1 found; BS pair and both BS+RS quadruples relation-free"


def criterion_9():
    rng = random.Random(9)
    for n in range(1, 5):
        for trial in range(6):
            coeffs = [random_ratfun(rng, 2) for _ in range(n + 1)]
            coeffs = [c if not c.is_zero() else RatFun.coerce(1) for c in coeffs]
            if trial % 2:
                coeffs[-1] = coeffs[0] * RatFun.z_power(rng.randint(-2, 2), rng.randint(1, 5))
            eq = ScalarMahlerEq(tuple(coeffs), rng.choice([2, 3]))
            det = companion_matrix(eq).det
            assert det == leibniz_det(companion_matrix(eq).A)
            ratio = coeffs[0] / coeffs[-1]
            assert det in (ratio, -ratio)
            assert is_monomial(det) == is_monomial(coeffs[-1] / coeffs[0])
    return "n = 1..4, determinant +-a_0/a_n, monomial test equivalent"


FIXTURES_10 = [
    JobSpec("certify", ("[[0,1],[1,-z]]",), {"p": 2}, BS_CITE),
    JobSpec("certify", ("(1/2)*[[1,1],[1/z,-1/z]]",), {"p": 2}, RS_CITE),
    JobSpec("certify-eq", ("1", "z", "1-z"), {"p": 2}, "hypothetical SL_2 containment"),
]


def criterion_10(job):
    t0 = time.perf_counter()
    one = render(run_job(job), "document")
    two = render(run_job(job), "document")
    assert one == two
    doc = json.loads(one)
    if job.command == "certify":
        system = MahlerSystem(evaluate(job.inputs[0]), 2)
    else:
        system = ScalarMahlerEq(tuple(evaluate(t) for t in job.inputs), 2)
    n = system.n if isinstance(system, MahlerSystem) else system.order
    assumption = sl_assumption(job.assumption, n=n)
    cert = certify(system, assumption) if isinstance(system, MahlerSystem) else certify_equation(system, assumption)
    assert cert.to_json() == json.dumps(doc["certificate"], indent=2, ensure_ascii=False)
    assert replay_certificate(cert, system, assumption)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0, elapsed
    return f"{job.command} {job.inputs[0]}: byte-identical, replay reproduces {doc['outcome']}"


# -- harness ----------------------------------------------------------------------------

CRITERIA = [
    ("01", "Baum-Sweet end-to-end", criterion_1, 1.0),
    ("02", "Rudin-Shapiro end-to-end", criterion_2, 1.0),
    ("03a", "Series residual (Baum-Sweet)", criterion_3_bs, 5.0),
    ("03b", "Series residual (Rudin-Shapiro)", criterion_3_rs, 5.0),
    ("04", "Order-one classifier suite", criterion_4, 30.0),
    ("05", "Telescoper exactness", criterion_5, 30.0),
    ("06", "Integrability solver", criterion_6, 60.0),
    ("07", "Commutation law", criterion_7, 5.0),
    ("08", "Relation falsifier controls", criterion_8, 300.0),
    ("09", "Companion determinant", criterion_9, 5.0),
]


def run_criterion(tag, title, fn, limit, *args):
    t0 = time.perf_counter()
    try:
        detail = fn(*args)
        error = None
    except AssertionError as exc:
        detail, error = f"assertion failed: {exc}", exc
    except Exception as exc:  # recorded as a failure line, then re-raised
        detail, error = f"{type(exc).__name__}: {exc}", exc
    elapsed = time.perf_counter() - t0
    ok = error is None and elapsed < limit
    if error is None and not ok:
        detail += f"; runtime {elapsed:.2f}s exceeds {limit:g}s"
    line = f"CRITERION {tag} {'PASS' if ok else 'FAIL'} [{elapsed:6.2f}s < {limit:g}s] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok, error, line


@pytest.mark.parametrize("tag,title,fn,limit", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_acceptance(tag, title, fn, limit):
    ok, error, line = run_criterion(tag, title, fn, limit)
    if error is not None:
        raise error
    assert ok, line


@pytest.mark.parametrize("job", FIXTURES_10, ids=["bs", "rs", "branch-b"])
def test_acceptance_determinism(job):
    ok, error, line = run_criterion(f"10-{job.command}-{job.inputs[0]}", "Determinism and replay", criterion_10, 1.0, job)
    if error is not None:
        raise error
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(*c)[0] for c in CRITERIA]
    results += [run_criterion(f"10-{j.command}", "Determinism and replay", criterion_10, 1.0, j)[0] for j in FIXTURES_10]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
