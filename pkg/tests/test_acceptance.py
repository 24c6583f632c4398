"""One test per acceptance criterion; each prints a PASS/FAIL line in the terminal summary."""

import random
import time

import numpy as np
import pytest

import conftest
from hlqg import hopf, ncalg, parse
from hlqg.heisen import build_irrep, heat_compare, refinement_ladder, weyl_residual
from hlqg.hlrep import (
    build_invertible_gamma,
    check_relations,
    check_shift_identity,
    check_star_sum_identity,
    check_sumt_expansion,
    classical_matrix,
    classical_point,
    tensor,
)
from hlqg.kernels import f_gen_smeared, gw_trials
from hlqg.parser import ParseError
from hlqg.slpoly import (
    DEFAULT_CONVENTIONS,
    build_op,
    calibrate_conventions,
    l2u_derivative_check,
    random_coordpoly,
    restrict_to_borel,
    verify_determinant_identity,
)
from hlqg.zcalc import f_fun, f_zero_set, roundtrip_error, strongly_commute


def record(n, ok: bool, what: str, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'} [{n}] {what}"
    if detail:
        line += f" ({detail})"
    conftest.ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_01_hopf_battery():
    t0 = time.perf_counter()
    rep = hopf.check_hopf_axioms()
    dt = time.perf_counter() - t0
    groups = rep.groups()
    ok = rep.passed and set(groups) == set(hopf.GROUPS) and dt <= 10
    record(1, ok, "Hopf axiom battery, exact",
           f"{len(rep.checks)} checks in {len(groups)} groups, {dt:.1f}s")


def test_02_confluence():
    rng = random.Random(500)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(500):
        w = ncalg.random_word(rng, 4)
        a = ncalg.normal_form(w, "left")
        b = ncalg.rewrite_normal_form(w, "leftmost")
        c = ncalg.rewrite_normal_form(w, "rightmost")
        bad += not (a == b == c)
    det = ncalg.determinant_element()
    central = ncalg.is_central(det) and ncalg.is_central(ncalg.adjoint(det))
    dt = time.perf_counter() - t0
    record(2, bad == 0 and central and dt <= 30, "rewriting confluence on 500 words, determinant central",
           f"{bad} mismatches, {dt:.1f}s")


def test_03_determinant_identity():
    rows = calibrate_conventions()
    passing = [r.conventions for r in rows if r.passed]
    calibrated = passing[0] if len(passing) == 1 else None
    pos = calibrated is not None and verify_determinant_identity(calibrated).passed
    neg = verify_determinant_identity(DEFAULT_CONVENTIONS,
                                      alpha_conventions=DEFAULT_CONVENTIONS.flipped("l_sign"))
    record(3, pos and not neg.passed and calibrated == DEFAULT_CONVENTIONS,
           "Op determinant identity under calibrated conventions, flipped toggle fails")


def test_04_borel_restriction():
    rng = random.Random(4)
    op, op0 = build_op("beta"), build_op("beta0")
    ok = restrict_to_borel(op) == op0
    for _ in range(20):
        f = random_coordpoly(rng)
        ok &= restrict_to_borel(op(f)) == op0(restrict_to_borel(f))
    record(4, ok, "Borel restriction of Op(beta) on 20 random polynomials")


def test_05_heat_smearing():
    r = build_irrep(2.0, 0.0, 40)
    t0 = time.perf_counter()
    errs, ladders = [], []
    for t in (0.25, 0.5, 1.0):
        errs.append(heat_compare(r, t, P=20))
        ladders.append(refinement_ladder(r, t, [(10, 8), (20, 16), (40, 32)], P=20))
    dt = time.perf_counter() - t0
    decreasing = all(all(b < a for a, b in zip(l, l[1:])) for l in ladders)
    record(5, max(errs) <= 1e-3 and decreasing and dt <= 60, "heat smearing vs direct exponential",
           f"max rel err {max(errs):.1e}, {dt:.1f}s")


def test_06_weyl_phase():
    r = build_irrep(2.0, 0.0, 32)
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(30):
        z, w = rng.random(2) * np.exp(2j * np.pi * rng.random(2))
        worst = max(worst, weyl_residual(r, z, w))
    record(6, worst <= 1e-8, "Weyl relation phase, |z| <= 1", f"max residual {worst:.1e}")


def test_07_tensor_closure():
    q = build_invertible_gamma(1.0, 1.0, 16, 8)
    rep = check_relations(tensor(q, q))
    det = rep.by_name()["cb=ad-1"]
    g = (2, 1 + 1j, 1, (2 + 1j) / 2)
    h = (1, -0.5, 3j, 1 - 1.5j)
    cl = classical_matrix(tensor(classical_point(*g), classical_point(*h)))
    classical = np.array_equal(cl, np.array(g).reshape(2, 2) @ np.array(h).reshape(2, 2))
    record(7, rep.passed and det.residual <= 1e-3 and classical, "tensor product closure",
           f"max residual {rep.max_residual():.1e}")


def test_08_shift_identity():
    q = build_invertible_gamma(1.0, 1.0, 24)
    res = check_shift_identity(tensor(q, q), 0.5, P=12)
    record(8, res.residual <= 1e-3, "shift identity at |z| = 0.5", f"residual {res.residual:.1e}")


def test_09_star_sum_and_expansion():
    q = build_invertible_gamma(1.0, 1.0, 24, 12)
    star = check_star_sum_identity(q)
    sumt = check_sumt_expansion(q, "exact")
    record(9, star <= 1e-10 and sumt <= 1e-6, "star-sum identity and four-term expansion",
           f"{star:.1e}, {sumt:.1e}")


@pytest.mark.xfail(strict=True, reason="the mixed-order last term is not an identity")
def test_09_expansion_mixed_order():
    q = build_invertible_gamma(1.0, 1.0, 24, 12)
    res = check_sumt_expansion(q, "literal")
    conftest.ACCEPTANCE_LINES.append(
        f"{'PASS' if res <= 1e-6 else 'FAIL'} [9] four-term expansion, mixed-order last term "
        f"(residual {res:.2f}; expected to fail)")
    assert res <= 1e-6


def test_10_asa1():
    points = [
        (0.3, 0.5, 0.2j), (1 + 1j, 1.0, -0.5), (0.0, 1.5 - 0.5j, 1.0),
        (-0.7j, 0.2, 0.4 + 0.1j), (2.0, 0.8j, 0.0),
    ]
    res = [f_gen_smeared(a, g, d, 1.0) for a, g, d in points]
    worst = max(r.rel_error for r in res)
    mono = all(all(b < a for a, b in zip(r.ladder, r.ladder[1:])) for r in res)
    record(10, worst <= 1e-4 and mono, "closed-form f vs double quadrature at 5 points",
           f"max rel err {worst:.1e}")


def test_11_zcalc():
    rng = np.random.default_rng(11)
    rt = max(roundtrip_error(rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))) for _ in range(10))
    U, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    N1 = U @ np.diag(rng.normal(size=4) + 1j) @ U.conj().T
    N2 = U @ np.diag(rng.normal(size=4) - 2j) @ U.conj().T
    L = np.diag(np.sqrt(np.arange(1, 4.0)), -1)
    M = L + np.eye(4)
    positive = strongly_commute(N1, N2) and strongly_commute(N1, N1 @ N1)
    negative = not strongly_commute(L, L.T) and not strongly_commute(M, L @ L - 2 * L)
    corners = f_fun(1, 0) == 0 and f_fun(0, 1) == 0 and f_fun(0, 0) == 1 and f_fun(1, 1) == 1
    zeros = f_zero_set() == [(0.0, 1.0), (1.0, 0.0)]
    record(11, rt <= 1e-10 and positive and negative and corners and zeros, "z-transform calculus",
           f"round-trip {rt:.1e}")


def test_12_gw():
    trials = gw_trials(100, seed=12)
    ok = all(t.holds and t.det_lhs == 1 and t.det_rhs == 1 for t in trials)
    record(12, ok, "Weyl element shear factorization over 100 random triples, exact")


def test_13_l2u():
    hs = [4e-3, 2e-3, 1e-3]
    res = [l2u_derivative_check(1.0, h=h).residual for h in hs]
    slope = float(np.polyfit(np.log(hs), np.log(res), 1)[0])
    record(13, res[-1] <= 1e-5 and abs(slope - 2) <= 0.3, "representation derivative consistency",
           f"residual {res[-1]:.1e}, slope {slope:.2f}")


def test_14_parser():
    rng = random.Random(14)
    bad = 0
    for _ in range(1000):
        p = ncalg.normal_form(ncalg.random_poly(rng))
        bad += parse(p.to_str()) != p
    examples = (
        parse("a*d - b*c - 1").is_zero()
        and parse("a'*a - a*a' - s*c'*c").is_zero()
    )
    try:
        parse("((")
        col = None
    except ParseError as exc:
        col = exc.column
    record(14, bad == 0 and examples and col == 2, "parser round-trip on 1000 forms and grammar examples",
           f"{bad} mismatches")
