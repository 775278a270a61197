"""Curve invariants, reduction data, Tate parametrisation and logs."""

import random
from fractions import Fraction
from math import isqrt

import pytest

from starkheegner.curves import (
    BadReduction,
    CurveQ,
    LocalCurve,
    NotMultiplicative,
    PointOps,
    SingularCurve,
    ap_point_count,
    atkin_lehner_sign_local,
    curve_invariants,
    j_of_q,
    j_series_coeffs,
    parse_curve,
    reduction_at_p,
    tate_data,
    tate_period,
)
from starkheegner.padics import PadicNum, PadicQuad, frobenius_conj, iwasawa_log

P, D = 37, 5
E37 = parse_curve("37a1")


def test_invariants_37a1():
    C = E37
    assert (C.b2, C.b4, C.b6) == (0, -2, 1)
    assert (C.c4, C.c6, C.disc) == (48, -216, 37)
    assert C.j == Fraction(110592, 37)


def test_singular_rejected():
    with pytest.raises(SingularCurve):
        curve_invariants(0, 0, 0, 0, 0)


def test_j_invariant_under_unimodular_shift():
    # (r, s, t) = (1, 0, 0): x -> x + 1
    C = E37
    a1, a2, a3, a4, a6 = C.ainvs()
    r = 1
    C2 = CurveQ(a1, a2 + 3 * r, a3 + a1 * r, a4 + 2 * a2 * r + 3 * r * r - a1 * a3,
                a6 + a2 * r * r + a4 * r + r ** 3 - a3 * (a3 + a1 * r) + a3 * a3)
    # simpler: shift x -> x + r in the Weierstrass equation directly
    # y^2 + a1xy + a3y = (x+1)^3 + a2(x+1)^2 + a4(x+1) + a6
    C2 = CurveQ(a1, a2 + 3, a3, a4 + 2 * a2 + 3, a6 + a2 + a4 + 1)
    assert C2.j == C.j


def test_ap_frozen_and_hasse():
    assert ap_point_count(E37, 2) == -2
    assert ap_point_count(E37, 3) == -3
    for ell in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 41, 43, 47, 53, 59, 61,
                67, 71, 73, 79, 83, 89, 97]:
        a = ap_point_count(E37, ell)
        assert a * a <= 4 * ell


def test_ap_bad_reduction_raises():
    with pytest.raises(BadReduction):
        ap_point_count(E37, 37)


def test_reduction_37a1():
    assert reduction_at_p(E37, 37) == ("nonsplit", -1)
    with pytest.raises(NotMultiplicative):
        reduction_at_p(E37, 2)
    # additive example: y^2 = x^3 + p has val_p(c4) > 0
    C = CurveQ(0, 0, 0, 0, 37)
    with pytest.raises(NotMultiplicative):
        reduction_at_p(C, 37)


def test_atkin_lehner_37a1():
    _, alpha = reduction_at_p(E37, 37)
    assert atkin_lehner_sign_local(alpha) == 1  # w_37 = -alpha = +1


def test_j_series_starts_correctly():
    c = j_series_coeffs(4)
    assert c[0] == 744 and c[1] == 196884 and c[2] == 21493760


def test_tate_period_valuation_and_consistency():
    q = tate_period(E37, 37, 6)
    assert q.valuation() == 1
    # independent series-evaluation oracle
    jq = j_of_q(q, 6)
    assert jq == PadicNum.from_rational(E37.j, 37, 5)


def test_tate_period_minimal_precision():
    q = tate_period(E37, 37, 1)
    assert q.valuation() == 1


@pytest.fixture(scope="module")
def local():
    return LocalCurve(E37, P, D, prec=8)


def rand_u(rng, prec=8):
    # random unit of K_p
    while True:
        a = rng.randrange(P ** prec)
        b = rng.randrange(P ** prec)
        if (a % P, b % P) != (0, 0) and (a % P, b % P) != (1, 0):
            return PadicQuad.from_rationals(a, b, D, P, prec)


def test_uniformize_lands_on_curve(local):
    rng = random.Random(11)
    for _ in range(10):
        u = rand_u(rng)
        pt = local.uniformize(u)
        assert pt is not None
        assert local.E.is_on_curve(pt, tol=5)


def test_uniformize_kernel_and_periodicity(local):
    q = local.tate.q
    uq = PadicQuad.from_num(q, D)
    assert local.uniformize(uq) is None  # u = q^1 -> O
    rng = random.Random(12)
    u = rand_u(rng)
    P1 = local.uniformize(u)
    P2 = local.uniformize(u * uq)
    assert (P1[0] - P2[0]).is_zero() or (P1[0] - P2[0]).valuation() >= 5
    assert (P1[1] - P2[1]).is_zero() or (P1[1] - P2[1]).valuation() >= 5


def test_uniformize_is_homomorphism(local):
    rng = random.Random(13)
    for _ in range(6):
        u, v = rand_u(rng), rand_u(rng)
        lhs = local.uniformize(u * v)
        rhs = local.E.add(local.uniformize(u), local.uniformize(v))
        if lhs is None or rhs is None:
            assert lhs is None and rhs is None
            continue
        assert (lhs[0] - rhs[0]).is_zero() or (lhs[0] - rhs[0]).valuation() >= 4
        assert (lhs[1] - rhs[1]).is_zero() or (lhs[1] - rhs[1]).valuation() >= 4


def test_frobenius_equivariance(local):
    rng = random.Random(14)
    u = rand_u(rng)
    x, y = local.uniformize(u)
    assert local.E.is_on_curve((frobenius_conj(x), frobenius_conj(y)), tol=5)


def test_elliptic_log_identity_and_homomorphism(local):
    assert local.elliptic_log(None).is_zero()
    rng = random.Random(15)
    u = rand_u(rng)
    pt = local.uniformize(u)
    l1 = local.elliptic_log(pt)
    l2 = local.elliptic_log(local.E.mul(2, pt))
    diff = l2 - 2 * l1
    assert diff.is_zero() or diff.valuation() >= 5


def test_elliptic_log_two_methods_agree(local):
    # formal-group route vs the L(q) = 0 branch of log(u): mutual oracles
    rng = random.Random(16)
    for _ in range(50):
        u = rand_u(rng, prec=7)
        pt = local.uniformize(u)
        lf = local.elliptic_log(pt)
        lb = local.log_of_u(u)
        d = lf - lb
        assert d.is_zero() or d.valuation() >= 5, (u, lf, lb)


def test_ap_matches_spec_values_for_37a():
    # eigenvalues used later by the modular symbol layer
    assert [ap_point_count(E37, ell) for ell in (2, 3, 5, 7)] == [-2, -3, -2, -1]
