"""Unit and property tests for truncated p-adic arithmetic."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from starkheegner.padics import (
    NoSquareRoot,
    PadicNum,
    PadicQuad,
    ZeroArgument,
    ZeroResidue,
    exp_small,
    frobenius_conj,
    iwasawa_log,
    parse_quad,
    sqrt_hensel,
    sqrt_hensel_quad,
    teichmuller,
)

P = 37
D = 5


def rand_unit(p=P, prec=8, rng=random):
    u = rng.randrange(1, p ** prec)
    while u % p == 0:
        u = rng.randrange(1, p ** prec)
    return PadicNum(p, 0, u, prec)


def rand_quad(p=P, prec=8, rng=random):
    return PadicQuad(PadicNum(p, 0, rng.randrange(p ** prec), prec),
                     PadicNum(p, 0, rng.randrange(p ** prec), prec), D)


# ---------------------------------------------------------------- basics

def test_from_rational_roundtrip():
    x = PadicNum.from_rational(Fraction(3, 7), P, 6)
    assert (x * 7).residue(6) == 3


def test_precision_add_is_min():
    a = PadicNum(P, 0, 5, 6)
    b = PadicNum(P, 0, 7, 3)
    assert (a + b).prec == 3


def test_precision_mul_through_valuations():
    a = PadicNum(P, 2, 5, 6)   # rel prec 4
    b = PadicNum(P, 1, 7, 3)   # rel prec 2
    c = a * b
    assert c.valuation() == 3 and c.prec == 5  # val 3 + rel 2


def test_cancellation_detected():
    a = PadicNum(P, 0, 1 + P ** 2, 4)
    b = PadicNum(P, 0, 1, 4)
    d = a - b
    assert d.valuation() == 2


ints = st.integers(min_value=-10 ** 6, max_value=10 ** 6)


@given(ints, ints, ints)
@settings(max_examples=100, deadline=None)
def test_ring_axioms_match_integers(x, y, z):
    prec = 8
    X, Y, Z = (PadicNum.from_int(t, P, prec) for t in (x, y, z))
    assert (X + Y) * Z == PadicNum.from_int((x + y) * z, P, prec)
    assert X * (Y + Z) == X * Y + X * Z
    assert X * Y == Y * X
    assert (X + Y) + Z == X + (Y + Z)


@given(ints, ints, ints, ints)
@settings(max_examples=60, deadline=None)
def test_quad_ring_axioms(a1, b1, a2, b2):
    prec = 7
    X = PadicQuad.from_rationals(a1, b1, D, P, prec)
    Y = PadicQuad.from_rationals(a2, b2, D, P, prec)
    # norm is multiplicative
    assert (X * Y).norm() == X.norm() * Y.norm()
    # conjugation is a ring homomorphism
    assert (X * Y).conj() == X.conj() * Y.conj()
    assert (X + Y).conj() == X.conj() + Y.conj()


def test_division_inverse():
    x = PadicQuad.from_rationals(3, Fraction(2, 5), D, P, 8)
    one = PadicQuad.one(D, P, 8)
    assert x * x.inverse() == one


# ------------------------------------------------------------- sqrt

def test_sqrt_nonresidue_rejected():
    # (5|37) = -1 by quadratic reciprocity
    with pytest.raises(NoSquareRoot):
        sqrt_hensel(PadicNum.from_int(5, 37, 6))


def test_sqrt_of_D_in_quadratic_extension():
    x = PadicQuad.from_rationals(5, 0, D, P, 6)
    r = sqrt_hensel_quad(x)
    assert r == PadicQuad.sqrtD(D, P, 6)
    assert r * r == x


def test_sqrt_tiebreak_smallest_residue():
    r = sqrt_hensel(PadicNum.from_int(4, 7, 3))
    assert r.residue(3) == 2  # not 341


def test_sqrt_squares_back():
    rng = random.Random(1)
    for _ in range(25):
        x = rand_unit(rng=rng)
        sq = x * x
        r = sqrt_hensel(sq)
        assert r * r == sq
    for _ in range(25):
        x = rand_quad(rng=rng)
        if x.is_zero():
            continue
        sq = x * x
        r = sqrt_hensel_quad(sq)
        assert r * r == sq


def test_sqrt_odd_valuation():
    with pytest.raises(NoSquareRoot):
        sqrt_hensel(PadicNum(P, 1, 2, 5))


# ------------------------------------------------------------- teichmuller

def test_teichmuller_identity():
    assert teichmuller(1, P, 6).residue(6) == 1


def test_teichmuller_frozen_example():
    # Hensel-lift oracle: x <- x^p stabilizes at 30 mod 49; 30^3 = 1 mod 49
    w = teichmuller(2, 7, 2)
    assert w.residue(2) == 30
    assert pow(30, 3, 49) == 1


def test_teichmuller_root_of_unity_and_multiplicative():
    rng = random.Random(2)
    for _ in range(20):
        r = rng.randrange(1, P)
        s = rng.randrange(1, P)
        wr, ws = teichmuller(r, P, 6), teichmuller(s, P, 6)
        assert wr ** (P - 1) == PadicNum.from_int(1, P, 6)
        assert wr * ws == teichmuller(r * s % P, P, 6)


def test_teichmuller_zero_residue():
    with pytest.raises(ZeroResidue):
        teichmuller(P, P, 4)


# ------------------------------------------------------------- log / exp

def test_log_series_frozen():
    p = 7
    x = PadicNum.from_int(1 + p, p, 4)
    expect = PadicNum.from_rational(Fraction(p) - Fraction(p * p, 2) + Fraction(p ** 3, 3), p, 4)
    assert iwasawa_log(x) == expect


def test_log_kills_torsion_and_p():
    assert iwasawa_log(teichmuller(5, P, 8)).is_zero()
    assert iwasawa_log(PadicNum.from_int(P, P, 8)).is_zero()


def test_log_additive_on_products():
    rng = random.Random(3)
    for _ in range(100):
        u, v = rand_unit(prec=5, rng=rng), rand_unit(prec=5, rng=rng)
        lhs = iwasawa_log(u * v)
        rhs = iwasawa_log(u) + iwasawa_log(v)
        assert lhs == rhs


def test_log_additive_quadratic():
    rng = random.Random(4)
    for _ in range(30):
        u, v = rand_quad(rng=rng), rand_quad(rng=rng)
        if u.is_zero() or v.is_zero() or u.valuation() or v.valuation():
            continue
        assert iwasawa_log(u * v) == iwasawa_log(u) + iwasawa_log(v)


def test_exp_log_roundtrip():
    rng = random.Random(5)
    for _ in range(20):
        x = PadicQuad(PadicNum(P, 1, rng.randrange(1, P ** 5), 6),
                      PadicNum(P, 1, rng.randrange(1, P ** 5), 6), D)
        u = exp_small(x)
        assert iwasawa_log(u) == x


# ------------------------------------------------------------- frobenius

def test_frobenius_fixed_field_and_involution():
    rng = random.Random(6)
    for _ in range(20):
        x = rand_quad(rng=rng)
        assert frobenius_conj(frobenius_conj(x)) == x
        n = x * frobenius_conj(x)
        assert n.b.is_zero()
    y = PadicQuad.from_rationals(11, 0, D, P, 6)
    assert frobenius_conj(y) == y


def test_frobenius_commutes_with_log():
    rng = random.Random(7)
    for _ in range(15):
        x = rand_quad(rng=rng)
        if x.is_zero() or x.valuation() != 0:
            continue
        assert iwasawa_log(frobenius_conj(x)) == frobenius_conj(iwasawa_log(x))


# ------------------------------------------------------------- text form

def test_parse_roundtrip():
    s = "12 + 30*sqrt(5) + O(37^4)"
    x = parse_quad(s, D, P)
    assert x.residues(4) == (12, 30)
    assert x.prec == 4
