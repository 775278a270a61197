"""Manin symbols, Hecke action, eigensymbol extraction at level 37."""

import random
from fractions import Fraction

import pytest

from starkheegner.curves import ap_point_count, parse_curve
from starkheegner.modsym import (
    INF,
    ManinBasis,
    ModSymbol,
    NotIsolated,
    eigen_symbol,
    fricke_eigenvalue,
    hecke_apply,
    involution_matrix,
    manin_basis,
    sturm_bound,
)

N = 37
E37 = parse_curve("37a1")
HECKE = [(ell, ap_point_count(E37, ell)) for ell in (2, 3, 5, 7)]


@pytest.fixture(scope="module")
def basis():
    return manin_basis(N)


@pytest.fixture(scope="module")
def phi_plus(basis):
    return eigen_symbol(N, HECKE, +1, basis)


@pytest.fixture(scope="module")
def phi_minus(basis):
    return eigen_symbol(N, HECKE, -1, basis)


def test_symbol_count():
    assert manin_basis(37).n_symbols == 38
    assert manin_basis(1).n_symbols == 1


def test_sturm_bound():
    assert sturm_bound(37) == 7


def test_relations_annihilate_eigensymbol(basis, phi_plus):
    for row in basis.relation_rows():
        assert sum(coeff * phi_plus.values[i] for i, coeff in row.items()) == 0


def test_eigen_u37(phi_plus):
    up = hecke_apply(phi_plus, 37)
    assert up.values == [-v for v in phi_plus.values]  # alpha = -1


def test_eigen_t2(phi_plus, phi_minus):
    for phi in (phi_plus, phi_minus):
        t2 = hecke_apply(phi, 2)
        assert t2.values == [-2 * v for v in phi.values]


def test_hecke_commute(basis):
    # a random element of the relation kernel is a genuine symbol
    from starkheegner.modsym import _kernel_basis
    rng = random.Random(3)
    space = _kernel_basis(basis.relation_rows(), basis.n_symbols)
    coeffs = [Fraction(rng.randrange(-5, 6)) for _ in space]
    vals = [sum(c * v[j] for c, v in zip(coeffs, space))
            for j in range(basis.n_symbols)]
    phi = ModSymbol(basis, vals, 0)
    a = hecke_apply(hecke_apply(phi, 2), 3)
    b = hecke_apply(hecke_apply(phi, 3), 2)
    assert a.values == b.values


def test_plus_symbol_vanishes_at_zero_infty(phi_plus):
    # L(f, 1) = 0 for rank-one 37a1, so Phi+{0 -> infty} = 0 exactly
    assert phi_plus.evaluate_path((0, 1), INF) == 0


def test_integral_normalization(phi_plus, phi_minus):
    from math import gcd
    for phi in (phi_plus, phi_minus):
        g = 0
        for v in phi.values:
            assert v.denominator == 1
            g = gcd(g, int(v))
        assert g == 1
        assert next(v for v in phi.values if v != 0) > 0


def test_winf_eigenproperty(basis, phi_plus, phi_minus):
    perm = involution_matrix(basis)
    assert [phi_plus.values[i] for i in perm] == phi_plus.values
    assert [phi_minus.values[i] for i in perm] == [-v for v in phi_minus.values]


def test_path_additivity_and_invariance(phi_plus):
    rng = random.Random(4)
    pts = [(rng.randrange(-30, 30), rng.randrange(1, 30)) for _ in range(6)]
    x, y, z = pts[0], pts[1], pts[2]
    assert phi_plus.evaluate_path(x, x) == 0
    assert (phi_plus.evaluate_path(x, y) + phi_plus.evaluate_path(y, z)
            == phi_plus.evaluate_path(x, z))
    # Gamma_0(37)-invariance
    from starkheegner.modsym import _mobius
    g = (1, 0, 37, 1)
    for x in pts:
        for y in pts:
            assert phi_plus.evaluate_path(x, y) == \
                phi_plus.evaluate_path(_mobius(g, x), _mobius(g, y))


def test_fricke_is_plus_one_for_37a(phi_plus, phi_minus):
    # w_37 = -a_37 = +1
    assert fricke_eigenvalue(phi_plus) == 1
    assert fricke_eigenvalue(phi_minus) == 1


def test_not_isolated_without_hecke(basis):
    with pytest.raises(NotIsolated):
        eigen_symbol(N, [], +1, basis)


def test_dimension_checks(basis):
    # genus 2, 2 cusps: plus-space 3-dim, minus-space 2-dim before Hecke
    from starkheegner.modsym import _kernel_basis, _eigen_restrict
    n = basis.n_symbols
    space = _kernel_basis(basis.relation_rows(), n)
    assert len(space) == 5  # 2g + (#cusps - 1)
    perm = involution_matrix(basis)
    plus = _eigen_restrict(space, lambda v: [v[perm[i]] for i in range(n)], 1)
    minus = _eigen_restrict(space, lambda v: [v[perm[i]] for i in range(n)], -1)
    assert (len(plus), len(minus)) == (3, 2)
