import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gamma as Gamma

from orbit_lvalues.characters import unit_group
from orbit_lvalues.lvalue import (AfeConfig, OracleBoundError, afe_family, central_value_afe,
                                  central_value_hurwitz, central_value_sq_afe, gauss_sum,
                                  hurwitz_family, hurwitz_zeta, kernel_U, kernel_U_contour,
                                  kernel_V, kernel_V_bessel, kernel_V_bound, root_number, sq_family)


def mp_U(x, iota):
    a = iota / 2 + 0.25
    return float(mpmath.gammainc(a, math.pi * x * x, mpmath.inf, regularized=True))


@pytest.mark.parametrize("iota", [0, 1])
@pytest.mark.parametrize("x", [1e-3, 0.1, 0.5, 1.0, 2.0, 3.5])
def test_kernel_U_against_mpmath(x, iota):
    assert kernel_U(x, iota) == pytest.approx(mp_U(x, iota), abs=1e-14, rel=1e-12)
    assert kernel_U_contour(x, iota) == pytest.approx(mp_U(x, iota), abs=1e-12)


@pytest.mark.parametrize("iota", [0, 1])
@pytest.mark.parametrize("x", [1e-4, 0.01, 0.1, 0.3, 1.0, 2.0])
def test_kernel_V_contour_vs_bessel(x, iota):
    assert kernel_V(x, iota) == pytest.approx(kernel_V_bessel(x, iota), abs=1e-11)


def test_kernel_V_against_mpmath_mellin():
    # V(x) = (1/2 pi i) int G(s)^2 / G(1/2)^2 (pi x)^-s ds/s, G(s) = Gamma(s/2 + a)
    for iota in (0, 1):
        a = iota / 2 + 0.25
        for x in (0.05, 0.7):
            f = lambda t: (mpmath.gamma((2 + 1j * t) / 2 + a) ** 2 / mpmath.gamma(a) ** 2
                           * (math.pi * x) ** (-(2 + 1j * t)) / (2 + 1j * t))
            val = mpmath.quad(f, [-mpmath.inf, 0, mpmath.inf]) / (2 * math.pi)
            assert kernel_V(x, iota) == pytest.approx(float(mpmath.re(val)), abs=1e-10)


def test_kernel_small_argument_behaviour():
    # odd characters: U and V are within 1e-6 and 1e-4 of 1 at x = 1e-6
    assert abs(kernel_U(1e-6, 1) - 1) < 1e-6
    assert abs(kernel_V(1e-6, 1) - 1) < 1e-4
    # even characters approach 1 only like a power of x; check the leading term
    x = 1e-6
    lead = (math.pi * x * x) ** 0.25 / Gamma(1.25)
    assert 1 - kernel_U(x, 0) == pytest.approx(lead, rel=1e-5)
    assert 1e-3 < 1 - kernel_V(x, 0) < 0.05
    assert 1 - kernel_V(1e-10, 0) < 1 - kernel_V(1e-6, 0)


@pytest.mark.parametrize("iota", [0, 1])
def test_kernel_decay_and_bound(iota):
    for x in (1.0, 2.0, 4.0, 6.0):
        v = kernel_V_bessel(x, iota)
        assert 0 < v <= kernel_V_bound(x, iota)
        # the contour route is accurate in absolute terms only
        assert abs(kernel_V(x, iota) - v) < 1e-13
    assert kernel_U(3.0, iota) < 1e-10
    xs = np.linspace(0.01, 3, 40)
    assert np.all(np.diff(kernel_U(xs, iota)) < 0)
    assert np.all(np.diff(kernel_V(xs, iota)) < 0)
    with pytest.raises(ValueError):
        kernel_U(-1.0, iota)


def test_hurwitz_against_mpmath():
    xs = np.array([0.01, 0.2, 0.5, 0.99, 1.0, 3.7])
    vals, errs = hurwitz_zeta(0.5, xs)
    for x, v, e in zip(xs, vals, errs):
        ref = float(mpmath.zeta(0.5, x))
        assert abs(v - ref) < 1e-13 * max(1, abs(ref))
        assert e < 1e-12
    with pytest.raises(ValueError):
        hurwitz_zeta(1.0, xs)


def mp_L_half(chi):
    q = chi.q
    vals = [complex(chi.values(np.array([n]))[0]) for n in range(q)]
    return complex(mpmath.dirichlet(0.5, vals))


@pytest.mark.parametrize("gamma", [1, 2, 5, 13, 17])
def test_central_value_against_mpmath(gamma):
    chi = unit_group(3, 3).character(gamma)
    ref = mp_L_half(chi)
    assert abs(central_value_hurwitz(chi).value - ref) < 1e-12
    assert abs(central_value_afe(chi).value - ref) < 1e-11


def test_frozen_central_value_q27():
    # independent mpmath evaluation of L(1/2, chi_1 mod 27)
    chi = unit_group(3, 3).character(1)
    ref = complex(2.0711048708276, 0.89338743519441)
    assert abs(central_value_afe(chi).value - ref) < 1e-11


def test_root_number_unit_modulus():
    G = unit_group(5, 3)
    for g in (1, 2, 3, 7, 99):
        chi = G.character(g)
        assert abs(abs(root_number(chi)) - 1) < 1e-12
        assert abs(gauss_sum(chi.conj()) - chi.values(np.array([-1]))[0] * np.conj(gauss_sum(chi))) < 1e-9


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([(3, 4), (5, 3), (7, 2)]), st.integers(0, 10**6),
       st.sampled_from([0.05, 0.1, 0.2, 0.5]))
def test_afe_independent_of_lambda(pk, gi, lam):
    G = unit_group(*pk)
    prim = G.primitive_gammas()
    chi = G.character(int(prim[gi % prim.size]))
    a = central_value_afe(chi, AfeConfig(lam=lam))
    b = central_value_hurwitz(chi)
    assert abs(a.value - b.value) < 1e-10
    assert a.abs_error_bound < 1e-9
    # L(1/2, conj chi) = conj L(1/2, chi)
    c = central_value_afe(chi.conj(), AfeConfig(lam=lam))
    assert abs(c.value - a.value.conjugate()) < 1e-10


def test_dual_term_switch():
    chi = unit_group(3, 4).character(1)
    full = central_value_afe(chi)
    main = central_value_afe(chi, AfeConfig(dual_term=False))
    assert abs(full.value - main.value) <= main.abs_error_bound


def test_sq_afe_matches_abs_square():
    G = unit_group(3, 4)
    for g in (1, 2, 5):
        chi = G.character(g)
        L = central_value_afe(chi).value
        s = central_value_sq_afe(chi)
        assert abs(s.value.real - abs(L) ** 2) < 1e-10
        assert s.value.real >= 0


@pytest.mark.parametrize("p,k", [(3, 5), (5, 3), (7, 3)])
def test_family_matches_single_and_oracle(p, k):
    G = unit_group(p, k)
    tab = afe_family(G, with_sq=True)
    prim = G.primitive_gammas()
    assert np.isnan(tab.values[[g for g in range(G.phi) if g not in set(prim.tolist())]]).all()
    ref, _ = hurwitz_family(G, prim)
    assert np.max(np.abs(tab.values[prim] - ref)) < 1e-10
    assert np.max(np.abs(tab.sq[prim] - np.abs(ref) ** 2)) < 1e-9
    for g in prim[:3]:
        assert abs(tab.value(int(g)) - central_value_afe(G.character(int(g))).value) < 1e-11


def test_family_deterministic_across_workers():
    G = unit_group(3, 9)
    a = afe_family(G, workers=1)
    b = afe_family(G, workers=4)
    assert np.array_equal(a.values, b.values, equal_nan=True)
    s1, _ = sq_family(unit_group(3, 6), workers=1)
    s2, _ = sq_family(unit_group(3, 6), workers=3)
    assert np.array_equal(s1, s2, equal_nan=True)


def test_oracle_bound_and_primitivity():
    with pytest.raises(OracleBoundError):
        central_value_hurwitz(unit_group(3, 9).character(1), oracle_bound=1000)
    with pytest.raises(ValueError):
        central_value_hurwitz(unit_group(3, 3).character(3))
    with pytest.raises(ValueError):
        central_value_afe(unit_group(3, 3).character(3))
    with pytest.raises(ValueError):
        AfeConfig(lam=0)
