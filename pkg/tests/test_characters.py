import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orbit_lvalues import characters as ch
from orbit_lvalues.characters import (DirichletCharacter, UnitGroup, conductor, conductor_distance,
                                      evaluate, find_generator, minimal_induction_modulus,
                                      postnikov_eval, postnikov_eval_unit, postnikov_param, unit_group)
from orbit_lvalues.cyclo import CycloElement, cyclotomic_coeffs, reduce_counts, root_of_unity

small = st.sampled_from([(3, 1), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2), (11, 2)])


def test_frozen_generators():
    assert find_generator(3) == 2
    assert find_generator(5) == 2
    assert find_generator(7) == 3
    # 14 is a primitive root mod 29 but 14^28 = 1 mod 29^2, so it must be skipped
    assert pow(14, 28, 29**2) == 1
    assert find_generator(29) != 14


@pytest.mark.parametrize("p,k", [(3, 1), (3, 5), (5, 3), (7, 3), (11, 2)])
def test_discrete_log_table(p, k):
    G = unit_group(p, k)
    units = np.array([n for n in range(1, G.q) if n % p])
    assert np.all(G.powers[G.ind[units]] == units)
    assert G.index(p) == -1
    assert G.index(G.q - 1) == G.phi // 2 == G.ind_minus_one
    assert not G.ind.flags.writeable


@settings(max_examples=60)
@given(small, st.integers(0, 10**6), st.integers(1, 10**6), st.integers(1, 10**6))
def test_multiplicative_and_periodic(pk, gamma, m, n):
    G = unit_group(*pk)
    chi = G.character(gamma)
    v = complex(evaluate(chi, m * n))
    w = complex(evaluate(chi, m)) * complex(evaluate(chi, n))
    assert abs(v - w) < 1e-12
    assert evaluate(chi, n) == evaluate(chi, n + G.q)
    if n % G.p == 0:
        assert evaluate(chi, n).is_zero


@settings(max_examples=40)
@given(small, st.integers(0, 10**6))
def test_parity_and_conjugate(pk, gamma):
    G = unit_group(*pk)
    chi = G.character(gamma)
    assert complex(evaluate(chi, -1)) == pytest.approx((-1) ** chi.iota)
    assert (chi * chi.conj()).gamma == 0
    assert chi.conj().iota == chi.iota


def test_character_values_exact_phase():
    G = unit_group(3, 2)
    chi = G.character(1)
    assert evaluate(chi, 2).phase == Fraction(1, 6)
    assert evaluate(chi, 3).phase is None
    assert abs(chi.values(np.array([2]))[0] - root_of_unity(1, 6)) < 1e-15


@pytest.mark.parametrize("p,k", [(3, 1), (3, 2), (3, 4), (5, 2), (5, 3), (7, 2)])
def test_primitive_count(p, k):
    G = unit_group(p, k)
    prim = G.primitive_gammas()
    expected = G.phi - (G.phi // p if k > 1 else 1)
    assert prim.size == expected
    assert all(minimal_induction_modulus(G.character(int(g))) == G.q for g in prim)


@pytest.mark.parametrize("p,k", [(3, 4), (5, 3), (7, 2)])
def test_conductor_matches_bruteforce(p, k):
    G = unit_group(p, k)
    for g in range(G.phi):
        chi = G.character(g)
        assert conductor(chi) == minimal_induction_modulus(chi)
    assert conductor(G.character(0)) == 1


@pytest.mark.parametrize("p,k", [(3, 4), (5, 3), (7, 3)])
def test_postnikov_matches_table(p, k):
    G = unit_group(p, k)
    for g in (1, 2, p + 1, G.phi - 1):
        chi = G.character(g)
        par = postnikov_param(chi)
        assert par.primitive == chi.is_primitive()
        for t in range(0, p ** (k - 1), max(1, p ** (k - 1) // 13)):
            x = (1 + p * t) % G.q
            assert postnikov_eval(par, t) == evaluate(chi, x)
            assert postnikov_eval_unit(par, x) == evaluate(chi, x)
    with pytest.raises(ValueError):
        postnikov_eval_unit(postnikov_param(G.character(1)), 2)


def test_conductor_distance():
    G = unit_group(3, 5)
    a, b = G.character(1), G.character(1 + 2 * 27)
    assert conductor_distance(a, a) == 1
    assert conductor_distance(a, b) == conductor(G.character(2 * 27))
    for g1 in range(1, 30, 7):
        for g2 in range(1, 30, 5):
            c1, c2 = G.character(g1), G.character(g2)
            d = conductor_distance(c1, c2)
            assert d == conductor_distance(c2, c1)
            if g1 % 2 == g2 % 2:
                # same component on the (p-1)-torsion: the distance is the full conductor
                assert d == conductor(c1 * c2.conj()) or (c1 * c2.conj()).gamma == 0
    with pytest.raises(ValueError):
        conductor_distance(a, unit_group(3, 4).character(1))


def test_unit_group_cache_roundtrip(tmp_path):
    G1 = UnitGroup(5, 3, tmp_path)
    path = ch.cache_path(tmp_path, 5, 3, G1.g)
    assert path.exists()
    G2 = UnitGroup(5, 3, tmp_path)
    assert np.array_equal(G1.ind, G2.ind) and np.array_equal(G1.powers, G2.powers)
    assert G1 == G2 and hash(G1) == hash(G2)


def test_stale_cache_is_rebuilt(tmp_path):
    G = UnitGroup(3, 3)
    path = ch.cache_path(tmp_path, 3, 3, G.g)
    np.savez(path, header=np.array([ch.CACHE_VERSION - 1, 3, 3, G.g]), ind=np.zeros(27, dtype=np.int64))
    G2 = UnitGroup(3, 3, tmp_path)
    assert np.array_equal(G2.ind, G.ind)
    with np.load(path) as data:
        assert int(data["header"][0]) == ch.CACHE_VERSION


def test_cyclotomic_reduction():
    assert list(cyclotomic_coeffs(6)) == [1, -1, 1]
    # e(1/3) + e(2/3) = -1
    assert CycloElement.from_exponents([2, 4], 6).as_integer() == -1
    assert CycloElement.from_exponents(range(9), 9).is_zero()
    z = CycloElement.from_exponents([1, 5, 7], 12)
    assert abs(complex(z) - sum(root_of_unity(j, 12) for j in (1, 5, 7))) < 1e-14
    rows = np.zeros((2, 10), dtype=np.int64)
    rows[0, [0, 5]] = 1
    rows[1, 3] = 2
    red = reduce_counts(rows, 10)
    assert red.shape == (2, 4) and not red[0].any()
    assert abs(CycloElement.monomial(3, 7, 10).__abs__() - 3) < 1e-12


@settings(max_examples=50)
@given(st.integers(2, 40), st.lists(st.integers(0, 200), min_size=1, max_size=30))
def test_cyclo_reduction_preserves_value(N, exps):
    z = CycloElement.from_exponents(exps, N)
    direct = sum(root_of_unity(e, N) for e in exps)
    assert abs(complex(z) - direct) < 1e-9 * max(1, len(exps))
    assert len(z.coeffs) == len(cyclotomic_coeffs(N)) - 1


def test_dirichlet_character_rejects_mixed_moduli():
    with pytest.raises(ValueError):
        unit_group(3, 3).character(1) * unit_group(3, 4).character(1)
    assert DirichletCharacter(unit_group(3, 2), 7).gamma == 1
    assert math.gcd(unit_group(3, 2).character(1).order, 6) == 6
