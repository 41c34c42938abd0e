import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import factorint

from orbit_lvalues.characters import unit_group
from orbit_lvalues.mollifier import (MollifierSpec, evaluate_mollifier, iwaniec_sarnak_coefficients,
                                     load_coefficients, mollifier_family, trivial_mollifier)


def test_trivial():
    m = iwaniec_sarnak_coefficients(3**6, 0.0)
    assert m.coefficients == {1: 1.0} and m.trivial()
    G = unit_group(3, 4)
    assert evaluate_mollifier(trivial_mollifier(81), G.character(5)) == 1
    assert np.all(mollifier_family(trivial_mollifier(81), G, [1, 2, 4]) == 1)


def test_coefficient_instance():
    m = iwaniec_sarnak_coefficients(3**6, 0.4)
    M = 3**2.4
    assert m.coefficients[1] == 1
    assert m.coefficients[2] == pytest.approx(-math.log(M / 2) / math.log(M))
    assert 4 not in m.coefficients and 3 not in m.coefficients and 6 not in m.coefficients
    assert m.coefficients[10] == pytest.approx(math.log(M / 10) / math.log(M))
    assert max(m.coefficients) <= M


@settings(max_examples=30)
@given(st.sampled_from([3**5, 3**7, 5**4, 7**3]), st.floats(0.01, 0.49))
def test_coefficient_rules(q, theta):
    m = iwaniec_sarnak_coefficients(q, theta)
    p = m.p
    for n, a in m.coefficients.items():
        f = factorint(n)
        assert n % p and all(e == 1 for e in f.values())
        assert abs(a) <= 1
        assert (a >= 0) == (len(f) % 2 == 0) or a == 0


@pytest.mark.parametrize("theta", [-0.1, 0.5, 0.7])
def test_rejects_theta(theta):
    with pytest.raises(ValueError):
        iwaniec_sarnak_coefficients(81, theta)


def test_rejects_non_prime_power():
    with pytest.raises(ValueError):
        iwaniec_sarnak_coefficients(12, 0.2)
    with pytest.raises(ValueError):
        MollifierSpec(9, 3, 0.1, {2: 1.0})


def test_conjugation_and_cap():
    G = unit_group(3, 5)
    m = iwaniec_sarnak_coefficients(G.q, 0.45)
    rng = np.random.default_rng(3)
    for g in rng.integers(0, G.phi, 10):
        chi = G.character(int(g))
        v = evaluate_mollifier(m, chi)
        assert abs(evaluate_mollifier(m, chi.conj()) - v.conjugate()) < 1e-12
        assert abs(v) <= m.sanity_cap() + 1e-12
    fam = mollifier_family(m, G, range(G.phi))
    single = [evaluate_mollifier(m, G.character(g)) for g in range(G.phi)]
    assert np.max(np.abs(fam - single)) < 1e-12


def test_load_coefficients(tmp_path):
    path = tmp_path / "a.csv"
    path.write_text("m,a_m\n1,1\n2,-0.5\n3,9\n4,0.1\n5,3.0\n100,1\n")
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        m = load_coefficients(path, 81, 0.45)
    assert any("a_5" in str(x.message) for x in w)
    assert m.coefficients == {1: 1.0, 2: -0.5, 4: 0.1, 5: 3.0}
    with pytest.raises(ValueError):
        evaluate_mollifier(m, unit_group(3, 3).character(1))
