import random

import pytest
from hypothesis import given, settings, strategies as st

from rrgroupoid.hopf_cm import (
    HopfElement, TensorElement, X, Y, delta, pbw_monomials,
    random_element, twisted_antipode, DEFAULT,
)
from rrgroupoid.hopf_cyclic import (
    CyclicCochain, cochain, cochain_text, connes_B, cyclic_op, cyclic_power, cyclic_projection,
    degeneracy, face, hochschild_b, is_cyclic, iterated_coproduct, iterated_coproduct_left,
    lambda_op, random_samples, verify_bicomplex, verify_cyclicity, verify_simplicial,
)

one = HopfElement.unit()
d1 = HopfElement.gen(delta(1))
hX, hY = HopfElement.gen(X), HopfElement.gen(Y)


def test_faces():
    assert face(0, cochain(d1)) == cochain(one, d1)
    assert face(1, cochain(d1)) == cochain(one, d1) + cochain(d1, one)
    assert face(3, cochain(hX, hY)) == cochain(hX, hY, one)
    assert face(2, cochain(hX, hY)) == cochain(hX, one, hY) + cochain(hX, hY, one)
    with pytest.raises(IndexError):
        face(3, cochain(d1))
    with pytest.raises(IndexError):
        degeneracy(1, cochain(d1))


def test_degeneracies():
    assert degeneracy(0, cochain(one, d1)) == cochain(d1)
    assert not degeneracy(0, cochain(hX, hY)).terms
    assert degeneracy(1, cochain(d1, one)) == cochain(d1)


def test_cyclic_operator_examples():
    assert cyclic_op(cochain(d1)) == cochain(-d1)
    c = cochain(d1, hY)
    assert cyclic_power(c, 3) == c


def test_tau1_is_twisted_antipode():
    rng = random.Random(0)
    for _ in range(20):
        h = random_element(rng, 3)
        assert cyclic_op(cochain(h)) == cochain(twisted_antipode(h))
        assert cyclic_power(cochain(h), 2) == cochain(h)


def test_b_boundary_examples():
    assert not hochschild_b(cochain(d1)).terms
    assert not hochschild_b(CyclicCochain.of(TensorElement.scalar(1))).terms


def test_B_in_degree_one_matches_definition():
    # B on degree 1 lands in degree 0: sigma_0 tau_1(h) + sigma_0(h)
    for h in (hX, hY, d1, hX * hY + d1):
        c = cochain(h)
        expected = degeneracy(0, cyclic_op(c)) + degeneracy(0, c)
        assert connes_B(c) == expected
    assert connes_B(cochain(hY)) == CyclicCochain.of(TensorElement.scalar(1))


def test_iterated_coproduct_nesting_irrelevant():
    for m in pbw_monomials(3):
        for n in (2, 3, 4):
            assert iterated_coproduct(m, n) == iterated_coproduct_left(m, n)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 2))
def test_b_squared_random(seed, n):
    for c in random_samples(n, 2, seed):
        assert not hochschild_b(hochschild_b(c)).terms


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 2))
def test_bB_anticommute_random(seed, n):
    for c in random_samples(n, 2, seed):
        assert not (hochschild_b(connes_B(c)) + connes_B(hochschild_b(c))).terms


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 3))
def test_B_squared_random(seed, n):
    for c in random_samples(n, 1, seed):
        assert not connes_B(connes_B(c)).terms


def test_cyclicity_suite_degree_two():
    report = verify_cyclicity(2)
    assert all(r["passed"] for r in report.values()), report


def test_twisting_is_necessary():
    report = verify_cyclicity(2, twisted=DEFAULT.antipode)
    assert not all(r["passed"] for r in report.values())


def test_bicomplex_suite_degree_two():
    report = verify_bicomplex(2)
    assert all(r["passed"] for r in report.values()), report


def test_simplicial_identities():
    report = verify_simplicial()
    assert report["simplicial"]["passed"], report


def test_b_preserves_cyclic_cochains():
    for n in (1, 2):
        for c in random_samples(n, 10, seed=5):
            z = cyclic_projection(c)
            assert is_cyclic(z)
            assert is_cyclic(hochschild_b(z))


def test_lambda_fixed_points_example():
    # Y - 1/2 is fixed by -S~ in degree 1: -(1 - Y) + 1/2 = Y - 1/2
    c = cochain(hY - one.scale(__import__("fractions").Fraction(1, 2)))
    assert lambda_op(c) == c


def test_text_format():
    assert cochain_text(cochain(d1, hY)) == "deg 2: 1*d1 # Y"
