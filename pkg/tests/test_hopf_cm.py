import random

import pytest
from hypothesis import given, settings, strategies as st

from rrgroupoid import formal_germs as fg
from rrgroupoid.exact_core import Scalar
from rrgroupoid.hopf_cm import (
    CMHopfAlgebra, DEFAULT, HopfElement, TensorElement, X, Y, XBAR, YBAR, DEFAULT_POOL,
    antipode, character_delta, cm_bracket, coproduct, counit, delta, deltabar,
    from_text, gen_name, mono_from_word, multiply, normal_form, parse_gen,
    pbw_monomials, random_element, tensor_to_text, to_text, twisted_antipode,
    verify_hopf_axioms, y_weight, element_weight,
)

d1, d2, d3 = (HopfElement.gen(delta(n)) for n in (1, 2, 3))
hX, hY = HopfElement.gen(X), HopfElement.gen(Y)
db1 = HopfElement.gen(deltabar(1))
one = HopfElement.unit()


def t(*factors):
    return TensorElement.pure(*factors)


def test_generator_names_round_trip():
    for g in (delta(1), delta(4), X, Y, deltabar(2), XBAR, YBAR):
        assert parse_gen(gen_name(g)) == g
    with pytest.raises(ValueError):
        parse_gen("Z")


def test_normal_form_examples():
    assert normal_form([X, delta(1)]) == d1 * hX + d2
    assert normal_form([Y, X]) == hX * hY + hX
    assert normal_form([X, deltabar(1)]) == db1 * hX
    assert multiply(hX, d1) - multiply(d1, hX) == d2


def test_higher_deltas_created_on_demand():
    assert multiply(hX, d2) - multiply(d2, hX) == d3
    assert multiply(hY, d3) - multiply(d3, hY) == d3.scale(3)


def test_unit_law():
    rng = random.Random(1)
    for _ in range(20):
        h = random_element(rng)
        assert multiply(one, h) == h == multiply(h, one)


def test_associativity_random_triples():
    rng = random.Random(2)
    for _ in range(40):
        a, b, c = (random_element(rng, 3, terms=2) for _ in range(3))
        assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


def _naive_normal_form(word, rng):
    """Independent rewriter: swap a randomly chosen adjacent inversion each step."""
    todo = {tuple(word): Scalar(1)}
    done = {}
    while todo:
        w, c = todo.popitem()
        inversions = [i for i in range(len(w) - 1) if w[i] > w[i + 1]]
        if not inversions:
            key = mono_from_word(w)
            done[key] = done.get(key, Scalar(0)) + c
            continue
        i = rng.choice(inversions)
        a, b = w[i], w[i + 1]
        pieces = [(w[:i] + (b, a) + w[i + 2:], c)]
        for g, k in cm_bracket(a, b).items():
            pieces.append((w[:i] + (g,) + w[i + 2:], c * k))
        for nw, nc in pieces:
            todo[nw] = todo.get(nw, Scalar(0)) + nc
            if not todo[nw]:
                del todo[nw]
    return HopfElement(done)


def test_normal_form_confluent():
    rng = random.Random(3)
    for _ in range(100):
        word = [rng.choice(DEFAULT_POOL) for _ in range(rng.randint(0, 6))]
        assert _naive_normal_form(word, rng) == normal_form(word)


def test_coproduct_examples():
    assert coproduct(d1) == t(one, d1) + t(d1, one)
    assert coproduct(d2) == t(one, d2) + t(d2, one) + t(d1, d1)
    assert coproduct(hX) == t(one, hX) + t(hX, one) + t(d1, hY)
    yx = multiply(hY, hX)
    assert coproduct(yx) == DEFAULT.tensor_multiply(coproduct(hY), coproduct(hX))


def test_counit_examples():
    assert counit(one) == 1
    assert counit(d3) == 0
    assert counit(one.scale(2) + hX.scale(5)) == 2


def test_antipode_examples():
    assert antipode(hY) == -hY
    assert antipode(d2) == -d2 + d1 * d1
    assert antipode(hX) == -hX + d1 * hY
    assert antipode(hX * hY) == antipode(hY) * antipode(hX)


def test_character_and_twisted_antipode():
    assert character_delta(hY) == 1
    assert character_delta(HopfElement.gen(YBAR)) == 1
    assert character_delta(hY * hY) == 1
    assert character_delta(hX * hY) == 0
    assert twisted_antipode(hY) == one - hY
    assert twisted_antipode(hX) == -hX + d1 * hY
    assert twisted_antipode(d1) == -d1


def test_y_weight():
    assert y_weight(mono_from_word([delta(2), X])) == (3, 0)
    assert y_weight(mono_from_word([Y])) == (0, 0)
    assert y_weight(mono_from_word([delta(1), deltabar(1)])) == (1, 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_weight_additive_under_product(seed):
    rng = random.Random(seed)
    monos = pbw_monomials(2)
    a, b = HopfElement.mono(rng.choice(monos)), HopfElement.mono(rng.choice(monos))
    wa, wb = element_weight(a), element_weight(b)
    for m in multiply(a, b).terms:
        assert y_weight(m) == (wa[0] + wb[0], wa[1] + wb[1])


def test_text_round_trip():
    rng = random.Random(4)
    for _ in range(30):
        h = random_element(rng)
        assert from_text(to_text(h)) == h
    assert to_text(d2 + d1 * hX) == "1*d2 + 1*d1*X"
    assert tensor_to_text(coproduct(d1)) == "1*1 # d1 + 1*d1 # 1"


def test_axioms_low_degree():
    report = verify_hopf_axioms(2)
    assert all(r["passed"] for r in report.values()), report


def test_axioms_degree_three():
    report = verify_hopf_axioms(3)
    assert all(r["passed"] for r in report.values()), report


def _corrupted(a, b):
    if (a, b) == (X, delta(1)):
        return {}
    return cm_bracket(a, b)


def test_corrupted_relation_breaks_antipode():
    report = verify_hopf_axioms(2, algebra=CMHopfAlgebra(_corrupted))
    assert not report["antipode"]["passed"]


def test_unbarred_and_barred_blocks_commute_in_model():
    """X db1 and db1 X must act identically on the crossed product."""
    rng = random.Random(5)
    germs = [fg.random_germ(rng, 6) for _ in range(2)] + [fg.GermElement.identity(6)]
    for pair in ((X, deltabar(1)), (delta(1), XBAR), (Y, YBAR), (delta(2), deltabar(1))):
        a = fg.random_crossed(rng, germs, 5)
        ab = fg.act_hopf(HopfElement.gen(pair[0]), fg.act_hopf(HopfElement.gen(pair[1]), a))
        ba = fg.act_hopf(HopfElement.gen(pair[1]), fg.act_hopf(HopfElement.gen(pair[0]), a))
        assert ab.agrees_with(ba)
        assert multiply(HopfElement.gen(pair[0]), HopfElement.gen(pair[1])) == \
            multiply(HopfElement.gen(pair[1]), HopfElement.gen(pair[0]))


def test_bracket_relations_match_model():
    """[X, d1] = d2 and [Y, X] = X also hold for the operators on the model."""
    rng = random.Random(6)
    germs = [fg.random_germ(rng, 6) for _ in range(2)]
    a = fg.random_crossed(rng, germs, 5)
    for left, right in ((X, delta(1)), (Y, X), (Y, delta(2)), (XBAR, deltabar(1))):
        lhs = (fg.act_hopf(HopfElement.gen(left), fg.act_hopf(HopfElement.gen(right), a))
               - fg.act_hopf(HopfElement.gen(right), fg.act_hopf(HopfElement.gen(left), a)))
        rhs = fg.act_hopf(multiply(HopfElement.gen(left), HopfElement.gen(right))
                          - multiply(HopfElement.gen(right), HopfElement.gen(left)), a)
        assert lhs.agrees_with(rhs)

