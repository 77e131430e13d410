import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from rrgroupoid import formal_germs as fg
from rrgroupoid.exact_core import Scalar
from rrgroupoid.hopf_cm import (
    HopfElement, X, Y, XBAR, YBAR, delta, deltabar, multiply,
)

N = 6


def germ(*hol, order=N):
    hol = tuple(hol) + (0,) * (order - 1 - len(hol))
    return fg.GermElement(order, hol, (0,) * (order - 1))


def to_sympy(s: Scalar):
    return sympy.Rational(s.re.numerator, s.re.denominator) + \
        sympy.I * sympy.Rational(s.im.numerator, s.im.denominator)


def germ_poly(g, x, bar=0):
    return sum((to_sympy(c) * x ** k for k, c in enumerate(g.series(bar))), sympy.Integer(0))


@pytest.fixture(scope="module")
def rng():
    return random.Random(11)


def test_compose_order_two():
    a, b = Fraction(2, 3), Fraction(-5, 7)
    g = fg.compose(germ(a), germ(b))
    assert g.hol[0] == a + b


def test_compose_identity_and_inverse(rng):
    e = fg.GermElement.identity(N)
    for _ in range(10):
        g = fg.random_germ(rng, N)
        assert fg.compose(g, e) == g == fg.compose(e, g)
        assert fg.compose(g, fg.inverse(g)).is_identity()
        assert fg.compose(fg.inverse(g), g).is_identity()


def test_inverse_matches_sympy_reversion(rng):
    x = sympy.Symbol("x")
    g = fg.random_germ(rng, N)
    p = germ_poly(g, x)
    q = germ_poly(fg.inverse(g), x)
    comp = sympy.expand(p.subs(x, q))
    for k in range(2, N + 1):
        assert sympy.simplify(comp.coeff(x, k)) == 0


def test_truncation_mismatch():
    with pytest.raises(fg.TruncationError):
        fg.compose(germ(1, order=4), germ(1, order=5))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_compose_associative(seed):
    r = random.Random(seed)
    a, b, c = (fg.random_germ(r, 5) for _ in range(3))
    assert fg.compose(fg.compose(a, b), c) == fg.compose(a, fg.compose(b, c))


def test_delta_coord_examples(rng):
    a = Scalar(3, -1)
    assert fg.delta_coord(germ(a), 1) == a * 2
    e = fg.GermElement.identity(N)
    assert all(not v for v in fg.delta_coords(e))
    for _ in range(10):
        g, h = fg.random_germ(rng, N), fg.random_germ(rng, N)
        assert fg.delta_coord(fg.compose(g, h), 1) == fg.delta_coord(g, 1) + fg.delta_coord(h, 1)
    with pytest.raises(fg.TruncationError):
        fg.delta_coord(e, N)


def test_delta_coord_matches_sympy(rng):
    x = sympy.Symbol("x")
    g = fg.random_germ(rng, N)
    series = sympy.series(sympy.log(sympy.diff(germ_poly(g, x), x)), x, 0, N).removeO()
    for n in range(1, N):
        expected = sympy.factorial(n) * series.coeff(x, n)
        assert sympy.simplify(expected - to_sympy(fg.delta_coord(g, n))) == 0


def test_right_translate_examples():
    a = Scalar(Fraction(1, 2), 1)
    g = germ(a)
    assert fg.right_translate(g, fg.AffineElement.identity()) == g
    y = Scalar(3, 2)
    assert fg.delta_coord(fg.right_translate(g, fg.AffineElement(y, 0, 1, 0)), 1) == a * y * 2


def test_right_translate_matches_log_derivative(rng):
    z, x = sympy.symbols("z x")
    for _ in range(3):
        g = fg.random_germ(rng, N)
        k = fg.AffineElement(Scalar(rng.randint(1, 3), rng.randint(-2, 2)), Scalar(Fraction(1, rng.randint(2, 5))),
                             Scalar(2), Scalar(rng.randint(-2, 2), 1))
        for bar, (y0, z0) in enumerate(((k.y, k.z), (k.yb, k.zb))):
            L = sympy.log(sympy.diff(germ_poly(g, z, bar), z))
            t = fg.right_translate(g, k)
            for n in range(1, N):
                expected = to_sympy(y0) ** n * sympy.diff(L, z, n).subs(z, to_sympy(z0))
                assert sympy.simplify(expected - to_sympy(fg.delta_coord(t, n, bar))) == 0


def test_right_translate_is_group_factorisation(rng):
    """psi o k = (affine part) o (psi <| k) as polynomials."""
    x = sympy.Symbol("x")
    g = fg.random_germ(rng, N)
    k = fg.AffineElement(Scalar(2, 1), Scalar(Fraction(1, 3)), 1, 0)
    t = fg.right_translate(g, k)
    p = germ_poly(g, x)
    lhs = sympy.expand(p.subs(x, to_sympy(k.y) * x + to_sympy(k.z)))
    slope = sympy.diff(p, x).subs(x, to_sympy(k.z)) * to_sympy(k.y)
    rhs = sympy.expand(slope * germ_poly(t, x) + p.subs(x, to_sympy(k.z)))
    assert sympy.simplify(lhs - rhs) == 0


def test_multiply_examples():
    e = fg.GermElement.identity(N)
    f1 = fg.SymbolicFunction.monomial(1, 0, 2, 0, c=3)
    f2 = fg.SymbolicFunction.monomial(0, -1, 1, 1, c=Scalar(0, 1))
    prod = fg.multiply_crossed(fg.CrossedElement.single(f1, e), fg.CrossedElement.single(f2, e))
    assert prod.terms[e].agrees_with(f1 * f2)

    g = germ(Scalar(1, 1), 2)
    one = fg.SymbolicFunction.constant(1)
    zf = fg.SymbolicFunction.monomial(0, 0, 1, 0)
    prod = fg.multiply_crossed(fg.CrossedElement.single(one, g),
                               fg.CrossedElement.single(zf, fg.inverse(g)))
    assert list(prod.terms) == [e]
    expected = fg.SymbolicFunction.from_series(g.series(0), prec=N - 1)
    assert prod.terms[e].agrees_with(expected)


def test_multiply_associative(rng):
    germs = [fg.random_germ(rng, N) for _ in range(3)]
    for _ in range(5):
        a, b, c = (fg.random_crossed(rng, germs, N - 1) for _ in range(3))
        assert (a * b * c).agrees_with(a * (b * c))


def test_act_examples():
    g = germ(Scalar(2))
    f = fg.SymbolicFunction.monomial(2, 0, 1, 0)
    a = fg.CrossedElement.single(f, g)
    assert fg.act_hopf(HopfElement.gen(Y), a).terms[g].agrees_with(f.scale(2))
    # delta_1 on 1 U*_psi with psi = x + a x^2: 2a y (1 - 2az + ...)
    one = fg.CrossedElement.single(fg.SymbolicFunction.constant(1), g)
    got = fg.act_hopf(HopfElement.gen(delta(1)), one).terms[g]
    assert got.terms[(1, 0, 0, 0)] == 4
    assert got.terms[(1, 0, 1, 0)] == -16
    e = fg.GermElement.identity(N)
    a = fg.CrossedElement.single(f, e)
    expected = f.d_z().times_y(1)
    assert fg.act_hopf(HopfElement.gen(X), a).terms[e].agrees_with(expected)


def test_action_is_algebra_action(rng):
    germs = [fg.random_germ(rng, N) for _ in range(2)]
    gens = [HopfElement.gen(g) for g in (X, Y, delta(1), XBAR, deltabar(1))]
    for _ in range(10):
        h1, h2 = rng.choice(gens), rng.choice(gens)
        a = fg.random_crossed(rng, germs, N - 1)
        lhs = fg.act_hopf(multiply(h1, h2), a)
        rhs = fg.act_hopf(h1, fg.act_hopf(h2, a))
        assert lhs.agrees_with(rhs)


def test_delta_overflow_is_explicit():
    a = fg.CrossedElement.single(fg.SymbolicFunction.constant(1), germ(1, order=3))
    with pytest.raises(fg.TruncationError):
        fg.act_hopf(HopfElement.gen(delta(2)), a)


def _affine_compose(k1, k2):
    """k1 o k2 for x -> y x + z."""
    return fg.AffineElement(k1.y * k2.y, k1.y * k2.z + k1.z, k1.yb * k2.yb, k1.yb * k2.zb + k1.zb)


def test_translation_cocycle_two_ways(rng):
    """delta_n(U*_psi) U_psi read off the action agrees with delta_n(psi <| k)."""
    g = fg.random_germ(rng, N)
    a = fg.CrossedElement.single(fg.SymbolicFunction.constant(1), g)
    for n in (1, 2, 3):
        mult = fg.act_hopf(HopfElement.gen(delta(n)), a).terms[g]
        for _ in range(3):
            y = Scalar(rng.randint(1, 3), rng.randint(-2, 2))
            at_zero = sum((c * y ** p for (p, q, i, j), c in mult.terms.items() if i == 0),
                          Scalar(0))
            t = fg.right_translate(g, fg.AffineElement(y, 0, 1, 0))
            assert fg.delta_coord(t, n) == at_zero


def test_right_translation_composes(rng):
    for _ in range(5):
        g = fg.random_germ(rng, N)
        k1 = fg.AffineElement(Scalar(rng.randint(1, 3)), Scalar(Fraction(1, rng.randint(2, 5))),
                              Scalar(1, 1), Scalar(rng.randint(-2, 2)))
        k2 = fg.AffineElement(Scalar(2, -1), Scalar(Fraction(-1, 3)), Scalar(3), Scalar(0, 1))
        lhs = fg.right_translate(g, _affine_compose(k1, k2))
        rhs = fg.right_translate(fg.right_translate(g, k1), k2)
        assert lhs == rhs


def test_compatibility_generators(rng):
    germs = [fg.random_germ(rng, N) for _ in range(2)] + [fg.GermElement.identity(N)]
    for g in (X, Y, XBAR, YBAR, delta(1), delta(2), delta(3), deltabar(1)):
        for _ in range(3):
            a, b = fg.random_crossed(rng, germs, N - 1), fg.random_crossed(rng, germs, N - 1)
            report = fg.verify_action_compatibility(HopfElement.gen(g), a, b)
            assert report["passed"] and report["precision"] >= 1, report


def test_compatibility_composites(rng):
    germs = [fg.random_germ(rng, N)]
    for word in ((X, Y), (delta(1), X), (X, X), (delta(1), deltabar(1))):
        h = multiply(HopfElement.gen(word[0]), HopfElement.gen(word[1]))
        a, b = fg.random_crossed(rng, germs, N - 1), fg.random_crossed(rng, germs, N - 1)
        report = fg.verify_action_compatibility(h, a, b)
        assert report["passed"] and report["precision"] >= 1, report


def test_divergence_character():
    assert fg.divergence_character(Y) == 1
    assert fg.divergence_character(YBAR) == 1
    assert fg.divergence_character(X) == 0
    assert fg.divergence_character(XBAR) == 0
    assert fg.divergence_character(delta(2)) == 0
    with pytest.raises(ValueError):
        fg.divergence_character((0, 7, 0))


def test_trace_reads_identity_component(rng):
    g = fg.random_germ(rng, N)
    e = fg.GermElement.identity(N)
    f = fg.random_function(rng, N - 1)
    a = fg.CrossedElement({g: f, e: f.scale(2)})
    assert a.identity_component().agrees_with(f.scale(2))
    assert not fg.CrossedElement.single(f, g).identity_component().terms


def test_text_round_trip(rng):
    germs = [fg.random_germ(rng, N) for _ in range(2)]
    a = fg.random_crossed(rng, germs, N - 1)
    b = fg.crossed_from_text(fg.crossed_to_text(a))
    assert set(b.terms) == set(a.terms) and b.agrees_with(a)
    g = germs[0]
    assert fg.germ_from_text(fg.germ_to_text(g)) == g
    assert fg.germ_to_text(germ(Fraction(1, 2), order=3)) == "3; 1/2 0; 0 0"


def test_model_compatibility_suite():
    report = fg.verify_model_compatibility(seed=3, pairs=10)
    assert all(r["passed"] for r in report.values()), report
    assert report["generators"]["checked"] == 10
