"""
The Hopf algebra H of the one-dimensional complex transverse calculus.

H is the enveloping algebra of the Lie algebra with basis
X, Y, d_n (n >= 1) and the conjugates Xb, Yb, db_n, subject to

    [Y, X] = X,   [Y, d_n] = n d_n,   [X, d_n] = d_{n+1},   [d_n, d_m] = 0,

the same relations in the barred block, and commuting blocks.

Elements are stored in the PBW basis for the generator order
d_1 < d_2 < ... < X < Y < db_1 < db_2 < ... < Xb < Yb.
A generator is a tuple (bar, kind, n) with kind 0 = d_n, 1 = X, 2 = Y;
tuple order is the PBW order.  A PBW monomial is a sorted tuple of
(generator, exponent) pairs.
"""

from __future__ import annotations

import itertools
import random
import re
from fractions import Fraction

from rrgroupoid.exact_core import Scalar, ONE, ZERO

DELTA, XKIND, YKIND = 0, 1, 2

X = (0, XKIND, 0)
Y = (0, YKIND, 0)
XBAR = (1, XKIND, 0)
YBAR = (1, YKIND, 0)


def delta(n: int, bar: int = 0):
    if n < 1:
        raise ValueError("delta index must be >= 1, got %d" % n)
    return (bar, DELTA, n)


def deltabar(n: int):
    return delta(n, 1)


def gen_name(g) -> str:
    bar, kind, n = g
    b = "b" if bar else ""
    if kind == DELTA:
        return "d%s%d" % (b, n)
    return ("X" if kind == XKIND else "Y") + b


_NAME_RE = re.compile(r"^(d)(b?)(\d+)$|^([XY])(b?)$")


def parse_gen(name: str):
    m = _NAME_RE.match(name)
    if not m:
        raise ValueError("unknown generator %r" % name)
    if m.group(1):
        return delta(int(m.group(3)), 1 if m.group(2) else 0)
    bar = 1 if m.group(5) else 0
    return (bar, XKIND if m.group(4) == "X" else YKIND, 0)


# --- monomials -------------------------------------------------------------

def mono_word(m) -> list:
    """The generator word of a PBW monomial."""
    word = []
    for g, e in m:
        word.extend([g] * e)
    return word


def mono_degree(m) -> int:
    return sum(e for _, e in m)


def mono_from_word(word) -> tuple:
    """Sorted monomial of a word that is already in PBW order."""
    out = []
    for g in word:
        if out and out[-1][0] == g:
            out[-1] = (g, out[-1][1] + 1)
        else:
            assert not out or out[-1][0] < g, "word not in PBW order"
            out.append((g, 1))
    return tuple(out)


def mono_str(m) -> str:
    if not m:
        return "1"
    return "*".join(gen_name(g) if e == 1 else "%s^%d" % (gen_name(g), e) for g, e in m)


def y_weight(m) -> tuple[int, int]:
    """ad(Y), ad(Yb) eigenvalues of a monomial: d_n counts n, X counts 1."""
    w = [0, 0]
    for (bar, kind, n), e in m:
        if kind == DELTA:
            w[bar] += n * e
        elif kind == XKIND:
            w[bar] += e
    return w[0], w[1]


def cm_bracket(a, b) -> dict:
    """[a, b] for generators a > b in PBW order, as {generator: int}."""
    if a[0] != b[0]:
        return {}
    bar = a[0]
    ka, kb = a[1], b[1]
    if ka == YKIND and kb == XKIND:
        return {b: 1}
    if ka == YKIND and kb == DELTA:
        return {b: b[2]}
    if ka == XKIND and kb == DELTA:
        return {(bar, DELTA, b[2] + 1): 1}
    return {}


def _add(acc: dict, key, c):
    v = acc.get(key)
    v = c if v is None else v + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


# --- elements --------------------------------------------------------------

class HopfElement:
    """Finite Q(i)-combination of PBW monomials."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for m, c in (terms or {}).items():
            c = Scalar.promote(c)
            if c:
                clean[m] = c
        self.terms = clean

    @classmethod
    def unit(cls, c=1):
        return cls({(): c})

    @classmethod
    def gen(cls, g, c=1):
        return cls({((g, 1),): c})

    @classmethod
    def mono(cls, m, c=1):
        return cls({m: c})

    def __add__(self, other):
        other = promote(other)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            _add(acc, m, c)
        return HopfElement(acc)

    __radd__ = __add__

    def __neg__(self):
        return HopfElement({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-promote(other))

    def __rsub__(self, other):
        return promote(other) - self

    def scale(self, c):
        return HopfElement({m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        return DEFAULT.multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        return DEFAULT.multiply(promote(other), self)

    def __pow__(self, n: int):
        out = HopfElement.unit()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            other = promote(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def __str__(self):
        return to_text(self)

    __repr__ = __str__


def promote(x) -> HopfElement:
    if isinstance(x, HopfElement):
        return x
    if isinstance(x, (int, Fraction, Scalar)):
        return HopfElement.unit(x)
    raise TypeError("cannot promote %r to HopfElement" % (x,))


def _sort_key(m):
    return (mono_degree(m), m)


def to_text(h: HopfElement) -> str:
    """Canonical text: 'coef*monomial' terms sorted by (degree, PBW key)."""
    if not h.terms:
        return "0"
    return " + ".join("%s*%s" % (h.terms[m], mono_str(m)) for m in sorted(h.terms, key=_sort_key))


def _parse_mono(s: str):
    if s == "1":
        return ()
    word = []
    for part in s.split("*"):
        name, _, e = part.partition("^")
        word.extend([parse_gen(name)] * (int(e) if e else 1))
    return HopfElement(DEFAULT.normal_form(word).terms)


def from_text(s: str) -> HopfElement:
    s = s.strip()
    out = HopfElement()
    if s == "0":
        return out
    for part in s.split(" + "):
        coef, _, mono = part.partition("*")
        m = _parse_mono(mono)
        out = out + (m.scale(Scalar.from_text(coef)) if isinstance(m, HopfElement)
                     else HopfElement.unit(Scalar.from_text(coef)))
    return out


class TensorElement:
    """Element of H^{(x)n}: {tuple of n monomials: Scalar}."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        clean = {}
        for k, c in (terms or {}).items():
            if len(k) != n:
                raise ValueError("key %r has length %d, expected %d" % (k, len(k), n))
            c = Scalar.promote(c)
            if c:
                clean[k] = c
        self.n = n
        self.terms = clean

    @classmethod
    def pure(cls, *factors: HopfElement) -> "TensorElement":
        acc = {(): ONE}
        for f in factors:
            new = {}
            for k, c in acc.items():
                for m, v in f.terms.items():
                    _add(new, k + (m,), c * v)
            acc = new
        return cls(len(factors), acc)

    @classmethod
    def scalar(cls, c) -> "TensorElement":
        return cls(0, {(): c})

    def __add__(self, other):
        if other.n != self.n:
            raise ValueError("tensor degree mismatch %d vs %d" % (self.n, other.n))
        acc = dict(self.terms)
        for k, c in other.terms.items():
            _add(acc, k, c)
        return TensorElement(self.n, acc)

    def __neg__(self):
        return TensorElement(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return TensorElement(self.n, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, TensorElement):
            return DEFAULT.tensor_multiply(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        return tensor_to_text(self)

    __repr__ = __str__


def tensor_to_text(t: TensorElement) -> str:
    if not t.terms:
        return "0"
    keys = sorted(t.terms, key=lambda k: tuple(_sort_key(m) for m in k))
    return " + ".join("%s*%s" % (t.terms[k], " # ".join(mono_str(m) for m in k) or "[]")
                      for k in keys)


# --- the algebra ------------------------------------------------------------

class CMHopfAlgebra:
    """Hopf structure for a given bracket on the generators.

    The default bracket gives the genuine Hopf algebra; alternative brackets
    exist only to build negative controls for the axiom checks.
    """

    def __init__(self, bracket=cm_bracket):
        self.bracket_rule = bracket
        self._mg = {}
        self._mm = {}
        self._cop = {}
        self._copm = {}
        self._ant = {}
        self._antm = {}

    # products

    def bracket(self, a, b) -> dict:
        if a == b:
            return {}
        if a > b:
            return self.bracket_rule(a, b)
        return {g: -c for g, c in self.bracket_rule(b, a).items()}

    def _mono_gen(self, m, g) -> dict:
        key = (m, g)
        hit = self._mg.get(key)
        if hit is not None:
            return hit
        if not m or m[-1][0] < g:
            out = {m + ((g, 1),): 1}
        elif m[-1][0] == g:
            out = {m[:-1] + ((g, m[-1][1] + 1),): 1}
        else:
            last, e = m[-1]
            rest = m[:-1] + (((last, e - 1),) if e > 1 else ())
            out = {}
            # m g = rest (g last + [last, g])
            for mono, c in self._mono_gen(rest, g).items():
                for mono2, c2 in self._mono_gen(mono, last).items():
                    _add(out, mono2, c * c2)
            for h, c in self.bracket(last, g).items():
                for mono, c2 in self._mono_gen(rest, h).items():
                    _add(out, mono, c * c2)
        self._mg[key] = out
        return out

    def mono_mul(self, m1, m2) -> dict:
        key = (m1, m2)
        hit = self._mm.get(key)
        if hit is not None:
            return hit
        acc = {m1: 1}
        for g in mono_word(m2):
            new = {}
            for mono, c in acc.items():
                for mono2, c2 in self._mono_gen(mono, g).items():
                    _add(new, mono2, c * c2)
            acc = new
        self._mm[key] = acc
        return acc

    def normal_form(self, word) -> HopfElement:
        acc = {(): 1}
        for g in word:
            if g[1] == DELTA and g[2] < 1:
                raise ValueError("bad generator %r" % (g,))
            new = {}
            for mono, c in acc.items():
                for mono2, c2 in self._mono_gen(mono, g).items():
                    _add(new, mono2, c * c2)
            acc = new
        return HopfElement(acc)

    def multiply(self, a: HopfElement, b: HopfElement) -> HopfElement:
        acc = {}
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                c = c1 * c2
                for m, k in self.mono_mul(m1, m2).items():
                    _add(acc, m, c * k)
        return HopfElement(acc)

    def tensor_multiply(self, s: TensorElement, t: TensorElement) -> TensorElement:
        """Factorwise product in H^{(x)n}."""
        if s.n != t.n:
            raise ValueError("tensor degree mismatch %d vs %d" % (s.n, t.n))
        acc = {}
        for k1, c1 in s.terms.items():
            for k2, c2 in t.terms.items():
                partial = {(): c1 * c2}
                for m1, m2 in zip(k1, k2):
                    prod = self.mono_mul(m1, m2)
                    new = {}
                    for key, c in partial.items():
                        for m, v in prod.items():
                            _add(new, key + (m,), c * v)
                    partial = new
                for key, c in partial.items():
                    _add(acc, key, c)
        return TensorElement(s.n, acc)

    # coproduct

    def _gen_coproduct(self, g) -> TensorElement:
        hit = self._cop.get(g)
        if hit is not None:
            return hit
        bar, kind, n = g
        one = HopfElement.unit()
        G = HopfElement.gen(g)
        prim = TensorElement.pure(one, G) + TensorElement.pure(G, one)
        if kind == XKIND:
            out = prim + TensorElement.pure(HopfElement.gen(delta(1, bar)),
                                            HopfElement.gen((bar, YKIND, 0)))
        elif kind == YKIND or n == 1:
            out = prim
        else:
            dx = self._gen_coproduct((bar, XKIND, 0))
            dd = self._gen_coproduct(delta(n - 1, bar))
            out = self.tensor_multiply(dx, dd) - self.tensor_multiply(dd, dx)
        self._cop[g] = out
        return out

    def _mono_coproduct(self, m) -> TensorElement:
        hit = self._copm.get(m)
        if hit is not None:
            return hit
        out = TensorElement(2, {((), ()): 1})
        for g in mono_word(m):
            out = self.tensor_multiply(out, self._gen_coproduct(g))
        self._copm[m] = out
        return out

    def coproduct(self, h: HopfElement) -> TensorElement:
        acc = {}
        for m, c in h.terms.items():
            for k, v in self._mono_coproduct(m).terms.items():
                _add(acc, k, c * v)
        return TensorElement(2, acc)

    # antipode

    def _gen_antipode(self, g) -> HopfElement:
        hit = self._ant.get(g)
        if hit is not None:
            return hit
        bar, kind, n = g
        G = HopfElement.gen(g)
        if kind == XKIND:
            out = -G + self.multiply(HopfElement.gen(delta(1, bar)),
                                     HopfElement.gen((bar, YKIND, 0)))
        elif kind == YKIND or n == 1:
            out = -G
        else:
            # d_n = X d_{n-1} - d_{n-1} X, S antimultiplicative
            sx = self._gen_antipode((bar, XKIND, 0))
            sd = self._gen_antipode(delta(n - 1, bar))
            out = self.multiply(sd, sx) - self.multiply(sx, sd)
        self._ant[g] = out
        return out

    def _mono_antipode(self, m) -> HopfElement:
        hit = self._antm.get(m)
        if hit is not None:
            return hit
        out = HopfElement.unit()
        for g in reversed(mono_word(m)):
            out = self.multiply(out, self._gen_antipode(g))
        self._antm[m] = out
        return out

    def antipode(self, h: HopfElement) -> HopfElement:
        out = HopfElement()
        for m, c in h.terms.items():
            out = out + self._mono_antipode(m).scale(c)
        return out

    def twisted_antipode(self, h: HopfElement) -> HopfElement:
        """(delta (x) S) o coproduct."""
        acc = HopfElement()
        for (m1, m2), c in self.coproduct(h).terms.items():
            d = mono_character(m1)
            if d:
                acc = acc + self._mono_antipode(m2).scale(c * d)
        return acc

    # structural maps on tensors

    def apply_factor(self, t: TensorElement, i: int, f) -> TensorElement:
        """Apply a linear map f: monomial -> TensorElement(k) to factor i."""
        acc = {}
        n_out = None
        for key, c in t.terms.items():
            img = f(key[i])
            n_out = t.n - 1 + img.n
            for k2, v in img.terms.items():
                _add(acc, key[:i] + k2 + key[i + 1:], c * v)
        if n_out is None:
            n_out = t.n - 1 + f(()).n
        return TensorElement(n_out, acc)

    def mono_coproduct_tensor(self, m) -> TensorElement:
        return self._mono_coproduct(m)

    def mono_antipode_tensor(self, m) -> TensorElement:
        return TensorElement(1, {(k,): v for k, v in self._mono_antipode(m).terms.items()})

    def multiply_tensor(self, t: TensorElement) -> HopfElement:
        """m: H (x) H -> H."""
        acc = {}
        for (m1, m2), c in t.terms.items():
            for m, v in self.mono_mul(m1, m2).items():
                _add(acc, m, c * v)
        return HopfElement(acc)


def mono_counit(m) -> int:
    return 1 if not m else 0


def mono_character(m) -> int:
    """delta(Y) = delta(Yb) = 1, zero on X, Xb, d_n, db_n."""
    return 1 if all(g[1] == YKIND for g, _ in m) else 0


DEFAULT = CMHopfAlgebra()


def normal_form(word) -> HopfElement:
    return DEFAULT.normal_form(word)


def multiply(a: HopfElement, b: HopfElement) -> HopfElement:
    return DEFAULT.multiply(a, b)


def coproduct(h: HopfElement) -> TensorElement:
    return DEFAULT.coproduct(h)


def counit(h: HopfElement) -> Scalar:
    return h.terms.get((), ZERO)


def antipode(h: HopfElement) -> HopfElement:
    return DEFAULT.antipode(h)


def twisted_antipode(h: HopfElement) -> HopfElement:
    return DEFAULT.twisted_antipode(h)


def character_delta(h: HopfElement) -> Scalar:
    acc = ZERO
    for m, c in h.terms.items():
        if mono_character(m):
            acc = acc + c
    return acc


# --- axiom verification -----------------------------------------------------

DEFAULT_POOL = (delta(1), delta(2), X, Y, deltabar(1), XBAR, YBAR)


def pbw_monomials(max_degree: int, pool=DEFAULT_POOL) -> list:
    """All PBW monomials of degree <= max_degree in the given generators."""
    pool = sorted(pool)
    out = []
    for d in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(pool, d):
            out.append(mono_from_word(combo))
    return out


def _coassoc(alg: CMHopfAlgebra, m) -> bool:
    d = alg.mono_coproduct_tensor(m)
    left = alg.apply_factor(d, 0, alg.mono_coproduct_tensor)
    right = alg.apply_factor(d, 1, alg.mono_coproduct_tensor)
    return left == right


def _counit_laws(alg, m) -> bool:
    d = alg.mono_coproduct_tensor(m)
    eps = lambda k: TensorElement(0, {(): mono_counit(k)})
    h = TensorElement(1, {(m,): 1})
    return alg.apply_factor(d, 0, eps) == h and alg.apply_factor(d, 1, eps) == h


def _antipode_law(alg, m) -> bool:
    d = alg.mono_coproduct_tensor(m)
    target = HopfElement.unit(mono_counit(m))
    left = alg.multiply_tensor(alg.apply_factor(d, 0, alg.mono_antipode_tensor))
    right = alg.multiply_tensor(alg.apply_factor(d, 1, alg.mono_antipode_tensor))
    return left == target and right == target


def _twisted_involution(alg, m) -> bool:
    h = HopfElement.mono(m)
    return alg.twisted_antipode(alg.twisted_antipode(h)) == h


def verify_hopf_axioms(max_degree: int, pool=DEFAULT_POOL, algebra: CMHopfAlgebra = None,
                       homomorphism_samples: int = None, seed: int = 0) -> dict:
    """Check the Hopf axioms exhaustively on PBW monomials of degree <= max_degree.

    The homomorphism law runs over every pair of total degree <= max_degree,
    or over ``homomorphism_samples`` random pairs when that is given.

    Returns {axiom: {"passed": bool, "checked": int, "counterexample": str | None}}.
    """
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    alg = algebra or DEFAULT
    monos = pbw_monomials(max_degree, pool)
    checks = {
        "coassociativity": _coassoc,
        "counit": _counit_laws,
        "antipode": _antipode_law,
        "twisted_antipode_involution": _twisted_involution,
    }
    report = {}
    for name, fn in checks.items():
        bad = None
        for m in monos:
            if not fn(alg, m):
                bad = mono_str(m)
                break
        report[name] = {"passed": bad is None, "checked": len(monos), "counterexample": bad}

    if homomorphism_samples is None:
        pairs = [(a, b) for a in monos for b in monos
                 if mono_degree(a) + mono_degree(b) <= max_degree]
    else:
        rng = random.Random(seed)
        pairs = []
        for _ in range(homomorphism_samples):
            a = rng.choice(monos)
            pairs.append((a, rng.choice([b for b in monos
                                         if mono_degree(a) + mono_degree(b) <= max_degree])))
    bad = None
    for a, b in pairs:
        A, B = HopfElement.mono(a), HopfElement.mono(b)
        lhs = alg.coproduct(alg.multiply(A, B))
        rhs = alg.tensor_multiply(alg.coproduct(A), alg.coproduct(B))
        if lhs != rhs:
            bad = "%s * %s" % (mono_str(a), mono_str(b))
            break
    report["coproduct_homomorphism"] = {"passed": bad is None, "checked": len(pairs),
                                        "counterexample": bad}
    return report


def random_element(rng: random.Random, max_degree: int = 3, pool=DEFAULT_POOL,
                   terms: int = 3) -> HopfElement:
    """Pseudorandom element with small integer coefficients."""
    monos = pbw_monomials(max_degree, pool)
    acc = {}
    for _ in range(terms):
        _add(acc, rng.choice(monos), Scalar(rng.randint(-3, 3), rng.choice((0, 0, 1))))
    return HopfElement(acc)


def element_weight(h: HopfElement):
    """y_weight of a homogeneous element; None if the terms disagree."""
    weights = {y_weight(m) for m in h.terms}
    if len(weights) > 1:
        return None
    return weights.pop() if weights else (0, 0)

