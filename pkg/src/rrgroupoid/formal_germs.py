"""
Truncated formal conformal germs and a jet model of the crossed product
C_c^oo(F) x| Gamma on which the Hopf algebra acts.

Germs psi(x) = x + c_2 x^2 + ... + c_N x^N are N-jets; the antiholomorphic
germ psi_bar carries its own independent coefficients.  Functions on the
frame bundle F are polynomials in z, zb whose coefficients are Laurent
monomials in y, yb; each function carries a precision p meaning that all
terms of total (z, zb)-degree <= p are exact.  Differentiation lowers the
precision by one, so every identity is checked exactly up to the precision
both sides share.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from rrgroupoid.exact_core import Scalar, ZERO, ONE
from rrgroupoid import hopf_cm
from rrgroupoid.hopf_cm import HopfElement, DELTA, XKIND, YKIND, mono_word


class TruncationError(ValueError):
    pass


# --- truncated power series (lists of Scalars, index = power) ---------------

def series_mul(a, b, order: int) -> list:
    out = [ZERO] * (order + 1)
    for i, x in enumerate(a[:order + 1]):
        if not x:
            continue
        for j, y in enumerate(b[:order + 1 - i]):
            if y:
                out[i + j] = out[i + j] + x * y
    return out


def series_inverse(a, order: int) -> list:
    """1/a for a[0] != 0."""
    if not a or not a[0]:
        raise ZeroDivisionError("series with zero constant term")
    inv0 = Scalar.promote(a[0]).inverse()
    out = [ZERO] * (order + 1)
    out[0] = inv0
    for n in range(1, order + 1):
        s = ZERO
        for k in range(1, min(n, len(a) - 1) + 1):
            if a[k]:
                s = s + a[k] * out[n - k]
        out[n] = -s * inv0
    return out


def series_pow(a, e: int, order: int) -> list:
    if e < 0:
        return series_pow(series_inverse(a, order), -e, order)
    out = [ONE] + [ZERO] * order
    for _ in range(e):
        out = series_mul(out, a, order)
    return out


def series_derivative(a) -> list:
    return [a[k] * k for k in range(1, len(a))] or [ZERO]


def series_log1(a, order: int) -> list:
    """log a for a[0] == 1, via (log a)' = a'/a."""
    assert a[0] == 1
    q = series_mul(series_derivative(a), series_inverse(a, order), order)
    out = [ZERO] * (order + 1)
    for k in range(1, order + 1):
        out[k] = q[k - 1] * Fraction(1, k)
    return out


def series_compose(f, g, order: int) -> list:
    """f(g(x)) truncated at x^order, via Horner.

    f is a finite polynomial, so a nonzero constant term in g is allowed.
    """
    out = [ZERO] * (order + 1)
    for c in reversed(list(f[:order + 1]) + [ZERO] * max(0, order + 1 - len(f))):
        out = series_mul(out, g, order)
        out[0] = out[0] + c
    return out


def series_reversion(f, order: int) -> list:
    """Compositional inverse of f = x + ... by Lagrange inversion:
    [x^n] f^{-1} = (1/n) [x^{n-1}] (x / f(x))^n."""
    assert not f[0] and f[1] == 1
    shifted = list(f[1:]) + [ZERO]  # f(x)/x
    h = series_inverse(shifted, order)  # x/f(x)
    out = [ZERO, ONE] + [ZERO] * (order - 1)
    hp = h
    for n in range(2, order + 1):
        hp = series_mul(hp, h, order)  # h^n
        out[n] = hp[n - 1] * Fraction(1, n)
    return out


# --- affine group G_1 and germ group G_2 -------------------------------------

@dataclass(frozen=True)
class AffineElement:
    """k(x) = y x + z with independent antiholomorphic data (yb, zb)."""

    y: Scalar
    z: Scalar
    yb: Scalar
    zb: Scalar

    def __post_init__(self):
        for name in ("y", "z", "yb", "zb"):
            object.__setattr__(self, name, Scalar.promote(getattr(self, name)))
        if not self.y or not self.yb:
            raise ValueError("affine scale must be nonzero")

    @classmethod
    def identity(cls):
        return cls(1, 0, 1, 0)


@dataclass(frozen=True)
class GermElement:
    """N-jet psi(x) = x + sum_{k=2}^N c_k x^k, plus the conjugate family."""

    order: int
    hol: tuple
    antihol: tuple

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("truncation order must be >= 2")
        for name in ("hol", "antihol"):
            seq = tuple(Scalar.promote(c) for c in getattr(self, name))
            if len(seq) != self.order - 1:
                raise ValueError("%s needs %d coefficients c_2..c_N" % (name, self.order - 1))
            object.__setattr__(self, name, seq)

    @classmethod
    def identity(cls, order: int):
        return cls(order, (0,) * (order - 1), (0,) * (order - 1))

    @classmethod
    def from_series(cls, order: int, hol, antihol) -> "GermElement":
        assert not hol[0] and hol[1] == 1 and not antihol[0] and antihol[1] == 1
        return cls(order, tuple(hol[2:order + 1]), tuple(antihol[2:order + 1]))

    def series(self, bar: int = 0) -> list:
        return [ZERO, ONE] + list(self.antihol if bar else self.hol)

    def is_identity(self) -> bool:
        return not any(self.hol) and not any(self.antihol)

    def __str__(self):
        return "germ[N=%d](%s | %s)" % (self.order, ", ".join(map(str, self.hol)),
                                         ", ".join(map(str, self.antihol)))


def _check_orders(g: GermElement, h: GermElement):
    if g.order != h.order:
        raise TruncationError("truncation order mismatch %d vs %d" % (g.order, h.order))


@lru_cache(maxsize=4096)
def compose(g: GermElement, h: GermElement) -> GermElement:
    """g o h truncated at order N."""
    _check_orders(g, h)
    N = g.order
    return GermElement.from_series(N, series_compose(g.series(0), h.series(0), N),
                                   series_compose(g.series(1), h.series(1), N))


@lru_cache(maxsize=1024)
def inverse(g: GermElement) -> GermElement:
    N = g.order
    return GermElement.from_series(N, series_reversion(g.series(0), N),
                                   series_reversion(g.series(1), N))


def log_derivative_series(g: GermElement, bar: int = 0) -> list:
    """ln psi'(x) up to x^{N-1}."""
    N = g.order
    return series_log1(series_derivative(g.series(bar)), N - 1)


def delta_coord(g: GermElement, n: int, bar: int = 0) -> Scalar:
    """delta_n(psi) = n! [x^n] ln psi'(x)."""
    if not 1 <= n <= g.order - 1:
        raise TruncationError("delta_%d needs truncation order > %d" % (n, n))
    return log_derivative_series(g, bar)[n] * factorial(n)


def delta_coords(g: GermElement, bar: int = 0) -> list:
    return [delta_coord(g, n, bar) for n in range(1, g.order)]


def _poly_eval(p, x: Scalar) -> Scalar:
    acc = ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def right_translate(g: GermElement, k: AffineElement) -> GermElement:
    """psi <| k: the G_2 part of psi o k = (psi |> k) o (psi <| k).

    With k(x) = y x + z this is x -> (psi(z + y x) - psi(z)) / (psi'(z) y),
    exact because the N-jet is evaluated as a polynomial map.
    """
    N = g.order
    parts = []
    for bar, (y, z) in enumerate(((k.y, k.z), (k.yb, k.zb))):
        p = g.series(bar)
        dp = series_derivative(p)
        slope = _poly_eval(dp, z) * y
        if not slope:
            raise TruncationError("psi'(z) vanishes at the translation point")
        shifted = series_compose(p, [z, y], N)  # psi(z + y x)
        shifted[0] = ZERO
        inv = slope.inverse()
        parts.append([c * inv for c in shifted])
    return GermElement.from_series(N, parts[0], parts[1])


def random_germ(rng: random.Random, order: int = 6, size: int = 3) -> GermElement:
    def coef():
        return Scalar(Fraction(rng.randint(-size, size), rng.randint(1, size)),
                      Fraction(rng.randint(-size, size), rng.randint(1, size)) if rng.random() < 0.3 else 0)
    return GermElement(order, tuple(coef() for _ in range(order - 1)),
                       tuple(coef() for _ in range(order - 1)))


# --- functions on F ----------------------------------------------------------

class SymbolicFunction:
    """sum c * y^a yb^b z^i zb^j with i + j <= prec (exact below prec)."""

    __slots__ = ("terms", "prec")

    def __init__(self, terms=None, prec: int = 5):
        self.prec = prec
        clean = {}
        for key, c in (terms or {}).items():
            if key[2] + key[3] > prec:
                continue
            c = Scalar.promote(c)
            if c:
                clean[key] = c
        self.terms = clean

    @classmethod
    def constant(cls, c=1, prec: int = 5):
        return cls({(0, 0, 0, 0): c}, prec)

    @classmethod
    def monomial(cls, a=0, b=0, i=0, j=0, c=1, prec: int = 5):
        return cls({(a, b, i, j): c}, prec)

    def __add__(self, other):
        p = min(self.prec, other.prec)
        acc = {}
        for src in (self.terms, other.terms):
            for k, c in src.items():
                hopf_cm._add(acc, k, c)
        return SymbolicFunction(acc, p)

    def __neg__(self):
        return SymbolicFunction({k: -c for k, c in self.terms.items()}, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return SymbolicFunction({k: c * v for k, v in self.terms.items()}, self.prec)

    def __mul__(self, other):
        if not isinstance(other, SymbolicFunction):
            return self.scale(other)
        p = min(self.prec, other.prec)
        acc = {}
        for (a1, b1, i1, j1), c1 in self.terms.items():
            for (a2, b2, i2, j2), c2 in other.terms.items():
                if i1 + i2 + j1 + j2 <= p:
                    hopf_cm._add(acc, (a1 + a2, b1 + b2, i1 + i2, j1 + j2), c1 * c2)
        return SymbolicFunction(acc, p)

    def truncate(self, prec: int) -> "SymbolicFunction":
        return SymbolicFunction(self.terms, min(prec, self.prec))

    def agrees_with(self, other, prec: int = None) -> bool:
        p = min(self.prec, other.prec) if prec is None else prec
        return self.truncate(p).terms == other.truncate(p).terms

    def __bool__(self):
        return bool(self.terms)

    # vector fields on F

    def d_z(self, bar: int = 0):
        acc = {}
        for (a, b, i, j), c in self.terms.items():
            e = j if bar else i
            if e:
                key = (a, b, i, j - 1) if bar else (a, b, i - 1, j)
                hopf_cm._add(acc, key, c * e)
        return SymbolicFunction(acc, self.prec - 1)

    def times_y(self, power: int, bar: int = 0):
        return SymbolicFunction({((a, b + power) if bar else (a + power, b)) + (i, j): c
                                 for (a, b, i, j), c in self.terms.items()}, self.prec)

    def euler_y(self, bar: int = 0):
        """y d/dy (or yb d/dyb)."""
        return SymbolicFunction({k: c * (k[1] if bar else k[0]) for k, c in self.terms.items()},
                                self.prec)

    @classmethod
    def from_series(cls, s, bar: int = 0, prec: int = None):
        prec = len(s) - 1 if prec is None else prec
        return cls({(0, 0, 0, k) if bar else (0, 0, k, 0): c for k, c in enumerate(s) if c}, prec)

    def __str__(self):
        if not self.terms:
            return "0 + O(%d)" % (self.prec + 1)
        parts = []
        for (a, b, i, j) in sorted(self.terms):
            parts.append("%s*y^%d*yb^%d*z^%d*zb^%d" % (self.terms[a, b, i, j], a, b, i, j))
        return " + ".join(parts) + " + O(%d)" % (self.prec + 1)

    __repr__ = __str__


@lru_cache(maxsize=8192)
def _pullback_factor(g: GermElement, bar: int, power_y: int, power_z: int, prec: int) -> tuple:
    """psi'(z)^power_y psi(z)^power_z up to z^prec."""
    s = g.series(bar)
    a = series_pow(series_derivative(s), power_y, prec)
    b = series_pow(s, power_z, prec)
    return tuple(series_mul(a, b, prec))


def pullback(f: SymbolicFunction, g: GermElement) -> SymbolicFunction:
    """f o psi: z -> psi(z), y -> psi'(z) y, and the conjugates."""
    p = min(f.prec, g.order - 1)
    if p < 0:
        return SymbolicFunction({}, p)
    acc = {}
    for (a, b, i, j), c in f.terms.items():
        hol = _pullback_factor(g, 0, a, i, p)
        anti = _pullback_factor(g, 1, b, j, p)
        for u, x in enumerate(hol):
            if not x:
                continue
            for v, w in enumerate(anti[:p + 1 - u]):
                if w:
                    hopf_cm._add(acc, (a, b, u, v), c * x * w)
    return SymbolicFunction(acc, p)


@lru_cache(maxsize=4096)
def delta_multiplier(g: GermElement, n: int, bar: int = 0) -> SymbolicFunction:
    """y^n d^n_z ln psi'(z) as a function on F (precision N - 1 - n)."""
    L = log_derivative_series(g, bar)
    for _ in range(n):
        L = series_derivative(L)
    f = SymbolicFunction.from_series(L, bar, prec=g.order - 1 - n)
    return f.times_y(n, bar)


# --- crossed product ---------------------------------------------------------

class CrossedElement:
    """sum_psi f_psi U*_psi.

    Components that truncate to zero are kept aside in ``ghosts`` so the
    precision they carry still propagates; they never appear in ``terms``.
    """

    __slots__ = ("terms", "ghosts")

    EXACT = 10 ** 6

    def __init__(self, terms=None):
        terms = terms or {}
        self.terms = {g: f for g, f in terms.items() if f.terms}
        self.ghosts = {g: f for g, f in terms.items() if not f.terms}

    @classmethod
    def single(cls, f: SymbolicFunction, g: GermElement):
        return cls({g: f})

    def components(self) -> dict:
        out = dict(self.ghosts)
        out.update(self.terms)
        return out

    def _map(self, fn) -> "CrossedElement":
        return CrossedElement({g: fn(g, f) for g, f in self.components().items()})

    def __add__(self, other):
        acc = self.components()
        for g, f in other.components().items():
            acc[g] = acc[g] + f if g in acc else f
        return CrossedElement(acc)

    def __neg__(self):
        return self._map(lambda g, f: -f)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return self._map(lambda g, f: f.scale(c))

    def __mul__(self, other):
        return multiply_crossed(self, other)

    def precision(self) -> int:
        return min((f.prec for f in self.components().values()), default=self.EXACT)

    def agrees_with(self, other, prec: int = None) -> bool:
        p = min(self.precision(), other.precision()) if prec is None else prec
        for g in set(self.terms) | set(other.terms):
            a = self.terms.get(g, SymbolicFunction({}, p))
            b = other.terms.get(g, SymbolicFunction({}, p))
            if not a.agrees_with(b, p):
                return False
        return True

    def identity_component(self) -> SymbolicFunction:
        """The only component a trace sees."""
        for g, f in self.terms.items():
            if g.is_identity():
                return f
        return SymbolicFunction({}, self.precision())

    def __str__(self):
        return crossed_to_text(self)


def multiply_crossed(a: CrossedElement, b: CrossedElement) -> CrossedElement:
    """f1 U*_{g1} f2 U*_{g2} = f1 (f2 o g1) U*_{g2 o g1}."""
    acc = {}
    for g1, f1 in a.components().items():
        for g2, f2 in b.components().items():
            _check_orders(g1, g2)
            g = compose(g2, g1)
            term = f1 * pullback(f2, g1)
            acc[g] = acc[g] + term if g in acc else term
    return CrossedElement(acc)


def _act_gen(gen, g: GermElement, f: SymbolicFunction) -> SymbolicFunction:
    bar, kind, n = gen
    if kind == XKIND:
        return f.d_z(bar).times_y(1, bar)
    if kind == YKIND:
        return f.euler_y(bar)
    if n > g.order - 2:
        raise TruncationError("delta_%d exceeds germ truncation %d" % (n, g.order))
    return delta_multiplier(g, n, bar) * f


def act_hopf(h: HopfElement, a: CrossedElement) -> CrossedElement:
    """Action of H on the crossed product; a monomial g1 g2 ... acts as g1(g2(...))."""
    acc = CrossedElement({g: SymbolicFunction({}, f.prec) for g, f in a.components().items()})
    for m, c in h.terms.items():
        x = a
        for gen in reversed(mono_word(m)):
            x = x._map(lambda g, f: _act_gen(gen, g, f))
        acc = acc + x.scale(c)
    return acc


def verify_action_compatibility(h: HopfElement, a: CrossedElement, b: CrossedElement) -> dict:
    """h(ab) against m(Delta h (a (x) b)), exact up to the shared precision."""
    lhs = act_hopf(h, multiply_crossed(a, b))
    rhs = CrossedElement()
    for (m1, m2), c in hopf_cm.coproduct(h).terms.items():
        rhs = rhs + multiply_crossed(act_hopf(HopfElement.mono(m1), a),
                                     act_hopf(HopfElement.mono(m2), b)).scale(c)
    prec = min(lhs.precision(), rhs.precision())
    return {"passed": lhs.agrees_with(rhs, prec), "precision": prec,
            "h": hopf_cm.to_text(h)}


def random_function(rng: random.Random, prec: int, terms: int = 4, ypow: int = 2) -> SymbolicFunction:
    acc = {}
    for _ in range(terms):
        i = rng.randint(0, prec)
        j = rng.randint(0, prec - i)
        key = (rng.randint(-ypow, ypow), rng.randint(-ypow, ypow), i, j)
        hopf_cm._add(acc, key, Scalar(rng.randint(-4, 4), rng.randint(-1, 1)))
    return SymbolicFunction(acc, prec)


def random_crossed(rng: random.Random, germs, prec: int, terms: int = 2) -> CrossedElement:
    acc = CrossedElement()
    for _ in range(terms):
        acc = acc + CrossedElement.single(random_function(rng, prec), rng.choice(germs))
    return acc


# --- divergence character -----------------------------------------------------

def divergence_character(gen) -> Scalar:
    """delta(g) with int h(a) b dv = int a S~(h)(b) dv for dv = dz dzb dy dyb / (y yb)^2.

    For a vector field V, integration by parts gives delta(V) = -div_dv(V).
    The d_n are multiplication operators and carry no divergence term.
    """
    import sympy

    bar, kind, n = gen
    if kind == DELTA:
        if n < 1:
            raise ValueError("not a generator: %r" % (gen,))
        return Scalar(0)
    if kind not in (XKIND, YKIND):
        raise ValueError("not a generator: %r" % (gen,))
    z, zb, y, yb = sympy.symbols("z zb y yb")
    coords = (z, zb, y, yb)
    rho = 1 / (y * yb) ** 2
    field = {c: 0 for c in coords}
    scale_var = yb if bar else y
    target = (zb if bar else z) if kind == XKIND else scale_var
    field[target] = scale_var
    div = sympy.simplify(sum(sympy.diff(rho * field[c], c) for c in coords) / rho)
    value = sympy.Rational(-div)
    return Scalar(Fraction(int(value.p), int(value.q)))


# --- text serialization -------------------------------------------------------

def germ_to_text(g: GermElement) -> str:
    """'N; c2 c3 ...; cb2 cb3 ...'"""
    return "%d; %s; %s" % (g.order, " ".join(map(str, g.hol)), " ".join(map(str, g.antihol)))


def germ_from_text(s: str) -> GermElement:
    order, hol, anti = (part.strip() for part in s.split(";"))
    return GermElement(int(order), tuple(Scalar.from_text(t) for t in hol.split()),
                       tuple(Scalar.from_text(t) for t in anti.split()))


def function_to_text(f: SymbolicFunction) -> str:
    """'prec | coef a b i j, ...' with y^a yb^b z^i zb^j."""
    body = ", ".join("%s %d %d %d %d" % ((f.terms[k],) + k) for k in sorted(f.terms))
    return "%d | %s" % (f.prec, body)


def function_from_text(s: str) -> SymbolicFunction:
    prec, body = s.split("|")
    terms = {}
    for item in filter(None, (t.strip() for t in body.split(","))):
        c, *idx = item.split()
        terms[tuple(int(v) for v in idx)] = Scalar.from_text(c)
    return SymbolicFunction(terms, int(prec))


def crossed_to_text(a: CrossedElement) -> str:
    """One 'germ => function' line per nonzero component."""
    lines = sorted("%s => %s" % (germ_to_text(g), function_to_text(f)) for g, f in a.terms.items())
    return "\n".join(lines) if lines else "0"


def crossed_from_text(s: str) -> CrossedElement:
    if s.strip() == "0":
        return CrossedElement()
    terms = {}
    for line in s.strip().splitlines():
        g, f = line.split("=>")
        terms[germ_from_text(g)] = function_from_text(f)
    return CrossedElement(terms)


def verify_model_compatibility(seed: int = 0, pairs: int = 30, order: int = 6) -> dict:
    """h(ab) = m(Delta h (a (x) b)) for generators, length-2 monomials and random pairs."""
    rng = random.Random(seed)
    germs = [random_germ(rng, order) for _ in range(2)] + [GermElement.identity(order)]
    gens = list(hopf_cm.DEFAULT_POOL) + [hopf_cm.delta(3), hopf_cm.deltabar(2), hopf_cm.deltabar(3)]
    monos = [m for m in hopf_cm.pbw_monomials(2) if len(hopf_cm.mono_word(m)) == 2]
    cases = [("generators", HopfElement.gen(g)) for g in gens]
    cases += [("degree-2 monomials", HopfElement.mono(m)) for m in monos]
    pool = [h for _, h in cases]
    cases += [("random pairs", rng.choice(pool)) for _ in range(pairs)]
    report = {}
    for family, h in cases:
        a = random_crossed(rng, germs, order - 1)
        b = random_crossed(rng, germs, order - 1)
        res = verify_action_compatibility(h, a, b)
        entry = report.setdefault(family, {"passed": True, "checked": 0, "counterexample": None})
        entry["checked"] += 1
        if not (res["passed"] and res["precision"] >= 1) and entry["passed"]:
            entry["passed"] = False
            entry["counterexample"] = "%s on %s, %s" % (res["h"], crossed_to_text(a), crossed_to_text(b))
    return report
