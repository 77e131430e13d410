"""
Cyclic-module structure on the cochain spaces H^{(x)n}: faces, degeneracies,
the cyclicity operator built from the twisted antipode, Hochschild b and
Connes B.
"""

from __future__ import annotations

import itertools
import random

from rrgroupoid.hopf_cm import (
    CMHopfAlgebra, DEFAULT, HopfElement, TensorElement, X, Y, delta, deltabar,
    mono_counit, tensor_to_text, _add,
)


class CyclicCochain(TensorElement):
    """A TensorElement viewed as a cochain of degree n."""

    __slots__ = ()

    @classmethod
    def of(cls, t: TensorElement) -> "CyclicCochain":
        c = cls(t.n)
        c.terms = t.terms
        return c

    @property
    def degree(self) -> int:
        return self.n

    def __add__(self, other):
        return CyclicCochain.of(TensorElement.__add__(self, other))

    def __neg__(self):
        return CyclicCochain.of(TensorElement.__neg__(self))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return CyclicCochain.of(TensorElement.scale(self, c))


def cochain(*factors: HopfElement) -> CyclicCochain:
    return CyclicCochain.of(TensorElement.pure(*factors))


def cochain_text(c: TensorElement) -> str:
    return "deg %d: %s" % (c.n, tensor_to_text(c))


_ONE_MONO = ()


def face(i: int, c: TensorElement, algebra: CMHopfAlgebra = DEFAULT) -> CyclicCochain:
    """delta^i: H^{(x)(n-1)} -> H^{(x)n}, 0 <= i <= n."""
    n = c.n + 1
    if not 0 <= i <= n:
        raise IndexError("face index %d out of range 0..%d" % (i, n))
    if i == 0:
        terms = {(_ONE_MONO,) + k: v for k, v in c.terms.items()}
    elif i == n:
        terms = {k + (_ONE_MONO,): v for k, v in c.terms.items()}
    else:
        return CyclicCochain.of(algebra.apply_factor(c, i - 1, algebra.mono_coproduct_tensor))
    return CyclicCochain.of(TensorElement(n, terms))


def degeneracy(i: int, c: TensorElement) -> CyclicCochain:
    """sigma_i: H^{(x)(n+1)} -> H^{(x)n}, counit on factor i+1, 0 <= i <= n."""
    n = c.n - 1
    if n < 0 or not 0 <= i <= n:
        raise IndexError("degeneracy index %d out of range for degree %d" % (i, c.n))
    acc = {}
    for k, v in c.terms.items():
        if mono_counit(k[i]):
            _add(acc, k[:i] + k[i + 1:], v)
    return CyclicCochain.of(TensorElement(n, acc))


def iterated_coproduct(h_mono, n: int, algebra: CMHopfAlgebra = DEFAULT) -> TensorElement:
    """Delta^{n-1}: H -> H^{(x)n}, right-nested."""
    t = TensorElement(1, {(h_mono,): 1})
    for _ in range(n - 1):
        t = algebra.apply_factor(t, t.n - 1, algebra.mono_coproduct_tensor)
    return t


def iterated_coproduct_left(h_mono, n: int, algebra: CMHopfAlgebra = DEFAULT) -> TensorElement:
    """Left-nested variant; equal to the right-nested one by coassociativity."""
    t = TensorElement(1, {(h_mono,): 1})
    for _ in range(n - 1):
        t = algebra.apply_factor(t, 0, algebra.mono_coproduct_tensor)
    return t


def cyclic_op(c: TensorElement, algebra: CMHopfAlgebra = DEFAULT, twisted=None) -> CyclicCochain:
    """tau_n(h1 (x) ... (x) hn) = Delta^{n-1}(S~ h1) . (h2 (x) ... (x) hn (x) 1).

    ``twisted`` overrides the twisted antipode (used for negative controls).
    """
    n = c.n
    if n < 1:
        raise ValueError("cyclic operator needs degree >= 1")
    twist = twisted or algebra.twisted_antipode
    acc = TensorElement(n)
    cache = {}
    for k, v in c.terms.items():
        first = k[0]
        if first not in cache:
            st = twist(HopfElement.mono(first))
            img = TensorElement(n)
            for m, cm in st.terms.items():
                img = img + iterated_coproduct(m, n, algebra).scale(cm)
            cache[first] = img
        tail = TensorElement(n, {k[1:] + (_ONE_MONO,): v})
        acc = acc + algebra.tensor_multiply(cache[first], tail)
    return CyclicCochain.of(acc)


def cyclic_power(c: TensorElement, power: int, **kw) -> CyclicCochain:
    for _ in range(power):
        c = cyclic_op(c, **kw)
    return CyclicCochain.of(c)


def hochschild_b(c: TensorElement, algebra: CMHopfAlgebra = DEFAULT) -> CyclicCochain:
    """b = sum_{i=0}^{n+1} (-1)^i delta^i."""
    n = c.n
    acc = TensorElement(n + 1)
    for i in range(n + 2):
        f = face(i, c, algebra)
        acc = acc + (f if i % 2 == 0 else -f)
    return CyclicCochain.of(acc)


def connes_B(c: TensorElement, algebra: CMHopfAlgebra = DEFAULT) -> CyclicCochain:
    """B = sum_{i=0}^{n} (-1)^{ni} tau_n^i B0,  B0 = sigma_n tau_{n+1} + (-1)^n sigma_n."""
    n = c.n - 1
    if n < 0:
        raise ValueError("B needs degree >= 1")
    b0 = degeneracy(n, cyclic_op(c, algebra)) + degeneracy(n, c).scale((-1) ** n)
    acc = TensorElement(n)
    term = b0
    for i in range(n + 1):
        if i:
            term = cyclic_op(term, algebra)
        acc = acc + term.scale((-1) ** (n * i))
    return CyclicCochain.of(acc)


def lambda_op(c: TensorElement, algebra: CMHopfAlgebra = DEFAULT) -> CyclicCochain:
    """Signed cyclic operator (-1)^n tau_n; cyclic cochains are its fixed points."""
    return cyclic_op(c, algebra).scale((-1) ** c.n)


def is_cyclic(c: TensorElement, algebra: CMHopfAlgebra = DEFAULT) -> bool:
    return lambda_op(c, algebra) == c


def cyclic_projection(c: TensorElement, algebra: CMHopfAlgebra = DEFAULT) -> CyclicCochain:
    """Average over the signed cyclic group: a cyclic cochain (n+1 times the projector)."""
    acc = TensorElement(c.n)
    t = c
    for _ in range(c.n + 1):
        acc = acc + t
        t = lambda_op(t, algebra)
    return CyclicCochain.of(acc)


# --- sample family and identity suites ----------------------------------------

SAMPLE_FACTORS = ("1", "X", "Y", "d1", "d2", "db1")


def _factor(name: str) -> HopfElement:
    return {
        "1": HopfElement.unit(),
        "X": HopfElement.gen(X),
        "Y": HopfElement.gen(Y),
        "d1": HopfElement.gen(delta(1)),
        "d2": HopfElement.gen(delta(2)),
        "db1": HopfElement.gen(deltabar(1)),
    }[name]


def pure_samples(n: int) -> list[CyclicCochain]:
    """All pure tensors of degree n with factors from the sample set."""
    return [cochain(*(_factor(f) for f in combo))
            for combo in itertools.product(SAMPLE_FACTORS, repeat=n)]


def random_samples(n: int, count: int = 50, seed: int = 0) -> list[CyclicCochain]:
    """Pseudorandom combinations of pure tensors of degree n (fixed seed)."""
    rng = random.Random(seed * 1000 + n)
    out = []
    for _ in range(count):
        acc = TensorElement(n)
        for _ in range(rng.randint(1, 3)):
            factors = [_factor(rng.choice(SAMPLE_FACTORS)) for _ in range(n)]
            acc = acc + TensorElement.pure(*factors).scale(rng.randint(-3, 3) or 1)
        out.append(CyclicCochain.of(acc))
    return out


def sample_family(n: int, count: int = 50, seed: int = 0, pure: bool = True) -> list:
    return (pure_samples(n) if pure else []) + random_samples(n, count, seed)


def _first_failure(samples, check):
    for c in samples:
        if not check(c):
            return cochain_text(c)
    return None


def verify_cyclicity(n_max: int, samples: int = 50, seed: int = 0,
                     algebra: CMHopfAlgebra = DEFAULT, twisted=None, pure: bool = True) -> dict:
    """(tau_n)^{n+1} = id for 1 <= n <= n_max on the sample family."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    report = {}
    for n in range(1, n_max + 1):
        fam = sample_family(n, samples, seed, pure)
        bad = _first_failure(
            fam, lambda c: cyclic_power(c, n + 1, algebra=algebra, twisted=twisted) == c)
        report["tau_%d^%d" % (n, n + 1)] = {"passed": bad is None, "checked": len(fam),
                                            "counterexample": bad}
    return report


def verify_bicomplex(max_degree: int = 3, samples: int = 50, seed: int = 0,
                     algebra: CMHopfAlgebra = DEFAULT, pure: bool = True) -> dict:
    """b^2 = 0, B^2 = 0, bB + Bb = 0 on the sample family up to max_degree."""
    report = {}
    zero = lambda t: not t.terms
    bb_bad = None
    BB_bad = None
    anti_bad = None
    counts = {"b^2": 0, "B^2": 0, "bB+Bb": 0}
    for n in range(0, max_degree + 1):
        fam = sample_family(n, samples, seed, pure) if n else [CyclicCochain.of(TensorElement.scalar(1))]
        for c in fam:
            counts["b^2"] += 1
            if bb_bad is None and not zero(hochschild_b(hochschild_b(c, algebra), algebra)):
                bb_bad = cochain_text(c)
            if n >= 2:
                counts["B^2"] += 1
                if BB_bad is None and not zero(connes_B(connes_B(c, algebra), algebra)):
                    BB_bad = cochain_text(c)
            if n >= 1:
                counts["bB+Bb"] += 1
                s = hochschild_b(connes_B(c, algebra), algebra) + connes_B(hochschild_b(c, algebra), algebra)
                if anti_bad is None and not zero(s):
                    anti_bad = cochain_text(c)
    report["b^2"] = {"passed": bb_bad is None, "checked": counts["b^2"], "counterexample": bb_bad}
    report["B^2"] = {"passed": BB_bad is None, "checked": counts["B^2"], "counterexample": BB_bad}
    report["bB+Bb"] = {"passed": anti_bad is None, "checked": counts["bB+Bb"],
                       "counterexample": anti_bad}
    return report


def verify_simplicial(max_degree: int = 2, samples: int = 20, seed: int = 0,
                      algebra: CMHopfAlgebra = DEFAULT) -> dict:
    """Cosimplicial identities among faces and degeneracies on samples."""
    bad = None
    checked = 0
    for n in range(0, max_degree + 1):
        fam = random_samples(n, samples, seed) if n else [CyclicCochain.of(TensorElement.scalar(1))]
        for c in fam:
            m = n + 1  # faces land in degree m, indices 0..m
            for j in range(m + 2):
                for i in range(j):
                    checked += 1
                    lhs = face(j, face(i, c, algebra), algebra)
                    rhs = face(i, face(j - 1, c, algebra), algebra)
                    if lhs != rhs and bad is None:
                        bad = "delta^%d delta^%d on %s" % (j, i, cochain_text(c))
            if n >= 1:
                # sigma_j delta^i relations
                for i in range(n + 1):
                    for j in range(n):
                        checked += 1
                        lhs = degeneracy(j, face(i, c, algebra))
                        if i < j:
                            rhs = face(i, degeneracy(j - 1, c), algebra) if n >= 1 and j - 1 <= n - 1 else None
                        elif i == j or i == j + 1:
                            rhs = c
                        else:
                            rhs = face(i - 1, degeneracy(j, c), algebra)
                        if rhs is not None and lhs != rhs and bad is None:
                            bad = "sigma_%d delta^%d on %s" % (j, i, cochain_text(c))
    return {"simplicial": {"passed": bad is None, "checked": checked, "counterexample": bad}}
