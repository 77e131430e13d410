"""
Relative Lie algebra cohomology of formal holomorphic and antiholomorphic
vector fields on C with respect to SO(2).

The field x^n d_x is e_{n-1}; its dual 1-form is w^{n-1}.  Brackets read
[e_i, e_j] = (j - i) e_{i+j}, the two sectors commute, and the coboundary on
generators is d w^k = -sum_{i<j, i+j=k} (j - i) w^i w^j.  A generator is a
pair (sector, index) with sector 0 holomorphic and 1 antiholomorphic; the
global order is w^{-1} < w^0 < ... < wb^{-1} < wb^0 < ....
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from rrgroupoid.exact_core import Scalar, SparseMatrix, ZERO, kernel_basis, rank, span_rank

HOL, ANTIHOL = 0, 1


# --- jet fields -------------------------------------------------------------

@dataclass(frozen=True, order=True)
class JetField:
    """x^n d_x (sector 0) or xb^n d_xb (sector 1), kept only for n <= N."""

    sector: int
    order: int

    def __post_init__(self):
        if self.sector not in (HOL, ANTIHOL) or self.order < 0:
            raise ValueError("bad jet field %r" % (self,))

    @property
    def index(self) -> int:
        return self.order - 1

    def __str__(self):
        x = "xb" if self.sector else "x"
        return "%s^%d d%s" % (x, self.order, x)


def bracket(u: JetField, v: JetField, N: int) -> tuple[dict, bool]:
    """[x^n d, x^m d] = (m - n) x^{n+m-1} d, dropping orders above N.

    Returns ({JetField: coefficient}, dropped).
    """
    if u.sector != v.sector:
        return {}, False
    c = v.order - u.order
    order = u.order + v.order - 1
    if c == 0:
        return {}, False
    if order > N:
        return {}, True
    return {JetField(u.sector, order): c}, False


# --- exterior algebra -----------------------------------------------------------

def _sort_sign(gens):
    """(sign, sorted tuple) of a product of generators, sign 0 on repeats."""
    gens = list(gens)
    if len(set(gens)) != len(gens):
        return 0, ()
    sign = 1
    for i in range(len(gens)):
        for j in range(len(gens) - 1 - i):
            if gens[j] > gens[j + 1]:
                gens[j], gens[j + 1] = gens[j + 1], gens[j]
                sign = -sign
    return sign, tuple(gens)


def gen_text(g) -> str:
    return "%s%d" % ("wb" if g[0] else "w", g[1])


def mono_text(m) -> str:
    return "^".join(gen_text(g) for g in m) if m else "1"


_GEN_RE = re.compile(r"^(wb|w)(-?\d+)$")


def parse_mono(s: str):
    s = s.strip()
    if s == "1":
        return ()
    gens = []
    for part in s.split("^"):
        m = _GEN_RE.match(part.strip())
        if not m:
            raise ValueError("bad generator %r" % part)
        gens.append((1 if m.group(1) == "wb" else 0, int(m.group(2))))
    sign, mono = _sort_sign(gens)
    if sign != 1 or list(mono) != gens:
        raise ValueError("monomial %r is not in canonical order" % s)
    return mono


class LieCochain:
    """Linear combination of canonically ordered exterior monomials."""

    __slots__ = ("terms", "truncated")

    def __init__(self, terms=None, truncated: bool = False):
        acc = {}
        for m, c in (terms or {}).items():
            c = Scalar.promote(c)
            if c:
                acc[m] = c
        self.terms = acc
        self.truncated = truncated

    @classmethod
    def gen(cls, sector: int, index: int, c=1):
        return cls({((sector, index),): c})

    @classmethod
    def one(cls, c=1):
        return cls({(): c})

    @classmethod
    def from_gens(cls, *gens, c=1):
        sign, m = _sort_sign(gens)
        return cls({m: c * sign} if sign else {})

    def __add__(self, other):
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, ZERO) + c
        return LieCochain(acc, self.truncated or other.truncated)

    def __neg__(self):
        return LieCochain({m: -c for m, c in self.terms.items()}, self.truncated)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return LieCochain({m: c * v for m, v in self.terms.items()}, self.truncated)

    def wedge(self, other) -> "LieCochain":
        acc = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                sign, m = _sort_sign(m1 + m2)
                if sign:
                    acc[m] = acc.get(m, ZERO) + c1 * c2 * sign
        return LieCochain(acc, self.truncated or other.truncated)

    __mul__ = wedge

    def __eq__(self, other):
        return isinstance(other, LieCochain) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def degrees(self) -> set:
        return {len(m) for m in self.terms}

    def __str__(self):
        return to_text(self)

    __repr__ = __str__


def to_text(c: LieCochain) -> str:
    if not c.terms:
        return "0"
    return " + ".join("%s*%s" % (c.terms[m], mono_text(m))
                      for m in sorted(c.terms, key=lambda m: (len(m), m)))


def from_text(s: str) -> LieCochain:
    s = s.strip()
    if s == "0":
        return LieCochain()
    acc = {}
    for part in s.split(" + "):
        coef, mono = part.split("*", 1)
        m = parse_mono(mono)
        acc[m] = acc.get(m, ZERO) + Scalar.from_text(coef)
    return LieCochain(acc)


def w(index: int) -> LieCochain:
    return LieCochain.gen(HOL, index)


def wb(index: int) -> LieCochain:
    return LieCochain.gen(ANTIHOL, index)


# --- coboundary and Cartan calculus --------------------------------------------

def _gen_coboundary(g, N: int) -> tuple[dict, list]:
    """d of one generator: (kept terms, pairs lost to truncation)."""
    sector, k = g
    acc = {}
    lost = []
    for i in range(-1, k + 2):
        j = k - i
        if j <= i:
            break
        pair = ((sector, i), (sector, j))
        if j > N - 1:
            lost.append(pair)
            continue
        acc[pair] = Scalar(-(j - i))
    return acc, lost


def coboundary(c: LieCochain, N: int = 3) -> LieCochain:
    """Chevalley-Eilenberg d as an odd derivation.

    A lost term only sets .truncated when it would survive the wedge.
    """
    acc = {}
    dropped = c.truncated
    for m, coef in c.terms.items():
        for p, g in enumerate(m):
            dg, lost = _gen_coboundary(g, N)
            rest = m[:p] + m[p + 1:]
            if any(not set(pair) & set(rest) for pair in lost):
                dropped = True
            for pair, k in dg.items():
                sign, mono = _sort_sign(m[:p] + pair + m[p + 1:])
                if sign:
                    acc[mono] = acc.get(mono, ZERO) + coef * k * (sign * (-1) ** p)
    return LieCochain(acc, dropped)


def weight(c: LieCochain) -> int:
    """Weight of a homogeneous cochain: w^n and wb^n contribute n."""
    weights = {sum(g[1] for g in m) for m in c.terms}
    if len(weights) > 1:
        raise ValueError("cochain is not weight-homogeneous")
    return weights.pop() if weights else 0


J_FIELD = {(HOL, 0): 1, (ANTIHOL, 0): -1}    # x d - xb db
H_FIELD = {(HOL, 0): 1, (ANTIHOL, 0): 1}     # x d + xb db


def contraction(v: dict, c: LieCochain) -> LieCochain:
    """i_v for v = {generator dual: coefficient}, a graded derivation."""
    acc = {}
    for m, coef in c.terms.items():
        for p, g in enumerate(m):
            val = v.get(g)
            if val:
                key = m[:p] + m[p + 1:]
                acc[key] = acc.get(key, ZERO) + coef * val * (-1) ** p
    return LieCochain(acc, c.truncated)


def field_coords(f: JetField) -> dict:
    return {(f.sector, f.index): 1}


def cartan_ops(v, c: LieCochain, N: int = 3) -> tuple[LieCochain, LieCochain]:
    """(i_v c, L_v c) with L_v = i_v d + d i_v."""
    coords = field_coords(v) if isinstance(v, JetField) else v
    i_c = contraction(coords, c)
    lie = contraction(coords, coboundary(c, N)) + coboundary(i_c, N)
    return i_c, lie


# --- graded pieces ----------------------------------------------------------------

def _block_sets(max_index: int):
    gens = range(-1, max_index + 1)
    for size in range(0, max_index + 3):
        yield from itertools.combinations(gens, size)


def monomials(k: int, r: int, N: int, j_balanced: bool = False) -> list:
    """Canonical monomials of degree k and weight r with indices <= N - 1.

    With j_balanced, only those with L_J eigenvalue 0 (equal block weights).
    """
    out = []
    blocks = list(_block_sets(N - 1))
    for hol in blocks:
        if len(hol) > k:
            continue
        for anti in blocks:
            if len(hol) + len(anti) != k or sum(hol) + sum(anti) != r:
                continue
            if j_balanced and sum(hol) != sum(anti):
                continue
            out.append(tuple((HOL, i) for i in hol) + tuple((ANTIHOL, i) for i in anti))
    return sorted(out)


def _vector(c: LieCochain, index: dict) -> dict:
    return {index[m]: v for m, v in c.terms.items()}


def _combo(basis_monos, vec) -> LieCochain:
    return LieCochain({m: v for m, v in zip(basis_monos, vec) if v})


def basic_subcomplex(k: int, r: int = 0, N: int = 3) -> list[LieCochain]:
    """Basis of {c : i_J c = 0, L_J c = 0, weight r} in degree k."""
    if N < 3:
        raise ValueError("truncation order N must be >= 3")
    monos = monomials(k, r, N, j_balanced=True)
    if not monos:
        return []
    if k == 0:
        return [LieCochain.one()]
    targets = monomials(k - 1, r, N)
    tindex = {m: i for i, m in enumerate(targets)}
    cols = [_vector(contraction(J_FIELD, LieCochain({m: 1})), tindex) for m in monos]
    mat = SparseMatrix.from_columns(len(targets), cols)
    return [_combo(monos, vec) for vec in kernel_basis(mat)]


def _coboundary_rank(basis: list[LieCochain], k: int, r: int, N: int) -> tuple[int, list]:
    targets = monomials(k + 1, r, N)
    tindex = {m: i for i, m in enumerate(targets)}
    images = []
    for b in basis:
        db = coboundary(b, N)
        if db.truncated:
            raise ArithmeticError("coboundary left the jet truncation; raise N")
        images.append(db)
    mat = SparseMatrix.from_columns(len(targets), [_vector(x, tindex) for x in images])
    return rank(mat), images


def _as_vector(c: LieCochain, monos: list) -> list:
    index = {m: i for i, m in enumerate(monos)}
    vec = [ZERO] * len(monos)
    for m, v in c.terms.items():
        if m not in index:
            raise ValueError("cochain leaves the expected graded piece")
        vec[index[m]] = v
    return vec


def cocycles(k: int, r: int = 0, N: int = 3) -> list[LieCochain]:
    """Basis of basic weight-r cocycles of degree k."""
    basis = basic_subcomplex(k, r, N)
    if not basis:
        return []
    _, images = _coboundary_rank(basis, k, r, N)
    targets = monomials(k + 1, r, N)
    tindex = {m: i for i, m in enumerate(targets)}
    mat = SparseMatrix.from_columns(len(targets), [_vector(x, tindex) for x in images])
    out = []
    for vec in kernel_basis(mat):
        acc = LieCochain()
        for b, v in zip(basis, vec):
            if v:
                acc = acc + b.scale(v)
        out.append(acc)
    return out


def coboundaries(k: int, r: int = 0, N: int = 3) -> list[LieCochain]:
    """Images d(b) of the basic basis in degree k - 1 (spanning, not independent)."""
    if k == 0:
        return []
    basis = basic_subcomplex(k - 1, r, N)
    return [coboundary(b, N) for b in basis]


def is_coboundary(c: LieCochain, k: int, r: int = 0, N: int = 3) -> bool:
    monos = monomials(k, r, N)
    image = [_as_vector(x, monos) for x in coboundaries(k, r, N)]
    base = span_rank(image, len(monos)) if image else 0
    return span_rank(image + [_as_vector(c, monos)], len(monos)) == base


def is_basic(c: LieCochain, N: int = 3) -> bool:
    i_c, lie = cartan_ops(J_FIELD, c, N)
    return not i_c and not lie


@dataclass
class CohomologyGroup:
    degree: int
    dimension: int
    representatives: list

    def as_dict(self) -> dict:
        return {"degree": self.degree, "dimension": self.dimension,
                "representatives": [to_text(c) for c in self.representatives]}


def _canonical_key(c: LieCochain):
    return sorted((len(m), m) for m in c.terms)


def cohomology_group(k: int, N: int = 3, r: int = 0) -> CohomologyGroup:
    basis = basic_subcomplex(k, r, N)
    if not basis:
        return CohomologyGroup(k, 0, [])
    monos = monomials(k, r, N)
    image = [_as_vector(x, monos) for x in coboundaries(k, r, N) if x.terms]
    current = span_rank(image, len(monos)) if image else 0
    reps = []
    chosen = list(image)
    for z in sorted(cocycles(k, r, N), key=_canonical_key):
        trial = chosen + [_as_vector(z, monos)]
        rk = span_rank(trial, len(monos))
        if rk > current:
            reps.append(z)
            chosen = trial
            current = rk
    d_rank, _ = _coboundary_rank(basis, k, r, N)
    prev = basic_subcomplex(k - 1, r, N) if k else []
    prev_rank = _coboundary_rank(prev, k - 1, r, N)[0] if prev else 0
    dim = len(basis) - d_rank - prev_rank
    assert dim == len(reps), "rank bookkeeping disagrees with representative count"
    return CohomologyGroup(k, dim, reps)


def max_degree(N: int) -> int:
    """Largest exterior degree with any generators at truncation N."""
    return 2 * (N + 1)


def cohomology_table(N: int = 3, degrees=None) -> dict:
    """{k: CohomologyGroup} of the weight-0 basic subcomplex."""
    if N < 3:
        raise ValueError("truncation order N must be >= 3")
    ks = range(0, max_degree(N) + 1) if degrees is None else degrees
    return {k: cohomology_group(k, N) for k in ks}


# the classes listed for H^0, H^2, H^3, H^5
def reference_representatives() -> dict:
    j = w(0) + wb(0)
    return {
        0: LieCochain.one(),
        2: w(-1) * w(1),
        3: (w(-1) * w(1) - wb(-1) * wb(1)) * j,
        5: w(1) * w(-1) * wb(1) * wb(-1) * j,
    }


def matches_class(c: LieCochain, k: int, N: int = 3) -> bool:
    """c is a basic weight-0 cocycle that is not a coboundary."""
    if coboundary(c, N):
        return False
    if not is_basic(c, N) or weight(c) != 0:
        return False
    return not is_coboundary(c, k, 0, N)


def required_order(r: int) -> int:
    """Jet order at which weight-r cochains and their coboundaries are exact."""
    return max(3, r + 3)


def acyclicity_check(r: int, degrees=range(0, 6), N: int = None) -> dict:
    """Every weight-r cocycle c equals d(-i_H c / r)."""
    if r == 0:
        raise ValueError("acyclicity needs r != 0")
    N = max(N or 0, required_order(r))
    report = {"weight": r, "N": N, "passed": True, "checked": 0, "counterexample": None}
    for k in degrees:
        monos = monomials(k, r, N)
        if not monos:
            continue
        targets = monomials(k + 1, r, N)
        tindex = {m: i for i, m in enumerate(targets)}
        cols = []
        for m in monos:
            dm = coboundary(LieCochain({m: 1}), N)
            if dm.truncated:
                raise ArithmeticError("coboundary left the jet truncation")
            cols.append(_vector(dm, tindex))
        mat = SparseMatrix.from_columns(len(targets), cols)
        for vec in kernel_basis(mat):
            c = _combo(monos, vec)
            report["checked"] += 1
            primitive = contraction(H_FIELD, c).scale(Scalar(-1) / r)
            if coboundary(primitive, N) != c:
                report["passed"] = False
                report["counterexample"] = to_text(c)
                return report
    return report
