"""Floating-point crossed products of surfaces by Moebius pseudogroups.

Elements of C_c(M) x| Gamma are finite sums f U*_psi.  Functions are closed
forms evaluated together with their differential (a "jet"), forms are dicts
from sorted basis words to complex arrays, and products follow

    (alpha U*_psi)(beta U*_phi) = alpha ^ (beta o psi) U*_{phi o psi}.

Two spaces are modelled: a surface chart with coordinates (z, zb) and the
metric bundle P = C x R with coordinates (z, zb, r), on which a germ acts by
z -> psi(z), r -> r - ln|psi'(z)|^2 / 2.  Integrals only see the component
of the identity germ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import sympy

TWO_PI_I = 2j * math.pi


# Moebius maps -----------------------------------------------------------------

@dataclass(frozen=True)
class MobiusMap:
    """z -> (a z + b) / (c z + d) with ad - bc = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if abs(self.a * self.d - self.b * self.c - 1) > 1e-12:
            raise ValueError("Moebius determinant must be 1")

    @classmethod
    def from_matrix(cls, a, b, c, d) -> "MobiusMap":
        s = np.sqrt(complex(a * d - b * c))
        if s == 0:
            raise ValueError("degenerate Moebius map")
        return cls(a / s, b / s, c / s, d / s)

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def rotation(cls, angle: float) -> "MobiusMap":
        return cls.from_matrix(np.exp(1j * angle), 0, 0, 1)

    def __call__(self, z):
        return (self.a * z + self.b) / (self.c * z + self.d)

    def deriv(self, z):
        return 1 / (self.c * z + self.d) ** 2

    def dlog_deriv(self, z):
        """psi'' / psi'."""
        return -2 * self.c / (self.c * z + self.d)

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """self o other."""
        m = self.matrix() @ other.matrix()
        return MobiusMap.from_matrix(*m.ravel())

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def same_as(self, other: "MobiusMap", tol: float = 1e-9) -> bool:
        m, n = self.matrix(), other.matrix()
        return bool(np.allclose(m, n, atol=tol) or np.allclose(m, -n, atol=tol))

    def is_identity(self, tol: float = 1e-9) -> bool:
        return self.same_as(MobiusMap.identity(), tol)


GLUE = MobiusMap(0, 1j, 1j, 0)    # z -> 1/z


# spaces and forms -----------------------------------------------------------------

def _wedge_sign(word):
    word = list(word)
    if len(set(word)) != len(word):
        return 0, ()
    sign = 1
    for i in range(len(word)):
        for j in range(len(word) - 1 - i):
            if word[j] > word[j + 1]:
                word[j], word[j + 1] = word[j + 1], word[j]
                sign = -sign
    return sign, tuple(word)


def wedge(a: dict, b: dict) -> dict:
    out = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            sign, key = _wedge_sign(ka + kb)
            if sign:
                out[key] = out.get(key, 0) + sign * va * vb
    return out


def form_add(a: dict, b: dict, scale: complex = 1) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + scale * v
    return out


def form_scale(a: dict, s) -> dict:
    return {k: s * v for k, v in a.items()}


class Surface:
    """A chart with coordinates (z, zb); basis 1-forms 0 = dz, 1 = dzb."""

    dim = 2

    def act(self, psi: MobiusMap, p):
        return (psi(p[0]),)

    def pull_basis(self, psi: MobiusMap, p) -> list:
        d = psi.deriv(p[0])
        return [{(0,): d}, {(1,): np.conj(d)}]


class MetricBundle:
    """P = C x R with basis 0 = dz, 1 = dzb, 2 = dr."""

    dim = 3

    def act(self, psi: MobiusMap, p):
        z, r = p
        return (psi(z), r - 0.5 * np.log(np.abs(psi.deriv(z)) ** 2))

    def pull_basis(self, psi: MobiusMap, p) -> list:
        z = p[0]
        d = psi.deriv(z)
        k = psi.dlog_deriv(z)
        return [{(0,): d}, {(1,): np.conj(d)}, {(2,): np.ones_like(d), (0,): -0.5 * k, (1,): -0.5 * np.conj(k)}]


SURFACE = Surface()
BUNDLE = MetricBundle()


def pull_form(space, form_fn, psi: MobiusMap):
    """(form o psi)(p) from a form evaluator."""
    if psi.is_identity(0):
        return form_fn

    def fn(p):
        alpha = form_fn(space.act(psi, p))
        basis = space.pull_basis(psi, p)
        out = {}
        for key, coef in alpha.items():
            acc = {(): coef}
            for i in key:
                acc = wedge(acc, basis[i])
            out = form_add(out, acc)
        return out
    return fn


# smooth samples (jets) -------------------------------------------------------------

X_, Y_, R_ = sympy.symbols("x y r", real=True)


class SmoothSample:
    """A closed-form function with its differential.

    ``expr`` is a sympy expression in x, y (and r on P); ``support`` is a
    free-form description.  Calling the sample on a point tuple returns
    (value, df) with df a 1-form dict.
    """

    def __init__(self, expr, space=SURFACE, support: str = "global"):
        self.expr = sympy.sympify(expr)
        self.space = space
        self.support = support
        coords = [X_, Y_] + ([R_] if space.dim == 3 else [])
        fx, fy = sympy.diff(self.expr, X_), sympy.diff(self.expr, Y_)
        parts = [self.expr, (fx - sympy.I * fy) / 2, (fx + sympy.I * fy) / 2]
        if space.dim == 3:
            parts.append(sympy.diff(self.expr, R_))
        self._fns = [sympy.lambdify(coords, e, "numpy") for e in parts]

    def _args(self, p):
        z = np.asarray(p[0], dtype=complex)
        args = [z.real, z.imag]
        if self.space.dim == 3:
            args.append(np.asarray(p[1], dtype=float))
        return args

    def __call__(self, p):
        args = self._args(p)
        shape = np.shape(p[0])
        vals = [np.broadcast_to(np.asarray(f(*args), dtype=complex), shape) for f in self._fns]
        df = {(i,): v for i, v in enumerate(vals[1:])}
        return vals[0], df


class RadialCutoff:
    """Partition of unity on the sphere: rho1 = cos(pi s/2), rho2 = sin(pi s/2).

    s goes smoothly from 0 (|z| <= 1/k) to 1 (|z| >= k) as a function of ln|z|,
    so rho1(z) = rho2(1/z) and rho1^2 + rho2^2 = 1.
    """

    def __init__(self, which: int, k: float = 4.0):
        self.which = which
        self.k = k
        self.space = SURFACE
        self.support = "|z| <= %g" % k if which == 1 else "|z| >= %g" % (1 / k)

    @staticmethod
    def _h(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = np.exp(-1 / t[pos])
        return out

    @staticmethod
    def _dh(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = np.exp(-1 / t[pos]) / t[pos] ** 2
        return out

    def _s(self, z):
        r = np.abs(z)
        with np.errstate(divide="ignore"):
            t = (np.log(r) + math.log(self.k)) / (2 * math.log(self.k))
        t = np.nan_to_num(t, nan=0.0, neginf=-1.0, posinf=2.0)
        h0, h1 = self._h(t), self._h(1 - t)
        s = h0 / (h0 + h1)
        ds_dt = (self._dh(t) * h1 + h0 * self._dh(1 - t)) / (h0 + h1) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            ds_dr = np.where(r > 0, ds_dt / (2 * math.log(self.k) * r), 0.0)
        return s, ds_dr, r

    def __call__(self, p):
        z = np.asarray(p[0], dtype=complex)
        s, ds_dr, r = self._s(z)
        if self.which == 1:
            val, dval = np.cos(np.pi * s / 2), -np.sin(np.pi * s / 2) * np.pi / 2 * ds_dr
        else:
            val, dval = np.sin(np.pi * s / 2), np.cos(np.pi * s / 2) * np.pi / 2 * ds_dr
        with np.errstate(divide="ignore", invalid="ignore"):
            dz = np.where(r > 0, dval * np.conj(z) / (2 * r), 0.0)
            dzb = np.where(r > 0, dval * z / (2 * r), 0.0)
        return val.astype(complex), {(0,): dz, (1,): dzb}


def _const_jet(c, space):
    def jet(p):
        shape = np.shape(p[0])
        return np.full(shape, c, dtype=complex), {}
    return jet


def _pull_jet(space, jet, psi: MobiusMap):
    if psi.is_identity(0):
        return jet
    pull_df = pull_form(space, lambda q: jet(q)[1], psi)

    def fn(p):
        v, _ = jet(space.act(psi, p))
        return v, pull_df(p)
    return fn


def _mul_jets(j1, j2):
    def fn(p):
        v1, d1 = j1(p)
        v2, d2 = j2(p)
        return v1 * v2, form_add(form_scale(d1, v2), form_scale(d2, v1))
    return fn


def _scale_jet(jet, c):
    def fn(p):
        v, d = jet(p)
        return c * v, form_scale(d, c)
    return fn


# crossed-product elements -------------------------------------------------------

class NcElement:
    """Sum of f U*_psi with f given by jets."""

    def __init__(self, terms=(), space=SURFACE):
        self.terms = list(terms)
        self.space = space

    @classmethod
    def single(cls, f, psi: MobiusMap | None = None, space=None):
        space = space or getattr(f, "space", SURFACE)
        return cls([(f, psi or MobiusMap.identity())], space)

    @classmethod
    def constant(cls, c=1.0, psi: MobiusMap | None = None, space=SURFACE):
        return cls([(_const_jet(c, space), psi or MobiusMap.identity())], space)

    def __add__(self, other):
        return NcElement(self.terms + other.terms, self.space)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return NcElement([(_scale_jet(f, c), psi) for f, psi in self.terms], self.space)

    def __mul__(self, other):
        out = []
        for f1, p1 in self.terms:
            for f2, p2 in other.terms:
                out.append((_mul_jets(f1, _pull_jet(self.space, f2, p1)), p2.compose(p1)))
        return NcElement(out, self.space)

    def form(self) -> "NcForm":
        return NcForm([(lambda p, f=f: {(): f(p)[0]}, psi) for f, psi in self.terms], self.space)

    def d(self) -> "NcForm":
        return NcForm([(lambda p, f=f: f(p)[1], psi) for f, psi in self.terms], self.space)

    def partial(self, bar: int = 0) -> "NcForm":
        """The dz (bar = 0) or dzb (bar = 1) part of d."""
        return NcForm([(lambda p, f=f: {k: v for k, v in f(p)[1].items() if k == (bar,)}, psi)
                       for f, psi in self.terms], self.space)

    def evaluate(self, p) -> list:
        """[(psi, value array)] with equal germs merged."""
        groups = []
        for f, psi in self.terms:
            v = f(p)[0]
            for i, (q, acc) in enumerate(groups):
                if q.same_as(psi):
                    groups[i] = (q, acc + v)
                    break
            else:
                groups.append((psi, v))
        return groups


class NcForm:
    """Sum of alpha U*_psi with alpha a form evaluator."""

    def __init__(self, terms=(), space=SURFACE):
        self.terms = list(terms)
        self.space = space

    @classmethod
    def global_form(cls, fn, space=SURFACE) -> "NcForm":
        return cls([(fn, MobiusMap.identity())], space)

    def __add__(self, other):
        return NcForm(self.terms + other.terms, self.space)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return NcForm([(lambda p, a=a: form_scale(a(p), c), psi) for a, psi in self.terms], self.space)

    def __mul__(self, other):
        if isinstance(other, NcElement):
            other = other.form()
        out = []
        for a1, p1 in self.terms:
            for a2, p2 in other.terms:
                pulled = pull_form(self.space, a2, p1)
                out.append((lambda p, a1=a1, pulled=pulled: wedge(a1(p), pulled(p)), p2.compose(p1)))
        return NcForm(out, self.space)

    def __rmul__(self, other):
        if isinstance(other, NcElement):
            return other.form() * self
        return NotImplemented


def _as_form(x):
    return x.form() if isinstance(x, NcElement) else x


def product(*factors) -> NcForm:
    acc = _as_form(factors[0])
    for f in factors[1:]:
        acc = acc * _as_form(f)
    return acc


# quadrature ------------------------------------------------------------------------

@dataclass
class Quadrature:
    points: tuple
    weights: np.ndarray       # for dx dy (dr)
    label: str


def sphere_quadrature(n: int) -> Quadrature:
    """The whole chart C = S^2 minus a point: z = tan(t/2) e^{i phi}.

    Gauss-Legendre in t on (0, pi), trapezoid in phi.
    """
    t, wt = np.polynomial.legendre.leggauss(n)
    t = (t + 1) * np.pi / 2
    wt = wt * np.pi / 2
    phi = np.arange(2 * n) * np.pi / n
    wphi = np.full(2 * n, np.pi / n)
    T, PHI = np.meshgrid(t, phi, indexing="ij")
    r = np.tan(T / 2)
    jac = r * 0.5 / np.cos(T / 2) ** 2
    W = np.outer(wt, wphi) * jac
    return Quadrature((r * np.exp(1j * PHI),), W, "sphere n=%d" % n)


def box_quadrature(n: int, half_width: float = 6.0, center: complex = 0) -> Quadrature:
    x, w = np.polynomial.legendre.leggauss(n)
    x, w = x * half_width, w * half_width
    X, Y = np.meshgrid(x, x, indexing="ij")
    return Quadrature((center + X + 1j * Y,), np.outer(w, w), "box n=%d" % n)


def bundle_quadrature(n: int, half_width: float = 3.5, r_half_width: float = 3.5) -> Quadrature:
    x, w = np.polynomial.legendre.leggauss(n)
    xz, wz = x * half_width, w * half_width
    xr, wr = x * r_half_width, w * r_half_width
    X, Y, Rr = np.meshgrid(xz, xz, xr, indexing="ij")
    W = wz[:, None, None] * wz[None, :, None] * wr[None, None, :]
    return Quadrature((X + 1j * Y, Rr), W, "P-box n=%d" % n)


def integrate(form: NcForm, quad: Quadrature) -> complex:
    """Integral of the identity-germ component of a top-degree form.

    dz ^ dzb = -2i dx ^ dy, and on P the top word is dz ^ dzb ^ dr.
    """
    top = tuple(range(form.space.dim))
    total = 0j
    for fn, psi in form.terms:
        if not psi.is_identity():
            continue
        alpha = fn(quad.points)
        coef = alpha.get(top)
        if coef is None:
            continue
        total += -2j * np.sum(quad.weights * coef)
    return complex(total)


# volume forms ------------------------------------------------------------------------

class VolumeForm:
    """nu = rho dz ^ dzb / 2i on the chart, with rho given in closed form."""

    def __init__(self, rho_expr, label: str = "rho"):
        self.expr = sympy.sympify(rho_expr)
        self.label = label
        z_der = lambda e: (sympy.diff(e, X_) - sympy.I * sympy.diff(e, Y_)) / 2
        zb_der = lambda e: (sympy.diff(e, X_) + sympy.I * sympy.diff(e, Y_)) / 2
        log_rho = sympy.log(self.expr)
        self._rho = sympy.lambdify([X_, Y_], self.expr, "numpy")
        self._dz_log = sympy.lambdify([X_, Y_], sympy.simplify(z_der(log_rho)), "numpy")
        self._lap_log = sympy.lambdify([X_, Y_], sympy.simplify(zb_der(z_der(log_rho))), "numpy")

    def rho(self, z):
        z = np.asarray(z, dtype=complex)
        return np.broadcast_to(np.asarray(self._rho(z.real, z.imag), dtype=float), z.shape)

    def dz_log(self, z):
        z = np.asarray(z, dtype=complex)
        return np.broadcast_to(np.asarray(self._dz_log(z.real, z.imag), dtype=complex), z.shape)

    def curvature_coefficient(self, z):
        """(ln rho)_{z zb}: R = this * dz ^ dzb."""
        z = np.asarray(z, dtype=complex)
        return np.broadcast_to(np.asarray(self._lap_log(z.real, z.imag), dtype=complex), z.shape)

    def rescaled(self, u_expr, label: str = "rescaled") -> "VolumeForm":
        return VolumeForm(self.expr * sympy.exp(u_expr), label)

    def log_ratio_derivative(self, psi: MobiusMap, z):
        """d/dz ln( rho(psi) |psi'|^2 / rho )."""
        return self.dz_log(psi(z)) * psi.deriv(z) + psi.dlog_deriv(z) - self.dz_log(z)

    def log_ratio(self, psi: MobiusMap, z):
        return np.log(self.rho(psi(z)) * np.abs(psi.deriv(z)) ** 2 / self.rho(z))


def round_sphere() -> VolumeForm:
    return VolumeForm(4 / (1 + X_ ** 2 + Y_ ** 2) ** 2, "round")


def flat() -> VolumeForm:
    return VolumeForm(sympy.Integer(1), "flat")


# modular derivation, delta^nu, curvature --------------------------------------------

def modular_derivation(nu: VolumeForm, a: NcElement) -> NcElement:
    """D(f U*_psi) = ln( nu o psi / nu ) f U*_psi."""
    out = []
    for f, psi in a.terms:
        def jet(p, f=f, psi=psi):
            z = p[0]
            ell = nu.log_ratio(psi, z)
            ell_z = nu.log_ratio_derivative(psi, z)
            v, d = f(p)
            dl = {(0,): ell_z, (1,): np.conj(ell_z)}
            return ell * v, form_add(form_scale(d, ell), form_scale(dl, v))
        out.append((jet, psi))
    return NcElement(out, a.space)


def delta_nu(nu: VolumeForm, a: NcElement) -> NcForm:
    """delta(f U*_psi) = d ln psi' f U*_psi - [d ln rho, f U*_psi] (dz parts)."""
    out = []
    for f, psi in a.terms:
        def fn(p, f=f, psi=psi):
            return {(0,): nu.log_ratio_derivative(psi, p[0]) * f(p)[0]}
        out.append((fn, psi))
    return NcForm(out, a.space)


def curvature(nu: VolumeForm) -> NcForm:
    return NcForm.global_form(lambda p: {(0, 1): nu.curvature_coefficient(p[0])})


def dlog_rho_form(nu: VolumeForm) -> NcForm:
    return NcForm.global_form(lambda p: {(0,): nu.dz_log(p[0])})


# cyclic cochains -------------------------------------------------------------------

def fundamental_cocycle(a0, a1, a2, quad: Quadrature) -> complex:
    """[Sigma](a0, a1, a2) = int a0 da1 da2."""
    return integrate(product(a0, a1.d(), a2.d()), quad)


def tau_nu(nu: VolumeForm, a0, a1, a2, quad: Quadrature) -> complex:
    first = product(a0, a1.d(), delta_nu(nu, a2)) + product(a0, delta_nu(nu, a1), a2.d())
    return integrate(first, quad) + integrate(product(a2, a0, a1, curvature(nu)), quad)


def euler_cocycle(nu: VolumeForm, a0, a1, a2, quad: Quadrature) -> complex:
    """(1/2 pi i) tau^nu."""
    return tau_nu(nu, a0, a1, a2, quad) / TWO_PI_I


def one_cochain(omega: NcForm, a0, a1, quad: Quadrature) -> complex:
    """phi(a0, a1) = int (a0 da1 - a1 da0) omega."""
    return integrate(product(a0, a1.d(), omega) - product(a1, a0.d(), omega), quad)


def hochschild_b(cochain, args: list) -> complex:
    """(b phi)(a_0..a_{n+1}) for phi taking n+1 arguments."""
    n = len(args) - 1
    total = 0j
    for i in range(n):
        merged = list(args[:i]) + [args[i] * args[i + 1]] + list(args[i + 2:])
        total += (-1) ** i * cochain(*merged)
    total += (-1) ** n * cochain(*([args[-1] * args[0]] + list(args[1:-1])))
    return total


def hochschild_terms(cochain, args: list) -> list:
    n = len(args) - 1
    terms = []
    for i in range(n):
        merged = list(args[:i]) + [args[i] * args[i + 1]] + list(args[i + 2:])
        terms.append(cochain(*merged))
    terms.append(cochain(*([args[-1] * args[0]] + list(args[1:-1]))))
    return terms


def cyclic_residual(cochain, args: list) -> tuple[float, float]:
    """|phi(a_n, a_0, ..) - (-1)^n phi(a_0, ..)| and the scale |phi|."""
    n = len(args) - 1
    base = cochain(*args)
    rot = cochain(*([args[-1]] + list(args[:-1])))
    return abs(rot - (-1) ** n * base), abs(base)


def b_residual(cochain, args: list) -> tuple[float, float]:
    """|b phi| and the scale sum |terms|."""
    terms = hochschild_terms(cochain, args)
    n = len(args) - 2
    total = sum((-1) ** i * t for i, t in enumerate(terms[:-1])) + (-1) ** (n + 1) * terms[-1]
    return abs(total), sum(abs(t) for t in terms)


# sphere atlas and Morita data ------------------------------------------------------

RHO1 = RadialCutoff(1)
RHO2 = RadialCutoff(2)


def _el(f, psi=None):
    return NcElement.single(f, psi)


def _u_glue():
    """U*_g for g(z) = 1/z from U1 to U2."""
    return NcElement.constant(1.0, GLUE)


def _u_glue_inv():
    """U_g = U*_{g^{-1}}."""
    return NcElement.constant(1.0, GLUE.inverse())


def morita_column():
    return [_el(RHO1), _u_glue_inv() * _el(RHO2)]


def morita_row():
    return [_el(RHO1), _el(RHO2) * _u_glue()]


def morita_theta(a: NcElement) -> list:
    """theta(a)_ij = v_i a w_j, a 2x2 matrix over the atlas groupoid."""
    v, w = morita_column(), morita_row()
    return [[v[i] * a * w[j] for j in range(2)] for i in range(2)]


def morita_idempotent() -> list:
    return morita_theta(NcElement.constant(1.0))


def matmul(A: list, B: list) -> list:
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for k in range(len(B[0])):
            acc = NcElement()
            for j in range(len(B)):
                acc = acc + A[i][j] * B[j][k]
            row.append(acc)
        out.append(row)
    return out


def chart_grid(n: int = 40, r_max: float = 6.0) -> tuple:
    """Points in a chart, avoiding the origin."""
    r = np.linspace(0.03, r_max, n)
    phi = np.linspace(0, 2 * np.pi, n, endpoint=False) + 0.1
    R, PHI = np.meshgrid(r, phi, indexing="ij")
    return (R * np.exp(1j * PHI),)


def element_distance(a: NcElement, b: NcElement, p) -> float:
    diff = (a - b).evaluate(p)
    return max((float(np.max(np.abs(v))) for _, v in diff), default=0.0)


def matrix_distance(A: list, B: list, p) -> float:
    return max(element_distance(A[i][j], B[i][j], p) for i in range(len(A)) for j in range(len(A[0])))


def morita_check(a: NcElement, b: NcElement, grid=None) -> dict:
    """e^2 = e and theta(ab) = theta(a) theta(b) on a chart grid."""
    grid = grid or chart_grid()
    e = morita_idempotent()
    idem = matrix_distance(matmul(e, e), e, grid)
    hom = matrix_distance(matmul(morita_theta(a), morita_theta(b)), morita_theta(a * b), grid)
    return {"idempotent": idem, "homomorphism": hom}


# pulled-back cocycle and its coboundary witness ----------------------------------------

def glue_form() -> NcForm:
    """rho2^2 d ln g' = -2 rho2^2 dz / z."""
    def fn(p):
        v, _ = RHO2(p)
        return {(0,): -2 * v ** 2 / p[0]}
    return NcForm.global_form(fn)


def glue_curvature() -> NcForm:
    """d(rho2^2) ^ d ln g'."""
    def fn(p):
        v, d = RHO2(p)
        return {(0, 1): 4 * v * d[(1,)] / p[0]}
    return NcForm.global_form(fn)


def witness_form(nu: VolumeForm) -> NcForm:
    """omega = d ln rho - rho2^2 d ln g'."""
    return dlog_rho_form(nu) - glue_form()


def flat_delta(a: NcElement) -> NcForm:
    """d ln psi' f U*_psi."""
    return NcForm([(lambda p, f=f, psi=psi: {(0,): psi.dlog_deriv(p[0]) * f(p)[0]}, psi)
                   for f, psi in a.terms], a.space)


def _commutator(x, y):
    return product(x, y) - product(y, x)


def pulled_back_tau(a0, a1, a2, quad: Quadrature) -> complex:
    """The flat cocycle pulled back through theta, with the dz-form da2 in the second slot."""
    eta = glue_form()
    left = flat_delta(a2) + _commutator(a2, eta)
    right = flat_delta(a1) + _commutator(a1, eta)
    main = product(a0, a1.d(), left) + product(a0, right, a2.d())
    return integrate(main, quad) - integrate(product(a2, a0, a1, glue_curvature()), quad)


def witness_cochain(omega: NcForm, a0, a1, quad: Quadrature) -> complex:
    """phi(a0, a1) = int (a1 da0 - a0 da1) omega, so that b phi closes the gap."""
    return -one_cochain(omega, a0, a1, quad)


def coboundary_witness_check(nu: VolumeForm, args: list, quad: Quadrature) -> dict:
    """|tau^nu - theta* tau - b phi| with phi the witness cochain of omega."""
    omega = witness_form(nu)
    tau = tau_nu(nu, *args, quad)
    pulled = pulled_back_tau(*args, quad)
    bphi = hochschild_b(lambda x, y: witness_cochain(omega, x, y, quad), args)
    return {"tau": tau, "pulled": pulled, "b_phi": bphi, "residual": abs(tau - pulled - bphi)}


def volume_independence_check(nu1: VolumeForm, nu2: VolumeForm, args: list, quad: Quadrature) -> dict:
    """tau^{nu2} - tau^{nu1} = b phi, phi the witness cochain of d ln(rho2 / rho1)."""
    omega = dlog_rho_form(nu2) - dlog_rho_form(nu1)
    diff = tau_nu(nu2, *args, quad) - tau_nu(nu1, *args, quad)
    bphi = hochschild_b(lambda x, y: witness_cochain(omega, x, y, quad), args)
    return {"difference": diff, "b_phi": bphi, "residual": abs(diff - bphi)}


# Bott projections and the index pairing -------------------------------------------------

_Z = X_ + sympy.I * Y_
_ZB = X_ - sympy.I * Y_


def bott_projection(d: int) -> list:
    """Projection onto the line spanned by (1, z^d), normalized."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    if d == 0:
        one, zero = sympy.Integer(1), sympy.Integer(0)
        entries = [[one, zero], [zero, zero]]
    else:
        n = 1 + (_Z * _ZB) ** d
        entries = [[1 / n, _ZB ** d / n], [_Z ** d / n, (_Z * _ZB) ** d / n]]
    return [[_el(SmoothSample(sympy.expand(e))) for e in row] for row in entries]


def pairing_raw(cocycle, p: list) -> complex:
    """sum_ijk phi(p_ij, p_jk, p_ki)."""
    n = len(p)
    return sum(cocycle(p[i][j], p[j][k], p[k][i]) for i in range(n) for j in range(n) for k in range(n))


def degree_normalization(quad: Quadrature) -> complex:
    """K with K [Sigma](bott(1)) = 1."""
    return 1 / pairing_raw(lambda a, b, c: fundamental_cocycle(a, b, c, quad), bott_projection(1))


def index_pairing(d: int, nu: VolumeForm, quad: Quadrature, K: complex | None = None) -> dict:
    """Pairing of 2[Sigma] + e with bott(d).

    The degree-two normalization K multiplies [Sigma]; e already carries
    1/2 pi i, which equals K (reported as k_times_2pi_i).
    """
    K = degree_normalization(quad) if K is None else K
    p = bott_projection(d)
    sigma = K * pairing_raw(lambda a, b, c: fundamental_cocycle(a, b, c, quad), p)
    euler = pairing_raw(lambda a, b, c: euler_cocycle(nu, a, b, c, quad), p)
    return {"sigma": sigma, "euler": euler, "total": 2 * sigma + euler, "k_times_2pi_i": K * TWO_PI_I}


def riemann_roch_check(d: int, n: int = 48, tol: float = 1e-3) -> dict:
    """The index of the signature operator twisted by bott(d) is 2(d + 1)."""
    quad = sphere_quadrature(n)
    res = index_pairing(d, round_sphere(), quad)
    expected = 2 * (d + 1)
    err = abs(res["total"] - expected)
    return {"degree": d, "value": res["total"], "expected": expected, "error": err,
            "k_times_2pi_i": res["k_times_2pi_i"], "passed": err < tol}


# Gauss-Bonnet -------------------------------------------------------------------------

def gauss_bonnet(nu: VolumeForm, quad: Quadrature) -> complex:
    """(1/2 pi i) int R^nu."""
    return integrate(curvature(nu), quad) / TWO_PI_I


def conformal_factor():
    """A smooth function on the sphere used for rescaling."""
    n = 1 + X_ ** 2 + Y_ ** 2
    return sympy.Rational(3, 10) * 2 * X_ / n + sympy.Rational(1, 5) / n + sympy.Rational(1, 10) * Y_ / n


# metric bundle cocycles ----------------------------------------------------------------

def eta_action(a: NcElement) -> NcForm:
    """delta_1(a) y^{-1} dz on P: d ln psi'(z) f U*_psi."""
    return flat_delta(a)


def bundle_fundamental(a0, a1, a2, a3, quad: Quadrature) -> complex:
    """[P](a0..a3) = int a0 da1 da2 da3."""
    return integrate(product(a0, a1.d(), a2.d(), a3.d()), quad)


def bundle_c1(a0, a1, a2, a3, quad: Quadrature, convention: str = "graded") -> complex:
    """[c1] with delta_1(a) y^{-1} dz written as eta_action(a).

    Moving y^{-1} dz next to the middle delta_1 passes one odd form, so a
    reference middle sign of +1 becomes -1 here ("alternating"); the graded
    convention gives +1.
    """
    middle = {"graded": 1, "alternating": -1}[convention]
    form = (product(a0, a1.d(), a2.d(), eta_action(a3))
            + product(a0, a1.d(), eta_action(a2), a3.d()).scale(middle)
            + product(a0, eta_action(a1), a2.d(), a3.d()))
    return integrate(form, quad)


# random samples -------------------------------------------------------------------------

def random_sphere_sample(rng: np.random.Generator) -> SmoothSample:
    """(c0 + c1 z + c2 zb + c3 |z|^2) / (1 + |z|^2), smooth on the whole sphere."""
    c = [complex(round(x, 3), round(y, 3)) for x, y in rng.uniform(-1, 1, size=(4, 2))]
    num = c[0] + c[1] * _Z + c[2] * _ZB + c[3] * _Z * _ZB
    return SmoothSample(num / (1 + _Z * _ZB))


def random_bundle_sample(rng: np.random.Generator) -> SmoothSample:
    """A Gaussian bump on P times a linear factor."""
    cx, cy, r0, c = (round(v, 3) for v in rng.uniform(-0.3, 0.3, size=4))
    bump = sympy.exp(-(X_ - cx) ** 2 - (Y_ - cy) ** 2 - (R_ - r0) ** 2)
    return SmoothSample(bump * (1 + c * X_ + c * Y_ * R_ / 2), space=BUNDLE, support="Gaussian")


def random_mobius(rng: np.random.Generator, scale: float = 0.2) -> MobiusMap:
    m = np.eye(2) + scale * (rng.uniform(-1, 1, (2, 2)) + 1j * rng.uniform(-1, 1, (2, 2)))
    return MobiusMap.from_matrix(*m.ravel())


def closing_arguments(samples: list, maps: list, space=SURFACE) -> list:
    """Elements f_i U*_{psi_i} where the last germ closes the composite to the identity."""
    total = MobiusMap.identity()
    for psi in maps:
        total = psi.compose(total)
    maps = list(maps) + [total.inverse()]
    return [NcElement([(f, psi)], space) for f, psi in zip(samples, maps)]


# derivation identities ---------------------------------------------------------------

def modular_leibniz_residual(nu: VolumeForm, a: NcElement, b: NcElement, grid=None) -> float:
    """D(ab) - D(a) b - a D(b) on a grid."""
    grid = grid or chart_grid(30, 3.0)
    lhs = modular_derivation(nu, a * b)
    rhs = modular_derivation(nu, a) * b + a * modular_derivation(nu, b)
    return element_distance(lhs, rhs, grid)


def curvature_commutator_residual(nu: VolumeForm, f: SmoothSample, psi: MobiusMap,
                                  grid=None, h: float = 1e-3) -> float:
    """(dbar delta + delta dbar)(f U*_psi) against [R, f U*_psi], dbar by finite differences."""
    z = (grid or chart_grid(12, 2.0))[0]
    L = lambda w: nu.log_ratio_derivative(psi, w)
    F = lambda w: L(w) * f((w,))[0]

    def dbar(g, w):
        dx = (-g(w + 2 * h) + 8 * g(w + h) - 8 * g(w - h) + g(w - 2 * h)) / (12 * h)
        dy = (-g(w + 2j * h) + 8 * g(w + 1j * h) - 8 * g(w - 1j * h) + g(w - 2j * h)) / (12 * h)
        return (dx + 1j * dy) / 2

    val, df = f((z,))
    lhs = L(z) * df[(1,)] - dbar(F, z)
    rhs = (nu.curvature_coefficient(z) - nu.curvature_coefficient(psi(z)) * np.abs(psi.deriv(z)) ** 2) * val
    return float(np.max(np.abs(lhs - rhs)))


def spurious_injection_residual(form: NcForm, quad: Quadrature, rng: np.random.Generator) -> float:
    """Adding terms on non-identity germs must not change the integral."""
    extra = NcForm([(lambda p: {(0, 1): np.ones_like(p[0]) * 5.0}, random_mobius(rng, 0.5)),
                    (lambda p: {(0, 1): p[0] ** 2}, GLUE)], form.space)
    return abs(integrate(form + extra, quad) - integrate(form, quad))


# aggregated report ---------------------------------------------------------------------

def _check(value: float, tol: float, **info) -> dict:
    return {"value": float(value), "tol": tol, "passed": bool(value < tol), **info}


def _relative(pair) -> float:
    res, scale = pair
    return res / scale if scale else res


def surface_cocycle_checks(seed: int = 0, n: int = 48, tol: float = 1e-6) -> dict:
    """b and cyclicity residuals of [Sigma] and tau^nu on the sphere with Moebius germs."""
    rng = np.random.default_rng(seed)
    nu = round_sphere()
    samples = [random_sphere_sample(rng) for _ in range(4)]
    args = closing_arguments(samples, [random_mobius(rng) for _ in range(3)])
    three = args[:2] + [args[2] * args[3]]
    out = {}
    for label, quad in (("n", sphere_quadrature(n)), ("n/2", sphere_quadrature(n // 2))):
        sig = lambda *a: fundamental_cocycle(*a, quad)
        tau = lambda *a: tau_nu(nu, *a, quad)
        out[label] = {"b[Sigma]": _relative(b_residual(sig, args)),
                      "b tau^nu": _relative(b_residual(tau, args)),
                      "cyclic [Sigma]": _relative(cyclic_residual(sig, three)),
                      "cyclic tau^nu": _relative(cyclic_residual(tau, three)),
                      "value": tau(*three)}
    checks = {k: _check(v, tol) for k, v in out["n"].items() if k != "value"}
    drift = abs(out["n"]["value"] - out["n/2"]["value"]) / abs(out["n"]["value"])
    checks["sphere grid halving"] = _check(drift, tol)
    return checks


def bundle_cocycle_checks(seed: int = 0, n: int = 56, tol: float = 1e-3) -> dict:
    """b[P], b[c1] and cyclicity on P = C x R; the alternating sign runs as a negative control."""
    rng = np.random.default_rng(seed)
    samples = [random_bundle_sample(rng) for _ in range(5)]
    args = closing_arguments(samples, [random_mobius(rng, 0.1) for _ in range(4)], BUNDLE)
    four = args[:3] + [args[3] * args[4]]
    fine, coarse = bundle_quadrature(n), bundle_quadrature(n // 2)
    P = lambda *a: bundle_fundamental(*a, fine)
    c1 = lambda *a: bundle_c1(*a, fine)
    alternating = lambda *a: bundle_c1(*a, fine, convention="alternating")
    checks = {"b[P]": _check(_relative(b_residual(P, args)), min(tol, 1e-4)),
              "cyclic [P]": _check(_relative(cyclic_residual(P, four)), tol),
              "b[c1]": _check(_relative(b_residual(c1, args)), tol),
              "cyclic [c1]": _check(_relative(cyclic_residual(c1, four)), tol)}
    coarse_res = max(_relative(b_residual(lambda *a: bundle_fundamental(*a, coarse), args)),
                     _relative(b_residual(lambda *a: bundle_c1(*a, coarse), args)))
    v_fine, v_coarse = c1(*four), bundle_c1(*four, coarse)
    checks["bundle grid halving"] = _check(coarse_res, tol,
                                           value_drift=abs(v_fine - v_coarse) / abs(v_fine))
    # negative control: the alternating middle sign is b-closed but not cyclic
    pb = _relative(b_residual(alternating, args))
    pc = _relative(cyclic_residual(alternating, four))
    checks["alternating-sign c1 is b-closed, not cyclic"] = _check(pb, tol, cyclic_residual=pc,
                                                              passed_control=bool(pc > 100 * tol))
    checks["alternating-sign c1 is b-closed, not cyclic"]["passed"] &= pc > 100 * tol
    return checks


def sphere_morita_checks(seed: int = 0, n: int = 96) -> dict:
    rng = np.random.default_rng(seed)
    nu = round_sphere()
    quad = sphere_quadrature(n)
    a = NcElement.single(random_sphere_sample(rng), random_mobius(rng))
    b = NcElement.single(random_sphere_sample(rng), random_mobius(rng))
    mor = morita_check(a, b)
    # germs fixing 0 and infinity keep the glued cocycle regular
    linear = [MobiusMap.rotation(float(rng.uniform(0, 2 * np.pi))),
              MobiusMap.from_matrix(1.3 * np.exp(0.4j), 0, 0, 1)]
    args = closing_arguments([random_sphere_sample(rng) for _ in range(3)], linear)
    wit = coboundary_witness_check(nu, args, quad)
    flat_args = [NcElement.single(random_sphere_sample(rng)) for _ in range(3)]
    wit_comm = coboundary_witness_check(nu, flat_args, quad)
    margs = closing_arguments([random_sphere_sample(rng) for _ in range(3)],
                              [random_mobius(rng) for _ in range(2)])
    vol = volume_independence_check(nu, nu.rescaled(conformal_factor()), margs, quad)
    return {"e^2 = e": _check(mor["idempotent"], 1e-10),
            "theta homomorphism": _check(mor["homomorphism"], 1e-9),
            "tau - theta* tau - b phi": _check(wit["residual"], 1e-5),
            "tau - theta* tau - b phi, commutative": _check(wit_comm["residual"], 1e-5),
            "volume independence": _check(vol["residual"], 1e-5)}


def gauss_bonnet_checks(n: int = 48, tol: float = 1e-6) -> dict:
    quad = sphere_quadrature(n)
    nu = round_sphere()
    chi = gauss_bonnet(nu, quad)
    chi2 = gauss_bonnet(nu.rescaled(conformal_factor()), quad)
    return {"Gauss-Bonnet round": _check(abs(abs(chi) - 2), tol, chi=chi.real),
            "Gauss-Bonnet conformal": _check(abs(chi2 - chi), tol, chi=chi2.real)}


def derivation_checks(seed: int = 0, tol: float = 1e-8) -> dict:
    rng = np.random.default_rng(seed)
    nu = round_sphere()
    a = NcElement.single(random_sphere_sample(rng), random_mobius(rng))
    b = NcElement.single(random_sphere_sample(rng), random_mobius(rng))
    f, psi = random_sphere_sample(rng), random_mobius(rng)
    quad = sphere_quadrature(32)
    form = product(a, b.d(), b.d())
    return {"modular Leibniz": _check(modular_leibniz_residual(nu, a, b), tol),
            "curvature commutator": _check(curvature_commutator_residual(nu, f, psi), tol),
            "identity-germ rule": _check(spurious_injection_residual(form, quad, rng), 1e-12)}


def riemann_roch_checks(max_degree: int = 2, n: int = 48, tol: float = 1e-3) -> dict:
    out = {}
    for d in range(max_degree + 1):
        r = riemann_roch_check(d, n, tol)
        out["Riemann-Roch d=%d" % d] = _check(r["error"], tol, index=r["value"].real)
    return out


def phi_cocycle_numeric_check(seed: int = 0, n: int = 56, tol: float = 1e-3) -> dict:
    return bundle_cocycle_checks(seed, n, tol)


def surface_report(seed: int = 0, tol: float | None = None, grid: int = 48,
                   bundle_grid: int = 56) -> dict:
    """Every numeric check, keyed by name, each with value/tol/passed."""
    report = {}
    report.update(surface_cocycle_checks(seed, grid, tol=tol or 1e-6))
    report.update(bundle_cocycle_checks(seed, bundle_grid, tol=tol or 1e-3))
    report.update(sphere_morita_checks(seed, 2 * grid))
    report.update(gauss_bonnet_checks(grid, tol=tol or 1e-6))
    report.update(derivation_checks(seed))
    report.update(riemann_roch_checks(2, grid, tol=tol or 1e-3))
    return report
