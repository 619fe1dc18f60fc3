"""Kernel polynomials, their algebraic branches, branch points and hyperbolas.

Two changes of variables turn the kernel ``K(x, y)`` into the kernels
``U(p, q)`` (``p = -x, q = x + y``) and ``V(p, q)`` (``p = -y, q = x + y``).
Each is quadratic in either variable, so over the ``q``-plane it has two
branches ``P_1(q), P_2(q)`` and over the ``p``-plane two branches
``Q_1(p), Q_2(p)``.  Branch 1 is always the root with the smaller real part.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import (ComplexRoots, NotOnCut, OnCut, RegionAmbiguous,
                         SymmetryRequired)
from .model import ModelParams, check_elliptic, is_symmetric

CUT_TOL = 1e-14


class KernelId(str, enum.Enum):
    U = "U"
    V = "V"
    SYM = "SYM"


class Variable(str, enum.Enum):
    P = "P"  # branches P_i(q): roots in p, argument q
    Q = "Q"  # branches Q_i(p): roots in q, argument p


def _kid(kid) -> KernelId:
    return KernelId(kid.value if isinstance(kid, enum.Enum) else str(kid).upper())


def _var(var) -> Variable:
    return Variable(var.value if isinstance(var, enum.Enum) else str(var).upper())


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

def kernel_K(params: ModelParams, x, y):
    p = params
    return (0.5 * (p.sigma1 * x * x + 2.0 * p.rho * x * y + p.sigma2 * y * y)
            + p.mu1 * x + p.mu2 * y)


def small_k(params: ModelParams, x, y):
    """Coefficient of ``m(x + y)`` in the functional equation on S1."""
    p = params
    return (0.5 * p.theta * (y - x) + 0.5 * (p.sigma2 - p.sigma1) * (x + y)
            + p.mu2 - p.mu1)


def small_k1(params: ModelParams, x, y):
    return params.r1 * x + y


def small_k2(params: ModelParams, x, y):
    return x + params.r2 * y


def _require_sym(params: ModelParams, kid: KernelId) -> None:
    if kid is KernelId.SYM and not is_symmetric(params):
        raise SymmetryRequired("the SYM kernel needs symmetric parameters")


def _poly_coeffs(params: ModelParams, kid: KernelId):
    """Coefficients (t, s, w, e, f) of ``t p^2 + s q^2 + w p q + e p + f q``."""
    p = params
    if kid is KernelId.V:
        return p.theta, 0.5 * p.sigma1, p.sigma1 - p.rho, p.mu1 - p.mu2, p.mu1
    if kid is KernelId.SYM:
        s, r, m = p.sigma1, p.rho, p.mu1
        return s - r, 0.5 * s, s - r, 0.0, m
    return p.theta, 0.5 * p.sigma2, p.sigma2 - p.rho, p.mu2 - p.mu1, p.mu2


def kernel_UV(params: ModelParams, kid, p, q):
    kid = _kid(kid)
    _require_sym(params, kid)
    t, s, w, e, f = _poly_coeffs(params, kid)
    return t * p * p + s * q * q + w * p * q + e * p + f * q


def coeffs_ABCD(params: ModelParams, p, q):
    """The linear coefficients A, B, C, D of the (p, q) functional equations."""
    P = params
    th = P.theta
    A = 0.5 * th * (2 * p + q) + 0.5 * (P.sigma2 - P.sigma1) * q + P.mu2 - P.mu1
    B = 0.5 * th * (2 * p + q) + 0.5 * (P.sigma1 - P.sigma2) * q + P.mu1 - P.mu2
    C = (1 - P.r1) * p + q
    D = (1 - P.r2) * p + q
    return A, B, C, D


# ---------------------------------------------------------------------------
# quadratic in one variable
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticCoeffs:
    """``a z^2 + (b1 w + b0) z + (c2 w^2 + c1 w)`` for unknown z and argument w."""
    a: float
    b1: float
    b0: float
    c2: float
    c1: float

    def at(self, w):
        return self.a, self.b1 * w + self.b0, (self.c2 * w + self.c1) * w

    def discriminant_coeffs(self) -> tuple[float, float, float]:
        a = self.a
        return (self.b1 ** 2 - 4 * a * self.c2,
                2 * self.b1 * self.b0 - 4 * a * self.c1,
                self.b0 ** 2)

    def discriminant(self, w):
        d2, d1, d0 = self.discriminant_coeffs()
        return (d2 * w + d1) * w + d0

    def discriminant_slope(self, w):
        d2, d1, _ = self.discriminant_coeffs()
        return 2 * d2 * w + d1


def quadratic(params: ModelParams, kid, variable) -> QuadraticCoeffs:
    kid, variable = _kid(kid), _var(variable)
    _require_sym(params, kid)
    t, s, w, e, f = _poly_coeffs(params, kid)
    if variable is Variable.P:
        return QuadraticCoeffs(a=t, b1=w, b0=e, c2=s, c1=f)
    return QuadraticCoeffs(a=s, b1=w, b0=f, c2=t, c1=e)


def _real_roots(c2: float, c1: float, c0: float) -> tuple[float, float]:
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0:
        raise ComplexRoots(f"branch-point equation has complex roots (disc={disc:g})")
    sq = np.sqrt(disc)
    if c1 == 0.0 and c0 == 0.0:
        return 0.0, 0.0
    t = -0.5 * (c1 + np.copysign(sq, c1))
    r1 = t / c2
    r2 = c0 / t if t != 0 else r1
    return tuple(sorted((float(r1), float(r2))))


def _complex_roots(a, b, c):
    """Both roots of ``a z^2 + b z + c`` with the cancellation-free formula."""
    b = np.asarray(b, dtype=complex)
    c = np.asarray(c, dtype=complex)
    s = np.sqrt(b * b - 4 * a * c)
    # pick the sign making |b + s| maximal
    s = np.where((b.real * s.real + b.imag * s.imag) < 0, -s, s)
    t = -0.5 * (b + s)
    with np.errstate(divide="ignore", invalid="ignore"):
        z1 = t / a
        z2 = np.where(t != 0, c / t, z1)
    return z1, z2


def _order(z1, z2):
    """Label roots: smaller real part first, ties by smaller imaginary part."""
    swap = (z1.real > z2.real) | ((z1.real == z2.real) & (z1.imag > z2.imag))
    return np.where(swap, z2, z1), np.where(swap, z1, z2)


@dataclass(frozen=True)
class BranchFamily:
    kernel: KernelId
    variable: Variable
    bp_low: float
    bp_high: float

    def on_cut(self, arg, tol: float = CUT_TOL):
        arg = np.asarray(arg, dtype=complex)
        scale = np.maximum(1.0, np.abs(arg))
        near_axis = np.abs(arg.imag) <= tol * scale
        outside = (arg.real <= self.bp_low) | (arg.real >= self.bp_high)
        return near_axis & outside

    def to_dict(self) -> dict:
        return {"kernel": self.kernel.value, "variable": self.variable.value,
                "bp_low": self.bp_low, "bp_high": self.bp_high,
                "cut": [[None, self.bp_low], [self.bp_high, None]]}


def branch_points(params: ModelParams, kid, variable) -> BranchFamily:
    """Real zeros of the discriminant, ordered; the cut is outside them."""
    check_elliptic(params)
    kid, variable = _kid(kid), _var(variable)
    quad = quadratic(params, kid, variable)
    lo, hi = _real_roots(*quad.discriminant_coeffs())
    return BranchFamily(kid, variable, lo, hi)


def branches(params: ModelParams, kid, variable, arg):
    """Both branches at ``arg`` (off the cut), labelled by real part."""
    quad = quadratic(params, kid, variable)
    a, b, c = quad.at(np.asarray(arg, dtype=complex))
    return _order(*_complex_roots(a, b, c))


def branch_eval(params: ModelParams, kid, variable, i: int, arg, check_cut: bool = True):
    if i not in (1, 2):
        raise ValueError("branch index must be 1 or 2")
    arg_arr = np.asarray(arg, dtype=complex)
    if check_cut:
        fam = branch_points(params, kid, variable)
        if np.any(fam.on_cut(arg_arr)):
            raise OnCut("argument lies on the cut; use branch_eval_cut")
    z1, z2 = branches(params, kid, variable, arg_arr)
    out = z1 if i == 1 else z2
    return out if np.ndim(arg) else complex(out)


def kernel_residual(params: ModelParams, kid, variable, value, arg):
    """Relative residual of the kernel at a branch value."""
    quad = quadratic(params, kid, variable)
    a, b, c = quad.at(np.asarray(arg, dtype=complex))
    value = np.asarray(value, dtype=complex)
    num = np.abs(a * value * value + b * value + c)
    den = np.abs(a * value * value) + np.abs(b * value) + np.abs(c)
    return np.where(den > 0, num / np.where(den > 0, den, 1.0), num)


def branch_eval_cut(params: ModelParams, kid, variable, i: int, arg, side: str = "above"):
    """One-sided limit of branch ``i`` at real ``arg`` on the cut.

    ``side="above"`` is the limit from ``arg + i0``.  The two sides are complex
    conjugate; which conjugate is branch 1 follows from the first-order
    expansion of the discriminant off the real axis.
    """
    if i not in (1, 2):
        raise ValueError("branch index must be 1 or 2")
    if side not in ("above", "below"):
        raise ValueError("side must be 'above' or 'below'")
    kid, variable = _kid(kid), _var(variable)
    x = np.asarray(arg, dtype=float)
    fam = branch_points(params, kid, variable)
    tol = 1e-12 * np.maximum(1.0, np.abs(x))
    if np.any((x > fam.bp_low + tol) & (x < fam.bp_high - tol)):
        raise NotOnCut("argument is not on the cut")
    quad = quadratic(params, kid, variable)
    a, b, _ = quad.at(x)
    disc = np.minimum(quad.discriminant(x), 0.0)
    centre = -b / (2 * a)
    half = np.sqrt(-disc) / (2 * abs(a))
    eta = 1.0 if side == "above" else -1.0
    g = np.sign(eta * quad.discriminant_slope(x) * a)
    # branch 2 carries imaginary part +half when g > 0
    sign1 = np.where(g > 0, -1.0, 1.0)
    s = sign1 if i == 1 else -sign1
    out = centre + 1j * s * half
    return out if np.ndim(arg) else complex(out)


# ---------------------------------------------------------------------------
# hyperbolas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Hyperbola:
    """``A x^2 + B y^2 + C x + D = 0``; the right branch is H+ and the left H-."""
    A: float
    B: float
    C: float
    D: float
    plus_tag: str = "H+"
    minus_tag: str = "H-"

    def __call__(self, x, y):
        return self.A * x * x + self.B * y * y + self.C * x + self.D

    def residual(self, x, y):
        """Conic value relative to the size of its terms."""
        terms = (np.abs(self.A * x * x) + np.abs(self.B * y * y)
                 + np.abs(self.C * x) + np.abs(self.D))
        return np.abs(self(x, y)) / np.maximum(terms, 1e-300)

    @property
    def centre(self) -> float:
        return -self.C / (2 * self.A)

    def canonical(self) -> tuple[float, float, float]:
        """``(xc, a2, b2)`` with ``(x - xc)^2 / a2 - y^2 / b2 = 1``."""
        xc = self.centre
        rhs = self.C ** 2 / (4 * self.A) - self.D
        a2 = rhs / self.A
        b2 = -rhs / self.B
        if not (a2 > 0 and b2 > 0):
            raise ValueError("conic is not a hyperbola with horizontal real axis")
        return xc, a2, b2

    @property
    def vertices(self) -> tuple[float, float]:
        xc, a2, _ = self.canonical()
        return xc - np.sqrt(a2), xc + np.sqrt(a2)

    @property
    def foci(self) -> tuple[float, float]:
        xc, a2, b2 = self.canonical()
        f = np.sqrt(a2 + b2)
        return xc - f, xc + f

    def normalized(self, x, y):
        xc, a2, b2 = self.canonical()
        return (x - xc) ** 2 / a2 - y ** 2 / b2 - 1.0

    def distance_proxy(self, x, y):
        """First-order distance ``|g| / |grad g|`` to the curve."""
        xc, a2, b2 = self.canonical()
        g = self.normalized(x, y)
        grad = np.hypot(2 * (x - xc) / a2, 2 * y / b2)
        return np.abs(g) / np.maximum(grad, 1e-300)

    def region(self, p) -> str:
        """'right' (convex side of H+), 'left' (convex side of H-) or 'between'."""
        xc, _, _ = self.canonical()
        x, y = float(np.real(p)), float(np.imag(p))
        if self.normalized(x, y) < 0:
            return "between"
        return "right" if x > xc else "left"

    def upper_branch_point(self, which: str, t):
        """Point on the upper half of branch ``which`` ('+'/'-'), parameter t >= 0."""
        xc, a2, b2 = self.canonical()
        sgn = 1.0 if which == "+" else -1.0
        return xc + sgn * np.sqrt(a2) * np.cosh(t) + 1j * np.sqrt(b2) * np.sinh(t)

    def to_dict(self) -> dict:
        return {"A": self.A, "B": self.B, "C": self.C, "D": self.D}


def hyperbola(params: ModelParams, kid, variable) -> Hyperbola:
    """Conic carrying the images of the cuts under the branches.

    On the cut the branches are ``x +- i y`` with ``2x = -b/a`` and
    ``x^2 + y^2 = c/a``; eliminating the argument gives the conic.
    """
    kid, variable = _kid(kid), _var(variable)
    qc = quadratic(params, kid, variable)
    a, b1, b0, c2, c1 = qc.a, qc.b1, qc.b0, qc.c2, qc.c1
    if b1 == 0:
        raise ValueError("degenerate kernel: the cut image is not a hyperbola")
    A = b1 * b1 - 4 * a * c2
    B = b1 * b1
    C = -4 * b0 * c2 + 2 * c1 * b1
    D = (-c2 * b0 * b0 + c1 * b0 * b1) / a
    if kid is KernelId.SYM:
        s, r = params.sigma1, params.rho
        scale = (s + r) / A if variable is Variable.Q else 1.0 / A
        A, B, C, D = A * scale, B * scale, C * scale, D * scale
    sup = "p" if variable is Variable.P else "q"
    tag = f"{kid.value}/{sup}"
    return Hyperbola(float(A), float(B), float(C), float(D),
                     plus_tag=f"H{tag}+", minus_tag=f"H{tag}-")


# ---------------------------------------------------------------------------
# automorphy (symmetric kernel)
# ---------------------------------------------------------------------------

AUTOMORPHY_TOL = 1e-10


def check_automorphy(params: ModelParams, p: complex, tol: float = AUTOMORPHY_TOL) -> dict:
    """Evaluate the four compositions ``P_i(Q_j(p))`` and compare with the
    region table: ``P1 Q1 = id`` off the convex side of H+, ``P2 Q1 = id`` on
    it, ``P1 Q2 = id`` on the convex side of H-, ``P2 Q2 = id`` off it."""
    kid = KernelId.SYM
    _require_sym(params, kid)
    hp = hyperbola(params, kid, Variable.P)
    p = complex(p)
    if hp.distance_proxy(p.real, p.imag) < tol:
        raise RegionAmbiguous(f"point {p} is within {tol:g} of the hyperbola")
    region = hp.region(p)
    in_plus = region == "right"
    in_minus = region == "left"
    q1 = branch_eval(params, kid, Variable.Q, 1, p)
    q2 = branch_eval(params, kid, Variable.Q, 2, p)
    comps = {
        "P1oQ1": branch_eval(params, kid, Variable.P, 1, q1),
        "P2oQ1": branch_eval(params, kid, Variable.P, 2, q1),
        "P1oQ2": branch_eval(params, kid, Variable.P, 1, q2),
        "P2oQ2": branch_eval(params, kid, Variable.P, 2, q2),
    }
    expected = {"P1oQ1": not in_plus, "P2oQ1": in_plus,
                "P1oQ2": in_minus, "P2oQ2": not in_minus}
    scale = max(1.0, abs(p))
    rows = {}
    for name, val in comps.items():
        err = abs(val - p) / scale
        rows[name] = {"value": val, "error": err, "expected_identity": expected[name],
                      "is_identity": bool(err < 1e-8)}
    return {"p": p, "region": region, "compositions": rows,
            "consistent": all(r["is_identity"] == r["expected_identity"]
                              for r in rows.values())}
