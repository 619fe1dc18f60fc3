"""Vector boundary value problem on the cut and its Fredholm reformulation.

On the cut ``(-inf, q1]`` the boundary transforms evaluated along the first
branches, ``L(q) = [ell1(P1u(q)), ell2(P1v(q))]``, satisfy
``L+(q) = G(q) L-(q)`` where ``+`` is the limit from below.  Mapping the
interior of the hyperbola branch carrying ``P1u`` onto the unit disk turns
this into a jump problem on the circle, solved here by a Nystrom method.

Throughout, ``ell_i(p)`` means the boundary transform at ``x = -p``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (CoefficientZero, DeltaZero, NotOnCut, OutsideDomain,
                         PoleSuspected, SingularSystem)
from .feq import ResidualReport, _combine
from .kernel import (Hyperbola, KernelId, branch_eval, branch_eval_cut, branch_points,
                     branches, coeffs_ABCD, hyperbola)
from .model import ModelParams

# "+" boundary values are limits from below the cut
PLUS_SIDE = "below"
MINUS_SIDE = "above"


def _cut_end(params: ModelParams) -> float:
    return branch_points(params, "U", "P").bp_low


def _require_cut(params: ModelParams, q: float) -> float:
    q = float(q)
    q1 = _cut_end(params)
    if not q <= q1 - 1e-12:
        raise NotOnCut(f"q = {q} is not strictly inside the cut (-inf, {q1}]")
    return q


def _cut_values(params: ModelParams, q: float, side: str = PLUS_SIDE):
    pu = branch_eval_cut(params, "U", "P", 1, q, side)
    pv = branch_eval_cut(params, "V", "P", 1, q, side)
    alpha, _, gamma, _ = coeffs_ABCD(params, pu, q)
    _, beta, _, delta = coeffs_ABCD(params, pv, q)
    return complex(alpha), complex(beta), complex(gamma), complex(delta), pu, pv


def delta_q(params: ModelParams, q: float) -> complex:
    """``Delta(q) = -(alpha + beta) = -theta (q + P1u + P1v)`` on the cut."""
    q = _require_cut(params, q)
    alpha, beta, _, _, pu, pv = _cut_values(params, q)
    d1 = -(alpha + beta)
    d2 = -params.theta * (q + pu + pv)
    if abs(d1 - d2) > 1e-10 * max(1.0, abs(d1)):
        raise AssertionError(f"Delta forms disagree at q = {q}: {d1} vs {d2}")
    if abs(d1) < 1e-12:
        raise DeltaZero(f"Delta vanishes at q = {q}")
    return d1


@dataclass(frozen=True)
class GMatrix:
    """Jump matrix at a cut point together with its four coefficients."""
    q: float
    entries: np.ndarray
    alpha: complex
    beta: complex
    gamma: complex
    delta: complex
    Delta: complex

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.entries))

    def det_closed_form(self) -> complex:
        g, d = self.gamma * self.delta, self.alpha + self.beta
        return complex(np.conj(g) / g * d / np.conj(d))

    def to_dict(self) -> dict:
        def c(z):
            return [complex(z).real, complex(z).imag]
        return {"q": self.q, "entries": [[c(z) for z in row] for row in self.entries],
                "alpha": c(self.alpha), "beta": c(self.beta), "gamma": c(self.gamma),
                "delta": c(self.delta), "Delta": c(self.Delta), "det": c(self.det)}


def g_matrix(params: ModelParams, q: float) -> GMatrix:
    """``G(q)`` with ``L+ = G L-``."""
    q = _require_cut(params, q)
    a, b, g, d, _, _ = _cut_values(params, q)
    for name, val in (("C", g), ("D", d)):
        if abs(val) < 1e-12:
            raise CoefficientZero(f"{name}(P1(q), q) vanishes at q = {q}")
    D = delta_q(params, q)
    ac, bc, gc, dc = np.conj(a), np.conj(b), np.conj(g), np.conj(d)
    G = np.array([[-gc * (a + bc) / g, dc * (ac - a) / g],
                  [gc * (bc - b) / d, -dc * (b + ac) / d]]) / np.conj(D)
    return GMatrix(q, G, a, b, g, d, D)


# ---------------------------------------------------------------------------
# boundary condition against Monte Carlo estimates
# ---------------------------------------------------------------------------

@dataclass
class BoundaryResidual:
    """Componentwise residual of ``L+ - G L-`` at one cut point."""
    q: float
    components: tuple
    points: tuple

    @property
    def z(self) -> float:
        return max(c.z for c in self.components)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.components)

    def to_dict(self) -> dict:
        return {"q": self.q, "z": self.z, "pass": self.passed,
                "p_u": [self.points[0].real, self.points[0].imag],
                "p_v": [self.points[1].real, self.points[1].imag],
                "components": [c.to_dict() for c in self.components]}


def boundary_vector(params: ModelParams, est, q: float, side: str = PLUS_SIDE):
    """``[ell1(P1u(q)), ell2(P1v(q))]`` from the estimates, one-sided on the cut."""
    pu = branch_eval_cut(params, "U", "P", 1, q, side)
    pv = branch_eval_cut(params, "V", "P", 1, q, side)
    return (est.ell(1, -pu), est.ell(2, -pv)), (pu, pv)


def check_boundary_condition(params: ModelParams, est, q: float) -> BoundaryResidual:
    """Residual ``L+(q) - G(q) L-(q)`` with batch-means SEs.

    Raises :class:`~rbmwedge.exceptions.DomainViolation` when ``P1u`` or
    ``P1v`` at ``q`` falls outside the region the ell estimators accept.
    """
    G = g_matrix(params, q)
    (l1, l2), pts = boundary_vector(params, est, G.q, PLUS_SIDE)
    # the minus side is the complex conjugate point, where ell is conjugated
    m1, m2 = l1.conj(), l2.conj()
    comps = []
    for i, li in enumerate((l1, l2)):
        res = _combine([(1.0, li), (-G.entries[i, 0], m1), (-G.entries[i, 1], m2)], "batch")
        comps.append(ResidualReport.from_estimate(f"bvp[{i + 1}]", (q,), res))
    return BoundaryResidual(G.q, tuple(comps), pts)


def cut_grid(params: ModelParams, est, n: int, span: float | None = None):
    """Up to ``n`` cut points starting next to ``q1`` where both ell
    evaluations are admissible, plus the list of rejected points.

    ``span`` is the length of the scanned part of the cut (default: the
    distance over which ``Re P1u`` grows by the admissible continuation).
    """
    from .exceptions import DomainViolation
    q1 = _cut_end(params)
    if span is None:
        span = 4.0 * max(1.0, abs(q1))
    qs = q1 - 1e-3 - np.linspace(0.0, span, 8 * n)
    ok, rejected = [], []
    for q in qs:
        try:
            boundary_vector(params, est, q)
        except DomainViolation as exc:
            rejected.append((float(q), str(exc)))
            continue
        ok.append(float(q))
    if len(ok) > n:
        idx = np.unique(np.round(np.linspace(0, len(ok) - 1, n)).astype(int))
        ok = [ok[i] for i in idx]
    return ok, rejected


# ---------------------------------------------------------------------------
# conformal map of the hyperbola interior onto the disk
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiskMap:
    """Conformal map of the convex side of a hyperbola's right branch onto the disk.

    Elliptic coordinates ``p - xc = f cos w`` send the region to the half
    strip ``0 <= Re w < u0``; an exponential takes it to a quadrant, a
    Joukowski-type map to the lower half-plane and a Moebius map to the
    disk.  The focus goes to 0, the vertex to -1, and ``omega`` commutes
    with conjugation.
    """
    curve: Hyperbola
    xc: float
    f: float
    u0: float

    @classmethod
    def from_hyperbola(cls, h: Hyperbola) -> "DiskMap":
        xc, a2, b2 = h.canonical()
        f = math.sqrt(a2 + b2)
        return cls(h, xc, f, math.acos(math.sqrt(a2) / f))

    def inside(self, p, tol: float = 1e-10) -> np.ndarray:
        p = np.asarray(p, dtype=complex)
        x, y = p.real, p.imag
        return (self.curve.normalized(x, y) >= -tol) & (x > self.xc)

    def __call__(self, p):
        p = np.asarray(p, dtype=complex)
        w = np.arccos((p - self.xc) / self.f)
        zeta = np.exp(1j * np.pi * (w - self.u0) / (2.0 * self.u0))
        chi = zeta - 1.0 / zeta
        out = (chi + 2j) / (chi - 2j)
        return out if out.ndim else complex(out)

    def inverse(self, omega):
        omega = np.asarray(omega, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            chi = 2j * (1.0 + omega) / (omega - 1.0)
        r = np.sqrt(chi * chi + 4.0)
        z1 = 0.5 * (chi + r)
        z2 = 0.5 * (chi - r)
        # keep the root in the closed fourth quadrant
        ang1 = np.angle(z1)
        good1 = (ang1 <= 1e-12) & (ang1 >= -0.5 * np.pi - 1e-12)
        zeta = np.where(good1, z1, z2)
        w = self.u0 + 2.0 * self.u0 * np.log(zeta) / (1j * np.pi)
        out = self.xc + self.f * np.cos(w)
        return out if out.ndim else complex(out)


def disk_map(params: ModelParams, kid) -> DiskMap:
    return DiskMap.from_hyperbola(hyperbola(params, kid, "P"))


def conformal_to_disk(params: ModelParams, kid, p):
    """``omega(p)`` for ``p`` in the closed interior of the right branch."""
    m = disk_map(params, kid)
    if not np.all(m.inside(p)):
        raise OutsideDomain("point outside the closed interior of the hyperbola branch")
    return m(p)


# ---------------------------------------------------------------------------
# Fredholm equation on the circle
# ---------------------------------------------------------------------------

def _q_from_p(params: ModelParams, p: complex) -> tuple[float, str]:
    """Cut point ``q`` and side with ``P1u(q +- i0) = p`` for ``p`` on H^u+."""
    roots = branches(params, "U", "Q", p)
    q = min(roots, key=lambda r: abs(r.imag))
    q = min(float(q.real), _cut_end(params) - 1e-12)
    below = branch_eval_cut(params, "U", "P", 1, q, PLUS_SIDE)
    side = PLUS_SIDE if abs(below - p) <= abs(np.conj(below) - p) else MINUS_SIDE
    return q, side


@dataclass(frozen=True)
class NodePoint:
    """Cut point behind a circle node: ``P1u(q) = pu`` on ``side``, ``pv = P1v(q)``."""
    z: complex
    q: float
    side: str
    pu: complex
    pv: complex


def node_points(params: ModelParams, z) -> list:
    """Pull circle nodes back through the disk map of H^u+ to the cut."""
    dm = disk_map(params, KernelId.U)
    out = []
    for zk in np.atleast_1d(np.asarray(z, dtype=complex)):
        pu = complex(dm.inverse(zk / abs(zk)))
        q, side = _q_from_p(params, pu)
        pu = complex(branch_eval_cut(params, "U", "P", 1, q, side))
        pv = complex(branch_eval_cut(params, "V", "P", 1, q, side))
        out.append(NodePoint(complex(zk), q, side, pu, pv))
    return out


def jump_matrix(params: ModelParams, z) -> np.ndarray:
    """``H(z)`` on the unit circle: ``Phi+ = H Phi-``.

    The node ``z`` is pulled back to a cut point ``q``; on the semicircle
    carrying ``P1u(q - i0)`` this is ``G(q)``, on the other ``G(q)^{-1}``
    (which equals its conjugate).  Both components share the parametrisation
    by ``q``.
    """
    pts = node_points(params, z)
    out = np.empty((len(pts), 2, 2), dtype=complex)
    for k, pt in enumerate(pts):
        G = g_matrix(params, pt.q).entries
        out[k] = G if pt.side == PLUS_SIDE else np.linalg.inv(G)
    return out


def boundary_targets(params: ModelParams, est, z) -> list:
    """Estimates of ``Phi-(z) = Phi+(1/z)`` on the circle (the conjugate points)."""
    out = []
    for pt in node_points(params, z):
        out.append((est.ell(1, -np.conj(pt.pu)), est.ell(2, -np.conj(pt.pv))))
    return out


def _circle_derivative(vals: np.ndarray) -> np.ndarray:
    """Spectral ``d/dtheta`` of samples at equispaced angles."""
    n = vals.shape[0]
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0.0
    spec = np.fft.fft(vals, axis=0)
    shape = (n,) + (1,) * (vals.ndim - 1)
    return np.fft.ifft(1j * k.reshape(shape) * spec, axis=0)


def circle_nodes(n: int) -> np.ndarray:
    """Equispaced nodes offset by half a step, avoiding z = +-1."""
    return np.exp(1j * 2.0 * np.pi * (np.arange(n) + 0.5) / n)


@dataclass(frozen=True)
class FredholmSystem:
    nodes: np.ndarray
    H: np.ndarray
    matrix: np.ndarray
    rhs: np.ndarray

    @property
    def n(self) -> int:
        return len(self.nodes)


def _kernel_blocks(nodes, H, Hinv, dH):
    """``(Hinv(t_j) H(z_k) - I) / (z_k - t_j)`` with the derivative on the diagonal."""
    n = len(nodes)
    K = np.einsum("jab,kbc->jkac", Hinv, H) - np.eye(2)
    diff = nodes[None, :] - nodes[:, None]
    np.fill_diagonal(diff, 1.0)
    K = K / diff[:, :, None, None]
    # d/dz = (d/dtheta) / (i z) on the circle
    diag = np.einsum("jab,jbc->jac", Hinv, dH) / (1j * nodes)[:, None, None]
    K[np.arange(n), np.arange(n)] = diag
    return K


def assemble_fredholm(H: np.ndarray, nodes: np.ndarray, phi_inf) -> FredholmSystem:
    """Nystrom matrix of ``Phi(t) - (1/2 pi i) int K(t, z) Phi(z) dz = phi_inf``.

    With ``dz = i z dtheta`` and trapezoidal weights the quadrature weight of
    node ``z_k`` is ``z_k / n``.
    """
    n = len(nodes)
    if n < 16:
        raise ValueError("at least 16 nodes are required")
    if len(np.unique(np.round(nodes, 14))) != n:
        raise ValueError("nodes must be distinct")
    Hinv = np.linalg.inv(H)
    dH = _circle_derivative(H)
    K = _kernel_blocks(nodes, H, Hinv, dH)
    w = nodes / n
    A = np.eye(2 * n, dtype=complex) - (K * w[None, :, None, None]).transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)
    rhs = np.tile(np.asarray(phi_inf, dtype=complex), n)
    return FredholmSystem(nodes, H, A, rhs)


@dataclass
class FredholmSolution:
    nodes: np.ndarray
    phi_minus: np.ndarray
    phi_plus: np.ndarray
    residual: float
    solve_residual: float
    condition: float
    analytic_mismatch: float
    phi_inf: np.ndarray | None = None
    exponent: float = 0.0

    def to_rows(self):
        th = np.angle(self.nodes) % (2 * np.pi)
        for t, (a, b) in sorted(zip(th, self.phi_minus), key=lambda r: r[0]):
            yield [t, a.real, a.imag, b.real, b.imag]


def _nystrom_interpolate(H_t, t, nodes, H, phi, phi_inf, dH_t=None):
    """Evaluate the Nystrom solution off the nodes through the integral equation."""
    n = len(nodes)
    Hinv_t = np.linalg.inv(H_t)
    out = np.empty((len(t), 2), dtype=complex)
    w = nodes / n
    for j, tj in enumerate(t):
        diff = nodes - tj
        close = np.abs(diff) < 1e-13
        M = np.einsum("ab,kbc->kac", Hinv_t[j], H) - np.eye(2)
        diff = np.where(close, 1.0, diff)
        M = M / diff[:, None, None]
        if np.any(close):
            M[close] = Hinv_t[j] @ dH_t[j] / (1j * tj)
        out[j] = phi_inf + np.einsum("k,kab,kb->a", w, M, phi)
    return out


def _analytic_mismatch(phi_minus: np.ndarray, phi_plus: np.ndarray) -> float:
    """Share of Fourier mass on the wrong side of the circle.

    ``Phi-`` extends outside the disk (powers ``z^k``, ``k <= 0``) and
    ``Phi+`` inside (``k >= 0``).
    """
    n = phi_minus.shape[0]
    k = np.fft.fftfreq(n, d=1.0 / n)
    num, den = 0.0, 0.0
    for vals, bad in ((phi_minus, k > 0), (phi_plus, k < 0)):
        c = np.fft.fft(vals, axis=0) / n
        # nodes are rotated by half a step; moduli of coefficients are unaffected
        num += float(np.sum(np.abs(c[bad]) ** 2))
        den += float(np.sum(np.abs(c) ** 2))
    return math.sqrt(num / den) if den > 0 else 0.0


def _theta(z) -> np.ndarray:
    return np.mod(np.angle(z), 2.0 * np.pi)


def jump_factor(z, lam: float):
    """Boundary values ``X+ = (1 - z)^lam``, ``X- = (1 - 1/z)^lam`` and their
    ratio ``c = X+ / X- = exp(i lam (theta - pi))`` on the unit circle.

    ``c`` jumps at ``z = 1`` by ``exp(-2 i pi lam)``; dividing the jump matrix
    by it removes a scalar discontinuity of ``H`` at that point.
    """
    z = np.asarray(z, dtype=complex)
    th = _theta(z)
    mod = np.abs(1.0 - z) ** lam
    xp = mod * np.exp(0.5j * lam * (th - np.pi))
    xm = mod * np.exp(-0.5j * lam * (th - np.pi))
    return xp, xm, np.exp(1j * lam * (th - np.pi))


def solve_with_jump(H_fn, n: int, phi_inf=None, calibrate=None, exponent: float = 0.0,
                    check_poles: bool = True) -> FredholmSolution:
    """Solve the Fredholm equation for a jump matrix given as a function of ``z``.

    Either ``phi_inf`` is given, or ``calibrate = (k, target)`` fixes it so
    that ``Phi-`` equals ``target`` at node ``k``; the equation is linear in
    ``phi_inf``, so this costs one extra right-hand side.  With a nonzero
    ``exponent`` the unknown is ``Psi = Phi / X`` (see :func:`jump_factor`),
    which has the continuous jump matrix ``H / c``.
    """
    def Ht(z):
        return H_fn(z) / jump_factor(z, exponent)[2][:, None, None]

    nodes = circle_nodes(n)
    H = Ht(nodes)
    xp, xm, _ = jump_factor(nodes, exponent)
    basis = assemble_fredholm(H, nodes, [0.0, 0.0])
    cond = float(np.linalg.cond(basis.matrix))
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularSystem(f"Nystrom matrix condition number {cond:.3g}")
    unit = np.stack([np.tile([1.0, 0.0], n), np.tile([0.0, 1.0], n)], axis=1).astype(complex)
    X = np.linalg.solve(basis.matrix, unit)
    if phi_inf is None:
        if calibrate is None:
            raise ValueError("give phi_inf or a calibration node")
        k, target = calibrate
        # X-(inf) = 1, so Psi-(inf) = Phi-(inf)
        phi_inf = np.linalg.solve(X[2 * k:2 * k + 2], np.asarray(target, dtype=complex) / xm[k])
    phi_inf = np.asarray(phi_inf, dtype=complex)
    psi = X @ phi_inf
    solve_res = float(np.linalg.norm(basis.matrix @ psi - np.tile(phi_inf, n), np.inf))
    psi = psi.reshape(n, 2)
    # residual of the continuous equation at the midpoints, finer quadrature
    fine = circle_nodes(2 * n)
    H_f = Ht(fine)
    dH_f = _circle_derivative(H_f)
    psi_f = _nystrom_interpolate(H_f, fine, nodes, H, psi, phi_inf, dH_f)
    again = _nystrom_interpolate(H_f, fine, fine, H_f, psi_f, phi_inf, dH_f)
    residual = float(np.max(np.abs(psi_f - again)))
    psi_plus = np.einsum("kab,kb->ka", H, psi)
    mismatch = _analytic_mismatch(psi, psi_plus)
    if check_poles and mismatch > 0.10:
        raise PoleSuspected(f"boundary values are not analytic on their side "
                            f"(mismatch {mismatch:.2%})")
    return FredholmSolution(nodes, psi * xm[:, None], psi_plus * xp[:, None], residual,
                            solve_res, cond, mismatch, phi_inf, exponent)


def jump_exponent(params: ModelParams, q_far: float = -1e9) -> float:
    """``lam`` in ``[0, 1)`` matching the jump of ``H`` at ``z = 1``.

    ``z = 1`` is the image of ``q -> -inf``.  There ``H`` tends to ``G_inf``
    on one side and ``G_inf^{-1}`` on the other, so it jumps by
    ``G_inf^2 = exp(2 i phi0) I``; ``lam = -phi0 / pi`` modulo 1 cancels
    this and keeps ``Phi`` bounded at ``z = 1``.
    """
    G = g_matrix(params, _cut_end(params) + q_far).entries
    upper = node_points(params, np.exp(0.3j))[0].side == PLUS_SIDE
    R = G @ G if upper else np.linalg.inv(G @ G)
    two_phi = np.angle(np.trace(R) / 2.0)
    return float(np.mod(-two_phi / (2.0 * np.pi), 1.0))


def _q_inverting(params: ModelParams, p: complex) -> tuple[complex, int]:
    """Root ``q`` of ``U(p, q) = 0`` and branch index ``i`` with ``P_i^u(q) = p``."""
    best, err = None, math.inf
    for q in branches(params, "U", "Q", p):
        for i in (1, 2):
            try:
                e = abs(branch_eval(params, "U", "P", i, q) - p)
            except NotOnCut:
                continue
            if e < err:
                best, err = (complex(q), i), e
    if best is None or err > 1e-8 * max(1.0, abs(p)):
        raise OutsideDomain(f"no q with P^u(q) = {p}")
    return best


def reference_points(params: ModelParams) -> tuple[complex, complex]:
    """Preimages of the disk centre for the two components.

    The centre pulls back to the focus of H^u+, reached by the second branch
    at some ``q0``; the second component sits at the same branch of the V
    kernel at ``q0``, which keeps one parametrisation for both components.
    """
    pu = complex(disk_map(params, KernelId.U).inverse(0.0))
    q0, i = _q_inverting(params, pu)
    pv = complex(branch_eval(params, "V", "P", i, q0))
    if not disk_map(params, KernelId.V).inside(pv):
        raise OutsideDomain(f"second reference point {pv} is outside the V hyperbola interior")
    return pu, pv


def reference_value(params: ModelParams, est) -> np.ndarray:
    """``Phi-(inf) = Phi+(0)`` from the ell estimates at :func:`reference_points`."""
    pu, pv = reference_points(params)
    return np.array([est.ell(1, -pu).value, est.ell(2, -pv).value])


def reference_node(n: int) -> int:
    """Node next to ``z = -1``, the image of the hyperbola vertex, where the
    ell estimators are most reliable."""
    return int(np.argmin(np.abs(circle_nodes(n) + 1.0)))


def fredholm_solve(params: ModelParams, est, n: int = 64, phi_inf=None,
                   check_poles: bool = True, exponent: float | None = None) -> FredholmSolution:
    """Nystrom solution of the Fredholm equation for ``Phi-`` on the circle.

    Assumes ``Phi`` has no pole in the disk.  Without ``phi_inf`` the
    constant is calibrated so that the solution matches the estimates of
    ``Phi-`` at :func:`reference_node`.  The behaviour at ``z = 1`` is set by
    ``exponent``; by default the bounded class ``lam`` is tried first and
    then ``lam - 1`` (integrable singularity), keeping the first whose
    boundary values pass the analyticity test.
    """
    H_fn = lambda z: jump_matrix(params, z)  # noqa: E731
    if exponent is None:
        lam = jump_exponent(params)
        candidates = [lam, lam - 1.0]
    else:
        candidates = [exponent]
    calibrate = None
    if phi_inf is None:
        k = reference_node(n)
        t1, t2 = boundary_targets(params, est, circle_nodes(n)[k])[0]
        calibrate = (k, [t1.value, t2.value])
    last = None
    for lam in candidates:
        sol = solve_with_jump(H_fn, n, phi_inf, calibrate, exponent=lam, check_poles=False)
        if sol.analytic_mismatch <= 0.10:
            return sol
        last = sol
    if check_poles:
        raise PoleSuspected(f"no solution class with analytic boundary values "
                            f"(mismatch {last.analytic_mismatch:.2%})")
    return last


def interior_values(sol: FredholmSolution, z0) -> np.ndarray:
    """``Phi+(z0) = (1/2 pi i) int H Phi- / (z - z0) dz`` for ``|z0| < 1``."""
    z0 = np.atleast_1d(np.asarray(z0, dtype=complex))
    n = len(sol.nodes)
    w = sol.nodes / n
    return np.array([np.einsum("k,ka->a", w / (sol.nodes - z), sol.phi_plus) for z in z0])
