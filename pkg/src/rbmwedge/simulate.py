"""Pathwise simulation of the reflected process with local-time bookkeeping.

Two discretisations are available:

``"euler"``
    Constrained Euler: take the free Gaussian step and, if the segment enters
    the missing quadrant, push the endpoint back along the reflection vector
    of the face it crossed first.

``"bridge"`` (default)
    Same face selection, but the push is the exact one-step local time of the
    normal coordinate, sampled from the Brownian-bridge minimum.  Inside a
    single face's half-plane this reproduces the reflected law exactly, so the
    only discretisation error left comes from the concave corner.

The hot loop is compiled with numba.  Long runs keep thinned states only;
boundary local time is binned along each face (weight and first moment per
bin) so boundary transforms can be evaluated at arbitrary points later.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from .exceptions import NotRecurrent, StuckAtCorner
from .model import ModelParams, check_elliptic, validate

EULER, BRIDGE = 0, 1
_SCHEMES = {"euler": EULER, "bridge": BRIDGE}


@dataclass(frozen=True)
class SimConfig:
    h: float = 1e-3
    horizon: float = 2e4
    burn_in: float = 1e3
    seed: int = 0
    replicas: int = 8
    start: tuple[float, float] = (1.0, 1.0)
    record_every: int = 20
    scheme: str = "bridge"
    n_batches: int = 50
    grid_n: int = 200
    keep_states: bool = True
    allow_transient: bool = False

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("step h must be positive")
        if not 0 <= self.burn_in < self.horizon:
            raise ValueError("burn_in must lie in [0, horizon)")
        z1, z2 = self.start
        if z1 < 0 and z2 < 0:
            raise ValueError("start point must lie in the three-quarter plane")
        if self.scheme not in _SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.replicas < 1 or self.record_every < 1 or self.n_batches < 2:
            raise ValueError("replicas, record_every >= 1 and n_batches >= 2 required")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.h))

    @property
    def burn_steps(self) -> int:
        return int(round(self.burn_in / self.h))

    def with_(self, **kw) -> "SimConfig":
        return replace(self, **kw)


# ---------------------------------------------------------------------------
# one step
# ---------------------------------------------------------------------------

@njit(cache=True)
def _entry_face(z1, z2, f1, f2):
    """Face through which the segment z -> f enters {z1 < 0, z2 < 0}; 0 if never."""
    # negativity interval [lo, hi] of each coordinate along the segment;
    # lo = -1 marks a coordinate already negative at the start
    if z1 < 0.0:
        lo1 = -1.0
        hi1 = 1.0 if f1 < 0.0 else z1 / (z1 - f1)
    elif f1 < 0.0:
        lo1 = z1 / (z1 - f1)
        hi1 = 1.0
    else:
        return 0
    if z2 < 0.0:
        lo2 = -1.0
        hi2 = 1.0 if f2 < 0.0 else z2 / (z2 - f2)
    elif f2 < 0.0:
        lo2 = z2 / (z2 - f2)
        hi2 = 1.0
    else:
        return 0
    if max(lo1, lo2, 0.0) >= min(hi1, hi2) and not (f1 < 0.0 and f2 < 0.0):
        return 0
    if lo2 > lo1:
        return 1
    if lo1 > lo2:
        return 2
    return 1 if -f2 >= -f1 else 2


@njit(cache=True)
def _step(z1, z2, n1, n2, u, mu1, mu2, l11, l21, l22, r1, r2, h, scheme):
    sh = math.sqrt(h)
    dw1 = sh * l11 * n1
    dw2 = sh * (l21 * n1 + l22 * n2)
    f1 = z1 + mu1 * h + dw1
    f2 = z2 + mu2 * h + dw2
    if scheme == EULER:
        face = _entry_face(z1, z2, f1, f2)
        if face == 0:
            return f1, f2, 0.0, 0.0
        if face == 1:
            a = max(0.0, -f2)
            return f1 + r1 * a, f2 + a, a, 0.0
        a = max(0.0, -f1)
        return f1 + a, f2 + r2 * a, 0.0, a
    # bridge scheme: choose the active face, then exact local time of its
    # normal coordinate over the step
    if z1 < 0.0:
        face = 1
    elif z2 < 0.0:
        face = 2
    elif f1 < 0.0 and f2 < 0.0:
        face = _entry_face(z1, z2, f1, f2)
    elif f1 < 0.0:
        face = 1
    elif f2 < 0.0:
        face = 2
    else:
        return f1, f2, 0.0, 0.0
    if face == 1:
        s2 = l21 * l21 + l22 * l22
        d = f2 - z2
        m = 0.5 * (d - math.sqrt(d * d - 2.0 * s2 * h * math.log(u)))
        a = max(0.0, -(z2 + m))
        return f1 + r1 * a, f2 + a, a, 0.0
    s1 = l11 * l11
    d = f1 - z1
    m = 0.5 * (d - math.sqrt(d * d - 2.0 * s1 * h * math.log(u)))
    a = max(0.0, -(z1 + m))
    return f1 + a, f2 + r2 * a, 0.0, a


@njit(cache=True)
def _accrual_position(tan, nrm, dx_tan, dx_nrm, a, r, c, scheme):
    """Expected tangential coordinate at which the step's local time accrues.

    While local time grows, the free normal increment equals ``-nrm - L(s)``,
    so its local-time average is ``-nrm - a/2``; the part of the tangential
    noise uncorrelated with the normal one is replaced by half its endpoint
    value, and the push itself contributes ``r a / 2`` on average.  The
    Euler scheme pushes only at the step end, so the endpoint is used.
    """
    if scheme == EULER:
        return tan + dx_tan + r * a
    return tan + c * (-nrm - 0.5 * a) + 0.5 * (dx_tan - c * dx_nrm) + 0.5 * r * a


def _chol(params: ModelParams) -> tuple[float, float, float]:
    L = np.linalg.cholesky(params.cov)
    return float(L[0, 0]), float(L[1, 0]), float(L[1, 1])


def step_rbm(params: ModelParams, state, xi, h: float, u: float | None = None):
    """One step from ``state`` with standard normal pair ``xi``.

    Without ``u`` this is the constrained Euler projection; with a uniform
    ``u`` in (0, 1] the push is the bridge-sampled local time.
    Returns ``(new_state, dL1, dL2)``.
    """
    z1, z2 = float(state[0]), float(state[1])
    if z1 < 0 and z2 < 0:
        raise ValueError("state must lie in the three-quarter plane")
    l11, l21, l22 = _chol(params)
    scheme = EULER if u is None else BRIDGE
    uu = 1.0 if u is None else float(u)
    w1, w2, a1, a2 = _step(z1, z2, float(xi[0]), float(xi[1]), uu, params.mu1,
                           params.mu2, l11, l21, l22, params.r1, params.r2, h, scheme)
    if w1 < 0 and w2 < 0:
        raise StuckAtCorner("push-back left the state outside the wedge; reduce h")
    return np.array([w1, w2]), a1, a2


# ---------------------------------------------------------------------------
# whole path
# ---------------------------------------------------------------------------

@njit(cache=True)
def _run(mu1, mu2, l11, l21, l22, r1, r2, h, n_steps, burn_steps, record_every,
         z1, z2, seed, scheme, keep_states, n_batches, face_lmax, face_nbins,
         grid_lo, grid_hi, grid_n, diag_c):
    np.random.seed(seed)
    n_post = n_steps - burn_steps
    n_rec = n_post // record_every if keep_states else 0
    states = np.empty((n_rec, 2), dtype=np.float32)
    dls = np.zeros((n_rec, 2), dtype=np.float32)
    dld = np.zeros(n_rec, dtype=np.float32)
    # local time of D = z2 - z1 at levels -diag_c, 0, diag_c binned along the diagonal
    diag_w = np.zeros((3, n_batches, face_nbins))
    face_w = np.zeros((2, n_batches, face_nbins))
    face_m = np.zeros((2, n_batches, face_nbins))
    grid = np.zeros((n_batches, grid_n, grid_n))
    batch_time = np.zeros(n_batches)
    ltot = np.zeros(2)
    bw = face_lmax / face_nbins
    gw = (grid_hi - grid_lo) / grid_n
    acc1 = 0.0
    acc2 = 0.0
    accd = 0.0
    # regression slopes of one noise coordinate on the other
    c1 = l11 * l21 / (l21 * l21 + l22 * l22)
    c2 = l21 / l11
    for k in range(n_steps):
        n1 = np.random.standard_normal()
        n2 = np.random.standard_normal()
        u = 1.0 - np.random.random()
        w1, w2, a1, a2 = _step(z1, z2, n1, n2, u, mu1, mu2, l11, l21, l22,
                               r1, r2, h, scheme)
        if w1 < 0.0 and w2 < 0.0:
            return states, dls, dld, face_w, face_m, diag_w, grid, batch_time, ltot, 1
        if k >= burn_steps:
            j = k - burn_steps
            b = (j * n_batches) // n_post
            batch_time[b] += h
            ltot[0] += a1
            ltot[1] += a2
            if a1 > 0.0:
                t = _accrual_position(z1, z2, w1 - z1 - r1 * a1, w2 - z2 - a1,
                                      a1, r1, c1, scheme)
                idx = int(-t / bw)
                if idx < 0:
                    idx = 0
                elif idx >= face_nbins:
                    idx = face_nbins - 1
                c = -(idx + 0.5) * bw
                face_w[0, b, idx] += a1
                face_m[0, b, idx] += a1 * (t - c)
            if a2 > 0.0:
                t = _accrual_position(z2, z1, w2 - z2 - r2 * a2, w1 - z1 - a2,
                                      a2, r2, c2, scheme)
                idx = int(-t / bw)
                if idx < 0:
                    idx = 0
                elif idx >= face_nbins:
                    idx = face_nbins - 1
                c = -(idx + 0.5) * bw
                face_w[1, b, idx] += a2
                face_m[1, b, idx] += a2 * (t - c)
            d0 = z2 - z1
            d1 = w2 - w1
            ia = int(0.25 * (z1 + z2 + w1 + w2) / bw)
            if ia < 0:
                ia = 0
            elif ia >= face_nbins:
                ia = face_nbins - 1
            for lv in range(3):
                lev = (lv - 1) * diag_c
                x0 = d0 - lev
                x1 = d1 - lev
                # Tanaka increment; zero unless the step crosses or touches the level
                sg = 1.0 if x0 > 0.0 else (-1.0 if x0 < 0.0 else 0.0)
                inc = abs(x1) - abs(x0) - sg * (x1 - x0)
                if inc != 0.0:
                    diag_w[lv, b, ia] += inc
                    if lv == 1:
                        accd += inc
            acc1 += a1
            acc2 += a2
            if (j + 1) % record_every == 0:
                if w1 >= grid_lo and w1 < grid_hi and w2 >= grid_lo and w2 < grid_hi:
                    gi = int((w1 - grid_lo) / gw)
                    gj = int((w2 - grid_lo) / gw)
                    if gi < grid_n and gj < grid_n:
                        grid[b, gi, gj] += record_every * h
                if keep_states:
                    r = j // record_every
                    if r < n_rec:
                        states[r, 0] = w1
                        states[r, 1] = w2
                        dls[r, 0] = acc1
                        dls[r, 1] = acc2
                        dld[r] = accd
                acc1 = 0.0
                acc2 = 0.0
                accd = 0.0
        z1 = w1
        z2 = w2
    return states, dls, dld, face_w, face_m, diag_w, grid, batch_time, ltot, 0


@dataclass
class PathRecord:
    """Simulated replicas after burn-in.

    ``states[i]`` holds every ``record_every``-th state of replica ``i`` and
    ``dL[i]`` the local time accrued since the previous record.  Boundary local
    time is binned along each face: ``face_w[f, b, k]`` is the local time of
    face ``f+1`` in batch ``b`` and bin ``k`` (bin centre ``-(k + 1/2) *
    face_bin``), ``face_m`` its first moment about the centre.
    """
    params: ModelParams
    config: SimConfig
    states: list
    dL: list
    face_w: np.ndarray
    face_m: np.ndarray
    face_bin: float
    grid: np.ndarray
    grid_lo: float
    grid_hi: float
    batch_time: np.ndarray
    L_total: np.ndarray
    replica_L: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    kind: str = "Z"
    strip_eps: float | None = None
    diag_w: np.ndarray | None = None
    diag_c: float = 0.0
    dLdiag: list | None = None

    @property
    def n_batches(self) -> int:
        return len(self.batch_time)

    @property
    def total_time(self) -> float:
        return float(self.batch_time.sum())

    @property
    def record_dt(self) -> float:
        return self.config.record_every * self.config.h

    @property
    def eps(self) -> float:
        return self.strip_eps if self.strip_eps is not None else 4.0 * math.sqrt(self.config.h)

    def face_centres(self) -> np.ndarray:
        k = np.arange(self.face_w.shape[2])
        return -(k + 0.5) * self.face_bin

    def record_batches(self, n_rec: int) -> np.ndarray:
        """Batch index of each record of a replica with ``n_rec`` records."""
        cfg = self.config
        n_post = cfg.n_steps - cfg.burn_steps
        last = (np.arange(n_rec) + 1) * cfg.record_every - 1
        return (last * self.n_batches) // n_post

    def times(self, replica: int = 0) -> np.ndarray:
        cfg = self.config
        n = len(self.states[replica])
        return cfg.burn_in + (np.arange(n) + 1) * self.record_dt


def replica_seeds(seed: int, replicas: int) -> list[int]:
    ss = np.random.SeedSequence(int(seed))
    return [int(s.generate_state(1, dtype=np.uint32)[0]) for s in ss.spawn(replicas)]


def face_layout(params: ModelParams) -> tuple[float, int]:
    scale = max(params.sigma1, params.sigma2) / max(min(abs(params.mu1), abs(params.mu2)), 0.05)
    lmax = min(40.0 * scale, 400.0)
    nbins = 20000
    return lmax, nbins


def diagonal_level(h: float) -> float:
    """Offset of the side levels used for the normal derivative on the diagonal."""
    return 8.0 * math.sqrt(2.0 * h)


def grid_window(params: ModelParams) -> tuple[float, float]:
    w = 5.0 / max(float(np.hypot(params.mu1, params.mu2)), 1e-3)
    return -w, w


def simulate_path(params: ModelParams, config: SimConfig | None = None) -> PathRecord:
    """Simulate ``config.replicas`` independent replicas; deterministic in the seed."""
    config = config or SimConfig()
    check_elliptic(params)
    if not config.allow_transient and not validate(params).recurrent:
        raise NotRecurrent("parameters are not positive recurrent; "
                           "set allow_transient=True to simulate anyway")
    l11, l21, l22 = _chol(params)
    lmax, nbins = face_layout(params)
    glo, ghi = grid_window(params)
    nb = config.n_batches
    states, dls, reps = [], [], []
    face_w = np.zeros((2, nb, nbins))
    face_m = np.zeros((2, nb, nbins))
    diag_w = np.zeros((3, nb, nbins))
    diag_c = diagonal_level(config.h)
    ddl = []
    grid = np.zeros((nb, config.grid_n, config.grid_n))
    batch_time = np.zeros(nb)
    ltot = np.zeros(2)
    for s in replica_seeds(config.seed, config.replicas):
        out = _run(params.mu1, params.mu2, l11, l21, l22, params.r1, params.r2,
                   config.h, config.n_steps, config.burn_steps, config.record_every,
                   float(config.start[0]), float(config.start[1]), s,
                   _SCHEMES[config.scheme], config.keep_states, nb, lmax, nbins,
                   glo, ghi, config.grid_n, diag_c)
        st, dl, dd, fw, fm, dw, gr, bt, lt, flag = out
        if flag:
            raise StuckAtCorner("push-back failed to return to the wedge; reduce h")
        states.append(st)
        dls.append(dl)
        ddl.append(dd)
        diag_w += dw
        face_w += fw
        face_m += fm
        grid += gr
        batch_time += bt
        ltot += lt
        reps.append(lt)
    return PathRecord(params=params, config=config, states=states, dL=dls,
                      face_w=face_w, face_m=face_m, face_bin=lmax / nbins,
                      grid=grid, grid_lo=glo, grid_hi=ghi, batch_time=batch_time,
                      L_total=ltot, replica_L=np.array(reps),
                      diag_w=diag_w, diag_c=diag_c, dLdiag=ddl)


# ---------------------------------------------------------------------------
# folded and quadrant processes
# ---------------------------------------------------------------------------

def fold_states(z: np.ndarray) -> np.ndarray:
    """Reflect states of S2 across the diagonal into S1."""
    z = np.asarray(z)
    lo = np.minimum(z[..., 0], z[..., 1])
    hi = np.maximum(z[..., 0], z[..., 1])
    return np.stack([lo, hi], axis=-1)


def quadrant_states(zhat: np.ndarray) -> np.ndarray:
    zhat = np.asarray(zhat)
    return np.stack([zhat[..., 1] - zhat[..., 0], zhat[..., 1]], axis=-1)


def diagonal_local_time(path: PathRecord, eps: float | None = None,
                        method: str = "tanaka") -> list:
    """Per-record increments of the local time at 0 of the gap ``D = z2 - z1``.

    ``method="tanaka"`` returns the per-step Tanaka increments accumulated
    during simulation.  ``method="strip"`` is the occupation-density estimate
    ``2 theta * occupation{|D| < e} / (2 e)`` with ``e = eps * sqrt(2)``; it is
    biased when the stationary density is singular at the corner.
    """
    if method == "tanaka" and path.dLdiag is not None:
        return [np.asarray(d, dtype=float) for d in path.dLdiag]
    if method not in ("tanaka", "strip"):
        raise ValueError(f"unknown method {method!r}")
    eps = path.eps if eps is None else eps
    e = eps * math.sqrt(2.0)
    rate = 2.0 * path.params.theta
    out = []
    for z in path.states:
        near = np.abs(z[:, 1].astype(float) - z[:, 0]) < e
        out.append(near * (rate * path.record_dt / (2.0 * e)))
    return out


def transform_hat(path: PathRecord) -> PathRecord:
    """Fold across the diagonal: states land in S1, ``Lhat1 = L1 + L2`` and
    ``Lhat2`` is the local time of the gap at 0."""
    ldiag = diagonal_local_time(path)
    states = [fold_states(z).astype(np.float32) for z in path.states]
    dls = [np.stack([dl[:, 0] + dl[:, 1], ld], axis=1).astype(np.float32)
           for dl, ld in zip(path.dL, ldiag)]
    return replace(path, states=states, dL=dls, kind="Zhat",
                   L_total=np.array([path.L_total.sum(), sum(x.sum() for x in ldiag)]))


def transform_tilde(path_hat: PathRecord) -> PathRecord:
    """Map the folded process to the quadrant: ``(zhat2 - zhat1, zhat2)``."""
    states = [quadrant_states(z).astype(np.float32) for z in path_hat.states]
    return replace(path_hat, states=states, kind="Ztilde")
