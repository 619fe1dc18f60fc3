import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbmwedge import DEFAULT_ASYMMETRIC, DEFAULT_SYMMETRIC, ModelParams
from rbmwedge.exceptions import NotRecurrent
from rbmwedge.simulate import (SimConfig, fold_states, quadrant_states, replica_seeds,
                               simulate_path, step_rbm, transform_hat, transform_tilde)

from conftest import recurrent_params

TINY = SimConfig(horizon=20.0, burn_in=1.0, replicas=2, seed=3, n_batches=4)


def test_interior_step_is_free_gaussian_step():
    p = DEFAULT_ASYMMETRIC
    h = 1e-3
    xi = np.array([0.3, -1.2])
    L = np.linalg.cholesky(p.cov)
    expected = np.array([5.0, 5.0]) + p.mu * h + math.sqrt(h) * L @ xi
    for u in (None, 0.4):
        z, a1, a2 = step_rbm(p, (5.0, 5.0), xi, h, u)
        np.testing.assert_allclose(z, expected, rtol=0, atol=1e-15)
        assert a1 == 0.0 and a2 == 0.0


@pytest.mark.parametrize("u", [None, 0.5, 1e-6])
def test_push_is_along_reflection_vector(u):
    p = DEFAULT_ASYMMETRIC
    h = 1e-2
    start = np.array([-1.0, 0.01])
    xi = np.array([0.0, -3.0])
    free = start + p.mu * h + math.sqrt(h) * np.linalg.cholesky(p.cov) @ xi
    z, a1, a2 = step_rbm(p, start, xi, h, u)
    assert a1 > 0 and a2 == 0.0
    np.testing.assert_allclose(z - free, a1 * np.array([p.r1, 1.0]), atol=1e-14)
    assert z[1] >= 0.0


def test_bridge_pushes_at_least_as_much_as_projection():
    p = DEFAULT_SYMMETRIC
    xi = np.array([0.1, -2.0])
    _, a_euler, _ = step_rbm(p, (-0.5, 0.02), xi, 1e-2)
    _, a_bridge, _ = step_rbm(p, (-0.5, 0.02), xi, 1e-2, u=0.3)
    assert a_bridge >= a_euler > 0


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(h=0.0)
    with pytest.raises(ValueError):
        SimConfig(burn_in=3e4)
    with pytest.raises(ValueError):
        SimConfig(start=(-1.0, -1.0))
    with pytest.raises(ValueError):
        SimConfig(scheme="milstein")
    with pytest.raises(ValueError):
        SimConfig(n_batches=1)


def test_transient_parameters_are_rejected():
    p = ModelParams(0.5, -1.0, 1.0, 1.0, 0.0, 2.0, 2.0)
    with pytest.raises(NotRecurrent):
        simulate_path(p, TINY)
    path = simulate_path(p, TINY.with_(allow_transient=True))
    assert path.total_time > 0


def test_seed_determinism():
    a = simulate_path(DEFAULT_ASYMMETRIC, TINY)
    b = simulate_path(DEFAULT_ASYMMETRIC, TINY)
    c = simulate_path(DEFAULT_ASYMMETRIC, TINY.with_(seed=4))
    np.testing.assert_array_equal(a.states[0], b.states[0])
    np.testing.assert_array_equal(a.L_total, b.L_total)
    assert not np.array_equal(a.states[0], c.states[0])


def test_replica_seeds_are_distinct():
    s = replica_seeds(0, 16)
    assert len(set(s)) == 16
    assert s == replica_seeds(0, 16)


@given(recurrent_params())
@settings(max_examples=10, deadline=None)
def test_states_stay_in_wedge(p):
    path = simulate_path(p, TINY)
    for z in path.states:
        assert not np.any((z[:, 0] < 0) & (z[:, 1] < 0))
    assert np.all(path.L_total >= 0)


def test_record_bookkeeping():
    path = simulate_path(DEFAULT_ASYMMETRIC, TINY)
    cfg = TINY
    n_rec = (cfg.n_steps - cfg.burn_steps) // cfg.record_every
    assert path.states[0].shape == (n_rec, 2)
    assert path.total_time == pytest.approx(cfg.replicas * (cfg.horizon - cfg.burn_in))
    # per-record increments add up to the total (float32 storage)
    total = sum(dl.astype(float).sum(axis=0) for dl in path.dL)
    np.testing.assert_allclose(total, path.L_total, rtol=1e-4)
    assert path.face_w.sum(axis=(1, 2)) == pytest.approx(path.L_total)
    t = path.times(0)
    assert t[0] == pytest.approx(cfg.burn_in + path.record_dt)


@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=1, max_size=20))
def test_fold_and_quadrant_maps(pts):
    z = np.array(pts)
    f = fold_states(z)
    assert np.all(f[:, 0] <= f[:, 1])
    np.testing.assert_array_equal(fold_states(z[:, ::-1]), f)
    q = quadrant_states(f)
    assert np.all(q[:, 0] >= 0)
    inside = ~((z[:, 0] < 0) & (z[:, 1] < 0))
    assert np.all(q[inside, 1] >= 0)


def test_hat_and_tilde_transforms(short_sym):
    hat = transform_hat(short_sym)
    assert hat.kind == "Zhat"
    assert hat.L_total[0] == pytest.approx(short_sym.L_total.sum())
    tilde = transform_tilde(hat)
    assert tilde.kind == "Ztilde"
    assert np.all(tilde.states[0][:, 0] >= 0)


def test_local_time_rates_match_adjoint_identity(path_asym, path_sym):
    """With f(z) = z_k the adjoint relation gives R l = -mu for the rates l."""
    for path in (path_asym, path_sym):
        p = path.params
        R = np.array([[p.r1, 1.0], [1.0, p.r2]])
        exact = np.linalg.solve(R, -p.mu)
        per = path.replica_L / (path.total_time / path.config.replicas)
        se = per.std(axis=0, ddof=1) / math.sqrt(len(per))
        z = np.abs(per.mean(axis=0) - exact) / se
        assert np.all(z < 4), (per.mean(axis=0), exact, se)


def test_symmetric_faces_balance(path_sym):
    per = path_sym.replica_L / (path_sym.total_time / path_sym.config.replicas)
    diff = per[:, 0] - per[:, 1]
    assert abs(diff.mean()) < 4 * diff.std(ddof=1) / math.sqrt(len(diff))
