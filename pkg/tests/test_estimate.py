import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.base import clone

from rbmwedge import DEFAULT_ASYMMETRIC
from rbmwedge.estimate import (LaplaceEstimate, LaplaceTransformEstimator, PathEstimates,
                               StaticEstimates, check_domain, decay_rate,
                               estimate_corner_densities, estimate_density, estimate_ell,
                               estimate_L, estimate_m, estimate_n, zscore)
from rbmwedge.exceptions import DomainViolation, MissingEstimate
from rbmwedge.simulate import transform_hat, transform_tilde

coord = st.floats(-3, 3, allow_nan=False)


# ---------------------------------------------------------------------------
# LaplaceEstimate arithmetic
# ---------------------------------------------------------------------------

def test_batch_means_and_se():
    b = np.array([1.0, 2.0, 3.0, 4.0]) + 1j * np.array([0.0, 0.0, 1.0, 1.0])
    e = LaplaceEstimate.from_batches(b)
    assert e.value == pytest.approx(2.5 + 0.5j)
    assert e.se[0] == pytest.approx(np.std(b.real, ddof=1) / 2)
    assert e.n_effective == 4


def test_shared_batches_combine_batchwise():
    a = LaplaceEstimate.from_batches([1.0, 2.0, 3.0])
    b = LaplaceEstimate.from_batches([1.0, 2.0, 3.0])
    d = a - b
    assert d.value == 0 and d.se == (0.0, 0.0)
    s = 2.0 * a + 1.0
    np.testing.assert_allclose(s.batches, [3.0, 5.0, 7.0])


def test_independent_combination_adds_in_quadrature():
    a = LaplaceEstimate(1.0 + 0j, (0.3, 0.0), 10)
    b = LaplaceEstimate(2.0 + 0j, (0.4, 0.0), 10)
    assert (a + b).se[0] == pytest.approx(0.5)


def test_complex_scaling_without_batches():
    a = LaplaceEstimate(1.0 + 0j, (0.3, 0.4), 10)
    c = a * 2j
    assert c.value == 2j
    assert c.se == pytest.approx((1.0, 1.0))
    assert a.conj().value == a.value


def test_product_of_estimates_is_refused():
    a = LaplaceEstimate.from_batches([1.0, 2.0])
    with pytest.raises(TypeError):
        a * a


def test_zscore():
    assert zscore(LaplaceEstimate(0.3 + 0.4j, (0.1, 0.1), 5)) == pytest.approx(4.0)
    assert zscore(LaplaceEstimate.exact(0.0)) == 0.0
    assert zscore(LaplaceEstimate.exact(1.0)) == math.inf


# ---------------------------------------------------------------------------
# domains
# ---------------------------------------------------------------------------

@given(coord, coord)
def test_s1_domain_matches_recession_rays(x, y):
    # S1 = {z2 >= z1} recedes along (-1, 0) and (1, 1)
    ok = (-x <= -0.01 or x == 0) and (x + y <= -0.01 or x + y == 0)
    try:
        check_domain("S1", x, y)
        raised = False
    except DomainViolation:
        raised = True
    assert raised is not ok or abs(x + y) < 1e-14 or abs(x) < 1e-14


def test_unknown_region():
    with pytest.raises(ValueError):
        check_domain("T", -1, -1)


# ---------------------------------------------------------------------------
# estimators on simulated paths
# ---------------------------------------------------------------------------

def test_total_mass_is_one(short_asym):
    e = estimate_L(short_asym, "S", 0.0, 0.0)
    assert e.value == pytest.approx(1.0, abs=1e-12)
    s1 = estimate_L(short_asym, "S1", 0.0, 0.0).value
    s2 = estimate_L(short_asym, "S2", 0.0, 0.0).value
    assert s1 + s2 == pytest.approx(1.0, abs=1e-12)


def test_l_is_bounded_by_mass_on_imaginary_axis(short_asym):
    for y in (0.5j, -2.0j, 3.0j):
        assert abs(estimate_L(short_asym, "S", 0.0, y).value) <= 1.0 + 1e-12


def test_ell_at_zero_is_local_time_rate(short_asym):
    for axis in (1, 2):
        e = estimate_ell(short_asym, axis, 0.0)
        assert e.value.real == pytest.approx(short_asym.L_total[axis - 1]
                                             / short_asym.total_time, rel=1e-6)


def test_ell_conjugate_symmetry(short_asym):
    a = estimate_ell(short_asym, 1, 0.3 + 0.7j).value
    b = estimate_ell(short_asym, 1, 0.3 - 0.7j).value
    assert a == pytest.approx(np.conj(b), abs=1e-12)


def test_ell_domain(short_asym):
    with pytest.raises(DomainViolation):
        estimate_ell(short_asym, 1, -0.5)
    rate = decay_rate(short_asym, 1)
    assert rate > 0
    estimate_ell(short_asym, 1, -0.3 * rate, continuation=0.5)
    with pytest.raises(ValueError):
        estimate_ell(short_asym, 3, 1.0)


def test_diagonal_domain(short_asym):
    with pytest.raises(DomainViolation):
        estimate_m(short_asym, 0.5)
    estimate_m(short_asym, 0.0)


def test_region_q_needs_quadrant_path(short_sym):
    with pytest.raises(ValueError):
        estimate_L(short_sym, "Q", -1.0, -1.0)
    tilde = transform_tilde(transform_hat(short_sym))
    # the quadrant transform at the origin is half the folded mass
    assert estimate_L(tilde, "Q", 0.0, 0.0).value == pytest.approx(0.5)


def test_symmetric_diagonal_mass(path_sym):
    """m(0) = 1/3 exactly for the symmetric default (adjoint relation with
    f = |z2 - z1|); the gap local time carries a small corner bias."""
    e = estimate_m(path_sym, 0.0)
    assert abs(e.value.real - 1.0 / 3.0) < 0.03 / 3.0


def test_symmetric_normal_derivative_vanishes(path_sym):
    for s in (-0.1, -0.5, -1.0):
        assert zscore(estimate_n(path_sym, s)) < 3.5


def test_corner_densities_and_density_grid(short_asym):
    cd = estimate_corner_densities(short_asym)
    assert cd.nu1.value.real > 0 and cd.nu2.value.real > 0
    g = estimate_density(short_asym)
    assert np.all(g.density >= 0)
    # the window only covers part of the mass; compare with a direct count
    lo, hi = short_asym.grid_lo, short_asym.grid_hi
    z = np.concatenate(short_asym.states)
    inside = np.mean((z[:, 0] >= lo) & (z[:, 0] < hi) & (z[:, 1] >= lo) & (z[:, 1] < hi))
    assert g.mass() == pytest.approx(inside, abs=2e-3)
    for z1, z2, _, _ in g.to_rows():
        assert z1 >= 0 or z2 >= 0


# ---------------------------------------------------------------------------
# estimate providers
# ---------------------------------------------------------------------------

def test_path_estimates_memoise(short_asym):
    est = PathEstimates(short_asym)
    assert est.ell(1, 0.5) is est.ell(1, 0.5 + 0j)


def test_static_estimates():
    e = LaplaceEstimate.exact(0.25)
    est = StaticEstimates(DEFAULT_ASYMMETRIC, {("ell", 1, 0.5): e, ("m", -1): e})
    assert est.ell(1, 0.5 + 0j) is e
    assert est.m(-1.0) is e
    with pytest.raises(MissingEstimate):
        est.n(-1.0)
    with pytest.raises(MissingEstimate):
        est.E()


# ---------------------------------------------------------------------------
# estimator object
# ---------------------------------------------------------------------------

def test_estimator_params_roundtrip():
    est = LaplaceTransformEstimator(target="ell1", horizon=100.0)
    c = clone(est)
    assert c.get_params() == est.get_params()
    c.set_params(target="m")
    assert c.target == "m" and est.target == "ell1"


def test_estimator_requires_fit():
    with pytest.raises(RuntimeError):
        LaplaceTransformEstimator().transform([[0.1 + 0j]])


def test_estimator_rejects_unknown_target(short_asym):
    with pytest.raises(ValueError):
        LaplaceTransformEstimator(target="L3").fit(path=short_asym)


def test_estimator_transform(short_asym):
    est = LaplaceTransformEstimator(target="L1").fit(path=short_asym)
    X = np.array([[0.3, -0.8], [0.5j, -1.0]], dtype=complex)
    out = est.transform(X)
    assert out.shape == (2, 4)
    direct = estimate_L(short_asym, "S1", 0.3, -0.8)
    assert out[0, 0] == pytest.approx(direct.value.real)
    one = LaplaceTransformEstimator(target="ell2").fit(path=short_asym).transform([0.5, 1j])
    assert one.shape == (2, 4)


def test_estimator_simulates_when_fitted_without_path():
    est = LaplaceTransformEstimator(target="ell1", horizon=30.0, burn_in=1.0, replicas=1)
    out = est.fit().transform([0.5])
    assert out[0, 0] > 0


def test_zscore_ignores_rounding_level_components():
    e = LaplaceEstimate(7e-17 - 5e-4j, (7e-18, 2e-3), 10)
    assert zscore(e) == pytest.approx(0.25)
