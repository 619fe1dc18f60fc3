import math

import numpy as np
import pytest
from hypothesis import given
from scipy.optimize import brentq

from rbmwedge import DEFAULT_ASYMMETRIC, DEFAULT_SYMMETRIC, ModelParams
from rbmwedge.estimate import estimate_m
from rbmwedge.exceptions import DomainViolation, NotInFamily, NotSymmetric, OutsideWedge
from rbmwedge.symmetric import (RemarkableDensity, bar_residual, classify, cone_angle,
                                continuation_identity, curve_points, d_algebraic_reflection,
                                density_z, diagonal_measure_check, fold_consistency,
                                m_from_kernel, normalization, quadrant_angle,
                                quadrant_estimates, reflection_angle, reflection_for_angle,
                                remarkable_density, remarkable_params, remarkable_reflection,
                                remarkable_shape, scalar_bvp_condition, symmetric_feq_residual,
                                symmetric_points, verify_remarkable)

from conftest import random_symmetric, symmetric_params


# ---------------------------------------------------------------------------
# angles and classification
# ---------------------------------------------------------------------------

def test_symmetry_required():
    with pytest.raises(NotSymmetric):
        cone_angle(DEFAULT_ASYMMETRIC)


@given(symmetric_params())
def test_angles_in_range(p):
    assert math.pi < cone_angle(p) < 2 * math.pi
    assert math.pi / 2 < quadrant_angle(p) < math.pi
    assert 0 < reflection_angle(p) < math.pi


@given(symmetric_params())
def test_reflection_for_angle_inverts(p):
    r = reflection_for_angle(p.sigma1, p.rho, reflection_angle(p))
    assert r == pytest.approx(p.r1, rel=1e-9)


def test_recurrent_configurations_are_never_skew_or_sum_of_exponentials():
    for p in random_symmetric(np.random.default_rng(5), 100):
        rep = classify(p)
        assert not rep.skew_symmetric and not rep.dieker_moriarty


def test_d_algebraic_configuration_against_brentq():
    sigma, rho = 1.0, 0.5
    bt = math.acos(-math.sqrt(0.5 * (1 - rho / sigma)))
    target = 2 * bt - math.pi / 2

    def f(r):
        return reflection_angle(ModelParams.symmetric(-1.0, sigma, rho, r)) - target
    r_oracle = brentq(f, 1.01, 50.0, xtol=1e-14)
    r = d_algebraic_reflection(sigma, rho, k=2)
    assert r == pytest.approx(r_oracle, rel=1e-10)
    rep = classify(ModelParams.symmetric(-1.0, sigma, rho, r))
    assert rep.d_algebraic_condition
    k, j = rep.lattice
    assert math.pi / 2 + rep.delta == pytest.approx(k * bt + j * math.pi, abs=1e-9)


def test_remarkable_member_is_not_flagged():
    rep = classify(remarkable_params())
    assert not (rep.skew_symmetric or rep.dieker_moriarty or rep.d_algebraic_condition)
    assert set(rep.to_dict()) >= {"skew_symmetric", "lattice"}


# ---------------------------------------------------------------------------
# scalar boundary condition
# ---------------------------------------------------------------------------

def test_scalar_bvp_on_curve(est_sym):
    pts = curve_points(DEFAULT_SYMMETRIC, 10, est_sym)
    z = [scalar_bvp_condition(DEFAULT_SYMMETRIC, est_sym, p).z for p in pts]
    assert sum(v <= 3 for v in z) >= 9, z


def test_scalar_bvp_antisymmetric(est_sym):
    p = curve_points(DEFAULT_SYMMETRIC, 4, est_sym)[1]
    a = scalar_bvp_condition(DEFAULT_SYMMETRIC, est_sym, p).residual
    b = scalar_bvp_condition(DEFAULT_SYMMETRIC, est_sym, p.conjugate()).residual
    assert a == pytest.approx(-b, abs=1e-12)


def test_scalar_bvp_vertex_and_off_curve(est_sym):
    h = curve_points(DEFAULT_SYMMETRIC, 1)[0]
    with pytest.raises(DomainViolation):
        scalar_bvp_condition(DEFAULT_SYMMETRIC, est_sym, complex(h.real + 0.3, h.imag))
    c = DEFAULT_SYMMETRIC.mu1 / (DEFAULT_SYMMETRIC.sigma1 + DEFAULT_SYMMETRIC.rho)
    vertex = c + abs(c)
    assert scalar_bvp_condition(DEFAULT_SYMMETRIC, est_sym, vertex).residual == 0


def test_continuation_identity(est_sym):
    for p in curve_points(DEFAULT_SYMMETRIC, 4, est_sym):
        assert continuation_identity(DEFAULT_SYMMETRIC, est_sym, p).z < 3.5


# ---------------------------------------------------------------------------
# folded model
# ---------------------------------------------------------------------------

def test_symmetric_feq_with_kernel_m(est_sym):
    quad = quadrant_estimates(est_sym)
    pts = symmetric_points(DEFAULT_SYMMETRIC, est_sym, 20)
    z = [symmetric_feq_residual(DEFAULT_SYMMETRIC, est_sym, p, q, quad, m_method="kernel").z
         for p, q in pts]
    assert sum(v <= 3 for v in z) >= 19, z


def test_kernel_m_matches_tanaka_within_bias(est_sym, path_sym):
    # q = 0 is a removable 0 / 0 of the kernel route
    for q in (-0.05, -0.15, -0.3):
        a = m_from_kernel(DEFAULT_SYMMETRIC, est_sym, q)
        b = estimate_m(path_sym, q)
        assert abs(a.value - b.value) < 0.03 * abs(a.value) + 3 * (a.se_abs + b.se_abs)
    assert m_from_kernel(DEFAULT_SYMMETRIC, est_sym, -1e-3).value.real == pytest.approx(
        1 / 3, rel=0.03)


def test_fold_consistency(est_sym):
    quad = quadrant_estimates(est_sym)
    for x, y in [(0.3j, -0.5j), (-0.4j, 0.2j), (0.8j, 0.8j)]:
        assert fold_consistency(est_sym, x, y, quad).z < 3.5


def test_diagonal_measure(path_sym):
    for q in (0.0, -0.3):
        assert diagonal_measure_check(path_sym, q).z < 4


# ---------------------------------------------------------------------------
# closed-form density family
# ---------------------------------------------------------------------------

def test_remarkable_reflection_closed_form():
    # rho = 0, sigma = 1: cone opening 3 pi / 2 and r = tan(3 pi / 8) = 1 + sqrt 2
    assert remarkable_params().r1 == pytest.approx(1 + math.sqrt(2), rel=1e-14)
    r, res = remarkable_reflection(ModelParams.symmetric(-1.0, 1.0, 0.0, 3.0))
    assert r == pytest.approx(1 + math.sqrt(2), rel=1e-6)
    assert res < 1e-6


@pytest.mark.parametrize("mu, sigma, rho", [(-1.0, 1.0, 0.0), (-0.5, 2.0, 0.6),
                                            (-2.0, 1.0, -0.4)])
def test_density_normalised_and_stationary(mu, sigma, rho):
    p = remarkable_params(mu, sigma, rho)
    cfg = RemarkableDensity.for_params(p)
    assert normalization(cfg) == pytest.approx(1.0, abs=1e-6)
    assert bar_residual(p, cfg) <= 1e-6


def test_shape_is_free_of_opening():
    r, t = np.array([0.3, 1.2]), np.array([0.1, -0.4])
    a = RemarkableDensity(1.3, 4.0)
    b = RemarkableDensity(1.3, 5.0)
    np.testing.assert_allclose(remarkable_density(a, r, t) / remarkable_density(b, r, t),
                               a.C / b.C)
    np.testing.assert_allclose(remarkable_density(a, r, t) / a.C, remarkable_shape(1.3, r, t))


def test_density_outside_cone():
    cfg = RemarkableDensity(1.0, 3.0)
    with pytest.raises(OutsideWedge):
        remarkable_density(cfg, 1.0, 1.6)
    with pytest.raises(OutsideWedge):
        remarkable_density(cfg, 0.0, 0.0)
    p = remarkable_params()
    assert density_z(p, RemarkableDensity.for_params(p), -1.0, -1.0) == 0.0


def test_off_family_is_rejected():
    p = remarkable_params()
    with pytest.raises(NotInFamily):
        verify_remarkable(ModelParams.symmetric(p.mu1, p.sigma1, p.rho, p.r1 + 0.5))


def test_total_variation_against_simulation(path_rem):
    rep = verify_remarkable(path_rem.params, path=path_rem)
    assert rep.tv <= 0.05 and rep.passed
    assert rep.to_dict()["pass"] is True
