"""Tests for the pointwise tensors of the induced Riemannian space."""

import numpy as np
import pytest
from hypothesis import given, settings

from minklab.errors import DegeneratePlane, NotPositiveDefinite
from minklab.norms import build_spec, evaluate
from minklab.sampling import SamplePlan
from minklab.tensors import (
    CURVATURE_SIGN,
    CURVATURE_SWAP_KL,
    calibrate_convention,
    cartan,
    christoffel,
    cross_route_gap,
    curvature_cartan,
    curvature_connection,
    eq23_residual,
    euler_residuals,
    mean_cartan,
    metric,
    point_geometry,
    sectional,
)

from .conftest import (
    EPS,
    EUCLID3,
    FAMILIES3,
    QUARTIC3,
    RANDERS3,
    SPD_3,
    admissible_points,
    fd_metric_derivative,
    quartic_metric_oracle,
    randers_metric_oracle,
)

POINTS = SamplePlan(seed=3, count=8).points(3)


def test_euclidean_metric_is_constant_and_torsion_free():
    for y in POINTS:
        geom = point_geometry(EUCLID3, y)
        np.testing.assert_allclose(geom.g, SPD_3, atol=1e-15)
        assert np.abs(geom.cartan.C_low).max() == 0.0
        assert np.abs(geom.gamma).max() == 0.0
        assert curvature_connection(EUCLID3, y).norm == 0.0
        assert curvature_cartan(EUCLID3, y).norm == 0.0


def test_metric_inverse():
    m = metric(QUARTIC3, [0.2, 1.0, -0.7])

    np.testing.assert_allclose(m.g @ m.g_inv, np.eye(3), atol=1e-14)
    assert m.norm_value == pytest.approx(evaluate(QUARTIC3, [0.2, 1.0, -0.7]))


def test_quartic_metric_on_axis():
    g = metric(QUARTIC3, [1.0, 0.0, 0.0]).g
    scale = 1.0 / np.sqrt(1.0 + EPS)

    np.testing.assert_allclose(g, np.diag([(1.0 + EPS) * scale, scale, scale]), atol=1e-14)
    assert g[0, 0] == pytest.approx(1.09545, abs=1e-5)
    assert g[1, 1] == pytest.approx(0.91287, abs=1e-5)


@settings(max_examples=40, deadline=None)
@given(y=admissible_points())
def test_metric_matches_closed_forms(y):
    np.testing.assert_allclose(metric(QUARTIC3, y).g, quartic_metric_oracle(y), rtol=1e-11, atol=1e-13)
    np.testing.assert_allclose(metric(RANDERS3, y).g, randers_metric_oracle(y, np.eye(3), [0.5, 0.0, 0.0]),
                               rtol=1e-11, atol=1e-13)


def test_randers_cartan_against_closed_form_metric():
    y = np.array([0.3, 0.9, -0.4])
    F = evaluate(RANDERS3, y)
    dg = fd_metric_derivative(lambda p: randers_metric_oracle(p, np.eye(3), [0.5, 0.0, 0.0]), y)

    np.testing.assert_allclose(cartan(RANDERS3, y).C_low, 0.5 * F * dg, atol=1e-8)


def test_mean_cartan_is_log_det_derivative():
    y = np.array([0.8, -0.3, 0.5])
    F = evaluate(QUARTIC3, y)
    h = 1e-5
    expected = np.zeros(3)
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        plus = np.log(np.linalg.det(quartic_metric_oracle(y + e)))
        minus = np.log(np.linalg.det(quartic_metric_oracle(y - e)))
        expected[k] = 0.5 * F * (plus - minus) / (2.0 * h)

    A = mean_cartan(QUARTIC3, y)

    np.testing.assert_allclose(A, expected, atol=1e-8)
    assert np.linalg.norm(A) > 1e-4


def test_cartan_mixed_lowers_back():
    y = POINTS[0]
    geom = point_geometry(RANDERS3, y, order=3)

    np.testing.assert_allclose(np.einsum("is,sjk->ijk", geom.g, geom.cartan.C_mixed), geom.cartan.C_low,
                               atol=1e-13)


def test_christoffel_equals_cartan_over_F():
    for spec in FAMILIES3:
        for y in POINTS:
            geom = point_geometry(spec, y, order=3)
            assert eq23_residual(geom) < 1e-10
            np.testing.assert_allclose(christoffel(spec, y), geom.cartan.C_mixed / geom.F, atol=1e-10)


def test_euler_identities():
    for spec in FAMILIES3:
        for y in POINTS:
            residuals = euler_residuals(point_geometry(spec, y), spec)
            assert max(residuals.values()) < 1e-10, (spec.family, residuals)


def test_curvature_routes_agree():
    for spec in (RANDERS3, QUARTIC3):
        for y in POINTS:
            assert cross_route_gap(point_geometry(spec, y)) < 1e-7


def test_committed_convention_is_best():
    sign, swap, worst = calibrate_convention(QUARTIC3, POINTS[:4])

    assert (sign, swap) == (CURVATURE_SIGN, CURVATURE_SWAP_KL)
    assert worst < 1e-7


def test_curvature_symmetries():
    y = POINTS[1]
    geom = point_geometry(QUARTIC3, y)
    for R in (geom.curvature_cartan().R, geom.curvature_connection().R):
        lowered = np.einsum("im,ijkl->mjkl", geom.g, R)
        scale = 1e-9 * (1.0 + np.abs(R).max())
        assert np.abs(R + np.transpose(R, (0, 1, 3, 2))).max() < scale
        assert np.abs(lowered + np.transpose(lowered, (1, 0, 2, 3))).max() < scale
        assert np.abs(np.einsum("ijkl,j->ikl", R, y)).max() < scale


def test_quartic_is_curved():
    y = np.array([1.0, 0.4, -0.7])
    assert curvature_cartan(QUARTIC3, y).norm > 1e-4


def test_sectional_properties():
    y = np.array([1.0, 0.4, -0.7])
    U = np.array([0.2, 1.0, 0.1])
    V = np.array([0.0, 0.3, 1.0])

    K = sectional(QUARTIC3, y, U, V)

    assert sectional(QUARTIC3, y, V, U) == pytest.approx(K, rel=1e-10)
    assert sectional(QUARTIC3, y, 2.0 * U + V, V) == pytest.approx(K, rel=1e-8)
    assert sectional(EUCLID3, y, U, V) == 0.0


def test_degenerate_plane():
    with pytest.raises(DegeneratePlane):
        sectional(QUARTIC3, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 2.0, 0.0])


def test_not_positive_definite():
    spec = build_spec(2, "euclidean", A=[[1.0, 0.0], [0.0, -1.0]], strict=False)

    with pytest.raises(NotPositiveDefinite):
        metric(spec, [1.0, 0.5])
