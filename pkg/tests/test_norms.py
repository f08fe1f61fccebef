"""Tests for the norm catalog, spec parsing and the axiom checks."""

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minklab.errors import DegeneratePoint, InvalidSpec, ParseError
from minklab.norms import (
    build_spec,
    check_axioms,
    check_point,
    evaluate,
    is_absolutely_homogeneous,
    load_spec,
    parse_spec,
    randers,
)
from minklab.sampling import SamplePlan

from .conftest import EPS, EUCLID3, FAMILIES3, IDENTITY3, QUARTIC3, RANDERS3, admissible_points


def test_euclidean_value():
    assert evaluate(IDENTITY3, [3.0, 4.0, 0.0]) == pytest.approx(5.0, rel=1e-15)


def test_randers_is_asymmetric():
    assert evaluate(RANDERS3, [1.0, 0.0, 0.0]) == pytest.approx(1.5)
    assert evaluate(RANDERS3, [-1.0, 0.0, 0.0]) == pytest.approx(0.5)


def test_quartic_on_axis():
    assert evaluate(QUARTIC3, [1.0, 0.0, 0.0]) == pytest.approx((1.0 + EPS) ** 0.25, rel=1e-15)


@settings(max_examples=50, deadline=None)
@given(y=admissible_points(), lam=st.floats(min_value=0.1, max_value=10.0))
def test_positive_homogeneity(y, lam):
    for spec in FAMILIES3:
        assert evaluate(spec, lam * y) == pytest.approx(lam * evaluate(spec, y), rel=1e-12)


def test_indicatrix_point_has_unit_norm():
    for spec in FAMILIES3:
        y = spec.indicatrix_point([0.3, -1.2, 0.7])
        assert evaluate(spec, y) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("y", [np.zeros(3), [1e-9, 0.0, 0.0], [1.0, 2.0]])
def test_degenerate_points_rejected(y):
    with pytest.raises(DegeneratePoint):
        check_point(y, 3)


@pytest.mark.parametrize("kwargs,invariant", [
    (dict(dim=1, family="quartic_reg", eps=0.2), "dimension must be at least 2"),
    (dict(dim=2, family="euclidean", A=[[1.0, 0.5], [0.0, 1.0]]), "A not symmetric"),
    (dict(dim=2, family="euclidean", A=[[1.0, 2.0], [2.0, 1.0]]), "A not positive definite"),
    (dict(dim=2, family="randers", A=np.eye(2), b=[1.0, 0.0]), "randers drift too large"),
    (dict(dim=2, family="quartic_reg", eps=0.0), "eps must be positive"),
])
def test_invalid_specs_name_the_invariant(kwargs, invariant):
    with pytest.raises(InvalidSpec) as excinfo:
        build_spec(**kwargs)

    assert excinfo.value.invariant == invariant


def test_non_strict_build_keeps_violation():
    spec = build_spec(2, "euclidean", A=[[1.0, 2.0], [2.0, 1.0]], strict=False)

    assert spec.violation == "A not positive definite"


def test_parse_spec_roundtrip_summary():
    text = json.dumps({"dim": 3, "family": "randers", "A": np.eye(3).tolist(), "b": [0.5, 0.0, 0.0]})

    spec = parse_spec(text)

    assert spec.summary() == {"dim": 3, "family": "randers", "A": np.eye(3).tolist(), "b": [0.5, 0.0, 0.0]}


@pytest.mark.parametrize("doc", [
    "{not json",
    "[1, 2]",
    json.dumps({"family": "quartic_reg", "eps": 0.2}),
    json.dumps({"dim": 3, "family": "finsler", "eps": 0.2}),
    json.dumps({"dim": 3, "family": "euclidean", "A": np.eye(3).tolist(), "b": [0, 0, 0]}),
    json.dumps({"dim": 3, "family": "randers", "A": np.eye(3).tolist()}),
    json.dumps({"dim": "3", "family": "quartic_reg", "eps": 0.2}),
    json.dumps({"dim": 2, "family": "euclidean", "A": [["x", 0], [0, 1]]}),
    json.dumps({"dim": 2, "family": "quartic_reg", "eps": [0.2]}),
])
def test_malformed_documents(doc):
    with pytest.raises(ParseError):
        parse_spec(doc)


def test_parse_reports_invariant_violations():
    with pytest.raises(InvalidSpec, match="randers drift too large"):
        parse_spec(json.dumps({"dim": 2, "family": "randers", "A": [[1, 0], [0, 1]], "b": [0.8, 0.8]}))


def test_load_spec_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_spec(str(tmp_path / "nope.json"))


def test_axioms_hold_for_catalog():
    plan = SamplePlan(count=40)
    for spec in FAMILIES3:
        report = check_axioms(spec, plan)

        assert report.positivity_ok
        assert report.homogeneity_residual < 1e-10
        assert report.min_metric_eigenvalue > 0.0
        assert report.samples_used == 40


def test_absolute_homogeneity():
    plan = SamplePlan(count=40)

    symmetric, residual = is_absolutely_homogeneous(EUCLID3, plan)
    assert symmetric and residual < 1e-12

    symmetric, residual = is_absolutely_homogeneous(QUARTIC3, plan)
    assert symmetric and residual < 1e-12

    symmetric, residual = is_absolutely_homogeneous(RANDERS3, plan)
    assert not symmetric and residual > 0.1


def test_randers_past_the_drift_bound_loses_convexity():
    spec = build_spec(2, "randers", A=np.eye(2), b=[1.5, 0.0], strict=False)

    report = check_axioms(spec, SamplePlan(count=100))

    assert report.min_metric_eigenvalue < 0.0
    assert not report.positivity_ok


def test_witness_points_expose_randers_asymmetry():
    spec = randers(np.eye(2), [0.5, 0.0])
    plan = SamplePlan(count=3, extra_points=((1.0, 0.0), (-1.0, 0.0)))

    symmetric, residual = is_absolutely_homogeneous(spec, plan)

    np.testing.assert_allclose(plan.points(2)[-2:], [[1.0, 0.0], [-1.0, 0.0]])
    assert not symmetric
    # F(-e1) = 0.5 and F(e1) = 1.5; 2 is the sup of the relative gap over all directions.
    assert residual == pytest.approx(2.0, rel=1e-12)
