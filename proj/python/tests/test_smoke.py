# Copyright 2026 The gentropy Authors
# SPDX-License-Identifier: Apache-2.0

import json
import pathlib

import numpy as np
import pytest

import gentropy

DATA = pathlib.Path(__file__).resolve().parents[2] / "tests" / "data"


def test_gaussian_g_entropy_is_trace_of_precision():
    sigma = np.array([[1.0, 1.0], [1.0, 4.0]])
    model = gentropy.gaussian(np.zeros(2), sigma)
    closed = gentropy.g_entropy(model, "closed_form")
    assert closed["value"] == pytest.approx(np.trace(np.linalg.inv(sigma)), rel=1e-12)
    mc = gentropy.g_entropy(model, "monte_carlo", samples=50000, seed=7)
    assert abs(mc["value"] - closed["value"]) < 5 * mc["std_error"]


def test_score_matches_finite_difference():
    model = gentropy.load_model(str(DATA / "student_t.json"))
    x = np.array([0.3, -0.2, 0.5, 1.1][: model.dim])
    h = 1e-6
    fd = np.array([
        (model.log_density(x + h * e) - model.log_density(x - h * e)) / (2 * h)
        for e in np.eye(model.dim)
    ])
    np.testing.assert_allclose(model.score(x), fd, rtol=1e-6, atol=1e-8)


def test_fisher_divergence_between_shifted_gaussians():
    p = gentropy.gaussian(np.zeros(1), np.eye(1))
    q = gentropy.gaussian(np.array([1.5]), np.eye(1))
    # Equal unit variances: the score difference is the constant shift.
    d = gentropy.fisher_divergence(p, q, "closed_form")
    assert d["value"] == pytest.approx(0.5 * 1.5**2, rel=1e-12)


def test_mgice_fit_returns_gaussian_mle():
    truth = gentropy.gaussian(np.array([1.0, -1.0]), np.array([[2.0, 0.3], [0.3, 1.0]]))
    data = truth.sample(400, seed=3)
    fit = gentropy.mgice_fit(data, truth)
    assert fit["converged"]
    np.testing.assert_allclose(fit["model"].mean(), data.mean(axis=0), atol=1e-6)


def test_select_ar_on_fixture_series():
    rows = [line for line in (DATA / "ar2_series.csv").read_text().splitlines()
            if line and not line.startswith("#")]
    series = np.array([float(v) for v in rows[1:]])
    report = gentropy.select_ar(series, 5)
    assert report["selected_order"] == 2
    assert len(report["rows"]) == 6
    assert gentropy.ar_bias_closed_form(2, 1.0) == pytest.approx(8.0)


def test_model_json_round_trip():
    model = gentropy.gaussian(np.array([0.5]), np.array([[2.0]]))
    back = gentropy.model_from_json(model.to_json())
    assert back.family == "gaussian"
    np.testing.assert_allclose(back.theta, model.theta)


def test_errors_surface_as_gentropy_error():
    with pytest.raises(gentropy.GentropyError, match="NotPositiveDefinite"):
        gentropy.gaussian(np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(gentropy.GentropyError):
        gentropy.model_from_json(json.dumps({"family": "nope"}))


def test_verify_single_criterion():
    (result,) = gentropy.verify([4])
    assert result["id"] == 4 and result["passed"]
