"""End-to-end smoke tests for the driftcast Python bindings.

These intentionally stay shallow: numerical correctness is covered by the
C++ suites, so here we only verify that the bindings expose the pipeline
and that results agree with basic expectations.
"""

import json
import math

import pytest

import driftcast as dc


def test_simulate_and_estimate_gbm():
    values = dc.simulate_gbm(s0=1.0, a=0.05, b=0.2, n_steps=5000, dt=0.01, seed=7)
    assert len(values) == 5001
    assert min(values) > 0.0
    params = dc.estimate_gbm(values, dt=0.01)
    assert abs(params.a - 0.05) <= 3 * 0.2 / math.sqrt(5000 * 0.01)
    assert abs(params.b - 0.2) / 0.2 <= 0.05


def test_spm_forecast_shape_and_ordering():
    values = dc.simulate_gbm(s0=100.0, a=0.01, b=0.05, n_steps=400, dt=1.0, seed=42)
    forecasts = dc.forecast_spm(values, dt=1.0, horizon=10, window=200, seed=1)
    assert len(forecasts) == 10
    for f in forecasts:
        assert f.mean >= f.median >= f.mode
        assert f.upper >= f.mean >= f.lower


def test_mpm_forecast_on_engine_preset():
    series = dc.simulate_engine_preset(n_steps=600, dt=10.0, seed=3)
    assert series.dimension == 8
    policy = dc.WindowPolicy(w_base=100, w_min=50, w_max=200, lookback=50)
    steps = dc.forecast_mpm(series, horizon=5, policy=policy, particles=200, seed=9)
    assert len(steps) == 5
    for step in steps:
        assert len(step.corrected) == 8
        assert len(step.standard) == 8
        assert step.window in (50, 100, 200)


def test_mpm_determinism():
    series = dc.simulate_engine_preset(n_steps=400, dt=10.0, seed=3)
    policy = dc.WindowPolicy(w_base=60, w_min=30, w_max=90, lookback=30)
    a = dc.forecast_mpm(series, horizon=3, policy=policy, particles=100, seed=5)
    b = dc.forecast_mpm(series, horizon=3, policy=policy, particles=100, seed=5)
    for x, y in zip(a, b):
        assert x.corrected == y.corrected
        assert x.standard == y.standard


def test_baselines_roundtrip():
    values = dc.simulate_gbm(s0=1.0, a=0.0, b=0.1, n_steps=500, dt=1.0, seed=11)
    order = dc.select_order(values, dt=1.0, p_max=3, d_max=1)
    model = dc.fit_ar(values, dt=1.0, p=order.p, d=order.d)
    assert math.isfinite(model.aic)
    forecast = dc.forecast_ar(values, dt=1.0, horizon=4, p_max=3, d_max=1)
    assert len(forecast) == 4
    assert all(math.isfinite(x) for x in forecast)


def test_backtest_reports_are_json():
    series = dc.simulate_engine_preset(n_steps=400, dt=10.0, seed=2)
    reports = dc.run_backtest(
        series, method="mpm", horizon=4, stride=25, particles=100, seed=42
    )
    assert len(reports) == 2
    for text in reports:
        doc = json.loads(text)
        assert doc["horizon"] == 4
        assert len(doc["feature_names"]) == 8
        for feature, curve in doc["per_feature"].items():
            assert len(curve) == 4
            for cell in curve:
                assert cell["rmse"] >= cell["mae"]


def test_errors_are_translated():
    with pytest.raises(dc.DriftcastError):
        dc.load_csv("definitely_missing.csv", dt=1.0)


def test_csv_roundtrip(tmp_path):
    series = dc.simulate_engine_preset(n_steps=50, dt=10.0, seed=1)
    path = str(tmp_path / "series.csv")
    dc.write_csv(series, path)
    back = dc.load_csv(path, dt=10.0)
    assert back.size == series.size
    assert back.row(10) == series.row(10)
