"""Smoke tests for the python bindings (built extension on PYTHONPATH)."""

import math

import numpy as np
import pytest

import _core as ck


def test_baseline_calibration_values():
    cal = ck.baseline_calibration_dict()
    assert cal["beta"] == pytest.approx(0.99)
    assert cal["psi"] == pytest.approx(4.55)
    assert cal["eps_bar"] == pytest.approx(1 / 6)
    assert cal["theta_calvo"] == pytest.approx(0.75)


def test_steady_state_hits_targets():
    ss = ck.steady_state()
    assert ss["l"] == pytest.approx(1 / 3, abs=1e-8)
    assert ss["z"] / ss["y"] == pytest.approx(1.04, abs=1e-8)
    assert ss["zeta"] == pytest.approx(0.1945, abs=1e-8)
    assert ss["k_b"] / ss["k"] == pytest.approx(0.3, abs=1e-8)
    assert ss["chi_r"] == pytest.approx(0.00497, abs=1e-8)
    assert ss["R_bond"] == pytest.approx(1 / 0.99, abs=1e-12)


def test_utility_flow_log_limit():
    # sigma = 1 with c = z collapses to log utility minus labor disutility.
    xi = 9.46
    got = ck.utility_flow(0.7, 0.7, 0.4)
    expected = math.log(0.7) - xi * 0.4 ** 2 / 2
    assert got == pytest.approx(expected, rel=1e-12)


def test_irf_impact_signs():
    irf = ck.irf(shock="lambda", size_log=math.log(1.25), horizon=20)
    cols = {name: i for i, name in enumerate(irf["columns"])}
    impact = np.asarray(irf["display"])[0]
    assert impact[cols["y"]] > 0
    assert impact[cols["c"]] > 0
    assert impact[cols["pi"]] > 0
    assert impact[cols["I_gross"]] < 0
    assert impact[cols["chi_n"]] < 0
    assert impact[cols["m"]] < 0
    assert impact[cols["n"]] < 0
    # Mirrored CBDC Taylor rule keeps the CBDC spread constant.
    assert np.abs(np.asarray(irf["level_dev"])[:, cols["chi_m"]]).max() < 1e-12


def test_simulation_is_seed_deterministic():
    a = np.asarray(ck.simulate(periods=50, seed=7))
    b = np.asarray(ck.simulate(periods=50, seed=7))
    c = np.asarray(ck.simulate(periods=50, seed=8))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert a.shape[0] == 50


def test_conditional_welfare_is_finite_and_risk_lowers_it():
    w = ck.conditional_welfare(banking="monopolist", regime="fixed_gross_rate_one")
    assert w["determinate"]
    assert w["welfare"] < 0
    ss = ck.steady_state()
    assert w["welfare"] < ss["W_welfare"]  # negative sigma^2 component


def test_compensating_fraction_closed_form():
    gap = math.log(1.01) / (1 - 0.99)
    delta = ck.compensating_fraction(-100.0, -100.0 + gap)
    assert delta == pytest.approx(1.0, rel=1e-9)


def test_errors_are_typed():
    with pytest.raises(ck.ConfigError):
        ck.steady_state(banking="nonsense")
