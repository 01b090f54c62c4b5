"""Smoke tests for the python bindings."""

import numpy as np
import pytest

import kdvb

ORBIT = [1.0, 1.0, 1.0, 3.0, 2.0, 1.0]


def test_fields():
    assert kdvb.fast_rhs(ORBIT) == pytest.approx([0, 0, -2, -3, 4, 1])
    assert kdvb.diffusion_stencil(ORBIT) == pytest.approx([0, 0, 2, -3, 0, 1])
    full = kdvb.full_rhs(ORBIT, 0.5)
    assert full == pytest.approx([0, 0, -1, -4.5, 4, 1.5])
    assert sum(full) == pytest.approx(0.0, abs=1e-13)


def test_input_validation():
    with pytest.raises(ValueError):
        kdvb.fast_rhs([1.0, -1.0, 1.0, 1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        kdvb.fast_rhs([1.0, 1.0, 1.0, 1.0])


def test_observables():
    ones = [1.0] * 6
    assert kdvb.observable_vector(ones) == pytest.approx([12.0, 36.0, 132.0, 1.0])
    assert kdvb.trace_power(ones, 2) == pytest.approx(12.0)
    assert kdvb.product_invariants([1, 2, 3, 4, 5, 6]) == pytest.approx((720.0, 48.0, 15.0))

    L = kdvb.lax_matrix(ones)
    assert L.shape == (6, 6)
    assert np.allclose(L, L.T)
    B = kdvb.b_matrix(ones)
    assert np.allclose(B, -B.T)

    assert kdvb.observable_gradient(ORBIT, 1) == pytest.approx([2.0] * 6)
    assert kdvb.drift_integrand(ORBIT, 1) == 0.0


def test_integration_conserves_observables():
    result = kdvb.integrate(ORBIT, t_end=5.0, dt=1e-3, sample_every=1000)
    states = result["states"]
    v0 = np.asarray(kdvb.observable_vector(list(states[0])))
    for row in states:
        v = np.asarray(kdvb.observable_vector(list(row)))
        assert np.max(np.abs(v - v0) / np.abs(v0)) < 1e-8


def test_period():
    est = kdvb.estimate_fast_period(ORBIT)
    assert est["period"] == pytest.approx(2.4868, abs=0.01)
    with pytest.raises(RuntimeError):
        kdvb.estimate_fast_period([2.0] * 6)


def test_lift_round_trip():
    target = kdvb.observable_vector(ORBIT)
    lifted = kdvb.lift(target, ORBIT)
    assert kdvb.observable_vector(lifted) == pytest.approx(target, rel=1e-10)


def test_multiscale_run():
    series = kdvb.run_multiscale("young_measure", [1, 1, 1, 1, 4, 1], 12, nu=1e-4)
    values = series["values"]
    assert values.shape == (5, 4)
    # Mass column is exactly constant.
    assert np.all(values[:, 0] == values[0, 0])
    assert series["rhs_evals"] > 0

    ref = kdvb.run_reference(ORBIT, nu=1e-3, t_end=1.0, dt=1e-2)
    assert ref["values"].shape[1] == 4
