"""
Tests for the closed-form model objects.
"""
import math

import numpy as np
import pytest

from henon_blowup.model import (
    validate_params,
    phi,
    profile_derivatives,
    ode_blowup,
    ode_limit_value,
    potential_V,
    profile_residual,
    symmetry_eigenfunction_g,
    g_derivatives,
    L_residual_on_g,
    susy_ground_gtilde,
    gtilde_log_derivative,
    symmetry_constant,
    scaled_solution_data,
    profile_function,
    g_function,
    potential_function,
    RadialFunction,
    run_profile_check,
)
from henon_blowup.utils.errors import DomainError, ParityError, RangeError

SAMPLE = np.geomspace(1e-3, 50.0, 400)
PARAMETER_SETS = [(3, 0.05), (3, 0.2), (3, 0.26), (3, 0.3), (3, 0.33), (5, 0.1), (5, 0.19), (5, 0.2), (5, 0.5)]


def test_validate_params_constants():
    params = validate_params(3, 3, 0.3)
    assert params.a == pytest.approx(math.sqrt(10.0), rel=1e-12)
    assert params.b == pytest.approx(2.0 * (math.sqrt(10.0) - 3.0), rel=1e-12)
    assert params.kappa == 0.5


@pytest.mark.parametrize("raw, error", [
    ((3, 3, 1.0 / 3.0), RangeError),
    ((3, 3, 0.0), RangeError),
    ((3, 3, -0.1), RangeError),
    ((3, 4, 0.1), ParityError),
    ((3, 1, 0.1), ParityError),
    ((3, 3.5, 0.1), ParityError),
    ((0, 3, 0.1), RangeError),
])
def test_validate_params_rejects(raw, error):
    with pytest.raises(error):
        validate_params(*raw)


def test_validation_errors_are_value_errors():
    with pytest.raises(ValueError):
        validate_params(3, 3, 0.5)


def test_manifest_strings(params_p3):
    manifest = params_p3.to_manifest()
    assert manifest["p"] == "3"
    assert float(manifest["a"]) == params_p3.a
    assert float(manifest["b"]) == params_p3.b
    assert float(manifest["c"]) == 0.3


def test_phi_values(params_p3):
    assert phi(0.0, params_p3) == pytest.approx(3.121445, abs=1e-5)
    values = phi(SAMPLE, params_p3)
    assert np.all(values > 0.0)
    assert np.all(np.diff(values) < 0.0)
    assert phi(1e4, params_p3) < 1e-3


def test_phi_small_coupling_limit():
    r = np.linspace(0.0, 5.0, 101)
    gaps = [np.max(np.abs(phi(r, validate_params(3, 3, c)) - ode_limit_value(3))) for c in (1e-2, 1e-3, 1e-4)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.05


def test_ode_blowup():
    assert ode_blowup(0.0, 1.0, 3) == pytest.approx(math.sqrt(0.5), rel=1e-12)
    assert ode_blowup(1.0, 2.0, 5) == pytest.approx(0.25**0.25, rel=1e-12)
    values = ode_blowup(np.array([0.0, 0.9, 0.99, 0.999]), 1.0, 3)
    assert np.all(np.diff(values) > 0.0)
    with pytest.raises(DomainError):
        ode_blowup(1.0, 1.0, 3)


def test_potential_values(params_p3):
    assert potential_V(0.0, params_p3) == pytest.approx(3.0 * params_p3.a / params_p3.b, rel=1e-12)
    value = phi(1.0, params_p3)
    expected = 3.0 * value**2 - 0.3 * 5.0 * value**4
    assert potential_V(1.0, params_p3) == pytest.approx(expected, rel=1e-12)
    assert potential_V(1.0, params_p3) == pytest.approx(-1.3874, abs=1e-3)


def test_potential_decay(params_p3):
    r = np.linspace(10.0, 100.0, 500)
    scaled = np.abs(r * r * potential_V(r, params_p3))
    assert np.max(scaled) < 50.0


def test_potential_small_coupling_limit():
    r = np.array([0.0, 0.5, 1.0, 2.0])
    gap = np.abs(potential_V(r, validate_params(3, 3, 1e-6)) - 1.5)
    assert np.max(gap) < 1e-2


@pytest.mark.parametrize("p, c", PARAMETER_SETS)
def test_profile_residual_vanishes(p, c):
    params = validate_params(3, p, c)
    scale = np.maximum(1.0, phi(SAMPLE, params) ** p)
    assert np.max(np.abs(profile_residual(SAMPLE, params)) / scale) < 1e-9


def test_profile_residual_at_points(params_p3):
    assert abs(profile_residual(0.7, params_p3)) < 1e-10
    assert abs(profile_residual(2.3, validate_params(3, 5, 0.1))) < 1e-10


def test_profile_residual_detects_wrong_constant(params_p3):
    broken = params_p3.with_constants(a=1.01 * params_p3.a)
    assert np.max(np.abs(profile_residual(SAMPLE, broken))) > 1e-3


def test_profile_residual_other_dimensions():
    for d, c in ((1, 1.0), (2, 0.5)):
        params = validate_params(d, 3, c)
        assert np.max(np.abs(profile_residual(SAMPLE, params))) < 1e-9


@pytest.mark.parametrize("p, c", PARAMETER_SETS)
def test_symmetry_eigenpair(p, c):
    params = validate_params(3, p, c)
    scale = np.maximum(1.0, np.abs(symmetry_eigenfunction_g(SAMPLE, params)) * phi(SAMPLE, params) ** (p - 1))
    assert np.max(np.abs(L_residual_on_g(SAMPLE, params)) / scale) < 1e-9


def test_symmetry_eigenfunction_origin(params_p3):
    assert symmetry_eigenfunction_g(0.0, params_p3) == pytest.approx(params_p3.b ** -1.5, rel=1e-12)
    assert abs(L_residual_on_g(1.0, params_p3)) < 1e-10
    assert abs(L_residual_on_g(0.5, validate_params(3, 5, 0.2))) < 1e-10


def test_closed_form_derivatives_match_differences(params_p3):
    r = np.linspace(0.2, 6.0, 30)
    step = 1e-5
    for function in (profile_function(params_p3), g_function(params_p3)):
        first = (function(r + step) - function(r - step)) / (2.0 * step)
        second = (function(r + step) - 2.0 * function(r) + function(r - step)) / step**2
        assert np.allclose(function.derivative(1, r), first, rtol=1e-7, atol=1e-9)
        assert np.allclose(function.derivative(2, r), second, rtol=1e-4, atol=1e-5)
    with pytest.raises(DomainError):
        profile_function(params_p3).derivative(3, r)


def test_derivatives_without_closed_form():
    gauss = RadialFunction(lambda r: np.exp(-r * r), name="gauss")
    r = np.array([0.0, 0.5, 1.0, 3.0])
    assert np.allclose(gauss.derivative(1, r), -2.0 * r * np.exp(-r * r), atol=1e-8)
    assert np.allclose(gauss.derivative(2, r), (4.0 * r * r - 2.0) * np.exp(-r * r), atol=1e-5)
    with pytest.raises(DomainError):
        gauss.derivative(3, r)


def test_potential_slope_by_differences(params_p3):
    r = np.linspace(0.5, 5.0, 10)
    slope = potential_function(params_p3).derivative(1, r)
    w = params_p3.a / (params_p3.b + r * r)
    dw = -2.0 * r * w * w / params_p3.a
    expected = 3.0 * dw - 1.5 * (2.0 * r * w * w + 2.0 * r * r * w * dw)
    assert np.allclose(slope, expected, rtol=1e-6, atol=1e-8)


def test_profile_derivatives_tuple(params_p3):
    value, first, second = profile_derivatives(0.0, params_p3)
    assert value == pytest.approx(phi(0.0, params_p3))
    assert first == 0.0
    assert second < 0.0
    assert g_derivatives(0.0, params_p3)[1] == 0.0


def test_gtilde_values(params_p3):
    assert susy_ground_gtilde(0.0, params_p3) == 0.0
    assert susy_ground_gtilde(2.0, params_p3) == pytest.approx(0.134884, abs=1e-5)
    r = np.linspace(0.1, 8.0, 50)
    ratio = susy_ground_gtilde(r, params_p3) / (r * np.exp(-r * r / 8.0) * symmetry_eigenfunction_g(r, params_p3))
    assert np.allclose(ratio, ratio[0], rtol=1e-13)


def test_gtilde_log_derivative(params_p3):
    r = np.linspace(0.3, 6.0, 40)
    step = 1e-6
    w, dw = gtilde_log_derivative(r, params_p3)
    logs = np.log(susy_ground_gtilde(r + step, params_p3)) - np.log(susy_ground_gtilde(r - step, params_p3))
    assert np.allclose(w, logs / (2.0 * step), rtol=1e-6, atol=1e-7)
    w_plus, _ = gtilde_log_derivative(r + step, params_p3)
    w_minus, _ = gtilde_log_derivative(r - step, params_p3)
    assert np.allclose(dw, (w_plus - w_minus) / (2.0 * step), rtol=1e-5, atol=1e-6)


def test_symmetry_constant_matches_time_derivative(params_p3):
    constant = symmetry_constant(params_p3)
    assert constant == pytest.approx(0.2886, abs=1e-3)
    r = np.linspace(0.0, 6.0, 25)
    step = 1e-5

    def family(T):
        return T**params_p3.kappa * phi(math.sqrt(T) * r, params_p3)

    derivative = (family(1.0 + step) - family(1.0 - step)) / (2.0 * step)
    assert np.allclose(derivative, constant * symmetry_eigenfunction_g(r, params_p3), rtol=1e-6, atol=1e-9)


def test_scaled_solution_data(params_p3):
    r = np.linspace(0.0, 4.0, 9)
    assert np.allclose(scaled_solution_data(r, 1.0, params_p3), phi(r, params_p3))
    assert scaled_solution_data(0.0, 2.0, params_p3) == pytest.approx(2.0 * phi(0.0, params_p3))
    with pytest.raises(DomainError):
        scaled_solution_data(r, 0.0, params_p3)


def test_run_profile_check():
    result = run_profile_check(3, 3, 0.3, SAMPLE)
    assert np.max(np.abs(result["g_residual"])) < 1e-9
    assert result["phi"].shape == SAMPLE.shape
