import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cdnf import (
    DimensionError,
    ParameterError,
    SolverSettings,
    build_dog,
    build_gaussian3x3,
    convolve,
    solve_stationary,
    summation_rhs,
    vartheta,
)
from oracles import bisect_scalar_fixed_point, brute_neighbour_sum

GAUSS = build_gaussian3x3(1.0)
DOG = build_dog(1 / 3, 3)


@settings(max_examples=25, deadline=None)
@given(st.integers(7, 14), st.integers(7, 14), st.data())
def test_convolve_matches_brute_force(m, n, data):
    field = data.draw(arrays(np.float64, (m, n), elements=st.floats(-2, 2)))
    for kernel in (GAUSS, DOG):
        np.testing.assert_allclose(convolve(field, kernel), brute_neighbour_sum(field, kernel.weights), atol=1e-12)


def test_convolve_asymmetric_kernel_is_not_flipped():
    rng = np.random.default_rng(3)
    field = rng.random((6, 7))
    k = rng.random((3, 3))
    np.testing.assert_allclose(convolve(field, k), brute_neighbour_sum(field, k), atol=1e-12)


def test_uniform_field_interior_preserved():
    out = convolve(np.full((9, 9), 0.7), GAUSS)
    np.testing.assert_allclose(out[1:-1, 1:-1], 0.7, rtol=1e-14)


def test_impulse_reproduces_kernel():
    f = np.zeros((9, 9))
    f[4, 4] = 1.0
    np.testing.assert_allclose(convolve(f, GAUSS)[3:6, 3:6], GAUSS.weights, rtol=1e-14)
    np.testing.assert_allclose(convolve(f, DOG)[1:8, 1:8], DOG.weights, rtol=1e-13, atol=1e-16)


def test_corner_impulse_under_dog_is_clipped():
    f = np.zeros((10, 10))
    f[0, 0] = 1.0
    out = convolve(f, DOG)
    assert out[0, 0] == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(out[:4, :4], DOG.weights[3:, 3:], atol=1e-14)
    assert np.all(out[4:, :] == 0) and np.all(out[:, 4:] == 0)


def test_kernel_larger_than_grid():
    with pytest.raises(DimensionError):
        convolve(np.zeros((5, 20)), DOG)


@pytest.mark.parametrize("c_in", [0.0, 0.5, 1.2])
def test_constant_input_matches_scalar_oracle(c_in):
    res = solve_stationary(np.full((30, 30), c_in), GAUSS, 0.2)
    assert res.converged
    expected = bisect_scalar_fixed_point(c_in)
    np.testing.assert_allclose(res.values[8:-8, 8:-8], expected, atol=1e-5)


def test_zero_input_rest_value():
    # the resting level of an unstimulated contrast field is negative
    c = bisect_scalar_fixed_point(0.0)
    assert -0.41 < c < -0.39


def test_stationarity_residual_below_tol():
    rng = np.random.default_rng(0)
    drive = rng.random((25, 25))
    for kernel in (GAUSS, DOG):
        res = solve_stationary(drive, kernel, 0.2)
        assert res.converged
        resid = np.abs(res.values - (drive - 0.2 + vartheta(brute_neighbour_sum(res.values, kernel.weights))))
        assert resid.max() < 1e-6


def test_fixed_point_init_returned_unchanged():
    drive = np.full((12, 12), 0.3)
    first = solve_stationary(drive, GAUSS, 0.2, settings=SolverSettings(tol=1e-12))
    again = solve_stationary(drive, GAUSS, 0.2, init=first.values, settings=SolverSettings(tol=1e-6))
    assert again.iterations == 1
    assert again.values is first.values or np.array_equal(again.values, first.values)


def test_warm_and_cold_start_agree():
    rng = np.random.default_rng(1)
    drive = rng.random((30, 30))
    previous = solve_stationary(rng.random((30, 30)), DOG, 0.2).values
    cold = solve_stationary(drive, DOG, 0.2)
    warm = solve_stationary(drive, DOG, 0.2, init=previous)
    assert cold.converged and warm.converged
    np.testing.assert_allclose(cold.values, warm.values, atol=1e-5)


@pytest.mark.parametrize("kernel", [GAUSS, DOG])
def test_iterates_stay_bounded(kernel):
    rng = np.random.default_rng(2)
    drive = 2 * rng.random((20, 20)) - 1
    bound = np.abs(drive).max() + 0.2 + 1
    for k in range(1, 30):
        res = solve_stationary(drive, kernel, 0.2, settings=SolverSettings(max_iters=k))
        assert np.abs(res.values).max() <= bound


def test_non_convergence_is_reported():
    res = solve_stationary(np.ones((10, 10)), DOG, 0.2, settings=SolverSettings(max_iters=2))
    assert not res.converged
    assert res.iterations == 2
    assert res.residual > 1e-6


def test_solver_validation():
    with pytest.raises(ParameterError):
        SolverSettings(tol=0)
    with pytest.raises(ParameterError):
        SolverSettings(max_iters=0)
    with pytest.raises(DimensionError):
        solve_stationary(np.zeros((8, 8)), GAUSS, 0.2, init=np.zeros((8, 9)))


@pytest.mark.parametrize("on,off,expected", [(1.0, 1.0, 1.0), (1.0, 0.0, 0.5), (2.0, -2.0, 0.0)])
def test_summation_rhs_examples(on, off, expected):
    drive = summation_rhs(np.full((3, 3), on), np.full((3, 3), off))
    np.testing.assert_allclose(drive, expected, atol=1e-15)


def test_summation_rhs_shape_mismatch():
    with pytest.raises(DimensionError):
        summation_rhs(np.zeros((3, 3)), np.zeros((3, 4)))
