"""Tests for the equivariant area functional and its minimization."""

import math

import numpy as np
import pytest

from conelab import (
    AreaVerdict,
    CancellationError,
    ConeStabilityProblem,
    EquivariantAreaProblem,
    area_gradient,
    area_of_graph,
    cone_conformal,
    default_grid,
    eigenmode_perturbation,
    index_form,
    minimize,
    radial_eigenvalue,
    second_variation_fd,
    seed_perturbation,
    sphere_measure,
    threshold_kappa,
    threshold_scan,
)


def _flat_problem(n, kappa, W=1.0, m=256):
    grid = default_grid(W, m)
    return EquivariantAreaProblem(metric=cone_conformal(kappa, n + 1), n=n,
                                  W=W, grid=grid, u=np.zeros_like(grid))


def test_flat_area_closed_forms():
    # flat space: W^n/n; cone: kappa^{n-1} W^{n kappa} / n
    for n, kappa, W in ((4, 1.0, 1.0), (4, 0.8, 1.0), (7, 0.7, 2.0)):
        prob = _flat_problem(n, kappa, W=W, m=4096)
        expect = kappa ** (n - 1) * W ** (n * kappa) / n
        # midpoint rule on the log grid is second order in log-mesh
        assert area_of_graph(prob) == pytest.approx(expect, rel=1e-5)


def test_area_gradient_matches_fd():
    rng = np.random.default_rng(11)
    prob = _flat_problem(4, 0.85, m=40)
    u = 0.01 * rng.standard_normal(prob.grid.shape)
    u[-1] = 0.0
    prob = prob.with_u(u)
    g = area_gradient(prob)
    h = 1e-7
    for i in (0, 5, 20, 39):
        up, um = u.copy(), u.copy()
        up[i] += h
        um[i] -= h
        fd = (area_of_graph(prob.with_u(up)) - area_of_graph(prob.with_u(um))) / (2 * h)
        assert g[i] == pytest.approx(fd, rel=1e-5, abs=1e-10)


def test_grid_and_problem_validation():
    grid = default_grid(1.0, 64)
    assert grid[0] == 0.0
    assert grid[-1] == 1.0
    assert np.all(np.diff(grid) > 0)
    with pytest.raises(ValueError):
        default_grid(1.0, 4)
    with pytest.raises(ValueError):
        EquivariantAreaProblem(metric=cone_conformal(0.8, 5), n=4, W=1.0,
                               grid=grid, u=np.ones_like(grid))  # u(W) != 0
    with pytest.raises(ValueError):
        EquivariantAreaProblem(metric=cone_conformal(0.8, 5), n=4, W=2.0,
                               grid=grid, u=np.zeros_like(grid))


def test_minimize_stable_cone_keeps_flat():
    prob = _flat_problem(4, 0.95)
    seed = seed_perturbation(prob.grid, 1.0, 4, amplitude=1e-4)
    res = minimize(prob, init=seed, max_iter=2000)
    assert res.verdict is AreaVerdict.FlatIsMin
    assert res.area_min >= res.area_flat - 1e-12 * res.area_flat


def test_minimize_unstable_cone_beats_flat():
    prob = _flat_problem(4, 0.75)
    seed = seed_perturbation(prob.grid, 1.0, 4)
    res = minimize(prob, init=seed, max_iter=3000)
    assert res.verdict is AreaVerdict.CompetitorBeatsFlat
    assert res.area_min < res.area_flat
    assert res.area_flat - res.area_min > 1e-6  # macroscopic gap this far down


def test_second_variation_matches_index_form():
    # delta^2 A = kappa^{n-1} I(phi_tilde) under rho = w^kappa
    n, kappa, eps = 4, 0.8, 0.1
    grid = default_grid(1.0, 2048, w1_frac=1e-3)
    prob = EquivariantAreaProblem(metric=cone_conformal(kappa, n + 1), n=n,
                                  W=1.0, grid=grid, u=np.zeros_like(grid))
    phi = eigenmode_perturbation(grid, n, kappa, eps)
    t = 1e-3 / np.max(np.abs(phi))
    lhs = second_variation_fd(prob, phi, t=t)
    _, ef = radial_eigenvalue(n, eps, 1)
    rhs = kappa ** (n - 1) * index_form(
        ConeStabilityProblem(n=n, kappa=kappa, epsilon=eps), ef)
    assert lhs == pytest.approx(rhs, rel=1e-2)


def test_second_variation_cancellation_guard():
    prob = _flat_problem(4, 0.9, m=64)
    phi = np.zeros_like(prob.grid)
    phi[5] = 1.0
    with pytest.raises(CancellationError):
        second_variation_fd(prob, phi, t=1e-12)


def test_threshold_scan_small_window():
    rows, khat = threshold_scan(4, [0.83, 0.84, 0.85, 0.86])
    verdicts = [r.verdict for r in rows]
    assert verdicts[0] is AreaVerdict.CompetitorBeatsFlat
    assert verdicts[-1] is AreaVerdict.FlatIsMin
    assert 0.83 <= khat <= 0.86
    kstar = threshold_kappa(4)
    assert abs(khat - kstar) <= 0.03


def test_scan_rows_carry_areas():
    rows, _ = threshold_scan(4, [0.9], grid_size=128, max_iter=200)
    r = rows[0]
    expect = 0.9**3 / 4
    assert r.area_flat == pytest.approx(expect, rel=1e-3)
    assert r.gap == pytest.approx(r.area_flat - r.area_min, abs=1e-15)


def test_seed_perturbation_shape():
    grid = default_grid(2.0, 128)
    u = seed_perturbation(grid, 2.0, 4)
    assert u[0] == 0.0 and u[-1] == 0.0
    assert np.max(np.abs(u)) == pytest.approx(0.05 * 2.0, rel=1e-12)


def test_eigenmode_perturbation_support():
    grid = default_grid(1.0, 256)
    eps = grid[1] ** 0.8
    u = eigenmode_perturbation(grid, 4, 0.8, eps)
    assert u[0] == 0.0 and u[-1] == 0.0
    assert np.max(np.abs(u)) > 0
