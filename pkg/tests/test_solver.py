import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jetignite import kernels
from jetignite.criticality import find_lambda_star
from jetignite.discretization import build_grid, grid_from_nodes, operator
from jetignite.errors import GridMismatch
from jetignite.model import exp_model, gaussian_jet_model, power_model
from jetignite.numerics import solve_banded3
from jetignite.solver import (MINIMAL, SolveOptions, comparison_check, g_transform_residual,
                              g_transform_residual_vector, minimal_solution, profile_from_values)

import oracles

EXP = exp_model()


@pytest.fixture(scope="module")
def grid100():
    return build_grid(EXP, 100.0, "default")


@pytest.fixture(scope="module")
def bracket100(grid100):
    return find_lambda_star(EXP, 100.0, grid=grid100).lam_lo


def solve(grid, lam, model=EXP, **kw):
    o = minimal_solution(model, grid.alpha, lam, grid, SolveOptions(**kw))
    return o


# Options --------------------------------------------------------------------

def test_options_validation():
    with pytest.raises(ValueError):
        SolveOptions(residual_tol=0.0)
    with pytest.raises(ValueError):
        SolveOptions(blowup_cap=-1.0)
    with pytest.raises(ValueError):
        SolveOptions(omega="huge")
    with pytest.raises(ValueError):
        SolveOptions(omega=-1.0)


def test_lambda_must_be_positive(grid100):
    with pytest.raises(ValueError):
        minimal_solution(EXP, 100.0, 0.0, grid100)


def test_grid_mismatch(grid100):
    with pytest.raises(GridMismatch):
        minimal_solution(EXP, 1000.0, 1.0, grid100)
    with pytest.raises(GridMismatch):
        minimal_solution(power_model(2), 100.0, 1.0, grid100)


# Examples -------------------------------------------------------------------

def test_small_lambda_is_linear(grid100):
    lam = 1e-6
    o = solve(grid100, lam)
    assert o.kind == "Converged"
    op = operator(grid100)
    n = grid100.N
    tau, _ = solve_banded3(op.sub, op.diag, op.sup, grid100.psi[:n] * grid100.load_scale)
    v = o.profile.values[:n]
    assert np.max(np.abs(v - lam * tau)) <= 1e-4 * np.max(lam * tau)


def test_oracle_mode_center_matches_shooting():
    g = build_grid(EXP, 0.0, "fine")
    o = solve(g, 1.0)
    assert o.kind == "Converged"
    ref = oracles.gelfand_disk_center(1.0)
    assert abs(ref - oracles.gelfand_disk_center_closed_form(1.0)) < 1e-9
    assert abs(o.profile.center - ref) < 1e-4


def test_oracle_mode_beyond_fold():
    g = build_grid(EXP, 0.0, "default")
    o = solve(g, 3.0)
    assert o.kind == "NoSolutionDetected"


def test_oracle_mode_beyond_fold_picard_only():
    g = build_grid(EXP, 0.0, "default")
    o = solve(g, 3.0, newton=False)
    assert o.kind == "NoSolutionDetected"
    assert o.diagnostics["reason"] == "blowup"


def test_small_iteration_budget_is_inconclusive(grid100):
    o = solve(grid100, 30.0, max_outer_iterations=2, newton=False)
    assert o.kind == "Inconclusive"


# Comparison -----------------------------------------------------------------

def test_comparison_same_lambda(grid100):
    p = solve(grid100, 10.0).profile
    q = solve(grid100, 10.0).profile
    v = comparison_check(p, q)
    assert v.passed and v.max_violation == 0.0


def test_comparison_bracket_fractions(grid100, bracket100):
    p1 = solve(grid100, 0.2 * bracket100).profile
    p2 = solve(grid100, 0.8 * bracket100).profile
    v = comparison_check(p1, p2)
    assert v.passed and not v.caller_error
    swapped = comparison_check(p2, p1)
    assert not swapped.passed and swapped.caller_error
    assert swapped.max_violation > 0


def test_comparison_grid_mismatch(grid100):
    other = build_grid(EXP, 100.0, "coarse")
    with pytest.raises(GridMismatch):
        comparison_check(solve(grid100, 1.0).profile, solve(other, 2.0).profile)


# G-transform residual ---------------------------------------------------------

def test_g_residual_of_zero_profile(grid100):
    p = profile_from_values(grid100, 7.0, np.zeros(grid100.N + 1))
    r = g_transform_residual_vector(p)
    sigma_psi = 7.0 / 100.0 * grid100.psi[: grid100.N]
    assert np.allclose(np.abs(r), sigma_psi, rtol=1e-12, atol=0)
    assert abs(g_transform_residual(p) - np.max(sigma_psi)) < 1e-15


@pytest.mark.parametrize("model", [EXP, gaussian_jet_model()], ids=["uniform", "jet"])
def test_g_residual_second_order(model):
    errs = []
    for n in (128, 256, 512, 1024):
        g = grid_from_nodes(model, 100.0, np.linspace(0, 10, n + 1))
        errs.append(g_transform_residual(solve(g, 20.0, model).profile))
    factors = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((factors > 3.5) & (factors < 4.5)), factors


@pytest.mark.parametrize("alpha,lam", [(0.0, 1.5), (100.0, 30.0), (1e4, 1500.0)])
def test_G_non_decreasing(alpha, lam):
    g = build_grid(EXP, alpha, "default")
    p = solve(g, lam).profile
    G = EXP.nonlinearity.G(p.values)
    assert np.all(np.diff(G) >= 0)


# Invariants -----------------------------------------------------------------

@pytest.mark.parametrize("alpha,lam", [(100.0, 30.0), (1e4, 1800.0)])
def test_monotone_iterates(alpha, lam):
    g = build_grid(EXP, alpha, "default")
    op = operator(g)
    n = g.N
    hist = np.empty(5001)
    status, its, _, _ = kernels.picard_run(op.sub, op.diag, op.sup, lam * g.load_scale * g.psi[:n],
                                           np.zeros(n), 0, 0.0, *EXP.nonlinearity.code(), 1e-12,
                                           EXP.nonlinearity.u_max, 5000, 3, hist)
    assert status == kernels.STOPPED
    assert np.all(np.diff(np.concatenate([[0.0], hist[:its]])) >= -1e-13)


@pytest.mark.parametrize("alpha", [100.0, 1e4])
def test_idempotent_restart(alpha):
    g = build_grid(EXP, alpha, "default")
    lam = 0.15 * alpha
    p = solve(g, lam).profile
    q = minimal_solution(EXP, alpha, lam, g, warm_start=p.values)
    assert q.kind == "Converged"
    assert np.max(np.abs(q.profile.values - p.values)) <= 1e-9 * np.max(p.values)
    assert q.profile.residual <= q.profile.residual_tol


def test_lambda_ladder_centers_increase(grid100, bracket100):
    centers = [solve(grid100, f * bracket100).profile.center for f in np.linspace(0.1, 0.9, 5)]
    assert np.all(np.diff(centers) > 0)


@settings(max_examples=15, deadline=None)
@given(frac=st.floats(0.05, 0.95))
def test_profile_invariants(frac):
    g = build_grid(EXP, 100.0, "default")
    o = solve(g, frac * 34.3)
    assert o.kind == "Converged"
    p = o.profile
    assert p.tag == MINIMAL
    assert p.values[-1] == 0.0
    assert np.all(p.values >= 0)
    assert np.all(np.diff(p.values) <= 1e-13 * p.center)
    assert p.residual <= p.residual_tol


def test_center_slope_is_second_order():
    gaps = []
    for n in (128, 256, 512):
        g = grid_from_nodes(EXP, 100.0, np.linspace(0, 10, n + 1))
        v = solve(g, 20.0).profile.values
        gaps.append(abs(v[1] - v[0]))
    factors = np.array(gaps[:-1]) / np.array(gaps[1:])
    assert np.all((factors > 3.5) & (factors < 4.5)), factors


@pytest.mark.parametrize("alpha,lam", [(100.0, 20.0), (1e4, 1500.0)])
def test_lipschitz_omega_agrees_with_zero_omega(alpha, lam):
    g = build_grid(EXP, alpha, "default")
    a = solve(g, lam).profile.values
    b = solve(g, lam, omega="lipschitz").profile.values
    c = solve(g, lam, omega=2.0, newton=False).profile.values
    assert np.max(np.abs(a - b)) <= 1e-8 * np.max(a)
    assert np.max(np.abs(a - c)) <= 1e-8 * np.max(a)


def test_newton_matches_picard(grid100):
    a = solve(grid100, 33.0).profile
    b = solve(grid100, 33.0, newton=False, max_outer_iterations=200000).profile
    assert a.newton_steps > 0 and b.newton_steps == 0
    assert np.max(np.abs(a.values - b.values)) <= 1e-8 * np.max(a.values)


def test_decay_estimate_shape(exp_sweep):
    consts = {}
    for alpha in (1e4, 1e5, 1e6):
        row = exp_sweep.rows[alpha]
        p = row["res"].profile
        y, v = p.grid.y, p.values
        mask = y >= alpha ** 0.4
        shape = (1.0 + np.log(math.sqrt(alpha) / y[mask])) / math.log(alpha)
        consts[alpha] = float(np.max(v[mask] / shape))
        half = solve(p.grid, 0.5 * row["res"].lam_lo).profile.values
        assert np.all(half[mask] <= consts[alpha] * shape)
    fitted = np.mean(list(consts.values()))
    for alpha, c in consts.items():
        assert abs(c - fitted) <= 0.2 * fitted, consts


def test_profile_csv(tmp_path, grid100):
    p = solve(grid100, 10.0).profile
    path = tmp_path / "p.csv"
    p.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "y,r,v,G_of_v"
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (grid100.N + 1, 4)
    assert np.array_equal(data[:, 2], p.values)
