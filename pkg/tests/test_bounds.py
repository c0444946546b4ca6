import json
import math

import numpy as np
import pytest

from jetignite.bounds import (C0_CANDIDATES, C1_CANDIDATES, J1, J2, bounds_report, c0_constant,
                              capacity_A, check_t3_hypothesis, chord_constant, default_w_set,
                              exp_case_report, heuristic_lower_bound, paper_lower_formula,
                              subsolution_certificate, theta_star, upper_bound)
from jetignite.discretization import build_grid, refine
from jetignite.errors import (ChordBoundDegenerate, DerivativeBounded, NoFeasibleBeta, NoRoot,
                              OutOfRange)
from jetignite.model import (FlowProfileSpec, ModelSpec, NonlinearitySpec, Profile, exp_model,
                             gaussian_jet_model, power_model)

import oracles

EXP = exp_model()


# Upper bound ------------------------------------------------------------------

def test_chord_constant_uniform_psi():
    assert chord_constant(EXP) == 1.0


def test_chord_constant_is_maximal():
    model = gaussian_jet_model()
    h = chord_constant(model)
    r = np.linspace(0.0, 1.0, 200_001)
    psi = model.flow.psi_of(r)
    assert np.all(psi >= 1.0 - r / h - 1e-12)
    assert np.any(psi < 1.0 - r / (h * 1.001))


def test_chord_degenerate():
    flow = FlowProfileSpec(Profile("constant"), Profile("custom", r=(0.0, 0.005, 1.0), values=(1.0, 0.0, 0.0)))
    model = ModelSpec(NonlinearitySpec.exponential(), flow)
    with pytest.raises(ChordBoundDegenerate):
        upper_bound(model, 1e4)


def test_upper_bound_needs_alpha_10():
    with pytest.raises(OutOfRange):
        upper_bound(EXP, 5.0)


@pytest.mark.parametrize("X", [0.5, 1.0, 3.16, 10.0, 100.0, 1000.0])
def test_J_integrals_against_closed_forms(X):
    assert abs(J1(X) - oracles.J1_closed(X)) <= 1e-8 * oracles.J1_closed(X)
    assert abs(J2(X) - oracles.J2_closed(X)) <= 1e-8 * oracles.J2_closed(X)
    assert 0 < J2(X) <= 1.0


def test_c0_constant():
    assert abs(c0_constant() - oracles.c0_closed()) <= 1e-10
    assert abs(c0_constant() - 0.27989) < 1e-5


@pytest.mark.parametrize("alpha", [1e2, 1e4, 1e6, 1e10])
@pytest.mark.parametrize("model", [EXP, gaussian_jet_model()], ids=["uniform", "jet"])
def test_J1_analytic_lower_bound(model, alpha):
    ub = upper_bound(model, alpha)
    floor = 0.5 * math.log(alpha) + math.log(ub.h) - oracles.c0_closed()
    assert ub.J1 >= floor - 1e-8 * abs(floor)


def test_upper_bound_composition():
    alpha = 1e4
    ub = upper_bound(EXP, alpha)
    X = math.sqrt(alpha)
    direct = alpha / (oracles.J1_closed(X) - oracles.J2_closed(X))
    assert ub.h == 1.0 and not ub.degenerate
    assert abs(ub.lam_ub - direct) <= 1e-6 * direct
    assert ub.J1 >= math.log(alpha) / 2 - oracles.c0_closed()


def test_small_alpha_bound_is_finite():
    # J1 - J2 behaves like X^2/12 for small X, so the flag stays off even at alpha = 10
    ub = upper_bound(gaussian_jet_model(), 10.0)
    assert ub.lam_ub > 0
    assert ub.degenerate == (ub.J1 <= ub.J2)


# Certificate --------------------------------------------------------------------

@pytest.fixture(scope="module")
def grid1e4():
    return build_grid(EXP, 1e4, "default")


def test_certificate_deep_subcritical(grid1e4):
    ub = upper_bound(EXP, 1e4).lam_ub
    w = math.log(math.log(1e4))
    c = subsolution_certificate(EXP, 1e4, 1e-3 * ub, w, grid1e4)
    assert c.passed and all(c.conditions.values())
    assert 0 < c.eps_w < EXP.K
    assert np.all(c.witness > 0) and np.all(np.diff(c.witness) >= -1e-12)


def test_certificate_fails_above_bound(grid1e4):
    ub = upper_bound(EXP, 1e4).lam_ub
    for w in default_w_set(1e4):
        assert not subsolution_certificate(EXP, 1e4, 2 * ub, w, grid1e4).passed


def test_certificate_raise_on_fail(grid1e4):
    ub = upper_bound(EXP, 1e4).lam_ub
    with pytest.raises(NoFeasibleBeta):
        subsolution_certificate(EXP, 1e4, 2 * ub, 1.0, grid1e4, raise_on_fail=True)
    with pytest.raises(ValueError):
        subsolution_certificate(EXP, 1e4, 1.0, 0.0, grid1e4)


@pytest.mark.parametrize("w", [0.5, 1.0, 2.2, 4.0])
def test_derivative_chain(grid1e4, w):
    nl = EXP.nonlinearity
    c = subsolution_certificate(EXP, 1e4, 100.0, w, grid1e4)
    assert c.witness[0] >= c.eps_w * (1 - 1e-12)
    assert nl.fprime(nl.G_inverse(c.witness[0])) <= nl.fprime(w) * (1 + 1e-9)


@pytest.mark.parametrize("model", [EXP, power_model(2), gaussian_jet_model()], ids=["exp", "p2", "jet"])
def test_certificate_reverifies_on_finer_mesh(model):
    alpha = 1e4
    g = build_grid(model, alpha, "default")
    lb = heuristic_lower_bound(model, alpha, grid=g)
    c = subsolution_certificate(model, alpha, 0.99 * lb.lam_lb, lb.w_best, g, reverify=True)
    assert c.passed
    fine = refine(g)
    assert fine.N == 2 * g.N


def test_certificate_csv(tmp_path, grid1e4):
    c = subsolution_certificate(EXP, 1e4, 100.0, 1.0, grid1e4)
    p = tmp_path / "w.csv"
    c.to_csv(p)
    assert p.read_text().splitlines()[0] == "y,G_tilde,v_tilde"
    data = np.loadtxt(p, delimiter=",", skiprows=1)
    assert np.array_equal(data[:, 1], c.witness)


# Lower bound --------------------------------------------------------------------

def test_lower_bound_below_upper(exp_sweep, power2_sweep):
    for sweep in (exp_sweep, power2_sweep):
        for row in sweep.rows.values():
            assert 0 < row["lb"] <= row["ub"]


def test_lower_bound_needs_alpha_100():
    with pytest.raises(OutOfRange):
        heuristic_lower_bound(EXP, 50.0)


def test_single_w_scan_equals_bisection():
    alpha = 1e3
    g = build_grid(EXP, alpha, "default")
    ub = upper_bound(EXP, alpha).lam_ub
    w = math.log(math.log(alpha))
    lb = heuristic_lower_bound(EXP, alpha, w_set=[w], grid=g, lam_ub=ub)
    lo, hi = 1e-3 * ub, ub
    while hi - lo > 1e-5 * hi:
        mid = 0.5 * (lo + hi)
        if subsolution_certificate(EXP, alpha, mid, w, g).passed:
            lo = mid
        else:
            hi = mid
    assert lb.lam_lb == lo and lb.w_best == w
    assert lb.per_w == {w: lo}


def test_empty_pass_set():
    g = build_grid(EXP, 1e3, "default")
    lb = heuristic_lower_bound(EXP, 1e3, w_set=[1e-9], grid=g)
    assert lb.empty and lb.lam_lb == 0.0 and lb.w_best is None


def test_exp_lower_bound_constant(exp_sweep):
    alphas = sorted(exp_sweep.rows)
    r = np.array([exp_sweep.rows[a]["lb"] * math.log(a) / (2 * a) for a in alphas])
    consts = (1 - r) * np.sqrt(np.log(alphas))
    C = float(np.max(consts))
    assert np.all(np.diff(r) > 0)
    assert r[-1] >= 1 - C / math.sqrt(math.log(1e6))
    assert 0 < C < 2


def test_paper_formula_is_finite():
    val = paper_lower_formula(EXP, 1e6, 2.0)
    assert math.isfinite(val) and val < 2 * 1e6 / math.log(1e6)


# theta* and A ---------------------------------------------------------------------

def test_theta_star_exp_tangent():
    t = np.linspace(0.2, 5.0, 400_001)
    assert abs(t[np.argmin(np.exp(t) / t)] - 1.0) < 1e-4
    th = theta_star(EXP, math.exp(math.e), 1.0)
    assert abs(th.theta - 1.0) < 1e-6
    assert th.below_alpha_gamma is None


def test_theta_star_power_double_root():
    th = theta_star(power_model(2), math.exp(4.0), 1.0)
    assert abs(th.theta - 1.0) < 1e-6


def test_theta_star_picks_largest_root():
    alpha = 1e6
    th = theta_star(EXP, alpha, 1.0).theta
    assert abs(math.exp(th) / th - math.log(alpha)) < 1e-8 * math.log(alpha)
    assert th > 1.0


def test_theta_star_no_root():
    with pytest.raises(NoRoot):
        theta_star(EXP, math.exp(2.0), 1.0)
    with pytest.raises(ValueError):
        theta_star(EXP, 1e4, 0.0)


def test_theta_star_trend():
    vals = [theta_star(EXP, a, 1.0) for a in (1e4, 1e5, 1e6)]
    ratios = [v.theta / a ** 0.25 for v, a in zip(vals, (1e4, 1e5, 1e6))]
    assert all(v.below_alpha_gamma for v in vals)
    assert all(r < 1 for r in ratios) and np.all(np.diff(ratios) < 0)


@pytest.mark.parametrize("alpha", [1e2, 1e4, 1e8])
def test_capacity_exp(alpha):
    assert abs(capacity_A(EXP, alpha) - math.log(math.log(alpha))) < 1e-12


def test_capacity_power():
    assert abs(capacity_A(power_model(2), math.exp(8.0)) - 3.0) < 1e-12
    p = 1.0001
    target = 1.01 * p
    A = capacity_A(power_model(p), math.exp(target))
    ref = (target / p) ** (1.0 / (p - 1.0)) - 1.0
    assert abs(A - ref) <= 1e-8 * ref


def test_capacity_bounded_derivative():
    s = np.linspace(0, 3, 7)
    nl = NonlinearitySpec("custom", s=tuple(s), f=tuple(np.exp(s)), fp=tuple(np.exp(s)),
                          tail_exponent=2.0)
    model = ModelSpec(nl, EXP.flow)
    # f' follows the power tail beyond the table, so only an out-of-range target is unreachable
    assert capacity_A(model, 1e8) > 0
    with pytest.raises(DerivativeBounded):
        capacity_A(model, 1e8, c=1e300)


# Growth hypothesis -----------------------------------------------------------------

def test_hypothesis_exp():
    v = check_t3_hypothesis(EXP)
    assert v.t3_hypothesis == "pass" and v.proizv_sufficient == "pass"
    assert v.witness == (4.0, 1.0 / 3.0, 1.0)
    assert C1_CANDIDATES[0] == 4.0 and C0_CANDIDATES[0] == 1.0 / 3.0


def test_hypothesis_power2():
    v = check_t3_hypothesis(power_model(2))
    assert v.t3_hypothesis == "pass"
    # f'' is constant for p = 2, so the strictly-increasing condition does not hold
    assert v.proizv_sufficient == "fail"


def test_hypothesis_custom_without_fpp():
    s = np.linspace(0, 4, 9)
    nl = NonlinearitySpec("custom", s=tuple(s), f=tuple(np.exp(s)), fp=tuple(np.exp(s)),
                          tail_exponent=3.0)
    v = check_t3_hypothesis(ModelSpec(nl, EXP.flow))
    assert v.proizv_sufficient == "not-applicable"
    assert v.t3_hypothesis in ("pass", "fail")


def test_affine_nonlinearity_rejected_upstream():
    s = np.linspace(0, 3, 7)
    with pytest.raises(Exception):
        NonlinearitySpec("custom", s=tuple(s), f=tuple(1 + s), fp=tuple(np.ones(7)), tail_exponent=1.0)


# Exponential case ------------------------------------------------------------------

def test_exp_case_correction():
    r = exp_case_report(math.exp(math.exp(4.0)), C=2.0)
    assert abs(r.correction - 2.0 / math.e ** 2) < 1e-14


def test_exp_case_envelope_monotone():
    alphas = np.exp(np.exp(np.linspace(1.0 + 1e-6, 4.0, 4001)))
    for key in ("lam_pred", "lam_high", "u0_low", "u0_high"):
        vals = np.array([getattr(exp_case_report(a), key) for a in alphas])
        assert np.all(np.diff(vals) > 0), key


def test_exp_case_ratio_structure():
    a1, a2 = 1e4, 1e6
    r1, r2 = exp_case_report(a1), exp_case_report(a2)
    assert r2.lam_pred / r1.lam_pred == pytest.approx((a2 / a1) * math.log(a1) / math.log(a2), rel=1e-14)
    assert r1.lam_low < r1.lam_pred < r1.lam_high
    assert r1.u0_low < math.log(math.log(a1)) < r1.u0_high


# Report ----------------------------------------------------------------------------

def test_bounds_report_fields():
    rep = bounds_report(EXP, 1e3)
    d = json.loads(json.dumps(rep.to_dict()))
    for key in ("lam_ub", "h", "J1", "J2", "lam_lb", "w_best", "beta_w", "eps_w", "theta_star",
                "capacity_a", "t3_hypothesis", "proizv_sufficient", "paper_formula_note"):
        assert key in d
    assert d["lam_lb"] <= d["lam_ub"]
    assert abs(d["capacity_a"] - math.log(math.log(1e3))) < 1e-12
    assert "non-rigorous" in d["paper_formula_note"]
