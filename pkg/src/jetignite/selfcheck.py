"""Fast invariant checks behind ``jetignite selfcheck``."""

import math
from typing import Callable, List, Tuple

import numpy as np
from scipy import special

from .bounds import capacity_A, heuristic_lower_bound, theta_star, upper_bound
from .criticality import find_lambda_star
from .discretization import build_grid, dirichlet_eigen_estimate
from .model import exp_model, gaussian_jet_model, power_model


def _k_values():
    ks = (exp_model().K, power_model(3).K)
    return abs(ks[0] - 1) < 1e-12 and abs(ks[1] - 0.5) < 1e-12, f"K(exp)={ks[0]:.15g} K(p=3)={ks[1]:.15g}"


def _roundtrip():
    worst = 0.0
    for m in (exp_model(), power_model(2)):
        nl = m.nonlinearity
        v = np.linspace(0.0, 20.0, 101)
        worst = max(worst, float(np.max(np.abs(nl.G_inverse(nl.G(v)) - v))))
    return worst <= 1e-10, f"max |G^-1(G(v)) - v| = {worst:.2e}"


def _m_table():
    flow = gaussian_jet_model().flow
    s = np.linspace(0.0, 1.0, 11)
    dev = float(np.max(np.abs(flow.M_of(s) - 1.0)))
    return dev < 1e-12, f"max |M - 1| = {dev:.2e}"


def _theta():
    t = theta_star(exp_model(), math.exp(math.e), 1.0).theta
    return abs(t - 1.0) < 1e-6, f"theta* = {t:.9f}"


def _capacity():
    a = 1e4
    A = capacity_A(exp_model(), a)
    return abs(A - math.log(math.log(a))) < 1e-12, f"A = {A:.15g}"


def _eigen():
    lam = float(np.atleast_1d(dirichlet_eigen_estimate(build_grid(exp_model(), 0.0, "fine")))[0])
    exact = special.jn_zeros(0, 1)[0] ** 2
    rel = abs(lam - exact) / exact
    return rel < 5e-3, f"kappa0 = {lam:.8f} (rel err {rel:.1e})"


def _classical():
    r = find_lambda_star(exp_model(), 0.0)
    return abs(r.lam_lo - 2.0) / 2.0 < 1e-2, f"lambda* = {r.lam_lo:.6f}"


def _sandwich():
    m, a = exp_model(), 1e3
    grid = build_grid(m, a)
    ub = upper_bound(m, a).lam_ub
    lb = heuristic_lower_bound(m, a, grid=grid, lam_ub=ub).lam_lb
    lam = find_lambda_star(m, a, grid=grid, seeds=(0.5 * lb, 1.2 * ub, ub)).lam_lo
    return lb <= lam <= ub, f"{lb:.6g} <= {lam:.6g} <= {ub:.6g}"


CHECKS: List[Tuple[str, Callable]] = [
    ("K closed forms", _k_values),
    ("G round trip", _roundtrip),
    ("M == 1 for Gaussian jet", _m_table),
    ("theta* for e^t/t = e", _theta),
    ("capacity A for exp", _capacity),
    ("Dirichlet disk eigenvalue", _eigen),
    ("classical fold lambda* = 2", _classical),
    ("bound sandwich at alpha=1e3", _sandwich),
]


def run_selfcheck() -> List[Tuple[str, bool, str]]:
    out = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # report, do not abort the remaining checks
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, bool(ok), detail))
    return out
