"""Independent reference computations for the test suite.

None of these reuse the package's discretisation or solvers: they integrate
ODEs with scipy, use closed forms, dense linear algebra or brute-force
rules.
"""

import math

import numpy as np
from scipy import special
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar


# ---------------------------------------------------------------------------
# Classical Gelfand problem on the unit disk by shooting
# ---------------------------------------------------------------------------

def _scaled_profile(t_end):
    """``w(t)`` with ``w'' + w'/t + e^w = 0``, ``w(0) = w'(0) = 0``, integrated numerically."""
    t0 = 1e-6
    z0 = [-t0 ** 2 / 4.0, -t0 / 2.0]
    sol = solve_ivp(lambda t, z: [z[1], -z[1] / t - math.exp(z[0])], (t0, t_end), z0,
                    method="DOP853", rtol=1e-12, atol=1e-14, dense_output=True)
    return sol


def gelfand_disk_lambda_of_t(t):
    """Load at which ``u(0) = -w(t)``: by scaling, ``lambda(t) = t^2 exp(w(t))``."""
    sol = _scaled_profile(max(t, 1e-5))
    return t * t * math.exp(sol.sol(t)[0])


def gelfand_disk_lambda_star():
    """Classical fold of ``-Delta u = lambda e^u`` on the unit disk, by maximising ``lambda(t)``."""
    res = minimize_scalar(lambda t: -gelfand_disk_lambda_of_t(t), bounds=(0.5, 6.0),
                          method="bounded", options={"xatol": 1e-10})
    return -res.fun


def gelfand_disk_center(lam):
    """Center value of the minimal solution at ``lam`` (lower branch)."""
    t_fold = minimize_scalar(lambda t: -gelfand_disk_lambda_of_t(t), bounds=(0.5, 6.0),
                             method="bounded", options={"xatol": 1e-10}).x
    t = brentq(lambda t: gelfand_disk_lambda_of_t(t) - lam, 1e-4, t_fold, xtol=1e-14)
    return -_scaled_profile(t).sol(t)[0]


def gelfand_disk_center_closed_form(lam):
    """``u(0) = 2 log(1 + t^2/8)`` with ``t^2/(1 + t^2/8)^2 = lam`` on the lower branch."""
    # with x = t^2 / 8: 8 x / (1 + x)^2 = lam
    a = 8.0 / lam
    x = (a - 2.0 - math.sqrt((a - 2.0) ** 2 - 4.0)) / 2.0
    return 2.0 * math.log1p(x)


# ---------------------------------------------------------------------------
# Advective problem (phi = psi = 1, f = e^u) by shooting in y
# ---------------------------------------------------------------------------

def _advective_end(S, sigma, L):
    y0 = 1e-6
    e = math.exp(S)
    z0 = [S - sigma * e * y0 ** 2 / 4.0, -sigma * e * y0 / 2.0]
    sol = solve_ivp(lambda y, z: [z[1], -(1.0 / y + y) * z[1] - sigma * math.exp(z[0])],
                    (y0, L), z0, method="DOP853", rtol=1e-12, atol=1e-13)
    return sol.y[0, -1]


def advective_sigma_of_center(S, L):
    hi = 1.0
    while _advective_end(S, hi, L) > 0:
        hi *= 2.0
    return brentq(lambda s: _advective_end(S, s, L), 0.0, hi, xtol=1e-14, rtol=1e-13)


def advective_lambda_star(alpha):
    """Fold of ``v'' + (1/y + y) v' + (lambda/alpha) e^v = 0`` on ``[0, sqrt(alpha)]``."""
    L = math.sqrt(alpha)
    res = minimize_scalar(lambda S: -advective_sigma_of_center(S, L), bounds=(0.5, 6.0),
                          method="bounded", options={"xatol": 1e-8})
    return -res.fun * alpha


# ---------------------------------------------------------------------------
# Bessel zeros, quadrature, dense linear algebra
# ---------------------------------------------------------------------------

def bessel_j0_zero(k):
    """``k``-th positive zero of ``J0`` by bracketing a sign change of ``scipy.special.j0``."""
    x = np.linspace(0.1, 4.0 * k + 4.0, 20000)
    v = special.j0(x)
    idx = np.nonzero(np.sign(v[:-1]) != np.sign(v[1:]))[0][k - 1]
    return brentq(special.j0, x[idx], x[idx + 1], xtol=1e-15)


def midpoint_rule(fn, a, b, n):
    h = (b - a) / n
    x = a + h * (np.arange(n) + 0.5)
    return float(h * np.sum(fn(x)))


def dense_tridiagonal_solve(sub, diag, sup, rhs):
    A = np.diag(diag) + np.diag(sub, -1) + np.diag(sup, 1)
    return np.linalg.solve(A, rhs)


def dense_tridiagonal(sub, diag, sup):
    return np.diag(diag) + np.diag(sub, -1) + np.diag(sup, 1)


def running_max_oracle(ratio_fn, s, n=100_001):
    """Running maximum of ``ratio_fn`` on ``[0, s]`` from ``n`` uniform samples."""
    x = np.linspace(0.0, s, n)
    return float(np.max(ratio_fn(x)))


# ---------------------------------------------------------------------------
# Closed forms for the upper-bound integrals
# ---------------------------------------------------------------------------

def J1_closed(X):
    """``int_0^X (1 - e^{-y^2/2}) dy/y = Ein(X^2/2)/2`` with ``Ein(z) = E1(z) + log z + gamma``."""
    z = 0.5 * X * X
    return 0.5 * (special.exp1(z) + math.log(z) + np.euler_gamma)


def J2_closed(X):
    return 1.0 - math.sqrt(math.pi / 2.0) * special.erf(X / math.sqrt(2.0)) / X


def c0_closed():
    """``int_1^inf e^{-y^2/2} dy/y = E1(1/2)/2``."""
    return 0.5 * special.exp1(0.5)
