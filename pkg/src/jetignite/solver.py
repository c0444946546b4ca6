"""Minimal solutions of the rescaled problem ``A v = (lambda/alpha) psi_alpha f(v)``.

The solve has two phases, both started from a sub-solution (zero, or a
minimal solution at a smaller ``lambda``):

1. monotone iteration ``(A + Omega) v_{n+1} = sigma psi f(v_n) + Omega v_n``
   until the relative increment drops below ``newton_switch_tol``;
2. Newton steps ``J d = sigma psi f(v) - A v`` with ``J = A - sigma psi f'(v)``.

Convexity of ``f`` keeps every Newton iterate a sub-solution lying below the
minimal solution, so the sequence still increases monotonically towards it.
The same argument gives a nonexistence test: if a minimal solution ``u``
existed, ``J (u - v) >= 0`` with ``u - v >= 0`` would make ``J`` an M-matrix,
so a non-positive elimination pivot of ``J`` rules out any solution above
``v``. The blow-up rule (cap crossing plus accelerating centre growth) is a
heuristic surrogate used when the iteration diverges before Newton starts.
"""

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import kernels
from .discretization import RadialGrid, operator
from .errors import GridMismatch, SingularPivot
from .model import ModelSpec
from .numerics import solve_banded3

MINIMAL = "Minimal"
EXTREMAL_CANDIDATE = "Extremal-candidate"


@dataclass(frozen=True)
class SolveOptions:
    """Controls for :func:`minimal_solution`.

    ``omega`` is ``"zero"`` (plain fixed-point map, monotone because
    ``f`` is non-decreasing), ``"lipschitz"`` (per-step
    ``sigma * max psi f'(v_n)``) or a fixed non-negative number.
    """

    max_outer_iterations: int = 5000
    residual_tol: float = 1e-10
    blowup_cap: Optional[float] = None
    newton_switch_tol: float = 1e-3
    omega: Union[str, float] = "zero"
    newton: bool = True
    max_newton_steps: int = 100
    growth_windows: int = 3

    def __post_init__(self):
        if self.residual_tol <= 0 or self.newton_switch_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.blowup_cap is not None and self.blowup_cap <= 0:
            raise ValueError("blow-up cap must be positive")
        if isinstance(self.omega, str):
            if self.omega not in ("zero", "lipschitz"):
                raise ValueError(f"unknown omega policy {self.omega!r}")
        elif self.omega < 0:
            raise ValueError("omega must be non-negative")


@dataclass(frozen=True)
class SolutionProfile:
    """Converged discrete minimal solution; ``values`` includes ``v_N = 0``."""

    grid: RadialGrid = field(repr=False)
    values: np.ndarray = field(repr=False)
    lam: float
    alpha: float
    iterations: int
    residual: float
    tag: str = MINIMAL
    picard_iterations: int = 0
    newton_steps: int = 0
    min_pivot: float = float("nan")
    residual_tol: float = float("nan")

    @property
    def center(self) -> float:
        return float(self.values[0])

    @property
    def sigma(self) -> float:
        return self.lam * self.grid.load_scale

    def to_csv(self, path):
        nl = self.grid.model.nonlinearity
        data = np.column_stack([self.grid.y, self.grid.r, self.values, nl.G(self.values)])
        np.savetxt(path, data, delimiter=",", header="y,r,v,G_of_v", comments="",
                   fmt="%.17g")


@dataclass(frozen=True)
class Converged:
    profile: SolutionProfile
    kind: str = "Converged"


@dataclass(frozen=True)
class NoSolutionDetected:
    diagnostics: dict
    kind: str = "NoSolutionDetected"


@dataclass(frozen=True)
class Inconclusive:
    diagnostics: dict
    kind: str = "Inconclusive"


def _check_grid(model, alpha, grid):
    if grid.model is not model and grid.model != model:
        raise GridMismatch("grid was built for a different model")
    if grid.alpha != float(alpha):
        raise GridMismatch(f"grid alpha {grid.alpha} differs from {alpha}")


def residual_norm(grid: RadialGrid, lam: float, values) -> float:
    """``max |A v - sigma psi f(v)| / max(sigma psi f(v))`` over the unknowns."""
    op = operator(grid)
    nl = grid.model.nonlinearity
    n = grid.N
    values = np.asarray(values, dtype=float)
    src = lam * grid.load_scale * grid.psi[:n] * nl.value(values[:n])
    res = op.apply(values) - src
    scale = np.max(np.abs(src))
    return float(np.max(np.abs(res)) / scale) if scale > 0 else float(np.max(np.abs(res)))


def effective_tolerance(grid: RadialGrid, lam: float, values, tol: float) -> float:
    """``tol`` plus the roundoff floor ``16 eps ||A|| ||v|| / ||s||`` of the residual.

    Storing ``v`` in double precision already perturbs ``A v`` by about
    ``eps ||A|| ||v||``, and ``||A||`` grows like ``h^-2``.
    """
    op = operator(grid)
    nl = grid.model.nonlinearity
    n = grid.N
    norm_a = float(np.max(np.abs(op.diag) + np.append(np.abs(op.sup), abs(op.boundary))
                          + np.concatenate([[0.0], np.abs(op.sub)])))
    src = lam * grid.load_scale * grid.psi[:n] * nl.value(np.asarray(values)[:n])
    s = float(np.max(np.abs(src)))
    if s == 0:
        return tol
    return tol + 16 * np.finfo(float).eps * norm_a * float(np.max(np.abs(values))) / s


def _accelerating(hist, windows):
    """``windows`` consecutive increases of the centre increment.

    An overflowing step counts as accelerating, and the steps it prevents
    from being computed count as well, so a history ending in overflow only
    needs its finite increments to be increasing.
    """
    h = np.asarray(hist, dtype=float)
    d = np.diff(h)
    d = np.where(np.isfinite(d), d, np.inf)
    if len(d) == 0:
        return False
    if np.isinf(d[-1]):
        fin = d[:-1][-windows:]
        return bool(np.all(fin > 0) and np.all(np.diff(fin) > 0))
    if len(d) < windows + 1:
        return False
    tail = d[-(windows + 1):]
    return bool(np.all(tail > 0) and np.all(np.diff(tail) > 0))


def minimal_solution(model: ModelSpec, alpha: float, lam: float, grid: RadialGrid,
                     opts: SolveOptions = SolveOptions(), warm_start=None):
    """Minimal solution at ``(alpha, lam)`` on ``grid``.

    Parameters
    ----------
    warm_start : array, optional
        A discrete sub-solution at ``lam`` (for instance the minimal
        solution at a smaller ``lambda``) used instead of zero.

    Returns
    -------
    Converged, NoSolutionDetected or Inconclusive
    """
    _check_grid(model, alpha, grid)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    nl = model.nonlinearity
    op = operator(grid)
    n = grid.N
    sigma = lam * grid.load_scale
    load = np.ascontiguousarray(sigma * grid.psi[:n])
    u_max = opts.blowup_cap if opts.blowup_cap is not None else nl.u_max
    code = nl.code()
    if isinstance(opts.omega, str):
        omega_mode = 1 if opts.omega == "lipschitz" else 0
        omega_const = 0.0
    else:
        omega_mode, omega_const = 0, float(opts.omega)

    v0 = np.zeros(n) if warm_start is None else np.array(warm_start[:n], dtype=float)
    stop_tol = opts.newton_switch_tol if opts.newton else 0.1 * opts.residual_tol
    hist = np.empty(opts.max_outer_iterations + 1)
    status, its, v, inc = kernels.picard_run(
        op.sub, op.diag, op.sup, load, v0, omega_mode, omega_const, *code,
        stop_tol, u_max, opts.max_outer_iterations, opts.growth_windows, hist)
    centers = np.concatenate([[v0[0]], hist[:its]])
    diag = {"alpha": float(alpha), "lambda": float(lam), "picard_iterations": int(its),
            "last_increment": float(inc), "center_history_tail": centers[-6:].tolist(),
            "blowup_cap": float(u_max)}

    if status == kernels.CAP_CROSSED:
        if _accelerating(centers, opts.growth_windows):
            return NoSolutionDetected({**diag, "reason": "blowup"})
        return Inconclusive({**diag, "reason": "cap_crossed_without_acceleration"})
    if status == kernels.MONOTONICITY_LOST:
        return Inconclusive({**diag, "reason": "monotonicity_lost"})
    if status == kernels.MAX_ITER:
        return Inconclusive({**diag, "reason": "max_iterations"})

    v_full = np.append(v, 0.0)
    v_picard = v_full.copy()
    newton_steps = 0
    min_piv = float("nan")
    res = residual_norm(grid, lam, v_full)
    tol_eff = effective_tolerance(grid, lam, v_full, opts.residual_tol)
    if opts.newton:
        while res > tol_eff and newton_steps < opts.max_newton_steps:
            vv = v_full[:n]
            r = load * nl.value(vv) - op.apply(v_full)
            jd = op.diag - load * nl.fprime(vv)
            try:
                delta, min_piv = solve_banded3(op.sub, jd, op.sup, r)
            except SingularPivot:
                min_piv = 0.0
            if not min_piv > 0:
                return NoSolutionDetected({**diag, "reason": "linearization_indefinite",
                                           "newton_steps": newton_steps, "min_pivot": float(min_piv),
                                           "center": float(v_full[0])})
            v_new = v_full.copy()
            v_new[:n] += np.maximum(delta, 0.0)
            newton_steps += 1
            if not np.all(np.isfinite(v_new)) or np.max(v_new) > u_max:
                return NoSolutionDetected({**diag, "reason": "newton_blowup",
                                           "newton_steps": newton_steps})
            stalled = np.array_equal(v_new, v_full)
            v_full = v_new
            res = residual_norm(grid, lam, v_full)
            tol_eff = effective_tolerance(grid, lam, v_full, opts.residual_tol)
            if stalled:
                break
        if res > tol_eff:
            return Inconclusive({**diag, "reason": "newton_stalled", "residual": res,
                                 "newton_steps": newton_steps})
        if np.any(v_full < v_picard - 1e-13 * (1.0 + np.abs(v_picard))):
            return Inconclusive({**diag, "reason": "newton_below_monotone_iterate"})
    elif res > tol_eff:
        return Inconclusive({**diag, "reason": "residual_not_met", "residual": res})

    prof = SolutionProfile(grid=grid, values=v_full, lam=float(lam), alpha=float(alpha),
                           iterations=int(its + newton_steps), residual=res,
                           picard_iterations=int(its), newton_steps=newton_steps,
                           min_pivot=float(min_piv), residual_tol=float(tol_eff))
    return Converged(prof)


@dataclass(frozen=True)
class ComparisonVerdict:
    passed: bool
    max_violation: float
    caller_error: bool = False


def comparison_check(p1: SolutionProfile, p2: SolutionProfile, tol: float = 1e-10) -> ComparisonVerdict:
    """Check ``v(lambda_2) >= v(lambda_1)`` pointwise for ``lambda_2 >= lambda_1``.

    Swapped arguments (``lambda_2 < lambda_1``) are reported as a caller
    error with a failing verdict.
    """
    if not p1.grid.same_as(p2.grid):
        raise GridMismatch("profiles live on different grids")
    viol = float(max(0.0, np.max(p1.values - p2.values)))
    if p2.lam < p1.lam:
        return ComparisonVerdict(False, viol, caller_error=True)
    scale = max(1.0, float(np.max(np.abs(p2.values))))
    return ComparisonVerdict(viol <= tol * scale, viol)


def nonuniform_derivative(y, g):
    """Second-order three-point derivative on a non-uniform mesh; zero at ``y_0``."""
    d = np.zeros_like(g)
    h1 = y[1:-1] - y[:-2]
    h2 = y[2:] - y[1:-1]
    d[1:-1] = (h1 ** 2 * g[2:] - h2 ** 2 * g[:-2] + (h2 ** 2 - h1 ** 2) * g[1:-1]) / (h1 * h2 * (h1 + h2))
    d[-1] = (g[-1] - g[-2]) / (y[-1] - y[-2])
    return d


def g_transform_residual_vector(p: SolutionProfile) -> np.ndarray:
    """Residual of ``(1/(y w))(y w G')' = sigma psi + f'(v) (G')^2`` at ``G = G(v)``."""
    grid = p.grid
    nl = grid.model.nonlinearity
    n = grid.N
    Gv = nl.G(np.maximum(p.values, 0.0))
    dG = nonuniform_derivative(grid.y, Gv)
    lhs = -operator(grid).apply(Gv)
    rhs = p.sigma * grid.psi[:n] + nl.fprime(p.values[:n]) * dG[:n] ** 2
    return lhs - rhs


def g_transform_residual(p: SolutionProfile) -> float:
    """Max norm of :func:`g_transform_residual_vector`."""
    return float(np.max(np.abs(g_transform_residual_vector(p))))


def profile_from_values(grid: RadialGrid, lam: float, values) -> SolutionProfile:
    """Wrap an arbitrary vector (for diagnostics and tests)."""
    values = np.asarray(values, dtype=float)
    return SolutionProfile(grid=grid, values=values, lam=float(lam), alpha=grid.alpha,
                           iterations=0, residual=residual_norm(grid, lam, values))
