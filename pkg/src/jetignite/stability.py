"""Principal eigenvalue of the linearisation around a minimal solution.

The weighted form ``int (|eta'|^2 - sigma psi f'(v) eta^2) y w dy`` is
discretised by the same finite-volume operator as the solver. In the
symmetrised unknown ``x = V^{1/2} eta`` (``V`` the weighted dual-cell
volumes) the pencil becomes a standard symmetric tridiagonal matrix ``B``.
``kappa_1`` is isolated by Sturm-count bisection and polished by shifted
inverse iteration with a Rayleigh quotient.

The value is the rescaled-domain eigenvalue; on the unit disk it is
``alpha * kappa_1``. Its sign, and hence the verdict, is the same.
"""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .discretization import RadialGrid, operator
from .errors import NoConvergence
from .model import ModelSpec
from .numerics import smallest_eigenvalues, solve_banded3
from .solver import SolutionProfile, SolveOptions, minimal_solution

SEMI_STABLE = "SemiStable"
UNSTABLE = "Unstable"
MARGINAL = "Marginal"

TOL_EIG_FACTOR = 1e-6
EIG_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class EigResult:
    """Principal eigenpair with its stability verdict.

    ``eigenvector`` is the symmetrised mode ``V^{1/2} eta`` on the unknown
    nodes, positive and max-normalised to 1.
    """

    kappa1: float
    eigenvector: np.ndarray = field(repr=False)
    iterations: int
    verdict: str
    tol_eig: float
    residual: float

    @property
    def semi_stable(self) -> bool:
        return self.kappa1 >= -self.tol_eig


def _bands(grid: RadialGrid, lam: float, values) -> Tuple[np.ndarray, np.ndarray]:
    n = grid.N
    d, e = operator(grid).symmetric_bands()
    if lam:
        nl = grid.model.nonlinearity
        d = d - lam * grid.load_scale * grid.psi[:n] * nl.fprime(np.asarray(values)[:n])
    return d, e


def base_eigenvalue(grid: RadialGrid) -> float:
    """``kappa_1`` at ``lambda = 0`` on ``grid`` (cached)."""
    k0 = grid._cache.get("kappa0")
    if k0 is None:
        d, e = _bands(grid, 0.0, None)
        k0 = float(smallest_eigenvalues(d, e, 1)[0])
        grid._cache["kappa0"] = k0
    return k0


def eigen_tolerance(grid: RadialGrid) -> float:
    """``tol_eig = 1e-6 * kappa_1(lambda = 0)`` on the same grid."""
    return TOL_EIG_FACTOR * base_eigenvalue(grid)


def _verdict(kappa, tol):
    if abs(kappa) <= tol:
        return MARGINAL
    return SEMI_STABLE if kappa > 0 else UNSTABLE


def principal_eigenpair(grid: RadialGrid, lam: float, values, max_iter: int = 50) -> EigResult:
    """Principal eigenpair of the linearisation at ``values`` for load ``lam``."""
    d, e = _bands(grid, lam, values)
    kappa = float(smallest_eigenvalues(d, e, 1)[0])
    norm_b = float(np.max(np.abs(d) + np.append(np.abs(e), 0.0) + np.concatenate([[0.0], np.abs(e)])))
    tol = eigen_tolerance(grid)
    gap = max(1e-9 * norm_b, 1e-6 * abs(kappa), 1e-300)
    x = np.ones_like(d)
    res = np.inf
    for it in range(1, max_iter + 1):
        shift = kappa - gap
        try:
            x_new, _ = solve_banded3(e, d - shift, e, x)
        except Exception:
            gap *= 2.0
            continue
        x = x_new / np.max(np.abs(x_new))
        bx = d * x
        bx[:-1] += e * x[1:]
        bx[1:] += e * x[:-1]
        rq = float(np.dot(x, bx) / np.dot(x, x))
        res = float(np.max(np.abs(bx - rq * x)) / (norm_b * np.max(np.abs(x))))
        if res <= EIG_RESIDUAL_TOL and it >= 2:
            kappa_out = rq if abs(rq - kappa) <= 1e-8 * norm_b else kappa
            if np.min(x) < 0 and np.max(x) <= 0:
                x = -x
            x = x / np.max(x)
            return EigResult(kappa1=float(kappa_out), eigenvector=x, iterations=it,
                             verdict=_verdict(kappa_out, tol), tol_eig=tol, residual=res)
    raise NoConvergence(f"inverse iteration stalled at residual {res:.3e}")


def principal_eigenvalue(profile: SolutionProfile) -> EigResult:
    """Semi-stability eigenpair of a converged minimal solution."""
    return principal_eigenpair(profile.grid, profile.lam, profile.values)


def stability_margin_curve(model: ModelSpec, alpha: float, ladder: Sequence[float],
                           grid: RadialGrid, opts: SolveOptions = SolveOptions()) -> List[Tuple[float, float]]:
    """``(lambda, kappa_1)`` along a ladder of loads on the minimal branch.

    Raises
    ------
    NoConvergence
        A ladder point has no converged minimal solution.
    """
    out = []
    warm = None
    prev = None
    for lam in ladder:
        start = warm if (prev is not None and lam >= prev) else None
        o = minimal_solution(model, alpha, lam, grid, opts, warm_start=start)
        if o.kind != "Converged":
            raise NoConvergence(f"no minimal solution at lambda={lam}: {o.kind}")
        out.append((float(lam), principal_eigenvalue(o.profile).kappa1))
        warm, prev = o.profile.values, lam
    return out
