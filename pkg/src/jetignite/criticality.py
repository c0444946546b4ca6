"""Bracketing of the critical load ``lambda*`` and extremal-solution diagnostics.

``lambda*`` is bracketed by bisection on the solver's classification:
``lambda_lo`` always carries a converged minimal solution and ``lambda_hi``
a nonexistence verdict. After the bracket reaches ``bracket_tol`` the
bisection keeps going until the principal eigenvalue at ``lambda_lo`` shows
the fold signature ``kappa_1(lambda_lo) <= 0.05 kappa_1(lambda_lo / 2)``.
"""

from dataclasses import dataclass, field, replace
from typing import Optional, Union
import math

import numpy as np

from .discretization import RadialGrid, build_grid, operator
from .errors import SeedBracketFailure
from .model import ModelSpec
from .numerics import solve_banded3
from .solver import (EXTREMAL_CANDIDATE, SolutionProfile, SolveOptions, minimal_solution)
from .stability import base_eigenvalue, principal_eigenvalue

FOLD_RATIO = 0.05


@dataclass(frozen=True)
class CriticalityOptions:
    bracket_tol: float = 1e-3
    resolution: Union[str, int] = "default"
    second_resolution: Optional[Union[str, int]] = None
    cold_restart_every: int = 4
    max_extra_steps: int = 40
    max_steps: int = 200
    fold_ratio: float = FOLD_RATIO
    track_stability: bool = False
    solve: SolveOptions = SolveOptions()

    def __post_init__(self):
        if not self.bracket_tol > 0:
            raise ValueError("bracket_tol must be positive")


@dataclass(frozen=True)
class LambdaStarResult:
    """Final bracket and extremal candidate.

    ``bracket_steps`` counts the bisections needed to reach ``bracket_tol``;
    ``steps`` also counts those spent narrowing further until the fold
    signature appears.
    """

    alpha: float
    lam_lo: float
    lam_hi: float
    profile: SolutionProfile = field(repr=False)
    kappa1: float
    kappa1_half: float
    steps: int
    log: list = field(repr=False)
    seed_lo: float = float("nan")
    seed_hi: float = float("nan")
    fold_signature: bool = False
    lam_star_alt: Optional[float] = None
    resolution_flag: bool = False
    resolution: str = "default"
    bracket_steps: int = 0

    @property
    def lam_star_estimate(self) -> float:
        return self.lam_lo

    @property
    def relative_width(self) -> float:
        return (self.lam_hi - self.lam_lo) / self.lam_lo

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha, "lambda_lo": self.lam_lo, "lambda_hi": self.lam_hi,
            "lambda_star_estimate": self.lam_star_estimate, "relative_width": self.relative_width,
            "kappa1": self.kappa1, "kappa1_half": self.kappa1_half, "steps": self.steps,
            "bracket_steps": self.bracket_steps, "seed_lo": self.seed_lo, "seed_hi": self.seed_hi,
            "fold_signature": self.fold_signature, "lambda_star_alt": self.lam_star_alt,
            "resolution_flag": self.resolution_flag, "resolution": self.resolution,
            "log": self.log,
        }


def supersolution_seed(grid: RadialGrid) -> float:
    """A load at which a discrete minimal solution provably exists.

    With ``T = A^{-1} psi`` and ``T_0 = max T``, the profile ``c T / T_0`` is
    a discrete super-solution whenever ``sigma <= (c / f(c)) / T_0``; the
    best ``c`` maximises ``c / f(c)``.
    """
    op = operator(grid)
    n = grid.N
    T, _ = solve_banded3(op.sub, op.diag, op.sup, grid.psi[:n])
    T0 = float(np.max(T))
    nl = grid.model.nonlinearity
    cs = np.geomspace(1e-6, 1e6, 4001)
    best = float(np.max(cs / nl.value(cs)))
    return best / T0 / grid.load_scale


def _classify(model, alpha, lam, grid, solve_opts, warm):
    o = minimal_solution(model, alpha, lam, grid, solve_opts, warm_start=warm)
    if o.kind == "Inconclusive":
        retry = replace(solve_opts, max_outer_iterations=4 * solve_opts.max_outer_iterations,
                        max_newton_steps=4 * solve_opts.max_newton_steps)
        o = minimal_solution(model, alpha, lam, grid, retry, warm_start=None)
    return o


def _entry(lam, o, phase, track, **extra):
    e = {"lambda": float(lam), "outcome": o.kind, "phase": phase}
    e.update(extra)
    if track and o.kind == "Converged":
        e["kappa1"] = principal_eigenvalue(o.profile).kappa1
    return e


def _seeds(model, alpha, grid, seeds):
    if seeds is not None:
        return seeds
    if alpha >= 100:
        from .bounds import heuristic_lower_bound, upper_bound

        ub = upper_bound(model, alpha).lam_ub
        lb = heuristic_lower_bound(model, alpha, grid=grid).lam_lb
        lo = 0.5 * lb if lb > 0 else supersolution_seed(grid)
        return lo, 1.2 * ub, ub
    lo = supersolution_seed(grid)
    return lo, 2.0 * lo, None


def find_lambda_star(model: ModelSpec, alpha: float, opts: CriticalityOptions = CriticalityOptions(),
                     grid: Optional[RadialGrid] = None, seeds=None) -> LambdaStarResult:
    """Bracket ``lambda*`` for ``(model, alpha)``.

    Parameters
    ----------
    seeds : tuple, optional
        ``(lo, hi, lam_ub)``; by default ``lo = lambda_LB / 2`` and
        ``hi = 1.2 lambda_UB`` from the bounds module for ``alpha >= 100``,
        and a super-solution seed otherwise.

    Raises
    ------
    SeedBracketFailure
        No existence/nonexistence sandwich within ``[1e-6, 10 lambda_UB]``.
    """
    if grid is None:
        grid = build_grid(model, alpha, opts.resolution)
    sopts = opts.solve
    lo, hi, ub = _seeds(model, alpha, grid, seeds)
    seed_lo, seed_hi = lo, hi
    log = []

    o_lo = _classify(model, alpha, lo, grid, sopts, None)
    while o_lo.kind != "Converged":
        log.append(_entry(lo, o_lo, "seed_lo", False))
        hi = min(hi, lo) if o_lo.kind == "NoSolutionDetected" else hi
        lo *= 0.5
        if lo < 1e-6:
            raise SeedBracketFailure("no converged solve above 1e-6")
        o_lo = _classify(model, alpha, lo, grid, sopts, None)
    prof_lo = o_lo.profile
    log.append(_entry(lo, o_lo, "seed_lo", opts.track_stability))

    hi_cap = 10.0 * ub if ub is not None else 1e6 * lo
    while True:
        o_hi = _classify(model, alpha, hi, grid, sopts, prof_lo.values)
        log.append(_entry(hi, o_hi, "seed_hi", opts.track_stability))
        if o_hi.kind == "NoSolutionDetected":
            break
        if o_hi.kind == "Converged":
            lo, prof_lo = hi, o_hi.profile
        if hi >= hi_cap:
            raise SeedBracketFailure(f"no nonexistence verdict below {hi_cap:.6g}")
        hi = min(2.0 * hi, hi_cap)

    steps = 0
    kappa_lo = kappa_half = float("nan")
    fold = False
    extra = 0
    bracket_steps = None
    while steps < opts.max_steps:
        width = (hi - lo) / lo
        if width <= opts.bracket_tol:
            if bracket_steps is None:
                bracket_steps = steps
            kappa_lo = principal_eigenvalue(prof_lo).kappa1
            if math.isnan(kappa_half):
                half = _classify(model, alpha, 0.5 * lo, grid, sopts, None)
                if half.kind == "Converged":
                    kappa_half = principal_eigenvalue(half.profile).kappa1
                else:
                    kappa_half = base_eigenvalue(grid)
            fold = kappa_lo <= opts.fold_ratio * kappa_half
            if fold or extra >= opts.max_extra_steps:
                break
            extra += 1
        mid = 0.5 * (lo + hi)
        steps += 1
        cold = opts.cold_restart_every > 0 and steps % opts.cold_restart_every == 0
        o = _classify(model, alpha, mid, grid, sopts, None if cold else prof_lo.values)
        log.append(_entry(mid, o, "bisect", opts.track_stability, cold=cold))
        if o.kind == "Converged":
            lo, prof_lo = mid, o.profile
        else:
            hi = mid

    prof = replace(prof_lo, tag=EXTREMAL_CANDIDATE)
    res = LambdaStarResult(alpha=float(alpha), lam_lo=lo, lam_hi=hi, profile=prof,
                           kappa1=float(kappa_lo), kappa1_half=float(kappa_half), steps=steps,
                           log=log, seed_lo=seed_lo, seed_hi=seed_hi, fold_signature=bool(fold),
                           resolution=str(opts.resolution),
                           bracket_steps=steps if bracket_steps is None else bracket_steps)
    if opts.second_resolution is not None:
        alt = find_lambda_star(model, alpha, replace(opts, resolution=opts.second_resolution,
                                                     second_resolution=None),
                               seeds=(0.5 * lo, 1.2 * hi, ub))
        flag = abs(alt.lam_lo - lo) / lo > 2.0 * opts.bracket_tol
        res = replace(res, lam_star_alt=alt.lam_lo, resolution_flag=bool(flag))
    return res


def _trapz(yv, y):
    return float(np.sum(0.5 * (yv[1:] + yv[:-1]) * np.diff(y)))


def extremal_diagnostics(res: Union[LambdaStarResult, SolutionProfile], r0: float = 0.5) -> dict:
    """Integral and pointwise quantities of the extremal candidate.

    Integrals over the unit disk are computed in the rescaled variable,
    ``int_B u dx = (2 pi / alpha) int_0^{sqrt(alpha)} v y dy``, by the
    trapezoidal rule on the solution grid.
    """
    prof = res.profile if isinstance(res, LambdaStarResult) else res
    grid = prof.grid
    y = grid.y
    v = np.maximum(prof.values, 0.0)
    nl = grid.model.nonlinearity
    c = 2.0 * math.pi / grid.scale ** 2
    fv = nl.value(v)
    f0 = nl.value(np.zeros_like(v))
    out = {
        "u0": float(v[0]),
        "int_u": c * _trapz(v * y, y),
        "int_psi_f": c * _trapz(grid.psi * fv * y, y),
        "f0_int_psi": c * _trapz(grid.psi * f0 * y, y),
        "u_half": float(np.interp(r0 * grid.scale, y, v)),
    }
    for p in (1, 2, 4):
        out[f"l{p}"] = (c * _trapz(v ** p * y, y)) ** (1.0 / p)
    return out
