"""Computable bounds on ``lambda*`` and the growth constants of the extremal solution.

* :func:`upper_bound` integrates the flux identity of the ``G``-equation
  over ``[0, h sqrt(alpha)]`` where ``h`` is the chord constant of ``psi``,
  giving ``lambda* <= K alpha / (J1 - J2)``.
* :func:`subsolution_certificate` builds ``G~ = K - beta tau`` from the
  linear problem ``A tau = psi_alpha + M_alpha^2 / alpha`` and checks that
  ``G~`` is a positive sub-solution of the ``G``-equation. The final test is
  discrete: ``G^{-1}(G~)`` must be a super-solution of the discrete problem,
  which guarantees a discrete minimal solution at ``lambda``.
* :func:`heuristic_lower_bound` maximises the certified ``lambda`` over a
  small set of levels ``w``.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple
import math

import numpy as np

from .discretization import RadialGrid, build_grid, operator, refine
from .errors import (ChordBoundDegenerate, DerivativeBounded, NoFeasibleBeta, NoRoot,
                     NoSignChange, OutOfRange)
from .model import ModelSpec
from .numerics import bracket_root, largest_root, quad, solve_banded3
from .solver import nonuniform_derivative

CERT_TOL = 1e-12


# ---------------------------------------------------------------------------
# Upper bound
# ---------------------------------------------------------------------------

def chord_constant(model: ModelSpec, n_scan: int = 20001) -> float:
    """Largest ``h`` in ``(0, 1]`` with ``psi(r) >= 1 - r/h`` on ``[0, 1]``.

    ``h = min(1, inf_r r / (1 - psi(r)))``, located by a dense scan and
    refined by bounded minimisation around the scan minimum.
    """
    from scipy.optimize import minimize_scalar

    psi = model.flow.psi_of

    def ratio(r):
        gap = 1.0 - float(psi(r))
        return r / gap if gap > 0 else np.inf

    r = np.linspace(0.0, 1.0, n_scan)[1:]
    vals = np.array([ratio(x) for x in r])
    k = int(np.argmin(vals))
    h = float(vals[k])
    if np.isfinite(h):
        a, b = r[max(k - 1, 0)], r[min(k + 1, len(r) - 1)]
        res = minimize_scalar(ratio, bounds=(a, b), method="bounded", options={"xatol": 1e-14})
        h = min(h, float(res.fun))
    h = min(1.0, h)
    if h <= 0.01:
        raise ChordBoundDegenerate(f"chord constant {h:.3g} is below 0.01")
    return h


def _j1_integrand(y):
    return -math.expm1(-0.5 * y * y) / y if y > 0 else 0.0


def J1(X: float) -> float:
    """``int_0^X (1 - exp(-y^2/2)) dy / y`` by quadrature."""
    pts = [p for p in (1.0, 4.0, 10.0) if p < X]
    return quad(_j1_integrand, 0.0, X, abs_tol=1e-13, rel_tol=1e-13, max_depth=500,
                points=pts or None)


def J2(X: float) -> float:
    """``(1/X) int_0^X (1 - exp(-y^2/2)) dy`` by quadrature."""
    pts = [p for p in (1.0, 4.0, 10.0) if p < X]
    return quad(lambda y: -math.expm1(-0.5 * y * y), 0.0, X, abs_tol=1e-13, rel_tol=1e-13,
                max_depth=500, points=pts or None) / X


def c0_constant() -> float:
    """``int_1^inf exp(-y^2/2) dy / y`` by quadrature."""
    return quad(lambda y: math.exp(-0.5 * y * y) / y, 1.0, math.inf, abs_tol=1e-14, rel_tol=1e-13)


@dataclass(frozen=True)
class UpperBound:
    lam_ub: float
    J1: float
    J2: float
    h: float
    degenerate: bool = False


def upper_bound(model: ModelSpec, alpha: float) -> UpperBound:
    """``lambda_UB = K alpha / (J1 - J2)`` with ``J1, J2`` at ``X = h sqrt(alpha)``.

    Raises
    ------
    OutOfRange
        ``alpha < 10``.
    ChordBoundDegenerate
        No chord constant above 0.01.
    """
    if alpha < 10:
        raise OutOfRange("the chord bound needs alpha >= 10")
    h = chord_constant(model)
    X = h * math.sqrt(alpha)
    j1, j2 = J1(X), J2(X)
    if j1 <= j2:
        return UpperBound(math.inf, j1, j2, h, degenerate=True)
    return UpperBound(model.K * alpha / (j1 - j2), j1, j2, h)


# ---------------------------------------------------------------------------
# Sub-solution certificate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    """Outcome of :func:`subsolution_certificate`.

    ``conditions`` maps each check to its verdict: ``positive`` (G~ >= eps_w),
    ``monotone`` (G~ non-decreasing), ``inequality`` (the pointwise
    sub-solution inequality) and ``discrete`` (``G^{-1}(G~)`` is a discrete
    super-solution).
    """

    passed: bool
    lam: float
    w: float
    beta: float
    eps_w: float
    margin: float
    conditions: Dict[str, bool]
    witness: np.ndarray = field(repr=False)
    grid: RadialGrid = field(repr=False)
    reason: str = ""

    def to_csv(self, path):
        nl = self.grid.model.nonlinearity
        data = np.column_stack([self.grid.y, self.witness, nl.G_inverse(self.witness)])
        np.savetxt(path, data, delimiter=",", header="y,G_tilde,v_tilde", comments="", fmt="%.17g")


def _tau(grid: RadialGrid):
    t = grid._cache.get("tau")
    if t is None:
        op = operator(grid)
        n = grid.N
        s = grid.psi + grid.M ** 2 * grid.load_scale
        tau, _ = solve_banded3(op.sub, op.diag, op.sup, s[:n])
        t = (np.append(tau, 0.0), s)
        grid._cache["tau"] = t
    return t


def _beta_profile(grid, beta):
    """``G~``, ``dG~``, and the margin vector ``beta s - (G~')^2 f'(v~)`` (all nodes)."""
    nl = grid.model.nonlinearity
    tau, s = _tau(grid)
    Gt = nl.K - beta * tau
    dG = -beta * nonuniform_derivative(grid.y, tau)
    v = nl.G_inverse(np.clip(Gt, 1e-300, nl.K))
    supply = beta * s - dG ** 2 * nl.fprime(v)
    return Gt, dG, v, supply


def _best_beta(grid, eps_w, n_scan=48):
    """Maximise ``min_i supply_i / psi_i`` over ``beta`` in ``(0, beta_max]``."""
    key = ("beta", eps_w)
    if key in grid._cache:
        return grid._cache[key]
    nl = grid.model.nonlinearity
    tau, _ = _tau(grid)
    psi = grid.psi
    mask = psi > 0
    beta_max = (nl.K - eps_w) / tau[0]
    if not beta_max > 0:
        grid._cache[key] = (0.0, -np.inf)
        return grid._cache[key]

    def score(b):
        _, _, _, supply = _beta_profile(grid, b)
        return float(np.min(supply[mask] / psi[mask]))

    betas = beta_max * np.linspace(1.0 / n_scan, 1.0, n_scan)
    scores = np.array([score(b) for b in betas])
    k = int(np.argmax(scores))
    lo = betas[max(k - 1, 0)]
    hi = betas[min(k + 1, n_scan - 1)]
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - gr * (b - a), a + gr * (b - a)
    fc, fd = score(c), score(d)
    for _ in range(60):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = score(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = score(d)
        if b - a < 1e-12 * beta_max:
            break
    cands = [(scores[k], betas[k]), (fc, c), (fd, d)]
    best_score, best_beta = max(cands)
    grid._cache[key] = (float(best_beta), float(best_score))
    return grid._cache[key]


def _check(grid, lam, w, beta, eps_w):
    nl = grid.model.nonlinearity
    sigma = lam * grid.load_scale
    n = grid.N
    Gt, dG, v, supply = _beta_profile(grid, beta)
    tol = CERT_TOL * nl.K
    positive = bool(np.all(Gt >= eps_w - tol) and np.all(Gt > 0))
    monotone = bool(np.all(np.diff(Gt) >= -tol))
    need = sigma * grid.psi
    ineq_margin = supply[:n] - need[:n]
    inequality = bool(np.all(ineq_margin >= -CERT_TOL * np.max(np.abs(supply))))
    v_full = v.copy()
    v_full[-1] = 0.0
    av = operator(grid).apply(v_full)
    rhs = sigma * grid.psi[:n] * nl.value(v_full[:n])
    disc = av - rhs
    discrete = bool(np.all(disc >= -1e-10 * np.max(np.abs(rhs))))
    margin = float(np.min(ineq_margin) / max(np.max(need), 1e-300))
    conds = {"positive": positive, "monotone": monotone, "inequality": inequality,
             "discrete": discrete}
    return conds, margin, Gt


def subsolution_certificate(model: ModelSpec, alpha: float, lam: float, w: float,
                            grid: Optional[RadialGrid] = None, raise_on_fail: bool = False,
                            reverify: bool = False) -> Certificate:
    """Try to certify existence of a minimal solution at ``lam``.

    ``beta`` is chosen in ``(0, (K - eps_w)/tau(0)]`` to maximise the
    smallest pointwise margin of the sub-solution inequality, so that
    ``G~(0) >= eps_w`` and hence ``f'(G^{-1}(G~)) <= f'(w)``.

    Parameters
    ----------
    reverify : bool
        Also require all conditions on a mesh refined by midpoint insertion,
        with the same ``beta``.

    Raises
    ------
    NoFeasibleBeta
        Only when ``raise_on_fail`` is set and no ``beta`` passes.
    """
    if not w > 0:
        raise ValueError("w must be positive")
    if grid is None:
        grid = build_grid(model, alpha, "default")
    nl = model.nonlinearity
    eps_w = float(nl.G(w))
    beta, _ = _best_beta(grid, eps_w)
    if beta <= 0:
        cert = Certificate(False, lam, w, 0.0, eps_w, -math.inf,
                           {"positive": False, "monotone": False, "inequality": False, "discrete": False},
                           np.full(len(grid.y), nl.K), grid, reason="empty beta range")
    else:
        conds, margin, Gt = _check(grid, lam, w, beta, eps_w)
        ok = all(conds.values())
        reason = "" if ok else ",".join(k for k, v in conds.items() if not v)
        if ok and reverify:
            fine = refine(grid)
            conds_f, _, _ = _check(fine, lam, w, beta, eps_w)
            if not all(conds_f.values()):
                ok = False
                reason = "refined:" + ",".join(k for k, v in conds_f.items() if not v)
        cert = Certificate(ok, lam, w, beta, eps_w, margin, conds, Gt, grid, reason=reason)
    if raise_on_fail and not cert.passed:
        raise NoFeasibleBeta(f"no beta certifies lambda={lam} at w={w}: {cert.reason}")
    return cert


def default_w_set(alpha: float) -> List[float]:
    ll = math.log(math.log(alpha))
    return [0.5 * ll, ll, 2.0 * ll, 1.0, 2.0, 4.0]


@dataclass(frozen=True)
class LowerBound:
    lam_lb: float
    w_best: Optional[float]
    beta: float
    eps_w: float
    per_w: Dict[float, float]
    empty: bool = False


def heuristic_lower_bound(model: ModelSpec, alpha: float, w_set: Optional[Iterable[float]] = None,
                          grid: Optional[RadialGrid] = None, lam_ub: Optional[float] = None,
                          rtol: float = 1e-5) -> LowerBound:
    """Largest certified ``lambda`` over the ``w`` scan set.

    For each ``w`` the pass/fail boundary is located by bisection in
    ``lambda`` on ``[0, lambda_UB]``. An empty pass set gives
    ``lam_lb = 0`` with ``empty=True``.
    """
    if alpha < 100:
        raise OutOfRange("heuristic lower bound needs alpha >= 100")
    if grid is None:
        grid = build_grid(model, alpha, "default")
    if lam_ub is None:
        lam_ub = upper_bound(model, alpha).lam_ub
    ws = list(w_set) if w_set is not None else default_w_set(alpha)
    per_w = {}
    best = (0.0, None, 0.0, 0.0)
    for w in ws:
        w = float(w)
        lo = 0.0
        c = subsolution_certificate(model, alpha, 1e-3 * lam_ub, w, grid)
        if not c.passed:
            per_w[w] = 0.0
            continue
        lo, hi = 1e-3 * lam_ub, lam_ub
        last = c
        while (hi - lo) > rtol * hi:
            mid = 0.5 * (lo + hi)
            c = subsolution_certificate(model, alpha, mid, w, grid)
            if c.passed:
                lo, last = mid, c
            else:
                hi = mid
        per_w[w] = lo
        if lo > best[0]:
            best = (lo, w, last.beta, last.eps_w)
    return LowerBound(lam_lb=best[0], w_best=best[1], beta=best[2], eps_w=best[3],
                      per_w=per_w, empty=best[1] is None)


def paper_lower_formula(model: ModelSpec, alpha: float, w: float, c: float = 1.0) -> float:
    """``(2 K alpha / log alpha)(1 - eps_w/K - c (f'(w) + 1)/log alpha)``; non-rigorous."""
    nl = model.nonlinearity
    L = math.log(alpha)
    return 2.0 * nl.K * alpha / L * (1.0 - float(nl.G(w)) / nl.K - c * (nl.fprime(w) + 1.0) / L)


# ---------------------------------------------------------------------------
# theta*, capacity A, growth hypothesis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaStar:
    theta: float
    below_alpha_gamma: Optional[bool]


def theta_star(model: ModelSpec, alpha: float, c: float, gamma: float = 0.25) -> ThetaStar:
    """Largest root of ``f(theta)/theta = c log alpha``.

    The scan descends from the blow-up cap; tangential (double) roots are
    accepted. ``below_alpha_gamma`` records ``theta* <= alpha^gamma`` for
    ``alpha >= 1e4`` and is ``None`` otherwise.

    Raises
    ------
    NoRoot
        ``f(theta)/theta > c log alpha`` throughout the range.
    """
    if not c > 0:
        raise ValueError("c must be positive")
    nl = model.nonlinearity
    target = c * math.log(alpha)

    def g(t):
        return nl.value(t) / t - target

    try:
        th = largest_root(g, 1e-8, nl.u_max, n_scan=4000, scale="log",
                          tangent_tol=1e-9 * max(1.0, abs(target)))
    except NoSignChange as exc:
        raise NoRoot(str(exc)) from exc
    check = th <= alpha ** gamma if alpha >= 1e4 else None
    return ThetaStar(th, check)


def capacity_A(model: ModelSpec, alpha: float, c: float = 1.0) -> float:
    """Root of ``f'(A) = c log alpha`` by bracketed bisection.

    Raises
    ------
    DerivativeBounded
        ``f'`` stays below the target on the whole search range.
    """
    nl = model.nonlinearity
    target = c * math.log(alpha)

    def g(a):
        return nl.fprime(a) - target

    floor = -1.0 if nl.kind == "power" else -math.inf
    lo = 0.0
    while g(lo) > 0:
        lo = 0.5 * (lo + floor) if math.isfinite(floor) else 2.0 * lo - 1.0
        if lo < -1e6:
            raise NoRoot("f' exceeds the target everywhere")
    hi = 1.0
    while g(hi) < 0:
        hi *= 2.0
        if hi > 1e300:
            raise DerivativeBounded("f' does not reach c log alpha")
    return bracket_root(g, lo, hi, tol=1e-15)


@dataclass(frozen=True)
class HypothesisVerdict:
    t3_hypothesis: str
    proizv_sufficient: str
    witness: Optional[Tuple[float, float, float]]


C1_CANDIDATES = (4.0, 2.0, 8.0, 16.0, 64.0)
C0_CANDIDATES = (1.0 / 3.0, 0.1, 0.5, 0.01)
T0_CANDIDATES = (1.0, 4.0, 16.0)


def _lattice_holds(nl, c1, c0, t0, n):
    t_hi = min(nl.u_max, t0 * 1e6)
    if t_hi <= t0:
        return False
    t = np.geomspace(t0 * (1 + 1e-9), t_hi, n)
    f = nl.value(t)
    fp = nl.fprime(t)
    T1, T2 = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    sel = T2 > T1
    i1, i2 = T1[sel], T2[sel]
    premise = f[i2] >= c1 * f[i1]
    concl = (1.0 - c0) * fp[i2] >= fp[i1] * (1 - 1e-12)
    return bool(np.all(concl[premise]))


def check_t3_hypothesis(model: ModelSpec, n_lattice: int = 160) -> HypothesisVerdict:
    """Check the growth hypothesis of the extremal-solution bound.

    Route (a) searches ``(c1, c0, t0)`` such that ``f(t2) >= c1 f(t1)``
    implies ``(1 - c0) f'(t2) >= f'(t1)`` on a log lattice ``t0 < t1 < t2``.
    Route (b) checks the sufficient condition ``f'' > 0`` and strictly
    increasing on samples; it is ``not-applicable`` for a custom ``f``
    without second-derivative samples.
    """
    nl = model.nonlinearity
    witness = None
    for t0 in T0_CANDIDATES:
        for c1 in C1_CANDIDATES:
            for c0 in C0_CANDIDATES:
                if _lattice_holds(nl, c1, c0, t0, n_lattice):
                    witness = (c1, c0, t0)
                    break
            if witness:
                break
        if witness:
            break
    t3 = "pass" if witness else "fail"
    if nl.kind == "custom" and nl.fpp is None:
        proizv = "not-applicable"
    else:
        t = np.asarray(nl.s, dtype=float) if nl.kind == "custom" else np.geomspace(1e-3, min(nl.u_max, 1e4), 400)
        fpp = np.asarray(nl.fsecond(t), dtype=float)
        proizv = "pass" if (np.all(fpp > 0) and np.all(np.diff(fpp) > 0)) else "fail"
    return HypothesisVerdict(t3, proizv, witness)


# ---------------------------------------------------------------------------
# Exponential case
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpCaseReport:
    alpha: float
    lam_pred: float
    lam_low: float
    lam_high: float
    correction: float
    loglog: float
    u0_low: float
    u0_high: float


def exp_case_report(alpha: float, C: float = 2.0, band: float = 3.0) -> ExpCaseReport:
    """Predicted envelopes for ``f = e^u``.

    ``lambda*`` within ``(2 alpha / log alpha)(1 -+ C / sqrt(log alpha))`` and
    ``u*(0)`` within ``[loglog alpha / band, band * loglog alpha]``.
    """
    L = math.log(alpha)
    base = 2.0 * alpha / L
    corr = C / math.sqrt(L)
    ll = math.log(L)
    return ExpCaseReport(alpha=float(alpha), lam_pred=base, lam_low=base * (1 - corr),
                         lam_high=base * (1 + corr), correction=corr, loglog=ll,
                         u0_low=ll / band, u0_high=band * ll)


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundsReport:
    alpha: float
    lam_ub: float
    h: float
    J1: float
    J2: float
    lam_lb: float
    w_best: Optional[float]
    beta_w: float
    eps_w: float
    lb_empty: bool
    lb_per_w: Dict[float, float]
    theta_star: Optional[float]
    theta_below_alpha_gamma: Optional[bool]
    capacity_a: Optional[float]
    t3_hypothesis: str
    proizv_sufficient: str
    t3_witness: Optional[Tuple[float, float, float]]
    paper_formula_c1: Dict[float, float]

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["lb_per_w"] = {str(k): v for k, v in self.lb_per_w.items()}
        d["paper_formula_c1"] = {str(k): v for k, v in self.paper_formula_c1.items()}
        d["paper_formula_note"] = "non-rigorous: unspecified constant set to 1"
        return d


def bounds_report(model: ModelSpec, alpha: float, grid: Optional[RadialGrid] = None,
                  c: float = 1.0) -> BoundsReport:
    """All bounds and hypothesis verdicts for ``(model, alpha)``."""
    ub = upper_bound(model, alpha)
    lb = heuristic_lower_bound(model, alpha, grid=grid, lam_ub=ub.lam_ub)
    try:
        ts = theta_star(model, alpha, c)
        th, th_ok = ts.theta, ts.below_alpha_gamma
    except NoRoot:
        th, th_ok = None, None
    try:
        A = capacity_A(model, alpha, c)
    except (DerivativeBounded, NoRoot):
        A = None
    hyp = check_t3_hypothesis(model)
    formula = {w: paper_lower_formula(model, alpha, w) for w in default_w_set(alpha)}
    return BoundsReport(alpha=float(alpha), lam_ub=ub.lam_ub, h=ub.h, J1=ub.J1, J2=ub.J2,
                        lam_lb=lb.lam_lb, w_best=lb.w_best, beta_w=lb.beta, eps_w=lb.eps_w,
                        lb_empty=lb.empty, lb_per_w=lb.per_w, theta_star=th,
                        theta_below_alpha_gamma=th_ok, capacity_a=A,
                        t3_hypothesis=hyp.t3_hypothesis, proizv_sufficient=hyp.proizv_sufficient,
                        t3_witness=hyp.witness, paper_formula_c1=formula)
