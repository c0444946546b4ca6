"""Quadrature, root finding and tridiagonal solves shared by all modules."""

from dataclasses import dataclass
from typing import Callable, Optional, Tuple
import math
import warnings

import numpy as np
from scipy import integrate as _spi
from scipy import optimize as _spo

from . import kernels
from .errors import NoSignChange, NonFiniteSample, SingularPivot, ToleranceNotMet


@dataclass(frozen=True)
class QuadratureRequest:
    """Description of a one-dimensional integral.

    Parameters
    ----------
    integrand : callable
        Scalar map ``x -> float``.
    lo, hi : float
        Limits; either may be infinite.
    abs_tol, rel_tol : float
        Target accuracy, both positive.
    max_depth : int
        Maximum number of adaptive subintervals.
    points : tuple of float, optional
        Interior break points (kinks) to hand to the adaptive rule.
    """

    integrand: Callable[[float], float]
    lo: float
    hi: float
    abs_tol: float = 1e-12
    rel_tol: float = 1e-11
    max_depth: int = 200
    points: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")


def integrate(req: QuadratureRequest) -> Tuple[float, float]:
    """Adaptive Gauss-Kronrod quadrature.

    Returns
    -------
    value, error_estimate : float

    Raises
    ------
    NonFiniteSample
        The integrand returned inf or nan at a sample point.
    ToleranceNotMet
        The error estimate exceeds ``max(abs_tol, rel_tol*|value|)``.
    """
    if req.lo == req.hi:
        return 0.0, 0.0

    def guarded(x):
        val = req.integrand(x)
        if not math.isfinite(val):
            raise NonFiniteSample(f"integrand is not finite at x={x!r}")
        return val

    kwargs = dict(epsabs=req.abs_tol, epsrel=req.rel_tol, limit=req.max_depth,
                  full_output=1)
    if req.points is not None and math.isfinite(req.lo) and math.isfinite(req.hi):
        kwargs["points"] = req.points
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _spi.IntegrationWarning)
        out = _spi.quad(guarded, req.lo, req.hi, **kwargs)
    value, err = float(out[0]), float(out[1])
    if not math.isfinite(value):
        raise NonFiniteSample("quadrature produced a non-finite value")
    if err > max(req.abs_tol, req.rel_tol * abs(value)):
        raise ToleranceNotMet(
            f"error estimate {err:.3e} above tolerance for value {value:.6e}")
    return value, err


def quad(fn, lo, hi, abs_tol=1e-12, rel_tol=1e-11, max_depth=200, points=None) -> float:
    """Shorthand for :func:`integrate` returning only the value."""
    return integrate(QuadratureRequest(fn, lo, hi, abs_tol, rel_tol, max_depth,
                                       tuple(points) if points is not None else None))[0]


def bracket_root(g, lo: float, hi: float, tol: float = 1e-13, max_iter: int = 200) -> float:
    """Root of ``g`` on ``[lo, hi]`` given a sign change.

    Raises
    ------
    NoSignChange
        ``g(lo)`` and ``g(hi)`` have the same strict sign, including the
        tangential case ``g(x) = x**2`` on ``[-1, 1]``.
    """
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return float(lo)
    if ghi == 0.0:
        return float(hi)
    if not (math.isfinite(glo) and math.isfinite(ghi)):
        raise NoSignChange(f"non-finite endpoint values {glo!r}, {ghi!r}")
    if glo * ghi > 0:
        raise NoSignChange(f"g({lo})={glo:.3e} and g({hi})={ghi:.3e} share a sign")
    return float(_spo.brentq(g, lo, hi, xtol=tol * 1e-3, rtol=max(tol, 4 * np.finfo(float).eps),
                             maxiter=max_iter))


def largest_root(g, lo: float, hi: float, n_scan: int = 2000, scale: str = "linear",
                 tangent_tol: float = 1e-10) -> float:
    """Largest root of ``g`` on ``[lo, hi]``.

    A descending scan locates the right-most sign change, which is then
    refined by :func:`bracket_root`. When no sign change exists the scan
    minimum of ``|g|`` is polished by bounded minimisation, and accepted as a
    double root if ``|g|`` there is below ``tangent_tol``.
    """
    if scale == "log":
        xs = np.geomspace(lo, hi, n_scan)
    else:
        xs = np.linspace(lo, hi, n_scan)
    vals = np.array([g(x) for x in xs])
    for k in range(n_scan - 1, 0, -1):
        a, b = vals[k - 1], vals[k]
        if b == 0.0:
            return float(xs[k])
        if np.isfinite(a) and np.isfinite(b) and a * b < 0:
            return bracket_root(g, xs[k - 1], xs[k])
    finite = np.isfinite(vals)
    if not finite.any():
        raise NoSignChange("function not finite on scan")
    k = int(np.nanargmin(np.where(finite, np.abs(vals), np.inf)))
    sgn = 1.0 if vals[k] >= 0 else -1.0
    a = xs[max(k - 1, 0)]
    b = xs[min(k + 1, n_scan - 1)]
    res = _spo.minimize_scalar(lambda x: sgn * g(x), bounds=(a, b), method="bounded",
                               options={"xatol": 1e-12 * max(1.0, abs(xs[k]))})
    x = float(res.x)
    if abs(g(x)) <= tangent_tol:
        return x
    raise NoSignChange(f"no root on [{lo}, {hi}]; min |g| = {abs(g(x)):.3e}")


@dataclass(frozen=True)
class TridiagonalSystem:
    """``sub[i] = A[i+1, i]``, ``sup[i] = A[i, i+1]``."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        if n < 2:
            raise ValueError("tridiagonal system needs n >= 2")
        if len(self.sub) != n - 1 or len(self.sup) != n - 1 or len(self.rhs) != n:
            raise ValueError("inconsistent tridiagonal band lengths")


def solve_tridiagonal(sys: TridiagonalSystem) -> np.ndarray:
    """Thomas algorithm without pivoting.

    Raises
    ------
    SingularPivot
        An exact zero pivot or a non-finite result.
    """
    x, _ = solve_banded3(sys.sub, sys.diag, sys.sup, sys.rhs)
    return x


def solve_banded3(sub, diag, sup, rhs) -> Tuple[np.ndarray, float]:
    """Array-level Thomas solve returning ``(x, min_pivot)``."""
    x, piv = kernels.thomas(np.ascontiguousarray(sub, dtype=float),
                            np.ascontiguousarray(diag, dtype=float),
                            np.ascontiguousarray(sup, dtype=float),
                            np.ascontiguousarray(rhs, dtype=float))
    if piv == 0.0 or not np.all(np.isfinite(x)):
        raise SingularPivot("zero pivot in tridiagonal elimination")
    return x, float(piv)


def tridiag_matvec(sub, diag, sup, x) -> np.ndarray:
    """Product of a tridiagonal matrix with ``x``."""
    y = diag * x
    y[:-1] += sup * x[1:]
    y[1:] += sub * x[:-1]
    return y


def sturm_count(d, e, s) -> int:
    """Number of eigenvalues of the symmetric tridiagonal ``(d, e)`` below ``s``."""
    d = np.ascontiguousarray(d, dtype=float)
    e2 = np.ascontiguousarray(np.asarray(e, dtype=float) ** 2)
    return int(kernels.sturm_count(d, e2, float(s)))


def smallest_eigenvalues(d, e, k: int = 1, rtol: float = 1e-14) -> np.ndarray:
    """The ``k`` smallest eigenvalues of a symmetric tridiagonal matrix.

    Each eigenvalue is isolated by bisection on the Sturm count, starting
    from the Gershgorin interval.
    """
    d = np.ascontiguousarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    e2 = np.ascontiguousarray(e ** 2)
    ae = np.abs(e)
    rad = np.zeros_like(d)
    rad[:-1] += ae
    rad[1:] += ae
    lo0 = float(np.min(d - rad))
    hi0 = float(np.max(d + rad))
    out = np.empty(k)
    for j in range(k):
        lo, hi = lo0, hi0
        while hi - lo > rtol * max(abs(lo), abs(hi), 1e-300):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if kernels.sturm_count(d, e2, mid) >= j + 1:
                hi = mid
            else:
                lo = mid
        out[j] = 0.5 * (lo + hi)
        lo0 = lo
    return out
