"""Hot numeric kernels.

Every kernel exists twice: a loop form compiled with ``numba.njit`` and a
pure-numpy form. The public name is bound to one of them at import time
according to :data:`jetignite._accel.USE_JIT`; both forms stay importable
under the ``*_numba`` / ``*_numpy`` suffixes so the benchmark and the
equivalence tests can call them side by side.

Nonlinearities are passed to kernels as a flat code
``(kind, p, xs, ys, ds, q)``: ``kind`` is one of :data:`EXP`, :data:`POWER`,
:data:`CUSTOM`; ``p`` is the power exponent; ``xs, ys, ds`` are Hermite
knots, values and slopes of a custom ``f``; ``q`` is the custom tail exponent.
"""

import math

import numpy as np

from ._accel import USE_JIT, maybe_njit

EXP = 0
POWER = 1
CUSTOM = 2

# picard_run status codes
STOPPED = 0
CAP_CROSSED = 1
MAX_ITER = 2
MONOTONICITY_LOST = 3

MONO_SLACK = 1e-13


# ---------------------------------------------------------------------------
# Tridiagonal solve
# ---------------------------------------------------------------------------

def _thomas_loop(sub, diag, sup, rhs):
    n = diag.shape[0]
    c = np.empty(n)
    x = np.empty(n)
    piv = diag[0]
    min_piv = piv
    if piv == 0.0:
        x[:] = np.nan
        return x, 0.0
    c[0] = sup[0] / piv if n > 1 else 0.0
    x[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - sub[i - 1] * c[i - 1]
        if piv < min_piv:
            min_piv = piv
        if piv == 0.0:
            x[:] = np.nan
            return x, 0.0
        if i < n - 1:
            c[i] = sup[i] / piv
        x[i] = (rhs[i] - sub[i - 1] * x[i - 1]) / piv
    for i in range(n - 2, -1, -1):
        x[i] -= c[i] * x[i + 1]
    return x, min_piv


thomas_numba = maybe_njit(_thomas_loop)


def thomas_numpy(sub, diag, sup, rhs):
    """Forward elimination / back substitution on numpy arrays.

    The recurrence is sequential, so this is the same sweep as the compiled
    kernel executed by the interpreter.
    """
    sub = np.asarray(sub, dtype=float)
    diag = np.asarray(diag, dtype=float)
    sup = np.asarray(sup, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    return _thomas_loop(sub, diag, sup, rhs)


# ---------------------------------------------------------------------------
# Nonlinearity evaluation
# ---------------------------------------------------------------------------

def _hermite_scalar(xs, ys, ds, q, u, deriv):
    n = xs.shape[0]
    if u >= xs[n - 1]:
        base = 1.0 + (u - xs[n - 1]) * ds[n - 1] / (q * ys[n - 1])
        if deriv == 0:
            return ys[n - 1] * base ** q
        return ds[n - 1] * base ** (q - 1.0)
    if u <= xs[0]:
        if deriv == 0:
            return ys[0] + ds[0] * (u - xs[0])
        return ds[0]
    j = np.searchsorted(xs, u, side="right") - 1
    h = xs[j + 1] - xs[j]
    t = (u - xs[j]) / h
    y0 = ys[j]
    y1 = ys[j + 1]
    m0 = ds[j] * h
    m1 = ds[j + 1] * h
    if deriv == 0:
        t2 = t * t
        t3 = t2 * t
        return ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0
                + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1)
    t2 = t * t
    return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0
            + (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) / h


def _f_scalar(kind, p, xs, ys, ds, q, u, deriv):
    if kind == EXP:
        return math.exp(u)
    if kind == POWER:
        if deriv == 0:
            return (1.0 + u) ** p
        return p * (1.0 + u) ** (p - 1.0)
    return _hermite_scalar(xs, ys, ds, q, u, deriv)


_hermite_scalar_jit = maybe_njit(_hermite_scalar)


def _make_f_scalar_jit():
    if _hermite_scalar_jit is None:
        return None
    import numba

    herm = _hermite_scalar_jit

    @numba.njit(cache=True, nogil=True)
    def f_scalar(kind, p, xs, ys, ds, q, u, deriv):
        if kind == 0:
            return math.exp(u)
        if kind == 1:
            if deriv == 0:
                return (1.0 + u) ** p
            return p * (1.0 + u) ** (p - 1.0)
        return herm(xs, ys, ds, q, u, deriv)

    return f_scalar


_f_scalar_jit = _make_f_scalar_jit()


def _f_values_loop(kind, p, xs, ys, ds, q, u, deriv):
    out = np.empty(u.shape[0])
    for i in range(u.shape[0]):
        out[i] = _f_scalar_jit(kind, p, xs, ys, ds, q, u[i], deriv)
    return out


f_values_numba = maybe_njit(_f_values_loop) if _f_scalar_jit is not None else None


def f_values_numpy(kind, p, xs, ys, ds, q, u, deriv):
    u = np.asarray(u, dtype=float)
    with np.errstate(over="ignore"):
        if kind == EXP:
            return np.exp(u)
        if kind == POWER:
            if deriv == 0:
                return (1.0 + u) ** p
            return p * (1.0 + u) ** (p - 1.0)
    out = np.empty_like(u)
    n = xs.shape[0]
    hi = u >= xs[n - 1]
    lo = u <= xs[0]
    mid = ~(hi | lo)
    base = 1.0 + (u[hi] - xs[n - 1]) * ds[n - 1] / (q * ys[n - 1])
    if deriv == 0:
        out[hi] = ys[n - 1] * base ** q
        out[lo] = ys[0] + ds[0] * (u[lo] - xs[0])
    else:
        out[hi] = ds[n - 1] * base ** (q - 1.0)
        out[lo] = ds[0]
    um = u[mid]
    j = np.searchsorted(xs, um, side="right") - 1
    h = xs[j + 1] - xs[j]
    t = (um - xs[j]) / h
    y0, y1 = ys[j], ys[j + 1]
    m0, m1 = ds[j] * h, ds[j + 1] * h
    t2 = t * t
    if deriv == 0:
        t3 = t2 * t
        out[mid] = ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0
                    + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1)
    else:
        out[mid] = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0
                    + (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) / h
    return out


# ---------------------------------------------------------------------------
# Monotone (Picard) iteration
# ---------------------------------------------------------------------------

_thomas_jit = thomas_numba


def _picard_loop(sub, diag, sup, load, v0, omega_mode, omega_const,
                 kind, p, xs, ys, ds, q, stop_tol, u_max, max_iter,
                 extra_after_cap, hist):
    """Run  (A + Omega) v_{n+1} = load * f(v_n) + Omega v_n  from ``v0``.

    ``load`` is the per-row source scale (lambda/alpha * psi). Returns
    ``(status, iterations, v, last_increment)``; center values are written
    into ``hist``.
    """
    n = diag.shape[0]
    v = v0.copy()
    rhs = np.empty(n)
    dshift = np.empty(n)
    status = MAX_ITER
    inc = np.inf
    it = 0
    capped_at = -1
    while it < max_iter:
        omega = omega_const
        if omega_mode == 1:
            omega = 0.0
            for i in range(n):
                fp = load[i] * _f_scalar_jit(kind, p, xs, ys, ds, q, v[i], 1)
                if fp > omega:
                    omega = fp
        for i in range(n):
            rhs[i] = load[i] * _f_scalar_jit(kind, p, xs, ys, ds, q, v[i], 0) + omega * v[i]
            dshift[i] = diag[i] + omega
        vnew, piv = _thomas_jit(sub, dshift, sup, rhs)
        it += 1
        num = 0.0
        den = 0.0
        vmax = 0.0
        finite = True
        mono = True
        for i in range(n):
            if not math.isfinite(vnew[i]):
                finite = False
                break
            d = vnew[i] - v[i]
            if d < -MONO_SLACK * (abs(v[i]) + 1.0):
                mono = False
            if abs(d) > num:
                num = abs(d)
            if abs(vnew[i]) > den:
                den = abs(vnew[i])
            if vnew[i] > vmax:
                vmax = vnew[i]
        if not finite:
            hist[it - 1] = np.inf
            status = CAP_CROSSED
            break
        hist[it - 1] = vnew[0]
        v = vnew
        inc = num / den if den > 0.0 else 0.0
        if not mono:
            status = MONOTONICITY_LOST
            break
        if capped_at >= 0:
            if it - capped_at >= extra_after_cap:
                status = CAP_CROSSED
                break
            continue
        if vmax > u_max:
            capped_at = it
            if extra_after_cap <= 0:
                status = CAP_CROSSED
                break
            continue
        if inc <= stop_tol:
            status = STOPPED
            break
    if capped_at >= 0 and status == MAX_ITER:
        status = CAP_CROSSED
    return status, it, v, inc


def _compile_picard():
    if thomas_numba is None or _f_scalar_jit is None:
        return None
    import numba

    return numba.njit(cache=True, nogil=True)(_picard_loop)


picard_numba = _compile_picard()


def picard_numpy(sub, diag, sup, load, v0, omega_mode, omega_const,
                 kind, p, xs, ys, ds, q, stop_tol, u_max, max_iter,
                 extra_after_cap, hist):
    v = np.array(v0, dtype=float)
    status = MAX_ITER
    inc = np.inf
    it = 0
    capped_at = -1
    while it < max_iter:
        with np.errstate(over="ignore", invalid="ignore"):
            if omega_mode == 1:
                omega = float(np.max(load * f_values_numpy(kind, p, xs, ys, ds, q, v, 1)))
            else:
                omega = omega_const
            rhs = load * f_values_numpy(kind, p, xs, ys, ds, q, v, 0) + omega * v
        vnew, _ = thomas_numpy(sub, diag + omega, sup, rhs)
        it += 1
        if not np.all(np.isfinite(vnew)):
            hist[it - 1] = np.inf
            status = CAP_CROSSED
            break
        d = vnew - v
        mono = bool(np.all(d >= -MONO_SLACK * (np.abs(v) + 1.0)))
        den = np.max(np.abs(vnew))
        inc = float(np.max(np.abs(d)) / den) if den > 0 else 0.0
        hist[it - 1] = vnew[0]
        v = vnew
        if not mono:
            status = MONOTONICITY_LOST
            break
        if capped_at >= 0:
            if it - capped_at >= extra_after_cap:
                status = CAP_CROSSED
                break
            continue
        if np.max(vnew) > u_max:
            capped_at = it
            if extra_after_cap <= 0:
                status = CAP_CROSSED
                break
            continue
        if inc <= stop_tol:
            status = STOPPED
            break
    if capped_at >= 0 and status == MAX_ITER:
        status = CAP_CROSSED
    return status, it, v, inc


# ---------------------------------------------------------------------------
# Sturm sequence count for symmetric tridiagonal matrices
# ---------------------------------------------------------------------------

def _sturm_loop(d, e2, s):
    """Number of eigenvalues of tridiag(e, d, e) strictly below ``s``."""
    n = d.shape[0]
    count = 0
    qv = d[0] - s
    if qv < 0.0:
        count += 1
    for i in range(1, n):
        if qv == 0.0:
            qv = 1e-300
        qv = (d[i] - s) - e2[i - 1] / qv
        if qv < 0.0:
            count += 1
    return count


sturm_count_numba = maybe_njit(_sturm_loop)


def sturm_count_numpy(d, e2, s):
    return _sturm_loop(np.asarray(d, dtype=float), np.asarray(e2, dtype=float), float(s))


# ---------------------------------------------------------------------------
# Public bindings
# ---------------------------------------------------------------------------

# Whole-array f evaluation stays on numpy in both modes: its SIMD exp beats the
# compiled scalar dispatch (see benchmarks/bench_kernels.py). The compiled
# Picard loop uses the scalar version inline.
f_values = f_values_numpy

if USE_JIT and picard_numba is not None:
    thomas = thomas_numba
    picard_run = picard_numba
    sturm_count = sturm_count_numba
else:
    thomas = thomas_numpy
    picard_run = picard_numpy
    sturm_count = sturm_count_numpy
