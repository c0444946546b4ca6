import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jetignite import kernels
from jetignite.discretization import build_grid, operator
from jetignite.model import NonlinearitySpec, exp_model, power_model

import oracles

needs_numba = pytest.mark.skipif(kernels.thomas_numba is None, reason="numba unavailable")


def _custom():
    s = np.linspace(0.0, 4.0, 9)
    return NonlinearitySpec("custom", s=tuple(s), f=tuple(np.exp(s)), fp=tuple(np.exp(s)),
                            tail_exponent=3.0)


@needs_numba
@settings(max_examples=60, deadline=None)
@given(st.integers(2, 300), st.integers(0, 2 ** 31 - 1))
def test_thomas_backends_agree_with_dense(n, seed):
    rng = np.random.default_rng(seed)
    sub = -rng.uniform(0, 1, n - 1)
    sup = -rng.uniform(0, 1, n - 1)
    diag = 2.0 + rng.uniform(0, 1, n)
    rhs = rng.standard_normal(n)
    x_nb, p_nb = kernels.thomas_numba(sub, diag, sup, rhs)
    x_np, p_np = kernels.thomas_numpy(sub, diag, sup, rhs)
    assert np.array_equal(x_nb, x_np) and p_nb == p_np
    ref = oracles.dense_tridiagonal_solve(sub, diag, sup, rhs)
    assert np.allclose(x_nb, ref, rtol=1e-12, atol=1e-12)


def test_thomas_zero_pivot_flags():
    x, piv = kernels.thomas_numpy(np.array([1.0]), np.array([1.0, 1.0]), np.array([1.0]),
                                  np.ones(2))
    assert piv == 0.0 and np.all(np.isnan(x))


@needs_numba
@pytest.mark.parametrize("nl", [NonlinearitySpec.exponential(), NonlinearitySpec.power(2.5), _custom()],
                         ids=["exp", "power", "custom"])
@pytest.mark.parametrize("deriv", [0, 1])
def test_f_values_backends_agree(nl, deriv):
    u = np.concatenate([np.linspace(0.0, 6.0, 301), [-0.5, 12.0]])
    a = kernels.f_values_numba(*nl.code(), u, deriv)
    b = kernels.f_values_numpy(*nl.code(), u, deriv)
    assert np.allclose(a, b, rtol=1e-14, atol=0)


def test_custom_hermite_reproduces_knots():
    nl = _custom()
    assert np.allclose(nl.value(np.array(nl.s)), nl.f, rtol=1e-15)
    assert np.allclose(nl.fprime(np.array(nl.s)), nl.fp, rtol=1e-15)


def _picard_args(alpha, lam, model):
    grid = build_grid(model, alpha, "default")
    op = operator(grid)
    n = grid.N
    load = lam * grid.load_scale * grid.psi[:n]
    nl = model.nonlinearity
    return (op.sub, op.diag, op.sup, load, np.zeros(n), 0, 0.0, *nl.code(), 1e-12,
            nl.u_max, 5000, 3, np.empty(5001))


@needs_numba
@pytest.mark.parametrize("alpha,lam", [(0.0, 1.0), (1e4, 1500.0), (1e4, 5000.0)])
def test_picard_backends_agree(alpha, lam):
    args_nb = _picard_args(alpha, lam, exp_model())
    args_np = _picard_args(alpha, lam, exp_model())
    st_nb, it_nb, v_nb, inc_nb = kernels.picard_numba(*args_nb)
    st_np, it_np, v_np, inc_np = kernels.picard_numpy(*args_np)
    assert st_nb == st_np and it_nb == it_np
    finite = np.isfinite(v_np)
    assert np.allclose(v_nb[finite], v_np[finite], rtol=1e-12, atol=1e-14)


def test_picard_iterates_are_monotone():
    args = _picard_args(1e3, 200.0, power_model(2))
    status, its, v, _ = kernels.picard_numpy(*args)
    hist = args[-1][:its]
    assert status == kernels.STOPPED
    assert np.all(np.diff(hist) >= -kernels.MONO_SLACK)


@needs_numba
def test_sturm_backends_agree():
    rng = np.random.default_rng(3)
    d = rng.uniform(-2, 2, 500)
    e2 = rng.uniform(0, 1, 499)
    for s in (-3.0, -0.5, 0.0, 0.7, 3.0):
        assert kernels.sturm_count_numba(d, e2, s) == kernels.sturm_count_numpy(d, e2, s)


def _backend_in_subprocess(flag):
    env = dict(os.environ)
    env.pop("JETIGNITE_DISABLE_JIT", None)
    if flag is not None:
        env["JETIGNITE_DISABLE_JIT"] = flag
    out = subprocess.run([sys.executable, "-c",
                          "from jetignite import kernels, _accel;"
                          "print(_accel.backend_name(), kernels.thomas is kernels.thomas_numpy)"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.split()


def test_env_flag_selects_numpy_fallback():
    assert _backend_in_subprocess("1") == ["numpy", "True"]


@needs_numba
def test_default_backend_is_numba():
    assert _backend_in_subprocess(None) == ["numba", "False"]
