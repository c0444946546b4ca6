"""Compare the numba kernels against their pure-numpy fallbacks.

Kernels are called directly so both backends run in one process. The
end-to-end comparison runs ``find_lambda_star`` in two subprocesses, one
with ``JETIGNITE_DISABLE_JIT=1``.

Usage::

    python3 benchmarks/bench_kernels.py --sizes 512,4096,32768 --repeat 5
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from jetignite import kernels
from jetignite.discretization import build_grid, operator
from jetignite.model import exp_model

E2E_SNIPPET = (
    "import time;"
    "from jetignite.model import exp_model;"
    "from jetignite.criticality import find_lambda_star;"
    "find_lambda_star(exp_model(), 1e2);"
    "t=time.perf_counter();"
    "[find_lambda_star(exp_model(), a) for a in (1e3, 1e4, 1e5, 1e6)];"
    "print(time.perf_counter()-t)"
)


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def tridiag_case(n, rng):
    sub = -rng.uniform(0.5, 1.0, n - 1)
    sup = -rng.uniform(0.5, 1.0, n - 1)
    diag = 2.5 + rng.uniform(0.0, 0.5, n)
    return sub, diag, sup, rng.standard_normal(n)


def picard_case(alpha, frac=0.9):
    grid = build_grid(exp_model(), alpha, "default")
    op = operator(grid)
    n = grid.N
    # 0.9 of the default-resolution fold ratio keeps the iteration convergent
    lam = frac * 0.88 * 2 * alpha / np.log(alpha)
    load = lam * grid.load_scale * grid.psi[:n]
    return op, load, n


def run_picard(impl, op, load, n):
    hist = np.empty(5001)
    z = np.zeros(1)
    return impl(op.sub, op.diag, op.sup, load, np.zeros(n), 0, 0.0, kernels.EXP, 0.0,
                z, z, z, 0.0, 1e-12, 18.42, 5000, 0, hist)


def e2e(disable):
    env = dict(os.environ)
    if disable:
        env["JETIGNITE_DISABLE_JIT"] = "1"
    else:
        env.pop("JETIGNITE_DISABLE_JIT", None)
    out = subprocess.run([sys.executable, "-c", E2E_SNIPPET], env=env, capture_output=True,
                         text=True, check=True)
    return float(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="512,4096,32768")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--no-e2e", action="store_true", help="skip the subprocess comparison")
    ap.add_argument("--json", default=None, help="write results to this path")
    args = ap.parse_args(argv)
    if kernels.thomas_numba is None:
        print("numba unavailable; nothing to compare", file=sys.stderr)
        return 1

    rng = np.random.default_rng(0)
    rows = []
    for n in [int(s) for s in args.sizes.split(",")]:
        sub, diag, sup, rhs = tridiag_case(n, rng)
        t_nb = best_of(lambda: kernels.thomas_numba(sub, diag, sup, rhs), args.repeat)
        t_np = best_of(lambda: kernels.thomas_numpy(sub, diag, sup, rhs), args.repeat)
        rows.append(("thomas", n, t_nb, t_np))

        e2 = diag[1:] ** 0 * 0.5
        t_nb = best_of(lambda: kernels.sturm_count_numba(diag, e2, 2.0), args.repeat)
        t_np = best_of(lambda: kernels.sturm_count_numpy(diag, e2, 2.0), args.repeat)
        rows.append(("sturm", n, t_nb, t_np))

        u = rng.uniform(0.0, 10.0, n)
        z = np.zeros(1)
        t_nb = best_of(lambda: kernels.f_values_numba(kernels.EXP, 0.0, z, z, z, 0.0, u, 0), args.repeat)
        t_np = best_of(lambda: kernels.f_values_numpy(kernels.EXP, 0.0, z, z, z, 0.0, u, 0), args.repeat)
        rows.append(("f_values", n, t_nb, t_np))

    for alpha in (1e2, 1e4, 1e6):
        op, load, n = picard_case(alpha)
        t_nb = best_of(lambda: run_picard(kernels.picard_numba, op, load, n), args.repeat)
        t_np = best_of(lambda: run_picard(kernels.picard_numpy, op, load, n), max(1, args.repeat // 2))
        rows.append((f"picard(alpha={alpha:.0e})", n, t_nb, t_np))

    print(f"{'kernel':<22}{'N':>8}{'numba [ms]':>14}{'numpy [ms]':>14}{'speedup':>10}")
    for name, n, a, b in rows:
        print(f"{name:<22}{n:>8}{1e3 * a:>14.3f}{1e3 * b:>14.3f}{b / a:>10.1f}")

    result = {"kernels": [dict(kernel=k, n=n, numba_s=a, numpy_s=b) for k, n, a, b in rows]}
    if not args.no_e2e:
        t_nb, t_np = e2e(False), e2e(True)
        print(f"\nfind_lambda_star over alpha in 1e3..1e6: numba {t_nb:.2f} s, numpy {t_np:.2f} s")
        result["end_to_end"] = {"numba_s": t_nb, "numpy_s": t_np}
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(result, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
