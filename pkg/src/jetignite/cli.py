"""Command-line interface.

Exit codes: 0 success, 1 numerical failure, 2 configuration error.
``--model`` accepts a JSON descriptor path or a bundled preset name
(``exp``, ``power2``, ``gaussian_jet``, ``schlichting_jet``).
"""

import argparse
import json
import math
import sys
from importlib import resources
from pathlib import Path

from .errors import ConfigError, JetIgniteError, ModelValidationError

EXIT_OK, EXIT_NUMERICAL, EXIT_CONFIG = 0, 1, 2


def preset_names():
    return sorted(p.name[:-5] for p in resources.files("jetignite").joinpath("presets").iterdir()
                  if p.name.endswith(".json"))


def resolve_model_path(spec):
    """Path of a model file, or of the bundled preset with that name."""
    if spec is None:
        spec = "exp"
    if Path(spec).exists():
        return str(spec)
    if spec in preset_names():
        return str(resources.files("jetignite").joinpath("presets", spec + ".json"))
    raise ConfigError(f"model {spec!r} is neither a file nor a preset ({', '.join(preset_names())})")


def _model(args):
    from .model import load_model

    return load_model(resolve_model_path(args.model))


def _json_default(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(type(o).__name__)


def _strict(o):
    """Replace non-finite floats by ``None`` so the output is strict JSON."""
    if isinstance(o, float):
        return o if math.isfinite(o) else None
    if isinstance(o, dict):
        return {str(k): _strict(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_strict(v) for v in o]
    if hasattr(o, "tolist"):
        return _strict(o.tolist())
    return o


def _grid(model, args):
    from .discretization import build_grid

    grid = build_grid(model, args.alpha, args.resolution)
    if args.grid_out:
        grid.to_csv(args.grid_out)
    return grid


def _emit(obj, out=None):
    text = json.dumps(_strict(obj), indent=2, sort_keys=True, default=_json_default,
                      allow_nan=False)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _alpha_list(text):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad alpha list {text!r}") from exc
    return vals


def cmd_solve(args):
    from .solver import minimal_solution

    model = _model(args)
    grid = _grid(model, args)
    o = minimal_solution(model, args.alpha, args.lam, grid)
    if o.kind != "Converged":
        _emit({"outcome": o.kind, "diagnostics": o.diagnostics})
        return EXIT_NUMERICAL
    p = o.profile
    if args.out:
        p.to_csv(args.out)
    _emit({"outcome": o.kind, "lambda": p.lam, "alpha": p.alpha, "center": p.center,
           "iterations": p.iterations, "picard_iterations": p.picard_iterations,
           "newton_steps": p.newton_steps, "residual": p.residual, "tag": p.tag,
           "profile_csv": args.out})
    return EXIT_OK


def cmd_critical(args):
    from .criticality import CriticalityOptions, extremal_diagnostics, find_lambda_star

    model = _model(args)
    opts = CriticalityOptions(bracket_tol=args.bracket_tol, resolution=args.resolution,
                              second_resolution=args.second_resolution)
    res = find_lambda_star(model, args.alpha, opts, grid=_grid(model, args))
    d = res.to_dict()
    d["extremal"] = extremal_diagnostics(res)
    if not args.verbose:
        d.pop("log")
    _emit(d, args.out)
    return EXIT_OK


def cmd_stability(args):
    from .solver import minimal_solution
    from .stability import principal_eigenvalue

    model = _model(args)
    grid = _grid(model, args)
    o = minimal_solution(model, args.alpha, args.lam, grid)
    if o.kind != "Converged":
        _emit({"outcome": o.kind, "diagnostics": o.diagnostics})
        return EXIT_NUMERICAL
    e = principal_eigenvalue(o.profile)
    _emit({"lambda": args.lam, "alpha": args.alpha, "kappa1": e.kappa1, "verdict": e.verdict,
           "tol_eig": e.tol_eig, "residual": e.residual})
    return EXIT_OK


def cmd_bounds(args):
    from .bounds import bounds_report

    model = _model(args)
    grid = _grid(model, args)
    _emit(bounds_report(model, args.alpha, grid=grid).to_dict(), args.out)
    return EXIT_OK


def cmd_certify(args):
    from .bounds import subsolution_certificate

    model = _model(args)
    grid = _grid(model, args)
    c = subsolution_certificate(model, args.alpha, args.lam, args.w, grid, reverify=True)
    if args.out:
        c.to_csv(args.out)
    _emit({"passed": c.passed, "lambda": c.lam, "w": c.w, "beta": c.beta, "eps_w": c.eps_w,
           "margin": c.margin, "conditions": c.conditions,
           "reason": c.reason, "witness_csv": args.out})
    return EXIT_OK


def cmd_sweep(args):
    from .harness import SweepConfig, emit, evaluate_verdicts, run_sweep

    if args.config:
        try:
            d = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read sweep config {args.config}: {exc}") from exc
        if not isinstance(d, dict):
            raise ConfigError("sweep config must be a JSON object")
    else:
        d = {}
    if args.alphas is not None:
        d["alphas"] = args.alphas
    if args.model is not None or "model_path" not in d:
        d["model_path"] = resolve_model_path(args.model)
    else:
        d["model_path"] = resolve_model_path(d["model_path"])
    if args.resolution is not None:
        d["resolutions"] = [args.resolution] + ([args.second_resolution] if args.second_resolution else [])
    if args.bracket_tol is not None:
        d["bracket_tol"] = args.bracket_tol
    if args.jobs is not None:
        d["jobs"] = args.jobs
    if args.out is not None:
        d["out_dir"] = args.out
    cfg = SweepConfig.from_dict(d)
    cfg.load_model()
    table = run_sweep(cfg)
    paths = emit(table, cfg, fmt=args.format)
    verdicts = evaluate_verdicts(table)
    _emit({"verdicts": verdicts, "files": {k: str(v) for k, v in paths.items()}})
    return EXIT_NUMERICAL if "failed_rows" in verdicts else EXIT_OK


def cmd_selfcheck(args):
    from .selfcheck import run_selfcheck

    results = run_selfcheck()
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_NUMERICAL


def build_parser():
    ap = argparse.ArgumentParser(prog="jetignite",
                                 description="Critical loads of the advective Gelfand problem")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, alpha=True, lam=False, res_default="default"):
        p.add_argument("--model", default=None, help="model JSON path or preset name (default: exp)")
        if alpha:
            p.add_argument("--alpha", type=float, required=True, help="advection parameter")
        if lam:
            p.add_argument("--lambda", dest="lam", type=float, required=True, help="load")
        p.add_argument("--resolution", default=res_default, choices=["coarse", "default", "fine"])
        p.add_argument("--out", default=None, help="output path")
        p.add_argument("--grid-out", default=None, help="write the mesh (y, log_w, psi, phi) as CSV")

    p = sub.add_parser("solve", help="minimal solution at one load")
    common(p, lam=True)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("critical", help="bracket lambda*")
    common(p)
    p.add_argument("--bracket-tol", type=float, default=1e-3)
    p.add_argument("--second-resolution", default=None, choices=["coarse", "default", "fine"])
    p.add_argument("--verbose", action="store_true", help="include the bisection log")
    p.set_defaults(fn=cmd_critical)

    p = sub.add_parser("stability", help="principal eigenvalue at one load")
    common(p, lam=True)
    p.set_defaults(fn=cmd_stability)

    p = sub.add_parser("bounds", help="upper and lower bounds report")
    common(p)
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("certify", help="sub-solution certificate at (lambda, w)")
    common(p, lam=True)
    p.add_argument("--w", type=float, required=True)
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("sweep", help="alpha sweep with verdict table")
    p.add_argument("--model", default=None)
    p.add_argument("--config", default=None, help="sweep config JSON")
    p.add_argument("--alphas", type=_alpha_list, default=None, help="comma-separated alphas")
    p.add_argument("--resolution", default=None, choices=["coarse", "default", "fine"])
    p.add_argument("--second-resolution", default=None, choices=["coarse", "default", "fine"])
    p.add_argument("--bracket-tol", type=float, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("selfcheck", help="fast invariant checks")
    p.set_defaults(fn=cmd_selfcheck)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ModelValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except JetIgniteError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
