"""Batch front end: JSON configs in, CSV results and JSON reports out.

Exit codes are part of the contract: 0 success, 1 verification failure,
2 config error, 3 numerical error, 4 method precondition violated.
"""

import argparse
import json
import os
import sys

import numpy as np

from .cauchy import (represent_gc, represent_gc_compact, represent_pc,
                     solve_direct)
from .checks import all_pass, run_suite
from .errors import (NonConvergenceError, PreconditionError, ProblemSpecError,
                     SingularSystemError, ToleranceNotMetError)
from .fundamental import TriangleGrid, solve_F, solve_F_picard
from .gridfn import read_csv
from .problem import CauchyProblem, Coefficient, Forcing, History
from .special import ml_scalar

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_NUMERICS = 3
EXIT_PRECONDITION = 4


def _resolve(path, base_dir):
    return path if os.path.isabs(path) else os.path.join(base_dir, path)


def _load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh), os.path.dirname(os.path.abspath(path))


def _matrix(raw, n):
    arr = np.asarray(raw, dtype=float)
    if arr.shape != (n, n):
        raise ProblemSpecError(f"matrix shape {arr.shape} does not match n={n}")
    return arr


def _vector(raw, n):
    arr = np.asarray(raw, dtype=float)
    if arr.shape != (n,):
        raise ProblemSpecError(f"vector shape {arr.shape} does not match n={n}")
    return arr


def _coefficient(spec, n, base_dir):
    preset = spec.get("preset", "constant")
    if preset == "zero":
        return Coefficient.zero(n)
    if preset == "constant":
        return Coefficient.constant(_matrix(spec["matrix"], n))
    if preset == "rotation":
        if n != 2:
            raise ProblemSpecError("rotation preset is 2x2")
        return Coefficient.rotation(float(spec.get("scale", 1.0)))
    if preset == "cosine":
        return Coefficient.cosine(_matrix(spec["matrix"], n),
                                  float(spec.get("omega", 1.0)))
    if preset == "samples":
        gf = read_csv(_resolve(spec["path"], base_dir), value_shape=(n, n))
        return Coefficient.from_samples(gf)
    raise ProblemSpecError(f"unknown coefficient preset {preset!r}")


def _forcing(spec, n, base_dir):
    preset = spec.get("preset", "constant")
    if preset == "zero":
        return Forcing.zero(n)
    if preset == "constant":
        return Forcing.constant(_vector(spec["vector"], n))
    if preset == "cosine":
        return Forcing.cosine(_vector(spec["vector"], n),
                              float(spec.get("omega", 1.0)))
    if preset == "samples":
        gf = read_csv(_resolve(spec["path"], base_dir), value_shape=(n,))
        return Forcing.from_samples(gf)
    raise ProblemSpecError(f"unknown forcing preset {preset!r}")


def _history(spec, alpha, t0, n, base_dir):
    t_star = float(spec.get("t_star", t0))
    if "w_star_csv" in spec:
        gf = read_csv(_resolve(spec["w_star_csv"], base_dir), value_shape=(n,))
        if gf.b > t_star:
            # a full-run CSV doubles as a history source; keep its prefix
            gf = gf.prefix(t_star)
        caputo = None
        if "caputo_csv" in spec:
            caputo = read_csv(_resolve(spec["caputo_csv"], base_dir),
                              value_shape=(n,))
        return History.from_samples(gf, caputo)
    if "generator" in spec:
        gen = spec["generator"]
        phi = read_csv(_resolve(gen["phi_csv"], base_dir), value_shape=(n,))
        return History.from_generator(alpha, _vector(gen["w0"], n), phi)
    if "w0" in spec:
        if abs(t_star - t0) > 0.0:
            raise ProblemSpecError(
                "a bare start vector requires t_star == t0; "
                "supply w_star_csv or a generator for t_star > t0")
        return History.point(t0, _vector(spec["w0"], n))
    raise ProblemSpecError("history needs one of w0, w_star_csv, generator")


def load_problem(cfg, base_dir):
    """Build (problem, grid_N, tolerances) from a parsed config mapping."""
    alpha = float(cfg["alpha"])
    t0 = float(cfg.get("t0", 0.0))
    theta = float(cfg["theta"])
    n = int(cfg["n"])
    A = _coefficient(cfg.get("A", {"preset": "zero"}), n, base_dir)
    b = _forcing(cfg.get("b", {"preset": "zero"}), n, base_dir)
    history = _history(cfg.get("history", {}), alpha, t0, n, base_dir)
    grid_N = int(cfg.get("grid_N", 512))
    if grid_N < 8:
        raise ProblemSpecError("grid_N must be at least 8")
    tolerances = dict(cfg.get("tolerances", {}))
    problem = CauchyProblem(alpha, t0, theta, A, b, history)
    return problem, grid_N, tolerances


def _write_sidecar(path, payload):
    with open(str(path) + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_fundamental(args):
    cfg, base_dir = _load_config(args.config)
    problem, grid_N, tolerances = load_problem(cfg, base_dir)
    grid = TriangleGrid(problem.t0, problem.theta, grid_N)
    if cfg.get("field_method", "march") == "picard":
        field = solve_F_picard(problem, grid,
                               tol=float(tolerances.get("picard_tol", 1e-10)))
    else:
        field = solve_F(problem, grid)
    field.write_csv(args.out)
    _write_sidecar(args.out, {"alpha": problem.alpha, **field.meta})
    return EXIT_OK


_SOLVERS = {
    "direct": None,
    "repr-pc": represent_pc,
    "repr-gc": represent_gc,
    "repr-gc-compact": represent_gc_compact,
}


def cmd_solve(args):
    cfg, base_dir = _load_config(args.config)
    problem, grid_N, _ = load_problem(cfg, base_dir)
    if args.method == "direct":
        sol = solve_direct(problem, grid_N)
    else:
        grid = TriangleGrid(problem.t0, problem.theta, grid_N)
        field = solve_F(problem, grid)
        sol = _SOLVERS[args.method](problem, field)
    sol.write_csv(args.out)
    _write_sidecar(args.out, sol.sidecar())
    return EXIT_OK


def cmd_verify(args):
    cfg, base_dir = _load_config(args.config)
    problem, grid_N, tolerances = load_problem(cfg, base_dir)
    records = run_suite(problem, grid_N, tolerances)
    ok = all_pass(records)
    report = {"alpha": problem.alpha, "grid_N": grid_N,
              "checks": records, "all_pass": ok}
    with open(args.report, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    failed = [r["name"] for r in records if not r["pass"]]
    if failed:
        print(f"verify: {len(failed)}/{len(records)} checks failed: "
              + ", ".join(failed))
        return EXIT_VERIFY
    print(f"verify: all {len(records)} checks passed")
    return EXIT_OK


def cmd_mlf(args):
    val = ml_scalar(args.alpha, args.z, args.beta)
    print(f"{val:.15g}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="fracfund",
        description="Fundamental matrices and Cauchy problems for linear "
                    "fractional systems of order alpha in (0,1).")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fundamental",
                       help="compute the fundamental matrix field to CSV")
    f.add_argument("--config", required=True)
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_fundamental)

    s = sub.add_parser("solve", help="solve the configured Cauchy problem")
    s.add_argument("--config", required=True)
    s.add_argument("--method", required=True, choices=sorted(_SOLVERS))
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify",
                       help="run the invariant suite, write a JSON report")
    v.add_argument("--config", required=True)
    v.add_argument("--report", required=True)
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("mlf", help="evaluate the two-parameter special "
                                   "function E_{alpha,beta}(z)")
    m.add_argument("--alpha", type=float, required=True)
    m.add_argument("--beta", type=float, default=1.0)
    m.add_argument("--z", type=float, required=True)
    m.set_defaults(func=cmd_mlf)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as err:
        return _fail(EXIT_PRECONDITION, err)
    except (NonConvergenceError, SingularSystemError, ToleranceNotMetError,
            np.linalg.LinAlgError, FloatingPointError, OverflowError) as err:
        return _fail(EXIT_NUMERICS, err)
    except (KeyError, TypeError, ValueError, OSError) as err:
        # covers the domain/spec/grid errors, bad JSON, and missing files
        return _fail(EXIT_CONFIG, err)


def _fail(code, err):
    detail = str(err) or repr(err)
    print(f"fracfund: error: {detail}", file=sys.stderr)
    return code


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
