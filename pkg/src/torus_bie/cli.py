"""Command-line driver.

    torus-bie solve    --config CFG [--out DIR] [--nodes N] [--threads T] [--quiet]
    torus-bie steklov  --config CFG ...
    torus-bie converge --config CFG ...
    torus-bie selftest [--quiet]
    torus-bie examples [--out DIR] [--list]

CFG is a JSON file or the name of a bundled example (``torus-bie examples --list``).
Exit codes: 0 success, 1 a check failed, 2 configuration error, 3 numerical failure.
"""
import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import config as cfgmod
from .exceptions import ConfigurationError, NumericalError
from .fields import contour_points, convergence_study, eval_solution, flux, sample_field, steklov_residuals
from .geometry import build_grid
from .operators import LayerOperators
from .solvers import solve_neumann, solve_steklov

OUT_ENV = "TORUS_BIE_OUT"
DEFAULT_OUT = "torus_bie_out"

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _fmt(x):
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, (int, np.integer, str)) else _fmt(v) for v in row])


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x) if np.isfinite(x) else None
    return x


def write_json(path, obj):
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2) + "\n")


class Run:
    """State shared by the solve, steklov and converge commands."""

    def __init__(self, args, command):
        self.args = args
        self.command = command
        self.cfg, self.base = cfgmod.load_config(args.config)
        if args.nodes is not None:
            self.cfg["nodes_per_hole"] = args.nodes
        self.cfg = cfgmod.with_defaults(self.cfg)
        self.threads = args.threads or self.cfg["threads"]
        self.name = self.cfg.get("name") or Path(args.config).stem
        self.out = self._out_dir()
        self.timings = {}
        self.checks = []

    def _out_dir(self):
        if self.args.out:
            return Path(self.args.out)
        if "output" in self.cfg:
            return self.base / self.cfg["output"]
        return Path(os.environ.get(OUT_ENV) or DEFAULT_OUT) / self.name

    def timed(self, key, fn, *a, **kw):
        t0 = time.perf_counter()
        out = fn(*a, **kw)
        self.timings[key] = self.timings.get(key, 0.0) + time.perf_counter() - t0
        return out

    def check(self, name, value, bound, passed):
        self.checks.append({"name": name, "value": value, "bound": bound, "passed": bool(passed)})

    def log(self, msg):
        if not self.args.quiet:
            print(msg)

    def finish(self, summary):
        self.out.mkdir(parents=True, exist_ok=True)
        echo = dict(self.cfg)
        if "random_holes" in echo:
            echo["generated_holes"] = [cfgmod.hole_to_spec(h) for h in self.holes]
        summary = {
            "version": __version__,
            "command": self.command,
            "name": self.name,
            "problem": self.cfg["problem"],
            **summary,
            "threads": self.threads,
            "timings": self.timings,
            "checks": self.checks,
            "passed": all(c["passed"] for c in self.checks),
            "config": echo,
        }
        write_json(self.out / "summary.json", summary)
        for c in self.checks:
            self.log(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}: {c['value']!r} (bound {c['bound']!r})")
        self.log(f"wrote {self.out}")
        return EXIT_OK if summary["passed"] else EXIT_CHECK


def _write_boundary(run, grid, phi, g):
    rows = [
        (int(grid.hole_index[i]) + 1, grid.t[i], grid.z[i].real, grid.z[i].imag, phi[i], g[i])
        for i in range(grid.n)
    ]
    write_csv(run.out / "boundary.csv", ["hole", "t", "x", "y", "phi", "g"], rows)


def _write_field(run, solution):
    fcfg = run.cfg.get("field", {})
    res = fcfg.get("resolution", 64)
    if not res:
        return
    fg = run.timed("field", sample_field, solution, res, fcfg.get("band"))
    pts, vals, mask = fg.points.ravel(), fg.values.ravel(), fg.mask.ravel()
    rows = [(pts[i].real, pts[i].imag, vals[i], int(mask[i])) for i in range(pts.size)]
    write_csv(run.out / "field.csv", ["x", "y", "value", "mask"], rows)


def _grid_summary(grid):
    return {
        "node_counts": list(grid.counts),
        "total_nodes": grid.n,
        "hole_areas": grid.areas,
        "hole_perimeters": grid.perimeters,
    }


def _sup_error(run, problem, solution, grid, ops):
    tc = run.cfg.get("test_contour")
    if not tc or not problem.has_exact:
        return None
    if tc.get("boundary"):
        if problem.kind != "neumann":
            return None
        u = ops.S.matrix @ solution.phi + solution.constant
        pts = grid.z
    else:
        pts = contour_points([cfgmod.hole_from_spec(h) for h in tc["holes"]], tc.get("points", 200))
        u = run.timed("evaluate", eval_solution, solution, pts)
    diff = u - run.timed("exact", problem.exact, pts)
    if problem.free_constant:
        diff = diff - np.mean(diff)
    return float(np.max(np.abs(diff)))


def cmd_solve(args):
    run = Run(args, "solve")
    if run.cfg["problem"] == "steklov":
        return _steklov(run)
    problem = cfgmod.build_problem(run.cfg, run.base, run.threads)
    run.holes = problem.holes
    n = cfgmod.nodes_of(run.cfg)
    grid = run.timed("grid", problem.grid, n)
    ops = LayerOperators(grid, run.threads)
    g = run.timed("data", problem.data, grid, ops)
    if problem.kind == "dirichlet":
        sol = run.timed("solve", problem.solve, n, ops)
    else:
        sol = run.timed(
            "solve", solve_neumann, grid, g, ops, convention=problem.convention, pin=cfgmod.pin_of(run.cfg)
        )
    fluxes = [flux(sol, grid, j) for j in range(grid.n_holes)]
    err = _sup_error(run, problem, sol, grid, ops)
    exp = run.cfg.get("expected", {})
    tol = exp.get("tol", 1e-9)
    if "fluxes" in exp:
        dev = float(np.max(np.abs(np.array(fluxes) - exp["fluxes"])))
        run.check("flux deviation", dev, tol, dev <= tol)
    if "sup_error_max" in exp and err is not None:
        run.check("sup error", err, exp["sup_error_max"], err <= exp["sup_error_max"])
    run.out.mkdir(parents=True, exist_ok=True)
    _write_boundary(run, grid, sol.phi, g)
    _write_field(run, sol)
    summary = {
        **_grid_summary(grid),
        "condition": sol.condition,
        "fluxes": fluxes,
        "total_flux": float(np.sum(fluxes)),
        "sup_error": err,
    }
    if problem.kind == "dirichlet":
        summary["betas"] = [[b.real, b.imag] for b in sol.betas]
    else:
        summary["constant"] = sol.constant
        summary["convention"] = sol.convention
    return run.finish(summary)


def cmd_steklov(args):
    run = Run(args, "steklov")
    if run.cfg["problem"] != "steklov":
        raise ConfigurationError(f"config error at $.problem: steklov command needs problem 'steklov', got {run.cfg['problem']!r}")
    return _steklov(run)


def _steklov(run):
    torus = cfgmod.build_torus(run.cfg)
    run.holes = cfgmod.build_holes(run.cfg, torus)
    st = run.cfg.get("steklov", {})
    k_max = st.get("k_max", 7)
    scale = st.get("report_scale", 1.0)
    grid = run.timed("grid", build_grid, run.holes, cfgmod.nodes_of(run.cfg), torus)
    ops = LayerOperators(grid, run.threads)
    pairs = run.timed("solve", solve_steklov, grid, k_max, ops)
    residuals = None
    if st.get("residuals", True):
        factor = st.get("residual_factor", 2)
        residuals = run.timed("residuals", steklov_residuals, pairs, grid, factor)
    fluxes = [[flux(p, grid, j) for j in range(grid.n_holes)] for p in pairs]
    mode = min(st.get("mode", 2), len(pairs))
    pair = pairs[mode - 1]

    exp = run.cfg.get("expected", {})
    tol = exp.get("tol", 1e-6)
    if "eigenvalues" in exp:
        ref = np.asarray(exp["eigenvalues"], dtype=float)
        got = scale * np.array([p.sigma for p in pairs[: ref.size]])
        dev = float(np.max(np.abs(got - ref[: got.size])))
        run.check("eigenvalue deviation", dev, tol, dev <= tol and got.size == ref.size)
    for k, (val, ktol) in exp.get("abs_fluxes", {}).items():
        k = int(k)
        if k <= len(pairs):
            a = abs(fluxes[k - 1][0])
            run.check(f"|A_1({k})|", a, [val, ktol], abs(a - val) <= ktol)
    if "residual_max" in exp and residuals is not None:
        r = float(np.max(residuals))
        run.check("max residual", r, exp["residual_max"], r <= exp["residual_max"])

    run.out.mkdir(parents=True, exist_ok=True)
    _write_boundary(run, grid, pair.phi, pair.trace)
    _write_field(run, pair)
    summary = {
        **_grid_summary(grid),
        "k_max": k_max,
        "report_scale": scale,
        "eigenvalues": [scale * p.sigma for p in pairs],
        "raw_eigenvalues": [p.sigma for p in pairs],
        "residuals": residuals,
        "discrete_residuals": [p.residual for p in pairs],
        "fluxes": fluxes,
        "total_flux": [float(np.sum(f)) for f in fluxes],
        "mode": mode,
        "condition": float(np.linalg.cond(ops.S0.matrix)),
    }
    return run.finish(summary)


def cmd_converge(args):
    run = Run(args, "converge")
    conv = run.cfg.get("convergence")
    if conv is None:
        raise ConfigurationError("config error at $.convergence: converge needs a convergence section")
    if run.cfg["problem"] == "steklov":
        raise ConfigurationError("config error at $.problem: converge supports dirichlet and neumann problems")
    problem = cfgmod.build_problem(run.cfg, run.base, run.threads)
    run.holes = problem.holes
    tc = run.cfg.get("test_contour", {})
    if "holes" not in tc:
        raise ConfigurationError("config error at $.test_contour: converge needs test contour holes")
    pts = contour_points([cfgmod.hole_from_spec(h) for h in tc["holes"]], tc.get("points", 200))
    result = run.timed(
        "study", convergence_study, problem, conv["n_values"], pts, conv.get("n_ref"), conv.get("floor", 1e-12)
    )
    run.out.mkdir(parents=True, exist_ok=True)
    write_csv(run.out / "convergence.csv", ["n", "error"], zip(result.n_values, result.errors))
    exp = run.cfg.get("expected", {})
    if "slope_max" in exp:
        run.check("fitted slope", result.slope, exp["slope_max"], result.slope <= exp["slope_max"])
    summary = {
        "n_values": result.n_values,
        "errors": result.errors,
        "slope": result.slope,
        "fit_points": result.fit_points,
        "reference": "exact" if problem.has_exact else f"self-convergence, n_ref={conv.get('n_ref') or 4 * max(result.n_values)}",
    }
    return run.finish(summary)


def cmd_selftest(args):
    from .selftest import run_all

    results = run_all()
    for r in results:
        if not args.quiet or not r.passed:
            print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    failed = sum(not r.passed for r in results)
    if not args.quiet:
        print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_CHECK if failed else EXIT_OK


def cmd_examples(args):
    names = cfgmod.bundled_names()
    if args.list:
        for n in names:
            tags = json.loads(cfgmod.bundled_text(n)).get("tags", [])
            print(n + (f"  [{', '.join(tags)}]" if tags else ""))
        return EXIT_OK
    out = Path(args.out) if args.out else Path(os.environ.get(OUT_ENV) or DEFAULT_OUT) / "configs"
    out.mkdir(parents=True, exist_ok=True)
    for n in names:
        (out / f"{n}.json").write_text(cfgmod.bundled_text(n))
    if not args.quiet:
        print(f"wrote {len(names)} configs to {out}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="torus-bie", description="Laplace problems on tori with holes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="JSON config path or bundled example name")
            p.add_argument("--nodes", type=int, help="override nodes_per_hole")
            p.add_argument("--threads", type=int, help="threads for matrix assembly")
        p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
        p.add_argument("--quiet", action="store_true")

    for name, fn, helptext in (
        ("solve", cmd_solve, "solve the problem described by a config"),
        ("steklov", cmd_steklov, "Steklov eigenpairs for a config"),
        ("converge", cmd_converge, "error against N for a config's convergence section"),
    ):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.set_defaults(func=fn)
    p = sub.add_parser("selftest", help="run built-in property checks")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_selftest)
    p = sub.add_parser("examples", help="write the bundled example configs")
    common(p, config=False)
    p.add_argument("--list", action="store_true", help="list bundled configs instead of writing them")
    p.set_defaults(func=cmd_examples)
    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
