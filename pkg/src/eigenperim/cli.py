"""Command-line front end with deterministic run manifests.

Every command writes ``manifest.json`` (config echo, versions, seed, numeric
results; byte-identical across reruns of the same config) plus a
``timings.json`` sidecar and any requested shape exports.  Defaults can be
loaded from a flat ``key = value`` config file; the output directory falls
back to the EIGENPERIM_OUT environment variable, then ``./runs``.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from . import features, functional, geometry, manifest, norms, optimizer, spectral
from .geometry import SupportVector

__all__ = ["main", "build_parser"]


def _out_dir(args) -> str:
    out = args.out or os.environ.get("EIGENPERIM_OUT", os.path.join(os.curdir, "runs"))
    os.makedirs(out, exist_ok=True)
    return out


def _load_config_defaults(path: str) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SystemExit(f"{path}:{ln}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


class _Timer:
    def __init__(self):
        self.stages = {}

    def stage(self, name):
        timer = self

        class _Ctx:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                timer.stages[name] = time.perf_counter() - self.t0

        return _Ctx()


def _write_manifest(out_dir: str, command: str, config: dict, results: dict,
                    timer: _Timer, seed=None) -> str:
    payload = {
        "command": command,
        "config": config,
        "versions": manifest.versions(),
        "seed": seed,
        "results": results,
    }
    path = os.path.join(out_dir, "manifest.json")
    manifest.write_atomic(path, manifest.to_canonical_json(payload) + "\n")
    manifest.write_atomic(os.path.join(out_dir, "timings.json"),
                          manifest.to_canonical_json(timer.stages) + "\n")
    return path


def _polygon_outputs(out_dir: str, name: str, poly, formats, svg_kwargs=None):
    if "csv" in formats:
        geometry.write_polygon_csv(poly, os.path.join(out_dir, f"{name}.csv"))
    if "svg" in formats:
        manifest.export_svg(poly, os.path.join(out_dir, f"{name}.svg"),
                            **(svg_kwargs or {}))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_eval_norm(args) -> int:
    timer = _Timer()
    norm = norms.build_norm(args.norm)
    points = [tuple(float(t) for t in chunk.split(",")) for chunk in args.at]
    with timer.stage("evaluate"):
        values = [{"x": list(p), "rho": norm(np.asarray(p))} for p in points]
        degen = norms.degenerate_directions(norm, n_angles=args.n_angles, tol=args.tol)
    results = {
        "values": values,
        "degenerate_directions": [
            {"direction": list(d), "gap": g} for d, g in degen
        ],
    }
    out = _out_dir(args)
    _write_manifest(out, "eval-norm", {"norm": args.norm, "at": args.at,
                                       "n_angles": args.n_angles, "tol": args.tol},
                    results, timer)
    for row in values:
        print(f"rho({row['x'][0]:.6g}, {row['x'][1]:.6g}) = {row['rho']:.12g}")
    for row in results["degenerate_directions"]:
        d = row["direction"]
        print(f"degenerate direction ({d[0]:+.9f}, {d[1]:+.9f})  gap {row['gap']:.9g}")
    return 0


def _cmd_wulff(args) -> int:
    timer = _Timer()
    norm = norms.build_norm(args.norm)
    with timer.stage("wulff"):
        shape = norms.wulff_shape(norm, n_directions=args.directions)
    out = _out_dir(args)
    _polygon_outputs(out, "wulff", shape, args.formats)
    results = {
        "n_vertices": shape.n,
        "area": shape.area,
        "euclidean_perimeter": shape.euclidean_perimeter,
        "norm_perimeter": geometry.perimeter(shape, norm),
        "isoperimetric_score": functional.isoperimetric_score(shape, norm),
    }
    path = _write_manifest(out, "wulff", {"norm": args.norm,
                                          "directions": args.directions},
                           results, timer)
    print(f"wulff shape: {shape.n} vertices, area {shape.area:.9g} -> {path}")
    return 0


def _cmd_eigen(args) -> int:
    timer = _Timer()
    poly = geometry.read_polygon_csv(args.shape)
    with timer.stage("eigensolve"):
        lam, err = spectral.eigenvalue_extrapolated(poly, levels=args.levels)
    out = _out_dir(args)
    results = {"lambda": lam, "error_estimate": err, "levels": args.levels,
               "area": poly.area}
    if args.dump_eigenfunction:
        grid = spectral.discretize(poly, geometry.inradius(poly) / 8.0)
        eig = spectral.principal_eigenpair(grid)
        lines = [f"{x:.12g},{y:.12g},{v:.12g}"
                 for (x, y), v in zip(grid.nodes, eig.values)]
        manifest.write_atomic(os.path.join(out, "eigenfunction.csv"),
                              "x,y,value\n" + "\n".join(lines) + "\n")
    _write_manifest(out, "eigen", {"shape": args.shape, "levels": args.levels},
                    results, timer)
    print(f"lambda = {lam:.12g} (error estimate {err:.3g})")
    return 0


def _cmd_functional(args) -> int:
    timer = _Timer()
    poly = geometry.read_polygon_csv(args.shape)
    norm = norms.build_norm(args.norm)
    with timer.stage("evaluate"):
        fv = functional.evaluate(poly, norm, levels=args.levels)
    out = _out_dir(args)
    _write_manifest(out, "functional", {"shape": args.shape, "norm": args.norm,
                                        "levels": args.levels},
                    fv.to_dict(), timer)
    print(f"lambda = {fv.lam:.12g}  perim = {fv.perim:.12g}  "
          f"f = {fv.f:.12g}  t* = {fv.t_star:.12g}  f* = {fv.f_star:.12g}")
    return 0


def _cmd_minimize(args) -> int:
    timer = _Timer()
    norm = norms.build_norm(args.norm)
    cfg = optimizer.OptimizerConfig(
        k_angles=args.k_angles, grid_levels=args.levels, max_iters=args.iters,
        step0=args.step0, tol_f=args.tol_f, n_starts=args.starts, seed=args.seed,
    )
    with timer.stage("minimize"):
        trace = optimizer.minimize_shape(norm, cfg)
    out = _out_dir(args)
    shape = trace.final_shape
    # a facet must exceed the angular sampling scale to be distinguishable
    # from a discretization edge of the support polygon
    facet_tol = max(features.FACET_TOL, 2.2 * math.pi / cfg.k_angles)
    report = features.analyze_shape(norm, shape, facet_tol=facet_tol)
    svg_kwargs = {
        "facets": report.facet_check.facets,
        "corners": report.corner_check.corners,
        "wulff": geometry.center(norms.wulff_shape(norm, max(cfg.k_angles, 64))),
    }
    _polygon_outputs(out, "minimizer", shape, args.formats, svg_kwargs)
    trace_rows = [
        {"f": fv.f, "f_star": fv.f_star, "level": lvl}
        for (_, fv), lvl in zip(trace.iterates, trace.levels)
    ]
    if "json" in args.formats:
        manifest.write_atomic(
            os.path.join(out, "trace.json"),
            manifest.to_canonical_json({
                "start": trace.start_label,
                "status": trace.status,
                "iterates": trace_rows,
                "grad_norms": list(trace.grad_norms),
                "accepted_steps": list(trace.accepted_steps),
            }) + "\n")
    results = {
        "start": trace.start_label,
        "status": trace.status,
        "iterations": len(trace.iterates) - 1,
        "eigensolves": trace.n_eigensolves,
        "functional": trace.final.to_dict(),
        "features": report.to_dict(),
    }
    _write_manifest(out, "minimize", vars(cfg) | {"norm": args.norm}, results,
                    timer, seed=args.seed)
    print(f"minimizer: f* = {trace.final.f_star:.9g} ({trace.status}, "
          f"start {trace.start_label}, {trace.n_eigensolves} eigensolves)")
    return 0


def _cmd_analyze(args) -> int:
    timer = _Timer()
    poly = geometry.read_polygon_csv(args.shape)
    norm = norms.build_norm(args.norm)
    with timer.stage("analyze"):
        report = features.analyze_shape(
            norm, poly, facet_tol=args.facet_tol, corner_tol=args.corner_tol,
            match_tol=args.match_tol)
    out = _out_dir(args)
    _write_manifest(out, "analyze", {"shape": args.shape, "norm": args.norm,
                                     "facet_tol": args.facet_tol,
                                     "corner_tol": args.corner_tol,
                                     "match_tol": args.match_tol},
                    report.to_dict(), timer)
    print(f"facets: {len(report.facet_check.facets)}  "
          f"corners: {len(report.corner_check.corners)}  "
          f"violations: {report.violations}")
    return 0 if report.ok else 1


def _cmd_verify(args) -> int:
    timer = _Timer()
    failures = []
    with timer.stage("minkowski_suite"):
        suite = features.minkowski_suite(args.seed, args.pairs)
        if not suite.ok:
            failures.extend(f"pair {i}: {msg}" for i, msg in suite.failures)

    with timer.stage("gradient_check"):
        grad_results = {}
        rng = np.random.default_rng(args.seed)
        ang = 2.0 * np.pi * np.arange(64) / 64
        sv = SupportVector(np.ones(64) + 0.06 * np.cos(2 * ang) + 0.04 * np.sin(3 * ang))
        for label in ("p:2", "p:1"):
            idx = sorted(rng.choice(64, size=8, replace=False).tolist())
            report = optimizer.gradient_check(norms.build_norm(label), sv, idx, level=4)
            grad_results[label] = report.max_rel_error
            if report.max_rel_error > 0.05:
                failures.append(f"gradient check {label}: {report.max_rel_error:.3g}")

    with timer.stage("scaling"):
        square = geometry.rectangle(1.0, 1.0)
        lam1, _ = spectral.eigenvalue_extrapolated(square, levels=2)
        scaling = {}
        norm = norms.build_norm("p:1")
        for t in (0.5, 2.0, 3.0):
            scaled = geometry.scale_translate(square, t)
            lam_t, _ = spectral.eigenvalue_extrapolated(scaled, levels=2)
            lam_err = abs(lam_t - lam1 / t ** 2) / (lam1 / t ** 2)
            per_err = abs(geometry.perimeter(scaled, norm)
                          - t * geometry.perimeter(square, norm)) / (
                              t * geometry.perimeter(square, norm))
            scaling[f"t={t:g}"] = {"lambda_rel_error": lam_err,
                                   "perimeter_rel_error": per_err}
            if lam_err > 0.002 or per_err > 0.002:
                failures.append(f"scaling violated at t={t}")

    results = {
        "minkowski": {
            "n_pairs": suite.n_pairs,
            "n_passed": suite.n_passed,
            "min_strict_slack": float(suite.strict_slacks.min()),
            "max_perimeter_error": float(suite.perimeter_errors.max()),
            "min_superadditivity_margin": float(suite.superadditivity_margins.min()),
        },
        "gradient_max_rel_error": grad_results,
        "scaling": scaling,
        "failures": failures,
        "ok": not failures,
    }
    out = _out_dir(args)
    _write_manifest(out, "verify", {"pairs": args.pairs, "seed": args.seed},
                    results, timer, seed=args.seed)
    for line in failures:
        print(f"FAIL {line}")
    print(f"verify: {'ok' if not failures else f'{len(failures)} failures'} "
          f"({suite.n_passed}/{suite.n_pairs} pairs)")
    return 0 if not failures else 1


def _parse_grid(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise SystemExit("a-grid must be start:step:stop")
    start, step, stop = (float(p) for p in parts)
    if step <= 0:
        raise SystemExit("a-grid step must be positive")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


def _cmd_reproduce(args) -> int:
    timer = _Timer()
    grid = _parse_grid(args.a_grid)
    checks = () if args.no_solver_check else tuple(
        a for a in (1.0, 2.0) if any(abs(a - g) < 1e-12 for g in grid)
    )
    with timer.stage("rectangles"):
        report = features.counterexample_rectangles(args.n, grid,
                                                    solver_check=checks,
                                                    levels=args.levels)
    out = _out_dir(args)
    results = {
        "n": report.n,
        "rows": report.rows,
        "argmin_a": report.argmin_a,
        "isoperimetric_is_optimal": report.isoperimetric_is_optimal,
        "solver_checks": report.solver_checks,
    }
    _write_manifest(out, "reproduce", {"n": args.n, "a_grid": args.a_grid,
                                       "levels": args.levels},
                    results, timer)
    print(f"{'a':>6} {'lambda':>12} {'half-perim':>11} {'f*':>12}")
    for row in report.rows:
        print(f"{row['a']:6.2f} {row['lambda']:12.5f} {row['half_perim']:11.5f} "
              f"{row['f_star']:12.5f}")
    print(f"argmin a = {report.argmin_a:g} "
          f"({'isoperimetric' if report.isoperimetric_is_optimal else 'NOT the isoperimetric aspect'})")
    for chk in report.solver_checks:
        print(f"solver check a={chk['a']:g}: lambda {chk['lambda_solver']:.5f} "
              f"vs exact {chk['lambda_exact']:.5f} "
              f"(rel err {chk['rel_error']:.2e})")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigenperim",
        description="Minimize eigenvalue-plus-perimeter shape functionals "
                    "over convex planar domains.",
    )
    parser.add_argument("--config", help="flat key = value defaults file")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output directory "
                                     "(default: $EIGENPERIM_OUT or ./runs)")
        p.add_argument("--formats", default="json,csv,svg",
                       type=lambda s: tuple(t for t in s.split(",") if t))

    p = sub.add_parser("eval-norm", help="evaluate a norm and list its kinks")
    p.add_argument("--norm", required=True)
    p.add_argument("--at", action="append", default=[],
                   help="point 'x,y' to evaluate (repeatable)")
    p.add_argument("--n-angles", type=int, default=256)
    p.add_argument("--tol", type=float, default=1e-6)
    common(p)
    p.set_defaults(func=_cmd_eval_norm)

    p = sub.add_parser("wulff", help="emit the isoperimetric optimum polygon")
    p.add_argument("--norm", required=True)
    p.add_argument("--directions", type=int, default=256)
    common(p)
    p.set_defaults(func=_cmd_wulff)

    p = sub.add_parser("eigen", help="extrapolated eigenvalue of a CSV polygon")
    p.add_argument("--shape", required=True)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--dump-eigenfunction", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_eigen)

    p = sub.add_parser("functional", help="evaluate the shape functional")
    p.add_argument("--shape", required=True)
    p.add_argument("--norm", required=True)
    p.add_argument("--levels", type=int, default=3)
    common(p)
    p.set_defaults(func=_cmd_functional)

    p = sub.add_parser("minimize", help="find the minimizing shape")
    p.add_argument("--norm", required=True)
    p.add_argument("--k-angles", type=int, default=64)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--iters", type=int, default=400)
    p.add_argument("--starts", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step0", type=float, default=0.1)
    p.add_argument("--tol-f", type=float, default=1e-5)
    common(p)
    p.set_defaults(func=_cmd_minimize)

    p = sub.add_parser("analyze", help="facet/corner analysis of a shape")
    p.add_argument("--shape", required=True)
    p.add_argument("--norm", required=True)
    p.add_argument("--facet-tol", type=float, default=features.FACET_TOL)
    p.add_argument("--corner-tol", type=float, default=features.CORNER_TOL)
    p.add_argument("--match-tol", type=float, default=features.MATCH_TOL)
    common(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("verify", help="run the property battery")
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--seed", type=int, default=2026)
    common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("reproduce", help="rectangle family vs isoperimetric aspect")
    p.add_argument("--n", type=float, default=3.0)
    p.add_argument("--a-grid", default="0.5:0.25:4")
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--no-solver-check", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_reproduce)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # pull --config out before parsing: its defaults may satisfy required args
    config_path = None
    cleaned = []
    i = 0
    while i < len(argv):
        if argv[i] == "--config" and i + 1 < len(argv):
            config_path = argv[i + 1]
            i += 2
        elif argv[i].startswith("--config="):
            config_path = argv[i].split("=", 1)[1]
            i += 1
        else:
            cleaned.append(argv[i])
            i += 1
    if config_path:
        defaults = _load_config_defaults(config_path)
        sub_actions = [a for a in parser._actions
                       if isinstance(a, argparse._SubParsersAction)]
        command = next((a for a in cleaned if not a.startswith("-")), None)
        if command not in sub_actions[0].choices:
            parser.error("a subcommand is required")
        subparser = sub_actions[0].choices[command]
        actions = {a.dest: a for a in parser._actions + subparser._actions}
        coerced = {}
        for key, value in defaults.items():
            if key not in actions:
                raise SystemExit(f"unknown config key: {key}")
            action = actions[key]
            coerced[key] = action.type(value) if action.type else value
            action.required = False  # the config satisfies it
        subparser.set_defaults(**{k: v for k, v in coerced.items()
                                  if k in {a.dest for a in subparser._actions}})
        parser.set_defaults(**{k: v for k, v in coerced.items()
                               if k not in {a.dest for a in subparser._actions}})
    args = parser.parse_args(cleaned)
    try:
        return args.func(args)
    except (geometry.GeometryError, norms.NormSpecError,
            spectral.SpectralError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
