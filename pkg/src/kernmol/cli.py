"""Command-line front end.

Selects a benchmark, runs the adaptive solver, and writes the results:

* ``levels.csv``            one row per time level
                            (t, n_fin, refine_iters, rmse, cond, cpu_seconds)
* ``solution_t<idx>.csv``   solution snapshot per level (x, u_hat[, u_exact]);
                            <idx> is the level's row index in levels.csv
* ``report.json``           the full run report including a config echo

Exit codes: 0 success, 1 solver failure (partial outputs are still written),
2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

from .driver import AdaptiveConfig, RunReport, solve_adaptive
from .dae import IntegratorConfig
from .errors import AdaptiveSolveError
from .problems import BENCHMARKS, allen_cahn
from .refine import RefineConfig

# per-problem defaults: tau, eps0, n_init, m_levels
_DEFAULTS = {
    "burgers-shock": dict(tau=1e-4, eps0=0.75, n_init=13, m_levels=51),
    "burgers-front": dict(tau=1e-3, eps0=0.75, n_init=13, m_levels=50),
    "allen-cahn": dict(tau=5e-2, eps0=3.0, n_init=13, m_levels=34),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="kernmol",
        description="Adaptive kernel-collocation method-of-lines solver for 1D "
                    "time-dependent boundary value problems.",
    )
    p.add_argument("--problem", required=True, choices=sorted(BENCHMARKS))
    p.add_argument("--tau", type=float, default=None,
                   help="refinement threshold (problem-specific default)")
    p.add_argument("--eps0", type=float, default=None, help="base shape parameter")
    p.add_argument("--n-init", type=int, default=None, help="initial point count")
    p.add_argument("--m-levels", type=int, default=None, help="number of time levels")
    p.add_argument("--nu", type=float, default=None, help="override viscosity")
    p.add_argument("--t-final", type=float, default=None, help="override final time")
    p.add_argument("--method", choices=["bdf1", "bdf2"], default="bdf2")
    p.add_argument("--rel-tol", type=float, default=None, help="integrator rel. tolerance")
    p.add_argument("--abs-tol", type=float, default=None, help="integrator abs. tolerance")
    p.add_argument("--max-refine-iters", type=int, default=20)
    p.add_argument("--max-points", type=int, default=1000)
    p.add_argument("--no-restart", action="store_true",
                   help="insertion-only refinement (do not restart from the base grid "
                        "at each level)")
    p.add_argument("--literal-allen-cahn-sign", action="store_true",
                   help="use the u(1+u^2) reaction term (blows up; diagnostic)")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--format", default="csv,json",
                   help="comma list from {csv,json}")
    p.add_argument("--sweep-tau", default=None,
                   help="comma list of thresholds; runs one report per value "
                        "in subdirectories of --out")
    return p


def _config_error(msg: str) -> int:
    print(f"kernmol: error: {msg}", file=sys.stderr)
    return 2


def _build_problem(args):
    kwargs = {}
    if args.nu is not None:
        kwargs["nu"] = args.nu
    if args.t_final is not None:
        kwargs["t_final"] = args.t_final
    if args.problem == "allen-cahn":
        return allen_cahn(unstable_reaction_sign=args.literal_allen_cahn_sign, **kwargs)
    return BENCHMARKS[args.problem](**kwargs)


def _build_config(args, tau: float) -> AdaptiveConfig:
    d = _DEFAULTS[args.problem]
    integ_kwargs = {"method": args.method}
    if args.rel_tol is not None:
        integ_kwargs["rel_tol"] = args.rel_tol
    if args.abs_tol is not None:
        integ_kwargs["abs_tol"] = args.abs_tol
    return AdaptiveConfig(
        m_levels=args.m_levels if args.m_levels is not None else d["m_levels"],
        eps0=args.eps0 if args.eps0 is not None else d["eps0"],
        refine=RefineConfig(tau=tau, max_iters=args.max_refine_iters,
                            max_points=args.max_points),
        n_init=args.n_init if args.n_init is not None else d["n_init"],
        integ=IntegratorConfig(**integ_kwargs),
        restart_from_base=not args.no_restart,
    )


def _fmt(v) -> str:
    if v is None:
        return ""
    return f"{v:.7e}"


def write_outputs(report: RunReport, out_dir: Path, formats: set[str],
                  extra_config: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    if "csv" in formats:
        with open(out_dir / "levels.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "n_fin", "refine_iters", "rmse", "cond", "cpu_seconds"])
            for rec in report.levels:
                w.writerow([_fmt(rec.t), rec.n_fin, rec.refine_iters,
                            _fmt(rec.rmse), _fmt(rec.cond), _fmt(rec.cpu_seconds)])
        for idx, rec in enumerate(report.levels):
            with open(out_dir / f"solution_t{idx}.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                has_exact = extra_config.get("has_exact", False)
                w.writerow(["x", "u_hat", "u_exact"] if has_exact else ["x", "u_hat"])
                exact = extra_config.get("exact")
                for i, x in enumerate(rec.points):
                    row = [_fmt(x), _fmt(rec.values[i])]
                    if has_exact:
                        row.append(_fmt(float(exact(x, rec.t))))
                    w.writerow(row)
    if "json" in formats:
        cfg = dataclasses.asdict(report.config)
        cfg["integ"]["max_step"] = (None if cfg["integ"]["max_step"] == float("inf")
                                    else cfg["integ"]["max_step"])
        payload = {
            "problem": report.problem_name,
            "status": report.status,
            "config": {**cfg, **{k: v for k, v in extra_config.items()
                                 if k not in ("exact", "has_exact")}},
            "levels": [
                {
                    "t": rec.t, "n_fin": rec.n_fin, "refine_iters": rec.refine_iters,
                    "rmse": rec.rmse, "cond": rec.cond,
                    "cpu_seconds": rec.cpu_seconds,
                    "refine_status": rec.refine_status,
                    "points": rec.points.tolist(),
                    "values": rec.values.tolist(),
                }
                for rec in report.levels
            ],
        }
        with open(out_dir / "report.json", "w") as fh:
            json.dump(payload, fh, indent=1)


def print_summary(report: RunReport) -> None:
    print(f"problem: {report.problem_name}   status: {report.status}")
    print(f"{'t':>10} {'N_fin':>6} {'iters':>6} {'RMSE(t)':>12} {'CN(t)':>12} {'CPU(t)':>9}")
    for rec in report.levels:
        rmse = f"{rec.rmse:.2e}" if rec.rmse is not None else "-"
        print(f"{rec.t:>10.4f} {rec.n_fin:>6d} {rec.refine_iters:>6d} "
              f"{rmse:>12} {rec.cond:>12.2e} {rec.cpu_seconds:>9.3f}")


def _run_single(args, tau: float, out_dir: Path, formats: set[str]) -> int:
    try:
        problem = _build_problem(args)
        cfg = _build_config(args, tau)
    except ValueError as err:
        return _config_error(str(err))
    extra = {
        "problem_options": {
            "nu": problem.nu, "t0": problem.t0, "t_final": problem.t_final,
            "literal_allen_cahn_sign": bool(args.literal_allen_cahn_sign),
        },
        "has_exact": problem.exact is not None,
        "exact": problem.exact,
    }
    try:
        report = solve_adaptive(problem, cfg)
    except AdaptiveSolveError as err:
        report = err.partial_report
        write_outputs(report, out_dir, formats, extra)
        print_summary(report)
        print(f"kernmol: solver failed: {err}", file=sys.stderr)
        return 1
    write_outputs(report, out_dir, formats, extra)
    print_summary(report)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    formats = {f.strip() for f in args.format.split(",") if f.strip()}
    if not formats or not formats.issubset({"csv", "json"}):
        return _config_error(f"--format must be a comma list from {{csv,json}}, "
                             f"got {args.format!r}")
    if args.literal_allen_cahn_sign and args.problem != "allen-cahn":
        return _config_error("--literal-allen-cahn-sign only applies to allen-cahn")

    if args.sweep_tau is not None:
        try:
            taus = [float(tok) for tok in args.sweep_tau.split(",") if tok.strip()]
        except ValueError:
            return _config_error(f"could not parse --sweep-tau {args.sweep_tau!r}")
        if not taus or any(t <= 0 for t in taus):
            return _config_error("--sweep-tau values must be positive")
    else:
        tau = args.tau if args.tau is not None else _DEFAULTS[args.problem]["tau"]
        if tau <= 0:
            return _config_error(f"tau must be positive, got {tau}")
        taus = None

    for name, value in (("eps0", args.eps0), ("nu", args.nu),
                        ("rel-tol", args.rel_tol), ("abs-tol", args.abs_tol)):
        if value is not None and value <= 0:
            return _config_error(f"--{name} must be positive, got {value}")
    if args.n_init is not None and args.n_init < 3:
        return _config_error("--n-init must be >= 3")
    if args.m_levels is not None and args.m_levels < 1:
        return _config_error("--m-levels must be >= 1")

    out_root = Path(args.out)
    if taus is None:
        return _run_single(args, tau, out_root, formats)

    worst = 0
    for t in taus:
        sub = out_root / f"tau_{t:.0e}"
        print(f"=== tau = {t:g} -> {sub}")
        worst = max(worst, _run_single(args, t, sub, formats))
    return worst


if __name__ == "__main__":
    sys.exit(main())
