"""Command-line driver: ``lichlab <command> --config run.json --out dir``.

Exit codes: 0 success, 2 hypothesis failure, 3 numerical failure,
4 configuration error.  Reports are written before a nonzero exit.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import asymptotic as asy
from .config import BUNDLED, ConfigError, RunConfig, canonical_json
from .fields import ExpressionError
from .model import GeometryError, green_kernel, volume_growth_check

EXIT_OK, EXIT_HYPOTHESIS, EXIT_NUMERICAL, EXIT_CONFIG = 0, 2, 3, 4
COMMANDS = ("model", "spectrum", "solve", "maximal", "bounds", "oscillate", "barrier",
            "compare", "hypotheses", "plot", "demo")


class HypothesisFailure(RuntimeError):
    """A predicate failed; the report has been written."""


# --------------------------------------------------------------------------
# output helpers


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "as_dict"):
        return jsonable(obj.as_dict())
    return str(obj)


def write_json(path: Path, payload: dict) -> None:
    path.write_text(canonical_json(jsonable(payload)), encoding="utf-8")


def write_csv(path: Path, header, columns) -> None:
    cols = [np.asarray(c, dtype=float) for c in columns]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([format(float(x), ".17g") for x in row])


def tolerances() -> dict:
    from . import bounds, nonlinearity, solver

    return {
        "solver_residual": solver.RESIDUAL_TOL, "solver_step": solver.STEP_TOL,
        "compare": solver.COMPARE_TOL, "barrier_certificate": nonlinearity.BARRIER_TOL,
        "bound_check": bounds.BOUND_TOL, "ode_rtol": asy.ODE_RTOL, "ode_atol": asy.ODE_ATOL,
        "zero_xtol": asy.ZERO_XTOL, "envelope_residual": asy.BARRIER_TOL,
    }


class Run:
    def __init__(self, command: str, cfg: RunConfig, out: Path, quiet: bool):
        self.command, self.cfg, self.out, self.quiet = command, cfg, out, quiet
        out.mkdir(parents=True, exist_ok=True)
        self.M = cfg.build_model()
        self.C = cfg.build_coefficients()

    def header(self) -> dict:
        return {"command": self.command, "config_hash": self.cfg.hash,
                "config_source": self.cfg.source, "grid_n": self.cfg.grid_n,
                "seed": self.cfg.seed, "tolerances": tolerances(), "version": __version__}

    def report(self, name: str, body: dict) -> dict:
        payload = {**self.header(), **body}
        write_json(self.out / name, payload)
        return payload

    def say(self, msg: str) -> None:
        if not self.quiet:
            print(msg)


# --------------------------------------------------------------------------
# commands


def _barriers(run: Run, R: float, n: int, bv: float):
    from .nonlinearity import constant_barriers, ratio_bounds
    from .solver import default_barriers

    if ratio_bounds(run.C, run.M).finite:
        return constant_barriers(run.C, run.M, cover=(bv, bv))
    return default_barriers(run.M, run.C, R, n)


def _solve(run: Run, sec: dict):
    from .solver import DirichletProblem, solve_dirichlet

    R = float(sec.get("R", run.M.R_max))
    bv = float(sec.get("boundary_value", 1.0))
    n = run.cfg.grid_n
    return solve_dirichlet(DirichletProblem(run.M, run.C, R, bv, _barriers(run, R, n, bv), n))


def cmd_model(run: Run) -> int:
    kern = green_kernel(run.M, n=run.cfg.grid_n)
    sec = run.cfg.section("model_checks")
    vg = volume_growth_check(run.M, float(sec.get("mu", 0.0)))
    body = {"model": run.cfg.model, "nonparabolic": kern.nonparabolic,
            "green_tail_model": kern.tail_model, "green_checks": kern.checks,
            "volume_growth": vg}
    if kern.G is not None:
        write_csv(run.out / "green.csv", ["r", "G"], [kern.r, kern.G])
    run.report("model.json", body)
    run.say(f"nonparabolic={kern.nonparabolic} tail={kern.tail_model}")
    return EXIT_OK


def cmd_spectrum(run: Run) -> int:
    from .hypotheses import default_profile_radii
    from .spectral import spectral_profile

    sec = run.cfg.section("spectrum")
    radii = sec.get("radii") or default_profile_radii(run.M)
    prof = spectral_profile(run.M, run.C.a, radii, n=run.cfg.grid_n)
    write_csv(run.out / "spectrum.csv", ["R", "lambda1"], [prof.radii, prof.eigenvalues])
    run.report("spectrum.json", {"radii": prof.radii, "eigenvalues": prof.eigenvalues,
                                 "nonincreasing": prof.nonincreasing,
                                 "limit_estimate": prof.limit_estimate,
                                 "discretization_error": prof.discretization_error,
                                 "negative_certified": prof.negative_certified,
                                 "note": prof.note})
    for R, lam in zip(prof.radii, prof.eigenvalues):
        run.say(f"R={R:g}  lambda1={lam:.10g}")
    return EXIT_OK


def cmd_solve(run: Run) -> int:
    rep = _solve(run, run.cfg.section("solve"))
    u = rep.solution
    write_csv(run.out / "solution.csv", ["r", "u"], [u.r, u.values])
    run.report("solve.json", {"report": rep.as_dict()})
    run.say(f"iterations={rep.iterations} residual={rep.residual_max:.3g}")
    ok = u.certificate.ok and rep.sandwich_ok
    return EXIT_OK if ok else EXIT_NUMERICAL


def _subsolution(run: Run, spec: dict):
    from .nonlinearity import (constant_barriers, pasted_subsolution, sigma_property,
                               yamabe_subsolution)

    kind = spec.get("kind", "constant")
    n = int(spec.get("n", 4000))
    if kind == "constant":
        return constant_barriers(run.C, run.M).sub
    if kind == "yamabe":
        return yamabe_subsolution(run.C, run.M, float(spec["R1"]), n=n)
    if kind == "pasted":
        return pasted_subsolution(run.C, run.M, float(spec["rho1"]), float(spec["rho2"]), n=n)
    if kind == "sigma":
        res = sigma_property(run.C, run.M, float(spec.get("R", run.M.R_max)), n=n)
        if not res.holds:
            raise HypothesisFailure("property (Sigma) fails")
        return res.witness
    raise ConfigError(f"maximal.subsolution.kind must be constant, yamabe, pasted or sigma, got {kind!r}")


def cmd_maximal(run: Run) -> int:
    from .solver import maximal_solution

    sec = run.cfg.section("maximal")
    sub = _subsolution(run, sec.get("subsolution", {}))
    if not sub.certificate.ok:
        run.report("maximal.json", {"subsolution": sub.certificate.as_dict(), "ok": False})
        raise HypothesisFailure("subsolution certificate fails")
    radii = sec.get("radii") or [run.M.R_max / 4, run.M.R_max / 2, run.M.R_max]
    rep = maximal_solution(run.M, run.C, sub, radii, n=run.cfg.grid_n,
                           core_fraction=float(sec.get("core_fraction", 0.5)))
    u = rep.solution
    write_csv(run.out / "maximal.csv", ["r", "u"], [u.r, u.values])
    write_csv(run.out / "subsolution.csv", ["r", "u"], [sub.r, sub.values])
    run.report("maximal.json", {"report": rep.as_dict(), "subsolution": sub.certificate.as_dict(),
                                "ok": rep.above_subsolution})
    run.say(f"core radius {rep.core_radius:g}: u(0)={u.values[0]:.10g} "
            f"above_subsolution={rep.above_subsolution}")
    return EXIT_OK if rep.above_subsolution else EXIT_NUMERICAL


def cmd_bounds(run: Run) -> int:
    from .bounds import bilateral_bound_check, interior_sup_bound

    sec = run.cfg.section("bounds")
    rep = _solve(run, sec)
    mu = float(sec.get("mu", 0.0))
    body = {"solve": rep.as_dict(), "bilateral": bilateral_bound_check(run.M, run.C, rep.solution, mu)}
    body["bilateral"].pop("gamma_sets", None)
    if "T" in sec:
        ib = interior_sup_bound(run.M, run.C, float(sec["T"]), float(sec.get("T_tilde", 0.9 * sec["T"])))
        body["interior"] = {"T": ib.T, "T_tilde": ib.T_tilde, "A": ib.A, "C": ib.C,
                            **ib.check(rep.solution)}
    hyp_ok = body["bilateral"]["hypotheses_ok"]
    bound_ok = body["bilateral"]["ok"] and body.get("interior", {"ok": True})["ok"]
    body["verdict"] = {"hypotheses_ok": hyp_ok, "bounds_ok": bound_ok}
    run.report("bounds.json", body)
    run.say(f"hypotheses_ok={hyp_ok} bounds_ok={bound_ok}")
    if not hyp_ok:
        return EXIT_HYPOTHESIS
    return EXIT_OK if bound_ok else EXIT_NUMERICAL


def cmd_oscillate(run: Run) -> int:
    sec = run.cfg.section("oscillate")
    kind = sec.get("kind", "kappa_threshold")
    rep = asy.integrate_beta(kind, T=float(sec.get("T", asy.E2)), T_end=float(sec.get("T_end", 1e6)),
                             lam=float(sec.get("lam", 1.0)), eps=float(sec.get("eps", 0.5)))
    tr = rep.trace
    write_csv(run.out / "trace.csv", ["t", "beta", "dbeta"], [tr["t"], tr["beta"], tr["dbeta"]])
    run.report("oscillation.json", {"report": rep.as_dict()})
    run.say(f"{kind}: zeros={rep.zero_count} ratio_drift={rep.ratio_drift:.4g}")
    return EXIT_OK


def cmd_barrier(run: Run) -> int:
    from .model import ModelManifold

    sec = run.cfg.section("barrier")
    M = run.M
    if "R_max" in sec:  # barriers need long t-ranges; allow a longer copy of the model
        M = ModelManifold(M.m, M.g, float(sec["R_max"]))
    G = None if M.g.closed_form else green_kernel(M, n=run.cfg.grid_n)
    env = asy.finite_index_barrier(M, G, mode=sec.get("mode", "kappa_threshold"),
                                   T=float(sec.get("T", asy.E2)), lam=float(sec.get("lam", 1.0)))
    write_csv(run.out / "barrier.csv", ["r", "u", "t", "a", "residual_scaled"],
              [env.r, env.u, env.t, env.a, np.r_[np.nan, env.residual_scaled, np.nan]])
    run.report("barrier.json", {"certificate": env.as_dict()})
    run.say(f"barrier ok={env.ok} max scaled residual={env.checks['max_scaled_residual']:.3g}")
    return EXIT_OK if env.ok else EXIT_NUMERICAL


def cmd_compare(run: Run) -> int:
    from .solver import compare

    sec = run.cfg.section("compare")
    lo, hi = sorted(float(v) for v in sec.get("boundary_values", [0.5, 2.0]))
    R = float(sec.get("R", run.M.R_max))
    reps = [_solve(run, {"R": R, "boundary_value": v}) for v in (lo, hi)]
    ok = compare(reps[0].solution, reps[1].solution, run.C)
    gap = reps[1].solution.values - reps[0].solution.values
    write_csv(run.out / "compare.csv", ["r", "u_low", "u_high"],
              [reps[0].solution.r, reps[0].solution.values, reps[1].solution.values])
    run.report("compare.json", {"boundary_values": [lo, hi], "ordered": ok,
                                "min_gap": float(gap.min()),
                                "reports": [r.as_dict() for r in reps]})
    run.say(f"compare u({lo:g}) <= u({hi:g}): {ok}")
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_hypotheses(run: Run) -> int:
    from .hypotheses import hypotheses_table

    params = run.cfg.section("hypotheses")
    params.setdefault("grid_n", run.cfg.grid_n)
    tab = hypotheses_table(run.M, run.C, params)
    run.report("hypotheses.json", tab)
    for sec, preds in tab["sections"].items():
        flags = "  ".join(f"{k}={'-' if v['ok'] is None else v['ok']}" for k, v in preds.items())
        run.say(f"{sec:11s} {flags}")
    run.say(f"targets {tab['targets']}: {'all true' if tab['ok'] else 'FAILED'}")
    return EXIT_OK if tab["ok"] else EXIT_HYPOTHESIS


# --------------------------------------------------------------------------
# plotting and demo


def read_xy_csv(path) -> tuple[str, str, np.ndarray, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows) < 2:
        raise ConfigError(f"{path}: empty CSV")
    head = [h.strip() for h in rows[0]]
    if head[:2] not in (["r", "u"], ["t", "beta"]):
        raise ConfigError(f"{path}: schema mismatch, expected 'r,u' or 't,beta' columns, got {head[:2]}")
    data = np.array([[float(x) for x in row[:2]] for row in rows[1:] if row])
    return head[0], head[1], data[:, 0], data[:, 1]


def plot(paths, out, logx=False, logy=False, envelope=False, title=None) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = [read_xy_csv(p) for p in paths]
    kinds = {s[:2] for s in series}
    if len(kinds) > 1:
        raise ConfigError("cannot mix r,u and t,beta CSVs in one plot")
    xl, yl = series[0][:2]
    with matplotlib.rc_context({"svg.hashsalt": "lichlab", "svg.fonttype": "none",
                                "path.simplify": False}):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for p, (_, _, x, y) in zip(paths, series):
            ax.plot(x, y, lw=1.2, label=Path(p).name)
        if envelope:
            if xl != "t":
                raise ConfigError("--envelope needs t,beta traces")
            x = series[0][2]
            x = x[x > math.e]
            y = series[0][3][-x.size:]
            prof = asy.asymptotic_profile(x)
            scale = float(np.dot(prof, y) / np.dot(prof, prof))
            ax.plot(x, scale * prof, "k--", lw=1.0, label="C sqrt(t log t) log log t")
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xl)
        ax.set_ylabel(yl)
        if title:
            ax.set_title(title)
        ax.legend(fontsize=8)
        fig.tight_layout()
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
    return out


def cmd_demo(args) -> int:
    from .acceptance import DEFAULT_SEED, run_all

    seed = DEFAULT_SEED if args.seed is None else args.seed
    echo = None if args.quiet else print
    results = run_all(grid_n=args.grid_n, seed=seed, echo=echo)
    passed = sum(r.passed for r in results)
    if not args.quiet:
        print(f"{passed}/{len(results)} scenarios passed")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "demo.json", {"seed": seed, "grid_n": args.grid_n, "version": __version__,
                                       "tolerances": tolerances(),
                                       "scenarios": [r.as_dict() for r in results]})
    return EXIT_OK if passed == len(results) else EXIT_NUMERICAL


# --------------------------------------------------------------------------


HANDLERS = {"model": cmd_model, "spectrum": cmd_spectrum, "solve": cmd_solve,
            "maximal": cmd_maximal, "bounds": cmd_bounds, "oscillate": cmd_oscillate,
            "barrier": cmd_barrier, "compare": cmd_compare, "hypotheses": cmd_hypotheses}
HELP = {
    "model": "volume growth, parabolicity and Green kernel of the model",
    "spectrum": "Dirichlet lambda_1 of -Delta - a on a list of balls",
    "solve": "Dirichlet problem on one ball",
    "maximal": "maximal solution by exhaustion with boundary blow-up",
    "bounds": "bilateral and interior a priori bounds",
    "oscillate": "integrate the log-variable ODE and count sign changes",
    "barrier": "asymptotic barrier profile and its scaled residual",
    "compare": "solutions from two boundary values, checked for ordering",
    "hypotheses": "table of hypothesis predicates (exit 2 if a target fails)",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"JSON run config, or a bundled name {BUNDLED}")
    common.add_argument("--out", help="output directory (plot: SVG file)")
    common.add_argument("--grid-n", type=int, default=None, help="override grid_n")
    common.add_argument("--seed", type=int, default=None, help="override the sweep seed")
    common.add_argument("--quiet", action="store_true")
    p = argparse.ArgumentParser(prog="lichlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in HANDLERS:
        sub.add_parser(name, parents=[common], help=HELP[name])
    pl = sub.add_parser("plot", parents=[common], help="SVG line plot of r,u or t,beta CSVs")
    pl.add_argument("csv", nargs="+")
    pl.add_argument("--logx", action="store_true")
    pl.add_argument("--logy", action="store_true")
    pl.add_argument("--envelope", action="store_true",
                    help="overlay the fitted sqrt(t log t) log log t profile")
    pl.add_argument("--title")
    sub.add_parser("demo", parents=[common], help="run the acceptance scenarios")
    return p


def load_config(spec: str | None) -> RunConfig:
    if spec is None:
        raise ConfigError("--config is required for this command")
    if not Path(spec).exists() and spec in BUNDLED:
        return RunConfig.bundled(spec)
    return RunConfig.load(spec)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    from .nonlinearity import CoefficientError, HypothesisError
    from .solver import PreconditionError, SolverError
    from .spectral import SpectralError

    def fail(code, msg):
        print(f"lichlab {args.command}: {msg}", file=sys.stderr)
        return code

    try:
        if args.command == "demo":
            return cmd_demo(args)
        if args.command == "plot":
            out = plot(args.csv, args.out or "plot.svg", args.logx, args.logy, args.envelope, args.title)
            if not args.quiet:
                print(out)
            return EXIT_OK
        cfg = load_config(args.config)
        if args.grid_n is not None:
            cfg.grid_n = int(args.grid_n)
        if args.seed is not None:
            cfg.seed = int(args.seed)
        run = Run(args.command, cfg, Path(args.out or "lichlab-out"), args.quiet)
    except (ConfigError, ExpressionError, CoefficientError, GeometryError) as exc:
        return fail(EXIT_CONFIG, exc)
    try:
        return HANDLERS[args.command](run)
    except (HypothesisError, HypothesisFailure, PreconditionError) as exc:
        run.report(f"{args.command}.error.json",
                   {"error": str(exc), "kind": "hypothesis",
                    "details": getattr(exc, "report", {})})
        return fail(EXIT_HYPOTHESIS, exc)
    except (ConfigError, ExpressionError, CoefficientError) as exc:
        return fail(EXIT_CONFIG, exc)
    except (SolverError, SpectralError, asy.IntegrationError, GeometryError,
            FloatingPointError) as exc:
        run.report(f"{args.command}.error.json", {"error": str(exc), "kind": "numerical"})
        return fail(EXIT_NUMERICAL, exc)


if __name__ == "__main__":
    sys.exit(main())
