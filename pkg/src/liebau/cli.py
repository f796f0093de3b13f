"""Command-line interface.

Subcommands: ``greens`` (kernel samples and constants), ``certify`` (one
certificate), ``search`` (parameter scan), ``solve`` (periodic solution
trace), ``pump`` (pumping report), ``verify`` (built-in regression suite).

Problems come from ``--preset`` or from a JSON config file; every number in
the emitted JSON and CSV is printed with 17 significant digits in a fixed
field order, so identical inputs produce byte-identical output.

Exit codes: 0 success (certificate passed / solver converged / all checks
green), 2 configuration or usage error, 3 certificate failed,
4 certificate inapplicable, 5 search found nothing, 6 solver did not
converge.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import acceptance, certify, greens, presets
from .errors import ConfigError, LiebauError, NoConvergence
from .funcspec import PeriodicFunction
from .numerics import dump_json, format_float
from .problem import (
    GeneralProblem,
    LiebauProblem,
    PhysicalConfig,
    deregularize,
    from_physical,
    regularize,
)
from .pump import pump_report, x_to_u
from .solve import GridSolution, SolveOptions, solve_periodic

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CERT_FAIL = 3
EXIT_CERT_INAPPLICABLE = 4
EXIT_SEARCH_EMPTY = 5
EXIT_NO_CONVERGENCE = 6


@dataclass
class RunConfig:
    problem: LiebauProblem | GeneralProblem | None
    options: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# config parsing

def _need(obj: dict, key: str, where: str):
    if key not in obj:
        raise ConfigError(f"missing required field {key!r}", where)
    return obj[key]


def parse_function(obj, where: str) -> PeriodicFunction:
    if not isinstance(obj, dict):
        raise ConfigError("function must be a tagged object", where)
    kind = _need(obj, "type", where)
    try:
        if kind == "constant":
            return PeriodicFunction.constant(_need(obj, "period", where), _need(obj, "value", where))
        if kind == "trig":
            return PeriodicFunction.trig(
                _need(obj, "period", where), obj.get("offset", 0.0), obj.get("terms", [])
            )
        if kind == "poly":
            return PeriodicFunction.poly(_need(obj, "period", where), _need(obj, "coeffs", where))
        if kind == "piecewise":
            return PeriodicFunction.piecewise_linear(_need(obj, "points", where))
        if kind == "sum":
            parts = [
                parse_function(p, f"{where}.parts[{i}]")
                for i, p in enumerate(_need(obj, "parts", where))
            ]
            return PeriodicFunction.sum_of(parts)
    except ConfigError:
        raise
    except (LiebauError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc), where) from exc
    raise ConfigError(f"unknown function type {kind!r}", f"{where}.type")


def parse_problem(obj, where: str):
    if not isinstance(obj, dict):
        raise ConfigError("problem must be an object", where)
    kind = _need(obj, "kind", where)
    try:
        if kind == "liebau":
            e = parse_function(_need(obj, "e", where), f"{where}.e")
            if "mu" in obj:
                return LiebauProblem(
                    _need(obj, "a", where), obj["mu"], _need(obj, "c", where),
                    _need(obj, "T", where), e,
                )
            return LiebauProblem.from_b(
                _need(obj, "a", where), _need(obj, "b", where), _need(obj, "c", where),
                _need(obj, "T", where), e,
            )
        if kind == "general":
            return GeneralProblem(
                a=_need(obj, "a", where),
                T=_need(obj, "T", where),
                r=parse_function(_need(obj, "r", where), f"{where}.r"),
                s=parse_function(_need(obj, "s", where), f"{where}.s"),
                alpha=_need(obj, "alpha", where),
                beta=_need(obj, "beta", where),
            )
        if kind == "physical":
            cfg = PhysicalConfig(
                r0=_need(obj, "r0", where),
                rho=_need(obj, "rho", where),
                zeta=_need(obj, "zeta", where),
                g=_need(obj, "g", where),
                a_tau=_need(obj, "a_tau", where),
                a_pi=_need(obj, "a_pi", where),
                v0=_need(obj, "v0", where),
                p=parse_function(_need(obj, "p", where), f"{where}.p"),
            )
            return from_physical(cfg)
    except ConfigError:
        raise
    except (LiebauError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc), where) from exc
    raise ConfigError(f"unknown problem kind {kind!r}", f"{where}.kind")


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(str(exc), path) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", path) from exc
    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object", path)
    problem = parse_problem(raw["problem"], "problem") if "problem" in raw else None
    options = {k: v for k, v in raw.items() if k != "problem"}
    for key, val in options.items():
        if not isinstance(val, dict):
            raise ConfigError("command options must be objects", key)
    cfg = RunConfig(problem=problem, options=options)
    _validate_options(cfg)
    return cfg


def _validate_options(cfg: RunConfig) -> None:
    cert = cfg.options.get("certify", {})
    if "r1" in cert and "r2" in cert and not (0 < cert["r1"] < cert["r2"]):
        raise ConfigError("radii must satisfy 0 < r1 < r2", "certify.r1")
    if "kappa" in cert and cert["kappa"] <= 0:
        raise ConfigError("kappa must be positive", "certify.kappa")
    solve_opts = cfg.options.get("solve", {})
    if "n" in solve_opts and int(solve_opts["n"]) < 8:
        raise ConfigError("grid size n must be at least 8", "solve.n")


def _resolve(args) -> RunConfig:
    if getattr(args, "config", None):
        cfg = load_config(args.config)
    elif getattr(args, "preset", None):
        p = presets.preset(args.preset, v0=getattr(args, "v0", 4.0))
        cfg = RunConfig(problem=p.problem, options={"certify": dict(p.certify), "solve": dict(p.solve)})
    else:
        raise ConfigError("either --preset or --config is required")
    return cfg


def _liebau_problem(cfg: RunConfig) -> LiebauProblem:
    if isinstance(cfg.problem, LiebauProblem):
        return cfg.problem
    if isinstance(cfg.problem, GeneralProblem):
        try:
            return deregularize(cfg.problem)
        except LiebauError as exc:
            raise ConfigError(f"problem is not Liebau-derived: {exc}", "problem") from exc
    raise ConfigError("no problem defined", "problem")


# ---------------------------------------------------------------------------
# output helpers

def _emit(obj, out=None) -> None:
    text = dump_json(obj) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(path: str, header: list[str], columns: list[np.ndarray]) -> None:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(format_float(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# subcommand handlers

def _cmd_greens(args) -> int:
    kernel = greens.build(args.a, args.m, args.T)
    taus = np.linspace(0.0, kernel.T, args.samples)
    values = np.asarray(kernel.at(taus), dtype=float)
    _emit(
        {
            "a": kernel.a,
            "m": kernel.m,
            "T": kernel.T,
            "case": kernel.case,
            "K0": kernel.k0,
            "Kmin": kernel.kmin,
            "Kmax": kernel.kmax,
            "c_m": kernel.cone_constant,
            "m_max": kernel.m_max,
        },
        args.out,
    )
    if args.csv_out:
        _write_csv(args.csv_out, ["tau", "K"], [taus, values])
    return EXIT_OK


def _cmd_certify(args) -> int:
    cfg = _resolve(args)
    opts = dict(cfg.options.get("certify", {}))
    for name in ("theorem", "m", "kappa", "r1", "r2", "eps"):
        val = getattr(args, name, None)
        if val is not None:
            opts[name] = val
    theorem = opts.get("theorem")
    if theorem is None:
        raise ConfigError("missing field", "certify.theorem")
    eps = float(opts.get("eps", 0.0))
    if theorem == "sign_changing":
        lp = _liebau_problem(cfg)
        for req in ("m", "kappa", "r1", "r2"):
            if req not in opts:
                raise ConfigError("missing field", f"certify.{req}")
        cert = certify.check_sign_changing(
            lp, float(opts["m"]), float(opts["kappa"]), float(opts["r1"]), float(opts["r2"]), eps=eps
        )
    elif theorem == "positive_forcing":
        lp = _liebau_problem(cfg)
        if "m" not in opts:
            raise ConfigError("missing field", "certify.m")
        cert = certify.check_positive_forcing(lp, float(opts["m"]), eps=eps)
    elif theorem == "general":
        problem = cfg.problem
        gp = problem if isinstance(problem, GeneralProblem) else regularize(_liebau_problem(cfg))
        for req in ("m", "r1", "r2", "g0", "g1"):
            if req not in opts:
                raise ConfigError("missing field", f"certify.{req}")
        cert = certify.check_general(
            gp,
            float(opts["m"]),
            float(opts["r1"]),
            float(opts["r2"]),
            parse_function(opts["g0"], "certify.g0"),
            parse_function(opts["g1"], "certify.g1"),
            certify.CheckOptions(eps=eps),
        )
    else:
        raise ConfigError(f"unknown theorem {theorem!r}", "certify.theorem")
    _emit(cert.to_dict(), args.out)
    if cert.verdict == certify.VERDICT_PASS:
        return EXIT_OK
    if cert.verdict == certify.VERDICT_INAPPLICABLE:
        return EXIT_CERT_INAPPLICABLE
    return EXIT_CERT_FAIL


def _cmd_search(args) -> int:
    cfg = _resolve(args)
    opts = dict(cfg.options.get("search", {}))
    kwargs = {}
    for name, key in (
        ("m_points", "m_points"),
        ("radius_points", "radius_points"),
        ("radius_lo", "radius_lo"),
        ("radius_hi", "radius_hi"),
        ("eps", "eps"),
        ("threads", "threads"),
    ):
        val = getattr(args, name, None)
        if val is None:
            val = opts.get(key)
        if val is not None:
            kwargs[key] = val
    cert = certify.search_certificate(_liebau_problem(cfg), certify.SearchOptions(**kwargs))
    if cert is None:
        _emit({"result": "none"}, args.out)
        return EXIT_SEARCH_EMPTY
    _emit(cert.to_dict(), args.out)
    return EXIT_OK


def _solve_options(cfg: RunConfig, args) -> SolveOptions:
    raw = dict(cfg.options.get("solve", {}))
    if getattr(args, "n", None) is not None:
        raw["n"] = args.n
    if getattr(args, "tol", None) is not None:
        raw["tol"] = args.tol
    if getattr(args, "no_polish", False):
        raw["polish"] = False
    if getattr(args, "initial", None) is not None:
        raw["initial"] = args.initial
    if getattr(args, "bracket", None) is not None:
        raw["bracket"] = tuple(args.bracket)
    known = {}
    fields = SolveOptions.__dataclass_fields__
    for key, val in raw.items():
        if key not in fields:
            raise ConfigError(f"unknown solve option {key!r}", f"solve.{key}")
        if key == "bracket" and val is not None:
            val = tuple(val)
        if key == "truncation_band" and val is not None:
            val = tuple(val)
        known[key] = val
    return SolveOptions(**known)


def _solved(cfg: RunConfig, args) -> tuple[GridSolution, float | None]:
    problem = cfg.problem
    if isinstance(problem, LiebauProblem):
        gp = regularize(problem)
        mu = problem.mu
    elif isinstance(problem, GeneralProblem):
        gp = problem
        try:
            mu = deregularize(problem).mu
        except LiebauError:
            mu = None
    else:
        raise ConfigError("no problem defined", "problem")
    return solve_periodic(gp, _solve_options(cfg, args)), mu


def _cmd_solve(args) -> int:
    cfg = _resolve(args)
    try:
        sol, mu = _solved(cfg, args)
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    summary = {
        "N": len(sol.values),
        "iterations": sol.iterations,
        "sup_residual": sol.sup_residual,
        "sup_residual_exact_data": sol.sup_residual_exact_data,
        "min_x": sol.min_value,
        "max_x": sol.max_value,
        "mean_x": sol.mean_value,
    }
    _emit(summary, args.out)
    if args.csv_out:
        if mu is not None:
            _write_csv(
                args.csv_out, ["t", "x", "u"], [sol.nodes, sol.values, sol.values**mu]
            )
        else:
            _write_csv(args.csv_out, ["t", "x"], [sol.nodes, sol.values])
    return EXIT_OK


def _read_solution_csv(path: str, mu: float | None, T: float) -> GridSolution:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "t":
        raise ConfigError("solution file must carry a 't,x[,u]' header", path)
    header = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
    nodes = data[:, 0]
    if "u" in header:
        u_vals = data[:, header.index("u")]
    elif "x" in header and mu is not None:
        u_vals = data[:, header.index("x")] ** mu
    else:
        raise ConfigError("need a 'u' column (or 'x' plus a Liebau problem)", path)
    nan = float("nan")
    return GridSolution(
        T=T, nodes=nodes, values=u_vals, sup_residual=nan, sup_residual_exact_data=nan,
        bc_mismatch=0.0, iterations=0, converged=True, units="u",
    )


def _cmd_pump(args) -> int:
    cfg = _resolve(args)
    lp = _liebau_problem(cfg)
    if args.solution:
        u = _read_solution_csv(args.solution, lp.mu, lp.T)
    else:
        try:
            sol, _ = _solved(cfg, args)
        except NoConvergence as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NO_CONVERGENCE
        u = x_to_u(sol, lp.mu)
    report = pump_report(lp, u, tol=args.tol if args.tol is not None else 1e-9)
    _emit(
        {
            "u_mean": report.u_mean,
            "e_mean_over_c": report.e_mean_over_c,
            "delta": report.delta,
            "uprime_l2sq": report.uprime_l2sq,
            "identity_residual": report.identity_residual,
            "pumping_detected": report.pumping_detected,
        },
        args.out,
    )
    return EXIT_OK


def _cmd_verify(args) -> int:
    results = acceptance.run_all(verbose=True)
    return EXIT_OK if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liebau",
        description="Existence certificates and periodic solvers for valveless pumping models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_problem_source(p):
        p.add_argument("--preset", choices=presets.PRESET_NAMES, help="built-in instance")
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--v0", type=float, default=4.0, help="volume for the benchmark preset")
        p.add_argument("--out", help="write the JSON result here instead of stdout")

    p = sub.add_parser("greens", help="kernel constants and samples")
    p.add_argument("-a", type=float, required=True)
    p.add_argument("-m", type=float, required=True)
    p.add_argument("-T", type=float, required=True)
    p.add_argument("--samples", type=int, default=257)
    p.add_argument("--csv-out", help="write tau,K samples here ('-' for stdout)")
    p.add_argument("--out", help="write the JSON constants here instead of stdout")
    p.set_defaults(handler=_cmd_greens)

    p = sub.add_parser("certify", help="check one certificate")
    add_problem_source(p)
    p.add_argument("--theorem", choices=("sign_changing", "positive_forcing", "general"))
    p.add_argument("-m", type=float, dest="m")
    p.add_argument("--kappa", type=float)
    p.add_argument("--r1", type=float)
    p.add_argument("--r2", type=float)
    p.add_argument("--eps", type=float, help="required margin (negative tolerates noise)")
    p.set_defaults(handler=_cmd_certify)

    p = sub.add_parser("search", help="scan parameters for a passing certificate")
    add_problem_source(p)
    p.add_argument("--m-points", type=int, dest="m_points")
    p.add_argument("--radius-points", type=int, dest="radius_points")
    p.add_argument("--radius-lo", type=float, dest="radius_lo")
    p.add_argument("--radius-hi", type=float, dest="radius_hi")
    p.add_argument("--eps", type=float)
    p.add_argument("--threads", type=int)
    p.set_defaults(handler=_cmd_search)

    p = sub.add_parser("solve", help="compute a periodic solution")
    add_problem_source(p)
    p.add_argument("-n", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--no-polish", action="store_true")
    p.add_argument("--initial", type=float)
    p.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--csv-out", help="write t,x[,u] samples here ('-' for stdout)")
    p.set_defaults(handler=_cmd_solve)

    p = sub.add_parser("pump", help="pumping-effect report")
    add_problem_source(p)
    p.add_argument("--solution", help="solution CSV from a previous solve")
    p.add_argument("-n", type=int)
    p.add_argument("--tol", type=float, help="pumping detection threshold")
    p.set_defaults(handler=_cmd_pump)

    p = sub.add_parser("verify", help="run the built-in regression suite")
    p.set_defaults(handler=_cmd_verify)
    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LiebauError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
