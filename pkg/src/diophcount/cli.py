"""Command-line front end.

Every subcommand builds a report envelope (tool version, config echo,
results, warnings) and renders it as JSON, CSV or a plain table.  Exit
codes: 0 success, 2 parse or input error, 3 classification domain error,
4 timeout with a partial count.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import warnings
from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction

from . import __version__
from .algebra import LinearEquation, linear_positive_count, linear_solve
from .classify import classify_polynomial
from .counting import (
    DEFAULT_TIMEOUT,
    BoxDomain,
    count_solutions,
    fit_asymptotic,
    growth_from_samples,
    growth_scan,
    iter_solutions,
    verify_bound,
)
from .eqparse import expand_polynomial, parse_equation, parse_system
from .errors import (
    AllZero,
    Case1NoAsymptote,
    DiophantineError,
    EquationSyntaxError,
    NotAlgebraic,
    NotQuadratic,
    UnknownVariable,
    UnsupportedConstruct,
)
from .special import (
    DEFAULT_CATALAN_BOX,
    PowerChainSystem,
    SystemOfEquations,
    catalan_check,
    count_system,
    exp_sum_check,
    power_chain_count,
)

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_TIMEOUT = 0, 2, 3, 4
_PARSE_ERRORS = (EquationSyntaxError, UnknownVariable, UnsupportedConstruct, AllZero)


class UsageError(Exception):
    """Malformed command-line input (exit code 2)."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    equations: tuple[str, ...] = ()
    N: int | None = None
    ladder: tuple[int, ...] | None = None
    k: int | None = None
    workers: int = 1
    timeout: float = DEFAULT_TIMEOUT
    format: str = "json"

    def __post_init__(self):
        if self.N is not None and self.N < 1:
            raise UsageError("N must be at least 1")
        if self.ladder is not None:
            if any(n < 1 for n in self.ladder):
                raise UsageError("ladder sizes must be at least 1")
            if any(b <= a for a, b in zip(self.ladder, self.ladder[1:])):
                raise UsageError("ladder must be strictly increasing")
        if self.workers < 1:
            raise UsageError("workers must be at least 1")


@dataclass
class ReportEnvelope:
    config: RunConfig
    results: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    rows: list[tuple[int, int]] = field(default_factory=list)  # (N, pi) for CSV
    partial: bool = False

    def to_json(self, timing: bool = False) -> str:
        cfg = {k: v for k, v in asdict(self.config).items() if v is not None}
        doc = {
            "tool": "diophcount",
            "version": __version__,
            "config": cfg,
            "results": self.results,
            "warnings": self.warnings,
        }
        if not timing:
            doc = _strip(doc, "elapsed")
        return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "pi"])
        w.writerows(self.rows)
        return buf.getvalue()

    def to_table(self) -> str:
        lines = []
        for i, result in enumerate(self.results):
            if i:
                lines.append("")
            flat = _flatten(_jsonable(_strip(result, "elapsed")))
            width = max((len(key) for key in flat), default=0)
            lines += [f"{key:<{width}}  {value}" for key, value in flat.items()]
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines) + "\n"


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float):
        return round(obj, 12)
    return obj


def _strip(obj, key):
    if isinstance(obj, dict):
        return {k: _strip(v, key) for k, v in obj.items() if k != key}
    if isinstance(obj, list):
        return [_strip(v, key) for v in obj]
    return obj


def _flatten(obj, prefix=""):
    out = {}
    if isinstance(obj, dict):
        for k in sorted(obj):
            out.update(_flatten(obj[k], f"{prefix}{k}."))
    else:
        out[prefix[:-1]] = json.dumps(obj) if isinstance(obj, list) else obj
    return out


# --- result builders ---


def _count_record(report) -> dict:
    return {
        "N": report.N,
        "k": report.k,
        "pi": report.pi,
        "density": report.density,
        "method": report.method,
        "partial": report.partial,
        "elapsed": report.elapsed,
    }


def _bound_record(bound) -> dict:
    return {
        "category": bound.category,
        "formula": None if bound.formula is None else str(bound.formula),
        "density_case": bound.density_case,
    }


def _scan_record(scan) -> dict:
    rec = {
        "samples": [list(s) for s in scan.samples],
        "k": scan.k,
        "exponent": scan.exponent,
        "density_case": scan.density_case,
        "r_squared": scan.r_squared,
        "limit_estimate": scan.limit_estimate,
        "partial": scan.partial,
    }
    try:
        f, g = fit_asymptotic(scan)
    except Case1NoAsymptote:
        rec["count_form"] = rec["density_form"] = None
    else:
        rec["count_form"], rec["density_form"] = str(f), str(g)
        rec["exponent_fraction"] = f.exponent_fraction
        rec["good_fit"] = f.good_fit
    return rec


# --- commands ---


def cmd_classify(cfg: RunConfig, env: ReportEnvelope) -> None:
    for text in cfg.equations:
        eq = parse_equation(text)
        try:
            p = expand_polynomial(eq)
        except NotAlgebraic as exc:
            raise NotQuadratic(str(exc)) from exc
        c = classify_polynomial(p, cfg.k)
        env.results.append({
            "equation": str(eq),
            "k": c.k,
            "degree": eq.degree,
            "class": c.shape,
            "invariants": asdict(c.invariants),
            "bound": _bound_record(c.bound),
            "point": None if c.point is None else list(c.point),
        })
        env.warnings.extend(c.warnings)


def cmd_count(cfg: RunConfig, env: ReportEnvelope, list_solutions: bool) -> None:
    if cfg.N is None:
        raise UsageError("count needs --n")
    eqs = parse_system(cfg.equations) if len(cfg.equations) > 1 else [parse_equation(cfg.equations[0])]
    k = max(cfg.k or 0, *(eq.k for eq in eqs), 1)
    box = BoxDomain(k, cfg.N)
    for eq in eqs:
        report = count_solutions(eq, box, workers=cfg.workers, timeout=cfg.timeout)
        rec = {"equation": str(eq), "algebraic": eq.is_algebraic, **_count_record(report)}
        if eq.is_algebraic and eq.degree > 0:
            rec["degree"] = eq.degree
            rec["degree_bound"] = eq.degree * cfg.N ** (k - 1)
            rec["bound_holds"] = verify_bound(eq, box, report)
        if list_solutions:
            rec["solutions"] = [list(s) for s in iter_solutions(eq, box)]
        env.results.append(rec)
        env.rows.append((cfg.N, report.pi))
        env.partial |= report.partial
    if len(eqs) > 1:
        report = count_system(SystemOfEquations(tuple(eqs)), box, timeout=cfg.timeout)
        env.results.append({"equation": "system", **_count_record(report)})
        env.rows = [(cfg.N, report.pi)]
        env.partial |= report.partial


def cmd_scan(cfg: RunConfig, env: ReportEnvelope, chain: tuple[int, ...] | None) -> None:
    if cfg.ladder is None or len(cfg.ladder) < 3:
        raise UsageError("scan needs --ladder with at least three sizes")
    if chain is not None:
        system = PowerChainSystem(chain)
        samples = [(N, power_chain_count(system, N)) for N in cfg.ladder]
        scan = growth_from_samples(samples, system.k)
        label = "=".join(f"x{i + 1}^{n}" for i, n in enumerate(chain))
    else:
        if len(cfg.equations) != 1:
            raise UsageError("scan takes exactly one equation or --chain")
        eq = parse_equation(cfg.equations[0])
        scan = growth_scan(eq, cfg.ladder, k=max(cfg.k or 0, eq.k),
                           workers=cfg.workers, timeout=cfg.timeout)
        label = str(eq)
    env.results.append({"equation": label, **_scan_record(scan)})
    env.rows = list(scan.samples)
    env.partial |= scan.partial


def parse_linear(tokens: list[str]) -> LinearEquation:
    """``["3", "5", "=", "15"]`` (spacing around ``=`` optional)."""
    text = " ".join(tokens)
    if text.count("=") != 1:
        raise UsageError("linear input must look like 'a1 a2 ... = b'")
    left, right = text.split("=")
    try:
        coeffs = [int(t) for t in left.replace(",", " ").split()]
        b = int(right.strip())
    except ValueError as exc:
        raise UsageError(f"linear input must be integers: {exc}") from exc
    if len(coeffs) < 2:
        raise UsageError("linear input needs at least two coefficients")
    return LinearEquation(tuple(coeffs), b)


def cmd_linear(cfg: RunConfig, env: ReportEnvelope, tokens: list[str]) -> None:
    eq = parse_linear(tokens)
    desc = linear_solve(eq)
    rec = {"equation": str(eq), **asdict(desc)}
    rec["particular"] = None if desc.particular is None else list(desc.particular)
    if cfg.N is not None:
        rec["N"] = cfg.N
        rec["box_count"] = linear_positive_count(eq, cfg.N)
        env.rows.append((cfg.N, rec["box_count"]))
    env.results.append(rec)


def cmd_chain(cfg: RunConfig, env: ReportEnvelope, exponents: tuple[int, ...], verify: bool) -> None:
    system = PowerChainSystem(exponents)
    sizes = cfg.ladder or ((cfg.N,) if cfg.N is not None else None)
    if sizes is None:
        raise UsageError("chain needs --n or --ladder")
    for N in sizes:
        pi = power_chain_count(system, N)
        rec = {
            "exponents": list(exponents),
            "m": system.m,
            "k": system.k,
            "N": N,
            "pi": pi,
            "density": Fraction(pi, N**system.k),
            "method": "ClosedForm",
        }
        if verify:
            report = count_system(system.equations(), BoxDomain(system.k, N), timeout=cfg.timeout)
            rec["brute_force_pi"] = report.pi
            env.partial |= report.partial
        env.results.append(rec)
        env.rows.append((N, pi))


def _pair(text: str | None, default: tuple[int, int]) -> tuple[int, int]:
    if text is None:
        return default
    try:
        lo, hi = (int(t) for t in text.split(","))
    except ValueError as exc:
        raise UsageError(f"expected 'lo,hi', got {text!r}") from exc
    return lo, hi


def cmd_special(cfg: RunConfig, env: ReportEnvelope, args) -> None:
    if args.check == "catalan":
        box = (_pair(args.x1, DEFAULT_CATALAN_BOX[0]), _pair(args.x2, DEFAULT_CATALAN_BOX[1]),
               _pair(args.x3, DEFAULT_CATALAN_BOX[2]))
        found = catalan_check(*box)
        env.results.append({"check": "catalan", "equation": "x1^x2 - 2^x3 = 1",
                            "box": [list(b) for b in box], "solutions": found, "count": len(found)})
    else:
        found = exp_sum_check(args.bound)
        env.results.append({"check": "expsum", "equation": "2^x1 + 3^x2 = 5^x3",
                            "bound": args.bound, "solutions": found, "count": len(found)})


# --- argument parsing ---


def _ladder(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"ladder must be comma-separated integers, got {text!r}")


def _exponents(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"exponents must be comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="box size N")
    common.add_argument("--ladder", type=_ladder, help="increasing sizes a,b,c")
    common.add_argument("--k", type=int, help="number of variables (box dimension)")
    common.add_argument("--workers", type=int, default=1,
                        help="worker processes; DIO_WORKERS overrides")
    common.add_argument("--timeout-secs", type=float, default=DEFAULT_TIMEOUT)
    common.add_argument("--format", choices=("json", "csv", "table"))
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="include elapsed times in JSON")

    parser = argparse.ArgumentParser(prog="diophcount", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify a second-order equation")
    p.add_argument("equations", nargs="+")
    p = sub.add_parser("count", parents=[common], help="count solutions in {1..N}^k")
    p.add_argument("equations", nargs="+", help="one equation, or several forming a system")
    p.add_argument("--solutions", action="store_true", help="list the solution tuples")
    p = sub.add_parser("scan", parents=[common], help="counts over a ladder of sizes")
    p.add_argument("equations", nargs="*")
    p.add_argument("--chain", type=_exponents, help="power chain exponents instead of an equation")
    p = sub.add_parser("linear", parents=[common], help="linear equation a1 x1 + ... = b")
    p.add_argument("tokens", nargs="+", metavar="a1 ... = b")
    p = sub.add_parser("chain", parents=[common], help="power chain closed form")
    p.add_argument("exponents", type=_exponents)
    p.add_argument("--verify", action="store_true", help="cross-check by counting the system")
    p = sub.add_parser("special", parents=[common], help="named bounded checks")
    p.add_argument("check", choices=("catalan", "expsum"))
    p.add_argument("--x1", help="catalan x1 range lo,hi")
    p.add_argument("--x2", help="catalan x2 range lo,hi")
    p.add_argument("--x3", help="catalan x3 range lo,hi")
    p.add_argument("--bound", type=int, default=30, help="expsum exponent bound")
    return parser


class _Collector(logging.Handler):
    def __init__(self, sink: list[str]):
        super().__init__(logging.WARNING)
        self.sink = sink

    def emit(self, record):
        self.sink.append(record.getMessage())


def run(argv: list[str] | None = None) -> tuple[int, ReportEnvelope, str | None]:
    """Execute a command; returns (exit code, envelope, text for stdout).

    The text is None when the report went to ``--out``.
    """
    args = build_parser().parse_args(argv)
    workers = args.workers
    if os.environ.get("DIO_WORKERS"):
        try:
            workers = int(os.environ["DIO_WORKERS"])
        except ValueError:
            raise UsageError(f"DIO_WORKERS must be an integer, got {os.environ['DIO_WORKERS']!r}")
    fmt = args.format or ("csv" if args.command == "scan" else "json")
    cfg = RunConfig(
        command=args.command,
        equations=tuple(getattr(args, "equations", ()) or ()),
        N=args.n,
        ladder=args.ladder,
        k=args.k,
        workers=workers,
        timeout=args.timeout_secs,
        format=fmt,
    )
    env = ReportEnvelope(cfg)
    pkg_log = logging.getLogger("diophcount")
    handler = _Collector(env.warnings)
    pkg_log.addHandler(handler)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if args.command == "classify":
                cmd_classify(cfg, env)
            elif args.command == "count":
                cmd_count(cfg, env, args.solutions)
            elif args.command == "scan":
                cmd_scan(cfg, env, args.chain)
            elif args.command == "linear":
                cmd_linear(cfg, env, args.tokens)
            elif args.command == "chain":
                cmd_chain(cfg, env, args.exponents, args.verify)
            else:
                cmd_special(cfg, env, args)
        env.warnings.extend(str(w.message) for w in caught)
    finally:
        pkg_log.removeHandler(handler)

    if fmt == "csv":
        if not env.rows:
            raise UsageError(f"{args.command} has no (N, pi) rows to write as CSV")
        text = env.to_csv()
    elif fmt == "table":
        text = env.to_table()
    else:
        text = env.to_json(timing=args.timing)
    if args.out:
        with open(args.out, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
        text = None
    code = EXIT_TIMEOUT if env.partial else EXIT_OK
    return code, env, text


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        code, _, text = run(argv)
    except (UsageError, ValueError, *_PARSE_ERRORS) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DiophantineError as exc:
        # NotQuadratic, NotAlgebraic and the other domain errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if text is not None:
        sys.stdout.write(text)
    if code == EXIT_TIMEOUT:
        print("error: timed out; counts are partial", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
