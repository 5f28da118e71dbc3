"""Command-line front end: ``pipoly <command> ...``.

Results go to stdout; progress notes and diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from . import __version__
from .checks import SUITES, run_suite
from .expression import SpecError, parse_spec
from .families import Family, eval_hassani, evaluate
from .primes import PI_HARD_CAP, PSI_CAP, PrimeCountCache, PrimeCounter, chebyshev
from .repro import DEFAULT_TOLERANCE, diagnose_n, emit, figure_csv, figure_data, \
    reproduce_table, table_by_id
from .scanner import scan

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_ERROR = 2


@dataclass(frozen=True)
class Config:
    cache_path: str | None = None
    pi_cap: int = PI_HARD_CAP
    psi_cap: int = PSI_CAP
    tolerance: float = DEFAULT_TOLERANCE
    threads: int = os.cpu_count() or 1

    def validate(self) -> "Config":
        if self.pi_cap <= 0 or self.psi_cap <= 0:
            raise ValueError("caps must be positive")
        if not 0 < self.tolerance <= 1:
            raise ValueError("tolerance must lie in (0, 1]")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        return self


def parse_real(text: str) -> float:
    """Decimal or scientific notation ("1e10", "2.5E4", "10000")."""
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from None
    if v != v or v in (float("inf"), float("-inf")):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return v


def parse_int(text: str) -> int:
    """Integer flag that also accepts integral scientific notation ("1e8")."""
    try:
        return int(text)
    except ValueError:
        pass
    v = parse_real(text)
    if v != int(v):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(v)


_CONFIG_KEYS = {
    "cache_path": str,
    "pi_cap": parse_int,
    "psi_cap": parse_int,
    "tolerance": parse_real,
    "threads": parse_int,
}


def load_config(path: str | Path | None) -> Config:
    """Read ``key = value`` lines; ``#`` starts a comment. PIPOLY_CACHE fills cache_path."""
    values: dict = {}
    if path is not None:
        for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: expected one of "
                                 f"{', '.join(_CONFIG_KEYS)} as 'key = value'")
            try:
                values[key] = _CONFIG_KEYS[key](value)
            except argparse.ArgumentTypeError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if "cache_path" not in values and os.environ.get("PIPOLY_CACHE"):
        values["cache_path"] = os.environ["PIPOLY_CACHE"]
    return Config(**values)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pipoly",
                                description="Exact prime counting and polynomial inequalities in pi(x).")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="file of 'key = value' settings")
    common.add_argument("--cache", dest="cache_path", help="binary pi cache file")
    common.add_argument("--threads", type=parse_int)
    common.add_argument("--pi-cap", type=parse_int)
    common.add_argument("--psi-cap", type=parse_int)
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    s = sub.add_parser("pi", parents=[common], help="print pi(floor(x))")
    s.add_argument("--x", type=parse_real, required=True)

    s = sub.add_parser("psi", parents=[common], help="print psi(x), theta(x), term count")
    s.add_argument("--x", type=parse_int, required=True)
    s.add_argument("--verbose", action="store_true",
                   help="also print the deviation under both normalisations")

    s = sub.add_parser("eval", parents=[common], help="evaluate a family or a DSL expression")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", choices=["G", "H", "K", "L", "F", "Hn", "Nr", "hassani"])
    src.add_argument("--expr", help="DSL text")
    src.add_argument("--spec-file", help="file holding DSL text")
    s.add_argument("--x", type=parse_real, required=True)
    s.add_argument("--n", type=parse_int)
    s.add_argument("--r", type=parse_int)
    s.add_argument("--terms", action="store_true", help="also print the signed terms")

    s = sub.add_parser("scan", parents=[common], help="sign scan over a grid, as CSV")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", choices=["G", "H", "K", "L", "F", "Hn", "Nr"])
    src.add_argument("--expr")
    src.add_argument("--spec-file")
    s.add_argument("--from", dest="x_min", type=parse_real, required=True)
    s.add_argument("--to", dest="x_max", type=parse_real, required=True)
    s.add_argument("--points", type=parse_int, required=True)
    s.add_argument("--grid", choices=["log", "linear"], default="log")
    s.add_argument("--n", type=parse_int)
    s.add_argument("--r", type=parse_int)

    s = sub.add_parser("table", parents=[common], help="reproduce a published value table")
    s.add_argument("--id", required=True, choices=["1", "2", "3", "4", "5", "7"])
    s.add_argument("--cap", type=parse_real, default=1e10)
    s.add_argument("--tolerance", type=parse_real)
    s.add_argument("--format", choices=["csv", "markdown"], default="csv")

    s = sub.add_parser("figure", parents=[common], help="plot data for a figure, as CSV")
    s.add_argument("--id", type=parse_int, required=True, choices=range(1, 9), metavar="{1..8}")
    s.add_argument("--points", type=parse_int, required=True)

    s = sub.add_parser("check", parents=[common], help="run a property suite")
    s.add_argument("--suite", required=True, choices=list(SUITES))
    s.add_argument("--max-exp", type=parse_int, help="largest decade exponent of the grid")
    return p


def _config(args) -> Config:
    cfg = load_config(args.config)
    overrides = {k: getattr(args, k) for k in ("cache_path", "threads", "pi_cap", "psi_cap")
                 if getattr(args, k, None) is not None}
    if getattr(args, "tolerance", None) is not None:
        overrides["tolerance"] = args.tolerance
    return replace(cfg, **overrides).validate()


def _spec_source(args):
    if args.expr is not None:
        return parse_spec(args.expr)
    if args.spec_file is not None:
        return parse_spec(Path(args.spec_file).read_text(encoding="utf-8"))
    return None


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _cmd_pi(args, cfg, counter, out) -> int:
    if args.x < 0:
        raise ValueError(f"pi argument {args.x} is negative")
    out.write(f"{counter(args.x)}\n")
    return EXIT_OK


def _cmd_psi(args, cfg, counter, out) -> int:
    res = chebyshev(args.x, cfg.psi_cap)
    out.write(f"psi {res.psi!r}\ntheta {res.theta!r}\nterms {res.term_count}\n")
    if args.verbose and args.x >= 2:
        L = math.log(args.x)
        dev = res.psi - args.x
        out.write(f"deviation_sqrt {dev / (math.sqrt(args.x) * L * L)!r}\n"
                  f"deviation_linear {dev / (args.x * L * L)!r}\n")
    return EXIT_OK


def _cmd_eval(args, cfg, counter, out) -> int:
    spec = _spec_source(args)
    if spec is None and args.family == "hassani":
        res = eval_hassani(args.x, counter)
        out.write(f"lower {res.lower.to_scientific(17)}\n"
                  f"middle {res.middle.to_scientific(17)}\n"
                  f"upper {res.upper.to_scientific(17)}\n"
                  f"holds {str(all(res.holds)).lower()}\n")
        return EXIT_OK
    res = evaluate(spec if spec is not None else Family.parse(args.family), args.x,
                   args.n, args.r, counter)
    out.write(f"{res.value.to_scientific(17)}\n")
    if args.terms:
        for label, term in res.terms:
            out.write(f"{label}\t{term.to_scientific(17)}\n")
    return EXIT_OK


def _cmd_scan(args, cfg, counter, out) -> int:
    spec = _spec_source(args)
    rep = scan(spec if spec is not None else args.family, args.x_min, args.x_max,
               args.points, args.grid, n=args.n, r=args.r, counter=counter,
               threads=cfg.threads)
    out.write(rep.to_csv())
    _note(f"monotone: {rep.monotone}; crossings: {list(rep.crossings) or 'none'}; "
          f"runtime {rep.runtime_ms} ms")
    return EXIT_OK


def _cmd_table(args, cfg, counter, out) -> int:
    cap = int(args.cap)
    rows = reproduce_table(args.id, cap, cfg.tolerance, counter=counter, threads=cfg.threads)
    shown = [r for r in rows if r.status != "skipped-out-of-range"]
    out.write(emit(shown, args.format))
    if len(shown) < len(rows):
        _note(f"{len(rows) - len(shown)} row(s) above cap {cap} skipped")
    for r in rows:
        if r.diagnostic:
            _note(f"x={r.x} {r.series}: {r.diagnostic}")
    bad = [r for r in rows if r.status == "mismatch"]
    if bad:
        _note(f"{len(bad)} row(s) mismatch at tolerance {cfg.tolerance:g}")
        if table_by_id(args.id).uses_n:
            good = diagnose_n(args.id, cap, cfg.tolerance, counter=counter, threads=cfg.threads)
            _note(f"sum lengths matching every row: {good or 'none'}")
        return EXIT_MISMATCH
    return EXIT_OK


def _cmd_figure(args, cfg, counter, out) -> int:
    out.write(figure_csv(figure_data(args.id, args.points, counter=counter,
                                     threads=cfg.threads)))
    return EXIT_OK


def _cmd_check(args, cfg, counter, out) -> int:
    results = run_suite(args.suite, args.max_exp, counter)
    for r in results:
        out.write(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}\n")
    failed = sum(not r.passed for r in results)
    out.write(f"{len(results) - failed} passed, {failed} failed\n")
    return EXIT_OK if not failed else EXIT_MISMATCH


_COMMANDS = {
    "pi": _cmd_pi,
    "psi": _cmd_psi,
    "eval": _cmd_eval,
    "scan": _cmd_scan,
    "table": _cmd_table,
    "figure": _cmd_figure,
    "check": _cmd_check,
}


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        cache = PrimeCountCache(cfg.cache_path) if cfg.cache_path else None
        counter = PrimeCounter(cache, hard_cap=cfg.pi_cap)
        status = _COMMANDS[args.command](args, cfg, counter, out)
        if cache is not None:
            cache.save()
        return status
    except (ValueError, SpecError, OSError, ZeroDivisionError) as exc:
        _note(f"pipoly {args.command}: error: {exc}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
