"""Command-line front end.

Two subcommands mirror the two analysis families::

    absint cache     --input FILE --assoc N --method approx|exact|oracle|pipeline|compare
    absint intervals --input FILE --method widen|widen-narrow|policy|exhaustive|oracle|compare

Reports go to stdout as aligned text or JSON (``--format``).  Outputs are
byte-reproducible for identical inputs and flags; wall-clock timings are
only emitted with ``--timings`` (into the report's ``timings`` object, which
is otherwise empty).

Exit codes: 0 success, 1 input or usage error, 2 oracle budget or value
range exceeded, 3 (intervals, single-method runs) at least one assertion
unproved.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import boundsolve, focused, rewrite
from .agebounds import classify_all_approx
from .cfg import Cfg, build_cfg, parse_access_graph
from .intervals import (
    AbstractEnv,
    AnalysisResult,
    AssertVerdict,
    Interval,
    analyze,
    entry_environment,
    filter_cond,
)
from .lang import ParseError, negate_cond, parse_program
from .lru import InitPolicy, OracleBudgetError, classify_oracle

SCHEMA_VERSION = 1
TOOL = "absint"
VERSION = "0.1.0"

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BUDGET = 2
EXIT_UNPROVED = 3


class _CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 means "budget exceeded" here, so
    # route usage errors through the input-error exit code instead.
    def error(self, message):
        raise _CliError(f"{self.prog}: {message}")


def _load_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise _CliError(f"cannot read {path!r}: {exc}")


def _load_cache_cfg(path: str) -> Cfg:
    text = _load_text(path)
    first = next((ln.split("#", 1)[0].strip() for ln in text.splitlines()
                  if ln.split("#", 1)[0].strip()), "")
    try:
        if first.split(maxsplit=1)[:1] in (["loc"], ["entry"], ["edge"]):
            return parse_access_graph(text)
        return build_cfg(parse_program(text))
    except ParseError as exc:
        raise _CliError(f"{path}: {exc}")


def _interval_json(iv: Interval):
    if iv.is_empty:
        return None
    return [b if isinstance(b, int) else repr(b) for b in (iv.lo, iv.hi)]


def _emit(report: dict, rows: list[str], fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write("\n".join(rows) + ("\n" if rows else ""))


# ---------------------------------------------------------------------------
# cache subcommand
# ---------------------------------------------------------------------------

_CACHE_METHODS = ("approx", "exact", "oracle", "pipeline", "compare")


def _cache_classify(cfg: Cfg, n: int, init: InitPolicy, method: str) -> dict[int, tuple[str, str]]:
    """site -> (verdict string, method tag)"""
    if method == "approx":
        return {s: (v.value, "approx") for s, v in classify_all_approx(cfg, n, init).items()}
    if method == "exact":
        return {s: (v.value, "exact") for s, v in focused.classify_exact(cfg, n, init).items()}
    if method == "oracle":
        return {s: (v.value, "oracle") for s, v in classify_oracle(cfg, n, init).items()}
    if method == "pipeline":
        return {s: (v.value, tag) for s, (v, tag) in focused.classify_pipeline(cfg, n, init).items()}
    raise _CliError(f"unknown cache method {method!r}")


def run_cache(args) -> int:
    cfg = _load_cache_cfg(args.input)
    init = InitPolicy(args.init)
    sites = sorted(
        (e.label.site, e.label.block, e.src) for e in cfg.access_edges()
    )
    timings: dict[str, float] = {}
    started = time.perf_counter()
    methods = ("approx", "exact", "oracle") if args.method == "compare" else (args.method,)
    tables: dict[str, dict[int, tuple[str, str]]] = {}
    for m in methods:
        t0 = time.perf_counter()
        tables[m] = _cache_classify(cfg, args.assoc, init, m)
        if args.timings:
            timings[m] = round(time.perf_counter() - t0, 6)
    if args.timings:
        timings["total"] = round(time.perf_counter() - started, 6)

    results = []
    rows = [f"{'site':>4}  {'block':<8} {'location':<12} " + " ".join(f"{m:<12}" for m in methods)]
    for site, block, loc in sites:
        entry = {"site": site, "block": block, "location": loc}
        for m in methods:
            verdict, tag = tables[m][site]
            if args.method == "compare":
                entry[m] = verdict
            else:
                entry["verdict"] = verdict
                entry["method"] = tag
        results.append(entry)
        cells = " ".join(f"{tables[m][site][0]:<12}" for m in methods)
        rows.append(f"{site:>4}  {block:<8} {loc:<12} {cells}")

    disagreements = []
    if args.method == "compare":
        for site, block, loc in sites:
            a, e, o = tables["approx"][site][0], tables["exact"][site][0], tables["oracle"][site][0]
            if e != o:
                disagreements.append({"site": site, "kind": "exact-vs-oracle", "exact": e, "oracle": o})
            if a != "unknown" and a != e:
                disagreements.append({"site": site, "kind": "approx-vs-exact", "approx": a, "exact": e})
        rows.append("")
        if disagreements:
            rows.append("disagreements:")
            for d in disagreements:
                rows.append(f"  site {d['site']}: {d['kind']} {json.dumps(d, sort_keys=True)}")
        else:
            rows.append("disagreements: none")

    report = {
        "schema": SCHEMA_VERSION,
        "tool": TOOL,
        "version": VERSION,
        "method": args.method,
        "input": args.input,
        "assoc": args.assoc,
        "init": init.value,
        "results": results,
        "timings": timings,
    }
    if args.method == "compare":
        report["disagreements"] = disagreements
    _emit(report, rows, args.format)
    return EXIT_OK


# ---------------------------------------------------------------------------
# intervals subcommand
# ---------------------------------------------------------------------------

_INTERVAL_METHODS = ("widen", "widen-narrow", "policy", "exhaustive", "oracle", "compare")


def _parse_rewrites(value: str) -> int | None | str:
    if value == "off":
        return "off"
    if value == "full":
        return None
    if value.startswith("truncated:"):
        try:
            depth = int(value.split(":", 1)[1])
        except ValueError:
            raise _CliError(f"bad rewrites depth in {value!r}")
        if depth < 1:
            raise _CliError("rewrites truncation depth must be >= 1")
        return depth
    raise _CliError(f"unknown rewrites mode {value!r} (off, full, truncated:<d>)")


def _engine_result(cfg, env, method, rewrites, widen_delay, narrow_passes) -> AnalysisResult:
    passes = narrow_passes if method == "widen-narrow" else 0
    if rewrites == "off":
        return analyze(cfg, env, widen_delay, passes)
    return rewrite.analyze_combined(cfg, env, rewrites, widen_delay, passes)


def _solver_result(cfg, program, method) -> AnalysisResult:
    solver = boundsolve.solve_policy_iteration if method == "policy" else boundsolve.solve_exhaustive
    per_var: dict[str, dict[str, Interval]] = {}
    for decl in program.decls:
        entry = Interval.const(decl.init.value) if decl.init is not None else Interval.top()
        try:
            per_var[decl.name] = boundsolve.solve_intervals_exact(cfg, decl.name, entry, solver)
        except boundsolve.UnsupportedConstructError as exc:
            raise _CliError(f"program outside the solvable fragment: {exc}")
        except boundsolve.CapExceededError as exc:
            raise _CliError(str(exc))
    envs = {}
    for loc in cfg.locations:
        mapping = {v: per_var[v][loc] for v in per_var}
        envs[loc] = AbstractEnv.of(mapping) if mapping else AbstractEnv.of({})
    verdicts = []
    for site in cfg.asserts:
        refuted = filter_cond(negate_cond(site.cond), envs[site.loc])
        verdicts.append(AssertVerdict(site.sid, site.loc, refuted.bottom))
    return AnalysisResult(envs, tuple(verdicts))


def _oracle_result(cfg, program, value_range) -> AnalysisResult:
    envs = {}
    hulls: dict[str, dict] = {}
    for decl in program.decls:
        if decl.init is None:
            raise _CliError(
                "the concrete oracle requires every declaration to be initialized"
            )
        try:
            hulls[decl.name] = boundsolve.bounded_concrete_oracle(
                cfg, decl.name, Interval.const(decl.init.value), value_range
            )
        except boundsolve.UnsupportedConstructError as exc:
            raise _CliError(f"program outside the oracle fragment: {exc}")
        except (boundsolve.RangeExceededError, OracleBudgetError) as exc:
            raise _CliError(str(exc), EXIT_BUDGET)
    for loc in cfg.locations:
        mapping = {}
        dead = False
        for v, table in hulls.items():
            hull = table[loc]
            if hull is None:
                dead = True
                break
            mapping[v] = Interval(hull[0], hull[1])
        envs[loc] = AbstractEnv.unreachable() if dead else AbstractEnv.of(mapping)
    verdicts = []
    for site in cfg.asserts:
        refuted = filter_cond(negate_cond(site.cond), envs[site.loc])
        verdicts.append(AssertVerdict(site.sid, site.loc, refuted.bottom))
    return AnalysisResult(envs, tuple(verdicts))


def run_intervals(args) -> int:
    text = _load_text(args.input)
    try:
        program = parse_program(text)
        cfg = build_cfg(program)
    except ParseError as exc:
        raise _CliError(f"{args.input}: {exc}")
    if cfg.has_access():
        raise _CliError("interval analyses require a cache-free program")
    rewrites = _parse_rewrites(args.rewrites)
    if rewrites != "off" and args.method not in ("widen", "widen-narrow", "compare"):
        raise _CliError("--rewrites applies to the widen/widen-narrow methods only")
    env = entry_environment(program)
    value_range = _parse_range(args.range)

    methods = (
        ("widen", "widen-narrow", "policy", "exhaustive", "oracle")
        if args.method == "compare"
        else (args.method,)
    )
    timings: dict[str, float] = {}
    outcomes: dict[str, AnalysisResult] = {}
    skipped: dict[str, str] = {}
    for m in methods:
        t0 = time.perf_counter()
        try:
            if m in ("widen", "widen-narrow"):
                outcomes[m] = _engine_result(cfg, env, m, rewrites, args.widen_delay, args.narrow_passes)
            elif m in ("policy", "exhaustive"):
                outcomes[m] = _solver_result(cfg, program, m)
            elif m == "oracle":
                outcomes[m] = _oracle_result(cfg, program, value_range)
            else:
                raise _CliError(f"unknown intervals method {m!r}")
        except _CliError:
            if args.method != "compare":
                raise
            # comparison runs simply omit methods the input does not support
            skipped[m] = "not applicable to this input"
        if args.timings:
            timings[m] = round(time.perf_counter() - t0, 6)
    methods = tuple(m for m in methods if m in outcomes)

    variables = list(program.variables)
    results = []
    rows = [f"{'location':<12} " + " ".join(f"{m:<{18 * max(1, len(variables))}}" for m in methods)]
    for loc in cfg.locations:
        entry = {"location": loc}
        cells = []
        for m in methods:
            envm = outcomes[m].envs[loc]
            if envm.bottom:
                entry[m if args.method == "compare" else "env"] = None
                cells.append(f"{'unreachable':<{18 * max(1, len(variables))}}")
            else:
                envdict = {v: _interval_json(envm.get(v)) for v in variables}
                entry[m if args.method == "compare" else "env"] = envdict
                shown = " ".join(f"{v}={envm.get(v)!r:<14}" for v in variables)
                cells.append(f"{shown:<{18 * max(1, len(variables))}}")
        results.append(entry)
        rows.append(f"{loc:<12} " + " ".join(cells))

    assert_rows = []
    assert_entries = []
    for site in cfg.asserts:
        entry = {"assert": site.sid, "location": site.loc}
        states = []
        for m in methods:
            verdict = next(v for v in outcomes[m].asserts if v.sid == site.sid)
            key = m if args.method == "compare" else "verdict"
            entry[key] = "proved" if verdict.proved else "unproved"
            states.append(f"{m}={'proved' if verdict.proved else 'unproved'}")
        assert_entries.append(entry)
        assert_rows.append(f"assert {site.sid} at {site.loc}: " + " ".join(states))
    if args.timings:
        timings["total"] = round(sum(timings.values()), 6)

    report = {
        "schema": SCHEMA_VERSION,
        "tool": TOOL,
        "version": VERSION,
        "method": args.method,
        "rewrites": args.rewrites,
        "input": args.input,
        "results": results,
        "asserts": assert_entries,
        "timings": timings,
    }
    if args.method == "compare":
        report["skipped"] = skipped
    _emit(report, rows + ([""] + assert_rows if assert_rows else []), args.format)
    if args.method != "compare":
        unproved = any(e["verdict"] == "unproved" for e in assert_entries)
        return EXIT_UNPROVED if unproved else EXIT_OK
    return EXIT_OK


def _parse_range(value: str) -> tuple[int, int]:
    try:
        lo_text, hi_text = value.split(":", 1)
        lo, hi = int(lo_text), int(hi_text)
    except ValueError:
        raise _CliError(f"bad range {value!r}, expected lo:hi")
    if lo > hi:
        raise _CliError(f"bad range {value!r}, lo exceeds hi")
    return lo, hi


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="absint", description=__doc__, add_help=True)
    sub = parser.add_subparsers(dest="command", required=True)

    cache = sub.add_parser("cache", help="classify memory accesses of one cache set")
    cache.add_argument("--input", required=True, help="toy program or access graph")
    cache.add_argument("--assoc", type=int, required=True, help="associativity (N >= 1)")
    cache.add_argument("--method", choices=_CACHE_METHODS, default="pipeline")
    cache.add_argument("--init", choices=("empty", "unknown"), default="empty")
    cache.add_argument("--format", choices=("text", "json"), default="text")
    cache.add_argument("--timings", action="store_true", help="include wall-clock timings (not byte-reproducible)")
    cache.set_defaults(func=run_cache)

    iv = sub.add_parser("intervals", help="numeric interval analyses and exact solving")
    iv.add_argument("--input", required=True, help="toy program (cache-free)")
    iv.add_argument("--method", choices=_INTERVAL_METHODS, default="widen-narrow")
    iv.add_argument("--widen-delay", type=int, default=0, dest="widen_delay")
    iv.add_argument("--narrow-passes", type=int, default=1, dest="narrow_passes")
    iv.add_argument("--rewrites", default="off", help="off | full | truncated:<d>")
    iv.add_argument("--range", default="-1024:1100", help="value range for the concrete oracle")
    iv.add_argument("--format", choices=("text", "json"), default="text")
    iv.add_argument("--timings", action="store_true", help="include wall-clock timings (not byte-reproducible)")
    iv.set_defaults(func=run_intervals)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "cache" and args.assoc < 1:
            raise _CliError("--assoc must be at least 1")
        return args.func(args)
    except _CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except OracleBudgetError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
