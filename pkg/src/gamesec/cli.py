"""Command-line entry point: ``gamesec``.

Exit codes: 0 when every verdict passes, 1 when some verdict fails and 2 on
usage, parse, file or budget errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources
from pathlib import Path

from . import strategy as S
from .dcc.parser import parse_program
from .dcc.program import run_program
from .errors import BudgetError, GamesecError, LatticeError, TypeSyntaxError
from .flow import level_of_type, no_flow, semantic_levels
from .games import parse_sexp, validate_play
from .lattice import l4, lattice_from_text, parse_lattice_file, validate_lattice
from .laws import SUITES, Session, run_suites
from .types import I, check_levels, parse_type, to_text


class UsageError(GamesecError):
    pass


# ------------------------------------------------------------------ helpers

def _bundled(name: str):
    data = resources.files("gamesec") / "data"
    for cand in (name, name + ".lat", name + ".dcc"):
        f = data / cand
        if f.is_file():
            return f
    return None


def _read(path: str) -> tuple[str, str]:
    p = Path(path)
    if p.is_file():
        return p.read_text(encoding="utf-8"), str(p)
    f = _bundled(Path(path).name)
    if f is None:
        raise FileNotFoundError(path)
    return f.read_text(encoding="utf-8"), path


def get_lattice(path: str | None):
    if path is None:
        return l4()
    text, _ = _read(path)
    return lattice_from_text(text)


def parse_bounds(text: str) -> tuple[int, int]:
    try:
        k, max_len = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--bounds expects K,L, got {text!r}") from None
    if k < 1 or max_len < 2 or max_len % 2:
        raise UsageError("bounds need K ≥ 1 and L ≥ 2 even")
    return k, max_len


def _top_split(text: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur.strip())
            cur = ""
        else:
            cur += ch
    parts.append(cur.strip())
    return parts


def strategy_from_spec(spec: str, lat, k: int, max_len: int) -> S.Strategy:
    """``id(T)``, ``counit(T)``, ``delta(T)``, ``eta(l,T)``, ``coerce(l1,l2,T)`` or ``@file.json``."""
    if spec.startswith("@"):
        text, _ = _read(spec[1:])
        data = json.loads(text)
        game = parse_type(data["game"], lat)
        plays = [tuple(parse_sexp(m) for m in s) for s in data["plays"]]
        return S.make_strategy(game, lat, data.get("copy_bound", k), plays,
                               data.get("max_len", max_len))
    name, paren, rest = spec.partition("(")
    if not paren or not rest.endswith(")"):
        raise UsageError(f"bad strategy spec {spec!r}")
    args = _top_split(rest[:-1])
    name = name.strip()
    ctor = {"id": (1, lambda t: S.copycat(t, lat, k, max_len)),
            "counit": (1, lambda t: S.counit(t, lat, k, max_len)),
            "delta": (1, lambda t: S.comultiplication(t, lat, k, max_len)),
            "eta": (2, lambda lv, t: S.unit_eta(lat.check(lv), t, lat, k, max_len)),
            "coerce": (3, lambda a, b, t: S.coerce(lat.check(a), lat.check(b), t, lat, k, max_len))}
    if name not in ctor:
        raise UsageError(f"unknown strategy {name!r}; expected one of {', '.join(ctor)}")
    arity, fn = ctor[name]
    if len(args) != arity:
        raise UsageError(f"{name} takes {arity} argument(s)")
    return fn(*args[:-1], parse_type(args[-1], lat))


def emit(report: dict, fmt: str, text_lines) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    else:
        for line in text_lines(report):
            print(line)


def _add_common(p, lattice=True, bounds=False):
    if lattice:
        p.add_argument("--lattice", metavar="PATH", help="lattice file (bundled names accepted; default L4)")
    if bounds:
        p.add_argument("--bounds", metavar="K,L", default="2,8", help="copy bound and play-length bound")
    p.add_argument("--format", choices=("text", "json"), default="text")


# ------------------------------------------------------------------ commands

def cmd_lattice_validate(args) -> int:
    text, src = _read(args.file)
    try:
        lat = validate_lattice(parse_lattice_file(text, src))
        report = {"command": ["lattice", "validate", args.file], "verdict": "pass", "lattice": lat.describe()}
    except LatticeError as exc:
        report = {"command": ["lattice", "validate", args.file], "verdict": "fail",
                  "error": str(exc), "violations": [str(v) for v in exc.violations]}

    def text_lines(r):
        if r["verdict"] == "pass":
            yield f"valid lattice: {' '.join(r['lattice']['elements'])} (bottom {r['lattice']['bottom']})"
        else:
            yield f"invalid lattice: {r['error']}"
            yield from (f"  {v}" for v in r["violations"] if v != r["error"])

    emit(report, args.format, text_lines)
    return 0 if report["verdict"] == "pass" else 1


def cmd_type_level(args) -> int:
    lat = get_lattice(args.lattice)
    t = check_levels(parse_type(args.type, lat), lat)
    report = {"command": ["type", "level", args.type], "type": to_text(t),
              "level": sorted(level_of_type(t, lat)),
              "initial_move_levels": sorted(semantic_levels(t, lat)), "verdict": "pass"}
    report["verdict"] = "pass" if report["level"] == report["initial_move_levels"] else "fail"

    def text_lines(r):
        yield f"level({r['type']}) = {{{', '.join(r['level'])}}}"
        if r["verdict"] != "pass":
            yield f"  disagrees with initial moves: {{{', '.join(r['initial_move_levels'])}}}"

    emit(report, args.format, text_lines)
    return 0 if report["verdict"] == "pass" else 1


def cmd_flow_check(args) -> int:
    lat = get_lattice(args.lattice)
    a = check_levels(parse_type(args.source, lat), lat)
    b = check_levels(parse_type(args.target, lat), lat)
    c = check_levels(parse_type(args.context, lat), lat) if args.context else I
    v = no_flow(a, b, lat, c)
    report = {"command": ["flow", "check"], "verdict": v.verdict}
    report.update(v.as_dict(with_witness=args.witness))
    ok = True
    if v.witness is not None:
        ok = all(not validate_play(v.witness.view, s) for s in v.witness.plays)
        report["witness_valid"] = ok

    def text_lines(r):
        q = r["query"]
        yield f"{q['from']} ~> {q['to']} (context {q['context']}): {r['verdict']}"
        if "witness" in r:
            yield f"  witness on {r['witness']['game']}:"
            for s in r["witness"]["plays"]:
                yield "    " + (" ".join(s) or "ε")

    emit(report, args.format, text_lines)
    return 0 if ok else 1


def _sibling_lattice(path: str) -> str | None:
    """``prog.lat`` next to ``prog.dcc`` (on disk or bundled), if any."""
    stem = Path(path).with_suffix(".lat")
    if stem.is_file():
        return str(stem)
    if not Path(path).is_file() and _bundled(stem.name) is not None:
        return stem.name
    return None


def cmd_dcc(args) -> int:
    lat = get_lattice(args.lattice or _sibling_lattice(args.file))
    k, max_len = parse_bounds(args.bounds)
    text, src = _read(args.file)
    prog = parse_program(text, lat)
    report = run_program(prog, lat, args.mode, k, max_len)
    report["command"] = ["dcc", args.mode, args.file]

    def text_lines(r):
        for res in r["results"]:
            head = f"line {res['line']}: {res['directive']} {res['verdict']}"
            if "error" in res:
                yield f"{head}: {res['error']}: {res['message']}"
                continue
            yield head + (f" : {res['type']}" if "type" in res else "")
            if "normal_form" in res:
                yield f"  normal form: {res['normal_form']}"
            if "uses" in res:
                yield f"  uses: {', '.join(res['uses']) or '(none)'}"
            if "strategy" in res:
                st = res["strategy"]
                yield f"  strategy: {st['plays']} plays, total at bound: {st['total']}"
            if res["directive"] == "noninterference" and "variable" in res:
                yield (f"  {res['variable']}: free={res['free_in_normal_form']} "
                       f"moves={res['moves_in_variable']} rhd={res['rhd']}")
        yield f"{r['mode']}: {r['verdict']} (k={k}, L={max_len})"

    emit(report, args.format, text_lines)
    return 0 if report["verdict"] == "pass" else 1


def cmd_laws(args) -> int:
    lat = get_lattice(args.lattice)
    k, max_len = parse_bounds(args.bounds)
    names = args.suite or list(SUITES)
    for n in names:
        if n not in SUITES:
            raise UsageError(f"unknown suite {n!r}; expected one of {', '.join(SUITES)}")
    sess = Session(seed=args.seed, k=k, max_len=max_len, lat=lat)
    start = time.monotonic()
    report = run_suites(sess, names, full=args.full)
    report["command"] = ["laws", "test"]
    if args.timing:
        report["wall_ms"] = round((time.monotonic() - start) * 1000)

    def text_lines(r):
        for name, s in r["suites"].items():
            yield f"{name}: {s['checks']} checks, {s['failures']} failures"
        for row in r["laws"]:
            if row["failures"]:
                yield f"  FAIL {row['suite']} / {row['law']}: {row['failures']} of {row['checks']}"
        yield f"verdict: {r['verdict']} (seed {r['seed']}, k={k}, L={max_len})"

    emit(report, args.format, text_lines)
    return 0 if report["verdict"] == "pass" else 1


def cmd_trace(args) -> int:
    lat = get_lattice(args.lattice)
    k, max_len = parse_bounds(args.bounds)
    sigma = strategy_from_spec(args.first, lat, k, max_len)
    tau = strategy_from_spec(args.second, lat, k, max_len)
    comp = S.compose(sigma, tau, max_len)
    traces = S.interactions(sigma, tau, args.limit)
    report = {"command": ["trace", args.first, args.second],
              "bounds": {"copy_bound": k, "max_len": max_len},
              "first": to_text(sigma.game), "second": to_text(tau.game),
              "composite": comp.as_dict(), "interactions": traces, "verdict": "pass"}

    def text_lines(r):
        yield f"σ : {r['first']}"
        yield f"τ : {r['second']}"
        for tr in r["interactions"]:
            yield "  " + "  ".join(f"{who}:{comp_}{m}" for who, comp_, m in tr["interaction"])
            yield "    hides to " + (" ".join(tr["external"]) or "ε")
        c = r["composite"]
        yield f"σ;τ : {c['game']} ({len(c['plays'])} plays{', truncated' if c['truncated'] else ''})"

    emit(report, args.format, text_lines)
    return 0


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gamesec", description="Security-levelled game semantics toolkit.")
    sub = ap.add_subparsers(dest="group", required=True)

    lat = sub.add_parser("lattice", help="security lattices").add_subparsers(dest="cmd", required=True)
    p = lat.add_parser("validate", help="check a lattice file")
    p.add_argument("file")
    _add_common(p, lattice=False)
    p.set_defaults(func=cmd_lattice_validate)

    ty = sub.add_parser("type", help="type queries").add_subparsers(dest="cmd", required=True)
    p = ty.add_parser("level", help="level(T), the levels of initial moves")
    p.add_argument("type")
    _add_common(p)
    p.set_defaults(func=cmd_type_level)

    fl = sub.add_parser("flow", help="information flow").add_subparsers(dest="cmd", required=True)
    p = fl.add_parser("check", help="decide whether A can flow to B")
    p.add_argument("--from", dest="source", required=True, metavar="TYPE")
    p.add_argument("--to", dest="target", required=True, metavar="TYPE")
    p.add_argument("--context", metavar="TYPE", help="extra context C in A*C -o B (default I)")
    p.add_argument("--witness", action="store_true", help="include the witness strategy")
    _add_common(p)
    p.set_defaults(func=cmd_flow_check)

    p = sub.add_parser("dcc", help="DCC programs")
    p.add_argument("mode", choices=("check", "run", "nocheck"))
    p.add_argument("file")
    _add_common(p, bounds=True)
    p.set_defaults(func=cmd_dcc)

    lw = sub.add_parser("laws", help="law and property suites").add_subparsers(dest="cmd", required=True)
    p = lw.add_parser("test", help="run the suites")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--suite", action="append", metavar="NAME", help=f"one of {', '.join(SUITES)}; repeatable")
    p.add_argument("--full", action="store_true", help="list every check, not only failures")
    p.add_argument("--timing", action="store_true", help="add wall time (makes output run-dependent)")
    _add_common(p, bounds=True)
    p.set_defaults(func=cmd_laws)

    p = sub.add_parser("trace", help="print σ∥τ interactions before hiding")
    p.add_argument("first", metavar="SIGMA")
    p.add_argument("second", metavar="TAU")
    p.add_argument("--limit", type=int, default=50)
    _add_common(p, bounds=True)
    p.set_defaults(func=cmd_trace)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"gamesec: file not found: {exc.args[0] if exc.args else exc}", file=sys.stderr)
    except TypeSyntaxError as exc:
        print(f"gamesec: syntax error: {exc}", file=sys.stderr)
    except BudgetError as exc:
        print(f"gamesec: budget exhausted: {exc}", file=sys.stderr)
    except (UsageError, json.JSONDecodeError) as exc:
        print(f"gamesec: {exc}", file=sys.stderr)
    except GamesecError as exc:
        print(f"gamesec: {type(exc).__name__}: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
