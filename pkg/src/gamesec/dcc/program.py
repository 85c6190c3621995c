"""Running program files: check, run (normalize and denote) and nocheck."""
from __future__ import annotations

from ..errors import DCCTypeError, ProtectionError
from ..lattice import SecurityLattice
from ..strategy import is_total_bounded
from ..types import to_text
from .normalize import normal_form
from .parser import Program
from .semantics import denote, non_interference_check
from .terms import free_vars, show
from .typing import check_against, typecheck


def _typed(prog: Program, d, lat):
    if d.type is not None:
        return check_against(prog.assumptions, d.term, d.type, lat)
    return typecheck(prog.assumptions, d.term, lat)


def _error(d, exc):
    out = {"line": d.line, "directive": d.kind, "term": show(d.term), "verdict": "fail",
           "error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ProtectionError):
        out["levels"] = {"required": exc.required, "found": exc.found}
    if isinstance(exc, DCCTypeError) and exc.rule:
        out["rule"] = exc.rule
    return out


def _used(prog, nf):
    fv = free_vars(nf)
    return [n for n, _ in prog.assumptions if n in fv]


def run_program(prog: Program, lat: SecurityLattice, mode: str, k: int = 2, max_len: int = 8) -> dict:
    """mode is 'check', 'run' or 'nocheck'."""
    results = []
    for d in prog.directives:
        if mode == "nocheck" and d.kind != "noninterference" and d.kind != "check":
            continue
        try:
            if d.kind == "noninterference":
                if mode != "nocheck":
                    deriv = _typed(prog, d, lat)
                    results.append({"line": d.line, "directive": d.kind, "term": show(d.term),
                                    "type": to_text(deriv.type), "verdict": "pass"})
                    continue
                rep = non_interference_check(prog.assumptions, d.var, d.term, d.type, lat, k, max_len)
                out = {"line": d.line, "directive": d.kind, "term": show(d.term)}
                out.update(rep.as_dict())
                out["verdict"] = "pass" if rep.consistent else "fail"
                results.append(out)
                continue
            deriv = _typed(prog, d, lat)
            out = {"line": d.line, "directive": d.kind, "term": show(d.term), "type": to_text(deriv.type),
                   "verdict": "pass"}
            sides = [s for n in deriv.nodes() for s in n.side]
            if sides:
                out["side_conditions"] = sides
            if mode in ("run", "nocheck") or d.kind == "normalize":
                nf = normal_form(deriv.ctx, deriv.term, deriv.type)
                out["normal_form"] = show(nf)
                out["uses"] = _used(prog, nf)
            if mode == "run":
                sigma = denote(deriv, lat, k, max_len)
                out["strategy"] = {"game": to_text(sigma.game), "plays": len(sigma.plays),
                                   "bounds": {"copy_bound": k, "max_len": max_len},
                                   "total": is_total_bounded(sigma).ok}
            results.append(out)
        except (DCCTypeError, ProtectionError) as exc:
            results.append(_error(d, exc))
    return {"mode": mode, "assumptions": [[n, to_text(t)] for n, t in prog.assumptions],
            "bounds": {"copy_bound": k, "max_len": max_len}, "results": results,
            "verdict": "pass" if all(r["verdict"] == "pass" for r in results) else "fail"}
