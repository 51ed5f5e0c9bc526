"""Command-line front end.

Every subcommand prints one JSON report on standard output::

    {"command": ..., "inputs": [{"path": ..., "sha256": ...}], "status": ...,
     "answer": ..., "witness": ..., "value": ..., "timings": ...}

``witness`` and ``value`` appear only when the command produces them, and
``timings`` is null unless ``--timings`` is given, so repeated runs print the
same bytes.  The answer to the question asked lives in the report; the exit
status only says whether the command ran: 0 ran, 2 usage error, 3 budget
exceeded, 4 invalid input.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import contextlib
import csv
import hashlib
import io
import json
import shlex
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional

from .core import (INF, Signature, Structure, count_homomorphisms, dump_structure, element_name, load_structure,
                   opt_value, structure_to_dict)
from .decomp import decompose_crisp, decompose_valued, verify_decomposition
from .errors import BudgetExceeded, ValidationError
from .lp import INFEASIBLE, LinearProgram, SolveResult, solve
from .pebble import enumerate_treewidth_structures, find_distinguisher, strategy_fixpoint
from .relax import (build_blp, build_lifted_polytope, build_sa1, build_sak, build_valued_blp, build_valued_sa1,
                    dfh_separator, dual_frac_hom_lp, fh_separator, find_symmetric_polymorphisms, frac_hom_lp,
                    frac_polymorphism_lp)
from .stark import equiv_k
from .wl import common_equitable_partition, fractional_iso_lp, stable_coloring

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_INVALID = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _text(v) -> str:
    if v is INF:
        return "inf"
    return str(v)


def _name(e) -> str:
    return element_name(e)


def _map_json(h: dict) -> Dict[str, str]:
    return {_name(x): _name(y) for x, y in h.items()}


def _matrix_json(M) -> List[List[str]]:
    return [[str(v) for v in row] for row in M]


def _lp_witness(res: SolveResult) -> dict:
    """Nonzero assignment entries (missing variables are 0) or the Farkas multipliers."""
    if res.status == INFEASIBLE:
        return {"farkas": {k: str(v) for k, v in res.farkas.items()}}
    w = {"assignment": {k: str(v) for k, v in res.assignment.items() if v}}
    if res.duals is not None:
        w["duals"] = {k: str(v) for k, v in res.duals.items()}
    return w


def _emit(args, name: str, S: Structure) -> Optional[str]:
    if not args.emit:
        return None
    out = Path(args.emit)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(dump_structure(S) + "\n")
    return str(path)


def _dump_lp(args, lp: LinearProgram):
    if getattr(args, "dump_lp", None):
        Path(args.dump_lp).write_text(lp.dump())


def _load(path: str) -> Structure:
    try:
        return load_structure(Path(path))
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e.strerror}") from None


def _need_k(args, lo: int = 1) -> int:
    if args.k is None or args.k < lo:
        raise UsageError(f"--k must be an integer >= {lo}")
    return args.k


def _need_n(args) -> int:
    if args.n is None or args.n < 1:
        raise UsageError("--n must be a positive integer")
    return args.n


# ---------------------------------------------------------------------------
# subcommands: each returns (status, answer, extra fields)


def cmd_wl(args, S):
    A = S[0]
    col = stable_coloring(A)
    colors = {_name(a): col.colors[i] for i, a in enumerate(A.universe)}
    if args.figures:
        from .plotting import refinement_figure
        refinement_figure({"classes": col.history}, Path(args.figures) / "refinement.png")
    return "ok", col.n_classes, {"witness": {"colors": colors, "history": col.history}}


def cmd_equiv1(args, S):
    A, B = S
    part = common_equitable_partition(A, B)
    if part is None:
        return "ok", False, {}
    side = ("A", "B")
    cons = part.union.constraints
    elems = [[[side[a[0]], _name(a[1])] for a in cls] for cls in part.var_classes]
    cls_c = [[[side[cons[j].scope[0][0]], cons[j].symbol, [_name(x[1]) for x in cons[j].scope]] for j in cls]
             for cls in part.con_classes]
    return "ok", True, {"witness": {"element_classes": elems, "constraint_classes": cls_c}}


def cmd_equivk(args, S):
    A, B = S
    return "ok", equiv_k(A, B, _need_k(args), args.budget), {}


def _lp_command(args, lp: LinearProgram, valued: bool = False):
    _dump_lp(args, lp)
    res = solve(lp)
    extra = {"witness": _lp_witness(res)}
    if valued:
        extra["value"] = _text(res.value) if res.feasible else "inf"
    return res.status, res.feasible, extra


def cmd_blp(args, S):
    return _lp_command(args, build_blp(*S))


def cmd_sa(args, S):
    k = 1 if args.k is None else _need_k(args)
    return _lp_command(args, build_sa1(*S) if k == 1 else build_sak(*S, k))


def cmd_vblp(args, S):
    return _lp_command(args, build_valued_blp(*S), valued=True)


def cmd_vsa1(args, S):
    return _lp_command(args, build_valued_sa1(*S), valued=True)


def cmd_polytope(args, S):
    return _lp_command(args, build_lifted_polytope(*S, _need_k(args)))


def cmd_opt(args, S):
    X, A = S
    value, h = opt_value(X, A, args.budget)
    extra = {"value": _text(value)}
    if h is not None:
        extra["witness"] = {"map": _map_json(h)}
    return "ok", _text(value), extra


def _decomposition_report(args, X, A, w):
    clauses = verify_decomposition(X, A, w)
    wit = {
        "m": w.m,
        "clauses": clauses,
        "h2": _map_json(w.h2),
        "perms": {str(i): [list(p) for p in rhos] for i, rhos in sorted(w.perms.items())},
        "files": [p for p in (_emit(args, "Y1.json", w.Y1), _emit(args, "Y2.json", w.Y2)) if p],
    }
    return wit, all(clauses.values())


def cmd_decompose(args, S):
    X, A = S
    lp = build_sa1(X, A)
    _dump_lp(args, lp)
    res = solve(lp)
    if not res.feasible:
        return res.status, False, {"witness": _lp_witness(res)}
    wit, ok = _decomposition_report(args, X, A, decompose_crisp(X, A, res.assignment, args.budget))
    return res.status, ok, {"witness": wit}


def cmd_vdecompose(args, S):
    X, A = S
    lp = build_valued_sa1(X, A)
    _dump_lp(args, lp)
    res = solve(lp)
    if not res.feasible:
        return res.status, False, {"witness": _lp_witness(res), "value": "inf"}
    w = decompose_valued(X, A, res.assignment, args.budget)
    wit, ok = _decomposition_report(args, X, A, w)
    return res.status, ok, {"witness": wit, "value": _text(w.value)}


def cmd_fraciso(args, S):
    A, B = S
    fi = fractional_iso_lp(A, B)
    _dump_lp(args, fi.lp)
    if fi.feasible:
        wit = {"P": _matrix_json(fi.P), "Q": _matrix_json(fi.Q)}
    else:
        wit = _lp_witness(fi.result)
    return fi.status, fi.feasible, {"witness": wit}


def _morphism_report(args, prog, separator, sep_name):
    _dump_lp(args, prog.lp)
    if prog.feasible:
        wit = {"distribution": [{"map": _map_json(f), "weight": str(p)} for f, p in prog.distribution()]}
    else:
        sep = separator()
        wit = {"separator": structure_to_dict(sep), "farkas": {k: str(v) for k, v in prog.result.farkas.items()}}
        path = _emit(args, sep_name, sep)
        if path:
            wit["file"] = path
    return prog.status, prog.feasible, {"witness": wit}


def cmd_frachom(args, S):
    A, B = S
    prog = frac_hom_lp(A, B, args.budget)
    return _morphism_report(args, prog, lambda: fh_separator(A, B, prog), "separator.json")


def cmd_dualfrachom(args, S):
    X, Y = S
    prog = dual_frac_hom_lp(X, Y, args.budget)
    return _morphism_report(args, prog, lambda: dfh_separator(X, Y, prog), "separator.json")


def _op_json(f: dict) -> List[dict]:
    return [{"args": [_name(a) for a in k], "value": _name(v)} for k, v in f.items()]


def cmd_fracpoly(args, S):
    A, B = S
    prog = frac_polymorphism_lp(A, B, _need_n(args), args.symmetric, args.budget)
    _dump_lp(args, prog.lp)
    if prog.feasible:
        wit = {"distribution": [{"operation": _op_json(f), "weight": str(p)} for f, p in prog.distribution()]}
    else:
        wit = _lp_witness(prog.result)
    return prog.status, prog.feasible, {"witness": wit}


def cmd_sympoly(args, S):
    A = S[0]
    found = find_symmetric_polymorphisms(A, _need_n(args), args.budget)
    extra = {"value": str(len(found))}
    if found:
        extra["witness"] = {"operation": _op_json(found[0])}
    return "ok", bool(found), extra


def cmd_pebble(args, S):
    A, B = S
    W = strategy_fixpoint(A, B, _need_k(args), args.budget, method="rounds")
    if args.figures:
        from .plotting import strategy_figure
        strategy_figure({f"k={args.k}": W.history}, Path(args.figures) / "pebble.png")
    return "ok", W.wins, {"witness": {"size": len(W), "history": W.history}}


def cmd_homcount(args, S):
    X, A = S
    n = count_homomorphisms(X, A, args.budget)
    return "ok", n, {"value": str(n)}


def cmd_distinguish(args, S):
    A, B = S
    d = find_distinguisher(A, B, _need_k(args), args.budget, seed=args.seed)
    if d is None:
        return "ok", False, {"witness": {"examined": args.budget or 20000, "note": "no distinguisher in the stream"}}
    wit = {
        "structure": structure_to_dict(d.structure),
        "bags": [sorted(b) for b in d.decomposition.bags],
        "tree_edges": [list(e) for e in d.decomposition.edges],
        "counts": list(d.counts),
        "examined": d.examined,
    }
    path = _emit(args, "distinguisher.json", d.structure)
    if path:
        wit["file"] = path
    return "ok", True, {"witness": wit}


def _parse_signature(text: str) -> Signature:
    try:
        pairs = []
        for part in text.split(","):
            name, arity = part.split(":")
            pairs.append((name.strip(), int(arity)))
        return Signature.of(*pairs)
    except ValueError:
        raise UsageError(f"bad signature {text!r}; expected NAME:ARITY[,NAME:ARITY...]") from None


def cmd_gen_tw(args, S):
    k = _need_k(args)
    n = _need_n(args)
    sig = _parse_signature(args.signature)
    limit = args.budget if args.budget is not None else 100
    made = []
    for i, (X, dec) in enumerate(enumerate_treewidth_structures(sig, n, k, args.seed, args.symmetric)):
        if i >= limit:
            break
        if not dec.verify(X):
            raise AssertionError("generated decomposition does not check")
        item = {"elements": len(X), "tuples": sum(len(X.relations[R]) for R in sig.names), "width": dec.width}
        path = _emit(args, f"tw_{i:05d}.json", X)
        if path:
            item["file"] = path
        made.append(item)
    return "ok", len(made), {"witness": {"structures": made}}


COMMANDS = {
    "wl": (cmd_wl, 1), "equiv1": (cmd_equiv1, 2), "equivk": (cmd_equivk, 2),
    "blp": (cmd_blp, 2), "sa": (cmd_sa, 2), "vblp": (cmd_vblp, 2), "vsa1": (cmd_vsa1, 2),
    "opt": (cmd_opt, 2), "decompose": (cmd_decompose, 2), "vdecompose": (cmd_vdecompose, 2),
    "fraciso": (cmd_fraciso, 2), "frachom": (cmd_frachom, 2), "dualfrachom": (cmd_dualfrachom, 2),
    "fracpoly": (cmd_fracpoly, 2), "sympoly": (cmd_sympoly, 1), "polytope": (cmd_polytope, 2),
    "pebble": (cmd_pebble, 2), "homcount": (cmd_homcount, 2), "distinguish": (cmd_distinguish, 2),
    "gen-tw": (cmd_gen_tw, 0),
}


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, help="level / number of pebbles / treewidth bound")
    common.add_argument("--n", type=int, help="arity (polymorphisms) or element bound (gen-tw)")
    common.add_argument("--budget", type=int, help="enumeration budget")
    common.add_argument("--seed", type=int, default=0, help="seed for corpus generation")
    common.add_argument("--dump-lp", metavar="FILE", help="write the linear program in text form")
    common.add_argument("--emit", metavar="DIR", help="write produced structures into DIR")
    common.add_argument("--figures", metavar="DIR", help="write per-round figures into DIR")
    common.add_argument("--timings", action="store_true", help="include wall-clock seconds in the report")
    common.add_argument("--symmetric", action="store_true", help="symmetric operations / structures only")
    common.add_argument("--signature", default="E:2", help="gen-tw signature, e.g. E:2,T:3")

    p = _Parser(prog="wlsa", description="refinement, Sherali-Adams relaxations and decompositions")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, arity) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("files", nargs="*", metavar="FILE")
    bp = sub.add_parser("batch", help="run one command line per row of a job file")
    bp.add_argument("jobfile")
    bp.add_argument("--jobs", type=int, default=1)
    rp = sub.add_parser("reproduce", help="run the acceptance suites and print CSV")
    rp.add_argument("--criteria", default="", help="comma-separated criterion numbers (default all)")
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("--figures", metavar="DIR")
    rp.add_argument("--timings", action="store_true")
    rp.add_argument("--single-run", action="store_true", help="skip the second run of the determinism audit")
    return p


def _inputs(files: List[str]) -> List[dict]:
    out = []
    for f in files:
        try:
            digest = hashlib.sha256(Path(f).read_bytes()).hexdigest()
        except OSError:
            digest = None
        out.append({"path": f, "sha256": digest})
    return out


def execute(argv: List[str]) -> (int, dict):
    """Run one command line; returns the exit status and the report."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        return EXIT_USAGE, {"command": argv[0] if argv else None, "status": "usage-error", "error": str(e)}
    if args.command in (None, "batch", "reproduce"):
        return EXIT_USAGE, {"command": args.command, "status": "usage-error",
                            "error": "expected a single subcommand"}
    fn, arity = COMMANDS[args.command]
    report = {"command": args.command, "inputs": _inputs(args.files)}
    start = time.perf_counter()
    try:
        if len(args.files) != arity:
            raise UsageError(f"{args.command} takes {arity} structure file(s), got {len(args.files)}")
        S = [_load(f) for f in args.files]
        status, answer, extra = fn(args, S)
    except UsageError as e:
        report.update(status="usage-error", error=str(e), timings=None)
        return EXIT_USAGE, report
    except BudgetExceeded as e:
        report.update(status="budget-exceeded", error=str(e), timings=None)
        return EXIT_BUDGET, report
    except ValidationError as e:
        report.update(status="invalid-input", error=str(e), timings=None)
        return EXIT_INVALID, report
    report["status"] = status
    report["answer"] = answer
    for key in ("witness", "value"):
        if key in extra:
            report[key] = extra[key]
    report["timings"] = {"seconds": round(time.perf_counter() - start, 6)} if args.timings else None
    return EXIT_OK, report


def _print(report):
    sys.stdout.write(json.dumps(report, indent=1, ensure_ascii=False) + "\n")


def run_batch(jobfile: str, jobs: int) -> (int, list):
    try:
        lines = [ln.strip() for ln in Path(jobfile).read_text().splitlines()]
    except OSError as e:
        return EXIT_INVALID, [{"command": "batch", "status": "invalid-input", "error": str(e)}]
    argvs = [shlex.split(ln) for ln in lines if ln and not ln.startswith("#")]
    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        results = list(pool.map(execute, argvs))
    out = [{"exit": code, "report": rep} for code, rep in results]
    return EXIT_OK, out


def run_reproduce(args) -> int:
    from .reproduce import audit, csv_rows, run_suites
    try:
        chosen = [int(c) for c in args.criteria.split(",") if c.strip()] or None
    except ValueError:
        sys.stderr.write("--criteria expects comma-separated integers\n")
        return EXIT_USAGE
    results = run_suites(chosen, args.seed)
    if chosen is None or 10 in chosen:
        rerun = None if args.single_run else run_suites(chosen, args.seed)
        results.append(audit(results, rerun))
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(csv_rows(results, args.timings))
    sys.stdout.write(buf.getvalue())
    if args.figures:
        from .plotting import suite_figures
        for path in suite_figures(results, args.figures):
            sys.stderr.write(f"wrote {path}\n")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if argv and argv[0] in ("batch", "reproduce"):
        try:
            args = build_parser().parse_args(argv)
        except UsageError as e:
            sys.stderr.write(f"usage error: {e}\n")
            return EXIT_USAGE
        if args.command == "reproduce":
            return run_reproduce(args)
        code, out = run_batch(args.jobfile, args.jobs)
        _print(out)
        return code
    if argv in ([], ["-h"], ["--help"]):
        with contextlib.redirect_stdout(sys.stderr):
            try:
                build_parser().print_help()
            except SystemExit:
                pass
        return EXIT_OK if argv else EXIT_USAGE
    code, report = execute(argv)
    if "error" in report:
        sys.stderr.write(f"{report['status']}: {report['error']}\n")
    _print(report)
    return code


if __name__ == "__main__":
    sys.exit(main())
