"""Command line: verify-all, cohomology, pair-homology, spectral, chern, solve-tetra, solve-square."""

from __future__ import annotations

import argparse
import configparser
import json
import sys

from . import geometry
from .cyclic_cohomology import cohomology
from .index_ring import mod2_reduce_ideal, no_map_verdict, parse_ideal
from .pair_homology import dual_cohomology, identify_module, relative_table, standard_candidates
from .rep_chern import decompose, real_direct_sum, sphere_index, u2_rep, u4_rep
from .spectral import (
    CASES, ConvergenceViolation, MalformedRule, default_ledger, e2_for_case, edge_index,
    forced_pattern_search, load_ledger, run_ledger,
)
from .verify import emit_tables, verify_all
from .zg_modules import MODULE_NAMES, named_module

REPS = {"u4": lambda: u4_rep(), "u2": lambda: u2_rep(), "u4xu2": lambda: real_direct_sum(u4_rep(), u2_rep())}


def load_config(path: str) -> dict[str, dict[str, str]]:
    """Flat key=value file with optional [command] sections; keys before any section apply to all."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    parser = configparser.ConfigParser(default_section="all", interpolation=None)
    parser.optionxform = str
    parser.read_string(text if text.lstrip().startswith("[") else "[all]\n" + text)
    out = {"all": dict(parser.defaults())}
    for sec in parser.sections():
        out[sec] = {k: v for k, v in parser[sec].items() if k not in parser.defaults() or
                    parser[sec][k] != parser.defaults()[k]}
    return out


def _emit(args, payload, text: str) -> None:
    if args.format == "json":
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_verify_all(args) -> int:
    try:
        ledger = load_ledger(args.ledger) if args.ledger else None
    except MalformedRule as exc:
        print(f"MalformedRule: {exc}", file=sys.stderr)
        return 2
    report = verify_all(args.max_degree, ledger)
    _emit(args, report.to_dict(), "\n".join(report.lines()) + "\n")
    if report.aborted_at:
        print(f"step failed: {report.aborted_at}", file=sys.stderr)
    return 0 if report.ok else 1


def cmd_cohomology(args) -> int:
    table = cohomology(named_module(args.module), args.max_degree, "F2" if args.coeff == "f2" else "Z")
    rows = table.rows()
    if args.format == "csv":
        text = "degree,group\n" + "".join(f"{r['degree']},{r['group']}\n" for r in rows)
    else:
        text = "".join(f"H^{r['degree']} = {r['group']}\n" for r in rows)
    _emit(args, {"module": args.module, "coeff": args.coeff, "rows": rows}, text)
    return 0


def cmd_pair_homology(args) -> int:
    factor = 2 if args.factor == "sphere" else 1
    table = relative_table(factor)
    cands = standard_candidates()
    rel = {k: {"rank": m.rank, "module": identify_module(m, cands).name} for k, m in table.modules.items()}
    dual = {k: {"rank": m.rank, "module": identify_module(m, cands).name}
            for k, m in dual_cohomology(table).items()}
    lines = [f"H_{k}(X,Y): rank {v['rank']} ~ {v['module']}" for k, v in rel.items()]
    lines += [f"H^{k}(Omega): rank {v['rank']} ~ {v['module']}" for k, v in dual.items()]
    lines.append(f"euler characteristic: {table.euler_characteristic()}")
    _emit(args, {"factor": args.factor, "relative": rel, "cohomology": dual,
                 "euler": table.euler_characteristic()}, "\n".join(lines) + "\n")
    return 0


def cmd_spectral(args) -> int:
    try:
        ledger = load_ledger(args.ledger) if args.ledger else default_ledger(args.case)
    except MalformedRule as exc:
        print(f"MalformedRule: {exc}", file=sys.stderr)
        return 2
    chunks = []
    payload = {"case": args.case}
    if args.emit_pages:
        chunks.append(emit_tables(args.case, args.emit_pages, args.p_limit, ledger))
    if args.index:
        try:
            final = run_ledger(e2_for_case(args.case), ledger)
        except ConvergenceViolation as exc:
            print(f"ConvergenceViolation at {exc.position}: {exc}", file=sys.stderr)
            return 1
        idx = edge_index(final, bound=args.max_degree)
        payload["index"] = str(idx)
        chunks.append(f"index: {idx}\n")
    if args.search:
        rep = forced_pattern_search(e2_for_case(args.case), p_window=args.p_limit)
        payload["search"] = rep.to_dict()
        chunks.append(f"forced-pattern search: {rep.to_dict()}\n")
    if args.format == "json" and args.emit_pages:
        payload["pages"] = json.loads(emit_tables(args.case, "json", args.p_limit, ledger))["pages"]
    _emit(args, payload, "".join(chunks))
    return 0


def cmd_chern(args) -> int:
    rep = decompose(REPS[args.rep]())
    payload = {"rep": args.rep, "decomposition": str(rep)}
    lines = [f"{args.rep} = {rep}"]
    if args.rep == "u4xu2":
        lines.append("the two real sign lines of U4 and U2 pair into V^2 = V^1 (x) V^1")
    try:
        idx = sphere_index(rep, args.max_degree)
        if args.coeff == "f2":
            idx = mod2_reduce_ideal(idx)
        payload["index"] = str(idx)
        lines.append(f"Index S({args.rep}) = {idx}")
        if args.coeff == "z" and args.rep == "u4xu2":
            omega = parse_ideal("<U^3>", degree_bound=args.max_degree)
            payload["verdict"] = no_map_verdict(omega, idx).value
            lines.append(f"against Index(Omega) = {omega}: {payload['verdict']}")
    except ValueError as exc:
        payload["error"] = str(exc)
        lines.append(f"no sphere index: {exc}")
    _emit(args, payload, "\n".join(lines) + "\n")
    return 0


def _solve(args, curve: bool) -> int:
    spec = geometry.parse_embedding(args.curve if curve else args.embedding)
    if curve:
        rep = geometry.square_peg_solve(spec, args.starts, args.seed, args.tol, args.distinct_margin)
    else:
        rep = geometry.solve(spec, args.starts, args.seed, args.tol, args.distinct_margin)
    text = rep.to_json() + "\n"
    if args.format == "ascii":
        d = rep.distances
        text = (f"{rep.status} on {rep.embedding} (seed {rep.seed}, {rep.starts} starts)\n"
                f"residual {rep.residual:.3e}; distinct margin {rep.margins['distinct']:.4f}; "
                f"distance to Y {rep.margins['to_Y']:.4f}\n"
                + "".join(f"  {k} = {v:.12f}\n" for k, v in d.items()))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(rep.to_json() + "\n")
        if args.format == "ascii":
            sys.stdout.write(text)
    else:
        sys.stdout.write(text)
    return 0 if rep.certified else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the result to this file")
    common.add_argument("--format", choices=("ascii", "csv", "json"), default="ascii")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--max-degree", type=int, default=12)
    common.add_argument("--config", help="key=value file; [command] sections apply to one command")

    p = argparse.ArgumentParser(prog="d8tetra",
                                description="Index computation and tetrahedron search for D8-symmetric configurations.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-all", parents=[common], help="run the full algebraic chain")
    s.add_argument("--ledger", help="ledger file replacing the default sphere ledger")
    s.set_defaults(func=cmd_verify_all)

    s = sub.add_parser("cohomology", parents=[common], help="H^*(Z4; module)")
    s.add_argument("--module", choices=MODULE_NAMES, default="trivial")
    s.add_argument("--coeff", choices=("z", "f2"), default="z")
    s.set_defaults(func=cmd_cohomology)

    s = sub.add_parser("pair-homology", parents=[common], help="H_*(X, Y) and H^*(Omega)")
    s.add_argument("--factor", choices=("sphere", "circle"), default="sphere")
    s.set_defaults(func=cmd_pair_homology)

    s = sub.add_parser("spectral", parents=[common], help="spectral sequence pages and the edge index")
    s.add_argument("--case", choices=CASES, default="sphere-z")
    s.add_argument("--emit-pages", choices=("ascii", "csv", "json"))
    s.add_argument("--index", action="store_true")
    s.add_argument("--search", action="store_true", help="run the forced-pattern search")
    s.add_argument("--ledger")
    s.add_argument("--p-limit", type=int, default=10)
    s.set_defaults(func=cmd_spectral)

    s = sub.add_parser("chern", parents=[common], help="decomposition and sphere index of a representation")
    s.add_argument("--rep", choices=sorted(REPS), default="u4xu2")
    s.add_argument("--group", choices=("z4",), default="z4")
    s.add_argument("--coeff", choices=("z", "f2"), default="z")
    s.set_defaults(func=cmd_chern)

    for name, key, default in (("solve-tetra", "--embedding", "ellipsoid:1.0,1.3,0.7"),
                               ("solve-square", "--curve", "ellipse:1.0,0.6")):
        s = sub.add_parser(name, parents=[common], help=f"search for a zero of the test map ({key[2:]})")
        s.add_argument(key, default=default)
        s.add_argument("--starts", type=int, default=16)
        s.add_argument("--tol", type=float, default=1e-16)
        s.add_argument("--distinct-margin", type=float, default=1e-3)
        s.set_defaults(func=lambda a, curve=(name == "solve-square"): _solve(a, curve))
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    cfg = load_config(args.config)
    values = {**cfg.get("all", {}), **cfg.get(args.command, {})}
    sub = next(a for a in parser._subparsers._group_actions if isinstance(a, argparse._SubParsersAction))
    subparser = sub.choices[args.command]
    defaults = {}
    for action in subparser._actions:
        key = action.dest.replace("_", "-")
        for name in (key, action.dest):
            if name in values:
                raw = values[name]
                if action.const is True and action.nargs == 0:
                    defaults[action.dest] = raw.strip().lower() in ("1", "true", "yes", "on")
                else:
                    defaults[action.dest] = action.type(raw) if action.type else raw
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = _apply_config(parser, argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
