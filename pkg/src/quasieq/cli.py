"""Command-line interface: ``quasieq <command> FILE [options]``.

Exit status is 0 on success, 1 for a domain-level failure (zero count,
non-zero residual, nonlinear system, oracle disagreement) and 2 for bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from fractions import Fraction

from . import __version__
from .ent import EntError, EntStructure, hierarchical_residual, relaxed_graphical_model, \
    relaxed_system, validate_ent
from .extensive import GameTree, StrategySpaceTooLarge, TreeError, backward_induction_pure, \
    behavior_point, normal_form_of, parse_distinguished, polynomial_graph_of, subgame_system
from .io import GameFileError, dump_game, emit_report, game_to_doc, parse_game_file, \
    rational_text
from .multilinear import MissingAssignment, PolySystem, linear_form, residual, system_is_linear, \
    system_polygraph, validate_sparsity
from .normalform import DegeneratePlayerError, GraphicalModel, NormalFormGame, \
    complete_polygraph, graphical_polygraph, indifference_system
from .numerics import DimensionCapExceeded, solve_linear_exact
from .oracles import cross_check_count
from .polygraph import InvalidGraphError, PolynomialGraph, bernstein_count, \
    scaled_matrix_display, to_dot

INPUT_ERRORS = (GameFileError, InvalidGraphError, TreeError, EntError, DegeneratePlayerError,
                StrategySpaceTooLarge, DimensionCapExceeded, MissingAssignment, OSError,
                KeyError, ValueError)


class UsageError(Exception):
    pass


def _load(path: str, seed: int | None):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return parse_game_file(text, seed=seed), digest


def _distinguished(value, args) -> dict | None:
    if isinstance(value, GameTree):
        return parse_distinguished(value, args.distinguished)
    if args.distinguished not in (None, "first"):
        raise UsageError("--distinguished only applies to extensive-form files")
    return None


def graph_of(value, args) -> PolynomialGraph:
    if isinstance(value, PolynomialGraph):
        return value
    if isinstance(value, NormalFormGame):
        return complete_polygraph(value)
    if isinstance(value, GraphicalModel):
        return graphical_polygraph(value)
    if isinstance(value, GameTree):
        return polynomial_graph_of(value, _distinguished(value, args))
    if isinstance(value, EntStructure):
        return relaxed_graphical_model(value).graph
    if isinstance(value, PolySystem):
        return system_polygraph(value)
    raise UsageError(f"no polynomial graph for {type(value).__name__}")


def system_of(value, args) -> PolySystem:
    if isinstance(value, (NormalFormGame, GraphicalModel)):
        return indifference_system(value)
    if isinstance(value, GameTree):
        return subgame_system(value, _distinguished(value, args))
    if isinstance(value, EntStructure):
        return relaxed_system(value)
    if isinstance(value, PolySystem):
        return value
    raise UsageError(f"{type(value).__name__} files carry no equations")


def _header(args, digest: str, value) -> dict:
    out = {"input": os.path.basename(args.file), "sha256": digest}
    _distinguished(value, args)  # rejects --distinguished on files without edges
    if isinstance(value, GameTree):
        out["distinguished"] = _distinguished(value, args)
    elif isinstance(value, (NormalFormGame, GraphicalModel)):
        out["distinguished"] = "strategy 0 of every player"
    return out


def _write_side_files(args, g: PolynomialGraph, count=None) -> dict:
    written = {}
    if getattr(args, "dot", None):
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(to_dot(g))
        written["dot"] = args.dot
    if getattr(args, "plot", None):
        from .plotting import plot_polygraph
        plot_polygraph(g, args.plot, count)
        written["plot"] = args.plot
    return written


def _out(args, report: dict) -> None:
    sys.stdout.write(emit_report(report, "json" if args.json else "text"))


def cmd_count(args) -> int:
    value, digest = _load(args.file, args.seed)
    report = _header(args, digest, value)
    g = graph_of(value, args)
    count = bernstein_count(g, cap=args.cap, workers=args.workers)
    report["bernstein_count"] = count.bernstein_count
    report["count"] = count
    report.update(_write_side_files(args, g, count))
    _out(args, report)
    return 0 if count.bernstein_count > 0 else 1


def cmd_graph(args) -> int:
    value, digest = _load(args.file, args.seed)
    g = graph_of(value, args)
    report = _header(args, digest, value)
    report["vertices"] = list(g.labels)
    report["blocks"] = [[g.labels[k] for k in b] for b in g.blocks]
    report["edges"] = [f"{g.labels[j]} -> {g.labels[k]}" for j, k in g.edges]
    report["scaled_matrix"] = scaled_matrix_display(g)
    report.update(_write_side_files(args, g))
    _out(args, report)
    return 0


def cmd_equations(args) -> int:
    value, digest = _load(args.file, args.seed)
    sys_ = system_of(value, args)
    g = graph_of(value, args)
    sparsity = validate_sparsity(sys_, g)
    if args.json:
        report = _header(args, digest, value)
        report["system"] = game_to_doc(sys_)
        report["linear"] = system_is_linear(sys_)
        report["sparsity_violations"] = [v.describe(sys_) for v in sparsity.violations]
        _out(args, report)
    else:
        sys.stdout.write(sys_.render() + "\n")
        for v in sparsity.violations:
            sys.stdout.write(f"# {v.describe(sys_)}\n")
    return 0 if sparsity.clean else 1


def cmd_verify(args) -> int:
    value, digest = _load(args.file, args.seed)
    point_doc, _ = _load(args.point, None)
    if not isinstance(point_doc, dict) or "values" not in point_doc:
        raise UsageError(f"{args.point} is not a point file")
    values = point_doc["values"]
    report = _header(args, digest, value)
    if isinstance(value, EntStructure):
        hr = hierarchical_residual(value, values, point_doc["emergent"] or None)
        report["relaxed_residuals"] = list(hr.relaxed_residuals)
        report["consistency_residuals"] = hr.consistency_residuals
        report["profile"] = hr.profile
        report["totally_mixed"] = hr.totally_mixed
        report["all_zero"] = hr.all_zero
        _out(args, report)
        return 0 if hr.all_zero else 1
    sys_ = system_of(value, args)
    if isinstance(value, GameTree):
        point = behavior_point(value, sys_, values, _distinguished(value, args))
    else:
        point = sys_.point_from_names(values)
    res = residual(sys_, point)
    report["point"] = {sys_.variables[k]: v for k, v in sorted(point.items())}
    report["residuals"] = {lbl: r for lbl, r in zip(sys_.equation_labels, res)}
    report["all_zero"] = not any(res)
    _out(args, report)
    return 0 if not any(res) else 1


def cmd_solve_linear(args) -> int:
    value, digest = _load(args.file, args.seed)
    if isinstance(value, EntStructure) and not args.relaxed:
        raise UsageError("ENT files need --relaxed: only the relaxed system is linear-solvable")
    sys_ = system_of(value, args)
    report = _header(args, digest, value)
    if not system_is_linear(sys_):
        report["linear"] = False
        _out(args, report)
        return 1
    a, b = linear_form(sys_)
    sol = solve_linear_exact(a, b)
    report["linear"] = True
    report["status"] = sol.status
    report["rank"] = sol.rank
    if sol.solution is not None:
        report["solution"] = {name: x for name, x in zip(sys_.variables, sol.solution)}
        report["residuals"] = residual(sys_, dict(enumerate(sol.solution)))
    if isinstance(value, EntStructure) and sol.unique:
        leaves = {}
        for name in value.leaves():
            n = value[name].strategies
            probs = [sol.solution[sys_.index(f"s{name}_{k}")] for k in range(1, n)]
            leaves[name] = tuple([1 - sum(probs)] + probs)
        emergent = {}
        for name in value.emergent():
            n = value[name].strategies
            probs = [sol.solution[sys_.index(f"s{name}_{k}")] for k in range(1, n)]
            emergent[name] = tuple([1 - sum(probs)] + probs)
        hr = hierarchical_residual(value, leaves, emergent)
        report["consistency_residuals"] = hr.consistency_residuals
        report["ent_valid"] = validate_ent(value).ok
    _out(args, report)
    return 0 if sol.unique else 1


def cmd_normalize(args) -> int:
    value, _ = _load(args.file, args.seed)
    if not isinstance(value, GameTree):
        raise UsageError("normalize expects an extensive-form file")
    nf = normal_form_of(value)
    doc = game_to_doc(nf)
    doc["strategy_labels"] = [list(x) for x in nf.strategy_labels]
    if args.json:
        import json
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        sys.stdout.write(dump_game(nf))
        for i, labels in enumerate(nf.strategy_labels):
            sys.stdout.write(f"# player {i + 1}: {' | '.join(labels)}\n")
    return 0


def cmd_induct(args) -> int:
    value, digest = _load(args.file, args.seed)
    if not isinstance(value, GameTree):
        raise UsageError("induct expects an extensive-form file")
    res = backward_induction_pure(value)
    report = _header(args, digest, value)
    report["choices"] = dict(sorted(res.choices.items()))
    report["value"] = [rational_text(Fraction(v)) for v in res.value]
    report["ties"] = list(res.ties)
    _out(args, report)
    return 0


def cmd_oracle(args) -> int:
    value, digest = _load(args.file, args.seed)
    g = graph_of(value, args)
    rep = cross_check_count(g, strict=False)
    report = _header(args, digest, value)
    report["oracle"] = rep
    _out(args, report)
    return 0 if rep.agree else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for generic payoffs when a file omits them")
    common.add_argument("--cap", type=int, default=None,
                        help="Ryser dimension cap (default $QUASIEQ_RYSER_CAP or 30)")
    common.add_argument("--workers", type=int, default=1,
                        help="data-parallel chunks for the permanent")
    common.add_argument("--distinguished", default=None,
                        help="baseline edges for extensive games: 'first' or NODE=CHILD,...")

    parser = argparse.ArgumentParser(
        prog="quasieq",
        description="Generic quasiequilibrium counts for sparse game systems.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("file")
        p.set_defaults(func=func)
        return p

    p = add("count", cmd_count, "generic number of torus roots")
    p.add_argument("--dot", help="also write the polynomial graph as Graphviz DOT")
    p.add_argument("--plot", help="also render the graph to an image file")
    p = add("graph", cmd_graph, "show the polynomial graph")
    p.add_argument("--dot", help="write Graphviz DOT to this path")
    p.add_argument("--plot", help="render the graph to an image file")
    add("equations", cmd_equations, "print the indifference system")
    p = add("verify", cmd_verify, "exact residuals at a point")
    p.add_argument("point", help="point file")
    p = add("solve-linear", cmd_solve_linear, "solve a linear indifference system exactly")
    p.add_argument("--relaxed", action="store_true",
                   help="for ENT files: solve the relaxed graphical-model system")
    add("normalize", cmd_normalize, "normal form of an extensive-form game")
    add("induct", cmd_induct, "pure backward induction")
    add("oracle", cmd_oracle, "cross-check the count with brute-force oracles")
    return parser


def run_command(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"quasieq: error: {exc}", file=sys.stderr)
        return 2
    except INPUT_ERRORS as exc:
        print(f"quasieq: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
