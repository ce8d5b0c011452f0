"""JSON game files and report serialization.

Every file is a JSON object with a ``"format"`` tag. Rationals are written as
bare integers or ``"p/q"`` strings; floats are rejected anywhere a number is
expected, so values stay exact from file to report.
"""

from __future__ import annotations

import dataclasses
import json
import math
import random
import re
from fractions import Fraction
from typing import Any

from .ent import EntNode, EntStructure
from .extensive import GameTree, Node
from .multilinear import MultilinearPoly, PolySystem
from .normalform import GraphicalModel, NormalFormGame
from .polygraph import PolynomialGraph, validate_graph

FORMATS = ("normal_form", "graphical", "extensive", "ent", "polygraph", "system", "point")

_RATIONAL = re.compile(r"^\s*[+-]?\d+\s*(/\s*\d+\s*)?$")


class GameFileError(ValueError):
    """Malformed input; ``where`` names the offending field or position."""

    def __init__(self, message: str, where: str | None = None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


class ParseError(GameFileError):
    pass


class SchemaError(GameFileError):
    pass


class FloatRejected(SchemaError):
    pass


def rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool):
        raise SchemaError("expected a rational, got a boolean", where)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise FloatRejected(f"float {value!r} rejected; write it as an exact \"p/q\" string",
                            where)
    if isinstance(value, str):
        if not _RATIONAL.match(value):
            if re.match(r"^\s*[+-]?(\d+\.\d*|\.\d+|\d+[eE])", value):
                raise FloatRejected(f"decimal {value!r} rejected; write it as \"p/q\"", where)
            raise SchemaError(f"{value!r} is not an integer or p/q rational", where)
        try:
            return Fraction(value.replace(" ", ""))
        except ZeroDivisionError:
            raise SchemaError(f"{value!r} has a zero denominator", where) from None
    raise SchemaError(f"expected a rational, got {type(value).__name__}", where)


def rational_text(x: Fraction) -> int | str:
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", where)
    if key not in obj:
        raise SchemaError(f"missing field {key!r}", where)
    return obj[key]


def _int(value, where: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError("expected an integer", where)
    if minimum is not None and value < minimum:
        raise SchemaError(f"must be >= {minimum}", where)
    return value


def _list(value, where: str) -> list:
    if not isinstance(value, list):
        raise SchemaError("expected a list", where)
    return value


def _rationals(values, where: str) -> tuple[Fraction, ...]:
    return tuple(rational(v, f"{where}[{k}]") for k, v in enumerate(_list(values, where)))


# -- readers -------------------------------------------------------------

def _read_normal_form(doc: dict, seed: int | None):
    counts = tuple(_int(c, f"strategies[{i}]", 1)
                   for i, c in enumerate(_list(_require(doc, "strategies", "$"), "strategies")))
    size = math.prod(counts)
    if "payoffs" not in doc:
        rng = random.Random(seed or 0)
        tables = tuple(tuple(Fraction(rng.randint(-10, 10)) for _ in range(size))
                       for _ in counts)
        return NormalFormGame(counts, tables)
    payoffs = _list(doc["payoffs"], "payoffs")
    if len(payoffs) != len(counts):
        raise SchemaError(f"need {len(counts)} payoff tables", "payoffs")
    tables = []
    for i, table in enumerate(payoffs):
        t = _rationals(table, f"payoffs[{i}]")
        if len(t) != size:
            raise SchemaError(f"expected {size} entries, got {len(t)}", f"payoffs[{i}]")
        tables.append(t)
    return NormalFormGame(counts, tuple(tables))


def _read_graphical(doc: dict, seed: int | None):
    counts = tuple(_int(c, f"strategies[{i}]", 1)
                   for i, c in enumerate(_list(_require(doc, "strategies", "$"), "strategies")))
    nbrs = []
    for i, row in enumerate(_list(_require(doc, "neighbors", "$"), "neighbors")):
        row = tuple(_int(j, f"neighbors[{i}]", 0) for j in _list(row, f"neighbors[{i}]"))
        if any(j >= len(counts) for j in row):
            raise SchemaError("neighbour index out of range", f"neighbors[{i}]")
        nbrs.append(row)
    if len(nbrs) != len(counts):
        raise SchemaError(f"need {len(counts)} neighbour lists", "neighbors")
    if "payoffs" not in doc:
        rng = random.Random(seed or 0)
        tables = [tuple(Fraction(rng.randint(-10, 10))
                        for _ in range(counts[i] * math.prod(counts[j] for j in nbrs[i])))
                  for i in range(len(counts))]
    else:
        tables = [_rationals(t, f"payoffs[{i}]")
                  for i, t in enumerate(_list(doc["payoffs"], "payoffs"))]
    try:
        return GraphicalModel(counts, tuple(nbrs), tuple(tables))
    except ValueError as exc:
        raise SchemaError(str(exc), "payoffs") from None


def _read_node(obj, where: str, n_players: int) -> Node:
    name = _require(obj, "name", where)
    if not isinstance(name, str):
        raise SchemaError("node name must be a string", f"{where}.name")
    if "payoffs" in obj:
        if "children" in obj:
            raise SchemaError("a node cannot have both payoffs and children", where)
        return Node(name, None, payoffs=_rationals(obj["payoffs"], f"{where}.payoffs"))
    player = _int(_require(obj, "player", where), f"{where}.player", 0)
    kids = tuple(_read_node(c, f"{where}.children[{k}]", n_players)
                 for k, c in enumerate(_list(_require(obj, "children", where),
                                             f"{where}.children")))
    weights = ()
    if player == 0:
        weights = _rationals(_require(obj, "weights", where), f"{where}.weights")
    elif "weights" in obj:
        raise SchemaError("only chance nodes (player 0) carry weights", where)
    return Node(name, player, kids, weights)


def _read_extensive(doc: dict, seed: int | None):
    n = _int(_require(doc, "players", "$"), "players", 1)
    root = _read_node(_require(doc, "tree", "$"), "tree", n)
    try:
        return GameTree(n, root)
    except ValueError as exc:
        raise SchemaError(str(exc), "tree") from None


def _read_ent(doc: dict, seed: int | None):
    nodes = []
    for k, obj in enumerate(_list(_require(doc, "nodes", "$"), "nodes")):
        where = f"nodes[{k}]"
        name = _require(obj, "name", where)
        parent = obj.get("parent")
        if parent is None:
            nodes.append(EntNode(str(name), None))
            continue
        strategies = _int(_require(obj, "strategies", where), f"{where}.strategies", 1)
        agg = tuple(_rationals(row, f"{where}.aggregation[{r}]")
                    for r, row in enumerate(_list(obj.get("aggregation", []),
                                                  f"{where}.aggregation")))
        gamma = {str(a): rational(g, f"{where}.gamma.{a}")
                 for a, g in (obj.get("gamma") or {}).items()}
        payoffs = _rationals(_require(obj, "payoffs", where), f"{where}.payoffs")
        nodes.append(EntNode(str(name), str(parent), strategies, agg, gamma, payoffs))
    try:
        return EntStructure(nodes)
    except ValueError as exc:
        raise SchemaError(str(exc), "nodes") from None


def _read_polygraph(doc: dict, seed: int | None):
    blocks = [[_int(v, f"blocks[{i}]", 0) for v in _list(b, f"blocks[{i}]")]
              for i, b in enumerate(_list(_require(doc, "blocks", "$"), "blocks"))]
    edges = []
    for k, e in enumerate(_list(doc.get("edges", []), "edges")):
        e = _list(e, f"edges[{k}]")
        if len(e) != 2:
            raise SchemaError("an edge is a [source, target] pair", f"edges[{k}]")
        edges.append((_int(e[0], f"edges[{k}]", 0), _int(e[1], f"edges[{k}]", 0)))
    labels = doc.get("labels")
    return validate_graph(blocks, edges, labels)


def _read_system(doc: dict, seed: int | None):
    names = [str(v) for v in _list(_require(doc, "variables", "$"), "variables")]
    pos = {v: i for i, v in enumerate(names)}
    blocks = []
    for i, b in enumerate(_list(_require(doc, "blocks", "$"), "blocks")):
        try:
            blocks.append(tuple(pos[v] for v in _list(b, f"blocks[{i}]")))
        except KeyError as exc:
            raise SchemaError(f"unknown variable {exc.args[0]!r}", f"blocks[{i}]") from None
    eqs = []
    for j, eq in enumerate(_list(_require(doc, "equations", "$"), "equations")):
        terms = {}
        for t, term in enumerate(_list(eq, f"equations[{j}]")):
            where = f"equations[{j}][{t}]"
            term = _list(term, where)
            if len(term) != 2:
                raise SchemaError("a term is [coefficient, [variables...]]", where)
            vars_ = _list(term[1], where)
            if len(set(vars_)) != len(vars_):
                raise SchemaError("monomial repeats a variable (not squarefree)", where)
            try:
                mono = frozenset(pos[v] for v in vars_)
            except KeyError as exc:
                raise SchemaError(f"unknown variable {exc.args[0]!r}", where) from None
            terms[mono] = terms.get(mono, 0) + rational(term[0], where)
        eqs.append(MultilinearPoly(terms))
    labels = tuple(str(x) for x in doc.get("labels", ())) or ()
    try:
        return PolySystem(tuple(names), tuple(blocks), tuple(eqs), labels)
    except ValueError as exc:
        raise SchemaError(str(exc), "$") from None


def _read_point(doc: dict, seed: int | None) -> dict[str, Any]:
    values = _require(doc, "values", "$")
    if not isinstance(values, dict):
        raise SchemaError("expected an object", "values")
    out = {}
    for k, v in values.items():
        if isinstance(v, list):
            out[k] = _rationals(v, f"values.{k}")
        else:
            out[k] = rational(v, f"values.{k}")
    emergent = doc.get("emergent") or {}
    out_em = {k: (_rationals(v, f"emergent.{k}") if isinstance(v, list)
                  else rational(v, f"emergent.{k}")) for k, v in emergent.items()}
    return {"values": out, "emergent": out_em}


_READERS = {
    "normal_form": _read_normal_form,
    "graphical": _read_graphical,
    "extensive": _read_extensive,
    "ent": _read_ent,
    "polygraph": _read_polygraph,
    "system": _read_system,
    "point": _read_point,
}


def parse_game_file(text: str, seed: int | None = None):
    """Parse a game file into the matching library value.

    ``seed`` drives the generic payoff draw when a normal-form or graphical
    file omits its payoffs.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    fmt = _require(doc, "format", "$")
    if fmt not in _READERS:
        raise SchemaError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}",
                          "format")
    return _READERS[fmt](doc, seed)


# -- writers -------------------------------------------------------------

def _node_doc(node: Node) -> dict:
    if node.is_leaf:
        return {"name": node.name, "payoffs": [rational_text(x) for x in node.payoffs]}
    doc = {"name": node.name, "player": node.player}
    if node.is_chance:
        doc["weights"] = [rational_text(w) for w in node.weights]
    doc["children"] = [_node_doc(c) for c in node.children]
    return doc


def game_to_doc(value) -> dict:
    """Inverse of :func:`parse_game_file` (as a JSON-ready dict)."""
    if isinstance(value, NormalFormGame):
        return {"format": "normal_form", "strategies": list(value.strategy_counts),
                "payoffs": [[rational_text(x) for x in t] for t in value.payoffs]}
    if isinstance(value, GraphicalModel):
        return {"format": "graphical", "strategies": list(value.strategy_counts),
                "neighbors": [list(n) for n in value.neighbors],
                "payoffs": [[rational_text(x) for x in t] for t in value.local_payoffs]}
    if isinstance(value, GameTree):
        return {"format": "extensive", "players": value.n_players,
                "tree": _node_doc(value.root)}
    if isinstance(value, EntStructure):
        nodes = []
        for n in value.nodes:
            if n.parent is None:
                nodes.append({"name": n.name, "parent": None})
                continue
            doc = {"name": n.name, "parent": n.parent, "strategies": n.strategies}
            if n.aggregation:
                doc["aggregation"] = [[rational_text(x) for x in r] for r in n.aggregation]
            if n.gamma:
                doc["gamma"] = {k: rational_text(Fraction(g)) for k, g in n.gamma.items()}
            doc["payoffs"] = [rational_text(x) for x in n.payoffs]
            nodes.append(doc)
        return {"format": "ent", "nodes": nodes}
    if isinstance(value, PolynomialGraph):
        # canonical numbering
        return {"format": "polygraph", "blocks": [list(b) for b in value.blocks],
                "edges": [list(e) for e in value.edges], "labels": list(value.labels)}
    if isinstance(value, PolySystem):
        eqs = []
        for eq in value.equations:
            terms = sorted(eq.terms.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
            eqs.append([[rational_text(c), [value.variables[v] for v in sorted(m)]]
                        for m, c in terms])
        return {"format": "system", "variables": list(value.variables),
                "blocks": [[value.variables[v] for v in b] for b in value.blocks],
                "equations": eqs, "labels": list(value.equation_labels)}
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dump_game(value) -> str:
    return json.dumps(game_to_doc(value), indent=2) + "\n"


def jsonable(obj):
    """Recursively convert reports to JSON-safe data; Fractions become strings."""
    if isinstance(obj, Fraction):
        return str(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


def emit_report(report: dict, fmt: str = "text") -> str:
    """Serialize a report dict deterministically as text or JSON.

    Both forms carry the same values; JSON writes every rational as a string.
    """
    data = jsonable(report)
    if fmt == "json":
        return json.dumps(data, indent=2, sort_keys=True) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    lines: list[str] = []

    def walk(value, prefix: str):
        if isinstance(value, dict):
            for k in sorted(value):
                walk(value[k], f"{prefix}.{k}" if prefix else k)
        elif isinstance(value, list) and value and all(isinstance(v, (dict, list)) for v in value):
            for i, v in enumerate(value):
                walk(v, f"{prefix}[{i}]")
        elif isinstance(value, list):
            lines.append(f"{prefix}: " + ", ".join(_scalar(v) for v in value))
        else:
            lines.append(f"{prefix}: {_scalar(value)}")

    walk(data, "")
    return "\n".join(lines) + "\n"


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)
