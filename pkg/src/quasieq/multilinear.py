"""Squarefree multilinear polynomials over the rationals, and systems of them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .numerics import RationalMatrix
from .polygraph import PolynomialGraph, validate_graph


class MissingAssignment(KeyError):
    pass


class MultilinearPoly:
    """A polynomial whose monomials are products of distinct variables.

    Variables are integer ids. ``terms`` maps a frozenset of ids (the
    monomial) to its non-zero Fraction coefficient.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Iterable[int], object] | None = None):
        clean: dict[frozenset[int], Fraction] = {}
        for mono, c in (terms or {}).items():
            key = frozenset(mono)
            value = clean.get(key, Fraction(0)) + Fraction(c)
            if value:
                clean[key] = value
            else:
                clean.pop(key, None)
        self.terms = clean

    @classmethod
    def constant(cls, c) -> "MultilinearPoly":
        return cls({frozenset(): c})

    @classmethod
    def var(cls, v: int, coeff=1) -> "MultilinearPoly":
        return cls({frozenset([v]): coeff})

    @property
    def variables(self) -> frozenset[int]:
        out: set[int] = set()
        for mono in self.terms:
            out |= mono
        return frozenset(out)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not mono for mono in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get(frozenset(), Fraction(0))

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def __add__(self, other) -> "MultilinearPoly":
        if not isinstance(other, MultilinearPoly):
            other = MultilinearPoly.constant(other)
        merged = dict(self.terms)
        for mono, c in other.terms.items():
            merged[mono] = merged.get(mono, 0) + c
        return MultilinearPoly(merged)

    __radd__ = __add__

    def __neg__(self) -> "MultilinearPoly":
        return MultilinearPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "MultilinearPoly":
        if not isinstance(other, MultilinearPoly):
            other = MultilinearPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> "MultilinearPoly":
        return (-self) + other

    def __mul__(self, other) -> "MultilinearPoly":
        """Scalar product, or product with a polynomial in disjoint variables."""
        if not isinstance(other, MultilinearPoly):
            c = Fraction(other)
            return MultilinearPoly({m: c * v for m, v in self.terms.items()})
        if self.variables & other.variables:
            raise ValueError("product would not be squarefree (shared variables)")
        out: dict[frozenset[int], Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                key = m1 | m2
                out[key] = out.get(key, 0) + c1 * c2
        return MultilinearPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultilinearPoly):
            try:
                other = MultilinearPoly.constant(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def rename(self, mapping: Mapping[int, int]) -> "MultilinearPoly":
        return MultilinearPoly({frozenset(mapping[v] for v in m): c
                                for m, c in self.terms.items()})

    def substitute(self, v: int, replacement: "MultilinearPoly") -> "MultilinearPoly":
        out = MultilinearPoly()
        for mono, c in self.terms.items():
            if v in mono:
                rest = MultilinearPoly({mono - {v}: c})
                out = out + rest * replacement
            else:
                out = out + MultilinearPoly({mono: c})
        return out

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"

        def name(v):
            return names[v] if names is not None else f"x{v}"

        def sort_key(item):
            mono = item[0]
            return (len(mono), sorted(mono))

        parts = []
        for mono, c in sorted(self.terms.items(), key=sort_key):
            mono_txt = "*".join(name(v) for v in sorted(mono))
            mag = abs(c)
            if mono_txt:
                body = mono_txt if mag == 1 else f"{mag}*{mono_txt}"
            else:
                body = str(mag)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"MultilinearPoly({self.format()})"


def evaluate(p: MultilinearPoly, point: Mapping[int, object]) -> Fraction:
    total = Fraction(0)
    for mono, c in p.terms.items():
        term = c
        for v in mono:
            try:
                term *= Fraction(point[v])
            except KeyError:
                raise MissingAssignment(v) from None
        total += term
    return total


def dehomogenize(p: MultilinearPoly, blocks: Sequence[Sequence[int]],
                 distinguished: Mapping[int, int] | None = None) -> MultilinearPoly:
    """Eliminate one variable per block using the sum-to-one constraint.

    ``blocks`` lists the full variable groups; ``distinguished`` maps a block
    index to the variable replaced by ``1 - (sum of the block's others)``.
    By default the first variable of each block is eliminated.
    """
    for bi, blk in enumerate(blocks):
        x0 = blk[0] if distinguished is None or bi not in distinguished else distinguished[bi]
        if x0 not in blk:
            raise ValueError(f"distinguished variable {x0} is not in block {list(blk)}")
        if x0 not in p.variables:
            continue
        rest = MultilinearPoly.constant(1)
        for v in blk:
            if v != x0:
                rest = rest - MultilinearPoly.var(v)
        p = p.substitute(x0, rest)
    return p


def newton_support(p: MultilinearPoly, n_vars: int | None = None) -> set[tuple[int, ...]]:
    """0/1 exponent vectors of the monomials of ``p``."""
    if n_vars is None:
        n_vars = max(p.variables, default=-1) + 1
    return {tuple(1 if v in mono else 0 for v in range(n_vars)) for mono in p.terms}


@dataclass(frozen=True)
class PolySystem:
    """d equations (each ``= 0``) in d named variables grouped into blocks.

    Variable ``k`` is the variable of graph vertex ``k``; equation ``j``
    belongs to vertex ``j``.
    """

    variables: tuple[str, ...]
    blocks: tuple[tuple[int, ...], ...]
    equations: tuple[MultilinearPoly, ...]
    equation_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if len(self.equations) != len(self.variables):
            raise ValueError(f"{len(self.equations)} equations in "
                             f"{len(self.variables)} variables")
        flat = sorted(v for b in self.blocks for v in b)
        if flat != list(range(len(self.variables))):
            raise ValueError("blocks must partition the variables")
        if not self.equation_labels:
            object.__setattr__(self, "equation_labels", self.variables)

    @property
    def d(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        return self.variables.index(name)

    def block_of(self) -> dict[int, int]:
        return {v: bi for bi, blk in enumerate(self.blocks) for v in blk}

    def point_from_names(self, values: Mapping[str, object]) -> dict[int, Fraction]:
        return {self.index(k): Fraction(v) for k, v in values.items()
                if k in self.variables}

    def render(self) -> str:
        width = max((len(lbl) for lbl in self.equation_labels), default=0)
        lines = [f"[{lbl:>{width}}]  {eq.format(self.variables)} = 0"
                 for lbl, eq in zip(self.equation_labels, self.equations)]
        return "\n".join(lines)


def residual(sys: PolySystem, point: Mapping[int, object]) -> list[Fraction]:
    missing = [k for k in range(sys.d) if k not in point]
    if missing:
        raise MissingAssignment(sys.variables[missing[0]])
    return [evaluate(eq, point) for eq in sys.equations]


@dataclass(frozen=True)
class SparsityViolation:
    condition: int
    equation: int
    monomial: tuple[int, ...]
    variables: tuple[int, ...]

    def describe(self, sys: PolySystem) -> str:
        names = ", ".join(sys.variables[v] for v in self.variables)
        what = {1: "monomial is not squarefree",
                2: "same-block variables share a monomial",
                3: "variable occurs without a graph edge"}[self.condition]
        return f"condition {self.condition} in equation {sys.equation_labels[self.equation]}: {what} ({names})"


@dataclass(frozen=True)
class SparsityReport:
    violations: tuple[SparsityViolation, ...]

    @property
    def clean(self) -> bool:
        return not self.violations


def validate_sparsity(sys: PolySystem, g: PolynomialGraph) -> SparsityReport:
    """Check the three sparsity conditions of ``sys`` against graph ``g``.

    ``g`` must be expressed over the same vertex ids as the system (vertex k
    is variable k); its canonical order is mapped back through ``g.order``.
    """
    if g.d != sys.d:
        raise ValueError(f"graph has {g.d} vertices, system has {sys.d} variables")
    graph_blocks = sorted(tuple(sorted(g.order[k] for k in blk)) for blk in g.blocks)
    if graph_blocks != sorted(tuple(sorted(b)) for b in sys.blocks):
        raise ValueError("system blocks do not match graph blocks")
    canon = {orig: k for k, orig in enumerate(g.order)}
    block = sys.block_of()
    found = []
    for j, eq in enumerate(sys.equations):
        out = g.adjacency[canon[j]]
        for mono in eq.terms:
            vs = tuple(sorted(mono))
            # monomials are sets, so condition 1 can only fail for non-set input
            if len(set(vs)) != len(vs):
                found.append(SparsityViolation(1, j, vs, vs))
            by_block: dict[int, list[int]] = {}
            for v in vs:
                by_block.setdefault(block[v], []).append(v)
            for members in by_block.values():
                if len(members) > 1:
                    found.append(SparsityViolation(2, j, vs, tuple(members)))
            for v in vs:
                if canon[v] not in out:
                    found.append(SparsityViolation(3, j, vs, (v,)))
    return SparsityReport(tuple(found))


def system_polygraph(sys: PolySystem) -> PolynomialGraph:
    """Smallest block-closed polynomial graph supporting ``sys``.

    f_j gets an edge to every vertex of a block as soon as one variable of
    that block occurs in it. Raises if some f_j uses its own block.
    """
    block = sys.block_of()
    edges = set()
    for j, eq in enumerate(sys.equations):
        for bi in {block[v] for v in eq.variables}:
            for k in sys.blocks[bi]:
                edges.add((j, k))
    return validate_graph([list(b) for b in sys.blocks], sorted(edges), list(sys.variables))


def system_is_linear(sys: PolySystem) -> bool:
    return all(eq.degree() <= 1 for eq in sys.equations)


def linear_form(sys: PolySystem) -> tuple[RationalMatrix, list[Fraction]]:
    """``(A, b)`` with ``A x = b`` equivalent to a linear system."""
    if not system_is_linear(sys):
        raise ValueError("system is not linear")
    rows, rhs = [], []
    for eq in sys.equations:
        row = [Fraction(0)] * sys.d
        for mono, c in eq.terms.items():
            if mono:
                (v,) = mono
                row[v] = c
        rows.append(row)
        rhs.append(-eq.constant_term())
    return RationalMatrix.from_rows(rows, cols=sys.d), rhs
