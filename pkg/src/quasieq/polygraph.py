"""Polynomial graphs and the generic root counts they determine.

A polynomial graph is a directed graph on the d equations/variables of a
sparse multilinear system, together with a partition of the vertices into
blocks. Edges are block-closed: a vertex points at either every vertex of a
block or none of it. The generic number of roots in the complex torus is
``per(g) / prod(d_i!)`` where ``g`` is the 0/1 adjacency matrix and ``d_i``
the block sizes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .numerics import factorial, permanent_ryser

ZERO_COUNT_CAVEAT = (
    "a zero count means the system either has no solution in the torus "
    "or its solution set has positive dimension; the count alone cannot "
    "tell these apart"
)


class InvalidGraphError(ValueError):
    pass


class SelfLoopError(InvalidGraphError):
    def __init__(self, vertex):
        super().__init__(f"self-loop at vertex {vertex}")
        self.vertex = vertex


class BlockEdgeError(InvalidGraphError):
    """A source reaches part of a block but not all of it."""

    def __init__(self, source, block, missing):
        super().__init__(
            f"block-edge property violated: vertex {source} reaches block "
            f"{list(block)} but not {list(missing)}")
        self.source = source
        self.block = tuple(block)
        self.missing = tuple(missing)


class OverlappingBlocksError(InvalidGraphError):
    def __init__(self, vertex):
        super().__init__(f"vertex {vertex} appears in more than one block")
        self.vertex = vertex


class DivisibilityError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PolynomialGraph:
    """A validated polynomial graph in canonical (contiguous-block) order.

    Canonical vertex ``k`` is original vertex ``order[k]``. ``labels`` are
    indexed canonically. Build instances with :func:`validate_graph`.
    """

    block_sizes: tuple[int, ...]
    adjacency: tuple[frozenset[int], ...]
    order: tuple[int, ...]
    labels: tuple[str, ...]

    @property
    def d(self) -> int:
        return len(self.adjacency)

    @property
    def n_blocks(self) -> int:
        return len(self.block_sizes)

    @property
    def blocks(self) -> tuple[range, ...]:
        out, start = [], 0
        for size in self.block_sizes:
            out.append(range(start, start + size))
            start += size
        return tuple(out)

    def block_of(self, k: int) -> int:
        start = 0
        for i, size in enumerate(self.block_sizes):
            if k < start + size:
                return i
            start += size
        raise IndexError(k)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(j, k) for j in range(self.d) for k in sorted(self.adjacency[j])]

    def incidence(self) -> list[list[int]]:
        """The d x d 0/1 matrix g with g[j][k] = 1 iff there is an edge j -> k."""
        return [[1 if k in self.adjacency[j] else 0 for k in range(self.d)]
                for j in range(self.d)]

    def block_adjacency(self) -> list[list[int]]:
        """a[i][j] = 1 iff vertex j points into block i."""
        return [[1 if blk[0] in self.adjacency[j] else 0 for j in range(self.d)]
                for blk in self.blocks]

    def divisor(self) -> int:
        out = 1
        for size in self.block_sizes:
            out *= factorial(size)
        return out

    def with_edges(self, extra: Iterable[tuple[int, int]]) -> "PolynomialGraph":
        """A new graph with extra canonical edges (validated again)."""
        edges = self.edges + list(extra)
        g = validate_graph([list(b) for b in self.blocks], edges, self.labels)
        return g


def validate_graph(blocks: Sequence[Sequence[int]], edges: Iterable[Sequence[int]],
                   labels: Sequence[str] | None = None) -> PolynomialGraph:
    """Check the polynomial-graph hypotheses and canonicalize block order.

    ``blocks`` must partition ``range(d)``; edges are (source, target) pairs
    over the same vertex ids. Vertices are renumbered so that blocks occupy
    contiguous index ranges in the order given.
    """
    seen: dict[int, int] = {}
    for bi, blk in enumerate(blocks):
        for v in blk:
            if v in seen:
                raise OverlappingBlocksError(v)
            seen[v] = bi
    d = len(seen)
    if set(seen) != set(range(d)):
        missing = sorted(set(range(max(seen, default=-1) + 1)) - set(seen))
        raise InvalidGraphError(f"blocks do not partition 0..{d - 1}; missing {missing}")
    if any(len(b) == 0 for b in blocks):
        raise InvalidGraphError("empty block")
    if labels is None:
        labels = [str(v + 1) for v in range(d)]
    elif len(labels) != d:
        raise InvalidGraphError(f"{len(labels)} labels for {d} vertices")

    out = [set() for _ in range(d)]
    for e in edges:
        j, k = e
        if j not in seen or k not in seen:
            raise InvalidGraphError(f"edge {j}->{k} references an unknown vertex")
        if j == k:
            raise SelfLoopError(j)
        out[j].add(k)

    for j in range(d):
        for blk in blocks:
            hit = [k for k in blk if k in out[j]]
            if hit and len(hit) != len(blk):
                raise BlockEdgeError(j, blk, [k for k in blk if k not in out[j]])

    order = tuple(v for blk in blocks for v in blk)
    position = {v: k for k, v in enumerate(order)}
    adjacency = tuple(frozenset(position[k] for k in out[v]) for v in order)
    return PolynomialGraph(
        block_sizes=tuple(len(b) for b in blocks),
        adjacency=adjacency,
        order=order,
        labels=tuple(labels[v] for v in order),
    )


@dataclass(frozen=True)
class CountReport:
    permanent_g: int
    divisor: int
    bernstein_count: int
    matching_feasible: bool
    all_on_cycles: bool
    off_cycle: tuple[str, ...] = ()
    caveat: str | None = field(default=None)


def bernstein_count(g: PolynomialGraph, cap: int | None = None,
                    workers: int = 1) -> CountReport:
    """Generic number of torus roots of any system with polynomial graph ``g``."""
    feasible = has_solution(g)
    # a 0/1 permanent vanishes exactly when there is no perfect matching
    per = permanent_ryser(g.incidence(), cap=cap, workers=workers) if feasible else 0
    div = g.divisor()
    count, rem = divmod(per, div)
    if rem:
        raise DivisibilityError(
            f"per(g)={per} is not divisible by prod d_i! = {div}")
    on_cycles, off = nodes_on_cycles(g)
    return CountReport(
        permanent_g=per,
        divisor=div,
        bernstein_count=count,
        matching_feasible=feasible,
        all_on_cycles=on_cycles,
        off_cycle=tuple(off),
        caveat=ZERO_COUNT_CAVEAT if count == 0 else None,
    )


def scaled_matrix_display(g: PolynomialGraph, digits: int = 6) -> list[list[str]]:
    """Decimal rendering of the scaled matrix with entries (1/d_i!)^(1/d_i).

    Display only; counts never go through these floating-point values.
    """
    scale = []
    for size in g.block_sizes:
        value = (1.0 / factorial(size)) ** (1.0 / size)
        text = f"{value:.{digits}f}".rstrip("0").rstrip(".")
        scale.extend([text] * size)
    return [[scale[k] if k in g.adjacency[j] else "0" for k in range(g.d)]
            for j in range(g.d)]


def maximum_matching(adj: Sequence[Iterable[int]], n_right: int) -> dict[int, int]:
    """Hopcroft-Karp on a bipartite graph given as left -> right neighbours.

    Returns the matching as a left -> right dict.
    """
    adj = [sorted(a) for a in adj]
    n_left = len(adj)
    free = -1
    match_l = [free] * n_left
    match_r = [free] * n_right
    inf = n_left + n_right + 1

    def bfs():
        dist = [inf] * n_left
        q = deque()
        for u in range(n_left):
            if match_l[u] == free:
                dist[u] = 0
                q.append(u)
        found = inf
        while q:
            u = q.popleft()
            if dist[u] >= found:
                continue
            for v in adj[u]:
                w = match_r[v]
                if w == free:
                    found = min(found, dist[u] + 1)
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return found, dist

    def dfs(root, dist, found):
        # iterative augmenting-path search along the BFS layering
        stack = [(root, iter(adj[root]))]
        path = []
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                w = match_r[v]
                if w == free:
                    if dist[u] + 1 == found:
                        path.append((u, v))
                        for a, b in path:
                            match_l[a] = b
                            match_r[b] = a
                        return True
                elif dist[w] == dist[u] + 1:
                    path.append((u, v))
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                dist[u] = inf
                stack.pop()
                if path:
                    path.pop()
        return False

    while True:
        found, dist = bfs()
        if found == inf:
            break
        for u in range(n_left):
            if match_l[u] == free:
                dfs(u, dist, found)
    return {u: v for u, v in enumerate(match_l) if v != free}


def has_solution(g: PolynomialGraph) -> bool:
    """True iff the source/target bipartite split of ``g`` has a perfect matching."""
    return len(maximum_matching(g.adjacency, g.d)) == g.d


def strongly_connected_components(adj: Sequence[Iterable[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative."""
    n = len(adj)
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    neighbours = [sorted(a) for a in adj]
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            for pos in range(i, len(neighbours[v])):
                w = neighbours[v][pos]
                if index[w] is None:
                    work.append((v, pos + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def nodes_on_cycles(g: PolynomialGraph) -> tuple[bool, list[str]]:
    """Whether every vertex lies on a directed cycle, plus the labels that don't.

    With no self-loops a vertex is on a cycle iff its strongly connected
    component has at least two vertices.
    """
    off = []
    for comp in strongly_connected_components(g.adjacency):
        if len(comp) < 2:
            off.extend(comp)
    off.sort()
    return not off, [g.labels[k] for k in off]


def _dot_id(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: PolynomialGraph, name: str = "polygraph") -> str:
    lines = [f"digraph {_dot_id(name)} {{"]
    for i, blk in enumerate(g.blocks):
        lines.append(f"  subgraph cluster_{i} {{")
        lines.append(f'    label="T{i + 1}";')
        for k in blk:
            lines.append(f"    {_dot_id(g.labels[k])};")
        lines.append("  }")
    for j, k in g.edges:
        lines.append(f"  {_dot_id(g.labels[j])} -> {_dot_id(g.labels[k])};")
    lines.append("}")
    return "\n".join(lines) + "\n"
