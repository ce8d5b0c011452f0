import random

import pytest

from _gen import random_graph
from quasieq.normalform import complete_polygraph
from quasieq.numerics import factorial, permanent_naive, permanent_ryser
from quasieq.polygraph import ZERO_COUNT_CAVEAT, BlockEdgeError, InvalidGraphError, \
    OverlappingBlocksError, SelfLoopError, bernstein_count, has_solution, maximum_matching, \
    nodes_on_cycles, scaled_matrix_display, strongly_connected_components, to_dot, \
    validate_graph


def complete_multipartite(sizes):
    blocks, start = [], 0
    for s in sizes:
        blocks.append(list(range(start, start + s)))
        start += s
    edges = [(j, k) for bj in blocks for bk in blocks if bj is not bk for j in bj for k in bk]
    return validate_graph(blocks, edges)


def cycle_graph(n, size):
    blocks = [list(range(i * size, (i + 1) * size)) for i in range(n)]
    edges = [(j, k) for i in range(n) for j in blocks[i] for k in blocks[(i + 1) % n]]
    return validate_graph(blocks, edges)


def test_factorial_examples():
    assert [factorial(0), factorial(3), factorial(10)] == [1, 6, 3628800]


def test_permanent_examples():
    assert permanent_ryser([[1 if i == j else 0 for j in range(3)] for i in range(3)]) == 1
    j_minus_i = [[int(i != j) for j in range(4)] for i in range(4)]
    assert permanent_ryser(j_minus_i) == permanent_naive(j_minus_i) == 9
    assert permanent_naive([[0, 1], [1, 0]]) == 1


def test_complete_4_partite():
    g = complete_multipartite([2, 2, 2, 2])
    assert g.d == 8
    assert permanent_naive(g.incidence()) == 4752
    rep = bernstein_count(g)
    assert (rep.permanent_g, rep.divisor, rep.bernstein_count) == (4752, 16, 297)
    assert rep.caveat is None and rep.all_on_cycles and rep.matching_feasible
    assert complete_polygraph([3, 3, 3, 3]).incidence() == g.incidence()


def test_cycle_counts_one():
    g = cycle_graph(4, 2)
    assert bernstein_count(g).bernstein_count == 1
    assert nodes_on_cycles(g) == (True, [])


def test_block_without_in_edges_counts_zero():
    g = validate_graph([[0, 1], [2], [3]], [(2, 3), (3, 2), (2, 0), (2, 1)])
    rep = bernstein_count(g)
    assert rep.bernstein_count == 0 and rep.caveat == ZERO_COUNT_CAVEAT
    assert not has_solution(g)


def test_validation_errors():
    with pytest.raises(BlockEdgeError) as exc:
        validate_graph([[0, 1], [2, 3]], [(0, 2)])
    assert list(exc.value.missing) == [3]
    with pytest.raises(SelfLoopError):
        validate_graph([[0], [1]], [(0, 0)])
    with pytest.raises(OverlappingBlocksError):
        validate_graph([[0, 1], [1]], [])
    with pytest.raises(InvalidGraphError):
        validate_graph([[0], [2]], [])
    with pytest.raises(InvalidGraphError):
        validate_graph([[0], [1]], [(0, 5)])


def test_canonical_order_keeps_structure():
    g = validate_graph([[2, 0], [1]], [(1, 2), (1, 0), (0, 1)], labels=["a", "b", "c"])
    assert g.order == (2, 0, 1)
    assert g.labels == ("c", "a", "b")
    assert g.block_sizes == (2, 1)
    assert set(g.edges) == {(2, 0), (2, 1), (1, 2)}


def test_scaled_matrix_display():
    m = scaled_matrix_display(complete_multipartite([2, 2]))
    assert {x for r in m for x in r} == {"0", "0.707107"}
    m = scaled_matrix_display(validate_graph([[0], [1]], [(0, 1)]))
    assert m == [["0", "1"], ["0", "0"]]
    assert scaled_matrix_display(validate_graph([[0], [1]], [])) == [["0", "0"], ["0", "0"]]


def test_nodes_on_cycles_examples():
    assert nodes_on_cycles(validate_graph([[0]], [])) == (False, ["1"])
    dag = validate_graph([[0], [1], [2]], [(0, 1), (1, 2), (0, 2)])
    assert nodes_on_cycles(dag) == (False, ["1", "2", "3"])
    assert not has_solution(dag)


def test_to_dot():
    empty = to_dot(validate_graph([], []))
    assert empty.startswith("digraph") and "->" not in empty
    one = to_dot(validate_graph([[0], [1]], [(0, 1)]))
    assert one.count("->") == 1


def brute_sccs(adj):
    n = len(adj)
    reach = [{j} for j in range(n)]
    for j in range(n):
        stack = [j]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in reach[j]:
                    reach[j].add(w)
                    stack.append(w)
    return {frozenset(k for k in range(n) if k in reach[j] and j in reach[k]) for j in range(n)}


def test_scc_matches_reachability():
    rng = random.Random(5)
    for _ in range(150):
        g, _, _ = random_graph(rng, max_d=10)
        got = {frozenset(c) for c in strongly_connected_components(g.adjacency)}
        assert got == brute_sccs(g.adjacency)


def test_matching_size_matches_count_positivity():
    rng = random.Random(6)
    for _ in range(250):
        g, _, _ = random_graph(rng)
        matching = maximum_matching(g.adjacency, g.d)
        count = bernstein_count(g).bernstein_count
        assert (len(matching) == g.d) == has_solution(g) == (count > 0)
        for j, k in matching.items():
            assert k in g.adjacency[j]


def test_relabel_invariance():
    rng = random.Random(8)
    for _ in range(100):
        g, blocks, edges = random_graph(rng)
        perm = list(range(g.d))
        rng.shuffle(perm)
        blocks2 = [[perm[v] for v in b] for b in reversed(blocks)]
        edges2 = [(perm[j], perm[k]) for j, k in edges]
        h = validate_graph(blocks2, edges2)
        assert bernstein_count(h).bernstein_count == bernstein_count(g).bernstein_count


def test_with_edges_checks_block_property():
    g = validate_graph([[0], [1, 2]], [])
    with pytest.raises(BlockEdgeError):
        g.with_edges([(0, 1)])
    assert g.with_edges([(0, 1), (0, 2)]).edges == [(0, 1), (0, 2)]
