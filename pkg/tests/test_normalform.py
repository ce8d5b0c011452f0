import random
from fractions import Fraction as F

import pytest

from quasieq.multilinear import evaluate, residual, validate_sparsity
from quasieq.normalform import DegeneratePlayerError, MixedProfile, NormalFormGame, \
    all_profiles, complete_polygraph, expected_utility, graphical_polygraph, \
    indifference_system, profile_index, random_graphical, random_normal_form
from quasieq.polygraph import bernstein_count


def test_profile_index_first_coordinate_fastest():
    counts = (2, 3)
    profs = list(all_profiles(counts))
    assert profs[:3] == [(0, 0), (1, 0), (0, 1)]
    assert [profile_index(p, counts) for p in profs] == list(range(6))


def test_expected_utility_examples():
    g = random_normal_form([2, 3, 2], 5)
    for s in all_profiles(g.strategy_counts):
        assert expected_utility(g, 1, MixedProfile.pure(s, g.strategy_counts)) == g.payoff(1, s)
    h = NormalFormGame((2, 2), ((F(1), F(2), F(3), F(6)), (F(0),) * 4))
    assert expected_utility(h, 0, MixedProfile.uniform((2, 2))) == 3
    with pytest.raises(ValueError):
        expected_utility(h, 0, MixedProfile.uniform((2, 3)))


def test_graphical_matches_its_normal_form():
    rng = random.Random(12)
    for _ in range(10):
        m = random_graphical([2, 3, 2], [[1], [0, 2], []], rng)
        nf = m.to_normal_form()
        sigma = MixedProfile.of(*[[F(rng.randint(1, 5)) for _ in range(n)]
                                  for n in m.strategy_counts])
        sigma = MixedProfile(tuple(tuple(x / sum(v) for x in v) for v in sigma.strategies))
        for i in range(3):
            assert expected_utility(m, i, sigma) == expected_utility(nf, i, sigma)


def random_mixed(rng, counts):
    out = []
    for n in counts:
        w = [rng.randint(1, 9) for _ in range(n)]
        out.append(tuple(F(x, sum(w)) for x in w))
    return MixedProfile(tuple(out))


def test_indifference_equations_are_payoff_differences():
    rng = random.Random(21)
    for _ in range(25):
        counts = [rng.randint(2, 3) for _ in range(rng.randint(2, 3))]
        g = random_normal_form(counts, rng)
        s = indifference_system(g)
        sigma = random_mixed(rng, counts)
        point = {}
        for i, vec in enumerate(sigma.strategies):
            for k in range(1, len(vec)):
                point[s.index(f"x{i + 1}_{k}")] = vec[k]
        values = residual(s, point)
        expected = []
        for i, n in enumerate(counts):
            def u(j):
                vecs = list(sigma.strategies)
                vecs[i] = tuple(F(int(k == j)) for k in range(n))
                return expected_utility(g, i, MixedProfile(tuple(vecs)))
            expected.extend(u(j) - u(0) for j in range(1, n))
        assert values == expected


def test_cycle_player_one_uses_player_two_only():
    m = random_graphical([3] * 4, [[1], [2], [3], [0]], 3)
    s = indifference_system(m)
    p2 = {s.index("x2_1"), s.index("x2_2")}
    for j in (s.index("x1_1"), s.index("x1_2")):
        assert s.equations[j].variables <= p2
        assert s.equations[j].degree() == 1
    assert validate_sparsity(s, graphical_polygraph(m)).clean


def test_two_by_two_is_univariate():
    g = random_normal_form([2, 2], 9)
    s = indifference_system(g)
    assert [eq.variables for eq in s.equations] == [frozenset({1}), frozenset({0})]


def test_complete_counts():
    assert bernstein_count(complete_polygraph([3] * 4)).bernstein_count == 297
    assert bernstein_count(complete_polygraph([2] * 4)).bernstein_count == 9
    assert bernstein_count(complete_polygraph([2, 2])).bernstein_count == 1


def test_graphical_complete_equals_complete():
    m = random_graphical([2, 3, 2], [[1, 2], [0, 2], [0, 1]], 1)
    assert graphical_polygraph(m) == complete_polygraph(m.strategy_counts)


def test_isolated_player_gives_zero():
    m = random_graphical([2, 2, 2], [[1], [0], [0]], 2)
    assert bernstein_count(graphical_polygraph(m)).bernstein_count == 0


def test_degenerate_player():
    g = random_normal_form([1, 2], 0)
    with pytest.raises(DegeneratePlayerError):
        indifference_system(g)


def test_homogeneous_form_evaluates_consistently():
    from quasieq.normalform import homogeneous_indifference
    g = random_normal_form([2, 3], 4)
    names, blocks, eqs = homogeneous_indifference(g)
    sigma = random_mixed(random.Random(1), [2, 3])
    point = {v: sigma.strategies[b][k] for b, blk in enumerate(blocks) for k, v in enumerate(blk)}
    s = indifference_system(g)
    red = {s.index(names[v]): point[v] for blk in blocks for v in blk[1:]}
    assert [evaluate(p, point) for _, _, p in eqs] == residual(s, red)
