import dataclasses
import random
from fractions import Fraction as F
from importlib import resources

import pytest

from _gen import random_ent
from quasieq.ent import EntError, EntNode, EntStructure, emergent_profile, ent_utility, \
    hierarchical_residual, induced_normal_form, relaxed_graphical_model, relaxed_system, \
    validate_ent
from quasieq.io import parse_game_file
from quasieq.multilinear import linear_form, system_is_linear
from quasieq.normalform import MixedProfile, expected_utility
from quasieq.numerics import solve_linear_exact
from quasieq.polygraph import bernstein_count

EQ = {"1": F(1, 2), "2": F(1, 5), "3": F(1, 3), "4": F(1, 4)}


@pytest.fixture(scope="module")
def saboteur():
    return parse_game_file((resources.files("quasieq") / "data" / "saboteur.ent").read_text())


def test_saboteur_tables(saboteur):
    assert saboteur.leaves() == ["1", "2", "3", "4"]
    assert saboteur.emergent() == ["5", "6"]
    # XNOR: strategy 1 exactly when the children match
    assert saboteur["5"].aggregation == ((0, 1), (1, 0), (1, 0), (0, 1))
    assert saboteur["2"].gamma == {"5": -1}
    assert validate_ent(saboteur).ok


def test_validation_violations(saboteur):
    rows = list(saboteur["5"].aggregation)
    rows[0] = (F(0), F(9, 10))
    bad = EntStructure([dataclasses.replace(n, aggregation=tuple(rows)) if n.name == "5" else n
                        for n in saboteur.nodes])
    assert any("not a distribution" in v for v in validate_ent(bad).violations)
    flat = tuple((F(1, 2), F(1, 2)) for _ in range(4))
    bad = EntStructure([dataclasses.replace(n, aggregation=flat) if n.name == "5" else n
                        for n in saboteur.nodes])
    assert any("rank" in v for v in validate_ent(bad).violations)


def test_structure_errors():
    with pytest.raises(EntError):
        EntStructure([EntNode("r", None), EntNode("s", None)])
    with pytest.raises(EntError):
        EntStructure([EntNode("r", None), EntNode("a", "r", 2, payoffs=(1,))])
    with pytest.raises(EntError):
        EntStructure([EntNode("r", None), EntNode("a", "zz", 2, payoffs=(0, 0))])


def test_emergent_profile(saboteur):
    prof = emergent_profile(saboteur, EQ)
    assert prof["5"] == (F(1, 2), F(1, 2))
    assert prof["6"] == (F(5, 12), F(7, 12))
    pure = emergent_profile(saboteur, {"1": 0, "2": 0, "3": 1, "4": 0})
    assert prof["5"] != pure["5"] == (F(0), F(1))
    assert pure["6"] == (F(1), F(0))


def test_utilities_at_equilibrium(saboteur):
    prof = emergent_profile(saboteur, EQ)
    assert ent_utility(saboteur, "5", prof) == 0
    for k in (0, 1):
        alt = dict(prof, **{"5": tuple(F(int(j == k)) for j in range(2))})
        assert ent_utility(saboteur, "5", alt) == 0
    # u2 = U2 - u5 and u5 = 0 here
    u2_local = F(4, 5) * (F(1, 2) * 0 + F(1, 2) * 0) + F(1, 5) * (F(1, 2) * -1 + F(1, 2) * 1)
    assert ent_utility(saboteur, "2", prof) == u2_local


def test_leaf_without_gamma_is_local_only():
    e = EntStructure([EntNode("r", None),
                      EntNode("a", "r", 2, payoffs=(F(1), F(2), F(3), F(4))),
                      EntNode("b", "r", 2, payoffs=(F(0),) * 4)])
    prof = {"a": (F(1, 2), F(1, 2)), "b": (F(1, 4), F(3, 4))}
    assert ent_utility(e, "a", prof) == F(1, 2) * (F(1, 4) * 1 + F(3, 4) * 3) \
        + F(1, 2) * (F(1, 4) * 2 + F(3, 4) * 4)


def test_relaxed_saboteur(saboteur):
    s = relaxed_system(saboteur)
    eqs = {lbl: eq.format(s.variables) for lbl, eq in zip(s.equation_labels, s.equations)}
    assert eqs["u1(1)-u1(0)"] == "1 - 5*s2_1"
    assert eqs["u2(1)-u2(0)"] == "-1 + 2*s1_1"
    assert eqs["u5(1)-u5(0)"] == "7 - 12*s6_1"
    assert system_is_linear(s)
    a, b = linear_form(s)
    sol = solve_linear_exact(a, b)
    assert sol.solution == (F(1, 2), F(1, 5), F(1, 3), F(1, 4), F(1, 2), F(7, 12))


def test_hierarchical_residual(saboteur):
    rep = hierarchical_residual(saboteur, EQ)
    assert rep.all_zero and rep.totally_mixed
    off = hierarchical_residual(saboteur, dict(EQ, **{"4": F(1, 3)}))
    assert not off.all_zero
    forced = hierarchical_residual(saboteur, EQ, {"6": F(1, 2)})
    assert any(forced.consistency_residuals["6"])
    pure = hierarchical_residual(saboteur, {"1": 0, "2": 1, "3": 0, "4": 1})
    assert not pure.totally_mixed and "1" in pure.not_mixed


def test_trivial_ent_is_complete_game():
    leaves = [EntNode(str(i), "r", 2, payoffs=tuple(F(0) for _ in range(16))) for i in range(4)]
    e = EntStructure([EntNode("r", None)] + leaves)
    assert bernstein_count(relaxed_graphical_model(e).graph).bernstein_count == 9


def _binary_ent(rng, depth):
    nodes = [EntNode("root", None)]

    def build(parent, d, name):
        kids = [] if d == depth or (d > 1 and rng.random() < 0.3) else [name + "0", name + "1"]
        for k in kids:
            build(name, d + 1, k)
        agg = ((F(1), F(0)), (F(0), F(1)), (F(0), F(1)), (F(1), F(0))) if kids else ()
        nodes.append(EntNode(name, parent, 2, agg, {},
                             tuple(F(rng.randint(-5, 5)) for _ in range(4))))

    build("root", 1, "a")
    build("root", 1, "b")
    return EntStructure(nodes)


def test_binary_tree_counts_one():
    rng = random.Random(17)
    for _ in range(20):
        e = _binary_ent(rng, rng.randint(1, 3))
        assert bernstein_count(relaxed_graphical_model(e).graph).bernstein_count == 1


def test_utility_matches_induced_normal_form():
    rng = random.Random(23)
    for _ in range(12):
        e = random_ent(rng, max_depth=3, max_branch=2)
        if len(e.leaves()) > 6:
            continue
        nf = induced_normal_form(e)
        leaves = {}
        for name in e.leaves():
            w = [rng.randint(1, 5) for _ in range(e[name].strategies)]
            leaves[name] = tuple(F(x, sum(w)) for x in w)
        prof = emergent_profile(e, leaves)
        sigma = MixedProfile(tuple(leaves[n] for n in e.leaves()))
        for i, name in enumerate(e.leaves()):
            assert expected_utility(nf, i, sigma) == ent_utility(e, name, prof)
