import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from quasieq.numerics import DimensionCapExceeded, RationalMatrix, permanent_naive, \
    permanent_ryser, rank, ryser_cap, solve_linear_exact


def square(n_max=6, lo=-3, hi=3):
    return st.integers(1, n_max).flatmap(
        lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n),
                           min_size=n, max_size=n))


@settings(max_examples=150, deadline=None)
@given(square())
def test_ryser_equals_naive(m):
    assert permanent_ryser(m) == permanent_naive(m)


@settings(max_examples=60, deadline=None)
@given(square(), st.randoms(use_true_random=False))
def test_permanent_invariant_under_permutation(m, rnd):
    n = len(m)
    rp, cp = list(range(n)), list(range(n))
    rnd.shuffle(rp)
    rnd.shuffle(cp)
    shuffled = [[m[rp[i]][cp[j]] for j in range(n)] for i in range(n)]
    assert permanent_ryser(shuffled) == permanent_ryser(m)


def test_small_cases():
    assert permanent_ryser([[2]]) == 2
    assert permanent_ryser([[1, 2], [3, 4]]) == 10
    assert permanent_ryser([]) == 1
    assert permanent_naive([]) == 1


def test_all_ones_is_factorial():
    for n in range(1, 17):
        assert permanent_ryser([[1] * n for _ in range(n)]) == math.factorial(n)


def test_zero_row_and_column():
    m = [[1, 2, 3], [0, 0, 0], [4, 5, 6]]
    assert permanent_ryser(m) == 0
    t = [list(r) for r in zip(*m)]
    assert permanent_ryser(t) == 0


def test_large_entries_stay_exact():
    big = 10**12
    m = [[big + i * j for j in range(6)] for i in range(6)]
    assert permanent_ryser(m) == permanent_naive(m)


def test_workers_give_same_result():
    rng = random.Random(3)
    for _ in range(20):
        n = rng.randint(15, 17)
        m = [[rng.randint(0, 1) for _ in range(n)] for _ in range(n)]
        assert permanent_ryser(m, workers=3) == permanent_ryser(m)


def test_caps(monkeypatch):
    with pytest.raises(DimensionCapExceeded):
        permanent_naive([[1] * 11 for _ in range(11)])
    with pytest.raises(DimensionCapExceeded):
        permanent_ryser([[1] * 5 for _ in range(5)], cap=4)
    monkeypatch.setenv("QUASIEQ_RYSER_CAP", "12")
    assert ryser_cap() == 12
    with pytest.raises(DimensionCapExceeded):
        permanent_ryser([[1] * 13 for _ in range(13)])


def test_rejects_non_integer_and_ragged():
    with pytest.raises(TypeError):
        permanent_ryser([[0.5]])
    with pytest.raises(ValueError):
        permanent_ryser([[1, 2], [3]])


def test_solve_unique():
    a = RationalMatrix.from_rows([[2, 1], [1, 3]])
    sol = solve_linear_exact(a, [3, 5])
    assert sol.unique and sol.solution == (F(4, 5), F(7, 5))


def test_solve_inconsistent_and_underdetermined():
    a = RationalMatrix.from_rows([[1, 1], [2, 2]])
    assert solve_linear_exact(a, [1, 3]).status == "inconsistent"
    sol = solve_linear_exact(a, [1, 2])
    assert sol.status == "underdetermined" and sol.rank == 1
    assert a.matvec(sol.solution) == [1, 2]


def test_random_invertible_systems():
    rng = random.Random(11)
    done = 0
    while done < 80:
        n = rng.randint(1, 6)
        a = RationalMatrix.from_rows([[F(rng.randint(-5, 5), rng.randint(1, 3))
                                       for _ in range(n)] for _ in range(n)])
        if rank(a) < n:
            continue
        x = [F(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n)]
        sol = solve_linear_exact(a, a.matvec(x))
        assert sol.unique and list(sol.solution) == x
        done += 1


def test_matrix_rejects_floats():
    with pytest.raises(TypeError):
        RationalMatrix.from_rows([[0.5]])
