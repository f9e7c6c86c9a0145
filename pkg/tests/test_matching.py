import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itc.matching import BRUTE_FORCE_LIMIT, InfeasibleMatching, MatchingProblem, brute_force, solve


def random_problem(rng, n, boundary):
    w = rng.integers(1, 10, (n, n))
    w = np.triu(w, 1)
    w = w + w.T
    b = rng.integers(1, 10, n) if boundary else None
    return MatchingProblem(w, b)


def test_trivial_cases():
    p = MatchingProblem(np.array([[0, 5], [5, 0]]))
    assert solve(p).weight == 5 and solve(p).pairs == ((0, 1),)
    empty = MatchingProblem(np.zeros((0, 0)))
    assert solve(empty).weight == 0 and brute_force(empty).weight == 0


def test_random_eight_node_problems():
    rng = np.random.default_rng(0)
    for _ in range(100):
        p = random_problem(rng, 8, False)
        assert solve(p).weight == brute_force(p).weight


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10), st.booleans(), st.integers(0, 2**32 - 1))
def test_solve_matches_brute_force(n, boundary, seed):
    rng = np.random.default_rng(seed)
    p = random_problem(rng, n, boundary)
    if n % 2 and not boundary:
        with pytest.raises(InfeasibleMatching):
            solve(p)
        return
    got, ref = solve(p), brute_force(p)
    assert got.weight == ref.weight
    covered = sorted([x for pr in got.pairs for x in pr] + list(got.to_boundary))
    assert covered == list(range(n))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_constant_shift_keeps_argmin(half, shift, seed):
    rng = np.random.default_rng(seed)
    p = random_problem(rng, 2 * half, False)
    shifted = MatchingProblem(p.weights + shift * (1 - np.eye(2 * half, dtype=np.int64)))
    a, b = solve(p), solve(shifted)
    assert b.weight == a.weight + half * shift
    assert shifted.weights[tuple(zip(*a.pairs))].sum() == b.weight


def test_partial_boundary_and_forbidden_terminals():
    w = np.array([[0, 9, 9], [9, 0, 1], [9, 1, 0]])
    p = MatchingProblem(w, np.array([2, -1, -1]))
    res = solve(p)
    assert res.pairs == ((1, 2),) and res.to_boundary == (0,) and res.weight == 3
    assert brute_force(p).weight == 3


def test_greedy_is_flagged_and_not_always_optimal():
    w = np.array([[0, 1, 2, 9], [1, 0, 9, 9], [2, 9, 0, 2], [9, 9, 2, 0]])
    w = np.minimum(w, w.T)
    p = MatchingProblem(w)
    assert solve(p).weight <= solve(p, method="greedy").weight
    with pytest.raises(ValueError):
        solve(p, method="other")


def test_validation_and_limits():
    with pytest.raises(ValueError):
        MatchingProblem(np.array([[0, 1], [2, 0]]))
    with pytest.raises(ValueError):
        MatchingProblem(np.array([[0, -1], [-1, 0]]))
    big = MatchingProblem(np.ones((BRUTE_FORCE_LIMIT + 2, BRUTE_FORCE_LIMIT + 2), dtype=int) - np.eye(BRUTE_FORCE_LIMIT + 2, dtype=int))
    with pytest.raises(ValueError):
        brute_force(big)


def test_dump_roundtrip():
    rng = np.random.default_rng(3)
    p = random_problem(rng, 5, True)
    text = p.dump()
    assert text.startswith("NODE 0\n")
    assert "W 0 1 " in text and "B 0 " in text
    q = MatchingProblem.parse(text)
    assert np.array_equal(q.weights, p.weights) and np.array_equal(q.boundary, p.boundary)


def test_deterministic():
    rng = np.random.default_rng(9)
    p = random_problem(rng, 10, True)
    assert solve(p) == solve(p)
