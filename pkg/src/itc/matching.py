"""Minimum-weight perfect matching with optional boundary terminals."""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
import numpy as np

BRUTE_FORCE_LIMIT = 10


class InfeasibleMatching(ValueError):
    pass


@dataclass(frozen=True)
class MatchingProblem:
    """``weights[i, j]`` pairs nodes; ``boundary[i]`` sends node i to the boundary.

    ``boundary`` is None when there are no terminals; an entry of -1 forbids
    the boundary for that node.
    """

    weights: np.ndarray
    boundary: np.ndarray | None = None

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.int64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weights must be a square matrix")
        if not np.array_equal(w, w.T):
            raise ValueError("weights must be symmetric")
        if (w < 0).any():
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "weights", w)
        if self.boundary is not None:
            b = np.asarray(self.boundary, dtype=np.int64)
            if b.shape != (w.shape[0],):
                raise ValueError("one boundary weight per node")
            object.__setattr__(self, "boundary", b)

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    def has_boundary(self, i: int) -> bool:
        return self.boundary is not None and self.boundary[i] >= 0

    def check_feasible(self) -> None:
        if self.size % 2 and not any(self.has_boundary(i) for i in range(self.size)):
            raise InfeasibleMatching(f"{self.size} nodes and no boundary terminal")

    def dump(self) -> str:
        lines = [f"NODE {i}" for i in range(self.size)]
        for i in range(self.size):
            for j in range(i + 1, self.size):
                lines.append(f"W {i} {j} {self.weights[i, j]}")
        if self.boundary is not None:
            lines += [f"B {i} {w}" for i, w in enumerate(self.boundary) if w >= 0]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> MatchingProblem:
        n = 0
        entries, bnd = [], {}
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "NODE":
                n = max(n, int(parts[1]) + 1)
            elif parts[0] == "W":
                entries.append(tuple(map(int, parts[1:4])))
            elif parts[0] == "B":
                bnd[int(parts[1])] = int(parts[2])
        w = np.zeros((n, n), dtype=np.int64)
        for i, j, x in entries:
            w[i, j] = w[j, i] = x
        b = None
        if bnd:
            b = np.full(n, -1, dtype=np.int64)
            for i, x in bnd.items():
                b[i] = x
        return cls(w, b)


@dataclass(frozen=True)
class Pairing:
    pairs: tuple[tuple[int, int], ...]
    to_boundary: tuple[int, ...]
    weight: int


def _pairing(problem: MatchingProblem, pairs, bnd) -> Pairing:
    pairs = tuple(sorted((min(a, b), max(a, b)) for a, b in pairs))
    bnd = tuple(sorted(bnd))
    w = sum(int(problem.weights[a, b]) for a, b in pairs)
    w += sum(int(problem.boundary[i]) for i in bnd)
    return Pairing(pairs, bnd, w)


def solve(problem: MatchingProblem, method: str = "blossom") -> Pairing:
    """Exact minimum-weight perfect matching (``method="greedy"`` is approximate)."""
    problem.check_feasible()
    n = problem.size
    if n == 0:
        return Pairing((), (), 0)
    if method == "greedy":
        return _greedy(problem)
    if method != "blossom":
        raise ValueError(f"unknown method {method!r}")
    # node i has a twin n+i standing for "i goes to the boundary"; twins pair
    # among themselves for free so the matching can stay perfect
    g = nx.Graph()
    g.add_nodes_from(range(2 * n if problem.boundary is not None else n))
    for i in range(n):
        for j in range(i + 1, n):
            g.add_edge(i, j, weight=int(problem.weights[i, j]))
    if problem.boundary is not None:
        for i in range(n):
            if problem.has_boundary(i):
                g.add_edge(i, n + i, weight=int(problem.boundary[i]))
            for j in range(i + 1, n):
                g.add_edge(n + i, n + j, weight=0)
    matched = nx.min_weight_matching(g)
    pairs, bnd = [], []
    for a, b in matched:
        a, b = min(a, b), max(a, b)
        if b < n:
            pairs.append((a, b))
        elif a < n:
            bnd.append(a)
    covered = {x for p in pairs for x in p} | set(bnd)
    if len(covered) != n:
        raise InfeasibleMatching("no perfect matching exists")
    return _pairing(problem, pairs, bnd)


def _greedy(problem: MatchingProblem) -> Pairing:
    n = problem.size
    options = []
    for i in range(n):
        for j in range(i + 1, n):
            options.append((int(problem.weights[i, j]), i, j))
        if problem.has_boundary(i):
            options.append((int(problem.boundary[i]), i, -1))
    options.sort()
    used: set[int] = set()
    pairs, bnd = [], []
    for _, i, j in options:
        if i in used or (j >= 0 and j in used):
            continue
        if j < 0:
            bnd.append(i)
            used.add(i)
        else:
            pairs.append((i, j))
            used.update((i, j))
    if len(used) != n:
        raise InfeasibleMatching("greedy pass left nodes unmatched")
    return _pairing(problem, pairs, bnd)


def brute_force(problem: MatchingProblem) -> Pairing:
    """Exhaustive enumeration; the reference for :func:`solve`."""
    n = problem.size
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force handles at most {BRUTE_FORCE_LIMIT} nodes")
    problem.check_feasible()
    best: list = [None, None]

    def rec(free: tuple[int, ...], cost: int, pairs: list, bnd: list) -> None:
        if best[0] is not None and cost >= best[0] and free:
            return
        if not free:
            if best[0] is None or cost < best[0]:
                best[0], best[1] = cost, (list(pairs), list(bnd))
            return
        i, rest = free[0], free[1:]
        if problem.has_boundary(i):
            rec(rest, cost + int(problem.boundary[i]), pairs, bnd + [i])
        for k, j in enumerate(rest):
            rec(rest[:k] + rest[k + 1 :], cost + int(problem.weights[i, j]), pairs + [(i, j)], bnd)

    rec(tuple(range(n)), 0, [], [])
    if best[1] is None:
        raise InfeasibleMatching("no perfect matching exists")
    return _pairing(problem, *best[1])
