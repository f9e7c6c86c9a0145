"""Dense GF(2) linear algebra on bit-packed rows.

Matrices come in as ``uint8`` arrays of 0/1 entries. Internally each row is
packed into ``uint64`` words and reduced by Gaussian elimination; the
``naive_*`` functions at the bottom work bit by bit on Python lists and are
kept as an independent reference for tests.
"""

from __future__ import annotations

import numpy as np

_ONE = np.uint64(1)


def pack(matrix: np.ndarray) -> np.ndarray:
    """Pack a 0/1 matrix into rows of little-endian ``uint64`` words."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.uint8))
    rows, cols = matrix.shape
    nbytes = -(-cols // 64) * 8 if cols else 8
    packed = np.zeros((rows, nbytes), dtype=np.uint8)
    if cols:
        raw = np.packbits(matrix & 1, axis=1, bitorder="little")
        packed[:, : raw.shape[1]] = raw
    return packed.view("<u8").astype(np.uint64, copy=False)


def unpack(words: np.ndarray, cols: int) -> np.ndarray:
    """Inverse of :func:`pack`."""
    raw = np.ascontiguousarray(words.astype("<u8")).view(np.uint8)
    return np.unpackbits(raw, axis=1, count=cols, bitorder="little").astype(np.uint8)


def _column(words: np.ndarray, j: int) -> np.ndarray:
    w, b = divmod(j, 64)
    return ((words[:, w] >> np.uint64(b)) & _ONE).astype(bool)


def _eliminate(words: np.ndarray, cols: int, full: bool) -> tuple[np.ndarray, list[int]]:
    """Row-reduce packed rows in place; return (words, pivot columns).

    With ``full`` the result is in reduced row echelon form, otherwise only
    entries below each pivot are cleared.
    """
    m = words.shape[0]
    pivots: list[int] = []
    r = 0
    for j in range(cols):
        if r == m:
            break
        col = _column(words[r:], j)
        hits = np.flatnonzero(col)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
        mask = _column(words, j)
        mask[r] = False
        if not full:
            mask[:r] = False
        if mask.any():
            words[mask] ^= words[r]
        pivots.append(j)
        r += 1
    return words, pivots


def rank(matrix: np.ndarray) -> int:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.uint8))
    if matrix.size == 0:
        return 0
    _, pivots = _eliminate(pack(matrix), matrix.shape[1], full=False)
    return len(pivots)


def row_basis(matrix: np.ndarray) -> np.ndarray:
    """Rows of the reduced row echelon form (a basis of the row space)."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.uint8))
    cols = matrix.shape[1]
    if matrix.shape[0] == 0:
        return np.zeros((0, cols), dtype=np.uint8)
    words, pivots = _eliminate(pack(matrix), cols, full=True)
    return unpack(words[: len(pivots)], cols)


def nullspace(matrix: np.ndarray) -> np.ndarray:
    """Basis (as rows) of the right kernel ``{x : matrix @ x = 0}``."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.uint8))
    m, n = matrix.shape
    if m == 0:
        return np.eye(n, dtype=np.uint8)
    words, pivots = _eliminate(pack(matrix), n, full=True)
    reduced = unpack(words[: len(pivots)], n)
    pivot_set = set(pivots)
    free = [j for j in range(n) if j not in pivot_set]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for k, j in enumerate(free):
        basis[k, j] = 1
        for i, p in enumerate(pivots):
            basis[k, p] = reduced[i, j]
    return basis


def solve_rows(matrix: np.ndarray, target: np.ndarray) -> np.ndarray | None:
    """Find ``c`` with ``c @ matrix = target`` (mod 2), or ``None``.

    The row combination is tracked by eliminating ``[matrix | I]``.
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.uint8))
    target = np.asarray(target, dtype=np.uint8).ravel()
    m, n = matrix.shape
    if m == 0:
        return np.zeros(0, dtype=np.uint8) if not target.any() else None
    aug = np.concatenate([matrix, np.eye(m, dtype=np.uint8)], axis=1)
    words, pivots = _eliminate(pack(aug), n, full=True)
    reduced = unpack(words, n + m)
    residual = target.copy()
    coeffs = np.zeros(m, dtype=np.uint8)
    for i, p in enumerate(pivots):
        if residual[p]:
            residual ^= reduced[i, :n]
            coeffs ^= reduced[i, n:]
    if residual.any():
        return None
    return coeffs


def in_row_space(matrix: np.ndarray, target: np.ndarray) -> bool:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.uint8))
    if matrix.shape[0] == 0:
        return not np.asarray(target).any()
    return rank(np.vstack([matrix, np.asarray(target, dtype=np.uint8)[None]])) == rank(matrix)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product mod 2 of dense 0/1 arrays."""
    prod = np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)
    return (prod & 1).astype(np.uint8)


# reference implementations -------------------------------------------------


def naive_rank(rows: list[list[int]]) -> int:
    """Bit-by-bit Gaussian elimination on lists of 0/1."""
    work = [list(r) for r in rows]
    if not work:
        return 0
    cols = len(work[0])
    r = 0
    for j in range(cols):
        piv = next((i for i in range(r, len(work)) if work[i][j]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        for i in range(len(work)):
            if i != r and work[i][j]:
                work[i] = [a ^ b for a, b in zip(work[i], work[r])]
        r += 1
        if r == len(work):
            break
    return r


def naive_solve(rows: list[list[int]], target: list[int]) -> list[int] | None:
    """Bit-by-bit elimination of ``[rows | I]``; returns row coefficients."""
    m = len(rows)
    n = len(target)
    work = [list(r) + [int(i == k) for k in range(m)] for i, r in enumerate(rows)]
    residual = list(target) + [0] * m
    r = 0
    for j in range(n):
        piv = next((i for i in range(r, m) if work[i][j]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        for i in range(m):
            if i != r and work[i][j]:
                work[i] = [a ^ b for a, b in zip(work[i], work[r])]
        if residual[j]:
            residual = [a ^ b for a, b in zip(residual, work[r])]
        r += 1
    if any(residual[:n]):
        return None
    return residual[n:]


def brute_solve(rows: list[list[int]], target: list[int]) -> list[int] | None:
    """Exhaustive search over row subsets; only for a handful of rows."""
    m = len(rows)
    if m > 20:
        raise ValueError("brute_solve enumerates subsets; at most 20 rows")
    for mask in range(1 << m):
        acc = [0] * len(target)
        for i in range(m):
            if mask >> i & 1:
                acc = [a ^ b for a, b in zip(acc, rows[i])]
        if acc == list(target):
            return [mask >> i & 1 for i in range(m)]
    return None
