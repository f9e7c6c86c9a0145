"""Phase-free Pauli operators and generator sets over GF(2)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from itc import gf2


@dataclass(frozen=True, eq=False)
class PauliOperator:
    """A Pauli operator modulo phase, stored as X and Z bit vectors."""

    x: np.ndarray
    z: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=np.uint8) & 1
        z = np.asarray(self.z, dtype=np.uint8) & 1
        if x.shape != z.shape or x.ndim != 1:
            raise ValueError("x and z parts must be 1-d vectors of equal length")
        x.flags.writeable = False
        z.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8))

    @classmethod
    def from_support(cls, n: int, x: Iterable[int] = (), z: Iterable[int] = ()) -> PauliOperator:
        xv = np.zeros(n, np.uint8)
        zv = np.zeros(n, np.uint8)
        for q in x:
            xv[q] ^= 1
        for q in z:
            zv[q] ^= 1
        return cls(xv, zv)

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        _check_size(self, other)
        return PauliOperator(self.x ^ other.x, self.z ^ other.z)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)

    def __hash__(self) -> int:
        return hash((self.x.tobytes(), self.z.tobytes()))

    def __repr__(self) -> str:
        return f"PauliOperator(n={self.n}, X={np.flatnonzero(self.x).tolist()}, Z={np.flatnonzero(self.z).tolist()})"


def _check_size(p: PauliOperator, q: PauliOperator) -> None:
    if p.n != q.n:
        raise ValueError(f"size mismatch: {p.n} vs {q.n} qubits")


def symplectic_product(p: PauliOperator, q: PauliOperator) -> int:
    """0 if the operators commute, 1 if they anticommute."""
    _check_size(p, q)
    return int((np.dot(p.x, q.z) + np.dot(p.z, q.x)) & 1)


@dataclass(frozen=True, eq=False)
class GeneratorSet:
    """An ordered list of Pauli rows with a family label and cell id per row."""

    n: int
    x: np.ndarray
    z: np.ndarray
    labels: tuple[str, ...] = ()
    sites: tuple[int, ...] = ()
    _lookup: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=np.uint8).reshape(-1, self.n) & 1
        z = np.asarray(self.z, dtype=np.uint8).reshape(-1, self.n) & 1
        if x.shape != z.shape:
            raise ValueError("x and z blocks must have the same shape")
        m = x.shape[0]
        labels = tuple(self.labels) or ("",) * m
        sites = tuple(self.sites) or tuple(range(m))
        if len(labels) != m or len(sites) != m:
            raise ValueError("one label and one site per row")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "_lookup", {(l, s): i for i, (l, s) in enumerate(zip(labels, sites))})

    @classmethod
    def from_rows(
        cls, n: int, rows: Sequence[PauliOperator], labels: Sequence[str] = (), sites: Sequence[int] = ()
    ) -> GeneratorSet:
        if any(r.n != n for r in rows):
            raise ValueError("all rows must act on the same number of qubits")
        x = np.array([r.x for r in rows], dtype=np.uint8).reshape(-1, n)
        z = np.array([r.z for r in rows], dtype=np.uint8).reshape(-1, n)
        return cls(n, x, z, tuple(labels), tuple(sites))

    @classmethod
    def empty(cls, n: int) -> GeneratorSet:
        return cls(n, np.zeros((0, n), np.uint8), np.zeros((0, n), np.uint8))

    def __len__(self) -> int:
        return self.x.shape[0]

    def __getitem__(self, i: int) -> PauliOperator:
        return PauliOperator(self.x[i], self.z[i])

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def rows(self) -> list[PauliOperator]:
        return list(self)

    @property
    def matrix(self) -> np.ndarray:
        """Symplectic representation ``[X | Z]``."""
        return np.concatenate([self.x, self.z], axis=1)

    def families(self) -> list[str]:
        return list(dict.fromkeys(self.labels))

    def family(self, *names: str) -> GeneratorSet:
        keep = [i for i, l in enumerate(self.labels) if l in names]
        return self.select(keep)

    def select(self, rows: Sequence[int]) -> GeneratorSet:
        rows = list(rows)
        return GeneratorSet(
            self.n,
            self.x[rows],
            self.z[rows],
            tuple(self.labels[i] for i in rows),
            tuple(self.sites[i] for i in rows),
        )

    def get(self, label: str, site: int) -> PauliOperator:
        return self[self._lookup[(label, site)]]

    def has(self, label: str, site: int) -> bool:
        return (label, site) in self._lookup

    def row_index(self, label: str, site: int) -> int:
        return self._lookup[(label, site)]

    def __add__(self, other: GeneratorSet) -> GeneratorSet:
        if self.n != other.n:
            raise ValueError("size mismatch")
        return GeneratorSet(
            self.n,
            np.vstack([self.x, other.x]),
            np.vstack([self.z, other.z]),
            self.labels + other.labels,
            self.sites + other.sites,
        )

    def relabel(self, label: str) -> GeneratorSet:
        return GeneratorSet(self.n, self.x, self.z, (label,) * len(self), self.sites)

    def commutation_matrix(self, other: GeneratorSet | None = None) -> np.ndarray:
        """Pairwise symplectic products (rows of self x rows of other)."""
        other = self if other is None else other
        return (gf2.matmul(self.x, other.z.T) ^ gf2.matmul(self.z, other.x.T)).astype(np.uint8)

    def to_text(self) -> str:
        """One row per line: ``LABEL: X q1 q3 | Z q2 q7``."""
        lines = []
        for i in range(len(self)):
            xs = " ".join(map(str, np.flatnonzero(self.x[i])))
            zs = " ".join(map(str, np.flatnonzero(self.z[i])))
            lines.append(f"{self.labels[i]}: X {xs} | Z {zs}".replace("X  |", "X |").rstrip())
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, n: int, text: str) -> GeneratorSet:
        rows, labels = [], []
        for line in text.splitlines():
            if not line.strip():
                continue
            label, body = line.split(":", 1)
            xpart, zpart = body.split("|")
            xs = [int(t) for t in xpart.split()[1:]]
            zs = [int(t) for t in zpart.split()[1:]]
            rows.append(PauliOperator.from_support(n, xs, zs))
            labels.append(label.strip())
        return cls.from_rows(n, rows, labels)


def rank(gens: GeneratorSet) -> int:
    return gf2.rank(gens.matrix) if len(gens) else 0


@dataclass(frozen=True)
class SpanResult:
    member: bool
    certificate: np.ndarray | None

    def __bool__(self) -> bool:
        return self.member


def in_span(p: PauliOperator, gens: GeneratorSet) -> SpanResult:
    """Decide whether ``p`` is a product of rows; the certificate picks the rows."""
    if p.n != gens.n:
        raise ValueError(f"size mismatch: {p.n} vs {gens.n} qubits")
    if len(gens) == 0:
        return SpanResult(p.is_identity(), np.zeros(0, np.uint8) if p.is_identity() else None)
    coeffs = gf2.solve_rows(gens.matrix, p.vector())
    return SpanResult(coeffs is not None, coeffs)


def product(gens: GeneratorSet, coeffs: np.ndarray | None = None) -> PauliOperator:
    """Product of the selected rows (all rows if ``coeffs`` is None)."""
    if coeffs is None:
        coeffs = np.ones(len(gens), np.uint8)
    sel = np.asarray(coeffs, dtype=bool)
    return PauliOperator(
        np.bitwise_xor.reduce(gens.x[sel], axis=0) if sel.any() else np.zeros(gens.n, np.uint8),
        np.bitwise_xor.reduce(gens.z[sel], axis=0) if sel.any() else np.zeros(gens.n, np.uint8),
    )


def center_basis(gens: GeneratorSet) -> np.ndarray:
    """Symplectic rows spanning ``{g in span(gens) : g commutes with all of gens}``."""
    if len(gens) == 0:
        return np.zeros((0, 2 * gens.n), np.uint8)
    basis = gf2.row_basis(gens.matrix)
    n = gens.n
    bx, bz = basis[:, :n], basis[:, n:]
    gram = gf2.matmul(bx, bz.T) ^ gf2.matmul(bz, bx.T)
    kernel = gf2.nullspace(gram)
    return gf2.matmul(kernel, basis)


def centralizer_intersection_rank(gens: GeneratorSet) -> int:
    """Rank of the center of the group generated by ``gens`` (phases dropped)."""
    if len(gens) == 0:
        return 0
    basis = gf2.row_basis(gens.matrix)
    n = gens.n
    bx, bz = basis[:, :n], basis[:, n:]
    gram = gf2.matmul(bx, bz.T) ^ gf2.matmul(bz, bx.T)
    return basis.shape[0] - gf2.rank(gram)


def conjugate_by_cx(p: PauliOperator, pairs: Sequence[tuple[int, int]]) -> PauliOperator:
    """Conjugate by the product of CX(control, target) gates, applied in order."""
    x = p.x.copy()
    z = p.z.copy()
    for c, t in pairs:
        if not (0 <= c < p.n and 0 <= t < p.n) or c == t:
            raise IndexError(f"invalid CX pair ({c}, {t}) on {p.n} qubits")
        x[t] ^= x[c]
        z[c] ^= z[t]
    return PauliOperator(x, z)


def conjugate_set_by_cx(gens: GeneratorSet, pairs: Sequence[tuple[int, int]]) -> GeneratorSet:
    x = gens.x.copy()
    z = gens.z.copy()
    for c, t in pairs:
        if not (0 <= c < gens.n and 0 <= t < gens.n) or c == t:
            raise IndexError(f"invalid CX pair ({c}, {t}) on {gens.n} qubits")
        x[:, t] ^= x[:, c]
        z[:, c] ^= z[:, t]
    return GeneratorSet(gens.n, x, z, gens.labels, gens.sites)
