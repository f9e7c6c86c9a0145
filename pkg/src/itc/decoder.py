"""Two-round matching decoder.

Round 1 matches relation violations (omega) on the graph whose edges are the
columns of ``dR``, giving an inferred measurement error. Round 2 matches the
repaired stabilizer syndrome on the graph of ``bS`` columns, giving the
inferred qubit error. A column of weight one is an edge to the boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import pymatching
import scipy.sparse as sp
from scipy.sparse.csgraph import shortest_path

from itc.code import SubsystemCode
from itc.matching import MatchingProblem, solve
from itc.syndrome import MeasurementOutcome, Sector, SyndromeMaps, apply

BACKENDS = ("pymatching", "exact")
_UNREACHABLE = 10**9


class DecodingGraph:
    """Matching graph built from a detector-by-fault incidence matrix.

    Parallel columns collapse onto the lowest index. Columns of weight zero
    are invisible and never used. ``terminal_weight`` is charged for sending a
    node to a virtual terminal, used only when the syndrome has odd parity on
    a graph without boundary edges.
    """

    def __init__(self, incidence: np.ndarray, backend: str = "pymatching") -> None:
        if backend not in BACKENDS:
            raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")
        self.backend = backend
        h = np.asarray(incidence, dtype=np.uint8)
        self.num_nodes, self.num_faults = h.shape
        self.edges: dict[tuple[int, int], int] = {}
        hc = sp.csc_matrix(h)
        for col in range(self.num_faults):
            rows = tuple(sorted(hc.indices[hc.indptr[col] : hc.indptr[col + 1]].tolist()))
            if len(rows) == 0:
                continue
            if len(rows) > 2:
                raise ValueError(f"column {col} touches {len(rows)} nodes")
            key = rows if len(rows) == 2 else (rows[0], -1)
            self.edges.setdefault(key, col)
        self.has_boundary = any(v < 0 for _, v in self.edges)
        self.terminal_weight = 4 * (self.num_nodes + 1)
        self._pm: dict[bool, pymatching.Matching] = {}
        self._paths = None

    # pymatching ------------------------------------------------------------

    def _matcher(self, terminal: bool) -> pymatching.Matching:
        if terminal not in self._pm:
            m = pymatching.Matching()
            for (u, v), col in sorted(self.edges.items(), key=lambda kv: kv[1]):
                if v < 0:
                    m.add_boundary_edge(u, fault_ids={col}, weight=1.0)
                else:
                    m.add_edge(u, v, fault_ids={col}, weight=1.0)
            if terminal:
                for u in range(self.num_nodes):
                    m.add_boundary_edge(u, fault_ids=set(), weight=float(self.terminal_weight), merge_strategy="smallest-weight")
            self._pm[terminal] = m
        return self._pm[terminal]

    def _decode_pymatching(self, syndrome: np.ndarray, terminal: bool) -> np.ndarray:
        m = self._matcher(terminal)
        padded = np.zeros(m.num_detectors, dtype=np.uint8)
        padded[: syndrome.size] = syndrome
        corr = m.decode(padded)
        out = np.zeros(self.num_faults, dtype=np.uint8)
        out[: corr.size] = corr[: self.num_faults]
        return out

    # exact ----------------------------------------------------------------

    def _graph(self):
        if self._paths is None:
            b = self.num_nodes
            rows, cols = [], []
            for u, v in self.edges:
                v = b if v < 0 else v
                rows += [u, v]
                cols += [v, u]
            adj = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(b + 1, b + 1))
            self._paths = adj
        return self._paths

    def _hop(self, a: int, b: int) -> int:
        n = self.num_nodes
        u, v = (a, -1) if b == n else (b, -1) if a == n else (min(a, b), max(a, b))
        return self.edges[(u, v)]

    def _decode_exact(self, syndrome: np.ndarray, terminal: bool) -> np.ndarray:
        out = np.zeros(self.num_faults, dtype=np.uint8)
        defects = np.flatnonzero(syndrome)
        if defects.size == 0:
            return out
        n = self.num_nodes
        dist, pred = shortest_path(self._graph(), unweighted=True, indices=defects, return_predecessors=True)
        dist = np.where(np.isinf(dist), _UNREACHABLE, dist).astype(np.int64)
        w = dist[:, defects]
        bnd = None
        if self.has_boundary:
            bnd = dist[:, n].copy()
            bnd[bnd >= _UNREACHABLE] = -1
        if terminal:
            # only reached when the graph has no boundary edges
            bnd = np.full(defects.size, self.terminal_weight)
        pairing = solve(MatchingProblem(w, bnd))

        def walk(row: int, target: int) -> None:
            src = defects[row]
            cur = target
            while cur != src:
                prev = int(pred[row, cur])
                out[self._hop(prev, cur)] ^= 1
                cur = prev

        for i, j in pairing.pairs:
            walk(i, int(defects[j]))
        for i in pairing.to_boundary:
            if not terminal:
                walk(i, n)
        return out

    # ---------------------------------------------------------------------

    def decode(self, syndrome: np.ndarray) -> tuple[np.ndarray, bool]:
        """Return (correction over fault columns, whether the virtual terminal was needed)."""
        syndrome = np.asarray(syndrome, dtype=np.uint8)
        terminal = (not self.has_boundary) and bool(syndrome.sum() % 2)
        if self.backend == "pymatching":
            return self._decode_pymatching(syndrome, terminal), terminal
        return self._decode_exact(syndrome, terminal), terminal


@dataclass
class DecodeResult:
    mu_hat: np.ndarray
    eps_hat: np.ndarray
    repaired_outcome: np.ndarray
    relation_syndrome: np.ndarray
    stabilizer_syndrome: np.ndarray
    residual_syndrome: np.ndarray
    round_index: int = 0
    used_terminal: tuple[bool, bool] = (False, False)

    def to_json(self) -> str:
        return json.dumps(
            {
                "round": self.round_index,
                "mu_hat": np.flatnonzero(self.mu_hat).tolist(),
                "eps_hat": np.flatnonzero(self.eps_hat).tolist(),
                "omega": np.flatnonzero(self.relation_syndrome).tolist(),
                "sigma": np.flatnonzero(self.stabilizer_syndrome).tolist(),
                "residual_syndrome": np.flatnonzero(self.residual_syndrome).tolist(),
                "used_terminal": list(self.used_terminal),
            },
            sort_keys=True,
        )


class Decoder:
    def __init__(self, maps: SyndromeMaps, backend: str = "pymatching") -> None:
        self.maps = maps
        self.round1 = DecodingGraph(maps.dR, backend)
        self.round2 = DecodingGraph(maps.bS, backend)

    def decode(self, zeta, round_index: int = 0) -> DecodeResult:
        maps = self.maps
        if isinstance(zeta, MeasurementOutcome):
            zeta = zeta.zeta
        zeta = np.asarray(zeta, dtype=np.uint8)
        if zeta.shape != (maps.dims["C_M"],):
            raise ValueError(f"outcome has shape {zeta.shape}, expected ({maps.dims['C_M']},)")
        omega = apply(maps.dR_sp, zeta).astype(np.uint8)
        mu_hat, t1 = self.round1.decode(omega)
        repaired = zeta ^ mu_hat
        sigma = apply(maps.dS_sp, repaired).astype(np.uint8)
        eps_hat, t2 = self.round2.decode(sigma)
        residual = sigma ^ apply(maps.bS_sp, eps_hat).astype(np.uint8)
        return DecodeResult(mu_hat, eps_hat, repaired, omega, sigma, residual, round_index, (t1, t2))


def decode(maps: SyndromeMaps, zeta, backend: str = "pymatching") -> DecodeResult:
    return Decoder(maps, backend).decode(zeta)


def logical_flips(code: SubsystemCode, maps: SyndromeMaps, residual: np.ndarray) -> np.ndarray:
    """One bit per logical qubit: does the residual error flip it?

    A Z-type residual flips logical i when it anticommutes with bare X_i, an
    X-type residual when it anticommutes with bare Z_i.
    """
    qubits = maps.qubit_vector(residual).astype(np.int64)
    k = len(code.bare_logicals)
    out = np.zeros(k, dtype=np.uint8)
    for i, (xl, zl) in enumerate(code.bare_logicals):
        partner = xl.x if maps.sector is Sector.Z else zl.z
        out[i] = int(qubits @ partner.astype(np.int64)) & 1
    return out


def is_logical_failure(code: SubsystemCode, maps: SyndromeMaps, residual: np.ndarray) -> bool:
    return bool(logical_flips(code, maps, residual).any())
