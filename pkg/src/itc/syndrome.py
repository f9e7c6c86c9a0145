"""Syndrome maps of the measurement cycle, one CSS sector at a time.

Z sector: Z qubit errors, X-type measurements ``[Xe, Ke, Av2dEff, Av2d]``,
stabilizers ``Av`` and relations indexed by the same vertices.
X sector: X qubit errors, Z-type measurements ``[Zf, Kf]``, stabilizers ``Ac``
and relations indexed by cubes.

All maps are GF(2) matrices with rows indexing the codomain:
``dQ: C_G -> C_Q``, ``dM: C_Q -> C_M``, ``dS: C_M -> C_S``,
``dR: C_M -> C_R`` and ``bS: C_Q -> C_S`` (the stabilizer boundary).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from itc import gf2
from itc.cells import INTERTWINED, TRIVIAL
from itc.code import Presentation, SubsystemCode


class Sector(str, enum.Enum):
    Z = "Z"
    X = "X"


GREEN = {Sector.Z: "Xe", Sector.X: "Zf"}
YELLOW = {Sector.Z: "Ke", Sector.X: "Kf"}
REDUNDANT = ("Av2dEff", "Av2d")


def _csr(mat: np.ndarray) -> sp.csr_matrix:
    return sp.csr_matrix(mat.astype(np.uint8))


def apply(mat: sp.csr_matrix, vec: np.ndarray) -> np.ndarray:
    """Sparse matrix-vector product mod 2."""
    return (mat @ np.asarray(vec, dtype=np.int64)).astype(np.int64) & 1


@dataclass(frozen=True, eq=False)
class SyndromeMaps:
    sector: Sector
    geometry: str
    L: int
    q_order: np.ndarray  # C_Q coordinate -> qubit id
    gauge_labels: tuple[tuple[str, int], ...]
    meas_labels: tuple[tuple[str, int], ...]
    node_cells: tuple[int, ...]  # C_S and C_R share this index (vertex or cube id)
    dQ: np.ndarray
    dM: np.ndarray
    dS: np.ndarray
    dR: np.ndarray
    bS: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("dQ", "dM", "dS", "dR", "bS"):
            object.__setattr__(self, f"{name}_sp", _csr(getattr(self, name)))

    @property
    def dims(self) -> dict[str, int]:
        return {
            "C_G": self.dQ.shape[1],
            "C_Q": self.dM.shape[1],
            "C_M": self.dM.shape[0],
            "C_S": self.dS.shape[0],
            "C_R": self.dR.shape[0],
        }

    def meas_index(self, family: str, site: int) -> int:
        return self._meas_lookup[(family, site)]

    @property
    def _meas_lookup(self) -> dict:
        cache = self.__dict__.get("_ml")
        if cache is None:
            cache = {lab: i for i, lab in enumerate(self.meas_labels)}
            object.__setattr__(self, "_ml", cache)
        return cache

    def family_mask(self, *families: str) -> np.ndarray:
        return np.array([lab[0] in families for lab in self.meas_labels], dtype=bool)

    def qubit_vector(self, cq: np.ndarray) -> np.ndarray:
        """Scatter a C_Q vector onto qubit ids."""
        out = np.zeros(self.q_order.size, dtype=np.uint8)
        out[self.q_order] = np.asarray(cq, dtype=np.uint8)
        return out

    def identities(self) -> dict[str, bool]:
        return {
            "bS = dS dM": np.array_equal(self.bS, gf2.matmul(self.dS, self.dM)),
            "bS dQ = 0": not gf2.matmul(self.bS, self.dQ).any(),
            "dR dM = 0": not gf2.matmul(self.dR, self.dM).any(),
        }

    def dump_maps(self) -> str:
        """Coordinate-list text: a header per map, then ``ROW i: j,k,...``."""
        lines = []
        for name in ("dQ", "dM", "dS", "dR", "bS"):
            mat = getattr(self, name)
            lines.append(f"MAP {name} {mat.shape[0]} {mat.shape[1]}")
            for i, row in enumerate(mat):
                lines.append(f"ROW {i}: {','.join(map(str, np.flatnonzero(row)))}")
        return "\n".join(lines) + "\n"


def build_maps(code: SubsystemCode, sector: Sector | str = Sector.Z) -> SyndromeMaps:
    sector = Sector(sector)
    if code.presentation is Presentation.TORIC:
        raise ValueError("syndrome maps need the KVC or overcomplete presentation")
    lay, cx = code.layout, code.complex
    if sector is Sector.Z:
        q_order = np.arange(lay.n)
        gauge = lay.family("Zf") + lay.family("Kf")
        meas = lay.family("Xe") + lay.family("Ke") + lay.family("Av2dEff") + lay.family("Av2d")
        stabs = lay.family("Av")
        part_g, part_m = gauge.z, meas.x
    else:
        q_order = np.concatenate([np.arange(lay.num_edge_qubits, lay.n), np.arange(lay.num_edge_qubits)])
        gauge = lay.family("Xe") + lay.family("Ke")
        meas = lay.family("Zf") + lay.family("Kf")
        stabs = lay.family("Ac")
        part_g, part_m = gauge.x, meas.z
    meas_labels = tuple(zip(meas.labels, meas.sites))
    index = {lab: i for i, lab in enumerate(meas_labels)}
    nodes = tuple(stabs.sites)

    dQ = part_g[:, q_order].T.copy()
    dM = part_m[:, q_order].copy()
    bS = (stabs.x if sector is Sector.Z else stabs.z)[:, q_order].copy()
    dS = np.zeros((len(nodes), len(meas_labels)), dtype=np.uint8)
    dR = np.zeros_like(dS)

    def put(mat, row, fam, site):
        key = (fam, site)
        if key in index:
            mat[row, index[key]] ^= 1

    for r, cell in enumerate(nodes):
        if sector is Sector.Z:
            v, tags = cell, cx.vertex_tags[cell]
            edges = cx.vertex_edges[v]
            if INTERTWINED in tags:
                ev = lay.e_of_v(v)
                put(dS, r, "Av2d", v)
                put(dS, r, "Xe", ev)
                for e in edges:
                    put(dR, r, "Ke", e)
                put(dR, r, "Av2d", v)
                put(dR, r, "Xe", ev)
            elif TRIVIAL in tags:
                for e in edges:
                    put(dS, r, "Xe", e)
                    put(dR, r, "Xe", e)
                put(dR, r, "Ke", lay.e_of_v(v))
                put(dR, r, "Av2dEff", v)
            else:
                for e in edges:
                    put(dS, r, "Xe", e)
                    put(dR, r, "Xe", e)
                    put(dR, r, "Ke", e)
        else:
            faces = cx.cube_faces[cell]
            for f in faces:
                put(dS, r, "Zf", f)
                put(dR, r, "Zf", f)
                put(dR, r, "Kf", f)
                if INTERTWINED in cx.face_tags[f]:
                    put(dS, r, "Kf", f)

    maps = SyndromeMaps(
        sector=sector,
        geometry=cx.geometry.kind.value,
        L=cx.geometry.L,
        q_order=q_order,
        gauge_labels=tuple(zip(gauge.labels, gauge.sites)),
        meas_labels=meas_labels,
        node_cells=nodes,
        dQ=dQ,
        dM=dM,
        dS=dS,
        dR=dR,
        bS=bS,
    )
    bad = [k for k, ok in maps.identities().items() if not ok]
    if bad:
        raise RuntimeError(f"syndrome map identities fail: {bad}")
    for name in ("dR", "bS"):
        if getattr(maps, name).sum(axis=0).max(initial=0) > 2:
            raise RuntimeError(f"{name} has a column of weight > 2; not a graph")
    maps.metadata.update(_parity_metadata(maps))
    return maps


def _parity_metadata(maps: SyndromeMaps) -> dict:
    """Can a relation-valid outcome carry a stabilizer syndrome no error explains?"""
    kernel = gf2.nullspace(maps.dR)
    images = gf2.matmul(maps.dS, kernel.T)
    base = gf2.rank(maps.bS) if maps.bS.size else 0
    joint = gf2.rank(np.concatenate([maps.bS, images], axis=1)) if images.size else base
    return {
        "unexplainable_sigma_possible": bool(joint > base),
        "round1_has_boundary": bool((maps.dR.sum(axis=0) == 1).any()),
        "round2_has_boundary": bool((maps.bS.sum(axis=0) == 1).any()),
    }


@dataclass(frozen=True)
class MeasurementOutcome:
    zeta: np.ndarray
    sector: Sector

    def dump(self, maps: SyndromeMaps) -> str:
        ids = ",".join(map(str, np.flatnonzero(self.zeta)))
        return f"ZETA {self.sector.value} {maps.L} {maps.geometry}: {ids}\n"


def _check_len(vec, size: int, what: str) -> np.ndarray:
    vec = np.zeros(size, np.uint8) if vec is None else np.asarray(vec, dtype=np.uint8) & 1
    if vec.shape != (size,):
        raise ValueError(f"{what} has shape {vec.shape}, expected ({size},)")
    return vec


def outcome(maps: SyndromeMaps, eps=None, mu=None, gamma=None) -> MeasurementOutcome:
    """zeta = dM eps + mu + dM dQ gamma."""
    d = maps.dims
    eps = _check_len(eps, d["C_Q"], "eps")
    mu = _check_len(mu, d["C_M"], "mu")
    gamma = _check_len(gamma, d["C_G"], "gamma")
    q = eps ^ apply(maps.dQ_sp, gamma).astype(np.uint8)
    zeta = apply(maps.dM_sp, q).astype(np.uint8) ^ mu
    return MeasurementOutcome(zeta, maps.sector)


def syndromes(maps: SyndromeMaps, zeta) -> tuple[np.ndarray, np.ndarray]:
    """(sigma, omega) = (dS zeta, dR zeta)."""
    if isinstance(zeta, MeasurementOutcome):
        zeta = zeta.zeta
    zeta = _check_len(zeta, maps.dims["C_M"], "zeta")
    return apply(maps.dS_sp, zeta).astype(np.uint8), apply(maps.dR_sp, zeta).astype(np.uint8)


def dump_syndrome(maps: SyndromeMaps, sigma, omega) -> str:
    s = ",".join(map(str, np.flatnonzero(sigma)))
    w = ",".join(map(str, np.flatnonzero(omega)))
    return f"SIGMA {maps.sector.value} {maps.L} {maps.geometry}: {s}\nOMEGA {maps.sector.value} {maps.L} {maps.geometry}: {w}\n"


@dataclass
class RuleReport:
    satisfied: list[int]
    stabilizer_violated: list[int]
    relation_violated: list[int]
    violations: list[str]
    green_degree: np.ndarray
    yellow_degree: np.ndarray

    @property
    def ok(self) -> bool:
        return not self.violations


def _role(maps: SyndromeMaps, code: SubsystemCode | None, r: int) -> str:
    if maps.sector is Sector.X or code is None:
        return "bulk"
    tags = code.complex.vertex_tags[maps.node_cells[r]]
    if INTERTWINED in tags:
        return INTERTWINED
    if TRIVIAL in tags:
        return TRIVIAL
    return "bulk"


def validate_outcome_rules(maps: SyndromeMaps, zeta, code: SubsystemCode | None = None) -> RuleReport:
    """Classify nodes and check where green and yellow lines may end.

    A line's end at a node is the parity of its flipped measurements entering
    that node's relation. Where the relation holds, green and yellow ends must
    both coincide with the stabilizer outcome, except that yellow lines may end
    freely on the trivial boundary and green lines on the intertwined one.
    ``code`` supplies the boundary roles; without it every node counts as bulk.
    """
    if isinstance(zeta, MeasurementOutcome):
        zeta = zeta.zeta
    sigma, omega = syndromes(maps, zeta)
    green = apply(maps.dR_sp, np.asarray(zeta) * maps.family_mask(GREEN[maps.sector])).astype(np.uint8)
    yellow = apply(maps.dR_sp, np.asarray(zeta) * maps.family_mask(YELLOW[maps.sector])).astype(np.uint8)
    sat, stab, rel, bad = [], [], [], []
    for r in range(len(maps.node_cells)):
        if omega[r]:
            rel.append(r)
        elif sigma[r]:
            stab.append(r)
        else:
            sat.append(r)
        if omega[r]:
            continue
        role = _role(maps, code, r)
        if role != TRIVIAL and yellow[r] != sigma[r]:
            bad.append(f"node {r}: yellow line ends without matching stabilizer outcome")
        if role != INTERTWINED and green[r] != sigma[r]:
            bad.append(f"node {r}: green line ends without matching stabilizer outcome")
    return RuleReport(sat, stab, rel, bad, green, yellow)


@dataclass(frozen=True)
class OvercompleteOutcome:
    zeta: np.ndarray  # one bit per row of the overcomplete check list
    labels: tuple[tuple[str, int], ...]
    violated: tuple[int, ...]  # cells whose per-cell relation fails

    def dump(self) -> str:
        return f"RELATION: {','.join(map(str, self.violated))}\n"


def overcomplete_outcome(code: SubsystemCode, eps=None, mu6=None, sector: Sector | str = Sector.Z) -> OvercompleteOutcome:
    """Outcomes of all six families with the per-cell relations ``K X B = 1``.

    In the Z sector the relations are per edge (Ke, Xe, Be); in the X sector
    per face (Kf, Zf, Bf).
    """
    sector = Sector(sector)
    if code.presentation is not Presentation.OVERCOMPLETE:
        raise ValueError("needs the overcomplete presentation")
    checks = code.checks
    eps = _check_len(eps, code.n, "eps")
    mu6 = _check_len(mu6, len(checks), "mu6")
    part = checks.x if sector is Sector.Z else checks.z
    zeta = (gf2.matmul(part, eps[:, None])[:, 0] ^ mu6).astype(np.uint8)
    fams = ("Ke", "Xe", "Be") if sector is Sector.Z else ("Kf", "Zf", "Bf")
    per_cell: dict[int, list[int]] = {}
    for i, (lab, site) in enumerate(zip(checks.labels, checks.sites)):
        if lab in fams:
            per_cell.setdefault(site, []).append(i)
    violated = []
    for site in sorted(per_cell):
        rows = per_cell[site]
        if sorted(checks.labels[i] for i in rows) != sorted(fams):
            continue
        if np.bitwise_xor.reduce(zeta[rows]):
            violated.append(site)
    return OvercompleteOutcome(zeta, tuple(zip(checks.labels, checks.sites)), tuple(violated))
