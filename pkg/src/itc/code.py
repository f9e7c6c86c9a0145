"""The intertwined toric code on a cell complex.

Qubits live on hosted edges (ids ``0..E-1`` in edge order) followed by hosted
faces. Operator families are built from a handful of local rules that apply
unchanged in the bulk and at every boundary type:

* ``Xe``  X on a hosted edge not in the intertwined plane.
* ``Zf``  Z on a hosted face.
* ``Be``  X on the hosted faces containing an edge (edges off the z-planes).
* ``Bf``  Z on the hosted edges of a face (faces off the e-condensed planes).
* ``Ke``  ``Xe*Be``; on the intertwined plane the two-body ``X_e X_f(e)``.
* ``Kf``  ``Zf*Bf``; on unhosted z-plane faces just ``Bf``.
* ``Av``  X on the hosted edges at a vertex; ``Ac`` Z on the hosted faces of a
  cube, times the ``Bf`` of any intertwined face of that cube.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from itc import gf2
from itc.cells import (
    E_CONDENSED,
    INTERTWINED,
    OPEN_AXIS,
    TRIVIAL,
    CellComplex,
    Kind,
)
from itc.pauli import (
    GeneratorSet,
    PauliOperator,
    centralizer_intersection_rank,
    conjugate_set_by_cx,
    rank,
    symplectic_product,
)


class Presentation(str, enum.Enum):
    TORIC = "toric"
    KVC = "kvc"
    OVERCOMPLETE = "overcomplete"


class Phase(str, enum.Enum):
    PARA = "Para"
    TCE = "TCE"
    TCF = "TCF"
    TWO_TC = "TwoTC"
    RBH = "RBH"


PRESENTATION_FAMILIES = {
    Presentation.TORIC: ("Xe", "Zf", "Be", "Bf", "Ke"),
    Presentation.KVC: ("Xe", "Zf", "Ke", "Kf"),
    Presentation.OVERCOMPLETE: ("Xe", "Zf", "Be", "Bf", "Ke", "Kf"),
}


class Layout:
    """Cell to qubit bookkeeping plus the operator-family rules."""

    def __init__(self, cx: CellComplex) -> None:
        self.cx = cx
        self.edge_qubit = np.full(len(cx.edges), -1, dtype=np.int64)
        self.face_qubit = np.full(len(cx.faces), -1, dtype=np.int64)
        hosted_e = np.flatnonzero(cx.edge_hosts_qubit)
        hosted_f = np.flatnonzero(cx.face_hosts_qubit)
        self.edge_qubit[hosted_e] = np.arange(hosted_e.size)
        self.face_qubit[hosted_f] = hosted_e.size + np.arange(hosted_f.size)
        self.num_edge_qubits = int(hosted_e.size)
        self.n = int(hosted_e.size + hosted_f.size)

    # cell predicates ------------------------------------------------------

    def edge_hosted(self, e: int) -> bool:
        return self.edge_qubit[e] >= 0

    def face_hosted(self, f: int) -> bool:
        return self.face_qubit[f] >= 0

    def in_z_plane(self, tags) -> bool:
        return TRIVIAL in tags or INTERTWINED in tags

    def qubit_cell(self, q: int) -> tuple[str, int]:
        if q < self.num_edge_qubits:
            return "e", int(np.flatnonzero(self.edge_qubit == q)[0])
        return "f", int(np.flatnonzero(self.face_qubit == q)[0])

    # supports -------------------------------------------------------------

    def edges_q(self, edges) -> list[int]:
        return [int(self.edge_qubit[e]) for e in edges if self.edge_qubit[e] >= 0]

    def faces_q(self, faces) -> list[int]:
        return [int(self.face_qubit[f]) for f in faces if self.face_qubit[f] >= 0]

    def op(self, x=(), z=()) -> PauliOperator:
        return PauliOperator.from_support(self.n, x, z)

    def f_of_e(self, e: int) -> int:
        """The face containing an intertwined edge that is not itself in the plane."""
        cands = [f for f in self.cx.edge_faces[e] if INTERTWINED not in self.cx.face_tags[f]]
        if len(cands) != 1:
            raise RuntimeError(f"edge {e}: expected one off-plane face, found {cands}")
        return cands[0]

    def e_of_v(self, v: int) -> int:
        """The edge at a z-boundary vertex that leaves the plane."""
        cands = [e for e in self.cx.vertex_edges[v] if self.cx.edges[e][0] == OPEN_AXIS]
        if len(cands) != 1:
            raise RuntimeError(f"vertex {v}: expected one out-of-plane edge, found {cands}")
        return cands[0]

    # families -------------------------------------------------------------

    def family(self, name: str) -> GeneratorSet:
        rows: list[PauliOperator] = []
        sites: list[int] = []
        builder = getattr(self, f"_fam_{name}")
        for site, op in builder():
            rows.append(op)
            sites.append(site)
        return GeneratorSet.from_rows(self.n, rows, [name] * len(rows), sites)

    def _fam_Xe(self):
        for e, tags in enumerate(self.cx.edge_tags):
            if self.edge_hosted(e) and INTERTWINED not in tags:
                yield e, self.op(x=[self.edge_qubit[e]])

    def _fam_Zf(self):
        for f in range(len(self.cx.faces)):
            if self.face_hosted(f):
                yield f, self.op(z=[self.face_qubit[f]])

    def be(self, e: int) -> PauliOperator:
        return self.op(x=self.faces_q(self.cx.edge_faces[e]))

    def bf(self, f: int) -> PauliOperator:
        return self.op(z=self.edges_q(self.cx.face_edges[f]))

    def has_be(self, e: int) -> bool:
        return self.edge_hosted(e) and not self.in_z_plane(self.cx.edge_tags[e])

    def has_bf(self, f: int) -> bool:
        return E_CONDENSED not in self.cx.face_tags[f]

    def _fam_Be(self):
        for e in range(len(self.cx.edges)):
            if self.has_be(e):
                yield e, self.be(e)

    def _fam_Bf(self):
        for f in range(len(self.cx.faces)):
            if self.has_bf(f):
                yield f, self.bf(f)

    def ke(self, e: int) -> PauliOperator | None:
        tags = self.cx.edge_tags[e]
        if not self.edge_hosted(e) or TRIVIAL in tags:
            return None
        xe = self.op(x=[self.edge_qubit[e]])
        if INTERTWINED in tags:
            return xe * self.op(x=[self.face_qubit[self.f_of_e(e)]])
        return xe * self.be(e)

    def kf(self, f: int) -> PauliOperator | None:
        if not self.has_bf(f):
            return None
        if self.face_hosted(f):
            return self.op(z=[self.face_qubit[f]]) * self.bf(f)
        if self.in_z_plane(self.cx.face_tags[f]):
            return self.bf(f)
        return None

    def _fam_Ke(self):
        for e in range(len(self.cx.edges)):
            k = self.ke(e)
            if k is not None:
                yield e, k

    def _fam_KeBoundary(self):
        for e, tags in enumerate(self.cx.edge_tags):
            if INTERTWINED in tags and self.edge_hosted(e):
                yield e, self.ke(e)

    def _fam_Kf(self):
        for f in range(len(self.cx.faces)):
            k = self.kf(f)
            if k is not None:
                yield f, k

    def has_av(self, v: int) -> bool:
        return E_CONDENSED not in self.cx.vertex_tags[v]

    def av(self, v: int) -> PauliOperator:
        return self.op(x=self.edges_q(self.cx.vertex_edges[v]))

    def _fam_Av(self):
        for v in range(len(self.cx.vertices)):
            if self.has_av(v):
                yield v, self.av(v)

    def ac(self, c: int) -> PauliOperator:
        faces = self.cx.cube_faces[c]
        op = self.op(z=self.faces_q(faces))
        for f in faces:
            if INTERTWINED in self.cx.face_tags[f]:
                op = op * self.bf(f)
        return op

    def _fam_Ac(self):
        for c in range(len(self.cx.cubes)):
            yield c, self.ac(c)

    def _fam_Av2d(self):
        for v, tags in enumerate(self.cx.vertex_tags):
            if INTERTWINED in tags and self.has_av(v):
                yield v, self.av(v) * self.op(x=[self.edge_qubit[self.e_of_v(v)]])

    def _fam_Av2dEff(self):
        for v, tags in enumerate(self.cx.vertex_tags):
            if TRIVIAL in tags and self.has_av(v):
                yield v, self.av(v) * self.ke(self.e_of_v(v))

    def _fam_Nonlocal(self):
        if self.cx.geometry.kind is not Kind.TORUS3:
            return
        for a in range(3):
            edges = [e for e, key in enumerate(self.cx.edges) if key[0] == a and key[1 + a] == 0]
            yield a, self.op(x=self.edges_q(edges))
        for a in range(3):
            faces = [f for f, key in enumerate(self.cx.faces) if key[0] == a and key[1 + a] == 0]
            yield 3 + a, self.op(z=self.faces_q(faces))


def _span_contains(big: GeneratorSet, small: GeneratorSet) -> bool:
    if len(small) == 0:
        return True
    return rank(big + small) == rank(big)


def same_span(a: GeneratorSet, b: GeneratorSet) -> bool:
    return _span_contains(a, b) and _span_contains(b, a)


def _all_commute(a: GeneratorSet, b: GeneratorSet | None = None) -> bool:
    if len(a) == 0 or (b is not None and len(b) == 0):
        return True
    return not a.commutation_matrix(b).any()


@dataclass(frozen=True, eq=False)
class SubsystemCode:
    complex: CellComplex
    presentation: Presentation
    layout: Layout = field(repr=False)
    checks: GeneratorSet = field(repr=False)
    stabilizers: GeneratorSet = field(repr=False)
    redundancy: GeneratorSet = field(repr=False)
    bare_logicals: tuple[tuple[PauliOperator, PauliOperator], ...] = ()
    dressed_logicals: tuple[tuple[PauliOperator, PauliOperator], ...] = ()

    @property
    def n(self) -> int:
        return self.layout.n

    @property
    def geometry(self):
        return self.complex.geometry

    @cached_property
    def check_rank(self) -> int:
        return rank(self.checks)

    @cached_property
    def center_rank(self) -> int:
        return centralizer_intersection_rank(self.checks)

    def family(self, name: str) -> GeneratorSet:
        """Any operator family on this layout, regardless of presentation."""
        return self.layout.family(name)

    def summary(self) -> dict:
        g = self.geometry
        return {
            "geometry": g.kind.value,
            "L": g.L,
            "presentation": self.presentation.value,
            "N": self.n,
            "families": {name: sum(1 for l in self.checks.labels if l == name) for name in self.checks.families()},
            "stabilizers": {name: sum(1 for l in self.stabilizers.labels if l == name) for name in self.stabilizers.families()},
            "check_rank": self.check_rank,
            "stabilizer_rank": rank(self.stabilizers),
            "center_rank": self.center_rank,
            "K": count_logical_qubits(self),
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True, indent=2) + "\n"

    def logicals_set(self, dressed: bool = False) -> GeneratorSet:
        pairs = self.dressed_logicals if dressed else self.bare_logicals
        prefix = "d" if dressed else ""
        rows, labels = [], []
        for i, (xl, zl) in enumerate(pairs, start=1):
            rows += [xl, zl]
            labels += [f"{prefix}X{i}", f"{prefix}Z{i}"]
        return GeneratorSet.from_rows(self.n, rows, labels)


def build_itc(cx: CellComplex, presentation: Presentation | str = Presentation.KVC) -> SubsystemCode:
    presentation = Presentation(presentation)
    lay = Layout(cx)
    fams = []
    for name in PRESENTATION_FAMILIES[presentation]:
        if name == "Ke" and presentation is Presentation.TORIC:
            fams.append(lay.family("KeBoundary").relabel("Ke"))
        else:
            fams.append(lay.family(name))
    checks = _concat(lay.n, fams)
    stabilizers = _concat(lay.n, [lay.family("Av"), lay.family("Ac"), lay.family("Nonlocal")])
    redundancy = _concat(lay.n, [lay.family("Av2d"), lay.family("Av2dEff")])
    code = SubsystemCode(cx, presentation, lay, checks, stabilizers, redundancy)
    _verify_stabilizers(code)
    return code


def _concat(n: int, sets: list[GeneratorSet]) -> GeneratorSet:
    out = GeneratorSet.empty(n)
    for s in sets:
        out = out + s
    return out


def _verify_stabilizers(code: SubsystemCode) -> None:
    if not _all_commute(code.stabilizers, code.checks):
        raise RuntimeError("a stabilizer anticommutes with a check")
    if not _span_contains(code.checks, code.stabilizers):
        raise RuntimeError("a stabilizer is not generated by the checks")
    if not _span_contains(code.checks, code.redundancy):
        raise RuntimeError("a boundary redundancy operator is not generated by the checks")
    if not _all_commute(code.redundancy, code.stabilizers):
        raise RuntimeError("a boundary redundancy operator anticommutes with a stabilizer")


def count_logical_qubits(code: SubsystemCode) -> int:
    """K = N - (rank G + rank Z(G) cap G) / 2."""
    total = code.check_rank + code.center_rank
    if total % 2:
        raise RuntimeError("check and center ranks have odd sum")
    return code.n - total // 2


def stabilizer_discrepancy(code: SubsystemCode) -> int:
    """Center rank minus the rank of the explicit stabilizers (0 when complete)."""
    return code.center_rank - rank(code.stabilizers)


def family_ranks(code: SubsystemCode) -> dict[str, int]:
    return {name: rank(code.family(name)) for name in ("Xe", "Zf", "Be", "Bf", "Ke", "Kf", "Av", "Ac")}


# logical operators ---------------------------------------------------------


def _slab_logicals(lay: Layout):
    cx, L = lay.cx, lay.cx.geometry.L
    pairs, dressed = [], []
    # pair 1 uses y-edges / normal-x faces, pair 2 the same with x and y swapped
    for a, b in ((1, 0), (0, 1)):
        xbar_edges = [e for e, k in enumerate(cx.edges) if k[0] == a and k[1 + a] == 0]
        zbar_faces = [f for f, k in enumerate(cx.faces) if k[0] == b and k[1 + b] == 0]
        curve = [e for e, k in enumerate(cx.edges) if k[0] == a and k[1 + b] == 0 and k[3] == L]
        dual_curve = [f for f, k in enumerate(cx.faces) if k[0] == b and k[1 + a] == 0 and k[3] == 0]
        xbar = lay.op(x=lay.edges_q(xbar_edges))
        zbar = lay.op(z=lay.faces_q(zbar_faces) + lay.edges_q(curve))
        pairs.append((xbar, zbar))
        dressed.append((lay.op(x=lay.faces_q(dual_curve)), lay.op(z=lay.edges_q(curve))))
    return pairs, dressed


def _cube_logicals(lay: Layout):
    cx, L = lay.cx, lay.cx.geometry.L
    xbar_edges = [e for e, k in enumerate(cx.edges) if k[0] == 1 and k[2] == 0]
    zbar_faces = [f for f, k in enumerate(cx.faces) if k[0] == 0 and k[1] == 0]
    curve = [e for e, k in enumerate(cx.edges) if k[0] == 1 and k[1] == 0 and k[3] == L]
    dual_curve = [f for f, k in enumerate(cx.faces) if k[0] == 0 and k[2] == 0 and k[3] == 0]
    xbar = lay.op(x=lay.edges_q(xbar_edges))
    zbar = lay.op(z=lay.faces_q(zbar_faces) + lay.edges_q(curve))
    dressed = (lay.op(x=lay.faces_q(dual_curve)), lay.op(z=lay.edges_q(curve)))
    return [(xbar, zbar)], [dressed]


def build_logicals(code: SubsystemCode) -> SubsystemCode:
    kind = code.geometry.kind
    if kind is Kind.TORUS3:
        return replace(code, bare_logicals=(), dressed_logicals=())
    if kind is Kind.SLAB:
        bare, dressed = _slab_logicals(code.layout)
    else:
        bare, dressed = _cube_logicals(code.layout)
    out = replace(code, bare_logicals=tuple(bare), dressed_logicals=tuple(dressed))
    problems = check_logicals(out)
    if problems:
        raise RuntimeError("logical operator invariants violated: " + "; ".join(problems))
    return out


def check_logicals(code: SubsystemCode) -> list[str]:
    """Return a list of violated logical invariants (empty when all hold)."""
    problems = []
    bare = code.logicals_set()
    dressed = code.logicals_set(dressed=True)
    k = len(code.bare_logicals)
    if k != count_logical_qubits(code):
        problems.append(f"{k} logical pairs but K = {count_logical_qubits(code)}")
    if not _all_commute(bare, code.checks):
        problems.append("bare logical anticommutes with a check")
    if not _all_commute(dressed, code.stabilizers):
        problems.append("dressed logical anticommutes with a stabilizer")
    gs = code.checks + code.stabilizers
    base = rank(gs)
    for i, p in enumerate(bare):
        if rank(gs + GeneratorSet.from_rows(code.n, [p])) == base:
            problems.append(f"bare logical {bare.labels[i]} lies in the check group")
    for i in range(k):
        for j in range(k):
            want = int(i == j)
            xb, zb = code.bare_logicals[i][0], code.bare_logicals[j][1]
            xd, zd = code.dressed_logicals[i][0], code.dressed_logicals[j][1]
            if symplectic_product(xb, zb) != want:
                problems.append(f"bare X{i + 1} vs bare Z{j + 1}")
            if symplectic_product(xb, zd) != want:
                problems.append(f"bare X{i + 1} vs dressed Z{j + 1}")
            if symplectic_product(xd, zb) != want:
                problems.append(f"dressed X{i + 1} vs bare Z{j + 1}")
            if symplectic_product(xd, zd) != 0:
                problems.append(f"dressed X{i + 1} vs dressed Z{j + 1} should commute")
    return problems


# U_CX symmetry and mirror --------------------------------------------------


def ucx_pairs(code: SubsystemCode) -> list[tuple[int, int]]:
    """(edge qubit, face qubit) for every incident hosted pair."""
    lay = code.layout
    pairs = []
    for f, edges in enumerate(code.complex.face_edges):
        if not lay.face_hosted(f):
            continue
        for e in edges:
            if lay.edge_hosted(e):
                pairs.append((int(lay.edge_qubit[e]), int(lay.face_qubit[f])))
    return sorted(pairs)


def apply_ucx(code: SubsystemCode) -> SubsystemCode:
    """Conjugate every generator family by the product of CX gates."""
    pairs = ucx_pairs(code)
    return replace(
        code,
        checks=conjugate_set_by_cx(code.checks, pairs),
        stabilizers=conjugate_set_by_cx(code.stabilizers, pairs),
        redundancy=conjugate_set_by_cx(code.redundancy, pairs),
        bare_logicals=(),
        dressed_logicals=(),
    )


def mirror_permutation(code: SubsystemCode) -> np.ndarray:
    """Qubit permutation for the reflection z -> L - z of an open geometry."""
    cx, lay = code.complex, code.layout
    if cx.geometry.kind is Kind.TORUS3:
        raise ValueError("the mirror is defined only for geometries with an open z axis")
    L = cx.geometry.L
    perm = np.empty(code.n, dtype=np.int64)
    for e, (a, x, y, z) in enumerate(cx.edges):
        if lay.edge_hosted(e):
            zz = L - 1 - z if a == OPEN_AXIS else L - z
            perm[lay.edge_qubit[e]] = lay.edge_qubit[cx.index[("e", a, x, y, zz)]]
    for f, (a, x, y, z) in enumerate(cx.faces):
        if lay.face_hosted(f):
            zz = L - z if a == OPEN_AXIS else L - 1 - z
            perm[lay.face_qubit[f]] = lay.face_qubit[cx.index[("f", a, x, y, zz)]]
    return perm


def permute_qubits(gens: GeneratorSet, perm: np.ndarray) -> GeneratorSet:
    x = np.zeros_like(gens.x)
    z = np.zeros_like(gens.z)
    x[:, perm] = gens.x
    z[:, perm] = gens.z
    return GeneratorSet(gens.n, x, z, gens.labels, gens.sites)


# gauge fixing --------------------------------------------------------------


def _select(gens: GeneratorSet, pred) -> GeneratorSet:
    return gens.select([i for i, s in enumerate(gens.sites) if pred(s)])


def phase_terms(code: SubsystemCode, phase: Phase | str) -> GeneratorSet:
    phase = Phase(phase)
    lay, cx = code.layout, code.complex
    fam = code.family
    on_face = lambda role: (lambda f: role in cx.face_tags[f])  # noqa: E731
    if phase is Phase.PARA:
        sets = [fam("Xe"), fam("Zf"), fam("Av2d"), _select(fam("Bf"), on_face(INTERTWINED))]
    elif phase is Phase.TCE:
        sets = [fam("Av"), fam("Zf"), fam("Bf")]
    elif phase is Phase.TCF:
        sets = [fam("Ac"), fam("Xe"), fam("KeBoundary"), fam("Be")]
    elif phase is Phase.TWO_TC:
        sets = [fam("Av"), fam("Ac"), fam("Be"), fam("Bf")]
    else:
        sets = [
            fam("Ke"),
            _select(fam("Kf"), lay.face_hosted),
            _select(fam("Bf"), on_face(TRIVIAL)),
            fam("Av2dEff"),
        ]
    return _concat(code.n, sets)


def gauge_fix(code: SubsystemCode, phase: Phase | str) -> GeneratorSet:
    """Commuting term set of a fixed-point Hamiltonian, with its guarantees checked."""
    terms = phase_terms(code, phase)
    if not _all_commute(terms):
        raise RuntimeError(f"{phase}: terms do not commute")
    if not _span_contains(code.checks + code.stabilizers, terms):
        raise RuntimeError(f"{phase}: a term is outside the check group")
    bare = code.logicals_set()
    if not _all_commute(bare, terms):
        raise RuntimeError(f"{phase}: a bare logical anticommutes with a term")
    return terms


def rbh_x_decomposition(code: SubsystemCode) -> tuple[PauliOperator, PauliOperator]:
    """Split the first bare X logical of the slab into RBH bulk and boundary parts.

    Returns ``(product of bulk K_e, boundary toric-code logical)``.
    """
    if code.geometry.kind is not Kind.SLAB:
        raise ValueError("defined for the slab only")
    lay, cx = code.layout, code.complex
    bulk = PauliOperator.identity(code.n)
    boundary = PauliOperator.identity(code.n)
    for e, (a, x, y, z) in enumerate(cx.edges):
        if a != 1 or y != 0:
            continue
        if TRIVIAL in cx.edge_tags[e]:
            up = [f for f in cx.edge_faces[e] if TRIVIAL not in cx.face_tags[f]]
            boundary = boundary * lay.op(x=[lay.edge_qubit[e]] + lay.faces_q(up))
        else:
            bulk = bulk * lay.ke(e)
    return bulk, boundary


# export --------------------------------------------------------------------


def export_text(code: SubsystemCode) -> dict[str, str]:
    """Sparse text for each generator group, keyed by a file stem."""
    out = {
        "checks": code.checks.to_text(),
        "stabilizers": code.stabilizers.to_text(),
        "redundancy": code.redundancy.to_text(),
    }
    if code.bare_logicals:
        out["logicals"] = code.logicals_set().to_text() + code.logicals_set(dressed=True).to_text()
    return out
