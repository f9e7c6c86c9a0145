import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itc import gf2
from itc.cells import Geometry, Kind, build_complex
from itc.code import build_itc, build_logicals
from itc.syndrome import (
    MeasurementOutcome,
    Sector,
    build_maps,
    dump_syndrome,
    outcome,
    overcomplete_outcome,
    syndromes,
    validate_outcome_rules,
)

_CACHE = {}


def setup(kind, L, sector="Z", presentation="kvc"):
    key = (kind, L, sector, presentation)
    if key not in _CACHE:
        code = build_logicals(build_itc(build_complex(Geometry(kind, L)), presentation))
        _CACHE[key] = (code, build_maps(code, sector))
    return _CACHE[key]


def unit(n, i):
    v = np.zeros(n, np.uint8)
    v[i] = 1
    return v


@pytest.mark.parametrize("kind", list(Kind))
@pytest.mark.parametrize("L", [2, 3])
@pytest.mark.parametrize("sector", list(Sector))
def test_identities(kind, L, sector):
    _, maps = setup(kind, L, sector)
    assert all(maps.identities().values())


def test_rejects_toric_presentation():
    code = build_itc(build_complex(Geometry("torus3", 2)), "toric")
    with pytest.raises(ValueError):
        build_maps(code)


def test_torus_columns():
    code, maps = setup("torus3", 2)
    lay, cx = code.layout, code.complex
    f = 5
    col = maps.dM[:, lay.face_qubit[f]]
    assert col.sum() == 4
    assert {maps.meas_labels[i] for i in np.flatnonzero(col)} == {("Ke", e) for e in cx.face_edges[f]}
    e = 7
    col = maps.dM[:, lay.edge_qubit[e]]
    assert {maps.meas_labels[i] for i in np.flatnonzero(col)} == {("Xe", e), ("Ke", e)}


def test_torus_bulk_blocks():
    code, maps = setup("torus3", 3)
    cx = code.complex
    E = len(cx.edges)
    ve = cx.incidence("ve")
    ef = cx.incidence("ef")
    eye = np.eye(E, dtype=np.uint8)
    # gauge columns [Zf | Kf], qubit rows [edges; faces]
    zero = np.zeros_like(ef)
    assert np.array_equal(maps.dQ, np.block([[zero, ef], [eye, eye]]))
    assert np.array_equal(maps.dM, np.block([[eye, zero], [eye, ef]]))
    assert np.array_equal(maps.dS, np.block([ve, np.zeros_like(ve)]))
    assert np.array_equal(maps.dR, np.block([ve, ve]))


def test_outcome_examples():
    code, maps = setup("torus3", 2)
    cx = code.complex
    d = maps.dims
    f = 3
    gamma = unit(d["C_G"], maps.gauge_labels.index(("Kf", f)))
    z = outcome(maps, gamma=gamma).zeta
    assert {maps.meas_labels[i] for i in np.flatnonzero(z)} == {("Xe", e) for e in cx.face_edges[f]}
    assert not outcome(maps).zeta.any()
    assert outcome(maps, eps=unit(d["C_Q"], 0)).zeta.sum() == 2
    with pytest.raises(ValueError):
        outcome(maps, eps=np.zeros(3))


def test_string_syndromes():
    code, maps = setup("torus3", 4)
    cx, lay = code.complex, code.layout
    path = [cx.edge_id(0, (x, 0, 0)) for x in range(3)]
    eps = np.zeros(maps.dims["C_Q"], np.uint8)
    eps[[lay.edge_qubit[e] for e in path]] = 1
    zeta = outcome(maps, eps=eps).zeta
    sigma, omega = syndromes(maps, zeta)
    ends = {cx.vertex_id((0, 0, 0)), cx.vertex_id((3, 0, 0))}
    assert {maps.node_cells[i] for i in np.flatnonzero(sigma)} == ends
    assert not omega.any()
    zeta[maps.meas_index("Xe", path[1])] ^= 1
    sigma, omega = syndromes(maps, zeta)
    # direct parity count of flipped Xe and Ke at each vertex
    flipped = {maps.meas_labels[i] for i in np.flatnonzero(zeta)}
    for r, v in enumerate(maps.node_cells):
        count = sum((fam, e) in flipped for e in cx.vertex_edges[v] for fam in ("Xe", "Ke"))
        assert omega[r] == count % 2
    assert {maps.node_cells[i] for i in np.flatnonzero(omega)} == set(cx.edge_vertices[path[1]])


@pytest.mark.parametrize("kind", list(Kind))
@pytest.mark.parametrize("sector", list(Sector))
def test_code_states_have_trivial_syndromes(kind, sector):
    _, maps = setup(kind, 3, sector)
    rng = np.random.default_rng(4)
    for _ in range(20):
        gamma = rng.integers(0, 2, maps.dims["C_G"])
        sigma, omega = syndromes(maps, outcome(maps, gamma=gamma))
        assert not sigma.any() and not omega.any()


def test_sector_duality_on_torus():
    code, zmaps = setup("torus3", 3, "Z")
    _, xmaps = setup("torus3", 3, "X")
    cx, L = code.complex, 3
    lay = code.layout

    def shift(p, a):
        q = list(p)
        q[a] -= 1
        return tuple(q)

    # vertex p <-> cube p, edge (a, p - a) <-> face (a, p)
    node_map = [xmaps.node_cells.index(cx.cube_id(cx.vertices[v])) for v in zmaps.node_cells]
    edge_of_face = {}
    for f, (a, *p) in enumerate(cx.faces):
        edge_of_face[f] = cx.edge_id(a, shift(p, a))
    meas_map = []
    for fam, site in zmaps.meas_labels:
        face = next(f for f, e in edge_of_face.items() if e == site)
        meas_map.append(xmaps.meas_index({"Xe": "Zf", "Ke": "Kf"}[fam], face))
    xq = {q: i for i, q in enumerate(xmaps.q_order)}
    # Z-sector edge qubits correspond to X-sector face qubits
    edge_rows, face_cols = [], []
    for i, q in enumerate(zmaps.q_order):
        kind, cell = lay.qubit_cell(q)
        if kind == "e":
            f = next(f for f, e in edge_of_face.items() if e == cell)
            edge_rows.append(i)
            face_cols.append(xq[lay.face_qubit[f]])
    assert np.array_equal(xmaps.dR[np.ix_(node_map, meas_map)], zmaps.dR)
    assert np.array_equal(xmaps.dS[np.ix_(node_map, meas_map)], zmaps.dS)
    assert np.array_equal(xmaps.dM[np.ix_(meas_map, face_cols)], zmaps.dM[:, edge_rows])


def test_fig1b_outcome_rules():
    code, maps = setup("slab", 4)
    cx, lay = code.complex, code.layout
    # a 2x2 patch of normal-x faces at x=0, Z_e on part of its boundary
    faces = [cx.face_id(0, (0, y, z)) for y in (1, 2) for z in (1, 2)]
    path = [cx.edge_id(1, (0, 1, 1)), cx.edge_id(1, (0, 2, 1)), cx.edge_id(2, (0, 3, 1)), cx.edge_id(2, (0, 3, 2))]
    eps = np.zeros(maps.dims["C_Q"], np.uint8)
    eps[[lay.face_qubit[f] for f in faces]] = 1
    eps[[lay.edge_qubit[e] for e in path]] = 1
    report = validate_outcome_rules(maps, outcome(maps, eps=eps), code)
    assert report.ok and not report.relation_violated
    ends = {maps.node_cells[r] for r in report.stabilizer_violated}
    assert ends == {cx.vertex_id((0, 1, 1)), cx.vertex_id((0, 3, 3))}
    for r in report.stabilizer_violated:
        assert report.green_degree[r] == 1 and report.yellow_degree[r] == 1


def test_outcome_rules_simple_cases():
    code, maps = setup("slab", 3)
    report = validate_outcome_rules(maps, np.zeros(maps.dims["C_M"], np.uint8), code)
    assert report.ok and not report.stabilizer_violated and not report.relation_violated
    e = code.complex.edge_id(2, (1, 1, 1))
    zeta = unit(maps.dims["C_M"], maps.meas_index("Ke", e))
    report = validate_outcome_rules(maps, zeta, code)
    assert len(report.relation_violated) == 2 and not report.stabilizer_violated


def test_lines_end_freely_on_their_boundaries():
    code, maps = setup("slab", 3)
    cx = code.complex
    v, w, u = (cx.vertex_id((1, 1, z)) for z in (0, 2, 3))
    # yellow from the trivial boundary up to w, green from w to the intertwined boundary
    zeta = np.zeros(maps.dims["C_M"], np.uint8)
    zeta[maps.meas_index("Av2dEff", v)] = 1
    zeta[maps.meas_index("Ke", cx.edge_id(2, (1, 1, 0)))] = 1
    zeta[maps.meas_index("Ke", cx.edge_id(2, (1, 1, 1)))] = 1
    zeta[maps.meas_index("Xe", cx.edge_id(2, (1, 1, 2)))] = 1
    zeta[maps.meas_index("Av2d", u)] = 1
    report = validate_outcome_rules(maps, zeta, code)
    assert report.ok and not report.relation_violated
    assert [maps.node_cells[r] for r in report.stabilizer_violated] == [w]


def test_overcomplete_examples():
    code, _ = setup("slab", 3, "Z", "overcomplete")
    n, m = code.n, len(code.checks)
    assert overcomplete_outcome(code).violated == ()
    be = next(i for i, l in enumerate(code.checks.labels) if l == "Be")
    res = overcomplete_outcome(code, mu6=unit(m, be))
    assert res.violated == (code.checks.sites[be],)
    lay = code.layout
    f = next(f for f in range(len(code.complex.faces)) if lay.face_hosted(f))
    res = overcomplete_outcome(code, eps=unit(n, lay.face_qubit[f]))
    assert res.violated == ()
    zf = lay.op(z=[lay.face_qubit[f]])
    for fam in ("Be", "Ke", "Xe"):
        rows = code.checks.family(fam)
        want = rows.commutation_matrix(type(rows).from_rows(n, [zf]))[:, 0]
        got = res.zeta[[i for i, l in enumerate(code.checks.labels) if l == fam]]
        assert np.array_equal(got, want)
    with pytest.raises(ValueError):
        overcomplete_outcome(setup("slab", 3)[0])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_overcomplete_single_flip_violates_one_relation(seed):
    code, _ = setup("slab", 3, "Z", "overcomplete")
    rng = np.random.default_rng(seed)
    i = int(rng.integers(len(code.checks)))
    eps = rng.integers(0, 2, code.n)
    base = overcomplete_outcome(code, eps=eps)
    flipped = overcomplete_outcome(code, eps=eps, mu6=unit(len(code.checks), i))
    assert base.violated == ()
    site, lab = code.checks.sites[i], code.checks.labels[i]
    if lab in ("Xe", "Be", "Ke") and all(code.checks.has(f, site) for f in ("Xe", "Be", "Ke")):
        assert flipped.violated == (site,)


def test_unexplainable_sigma_witness():
    code, maps = setup("slab", 3)
    cx = code.complex
    assert maps.metadata["unexplainable_sigma_possible"]
    zeta = np.zeros(maps.dims["C_M"], np.uint8)
    zeta[maps.meas_index("Av2dEff", cx.vertex_id((0, 0, 0)))] = 1
    zeta[maps.meas_index("Av2d", cx.vertex_id((0, 0, 3)))] = 1
    for z in range(3):
        zeta[maps.meas_index("Xe", cx.edge_id(2, (0, 0, z)))] = 1
    sigma, omega = syndromes(maps, zeta)
    assert not omega.any() and sigma.sum() == 1
    assert not gf2.in_row_space(maps.bS.T, sigma)
    assert not setup("torus3", 2)[1].metadata["unexplainable_sigma_possible"]


def test_dumps():
    _, maps = setup("slab", 2)
    zeta = MeasurementOutcome(unit(maps.dims["C_M"], 3), Sector.Z)
    assert zeta.dump(maps) == "ZETA Z 2 slab: 3\n"
    sigma, omega = syndromes(maps, zeta)
    assert dump_syndrome(maps, sigma, omega).startswith("SIGMA Z 2 slab: ")
    text = maps.dump_maps()
    assert text.splitlines()[0] == f"MAP dQ {maps.dims['C_Q']} {maps.dims['C_G']}"
