import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itc.cells import Geometry, build_complex
from itc.code import build_itc, ucx_pairs
from itc.pauli import (
    GeneratorSet,
    PauliOperator,
    center_basis,
    centralizer_intersection_rank,
    conjugate_by_cx,
    in_span,
    product,
    rank,
    symplectic_product,
)


def paulis(n):
    bits = st.lists(st.integers(0, 1), min_size=n, max_size=n)
    return st.tuples(bits, bits).map(lambda xz: PauliOperator(np.array(xz[0]), np.array(xz[1])))


@pytest.fixture(scope="module")
def torus2():
    return build_itc(build_complex(Geometry("torus3", 2)), "toric")


def test_single_qubit_products():
    x0 = PauliOperator.from_support(2, x=[0])
    assert symplectic_product(x0, PauliOperator.from_support(2, z=[0])) == 1
    assert symplectic_product(x0, PauliOperator.from_support(2, z=[1])) == 0
    with pytest.raises(ValueError):
        symplectic_product(x0, PauliOperator.identity(3))


def test_av_commutes_with_bf(torus2):
    av, bf = torus2.family("Av"), torus2.family("Bf")
    assert not av.commutation_matrix(bf).any()


@given(st.data())
def test_symplectic_bilinear(data):
    n = data.draw(st.integers(1, 12))
    p, q, r = (data.draw(paulis(n)) for _ in range(3))
    assert symplectic_product(p * q, r) == symplectic_product(p, r) ^ symplectic_product(q, r)


def test_rank_examples(torus2):
    assert rank(torus2.family("Be")) == 14
    t3 = build_itc(build_complex(Geometry("torus3", 3)), "toric")
    assert rank(t3.family("Av")) == 26
    assert rank(GeneratorSet.empty(5)) == 0


@settings(max_examples=40)
@given(st.data())
def test_rank_invariant_under_row_operations(data):
    n = data.draw(st.integers(1, 10))
    rows = data.draw(st.lists(paulis(n), min_size=1, max_size=8))
    gens = GeneratorSet.from_rows(n, rows)
    perm = data.draw(st.permutations(range(len(rows))))
    shuffled = GeneratorSet.from_rows(n, [rows[i] for i in perm])
    i = data.draw(st.integers(0, len(rows) - 1))
    j = data.draw(st.integers(0, len(rows) - 1))
    added = list(rows)
    if i != j:
        added[i] = rows[i] * rows[j]
    assert rank(gens) == rank(shuffled) == rank(GeneratorSet.from_rows(n, added))


def test_in_span_examples(torus2):
    ident = PauliOperator.identity(torus2.n)
    res = in_span(ident, torus2.checks)
    assert res.member and not res.certificate.any()
    kvc = build_itc(torus2.complex, "kvc")
    lay = kvc.layout
    for v in range(len(torus2.complex.vertices)):
        kes = GeneratorSet.from_rows(kvc.n, [lay.ke(e) for e in torus2.complex.vertex_edges[v]])
        res = in_span(lay.av(v), kes)
        assert res.member
        assert product(kes, res.certificate) == lay.av(v)
    ze = PauliOperator.from_support(torus2.n, z=[0])
    assert not in_span(ze, torus2.checks)


@settings(max_examples=25)
@given(st.data())
def test_in_span_certificate_reproduces(data):
    n = data.draw(st.integers(1, 8))
    rows = data.draw(st.lists(paulis(n), min_size=1, max_size=6))
    gens = GeneratorSet.from_rows(n, rows)
    coeffs = np.array(data.draw(st.lists(st.integers(0, 1), min_size=len(rows), max_size=len(rows))))
    target = product(gens, coeffs)
    res = in_span(target, gens)
    assert res.member
    assert product(gens, res.certificate) == target


def test_center_rank_examples(torus2):
    assert torus2.center_rank == rank(torus2.stabilizers)
    commuting = torus2.family("Av") + torus2.family("Ac")
    assert centralizer_intersection_rank(commuting) == rank(commuting)
    xz = GeneratorSet.from_rows(1, [PauliOperator.from_support(1, x=[0]), PauliOperator.from_support(1, z=[0])])
    assert centralizer_intersection_rank(xz) == 0
    basis = center_basis(torus2.checks)
    assert basis.shape[0] == torus2.center_rank


def test_cx_examples(torus2):
    x = PauliOperator.from_support(2, x=[0])
    assert conjugate_by_cx(x, [(0, 1)]) == PauliOperator.from_support(2, x=[0, 1])
    z = PauliOperator.from_support(2, z=[0])
    assert conjugate_by_cx(z, [(0, 1)]) == z
    with pytest.raises(IndexError):
        conjugate_by_cx(x, [(0, 2)])
    pairs = ucx_pairs(torus2)
    lay = torus2.layout
    for e in range(len(torus2.complex.edges)):
        xe = lay.op(x=[lay.edge_qubit[e]])
        assert conjugate_by_cx(xe, pairs) == xe * lay.be(e)


@settings(max_examples=30)
@given(st.data())
def test_cx_involution_and_symplectic(data):
    n = data.draw(st.integers(2, 8))
    pairs = data.draw(
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda t: t[0] != t[1]), max_size=10)
    )
    p, q = data.draw(paulis(n)), data.draw(paulis(n))
    # the reversed list undoes the circuit; a commuting pair list is its own inverse
    assert conjugate_by_cx(conjugate_by_cx(p, pairs), pairs[::-1]) == p
    assert symplectic_product(conjugate_by_cx(p, pairs), conjugate_by_cx(q, pairs)) == symplectic_product(p, q)


def test_cx_product_is_involution_for_disjoint_roles(torus2):
    pairs = ucx_pairs(torus2)
    rng = np.random.default_rng(0)
    p = PauliOperator(rng.integers(0, 2, torus2.n), rng.integers(0, 2, torus2.n))
    assert conjugate_by_cx(conjugate_by_cx(p, pairs), pairs) == p


def test_text_roundtrip(torus2):
    text = torus2.checks.to_text()
    assert text.splitlines()[0].startswith("Xe: X 0 | Z")
    back = GeneratorSet.from_text(torus2.n, text)
    assert np.array_equal(back.matrix, torus2.checks.matrix)
    assert back.labels == torus2.checks.labels
