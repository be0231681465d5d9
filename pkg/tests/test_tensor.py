import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import matrix_product_tensor, matrix_unit_vector
from sewing.errors import BadPermutation, DualityMismatch, ShapeMismatch
from sewing.generators import GENERATORS, generator_hom_shape, hom_shape_dims, port_index, ports
from sewing.tensor import (
    AxisLabel,
    LabelSpaces,
    Tensor,
    bl_labels,
    contract,
    contract_network,
    permute,
    psi,
    psi_inverse,
    relative_residual,
)


# -- generator data -------------------------------------------------------------
def test_hom_shapes():
    assert generator_hom_shape("eo").domain_spaces == ("Bop",)
    assert generator_hom_shape("eo").codomain_spaces == ()
    assert generator_hom_shape("i").domain_spaces == ("Bl", "Br")
    assert generator_hom_shape("i").codomain_spaces == ("Bop",)
    assert generator_hom_shape("pc").domain_spaces == ("Bl", "Br")
    assert generator_hom_shape("pc").codomain_spaces == ("Bl", "Br")
    assert generator_hom_shape("istar").codomain_spaces == ("Bl", "Br")


def test_ports_read_domain_forward_and_codomain_backward():
    assert [(p.side, p.index) for p in ports("do")] == [("in", 0), ("out", 1), ("out", 0)]
    assert [(p.side, p.index) for p in ports("mo")] == [("in", 0), ("in", 1), ("out", 0)]
    assert port_index("i", "i", 0) == 1 and port_index("i", "o", 0) == 0


# -- contraction and permutation ---------------------------------------------------
def test_trace_of_identity():
    t = Tensor(np.eye(2), (AxisLabel("Bop"), AxisLabel("Bop", True)))
    assert contract(t, [(0, 1)]).data == pytest.approx(2.0)


def test_evaluation_pairing():
    rng = np.random.default_rng(0)
    v, w = rng.normal(size=3), rng.normal(size=3)
    t = Tensor(np.multiply.outer(v, w), (AxisLabel("Bop"), AxisLabel("Bop", True)))
    assert contract(t, [(0, 1)]).data == pytest.approx(w @ v)


def test_unit_law_by_contraction():
    m = matrix_product_tensor(2)
    one = matrix_unit_vector(2)
    t = Tensor(np.multiply.outer(m, one),
               (AxisLabel("Bop"), AxisLabel("Bop", True), AxisLabel("Bop", True), AxisLabel("Bop")))
    out = contract(t, [(1, 3)])
    assert np.allclose(out.data, np.eye(4))


def test_contract_rejects_bad_pairs():
    t = Tensor(np.zeros((2, 3)), (AxisLabel("Bop"), AxisLabel("Bop", True)))
    with pytest.raises(ShapeMismatch):
        contract(t, [(0, 1)])
    u = Tensor(np.zeros((2, 2)), (AxisLabel("Bop"), AxisLabel("Bop")))
    with pytest.raises(DualityMismatch):
        contract(u, [(0, 1)])


def test_permute():
    t = Tensor(np.arange(24.0).reshape(2, 3, 4))
    assert np.array_equal(permute(t, [0, 1, 2]).data, t.data)
    s = [2, 0, 1]
    back = np.argsort(s)
    assert np.array_equal(permute(permute(t, s), back).data, t.data)
    with pytest.raises(BadPermutation):
        permute(t, [0, 0, 1])


def test_closed_block_swap_is_the_braiding(solutions):
    """Swapping the two (l, r) input blocks of the closed product leaves it
    unchanged for a commutative closed algebra: the swap is the braiding."""
    sol = dict(solutions)["groupZ2-embedded"]
    mc = Tensor(sol.f["mc"])  # axes (l, r | l1, r1, l2, r2)
    assert relative_residual(permute(mc, [0, 1, 4, 5, 2, 3]), mc) < 1e-12
    dc = permute(Tensor(sol.f["dc"]), [2, 3, 0, 1, 4, 5])
    assert relative_residual(dc, sol.f["dc"]) < 1e-12


# -- psi ------------------------------------------------------------------------------
L = LabelSpaces(2, 3, 2)


def test_psi_of_identity_cylinder():
    v = psi("po", np.eye(2), L)
    assert np.array_equal(v.data, np.eye(2))
    assert [(a.space, a.dual) for a in v.labels] == [("Bop", True), ("Bop", False)]


def test_psi_of_closed_unit_keeps_entries():
    rng = np.random.default_rng(1)
    f = rng.normal(size=(3, 2))
    v = psi("nc", f, L)
    assert np.array_equal(v.data, f)
    assert [(a.space, a.dual) for a in v.labels] == [("Bl", False), ("Br", False)]


def test_bl_space_of_closed_cylinder():
    assert [(a.space, a.dual) for a in bl_labels("pc")] == [
        ("Bl", True), ("Br", True), ("Bl", False), ("Br", False)]


@given(st.sampled_from(GENERATORS), st.integers(0, 2**32 - 1))
def test_psi_round_trip(alpha, seed):
    rng = np.random.default_rng(seed)
    shape = hom_shape_dims(alpha, L.as_dict())
    f = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    back = psi_inverse(alpha, psi(alpha, f, L), L)
    assert np.array_equal(back.data, f)


def test_psi_rejects_wrong_shape():
    with pytest.raises(ShapeMismatch):
        psi("mo", np.zeros((2, 2)), L)


@given(st.integers(0, 2**32 - 1))
def test_network_matches_single_einsum(seed):
    rng = np.random.default_rng(seed)
    a, b, c = rng.normal(size=(3, 4)), rng.normal(size=(4, 5)), rng.normal(size=(5, 3, 2))
    got = contract_network([a, b, c], [[0, 1], [1, 2], [2, 0, 3]], [3])
    assert relative_residual(got, np.einsum("ij,jk,kil->l", a, b, c)) < 1e-12


def test_network_self_trace():
    a = np.arange(9.0).reshape(3, 3)
    assert contract_network([a], [[0, 0]], []) == pytest.approx(np.trace(a))


def test_tensor_json_round_trip():
    rng = np.random.default_rng(2)
    t = Tensor(rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3)),
               (AxisLabel("Bop"), AxisLabel("Bl", True)))
    u = Tensor.from_json(t.to_json())
    assert np.array_equal(u.data, t.data) and u.labels == t.labels


def test_relative_residual():
    assert relative_residual(np.zeros(3), np.zeros(3)) == 0.0
    assert relative_residual(np.ones(2), np.zeros(2)) == 1.0
