import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import (
    coords,
    cyclic_product_tensor,
    dual_basis_sum,
    is_associative,
    matrix_basis,
    matrix_product_tensor,
    matrix_unit_vector,
    sandwich_sum,
    trace_counit,
)
from sewing.cardy import (
    CardyAlgebra,
    FrobeniusAlgebra,
    Retract,
    build_solution,
    check_cardy,
    check_commutative,
    check_frobenius,
    check_symmetric,
    dual_morphism,
    extract_cardy,
    extract_with_retracts,
    identity_retract,
    iso_residuals,
    round_trip_iso,
    split_idempotent,
)
from sewing.errors import CardyFail, NondegeneracyFailure, NotCommutative, NotIdempotent, RelationsFail
from sewing.evaluator import SewingSolution
from sewing.generators import GENERATORS
from sewing.library import (
    cyclic_group_algebra,
    group_cardy,
    idempotent_algebra,
    matrix_algebra,
    matrix_cardy,
    scalar_algebra,
    unit_cardy,
)
from sewing.relations import check_all
from sewing.scalar import ClosedOnly, Full
from sewing.tensor import LabelSpaces, relative_residual


def oracle_matrix_algebra(n):
    return FrobeniusAlgebra.from_algebra(matrix_product_tensor(n), matrix_unit_vector(n), trace_counit(n))


# -- Frobenius algebras -------------------------------------------------------------
@pytest.mark.parametrize("n", [1, 2, 3])
def test_matrix_algebra_matches_oracle(n):
    A = matrix_algebra(n)
    assert np.allclose(A.m, matrix_product_tensor(n))
    assert np.allclose(A.eps, trace_counit(n))
    assert is_associative(A.m)


@pytest.mark.parametrize("n", [2, 3])
def test_matrix_algebra_is_symmetric_frobenius_not_commutative(n):
    A = oracle_matrix_algebra(n)
    assert check_frobenius(A).passed
    assert check_symmetric(A).passed
    assert not check_commutative(A).passed


def test_group_algebra_is_commutative_frobenius():
    A = FrobeniusAlgebra.from_algebra(cyclic_product_tensor(2), np.eye(2)[0], np.eye(2)[0])
    assert check_frobenius(A).passed and check_symmetric(A).passed and check_commutative(A).passed
    assert np.allclose(A.m, cyclic_group_algebra(2).m)


def test_zero_counit_is_degenerate():
    m = matrix_product_tensor(2)
    with pytest.raises(NondegeneracyFailure):
        FrobeniusAlgebra.from_algebra(m, matrix_unit_vector(2), np.zeros(4))
    with pytest.raises(NondegeneracyFailure):
        check_frobenius(FrobeniusAlgebra(m, matrix_unit_vector(2), np.zeros((4, 4, 4)), np.zeros(4)))


def test_frobenius_json_round_trip():
    A = matrix_algebra(2)
    B = FrobeniusAlgebra.from_json(A.to_json())
    assert all(np.array_equal(getattr(A, k), getattr(B, k)) for k in ("m", "eta", "delta", "eps"))


# -- dual morphisms -----------------------------------------------------------------
def test_dual_of_identity():
    A = matrix_algebra(2)
    assert np.allclose(dual_morphism(np.eye(4), A, A), np.eye(4))


def test_dual_of_scalar_multiplication():
    lam, c = 2.5, 3.0 - 1j
    A = scalar_algebra(lam)
    assert dual_morphism(np.array([[c]]), A, A)[0, 0] == pytest.approx(c)


ALGEBRAS = [matrix_algebra(2), cyclic_group_algebra(3, 0.5), idempotent_algebra([1.0, 2.0, -1.0, 0.5])]


@given(st.integers(0, 2**32 - 1))
def test_dual_reverses_composition(seed):
    rng = np.random.default_rng(seed)
    A, B = ALGEBRAS[0], ALGEBRAS[2]
    C = ALGEBRAS[1]
    f = rng.normal(size=(C.dim, B.dim)) + 1j * rng.normal(size=(C.dim, B.dim))
    g = rng.normal(size=(B.dim, A.dim))
    lhs = dual_morphism(f @ g, A, C)
    rhs = dual_morphism(g, A, B) @ dual_morphism(f, B, C)
    assert relative_residual(lhs, rhs) < 1e-12


# -- Cardy algebras -----------------------------------------------------------------
def test_unit_cardy_algebra():
    assert check_cardy(unit_cardy(1.0)).passed
    assert check_cardy(unit_cardy(1.5)).passed


@pytest.mark.parametrize("n", [2, 3])
def test_matrix_cardy_against_sandwich_oracle(n):
    C = CardyAlgebra(oracle_matrix_algebra(n), scalar_algebra(1.0), matrix_unit_vector(n).reshape(-1, 1))
    rep = check_cardy(C)
    assert rep.passed, rep.failing
    basis = matrix_basis(n)
    want = np.stack([coords(sandwich_sum(n, b), basis) for b in basis], axis=1)
    assert np.allclose(C.iota @ C.iota_star, want)
    # the same map from the generic dual-basis oracle
    assert np.allclose(dual_basis_sum(C.A_op.m, C.A_op.eps), want)


def test_doubled_closed_counit_breaks_cardy():
    C = CardyAlgebra(matrix_algebra(2), scalar_algebra(2.0), np.eye(2).reshape(-1, 1))
    rep = check_cardy(C)
    assert rep.failing == ["cardy"]
    assert rep.residuals["cardy"] == pytest.approx(0.5)
    with pytest.raises(CardyFail):
        build_solution(C, identity_retract(4), identity_retract(1), LabelSpaces(4, 1, 1))


def test_non_commutative_closed_algebra_rejected():
    A = matrix_algebra(2)
    with pytest.raises(NotCommutative):
        check_cardy(CardyAlgebra(A, A, np.eye(4)))


def test_group_cardy():
    rep = check_cardy(group_cardy())
    assert rep.passed, rep.failing


def test_cardy_json_round_trip():
    C = group_cardy()
    D = CardyAlgebra.from_json(C.to_json())
    assert np.array_equal(C.iota, D.iota) and np.array_equal(C.iota_star, D.iota_star)


# -- idempotent splitting -------------------------------------------------------------
def test_split_identity():
    R = split_idempotent(np.eye(3))
    assert np.allclose(R.e, np.eye(3)) and np.allclose(R.r, np.eye(3))


def test_split_coordinate_projection():
    R = split_idempotent(np.diag([1.0, 0.0]))
    assert np.allclose(R.e, [[1.0], [0.0]]) and np.allclose(R.r, [[1.0, 0.0]])


def test_split_averaging_projection():
    p = 0.5 * np.ones((2, 2))
    R = split_idempotent(p)
    assert R.dim == 1
    assert np.max(np.abs(R.e @ R.r - p)) < 1e-12


def test_split_rejects_non_idempotent():
    with pytest.raises(NotIdempotent):
        split_idempotent(np.diag([2.0, 0.0]))


def test_split_zero():
    R = split_idempotent(np.zeros((3, 3)))
    assert R.dim == 0 and R.ambient == 3


@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(0, 5))
def test_split_random_projections(seed, n, k):
    k = min(k, n)
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    y = rng.normal(size=(k, n))
    p = x @ np.linalg.solve(y @ x, y) if k else np.zeros((n, n))
    R = split_idempotent(p)
    assert R.dim == k
    assert np.linalg.norm(R.e @ R.r - p) < 1e-9 * max(1, np.linalg.norm(p))
    assert np.linalg.norm(R.r @ R.e - np.eye(k)) < 1e-9


def test_retract_validation():
    with pytest.raises(NotIdempotent):
        Retract(np.eye(2), 2 * np.eye(2))


# -- build / extract ----------------------------------------------------------------
def test_matrix_round_trip_is_isomorphic():
    C = matrix_cardy(2)
    sol = build_solution(C, identity_retract(4), identity_retract(1), LabelSpaces(4, 1, 1))
    D, Rop, Rcl = extract_cardy(sol)
    iso = round_trip_iso(sol, first=(identity_retract(4), identity_retract(1)), second=(Rop, Rcl))
    assert iso.passed, iso.residuals
    assert check_cardy(D).passed


def test_embedding_into_larger_space():
    """M_2 inside a 5-dimensional open label space via the obvious retract."""
    C = matrix_cardy(2)
    inc = np.vstack([np.eye(4), np.zeros((1, 4))])
    sol = build_solution(C, Retract(inc, inc.T), identity_retract(1), LabelSpaces(5, 1, 1))
    assert check_all(sol).passed
    D, Rop, Rcl = extract_cardy(sol)
    assert Rop.dim == 4
    small = build_solution(C, identity_retract(4), identity_retract(1), LabelSpaces(4, 1, 1))
    big = check_all(sol).residuals
    for n, r in check_all(small).residuals.items():
        assert big[n] == pytest.approx(r, abs=1e-14)


def test_scalar_family_extracts_to_one_dimensional_cardy():
    a, b, g = 2.0, 3.0, 5.0
    c = Full(a, b, g).assignment()
    C, _, _ = extract_cardy(SewingSolution.from_scalars(c))
    assert (C.A_op.dim, C.A_cl.dim) == (1, 1)
    assert C.A_op.m[0, 0, 0] == pytest.approx(c["mo"]) and C.A_cl.eps[0] == pytest.approx(c["ec"])
    assert C.iota[0, 0] == pytest.approx(c["i"])


def test_vanishing_open_cylinder_gives_empty_open_algebra():
    C, Rop, _ = extract_cardy(SewingSolution.from_scalars(ClosedOnly(2, 3).assignment()))
    assert C.A_op.dim == 0 and Rop.dim == 0 and C.A_cl.dim == 1


def test_extract_rejects_non_solutions():
    sol = SewingSolution.from_scalars({g: 2.0 for g in GENERATORS})
    with pytest.raises(RelationsFail):
        extract_cardy(sol)


def test_same_retract_twice_gives_identity(library):
    entry = next(e for e in library if e.name == "groupZ2-embedded")
    sol = entry.solution()
    pair = (entry.retract_op, entry.retract_cl)
    iso = round_trip_iso(sol, first=pair, second=pair)
    assert np.allclose(iso.phi_op, np.eye(2)) and np.allclose(iso.phi_cl, np.eye(2))


def test_rotated_basis_gives_an_intertwiner():
    p = np.diag([1.0, 1.0, 0.0])
    C = group_cardy()
    sol = build_solution(C, Retract(np.eye(3)[:, :2], np.eye(3)[:2]), identity_retract(2), LabelSpaces(3, 2, 1))
    th = 0.3
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    e2 = np.eye(3)[:, :2] @ rot
    second = (Retract(e2, e2.T), identity_retract(2))
    iso = round_trip_iso(sol, first=(Retract(np.eye(3)[:, :2], np.eye(3)[:2]), identity_retract(2)),
                         second=second)
    assert iso.passed
    assert np.allclose(iso.phi_op, rot.T)
    assert np.allclose(second[0].e @ second[0].r, p)


def test_permuted_matrix_basis():
    C = matrix_cardy(2)
    perm = np.eye(4)[[2, 0, 3, 1]]
    D = C.transport((perm.T, perm), (np.eye(1), np.eye(1)))
    res = iso_residuals(C, D, perm, np.eye(1), perm.T, np.eye(1))
    assert max(res.values()) < 1e-10
    assert check_cardy(D).passed


def test_extraction_along_library_retracts_recovers_input(library):
    for entry in library:
        C = extract_with_retracts(entry.solution(), entry.retract_op, entry.retract_cl)
        n, k = C.A_op.dim, C.A_cl.dim
        res = iso_residuals(entry.cardy, C, np.eye(n), np.eye(k), np.eye(n), np.eye(k))
        assert max(res.values()) < 1e-12, entry.name
