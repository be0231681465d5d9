import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import coords, matrix_basis, sandwich_sum
from sewing.acceptance import perturb
from sewing.evaluator import SewingSolution
from sewing.generators import GENERATORS, hom_shape_dims
from sewing.library import library_solutions
from sewing.relations import RELATION_IDS, check_all, check_relation, relation_sides
from sewing.scalar import ClosedOnly, Full, scalar_residuals
from sewing.tensor import LabelSpaces

complexes = st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False, allow_infinity=False)


def random_solution(rng, L=LabelSpaces(2, 2, 1)):
    dims = L.as_dict()
    f = {}
    for g in GENERATORS:
        shape = hom_shape_dims(g, dims)
        f[g] = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return SewingSolution(L, f)


def test_unit_law_in_the_full_family():
    sol = SewingSolution.from_scalars(Full(2, 3, 5).assignment())
    assert check_relation(sol, 1) == 0.0


def test_unit_law_with_vanishing_cylinder():
    c = {g: 1.0 for g in GENERATORS}
    c["po"] = 0.0
    assert check_relation(SewingSolution.from_scalars(c), 1) == 1.0


def test_full_family_point_passes_everything():
    assert check_all(SewingSolution.from_scalars(Full(1, 1, 1).assignment())).passed


def test_zero_solution_passes_everything():
    assert check_all(SewingSolution.zeros(LabelSpaces(3, 2, 2))).passed


def test_random_tensors_fail_and_name_a_relation():
    rep = check_all(random_solution(np.random.default_rng(0)))
    assert not rep.passed and rep.first_failure in RELATION_IDS
    assert rep.failing[0] == rep.first_failure


def test_library_passes_everything(solutions):
    for name, sol in solutions:
        rep = check_all(sol)
        assert rep.passed, (name, rep.failing)


def test_cardy_relation_against_sandwich_oracle(solutions):
    """Closed-to-open after open-to-closed on M_n is x -> sum_ij E_ji x E_ij."""
    for n, name in ((2, "matrix2"), (3, "matrix3")):
        sol = dict(solutions)[name]
        lhs = sol.f["i"].reshape(n * n, -1) @ sol.f["istar"].reshape(-1, n * n)
        basis = matrix_basis(n)
        want = np.stack([coords(sandwich_sum(n, b), basis) for b in basis], axis=1)
        assert np.allclose(lhs, want, atol=1e-12)
        assert check_relation(sol, 31) <= 1e-9


@given(st.fixed_dictionaries({g: complexes for g in GENERATORS}))
def test_tensor_relations_reduce_to_scalar_monomials(c):
    """On one-dimensional label spaces every tensor relation is the scalar
    monomial identity, with the same residual."""
    sol = SewingSolution.from_scalars(c)
    mono = scalar_residuals(c)
    for n in RELATION_IDS:
        assert check_relation(sol, n) == pytest.approx(mono[n], abs=1e-12)


@given(complexes, complexes)
def test_closed_only_family_passes(a, b):
    assert check_all(SewingSolution.from_scalars(ClosedOnly(a, b).assignment()), 1e-9).passed


@given(st.integers(0, 2**32 - 1))
def test_single_perturbation_is_detected(seed):
    rng = np.random.default_rng(seed)
    sols = library_solutions()
    _, sol = sols[int(rng.integers(len(sols)))]
    _, bad = perturb(sol, rng)
    assert max(check_all(bad).residuals.values()) > 1e-4


def test_relation_sides_have_equal_shapes(solutions):
    sol = dict(solutions)["groupZ2-embedded"]
    for n in RELATION_IDS:
        lhs, rhs = relation_sides(sol, n)
        assert lhs.shape == rhs.shape
    with pytest.raises(KeyError):
        relation_sides(sol, 33)


def test_report_json(solutions):
    doc = check_all(dict(solutions)["unit"]).to_json()
    assert [d["relation"] for d in doc] == list(RELATION_IDS)
    assert all(d["pass"] for d in doc)
