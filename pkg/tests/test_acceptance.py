"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line
(collected into the terminal summary) and then asserts."""
import numpy as np

from sewing import acceptance
from sewing.cardy import build_solution, extract_cardy
from sewing.corpus import build_corpus, o4_decompositions
from sewing.evaluator import SewingSolution
from sewing.generators import GENERATORS
from sewing.library import load_library
from sewing.relations import check_all
from sewing.rewrite import prove_equal, verify_certificate
from sewing.scalar import grid_solutions, random_family_members

LINES: list[str] = []


def _report(res):
    line = res.line()
    LINES.append(line)
    print(line)
    return res


def test_criterion_1_scalar_classification():
    res = _report(acceptance.scalar_classification(seed=0, draws=1000))
    # spot-check family members through the tensor relations
    for member in random_family_members(np.random.default_rng(1), 50):
        assert check_all(SewingSolution.from_scalars(member.assignment()), 1e-12).passed
    for row in grid_solutions():
        assert check_all(SewingSolution.from_scalars(dict(zip(GENERATORS, row))), 0.0).passed
    assert res.passed, res.detail
    assert res.seconds < 5.0


def test_criterion_2_relation_suite():
    names = {e.name for e in load_library()}
    assert {"unit", "matrix2", "matrix3", "groupZ2", "matrix2plusC"} <= names
    res = _report(acceptance.relation_suite(1e-9))
    assert res.passed, res.detail
    assert res.seconds < 10.0


def test_criterion_3_round_trip():
    res = _report(acceptance.round_trip(1e-9))
    for entry in load_library():
        sol = entry.solution()
        C, Rop, Rcl = extract_cardy(sol)
        again = build_solution(C, Rop, Rcl, entry.labels)
        for g in GENERATORS:
            assert np.allclose(again.f[g], sol.f[g], rtol=0, atol=1e-12 * max(1, np.abs(sol.f[g]).max()))
    assert res.passed, res.detail


def test_criterion_4_decomposition_independence():
    corpus = build_corpus()
    assert len(corpus) >= 10
    assert {"o4", "oco-io", "oco-oi", "torus-2", "mixed-sphere"} <= {s.name for s in corpus}
    res = _report(acceptance.decomposition_independence(1e-9))
    assert res.passed, res.detail


def test_criterion_5_rewrite_soundness():
    d1, d2 = o4_decompositions()
    cert = prove_equal(d1, d2)
    assert cert and cert.length <= 14 and verify_certificate(d1, d2, cert)
    res = _report(acceptance.rewrite_soundness(1e-9))
    assert res.passed, res.detail


def test_criterion_6_surgery():
    assert len(acceptance.audited_pairings()) >= 12
    res = _report(acceptance.surgery(seed=0, trials=10_000))
    assert res.passed, res.detail


def test_criterion_7_failure_sensitivity():
    res = _report(acceptance.failure_sensitivity(seed=0, trials=100))
    assert res.passed, res.detail
