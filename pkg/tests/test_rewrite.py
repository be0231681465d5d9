import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sewing.corpus import build_corpus, dec, o4_decompositions
from sewing.errors import NoMatch, NotACylinder, TargetMismatch
from sewing.evaluator import SewingSolution, evaluate, single
from sewing.generators import GENERATORS, hom_shape_dims
from sewing.library import library_solutions
from sewing.relations import check_relation
from sewing.rewrite import (
    LR,
    RL,
    DerivationCertificate,
    Term,
    apply_rule,
    eliminate_cylinder,
    matches,
    permute_factors,
    prove_equal,
    replay,
    replay_terms,
    rules,
    verify_certificate,
)
from sewing.tensor import LabelSpaces, relative_residual

CORPUS = build_corpus()


def random_solution(seed, L=LabelSpaces(2, 2, 1)):
    rng = np.random.default_rng(seed)
    dims = L.as_dict()
    return SewingSolution(L, {g: rng.normal(size=hom_shape_dims(g, dims))
                              + 1j * rng.normal(size=hom_shape_dims(g, dims)) for g in GENERATORS})


def test_unit_rule_collapses_to_cylinder():
    lhs, rhs = rules()["R1"].decompositions()
    out = apply_rule(lhs, "R1", (0, 1))
    assert out.factors == ("po",) and out == rhs


def test_cylinder_absorbed_by_product():
    d = dec(["mo", "po"], [(0, "o0", 1, "i0")])
    assert apply_rule(d, "R10", (0, 1)) == single("mo")


def test_rule_at_wrong_position():
    d = dec(["mo", "po"], [(0, "o0", 1, "i0")])
    with pytest.raises(NoMatch):
        apply_rule(d, "R10", (1, 0))
    with pytest.raises(NoMatch):
        apply_rule(d, "R1", (0, 1))


def test_permute_and_back():
    d, _ = o4_decompositions()
    assert permute_factors(permute_factors(d, [1, 0]), [1, 0]) == d


def test_eliminate_open_cylinder():
    d = dec(["po", "mo"], [(0, "o0", 1, "i0")])
    assert eliminate_cylinder(d, 0) == single("mo")


def test_eliminate_closed_cylinder():
    d = dec(["pc", "i"], [(0, "o0", 1, "i0")])
    assert eliminate_cylinder(d, 0) == single("i")


def test_eliminate_requires_sewn_cylinder():
    with pytest.raises(NotACylinder):
        eliminate_cylinder(single("po"), 0)
    with pytest.raises(NotACylinder):
        eliminate_cylinder(dec(["po", "mo"], [(0, "o0", 1, "i0")]), 1)


def test_equal_terms_need_no_steps():
    d, _ = o4_decompositions()
    cert = prove_equal(d, d)
    assert cert.length == 0 and replay(d, cert) == d


def test_o4_certificate():
    d1, d2 = o4_decompositions()
    cert = prove_equal(d1, d2)
    assert cert and cert.length <= 14
    assert verify_certificate(d1, d2, cert)
    for _, sol in library_solutions():
        ref = evaluate(sol, d1)
        for t in replay_terms(d1, cert):
            assert relative_residual(evaluate(sol, t), ref) <= 1e-9


def test_certificate_json_round_trip():
    d1, d2 = o4_decompositions()
    cert = prove_equal(d1, d2)
    back = DerivationCertificate.from_json(cert.to_json())
    assert back == cert and verify_certificate(d1, d2, back)


def test_budget_exhaustion_is_a_failure_value():
    d1, d2 = o4_decompositions()
    res = prove_equal(d1, d2, budget=1)
    assert not res and res.reason


def test_prove_rejects_different_sheets():
    d1, _ = o4_decompositions()
    with pytest.raises(TargetMismatch):
        prove_equal(d1, single("mo"))


@pytest.mark.parametrize("rule_id", sorted(rules(), key=lambda k: int(k[1:])))
def test_rule_sides_are_the_relation(rule_id):
    """Each rule's two sides evaluate to the two sides of its relation: the
    residual on random tensors equals the relation's residual."""
    rule = rules()[rule_id]
    lhs, rhs = rule.decompositions()
    for seed in range(3):
        sol = random_solution(seed)
        got = relative_residual(evaluate(sol, lhs), evaluate(sol, rhs))
        assert got == pytest.approx(check_relation(sol, rule.relation), rel=1e-9, abs=1e-13)


@pytest.mark.parametrize("sheet", [s for s in CORPUS if s.name not in ("mixed-sphere",)], ids=lambda s: s.name)
def test_corpus_certificates_replay(sheet):
    start = sheet.decompositions[0]
    for d in sheet.decompositions[1:]:
        cert = prove_equal(start, d, budget=20_000)
        assert cert, (sheet.name, cert)
        assert verify_certificate(start, d, cert)


def _random_walk(d, rng, steps):
    seen = [d]
    for _ in range(steps):
        term = Term.from_decomposition(d)
        options = []
        for rule in rules().values():
            if rule.id == "R25":
                continue
            for direction, frag in ((LR, rule.lhs), (RL, rule.rhs)):
                options += [(rule, direction, pos) for pos in matches(term, frag)]
        if not options:
            break
        rule, direction, pos = options[int(rng.integers(len(options)))]
        src, dst = (rule.lhs, rule.rhs) if direction == LR else (rule.rhs, rule.lhs)
        if len(d.factors) - len(src.factors) + len(dst.factors) > 7:
            continue
        d = apply_rule(d, rule, pos, direction)
        seen.append(d)
    return seen


@settings(max_examples=25)
@given(st.sampled_from([s.name for s in CORPUS]), st.integers(0, 2**32 - 1))
def test_random_rewrites_preserve_evaluation(name, seed):
    """Rewriting with any relation never changes the value on a solution."""
    rng = np.random.default_rng(seed)
    start = next(s for s in CORPUS if s.name == name).decompositions[0]
    sol = dict(library_solutions())["groupZ2-embedded"]
    ref = evaluate(sol, start)
    walk = _random_walk(start, rng, 5)
    assert len(walk) > 1
    for t in walk:
        assert relative_residual(evaluate(sol, t), ref) <= 1e-9


def test_mixed_sphere_chain_through_the_open_coproduct():
    d1, _, d3 = next(s for s in CORPUS if s.name == "mixed-sphere").decompositions
    cert = prove_equal(d1, d3)
    assert cert and verify_certificate(d1, d3, cert)
