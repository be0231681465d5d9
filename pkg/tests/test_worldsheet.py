import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import chi_after_sewing, genus
from sewing.acceptance import random_sewing_trial
from sewing.errors import DirectionMismatch, DuplicateBoundary, InvalidSignature, KindMismatch, UnknownBoundary
from sewing.generators import GENERATORS, generator_signature
from sewing.relations import torus_decompositions
from sewing.worldsheet import (
    EMPTY,
    IN,
    OUT,
    ClosedBoundary,
    Component,
    OpenBoundary,
    WorldSheetSignature,
    disc,
    same_homeo_class,
    sew,
    sew_with_map,
    signature_from_json,
    signature_to_json,
    tensor,
    validate_sewing,
)

G = generator_signature


def test_empty_sewing_is_valid():
    validate_sewing(tensor(G("mo"), G("do")), [])


def test_unit_into_second_product_input_is_valid():
    # no: out=1; mo: in0=2, in1=3, out=4
    validate_sewing(tensor(G("no"), G("mo")), [(1, 3)])


def test_boundary_in_two_pairs():
    x = tensor(G("do"), G("mo"), G("mo"))
    # do out0 has ord 3; mo's inputs are 4 and 7
    with pytest.raises(DuplicateBoundary):
        validate_sewing(x, [(3, 4), (3, 7)])


def test_sewing_errors():
    x = tensor(G("no"), G("mo"), G("i"))
    with pytest.raises(DirectionMismatch):
        validate_sewing(x, [(2, 1)])
    with pytest.raises(UnknownBoundary):
        validate_sewing(x, [(1, 99)])
    closed_in = x.closed_boundaries[0].ord_plus
    with pytest.raises(KindMismatch):
        validate_sewing(x, [(1, closed_in)])


def test_tensor_with_empty():
    x = G("mo")
    assert tensor(EMPTY, x) == x
    assert tensor(x, EMPTY) == x


def test_tensor_unit_and_product():
    x = tensor(G("no"), G("mo"))
    assert x.n_components == 2 and x.chi == 2
    words = sorted(tuple(b.direction for b in w) for w in x.circles)
    assert words == sorted([(OUT,), (IN, IN, OUT)])


def test_tensor_two_closed_cylinders():
    x = tensor(G("pc"), G("pc"))
    assert x.n_components == 2 and len(x.closed_boundaries) == 4 and x.chi == 0


def test_unit_on_product_gives_cylinder():
    assert sew(tensor(G("no"), G("mo")), [(1, 3)]) == G("po")


def test_closed_unit_and_counit_give_sphere():
    x = sew(tensor(G("nc"), G("ec")), [(1, 3)])
    assert x.chi == 2 and x.boundaries() == () and x.genera() == (0,)


def test_empty_sewing_is_identity():
    x = tensor(G("mc"), G("istar"))
    y, m = sew_with_map(x, [])
    assert y == x and all(k == v for k, v in m.items())


def test_generator_signatures():
    po = G("po")
    assert po.chi == 1 and [[b.direction for b in w] for w in po.circles] == [[IN, OUT]]
    mc = G("mc")
    assert mc.chi == -1 and mc.circles == () and len(mc.closed_boundaries) == 3
    i = G("i")
    assert i.chi == 0 and [[b.direction for b in w] for w in i.circles] == [[OUT]]
    assert [b.direction for b in i.closed_boundaries] == [IN]


def test_homeo_class():
    assert same_homeo_class(G("po"), sew(tensor(G("no"), G("mo")), [(1, 3)]))
    assert not same_homeo_class(G("mo"), G("do"))
    # the two torus decompositions present the same sheet
    d0, d1 = torus_decompositions()
    assert same_homeo_class(d0.target, d1.target)
    assert d0.target.genera() == (1,)


def test_invalid_signatures():
    with pytest.raises(InvalidSignature):
        disc(OpenBoundary(IN, 1), OpenBoundary(OUT, 3))
    with pytest.raises(InvalidSignature):
        # disc with three closed boundaries has no genus
        WorldSheetSignature([Component(1, (), (ClosedBoundary(IN, 1, 2), ClosedBoundary(IN, 3, 4)))])
    with pytest.raises(InvalidSignature):
        disc(OpenBoundary("sideways", 1))


gen_names = st.sampled_from(GENERATORS)


@given(st.lists(gen_names, min_size=1, max_size=4))
def test_tensor_chi_is_additive(names):
    x = tensor(*(G(a) for a in names))
    assert x.chi == sum(G(a).chi for a in names)
    assert x.n_components == len(names)


@given(gen_names, gen_names, gen_names)
def test_tensor_is_associative(a, b, c):
    assert tensor(tensor(G(a), G(b)), G(c)) == tensor(G(a), tensor(G(b), G(c)))


@given(st.lists(gen_names, min_size=1, max_size=4))
def test_signature_json_round_trip(names):
    x = tensor(*(G(a) for a in names))
    assert signature_from_json(signature_to_json(x)) == x


@given(st.integers(0, 2**32 - 1))
def test_random_sewing_chi_and_genus(seed):
    ok, msg = random_sewing_trial(np.random.default_rng(seed))
    assert ok, msg


def test_random_sewings_against_cell_count():
    """Euler characteristic and genus from the cell-count oracle."""
    rng = np.random.default_rng(11)
    for _ in range(500):
        names = [GENERATORS[k] for k in rng.integers(0, len(GENERATORS), size=3)]
        x = tensor(*(G(a) for a in names))
        outs = [b for b in x.boundaries() if b.direction == OUT]
        ins = [b for b in x.boundaries() if b.direction == IN]
        pairs, n_open = [], 0
        for o in outs:
            match = [b for b in ins if b.kind == o.kind and b.key not in {p[1] for p in pairs}]
            if match:
                pairs.append((o.key, match[0].key))
                n_open += o.kind == "open"
        y = sew(x, pairs)
        assert y.chi == chi_after_sewing(x.chi, n_open)
        for c in y.components:
            assert genus(c.chi, c.n_boundary_circles) == c.genus >= 0
