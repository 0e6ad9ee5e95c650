import pytest

from mddconfig.bdd import Bdd, build_bdd, decoded_solutions, make_encoding
from mddconfig.errors import LimitExceeded
from mddconfig.model import brute_force_solutions
from mddconfig.synth import random_model


def test_mk_is_hash_consed():
    b = Bdd()
    u = b.mk(0, 0, 1)
    v = b.mk(0, 0, 1)
    assert u == v
    assert b.mk(0, 1, 1) == 1  # redundant test collapses


def test_terminals_and_literals():
    b = Bdd()
    x = b.literal(3, True)
    assert b.var(x) == 3 and b.low(x) == 0 and b.high(x) == 1
    nx = b.literal(3, False)
    assert b.negate(x) == nx


def test_apply_truth_tables():
    b = Bdd()
    x, y = b.literal(0, True), b.literal(1, True)
    f = b.apply_and(x, y)
    g = b.apply_or(x, y)
    assert b.satcount(f, 2) == 1
    assert b.satcount(g, 2) == 3
    assert b.apply_and(f, g) == f
    assert b.apply_or(f, 0) == f
    assert b.apply_and(f, 1) == f
    assert b.negate(b.negate(g)) == g


def test_cube_and_enumeration():
    b = Bdd()
    f = b.cube([(0, 1), (2, 0)])
    vecs = list(b.iter_bit_vectors(f, 3))
    assert vecs == [(1, 0, 0), (1, 1, 0)]
    assert b.satcount(f, 3) == 2


def test_check_reduced_holds_everywhere():
    b = Bdd()
    x, y, z = (b.literal(i, True) for i in range(3))
    f = b.apply_or(b.apply_and(x, y), z)
    b.check_reduced(f)


def test_node_limit_enforced():
    b = Bdd(node_limit=8)
    with pytest.raises(LimitExceeded):
        f = 1
        for i in range(6):
            f = b.apply_and(f, b.literal(i, True))


def test_encoding_layout():
    enc = make_encoding([4, 3, 2])
    assert enc.bit_counts == (2, 2, 1)
    assert enc.offsets == (0, 2, 4, 5)
    assert enc.total_bits == 5
    assert enc.encode(1, 2) == (0, 1)
    assert enc.decode(1, (0, 1)) == 2
    assert [enc.layer_of_bit(b) for b in range(5)] == [0, 0, 1, 1, 2]
    assert enc.pos_of_bit(3) == 1
    assert make_encoding([1]).bit_counts == (1,)


def test_build_bdd_tshirt(tshirt_model):
    compiled = build_bdd(tshirt_model)
    assert compiled.bdd.satcount(compiled.root, compiled.encoding.total_bits) == 11
    assert decoded_solutions(compiled) == brute_force_solutions(tshirt_model)
    compiled.bdd.check_reduced(compiled.root)


@pytest.mark.parametrize("seed", range(40))
def test_build_bdd_matches_brute_force(seed):
    m = random_model(seed)
    compiled = build_bdd(m)
    assert decoded_solutions(compiled) == brute_force_solutions(m)
    compiled.bdd.check_reduced(compiled.root)


def test_build_respects_node_limit(tshirt_model):
    with pytest.raises(LimitExceeded):
        build_bdd(tshirt_model, node_limit=4)


def test_deadline_stops_node_growth():
    b = Bdd()
    b.set_deadline(0.0)
    with pytest.raises(LimitExceeded):
        f = 1
        for i in range(8192):  # deadline is polled every 4096 allocations
            f = b.mk(8192 - i, 0 if i % 2 else f, f)


def test_nonstandard_ordering_same_solutions(tshirt_doc):
    import json

    from mddconfig.model import parse_model

    doc = json.loads(json.dumps(tshirt_doc))
    doc["ordering"] = ["x2", "x3", "x1"]
    m = parse_model(json.dumps(doc))
    compiled = build_bdd(m)
    assert decoded_solutions(compiled) == brute_force_solutions(m)
