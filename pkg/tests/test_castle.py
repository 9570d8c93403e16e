from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from builders import (
    GOLDEN,
    SQRT2,
    SQUARE_TILED,
    V,
    golden_castle,
    octagon,
    random_castle,
    square_tiled,
    three_set,
    trace_start,
)
from flatrack import castle as C
from flatrack import dc_hyp as D
from flatrack.numkernel import sign


@st.composite
def castles(draw):
    return random_castle(random.Random(draw(st.integers(0, 10**6))))


@st.composite
def forward_moves(draw):
    P = draw(castles())
    i = draw(st.sampled_from(C.allowed(P)))
    return P, C.Choice(i, C.forward_side(P, i))


@given(forward_moves())
def test_forward_move_properties(pc):
    P, c = pc
    Q = C.forward_move(P, c)
    C.validate_castle(Q)
    assert Q.area() == P.area()
    A = C.move_matrix(P.forest, c)
    assert A.det() == 1
    assert A.apply(P.vector()) == Q.vector()
    assert c.index in C.allowed_backward(Q)
    assert C.backward_side(Q, c.index) == c.side
    assert C.backward_move(Q, c) == P


@given(castles())
def test_backward_moves_are_undone(P):
    for i in C.allowed_backward(P):
        Q = C.backward_move(P, i)
        C.validate_castle(Q)
        assert Q.area() == P.area()
        assert C.forward_move(Q, C.Choice(i, C.backward_side(P, i))) == P


@given(forward_moves(), st.data())
def test_moves_commute_with_relabeling(pc, data):
    P, c = pc
    s = tuple(data.draw(st.permutations(range(P.k))))
    moved = C.forward_move(P.relabel(s), C.Choice(s[c.index], c.side))
    assert moved == C.forward_move(P, c).relabel(s)
    assert C.match_relabeling(P, P.relabel(s)) is not None


@given(castles())
def test_balance_is_a_fundamental_domain(P):
    B = C.balance(P)
    assert C.is_balanced(B)
    assert B.area() == P.area()
    assert C.balance(B) == B
    # every polygon is at least one wide and no admissible move keeps that
    for i in range(B.k):
        assert C.width_intervals(B, i).width >= 1
    for i in C.allowed(B):
        assert C.width_intervals(B, i).width_after < 1


@given(castles(), st.fractions(Fraction(1, 3), 3, max_denominator=7))
def test_balancing_commutes_with_relabeling(P, f):
    s = tuple(reversed(range(P.k)))
    assert C.balance(P.relabel(s)) == C.balance(P).relabel(s)
    flowed = C.teich_flow_castle(P, factor=f)
    C.validate_castle(flowed)
    assert flowed.area() == P.area()


@given(castles())
def test_json_and_forest_roundtrip(P):
    assert C.castle_from_json(json.loads(json.dumps(C.castle_to_json(P)))) == P
    assert tuple(C.parse_forest(P.word)) == P.forest
    assert tuple(C.parse_forest(C.format_forest(P.forest, unicode=True))) == P.forest


@pytest.mark.parametrize("ht", SQUARE_TILED)
def test_from_surface(ht):
    X = square_tiled(*ht, SQRT2 / 3, Fraction(2, 7))
    tris, _, _ = C.veering_triangulation(X)
    for tri in tris:
        slopes = {sign(v.x) * sign(v.y) for v in tri}
        assert slopes == {1, -1}
    P = C.from_surface(X)
    C.validate_castle(P)
    assert P.area() == X.area()
    Y = C.to_surface(P)
    assert Y.genus == X.genus and sorted(Y.cones.orders) == sorted(X.cones.orders)
    assert P.k == 2 * Y.genus - 2 + len(Y.cones.orders)


def test_octagon_castle():
    X = octagon(SQRT2 / 5, Fraction(1, 7))
    P = C.from_surface(X)
    C.validate_castle(P)
    assert P.k == 3 and C.to_surface(P).genus == 2


def test_quadrangulation_roundtrip():
    P = three_set()
    Q = C.to_quadrangulation(P)
    D.validate_quadrangulation(Q)
    assert C.from_quadrangulation(Q) == P
    assert C.to_quadrangulation(C.forward_move(trace_start(), (0, "r"))) is None


def test_first_return_lands_in_the_section():
    for P in (three_set(), golden_castle()):
        assert C.in_section(P)
        r = C.first_return(P)
        assert C.in_section(r.castle)
        assert r.factor > 1 and r.castle.area() == P.area()
    assert C.first_return(golden_castle()).factor == 1 / GOLDEN
    with pytest.raises(C.CastleError):
        C.first_return(trace_start())


def test_describe_log():
    assert C.describe_log(SQRT2) == "log(2)/2"
    assert C.describe_log(3 + 2 * SQRT2) == "log(3 + 2*sqrt(2))"
    assert C.describe_log(Fraction(4)) == "log(4)"


def test_parse_errors_and_validation():
    for bad in ["(r1 l1", "(r1 l2)", "(r1 r1)", "(x1 l1)", "(r1 l1))", "r1 l1"]:
        with pytest.raises((C.ForestSyntaxError, C.CastleError)):
            C.validate_castle(C.CastleSet.make(bad, [(V(-1, 1), V(1, 1))]))
    broken = C.CastleSet.make("(r1 l1)", [(V(1, 1), V(1, 1))])
    with pytest.raises(C.CastleError):
        C.validate_castle(broken)
    with pytest.raises(C.CastleError):
        C.validate_castle(C.CastleSet.make("(r2 l2)(r3 l3)(r1 l1)", [(V(-2, 2), V(1, 1)), (V(-1, 2), V(1, 1)), (V(-2, 2), V(1, 1))]))
    assert C.parse_choice("(2,l)", 3) == C.Choice(1, "l")


def test_balance_budget():
    with pytest.raises(C.BudgetExceeded):
        C.balance(C.teich_flow_castle(three_set(), factor=Fraction(1, 10**6)), budget=3)
