from __future__ import annotations

from math import lcm

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatrack import perm as P


@st.composite
def perms(draw, k=None):
    k = k or draw(st.integers(min_value=1, max_value=8))
    return tuple(draw(st.permutations(range(k))))


@st.composite
def perm_triples(draw):
    k = draw(st.integers(min_value=1, max_value=8))
    return draw(perms(k)), draw(perms(k)), draw(perms(k))


@given(perm_triples())
def test_composition_is_a_group_law(triple):
    p, q, r = triple
    assert P.compose(p, P.compose(q, r)) == P.compose(P.compose(p, q), r) == P.compose(p, q, r)
    assert P.compose(p, P.inverse(p)) == P.identity(len(p))
    assert all(P.compose(p, q)[i] == p[q[i]] for i in range(len(p)))


@given(perm_triples())
def test_conjugation_relabels_cycles(triple):
    s, p, _ = triple
    c = P.conjugate(s, p)
    relabeled = sorted(sorted(tuple(s[i] for i in cyc)) for cyc in P.cycles(p))
    assert sorted(sorted(cyc) for cyc in P.cycles(c)) == relabeled


@given(perms())
def test_cycle_notation_roundtrip(p):
    assert P.parse_cycles(P.format_cycles(p), len(p)) == p
    assert P.parse_cycles(P.format_cycles(p, fixed=True), len(p)) == p
    assert P.from_images(P.to_images(p)) == p


@given(perms())
def test_order_and_cycles(p):
    cs = P.cycles(p)
    assert sorted(i for c in cs for i in c) == list(range(len(p)))
    assert all(P.is_cycle_of(p, c) for c in cs)
    n = P.order(p)
    assert n == lcm(*(len(c) for c in cs))
    q = P.identity(len(p))
    for _ in range(n):
        q = P.compose(p, q)
    assert q == P.identity(len(p))
    assert P.is_involution(p) == (n <= 2)


def test_parse_examples_and_errors():
    assert P.parse_cycles("(1 2 3)", 3) == (1, 2, 0)
    assert P.parse_cycles("(1,3)", 3) == (2, 1, 0)
    assert P.parse_cycles("()", 2) == (0, 1)
    assert P.format_cycles((0, 1)) == "()"
    for bad in ["(1 4)", "(1 1)", "(1 2)(2 3)", "1 2", "(a b)"]:
        with pytest.raises(ValueError):
            P.parse_cycles(bad, 3)
    with pytest.raises(ValueError):
        P.from_images([1, 1, 2])
