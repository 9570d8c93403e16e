from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from builders import V, genus_two_quad, golden_quad, no_staircase_quad, three_set
from flatrack import castle as C
from flatrack import dc_hyp as D
from flatrack import perm as P
from flatrack.iet import KeaneViolation
from flatrack.numkernel import Vec, field_of, qsqrt

SEEDS = [golden_quad(), C.to_quadrangulation(three_set())]
factors = st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=12)


@st.composite
def quadrangulations(draw):
    r"""Relabeled, rotated and flowed images of irrational seeds, moved a few times."""
    Q = draw(st.sampled_from(SEEDS))
    Q = Q.relabel(tuple(draw(st.permutations(range(Q.k)))))
    for _ in range(draw(st.integers(0, 3))):
        Q = D.rotation(Q)
    root = qsqrt(field_of(x for w in Q.wl + Q.wr for x in w))
    Q = Q.flow(draw(factors) * (1 + root * draw(st.integers(0, 1))))
    for _ in range(draw(st.integers(0, 4))):
        cs = D.well_slanted_cycles(Q)
        Q = D.staircase_move(Q, draw(st.sampled_from(cs)))
    return Q


@st.composite
def moves(draw):
    Q = draw(quadrangulations())
    return Q, draw(st.sampled_from(D.well_slanted_cycles(Q)))


@given(moves())
def test_staircase_move_properties(qc):
    Q, c = qc
    Q2 = D.staircase_move(Q, c)
    D.validate_quadrangulation(Q2)
    assert Q2.area() == Q.area()
    assert Q2.pi == D.move_pi(Q.pi, c)
    A = D.staircase_matrix(Q.pi, c)
    assert A.det() == 1
    assert A.apply(Q.vector()) == Q2.vector()
    assert D.backward_allowed(Q2, c)
    assert D.backward_staircase_move(Q2, c) == Q


@given(moves(), st.data())
def test_moves_commute_with_relabeling_and_flow(qc, data):
    Q, c = qc
    s = tuple(data.draw(st.permutations(range(Q.k))))
    assert D.staircase_move(Q.relabel(s), c.relabel(s)) == D.staircase_move(Q, c).relabel(s)
    f = data.draw(factors)
    assert D.staircase_move(Q.flow(f), c) == D.staircase_move(Q, c).flow(f)


@given(quadrangulations())
def test_rotation(Q):
    R = D.rotation(Q)
    D.validate_quadrangulation(R)
    assert R.area() == Q.area()
    assert R.pi == D.rotate_pi(Q.pi)
    assert D.rotation_inverse(R) == Q
    # a half turn is the hyperelliptic involution, so it only relabels
    R2 = D.rotation(R)
    assert any(Q.relabel(s) == R2 for s in P.all_perms(Q.k))


@given(quadrangulations())
def test_canonical_form_is_order_independent(Q):
    a = D.canonical_quadrangulation(Q, order="first")
    b = D.canonical_quadrangulation(Q, order="last")
    assert a == b
    assert D.f1_holds(a) and not D.f2_fails(a)
    assert D.canonical_quadrangulation(a) == a


@given(quadrangulations())
def test_tree_of_relations_recovers_pi(Q):
    t = D.tree_of_relations(Q)
    assert D.pi_from_tree(t) == Q.pi
    assert all(P.is_involution(s) for s in (t.sigma_l, t.sigma_r, t.sigma_d))
    inv = D.staircase_invariant(Q.pi)
    assert all(D.staircase_invariant(D.move_pi(Q.pi, c)) == inv for c in D.all_cycles(Q.pi))


@given(quadrangulations())
def test_bipartite_iet_and_surface(Q):
    T = D.bipartite_iet(Q)
    assert T.total() == sum((Q.wr[i].x - Q.wl[i].x for i in range(Q.k)), Fraction(0))
    X = D.to_surface(Q)
    assert X.area() == Q.area()
    assert X.genus == (1 if Q.k == 1 else 2)


@given(quadrangulations())
def test_json_roundtrip(Q):
    assert D.quad_from_json(json.loads(json.dumps(D.quad_to_json(Q)))) == Q


def test_validation_rejects_broken_train_tracks():
    Q = genus_two_quad()
    bad = D.Quadrangulation(Q.pl, Q.pr, (V(-3, 3),) + Q.wl[1:], Q.wr)
    with pytest.raises(D.QuadrangulationError):
        D.validate_quadrangulation(bad)
    assert not D.is_valid(bad)


def test_vertical_diagonal_is_a_keane_violation():
    Q = D.Quadrangulation((0,), (0,), (V(-1, 1),), (V(1, 1),))
    with pytest.raises(KeaneViolation):
        D.well_slanted(Q, D.Cycle.make("r", (0,)))


def test_golden_greedy_steps():
    trace = D.run_algorithm(golden_quad(), "greedy", 6)
    assert len(trace) == 6 and all(len(s.moves) == 1 for s in trace)
    # the golden torus alternates one right move and one left move
    assert [s.moves[0].side for s in trace] == ["r", "l"] * 3
    lr = D.run_algorithm(golden_quad(), "left_right", 4)
    assert all(D.is_valid(s.quadrangulation) for s in lr)
    with pytest.raises(ValueError):
        D.run_algorithm(golden_quad(), "sideways", 1)


def test_no_staircase_quadrangulation():
    Q = no_staircase_quad()
    assert D.well_slanted_cycles(Q) == []
    with pytest.raises(D.NoWellSlantedStaircase):
        D.run_algorithm(Q)
    with pytest.raises(D.NotHyperelliptic):
        D.tree_from_pi(Q.pi)


def test_tree_example_k5():
    sl = P.parse_cycles("(1 3)", 5)
    sr = P.parse_cycles("(3 5)", 5)
    sd = P.parse_cycles("(1 2)(3 4)", 5)
    pi = D.pi_from_tree(D.TreeOfRelations(sl, sr, sd))
    assert sd in D.involution_candidates(pi)
    G = D.dc_graph(pi)
    assert len({D.staircase_invariant(v) for v in G.vertices}) == 1
    assert G.to_dot().count("->") == len(G.edges)


def test_cyclical_labeling_reads_odd_then_even():
    Q = C.to_quadrangulation(three_set())
    L = D.cyclical_labeling(Q)
    D.validate_quadrangulation(L)
    assert len(D.singularity_order(L.pi)) == 1
    succ = P.compose(D.tree_of_relations(L).sigma_d, P.inverse(L.pl), P.inverse(L.pr))
    assert succ == (1, 2, 0)


def test_hyp_first_return_golden():
    f = D.hyp_first_return(golden_quad())
    assert f.factor == (1 + qsqrt(5)) / 2
    assert D.f1_holds(f.quadrangulation) and not D.f2_fails(f.quadrangulation)
    assert f.quadrangulation.area() == golden_quad().area()


def test_cycle_from_text():
    pi = genus_two_quad().pi
    assert D.cycle_from_text("r(1 3)", pi) == D.Cycle.make("r", (0, 2))
    assert D.cycle_from_text("r·r", pi) == D.Cycle.make("r", (0, 2))
    with pytest.raises(ValueError):
        D.cycle_from_text("r(1 2)", pi)


def test_suspension_checks_its_data():
    Q = genus_two_quad()
    assert D.suspension(Q.pi, [(-3, 4), (-1, 2), (-5, 2)], [(2, 3), (2, 4), (3, 4)]) == Q
    with pytest.raises(D.QuadrangulationError):
        D.suspension(Q.pi, [(-3, 4), (-1, 2), (-5, 2)], [(2, 3), (2, 4), (3, 5)])
    assert isinstance(Q.diagonal(0), Vec)
