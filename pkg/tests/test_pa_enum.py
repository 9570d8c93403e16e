from __future__ import annotations

import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from builders import SQRT2, sign_matrix, three_set
from flatrack import castle as C
from flatrack import dc_hyp as D
from flatrack import pa_enum as PA
from flatrack import perm as P
from flatrack.numkernel import IntMatrix, charpoly, qsqrt

H2 = PA.unlabeled_graph(PA.hyperelliptic_seed(3))
WALKS = list(PA.closed_walks(H2, 5))


def _necklaces(max_len: int):
    r"""Cyclic words in ``l``/``r`` using both letters, one per rotation class."""
    seen = set()
    for n in range(2, max_len + 1):
        for w in itertools.product("lr", repeat=n):
            if len(set(w)) < 2:
                continue
            key = min(w[i:] + w[:i] for i in range(n))
            if key not in seen:
                seen.add(key)
                yield key


def _sl2_trace(word) -> int:
    gens = {"r": np.array([[1, 1], [0, 1]]), "l": np.array([[1, 0], [1, 1]])}
    m = np.eye(2, dtype=int)
    for a in word:
        m = m @ gens[a]
    return int(np.trace(m))


def test_torus_classes_match_sl2_words():
    res = PA.enumerate_pa(1, 4)
    got = Counter(rec.charpoly for rec in res.records)
    want = Counter((1, -_sl2_trace(w), 1) for w in _necklaces(4))
    assert got == want and len(res.records) == 7
    for rec in res.records:
        t = -rec.charpoly[1]
        assert rec.dilatation == (t + qsqrt(t * t - 4)) / 2
        assert rec.certificate == "exact"
    powers = [rec.loop.word() for rec in res.records if rec.power]
    assert powers == ["l r l r"]


def test_torus_invariant_data():
    rec = PA.enumerate_pa(1, 2).records[0]
    g = (qsqrt(5) - 1) / 2
    assert rec.loop.word() == "l r"
    assert rec.lam == (-g * g, g)
    Q = rec.quadrangulation
    D.validate_quadrangulation(Q)
    assert Q.area() == 1
    assert math.isclose(rec.t0, math.log(float(rec.dilatation)))


@given(st.sampled_from(WALKS))
def test_loop_matrix_identities(loop):
    M = PA.loop_matrix(loop)
    J = sign_matrix(3)
    A = PA.path_matrix(loop)
    assert M.det() == 1 and A.det() == 1
    assert PA.check_sign_conjugation(loop)
    assert PA.dagger(loop) == J @ A.inverse() @ J
    assert PA.dual_matrix(loop) == J @ M.inverse() @ J
    g = PA.genuine_loop(loop)
    assert g.is_genuine()
    assert PA.loop_matrix(g) == M ** P.order(loop.sigma)


@given(st.sampled_from(WALKS))
def test_canonical_form_is_a_class_invariant(loop):
    canon = PA.loop_canonical_form(H2, loop)
    for other in PA.equivalent_presentations(H2, loop)[:20]:
        assert PA.loop_canonical_form(H2, other) == canon
        assert charpoly(PA.loop_matrix(other)) == charpoly(PA.loop_matrix(loop))
        assert PA.is_power(H2, other) == PA.is_power(H2, loop)


@given(st.sampled_from(WALKS))
def test_lift_and_project(loop):
    edges = PA.project_loop(H2, loop)
    assert len(edges) == len(loop)
    start = H2.projection[loop.start]
    lifted = PA.lift_loop(H2, edges, start)
    assert PA.loop_canonical_form(H2, lifted) == PA.loop_canonical_form(H2, loop)


def test_unlabeled_graph_of_h2():
    assert len(H2.labeled) == 9 and len(H2.vertices) == 3
    assert H2.degree == 3
    for v in H2.vertices:
        assert all(H2.projection[w] == v for w in H2.fiber(v))
    assert D.pi_from_tree(D.tree_from_pi(PA.hyperelliptic_seed(3))) == PA.hyperelliptic_seed(3)
    with pytest.raises(PA.EvenK):
        PA.unlabeled_graph(PA.hyperelliptic_seed(2))


def test_three_set_loop():
    start = C.to_quadrangulation(three_set()).pi
    loop = PA.parse_loop("rr· rr· l·· l·· ··r ··r ·ll ·ll", start)
    assert loop.sigma == P.identity(3)
    rec = PA.pf_construct(loop)
    assert rec.dilatation == 3 + 2 * SQRT2
    assert not rec.power and rec.certificate == "exact"
    graph = PA.unlabeled_graph(start)
    assert PA.loop_canonical_form(graph, loop).word() == "l·· l·· ·ll ·ll rr· rr· ··r ··r"
    with pytest.raises(PA.LiftError):
        PA.parse_loop("rr·", start)


def test_genus_two_enumeration():
    res = PA.enumerate_pa(3, 6)
    assert (res.classes, res.positive, len(res.records)) == (230, 106, 106)
    # least dilatation in genus two: largest root of x^4 - x^3 - x^2 - x + 1
    ref = max(r.real for r in np.roots([1, -1, -1, -1, 1]) if abs(r.imag) < 1e-12)
    assert math.isclose(min(r.dilatation_float for r in res.records), ref, rel_tol=1e-12)
    assert all(r.certificate in ("exact", "float") for r in res.records)
    assert res.records == sorted(res.records, key=lambda r: r.sort_key())


def test_enumeration_budget():
    with pytest.raises(PA.BudgetExceeded):
        PA.enumerate_pa(3, 8, budget=100)


def test_relabel_matrix_moves_blocks():
    s = (1, 2, 0)
    R = PA.relabel_matrix(s)
    v = list(range(6))
    w = R.apply(v)
    for i in range(3):
        assert w[2 * s[i]: 2 * s[i] + 2] == v[2 * i: 2 * i + 2]
    assert isinstance(R, IntMatrix)
