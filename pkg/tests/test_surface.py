from __future__ import annotations

import json
import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from builders import SQRT2, SQUARE_TILED, V, octagon, sheared, square_tiled
from flatrack import castle as C
from flatrack import surface as S
from flatrack.numkernel import QuadScalar, Vec, normalize, scalar_cmp, sign

shears = st.tuples(st.integers(1, 9), st.integers(10, 30), st.integers(-9, 9).filter(bool), st.integers(10, 30))


def _shear(t):
    p, q, r, s = t
    return SQRT2 * Fraction(p, q), Fraction(r, s)


def _torus(a, b) -> S.TranslationSurface:
    return square_tiled((0,), (0,), a, b)


def _primitive_oracle(u: Vec, v: Vec, L) -> Counter:
    r"""Primitive lattice vectors of length at most ``L`` pointing up, or right when horizontal."""
    uf, vf = u.to_floats(), v.to_floats()
    det = abs(uf[0] * vf[1] - uf[1] * vf[0])
    N = int(float(L) * (math.hypot(*uf) + math.hypot(*vf)) / det) + 2
    out = Counter()
    for m in range(-N, N + 1):
        for n in range(-N, N + 1):
            if math.gcd(m, n) != 1:
                continue
            w = (u * m + v * n).normalized()
            if scalar_cmp(w.norm2(), normalize(L) ** 2) <= 0 and sign(w.y) >= 0:
                out[w] += 1
    return out


def _holonomies(conns) -> Counter:
    return Counter(c.holonomy for c in conns)


@given(shears, st.sampled_from([2, 3, Fraction(7, 2)]))
def test_torus_connections_are_primitive_vectors(t, L):
    a, b = _shear(t)
    X = _torus(a, b)
    sh = sheared(a, b)
    u, v = sh(1, 0), sh(0, 1)
    got = _holonomies(S.saddle_connections(X, L))
    assert got == _primitive_oracle(u, v, L)
    assert Counter(S.lattice_saddle_connections((u, v), L)) == got


@given(st.sampled_from(SQUARE_TILED), shears, st.sampled_from([2, 3]))
def test_connections_do_not_depend_on_the_polygons(ht, t, L):
    h, v = ht
    X = square_tiled(h, v, *_shear(t))
    Y = C.to_surface(C.from_surface(X))
    assert Y.area() == X.area()
    assert _holonomies(S.saddle_connections(X, L)) == _holonomies(S.saddle_connections(Y, L))


@given(st.sampled_from(SQUARE_TILED), shears, st.fractions(Fraction(1, 3), 3, max_denominator=9))
def test_flow_moves_connections(ht, t, f):
    h, v = ht
    X = square_tiled(h, v, *_shear(t))
    w, ht_ = Fraction(3, 2), Fraction(5, 2)
    before = _holonomies(S.saddle_connections_in_box(X, w, ht_))
    after = _holonomies(S.saddle_connections_in_box(S.teich_flow(X, factor=f), w * f, ht_ / f))
    assert after == Counter({Vec(normalize(k.x * f), normalize(k.y / f)): n for k, n in before.items()})


@pytest.mark.parametrize(
    "ht, genus, orders",
    [(SQUARE_TILED[0], 1, [1, 1]), (SQUARE_TILED[1], 2, [3]), (SQUARE_TILED[2], 2, [2, 2]), (SQUARE_TILED[3], 2, [1, 3])],
)
def test_genus_and_cones(ht, genus, orders):
    X = square_tiled(*ht, SQRT2 / 3, Fraction(2, 7))
    assert X.genus == genus
    assert sorted(X.cones.orders) == orders
    # Gauss-Bonnet: sum of (order - 1) is 2g - 2
    assert sum(o - 1 for o in orders) == 2 * genus - 2
    assert X.area() == len(ht[0])


def test_octagon():
    X = octagon(0, 0)
    assert X.genus == 2 and X.cones.orders == [3]
    assert S.systole(X, 2) == 1
    assert X.area() == 2 + 2 * SQRT2
    Y = octagon(SQRT2 / 5, Fraction(1, 7))
    T = Y.triangulate()
    assert T.area() == Y.area() and T.genus == 2


def test_systole_of_sheared_torus():
    X = _torus(SQRT2 / 4, Fraction(-1, 3))
    u, v = sheared(SQRT2 / 4, Fraction(-1, 3))(1, 0), sheared(SQRT2 / 4, Fraction(-1, 3))(0, 1)
    best = min((w.norm2() for w in _primitive_oracle(u, v, 2)), key=float)
    assert S.systole_squared(X, 2) == best
    with pytest.raises(S.BoundExceeded):
        S.systole_squared(X, Fraction(1, 100))


def test_json_roundtrip_and_errors():
    X = octagon(SQRT2 / 5, Fraction(1, 7))
    Y = S.TranslationSurface.from_json(json.loads(json.dumps(X.to_json())))
    assert Y.polygons == X.polygons and Y.genus == 2
    with pytest.raises(S.SurfaceError):
        S.TranslationSurface([[V(0, 0), V(1, 0), V(1, 2), V(0, 1)]], [((0, 0), (0, 2)), ((0, 1), (0, 3))])


def test_vertical_exit_on_the_square():
    X = _torus(0, 0)
    q, f, p = S.vertical_exit(X, 0, V(Fraction(1, 2), Fraction(1, 4)))
    assert (q, p) == (0, V(Fraction(1, 2), 0))
    assert S.locate(X, 0, V(Fraction(1, 2), Fraction(1, 4)))


def test_best_approximation_on_the_square():
    X = _torus(0, 0)
    assert S.is_best_approximation(X, S.SaddleConnection(0, V(1, 1)))
    assert not S.is_best_approximation(X, S.SaddleConnection(0, V(1, 2)))
    assert not S.is_best_approximation(X, S.SaddleConnection(0, V(1, 0)))


@given(st.fractions(-20, 20, max_denominator=9), st.fractions(-20, 20, max_denominator=9), st.sampled_from([2, 3, 5]))
def test_exact_sqrt_of_squares(a, b, d):
    x = normalize(QuadScalar(a, b, d))
    root = S.exact_sqrt(x * x)
    assert root == abs(x)



def test_exact_sqrt_outside_the_field():
    # sqrt(sqrt 2) has degree four
    assert S.exact_sqrt(SQRT2) is None
    assert S.exact_sqrt(3 + 2 * SQRT2) == 1 + SQRT2
    assert S.exact_sqrt(Fraction(2)) == SQRT2
