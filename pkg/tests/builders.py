"""Shared constructions for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction as F

from flatrack import castle as C
from flatrack import dc_hyp as D
from flatrack import perm as P
from flatrack.numkernel import IntMatrix, Vec, normalize, qsqrt, vec
from flatrack.surface import TranslationSurface

SQRT2 = qsqrt(2)
SQRT5 = qsqrt(5)
GOLDEN = (SQRT5 - 1) / 2


def V(x, y) -> Vec:
    return vec(F(x), F(y))


def sign_matrix(k: int) -> IntMatrix:
    return IntMatrix([[(-1 if a % 2 == 0 else 1) if a == b else 0 for b in range(2 * k)] for a in range(2 * k)])


def three_set() -> C.CastleSet:
    """The 3-set with equal wedges over Q(sqrt 2)."""
    wl = Vec(-SQRT2 / 2, (2 - SQRT2) / 2)
    wr = Vec((2 - SQRT2) / 2, SQRT2 / 2)
    return C.CastleSet.make("(r1 l2)(r3 l1)(r2 l3)", [(wl, wr)] * 3)


def golden_castle() -> C.CastleSet:
    g = GOLDEN
    return C.CastleSet.make("(r1 l1)", [(Vec(-g, g * g), Vec(g * g, g))])


def golden_quad() -> D.Quadrangulation:
    g = GOLDEN
    return D.Quadrangulation((0,), (0,), (Vec(-g, g * g),), (Vec(g * g, g),))


def trace_start() -> C.CastleSet:
    """Three quadrilaterals glued in a 3-cycle on both sides."""
    return C.CastleSet.make(
        "(r2 l2)(r3 l3)(r1 l1)",
        [(V(-2, 2), V(1, 1)), (V("-1.3", 2), V("1.7", 1)), (V("-1.3", 2), V("1.7", 1))],
    )


def no_staircase_quad() -> D.Quadrangulation:
    pp = P.parse_cycles("(1 2 3)", 3)
    return D.Quadrangulation(pp, pp, (V(-2, 2), V("-1.3", 2), V("-1.3", 2)), (V(1, 1), V("1.7", 1), V("1.7", 1)))


def genus_two_quad() -> D.Quadrangulation:
    """Suspension over a bipartite interval exchange in H(2)."""
    pl = P.parse_cycles("(1 2 3)", 3)
    pr = P.parse_cycles("(1 3)", 3)
    return D.Quadrangulation.from_data(pl, pr, [(-3, 4), (-1, 2), (-5, 2)], [(2, 3), (2, 4), (3, 4)])


def sheared(a, b):
    """The map with matrix [[1, a], [b, 1 + ab]]."""
    a, b = normalize(a), normalize(b)
    return lambda x, y: Vec(normalize(x + a * y), normalize(b * x + (1 + a * b) * y))


def square_tiled(h, v, a, b) -> TranslationSurface:
    r"""
    Unit squares, square `i` glued on its right to `h(i)` and on its top to
    `v(i)`, then sheared.  With `a` irrational and `b` rational nonzero there
    are no vertical or horizontal saddle connections.
    """
    sh = sheared(a, b)
    polys, glue = [], []
    for i in range(len(h)):
        polys.append([sh(F(i), F(0)), sh(F(i + 1), F(0)), sh(F(i + 1), F(1)), sh(F(i), F(1))])
        glue.append(((i, 1), (h[i], 3)))
        glue.append(((i, 2), (v[i], 0)))
    return TranslationSurface(polys, glue)


# one seed per stratum: two marked points on a torus, H(2), H(1,1), H(2,0)
SQUARE_TILED = [((1, 0), (0, 1)), ((1, 2, 0), (1, 0, 2)), ((1, 2, 3, 0), (1, 0, 3, 2)), ((1, 2, 0, 3), (3, 1, 2, 0))]


def octagon(a, b) -> TranslationSurface:
    """The regular octagon with opposite sides glued, sheared."""
    h = SQRT2 / 2
    dirs = [(1, 0), (h, h), (0, 1), (-h, h), (-1, 0), (-h, -h), (0, -1), (h, -h)]
    sh = sheared(a, b)
    pts = [Vec(F(0), F(0))]
    for x, y in dirs[:-1]:
        pts.append((pts[-1] + sh(x, y)).normalized())
    return TranslationSurface([pts], [((0, i), (0, i + 4)) for i in range(4)])


def random_castle(rng: random.Random, max_moves: int = 6) -> C.CastleSet:
    r"""
    A castle set over Q(sqrt 2): a sheared square-tiled surface with random
    shear parameters, then a few random forward moves.
    """
    h, v = rng.choice(SQUARE_TILED)
    a = SQRT2 * F(rng.randint(1, 9), rng.randint(10, 30))
    b = F(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(10, 30))
    P_ = C.from_surface(square_tiled(h, v, a, b))
    for _ in range(rng.randint(0, max_moves)):
        P_ = C.forward_move(P_, rng.choice(C.allowed(P_)))
    return P_
