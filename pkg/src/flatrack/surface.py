r"""
Translation surfaces glued from planar polygons.

Polygons are lists of vertex positions in counterclockwise order; edge `e` of
a polygon runs from vertex `e` to vertex `e+1`.  A gluing pairs edges whose
vectors are opposite.  Directions at a cone point are tracked by a turn
counter: walking counterclockwise around the point, the counter increases each
time the sweep passes the positive horizontal direction, so a cone of angle
`2\pi k` has `k` turns and the upper half-plane of each turn is one bundle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, NamedTuple, Sequence

from .numkernel import (
    Scalar,
    Vec,
    field_of,
    normalize,
    scalar_cmp,
    sign,
    vec_from_json,
    vec_to_json,
)

Edge = tuple  # (polygon, edge index)

ZERO = Vec(Fraction(0), Fraction(0))


class SurfaceError(ValueError):
    pass


class BoundExceeded(ValueError):
    pass


# direction geometry


def _half(v: Vec) -> int:
    """0 for arguments in [0, π), 1 for [π, 2π)."""
    sy = sign(v.y)
    return 0 if sy > 0 or (sy == 0 and sign(v.x) > 0) else 1


def arg_cmp(u: Vec, v: Vec) -> int:
    r"""Compare arguments in `[0, 2\pi)` exactly."""
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return -1 if hu < hv else 1
    return -sign(u.cross(v))


def _parallel_same(a: Vec, b: Vec) -> bool:
    return sign(a.cross(b)) == 0 and sign(a.dot(b)) > 0


def _passes_ray(u: Vec, v: Vec) -> int:
    r"""
    Number of times the counterclockwise sweep from ``u`` (exclusive) to
    ``v`` (inclusive) passes the positive horizontal direction.  Sweeps are
    corners of polygons, hence of angle in `(0, 2\pi)`.
    """
    if arg_cmp(v, u) <= 0:
        return 1
    return 0


def _in_corner(u: Vec, d: Vec, v: Vec) -> bool:
    """``d`` in the sweep from ``u`` inclusive to ``v`` exclusive, sweep in (0, 2π)."""
    if _parallel_same(d, u):
        return True
    if _parallel_same(d, v):
        return False
    cu, cv = arg_cmp(d, u), arg_cmp(v, u)
    if cv > 0:  # no wrap through the horizontal ray
        return cu > 0 and arg_cmp(d, v) < 0
    return cu > 0 or arg_cmp(d, v) < 0


# surfaces


@dataclass
class ConeData:
    r"""Cone points as lists of corners `(polygon, vertex)` with angle `2\pi` times ``order``."""

    singularities: list[tuple[tuple[Edge, ...], int]]

    @property
    def orders(self) -> list[int]:
        return [k for _, k in self.singularities]

    def __str__(self):
        return ", ".join(f"{2 * k}pi" for k in self.orders)


class TranslationSurface:
    r"""
    Polygons with a translation gluing of their edges.

    ``gluing`` is a list of pairs ``((p, e), (q, f))``; an edge may not be
    glued twice.  Construction validates the gluing exactly and computes
    the cone points; a surface with float coordinates (from a real-time
    flow) skips validation.
    """

    __slots__ = ("polygons", "gluing", "_partner", "cones", "exact")

    def __init__(self, polygons: Sequence[Sequence[Vec]], gluing: Iterable, check: bool = True):
        self.polygons = [tuple(p) for p in polygons]
        self.gluing = [(tuple(a), tuple(b)) for a, b in gluing]
        self._partner: dict[Edge, Edge] = {}
        for a, b in self.gluing:
            if a in self._partner or b in self._partner or a == b:
                raise SurfaceError(f"edge glued twice: {a} or {b}")
            self._partner[a] = b
            self._partner[b] = a
        self.exact = check
        self.cones = None
        if check:
            self._validate()
            self.cones = self._cone_data()

    # structure

    def edge_vector(self, p: int, e: int) -> Vec:
        poly = self.polygons[p]
        return poly[(e + 1) % len(poly)] - poly[e]

    def partner(self, p: int, e: int) -> Edge:
        return self._partner[(p, e)]

    def _validate(self) -> None:
        for p, poly in enumerate(self.polygons):
            if len(poly) < 3:
                raise SurfaceError(f"polygon {p} has fewer than three vertices")
            for e in range(len(poly)):
                if (p, e) not in self._partner:
                    raise SurfaceError(f"edge {(p, e)} is not glued")
            if sign(_signed_area2(poly)) <= 0:
                raise SurfaceError(f"polygon {p} is not counterclockwise")
        for a, b in self.gluing:
            if self.edge_vector(*a) != -self.edge_vector(*b):
                raise SurfaceError(f"edges {a} and {b} are not parallel and isometric")
        # connectivity
        seen = {0}
        stack = [0]
        while stack:
            p = stack.pop()
            for e in range(len(self.polygons[p])):
                q = self._partner[(p, e)][0]
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        if len(seen) != len(self.polygons):
            raise SurfaceError("the glued complex is disconnected")

    def corner(self, p: int, j: int) -> tuple[Vec, Vec]:
        """Sweep of the corner at vertex ``j``: outgoing edge to reversed incoming edge."""
        n = len(self.polygons[p])
        return self.edge_vector(p, j), -self.edge_vector(p, (j - 1) % n)

    def next_corner(self, p: int, j: int) -> Edge:
        """The counterclockwise neighbour of a corner around its cone point."""
        n = len(self.polygons[p])
        return self._partner[(p, (j - 1) % n)]

    def vertex_cycles(self) -> list[tuple[Edge, ...]]:
        seen = set()
        out = []
        for p, poly in enumerate(self.polygons):
            for j in range(len(poly)):
                if (p, j) in seen:
                    continue
                cyc = [(p, j)]
                seen.add((p, j))
                c = self.next_corner(p, j)
                while c != (p, j):
                    cyc.append(c)
                    seen.add(c)
                    c = self.next_corner(*c)
                out.append(tuple(cyc))
        return out

    def _cone_data(self) -> ConeData:
        sing = []
        for cyc in self.vertex_cycles():
            turns = sum(_passes_ray(*self.corner(*c)) for c in cyc)
            if turns < 1:
                raise SurfaceError("degenerate cone point")
            sing.append((cyc, turns))
        return ConeData(sing)

    @property
    def genus(self) -> int:
        ks = self.cones.orders
        twice = sum(ks) - len(ks) + 2
        if twice % 2:
            raise SurfaceError("odd angle excess")
        return twice // 2

    def euler_characteristic(self) -> int:
        v = len(self.cones.singularities)
        e = len(self.gluing)
        return v - e + len(self.polygons)

    def area(self) -> Scalar:
        return sum((_signed_area2(p) for p in self.polygons), Fraction(0)) / 2

    def field(self) -> int:
        return field_of(c for poly in self.polygons for v in poly for c in (v.x, v.y))

    # triangulation

    def triangulate(self) -> "TriangulatedSurface":
        r"""Ear-clipping triangulation; diagonals are glued to themselves."""
        tris: list[tuple[Vec, Vec, Vec]] = []
        origin: list[tuple[int, int, int]] = []  # original corner indices of each triangle vertex
        edge_at: dict[Edge, Edge] = {}  # original edge -> triangle edge
        glue = []
        for p, poly in enumerate(self.polygons):
            idx = list(range(len(poly)))
            diag: dict[tuple[int, int], Edge] = {}

            def record(t, e, a, b):
                n = len(poly)
                if (b - a) % n == 1:
                    edge_at[(p, a)] = (t, e)
                elif (a, b) in diag:
                    glue.append((diag.pop((a, b)), (t, e)))
                else:
                    diag[(b, a)] = (t, e)

            while len(idx) > 3:
                m = len(idx)
                for s in range(m):
                    a, b, c = idx[s - 1], idx[s], idx[(s + 1) % m]
                    if _is_ear(poly, idx, a, b, c):
                        break
                else:
                    raise SurfaceError(f"polygon {p} is not simple")
                t = len(tris)
                tris.append((poly[a], poly[b], poly[c]))
                origin.append((p, a, b, c))
                record(t, 0, a, b)
                record(t, 1, b, c)
                record(t, 2, c, a)
                idx.remove(b)
            a, b, c = idx
            t = len(tris)
            tris.append((poly[a], poly[b], poly[c]))
            origin.append((p, a, b, c))
            record(t, 0, a, b)
            record(t, 1, b, c)
            record(t, 2, c, a)
            if diag:
                raise SurfaceError("triangulation bookkeeping failed")
        for a, b in self.gluing:
            glue.append((edge_at[a], edge_at[b]))
        return TriangulatedSurface(self, tris, glue, origin)

    # flows

    def flow(self, factor) -> "TranslationSurface":
        r"""`g_t` with `e^t` given exactly as ``factor``."""
        f = normalize(factor)
        polys = [[Vec(normalize(v.x * f), normalize(v.y / f)) for v in poly] for poly in self.polygons]
        return TranslationSurface(polys, self.gluing)

    def to_json(self) -> dict:
        return {
            "field": {"d": self.field()},
            "polygons": [[vec_to_json(v) for v in poly] for poly in self.polygons],
            "gluing": [[a[0], a[1], b[0], b[1]] for a, b in self.gluing],
        }

    @classmethod
    def from_json(cls, obj) -> "TranslationSurface":
        polys = [[vec_from_json(v) for v in poly] for poly in obj["polygons"]]
        gluing = [((g[0], g[1]), (g[2], g[3])) for g in obj["gluing"]]
        return cls(polys, gluing)


def _signed_area2(poly: Sequence[Vec]):
    n = len(poly)
    return sum((poly[i].cross(poly[(i + 1) % n]) for i in range(n)), Fraction(0))


def _is_ear(poly, idx, a, b, c) -> bool:
    A, B, C = poly[a], poly[b], poly[c]
    if sign((B - A).cross(C - B)) <= 0:
        return False
    for j in idx:
        if j in (a, b, c):
            continue
        X = poly[j]
        if (sign((B - A).cross(X - A)) >= 0 and sign((C - B).cross(X - B)) >= 0
                and sign((A - C).cross(X - C)) >= 0):
            return False
    return True


def build(polygons, gluing) -> tuple[TranslationSurface, ConeData, int]:
    X = TranslationSurface(polygons, gluing)
    return X, X.cones, X.genus


class TriangulatedSurface(TranslationSurface):
    __slots__ = ("parent", "origin")

    def __init__(self, parent: TranslationSurface, triangles, gluing, origin):
        super().__init__(triangles, gluing)
        self.parent = parent
        self.origin = origin

    def original_corner(self, t: int, j: int) -> Edge:
        return (self.origin[t][0], self.origin[t][1 + j])


# saddle connections


class SaddleConnection(NamedTuple):
    bundle: int
    holonomy: Vec

    @property
    def width(self) -> Scalar:
        return self.holonomy.x

    @property
    def height(self) -> Scalar:
        return self.holonomy.y

    @property
    def horizontal(self) -> bool:
        return sign(self.holonomy.y) == 0

    def __str__(self):
        return f"[{self.bundle + 1}] {self.holonomy}"


UP = Vec(Fraction(0), Fraction(1))


class _Bundles:
    r"""
    Turn bookkeeping on a triangulated surface.

    For every triangle corner: the cone point, the turn counter at the start
    of the corner, and the bundle number of each turn.  Bundles are numbered
    by the original polygon corner containing the upward direction of that
    turn, in lexicographic order.
    """

    def __init__(self, T: TriangulatedSurface):
        self.start_turn: dict[Edge, int] = {}
        self.cone_of: dict[Edge, int] = {}
        labels: dict[tuple[int, int], Edge] = {}
        for ci, (cyc, k) in enumerate(T.cones.singularities):
            turn = 0
            for c in cyc:
                u, v = T.corner(*c)
                self.start_turn[c] = turn
                self.cone_of[c] = ci
                if _in_corner(u, UP, v):
                    labels[(ci, (turn + (1 if arg_cmp(UP, u) < 0 else 0)) % k)] = T.original_corner(*c)
                turn += _passes_ray(u, v)
        ordered = sorted(labels, key=lambda key: labels[key])
        self.number = {key: n for n, key in enumerate(ordered)}
        self.orders = {ci: k for ci, (_, k) in enumerate(T.cones.singularities)}

    def bundle(self, corner: Edge, u: Vec, d: Vec) -> int:
        """Bundle of an upward or horizontal direction ``d`` in the corner starting at ``u``."""
        ci = self.cone_of[corner]
        turn = self.start_turn[corner]
        # the sweep from u to d passes the horizontal ray iff arg(d) <= arg(u)
        if not _parallel_same(d, u) and arg_cmp(d, u) <= 0:
            turn += 1
        return self.number[(ci, turn % self.orders[ci])]


_EPS = 1e-9


class _Disk:
    __slots__ = ("r2", "r2f")

    def __init__(self, r2):
        self.r2 = r2
        self.r2f = float(r2) * (1 + _EPS) + _EPS

    def contains(self, p: Vec) -> bool:
        return scalar_cmp(p.norm2(), self.r2) <= 0

    def may_meet(self, a, b) -> bool:
        """Float test on a segment, inflated so that it never rejects wrongly."""
        (ax, ay), (bx, by) = a, b
        dx, dy = bx - ax, by - ay
        dd = dx * dx + dy * dy
        t = 0.0 if dd == 0 else min(1.0, max(0.0, -(ax * dx + ay * dy) / dd))
        px, py = ax + t * dx, ay + t * dy
        return px * px + py * py <= self.r2f


class _Box:
    r"""The closed box `[-W, W] \times [0, H]`."""

    __slots__ = ("w", "h", "wf", "hf")

    def __init__(self, w, h):
        self.w, self.h = w, h
        self.wf = float(w) * (1 + _EPS) + _EPS
        self.hf = float(h) * (1 + _EPS) + _EPS

    def contains(self, p: Vec) -> bool:
        return (scalar_cmp(abs(p.x), self.w) <= 0 and sign(p.y) >= 0
                and scalar_cmp(p.y, self.h) <= 0)

    def may_meet(self, a, b) -> bool:
        # Liang-Barsky clipping against the inflated box
        (ax, ay), (bx, by) = a, b
        dx, dy = bx - ax, by - ay
        t0, t1 = 0.0, 1.0
        for q, r in ((-dx, ax + self.wf), (dx, self.wf - ax), (-dy, ay + _EPS), (dy, self.hf - ay)):
            if q == 0:
                if r < 0:
                    return False
                continue
            t = r / q
            if q < 0:
                t0 = max(t0, t)
            else:
                t1 = min(t1, t)
            if t0 > t1:
                return False
        return True


def _strict_left(u: Vec, uf, p: Vec, pf) -> bool:
    """``cross(u, p) > 0``, decided in floats when safely away from zero."""
    c = uf[0] * pf[1] - uf[1] * pf[0]
    scale = (abs(uf[0]) + abs(uf[1])) * (abs(pf[0]) + abs(pf[1]))
    if abs(c) > 1e-9 * scale:
        return c > 0
    return sign(u.cross(p)) > 0


def saddle_connections(X: TranslationSurface, L, *, bound_squared: bool = False) -> list[SaddleConnection]:
    r"""
    All saddle connections of length at most ``L`` leaving a cone point
    upwards, plus the horizontal ones in both orientations.

    The search develops triangle strips from every triangle corner, keeping
    the cone of directions still visible from the apex and pruning once the
    visible part of the crossed edge lies outside the disk of radius ``L``.
    """
    L2 = normalize(L) if bound_squared else normalize(L) * normalize(L)
    return _search(X, _Disk(L2))


def saddle_connections_in_box(X: TranslationSurface, width, height) -> list[SaddleConnection]:
    r"""Saddle connections with `|\mathrm{Re}| \le` ``width`` and `0 \le \mathrm{Im} \le` ``height``."""
    return _search(X, _Box(normalize(width), normalize(height)))


def _search(X: TranslationSurface, region) -> list[SaddleConnection]:
    T = X.triangulate() if not isinstance(X, TriangulatedSurface) else X
    bundles = _Bundles(T)
    found: dict[tuple[int, Vec], SaddleConnection] = {}
    # exact and float offset from the first vertex of each glued edge to the opposite vertex
    jump = {}
    for s, V in enumerate(T.polygons):
        for e in range(3):
            d = V[(e + 2) % 3] - V[e]
            jump[(s, e)] = (d, d.to_floats())

    def emit(corner, u, d):
        if sign(d.y) < 0 or not region.contains(d):
            return
        b = bundles.bundle(corner, u, d)
        d = d.normalized()
        found[(b, d)] = SaddleConnection(b, d)

    for t, tri in enumerate(T.polygons):
        for j in range(3):
            A = tri[j]
            Pa, Pb = tri[(j + 1) % 3] - A, tri[(j + 2) % 3] - A
            fa, fb = Pa.to_floats(), Pb.to_floats()
            emit((t, j), Pa, Pa)  # the side leaving the corner
            # (triangle, edge to cross, its ends a -> b, window lo -> hi), each point with floats
            stack = [(t, (j + 1) % 3, Pa, fa, Pb, fb, Pa, fa, Pb, fb)]
            while stack:
                s, e, a, af, b, bf, lo, lof, hi, hif = stack.pop()
                if not region.may_meet(af, bf):
                    continue
                s2, e2 = T.partner(s, e)
                d, df = jump[(s2, e2)]
                p = b + d
                pf = (bf[0] + df[0], bf[1] + df[1])
                inside_lo = _strict_left(lo, lof, p, pf)
                inside_hi = _strict_left(p, pf, hi, hif)
                if inside_lo and inside_hi:
                    emit((t, j), Pa, p)
                    stack.append((s2, (e2 + 1) % 3, a, af, p, pf, lo, lof, p, pf))
                    stack.append((s2, (e2 + 2) % 3, p, pf, b, bf, p, pf, hi, hif))
                elif not inside_lo:
                    stack.append((s2, (e2 + 2) % 3, p, pf, b, bf, lo, lof, hi, hif))
                else:
                    stack.append((s2, (e2 + 1) % 3, a, af, p, pf, lo, lof, hi, hif))
    out = list(found.values())
    out.sort(key=cmp_to_key(_sc_cmp))
    return out


def _sc_cmp(a: SaddleConnection, b: SaddleConnection) -> int:
    if a.bundle != b.bundle:
        return -1 if a.bundle < b.bundle else 1
    c = scalar_cmp(a.height, b.height)
    if c:
        return c
    return scalar_cmp(a.width, b.width)


def systole_squared(X: TranslationSurface, Lmax) -> Scalar:
    r"""Squared length of the shortest saddle connection, as an exact scalar."""
    conns = saddle_connections(X, Lmax)
    if not conns:
        raise BoundExceeded(f"no saddle connection of length at most {Lmax}")
    best = conns[0].holonomy.norm2()
    for c in conns[1:]:
        n = c.holonomy.norm2()
        if scalar_cmp(n, best) < 0:
            best = n
    return best


def systole(X: TranslationSurface, Lmax) -> Scalar:
    """Length of the shortest saddle connection, exact when its square root stays in a quadratic field."""
    root = exact_sqrt(systole_squared(X, Lmax))
    if root is None:
        raise ValueError("systole length leaves the quadratic field; use systole_squared()")
    return root


def exact_sqrt(x) -> Scalar | None:
    r"""
    Square root of a non-negative exact scalar: any rational has one in
    some quadratic field, an irrational ``x`` only inside its own field.
    """
    from .numkernel import QuadScalar, qsqrt

    x = normalize(x)
    if isinstance(x, Fraction):
        return qsqrt(x)
    a, b, d = x.a, x.b, x.d
    # (p + q sqrt d)^2 = p^2 + d q^2 + 2 p q sqrt d
    disc = a * a - d * b * b
    if disc < 0:
        return None
    r = qsqrt(disc)
    if not isinstance(r, Fraction):
        return None
    for p2 in ((a + r) / 2, (a - r) / 2):
        if p2 <= 0:
            continue
        p = qsqrt(p2)
        if isinstance(p, Fraction):
            q = b / (2 * p)
            cand = QuadScalar(p, q, d)
            if cand * cand == x:
                return cand if cand.sign() > 0 else -cand
    return None


def teich_flow(X: TranslationSurface, t=None, *, factor=None) -> TranslationSurface:
    r"""
    `g_t X`: widths times `e^t`, heights divided by it.

    Pass ``factor`` (the exact value of `e^t`) to stay exact; a plain float
    ``t`` gives a float surface that is not re-validated.
    """
    if factor is not None:
        return X.flow(factor)
    if t is None or t == 0:
        return X
    f = math.exp(float(t))
    polys = [[Vec(float(v.x) * f, float(v.y) / f) for v in poly] for poly in X.polygons]
    return TranslationSurface(polys, X.gluing, check=False)


def is_best_approximation(X: TranslationSurface, s: SaddleConnection, connections=None) -> bool:
    r"""
    Whether no saddle connection of the same bundle and side is strictly
    lower with at most the same absolute width.

    Bundle sides are open: horizontal connections never compete.  Every
    competitor lies in the box `|\mathrm{Re}| \le |\mathrm{Re}(s)|`,
    `0 \le \mathrm{Im} \le \mathrm{Im}(s)`, which is what gets enumerated; a
    supplied list must cover that box.
    """
    if sign(s.height) <= 0:
        return False
    side = sign(s.width)
    if connections is None:
        connections = saddle_connections_in_box(X, abs(s.width), s.height)
    for v in connections:
        if v.bundle != s.bundle or sign(v.width) != side or sign(v.height) <= 0:
            continue
        if scalar_cmp(v.height, s.height) < 0 and scalar_cmp(abs(v.width), abs(s.width)) <= 0:
            return False
    return True


# vertical flow, used to cross-check interval exchanges


def locate(X: TranslationSurface, p: int, point: Vec) -> bool:
    """Whether ``point`` lies in the closed polygon ``p``."""
    poly = X.polygons[p]
    n = len(poly)
    if n == 3 or _convex(poly):
        return all(sign((poly[(i + 1) % n] - poly[i]).cross(point - poly[i])) >= 0 for i in range(n))
    raise NotImplementedError("non-convex polygons")


def _convex(poly) -> bool:
    n = len(poly)
    return all(sign((poly[(i + 1) % n] - poly[i]).cross(poly[(i + 2) % n] - poly[(i + 1) % n])) >= 0 for i in range(n))


def vertical_exit(X: TranslationSurface, p: int, point: Vec) -> tuple[int, int, Vec]:
    r"""
    Flow upward from ``point`` in the convex polygon ``p`` until the boundary;
    return the exit edge and the matching point on the glued polygon.
    """
    poly = X.polygons[p]
    n = len(poly)
    best = None
    for e in range(n):
        a, b = poly[e], poly[(e + 1) % n]
        if sign(b.x - a.x) >= 0:
            continue  # only edges running leftward are crossed when going up
        lo, hi = b.x, a.x
        if scalar_cmp(point.x, lo) < 0 or scalar_cmp(point.x, hi) > 0:
            continue
        y = a.y + (b.y - a.y) * (point.x - a.x) / (b.x - a.x)
        if scalar_cmp(y, point.y) > 0 and (best is None or scalar_cmp(y, best[1]) < 0):
            best = (e, y)
    if best is None:
        raise SurfaceError("no exit edge above the point")
    e, y = best
    a = poly[e]
    q, f = X.partner(p, e)
    Q = X.polygons[q]
    # edge e of p from a to b is edge f of q from Q[f+1] to Q[f], reversed
    shift = Q[(f + 1) % len(Q)] - a
    return q, f, Vec(normalize(point.x + shift.x), normalize(y + shift.y))


def lattice_saddle_connections(basis: tuple[Vec, Vec], L) -> list[Vec]:
    """Primitive lattice vectors of length at most ``L`` with non-negative height (brute force)."""
    u, v = basis
    L2 = normalize(L) * normalize(L)
    det = u.cross(v)
    if sign(det) == 0:
        raise ValueError("degenerate lattice")
    # bound coefficients by L / min singular value, generously
    import math as _m

    uf, vf = u.to_floats(), v.to_floats()
    smin = abs(float(det)) / max(_m.hypot(*uf), _m.hypot(*vf))
    N = int(_m.sqrt(float(L2)) / smin) + 2
    out = []
    for m in range(-N, N + 1):
        for n in range(-N, N + 1):
            if (m, n) == (0, 0) or _m.gcd(m, n) != 1:
                continue
            w = u * m + v * n
            if scalar_cmp(w.norm2(), L2) <= 0 and sign(w.y) >= 0:
                out.append(w.normalized())
    return out
