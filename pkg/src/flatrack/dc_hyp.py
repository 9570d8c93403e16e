r"""
Quadrangulations of surfaces in hyperelliptic components and staircase moves.

A quadrangulation is a pair of permutations `(\pi_\ell, \pi_r)` of `[k]` with
one wedge `(w_{i,\ell}, w_{i,r})` per quadrilateral.  The top-left side of
`q_i` is the bottom-right side of `q_{\pi_\ell(i)}` and the top-right side of
`q_i` is the bottom-left side of `q_{\pi_r(i)}`, which gives the train-track
relations

.. MATH::

    w_{i,\ell} + w_{\pi_\ell(i),r} = w_{i,r} + w_{\pi_r(i),\ell} = w_{i,d}.

Indices are 0-based internally and 1-based in JSON and in printed cycles.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from . import perm as P
from .iet import IETDatum, KeaneViolation, PermPair
from .numkernel import IntMatrix, Scalar, Vec, normalize, sign, vec

LEFT = "l"
RIGHT = "r"


class QuadrangulationError(ValueError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class NotWellSlanted(ValueError):
    pass


class NoWellSlantedStaircase(RuntimeError):
    """No staircase can move: the surface is outside the hyperelliptic components."""


class NotHyperelliptic(ValueError):
    pass


@dataclass(frozen=True)
class Cycle:
    r"""
    A cycle of `\pi_\ell` (``side="l"``) or `\pi_r` (``side="r"``), stored in
    cycle order starting at its least element.
    """

    side: str
    support: tuple[int, ...]

    @classmethod
    def make(cls, side: str, support: Sequence[int]) -> "Cycle":
        support = tuple(support)
        j = support.index(min(support))
        return cls(side, support[j:] + support[:j])

    def word(self, k: int) -> str:
        """Word notation, e.g. ``r·r`` for the right cycle through 1 and 3."""
        return "".join(self.side if i in self.support else "·" for i in range(k))

    def __str__(self):
        return self.side + "(" + " ".join(str(i + 1) for i in self.support) + ")"

    def relabel(self, s: P.Perm) -> "Cycle":
        return Cycle.make(self.side, [s[i] for i in self.support])


@dataclass(frozen=True)
class Quadrangulation:
    pl: tuple[int, ...]
    pr: tuple[int, ...]
    wl: tuple[Vec, ...]
    wr: tuple[Vec, ...]

    @property
    def k(self) -> int:
        return len(self.pl)

    @property
    def pi(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (self.pl, self.pr)

    @classmethod
    def from_data(cls, pl, pr, lam: Sequence[Sequence], tau: Sequence[Sequence]) -> "Quadrangulation":
        r"""Build from widths ``lam[i] = (λ_ℓ, λ_r)`` and heights ``tau[i]``."""
        wl = tuple(vec(l[0], t[0]) for l, t in zip(lam, tau))
        wr = tuple(vec(l[1], t[1]) for l, t in zip(lam, tau))
        return cls(tuple(pl), tuple(pr), wl, wr)

    def diagonal(self, i: int) -> Vec:
        return self.wl[i] + self.wr[self.pl[i]]

    def wedge(self, i: int) -> tuple[Vec, Vec]:
        return self.wl[i], self.wr[i]

    def vector(self) -> list[Vec]:
        """Data in the wedge-alphabet order (1,ℓ),(1,r),…"""
        out = []
        for i in range(self.k):
            out.extend((self.wl[i], self.wr[i]))
        return out

    def with_vector(self, pl, pr, v: Sequence[Vec]) -> "Quadrangulation":
        return Quadrangulation(tuple(pl), tuple(pr), tuple(x.normalized() for x in v[0::2]), tuple(x.normalized() for x in v[1::2]))

    def area(self) -> Scalar:
        return sum((self.wr[i].cross(self.diagonal(i)) + self.diagonal(i).cross(self.wl[i])) for i in range(self.k)) / 2

    def relabel(self, s: P.Perm) -> "Quadrangulation":
        r"""The relabeling `s \star Q`: quadrilateral `i` becomes `s(i)`."""
        inv = P.inverse(s)
        return Quadrangulation(
            P.conjugate(s, self.pl), P.conjugate(s, self.pr),
            tuple(self.wl[inv[j]] for j in range(self.k)), tuple(self.wr[inv[j]] for j in range(self.k)),
        )

    def flow(self, factor) -> "Quadrangulation":
        r"""`g_t` with `e^t` = ``factor``: widths times `e^t`, heights over it."""
        f = normalize(factor)
        sc = lambda w: Vec(normalize(w.x * f), normalize(w.y / f))
        return Quadrangulation(self.pl, self.pr, tuple(map(sc, self.wl)), tuple(map(sc, self.wr)))

    def cycles(self) -> list[Cycle]:
        out = [Cycle.make(LEFT, c) for c in P.cycles(self.pl)]
        out += [Cycle.make(RIGHT, c) for c in P.cycles(self.pr)]
        return out

    def __str__(self):
        lines = [f"pi_l = {P.format_cycles(self.pl)}, pi_r = {P.format_cycles(self.pr)}"]
        for i in range(self.k):
            lines.append(f"  w{i + 1}: l = {self.wl[i]}, r = {self.wr[i]}")
        return "\n".join(lines)


def validate_quadrangulation(Q: Quadrangulation) -> None:
    """Exact check of wedge signs and train-tracks; raises on failure."""
    for name, p in (("pi_l", Q.pl), ("pi_r", Q.pr)):
        if sorted(p) != list(range(Q.k)):
            raise QuadrangulationError(f"{name} is not a permutation of 1..{Q.k}")
    if len(Q.wl) != Q.k or len(Q.wr) != Q.k:
        raise QuadrangulationError("one wedge per quadrilateral is required")
    for i in range(Q.k):
        wl, wr = Q.wl[i], Q.wr[i]
        if not (sign(wl.x) < 0 and sign(wl.y) > 0):
            raise QuadrangulationError(f"w_{i + 1},l = {wl} is not in the open upper-left quadrant", i)
        if not (sign(wr.x) > 0 and sign(wr.y) > 0):
            raise QuadrangulationError(f"w_{i + 1},r = {wr} is not in the open upper-right quadrant", i)
    for i in range(Q.k):
        if Q.wl[i] + Q.wr[Q.pl[i]] != Q.wr[i] + Q.wl[Q.pr[i]]:
            raise QuadrangulationError(f"train-track relation fails at i = {i + 1}", i)


def is_valid(Q: Quadrangulation) -> bool:
    try:
        validate_quadrangulation(Q)
    except QuadrangulationError:
        return False
    return True


def forward_diagonal(Q: Quadrangulation, i: int) -> Vec:
    return Q.diagonal(i)


def _check_cycle(pi, c: Cycle) -> None:
    p = pi[0] if c.side == LEFT else pi[1]
    if not P.is_cycle_of(p, c.support):
        raise ValueError(f"{c} is not a cycle of pi_{c.side}")


def well_slanted(Q: Quadrangulation, c: Cycle) -> bool:
    r"""
    A right staircase moves when all its diagonals lean left, a left
    staircase when all lean right.
    """
    _check_cycle(Q.pi, c)
    want = -1 if c.side == RIGHT else 1
    for i in c.support:
        s = sign(Q.diagonal(i).x)
        if s == 0:
            raise KeaneViolation(f"vertical diagonal in quadrilateral {i + 1}")
        if s != want:
            return False
    return True


def move_pi(pi, c: Cycle):
    r"""`c \cdot \pi`."""
    pl, pr = pi
    if c.side == RIGHT:
        pl = tuple(pl[pr[i]] if i in c.support else pl[i] for i in range(len(pl)))
    else:
        pr = tuple(pr[pl[i]] if i in c.support else pr[i] for i in range(len(pr)))
    return pl, pr


def staircase_matrix(pi, c: Cycle) -> IntMatrix:
    r"""
    Right cycle: `I + \sum_{i \in c} E_{(i,\ell),(\pi_\ell(i),r)}`; left
    cycle: `I + \sum_{i \in c} E_{(i,r),(\pi_r(i),\ell)}`.
    """
    _check_cycle(pi, c)
    pl, pr = pi
    n = 2 * len(pl)
    rows = [[int(a == b) for b in range(n)] for a in range(n)]
    for i in c.support:
        if c.side == RIGHT:
            rows[2 * i][2 * pl[i] + 1] += 1
        else:
            rows[2 * i + 1][2 * pr[i]] += 1
    return IntMatrix(rows)


def staircase_move(Q: Quadrangulation, c: Cycle) -> Quadrangulation:
    r"""
    Diagonal change in every quadrilateral of a well-slanted staircase; each
    one keeps its wedge side opposite to the lean and trades the other for the
    diagonal.
    """
    if not well_slanted(Q, c):
        raise NotWellSlanted(f"staircase {c} is not well-slanted")
    pl, pr = move_pi(Q.pi, c)
    wl, wr = list(Q.wl), list(Q.wr)
    for i in c.support:
        d = Q.diagonal(i).normalized()
        if c.side == RIGHT:
            wl[i] = d
        else:
            wr[i] = d
    return Quadrangulation(pl, pr, tuple(wl), tuple(wr))


def rotation(Q: Quadrangulation) -> Quadrangulation:
    r"""
    Quarter turn: `\pi'_r = \pi_\ell^{-1}`, `\pi'_\ell = \pi_\ell \pi_r
    \pi_\ell^{-1}`, `w'_{i,\ell} = i w_{i,r}` and `w'_{i,r} = -i w_{j,\ell}`
    with `j = \pi_\ell^{-1}(i)`.
    """
    pli = P.inverse(Q.pl)
    pl2 = P.compose(Q.pl, Q.pr, pli)
    pr2 = pli
    wl = tuple(Q.wr[i].rot90() for i in range(Q.k))
    wr = tuple(-(Q.wl[pli[i]].rot90()) for i in range(Q.k))
    return Quadrangulation(pl2, pr2, wl, wr)


def rotation_inverse(Q: Quadrangulation) -> Quadrangulation:
    pl = P.inverse(Q.pr)
    pr = P.compose(Q.pr, Q.pl, P.inverse(Q.pr))
    wr = tuple(-(Q.wl[i].rot90()) for i in range(Q.k))
    wl = tuple(Q.wr[pl[j]].rot90() for j in range(Q.k))
    return Quadrangulation(pl, pr, wl, wr)


def rotated_cycle(pi, c: Cycle) -> Cycle:
    r"""
    The cycle of `R(\pi)` matching ``c``: a left cycle `c` becomes the right
    cycle `c^{-1}`, a right cycle becomes the left cycle `\pi_\ell(c)`.
    """
    pl = pi[0]
    if c.side == LEFT:
        return Cycle.make(RIGHT, tuple(reversed(c.support)))
    return Cycle.make(LEFT, tuple(pl[i] for i in c.support))


def rotate_pi(pi):
    pl, pr = pi
    pli = P.inverse(pl)
    return P.compose(pl, pr, pli), pli


def backward_allowed(Q: Quadrangulation, c: Cycle) -> bool:
    r"""
    Whether ``Q`` is the image of a staircase move along ``c``: the rotated
    staircase must be well-slanted (the dual slant condition on heights).
    """
    _check_cycle(Q.pi, c)
    try:
        return well_slanted(rotation(Q), rotated_cycle(Q.pi, c))
    except KeaneViolation:
        return False


def backward_staircase_move(Q: Quadrangulation, c: Cycle) -> Quadrangulation:
    r"""
    Inverse of :func:`staircase_move`, as the conjugate of a forward move by
    the rotation operator.
    """
    if not backward_allowed(Q, c):
        raise NotWellSlanted(f"{c} fails the dual slant condition")
    R = rotation(Q)
    return rotation_inverse(staircase_move(R, rotated_cycle(Q.pi, c)))


# width intervals and algorithms


def width_intervals(Q: Quadrangulation, i: int):
    r"""
    `I(q_i) = [\lambda_{i,\ell}, \lambda_{i,r}]` and the interval `I'(q_i)`
    left after a diagonal change, with their lengths.
    """
    l, r = Q.wl[i].x, Q.wr[i].x
    d = Q.diagonal(i).x
    s = sign(d)
    if s == 0:
        raise KeaneViolation(f"vertical diagonal in quadrilateral {i + 1}")
    I = (l, r)
    I2 = (l, d) if s > 0 else (d, r)
    return I, I2, normalize(r - l), normalize(I2[1] - I2[0])


def well_slanted_cycles(Q: Quadrangulation) -> list[Cycle]:
    return [c for c in sorted(Q.cycles(), key=lambda c: (c.support, c.side)) if well_slanted(Q, c)]


class Step(NamedTuple):
    quadrangulation: Quadrangulation
    moves: tuple[Cycle, ...]


def run_algorithm(Q: Quadrangulation, policy: str = "greedy", steps: int = 10) -> list[Step]:
    r"""
    Run the greedy or left/right algorithm for ``steps`` steps.

    Each trace entry holds the moves of one step and the quadrangulation
    reached after them.  Greedy moves every well-slanted staircase (they are
    disjoint, so the order is immaterial).  Left/right moves the left
    staircases on even steps and the right ones on odd steps, each as many
    times in a row as it stays well-slanted.
    """
    validate_quadrangulation(Q)
    trace: list[Step] = []
    for n in range(steps):
        cycles = well_slanted_cycles(Q)
        if not cycles:
            raise NoWellSlantedStaircase("no well-slanted staircase: the surface is not in a hyperelliptic component")
        moves: list[Cycle] = []
        if policy == "greedy":
            for c in cycles:
                Q = staircase_move(Q, c)
                moves.append(c)
        elif policy == "left_right":
            side = LEFT if n % 2 == 0 else RIGHT
            for c in [c for c in cycles if c.side == side]:
                while well_slanted(Q, c):
                    Q = staircase_move(Q, c)
                    moves.append(c)
        else:
            raise ValueError(f"unknown policy {policy!r}")
        trace.append(Step(Q, tuple(moves)))
    return trace


# DC graphs, involutions, labeling


def involution_candidates(pi) -> list[P.Perm]:
    r"""
    Involutions `s` with `s \pi_\ell s = \pi_\ell^{-1}`, `s \pi_r s = \pi_r^{-1}`
    whose tree of relations is a tree.
    """
    pl, pr = pi
    k = len(pl)
    pli, pri = P.inverse(pl), P.inverse(pr)
    out = []
    for s in _involutions(k):
        if P.compose(s, pl, s) == pli and P.compose(s, pr, s) == pri and _is_tree(k, (P.compose(pr, s), P.compose(pl, s), s)):
            out.append(s)
    return out


def _involutions(k: int) -> Iterable[P.Perm]:
    def rec(rest, acc):
        if not rest:
            yield tuple(acc)
            return
        i = rest[0]
        acc[i] = i
        yield from rec(rest[1:], acc)
        for j in rest[1:]:
            acc[i], acc[j] = j, i
            yield from rec([x for x in rest[1:] if x != j], acc)
            acc[j] = j
        acc[i] = i

    yield from rec(list(range(k)), list(range(k)))


def _is_tree(k: int, sigmas) -> bool:
    edges = set()
    for s in sigmas:
        for i in range(k):
            if s[i] > i:
                edges.add((i, s[i], id(s)))
    if len(edges) != k - 1:
        return False
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b, _ in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


@dataclass(frozen=True)
class TreeOfRelations:
    sigma_l: P.Perm
    sigma_r: P.Perm
    sigma_d: P.Perm


def tree_of_relations(Q: Quadrangulation) -> TreeOfRelations:
    r"""
    Tree of relations from the geometric involution: `\sigma_d` pairs
    quadrilaterals exchanged by the hyperelliptic involution (equal diagonals,
    matching wedge sides), `\sigma_r = \pi_\ell \sigma_d` and
    `\sigma_\ell = \pi_r \sigma_d`.
    """
    for s in involution_candidates(Q.pi):
        sr, sl = P.compose(Q.pl, s), P.compose(Q.pr, s)
        if all(Q.diagonal(i) == Q.diagonal(s[i]) and Q.wl[i] == Q.wl[sl[i]] and Q.wr[i] == Q.wr[sr[i]] for i in range(Q.k)):
            return TreeOfRelations(sl, sr, s)
    raise NotHyperelliptic("no involution pairs the quadrilaterals consistently")


def tree_from_pi(pi) -> TreeOfRelations:
    cands = involution_candidates(pi)
    if not cands:
        raise NotHyperelliptic("combinatorial datum admits no tree of relations")
    s = cands[0]
    return TreeOfRelations(P.compose(pi[1], s), P.compose(pi[0], s), s)


def pi_from_tree(t: TreeOfRelations):
    r"""`\pi_\ell = \sigma_r \sigma_d` and `\pi_r = \sigma_\ell \sigma_d`."""
    return P.compose(t.sigma_r, t.sigma_d), P.compose(t.sigma_l, t.sigma_d)


def invariant_cycle(pi, sigma_d: P.Perm) -> P.Perm:
    r"""`\pi_r \sigma_d \pi_\ell`, literally; it varies along a DC graph."""
    return P.compose(pi[1], sigma_d, pi[0])


def staircase_invariant(pi) -> P.Perm:
    r"""
    `\pi_r \pi_\ell \sigma_d` with `\sigma_d` from the tree of relations:
    this product is the one that stays fixed under staircase moves.
    """
    return P.compose(pi[1], pi[0], tree_from_pi(pi).sigma_d)


@dataclass
class DCGraph:
    vertices: list
    edges: list  # (source, Cycle, target)

    def __len__(self):
        return len(self.vertices)

    def to_dot(self) -> str:
        index = {v: i for i, v in enumerate(self.vertices)}
        k = len(self.vertices[0][0])
        lines = ["digraph dc {"]
        for v, i in index.items():
            lines.append(f'  v{i} [label="{P.format_cycles(v[0])} / {P.format_cycles(v[1])}"];')
        for s, c, t in self.edges:
            lines.append(f'  v{index[s]} -> v{index[t]} [label="{c.word(k)}"];')
        lines.append("}")
        return "\n".join(lines)


def all_cycles(pi) -> list[Cycle]:
    return [Cycle.make(LEFT, c) for c in P.cycles(pi[0])] + [Cycle.make(RIGHT, c) for c in P.cycles(pi[1])]


def dc_graph(pi) -> DCGraph:
    """Closure of ``pi`` under staircase moves along all cycles."""
    pi = (tuple(pi[0]), tuple(pi[1]))
    tree_from_pi(pi)  # raises when not hyperelliptic
    order = [pi]
    seen = {pi}
    edges = []
    queue = deque([pi])
    while queue:
        v = queue.popleft()
        for c in all_cycles(v):
            w = move_pi(v, c)
            edges.append((v, c, w))
            if w not in seen:
                seen.add(w)
                order.append(w)
                queue.append(w)
    return DCGraph(order, edges)


def singularity_order(pi) -> list[P.Perm]:
    r"""
    Cycles of `\pi_\ell \pi_r \pi_\ell^{-1} \pi_r^{-1}`: the bundles met turning
    counterclockwise around each singularity.
    """
    pl, pr = pi
    return P.cycles(P.compose(pl, pr, P.inverse(pl), P.inverse(pr)))


def cyclical_labeling(Q: Quadrangulation, start: int = 0) -> Quadrangulation:
    r"""
    Relabel so that labels increase along `i \mapsto \sigma_d \pi_\ell^{-1}
    \pi_r^{-1}(i)`, starting with ``start``; around the singularity they then
    read `1, 3, 5, \ldots, k, 2, 4, \ldots, k-1`.
    """
    k = Q.k
    if k % 2 == 0:
        raise ValueError("cyclical labelings are only handled for odd k")
    s = tree_of_relations(Q).sigma_d
    nxt = P.compose(s, P.inverse(Q.pl), P.inverse(Q.pr))
    if not P.is_single_cycle(nxt):
        raise NotHyperelliptic("successor map is not a k-cycle")
    relabel = [0] * k
    i = start
    for j in range(k):
        relabel[i] = j
        i = nxt[i]
    return Q.relabel(tuple(relabel))


def order_around_singularity(Q: Quadrangulation, start: int = 0) -> list[int]:
    succ = P.compose(Q.pl, Q.pr, P.inverse(Q.pl), P.inverse(Q.pr))
    out = [start]
    while succ[out[-1]] != start:
        out.append(succ[out[-1]])
    return out


# bipartite IET and suspension


def _letter(i: int, side: str) -> str:
    return f"{i + 1}{side}"


def bipartite_intervals(Q: Quadrangulation) -> dict[str, tuple]:
    r"""`I_{i,\ell} = (\lambda_{i,\ell}, 0)`, `I_{i,r} = (0, \lambda_{i,r})`."""
    out = {}
    for i in range(Q.k):
        out[_letter(i, LEFT)] = (Q.wl[i].x, Fraction(0))
        out[_letter(i, RIGHT)] = (Fraction(0), Q.wr[i].x)
    return out


def bipartite_iet(Q: Quadrangulation) -> IETDatum:
    r"""
    First return of the vertical flow to the union of bottom sides.

    The bottom sides are laid out as `(1,\ell),(1,r),(2,\ell),\ldots`; a point
    on the bottom of `q_i` left of the diagonal exits through the top-left
    side, which is the bottom-right side of `q_{\pi_\ell(i)}`.
    """
    top, bot, lengths = [], [], {}
    for i in range(Q.k):
        top += [_letter(Q.pl[i], RIGHT), _letter(Q.pr[i], LEFT)]
        bot += [_letter(i, LEFT), _letter(i, RIGHT)]
        lengths[_letter(i, LEFT)] = -Q.wl[i].x
        lengths[_letter(i, RIGHT)] = Q.wr[i].x
    return IETDatum(PermPair(tuple(top), tuple(bot)), lengths)


def section_coordinate(Q: Quadrangulation, i: int, x) -> Scalar:
    """Position in the bipartite section of the point ``x`` on the bottom of ``q_i``."""
    offset = sum((Q.wr[j].x - Q.wl[j].x for j in range(i)), Fraction(0))
    return normalize(offset + x - Q.wl[i].x)


def suspension(pi, lam: Sequence[Sequence], tau: Sequence[Sequence]) -> Quadrangulation:
    """Quadrangulation with ``w = λ + iτ``; raises if the data are not a suspension."""
    Q = Quadrangulation.from_data(pi[0], pi[1], lam, tau)
    validate_quadrangulation(Q)
    return Q


# fundamental domain and first return


def f1_holds(Q: Quadrangulation) -> bool:
    return all(width_intervals(Q, i)[2] >= 1 for i in range(Q.k))


def f2_fails(Q: Quadrangulation) -> list[Cycle]:
    r"""Well-slanted staircases in which every `|I'(q)| \ge 1`."""
    return [c for c in well_slanted_cycles(Q) if all(width_intervals(Q, i)[3] >= 1 for i in c.support)]


def backward_cycles(Q: Quadrangulation) -> list[Cycle]:
    return [c for c in sorted(Q.cycles(), key=lambda c: (c.support, c.side)) if backward_allowed(Q, c)]


def canonical_quadrangulation(Q: Quadrangulation, budget: int = 10_000, order: str = "first") -> Quadrangulation:
    r"""
    The quadrangulation of the same surface satisfying (F1) and (F2).

    Backward moves first widen every quadrilateral to width at least one;
    then staircases in which (F2) fails are moved until none is left.
    ``order`` picks which failing staircase moves first (``"first"`` or
    ``"last"``); the result does not depend on it.
    """
    validate_quadrangulation(Q)
    moves = 0
    while not f1_holds(Q):
        cs = backward_cycles(Q)
        if not cs:
            raise RuntimeError("no backward move available")
        for c in cs:
            if backward_allowed(Q, c):
                Q = backward_staircase_move(Q, c)
                moves += 1
        if moves > budget:
            raise RuntimeError("move budget exceeded")
    while True:
        bad = f2_fails(Q)
        if not bad:
            return Q
        c = bad[0] if order == "first" else bad[-1]
        Q = staircase_move(Q, c)
        moves += 1
        if moves > budget:
            raise RuntimeError("move budget exceeded")


class FirstReturn(NamedTuple):
    factor: Scalar  # e^{t_0}
    t0: float
    cycle: Cycle
    quadrangulation: Quadrangulation


def hyp_first_return(Q: Quadrangulation) -> FirstReturn:
    r"""
    First return to the section for a canonical quadrangulation:
    `t_0 = -\log|I'(q_{\tilde c})|`, where `\tilde c` maximizes over
    well-slanted staircases the minimal `|I'|` inside the staircase.  The
    returned quadrangulation is `g_{t_0}` of the moved one, made canonical.
    """
    best = None
    for c in well_slanted_cycles(Q):
        m = min(width_intervals(Q, i)[3] for i in c.support)
        if best is None or m > best[0]:
            best = (m, c)
    if best is None:
        raise NoWellSlantedStaircase("no well-slanted staircase")
    width, c = best
    if not width < 1:
        raise ValueError("quadrangulation is not canonical")
    factor = normalize(1 / width)
    Q2 = canonical_quadrangulation(staircase_move(Q, c).flow(factor))
    return FirstReturn(factor, math.log(float(factor)), c, Q2)


# surfaces


def to_surface(Q: Quadrangulation):
    r"""
    The translation surface glued from the quadrilaterals, each drawn as
    `B, B + w_r, B + w_d, B + w_\ell`.
    """
    from .surface import TranslationSurface

    polys = []
    gluing = []
    zero = Vec(Fraction(0), Fraction(0))
    for i in range(Q.k):
        polys.append([zero, Q.wr[i], Q.diagonal(i), Q.wl[i]])
    for i in range(Q.k):
        gluing.append(((i, 2), (Q.pl[i], 0)))
        gluing.append(((i, 1), (Q.pr[i], 3)))
    return TranslationSurface(polys, gluing)


# JSON


def quad_to_json(Q: Quadrangulation) -> dict:
    from .numkernel import vec_to_json

    return {
        "k": Q.k,
        "pi_l": P.to_images(Q.pl),
        "pi_r": P.to_images(Q.pr),
        "wedges": [{"l": vec_to_json(Q.wl[i]), "r": vec_to_json(Q.wr[i])} for i in range(Q.k)],
    }


def quad_from_json(obj) -> Quadrangulation:
    from .numkernel import vec_from_json

    pl, pr = P.from_images(obj["pi_l"]), P.from_images(obj["pi_r"])
    wl = tuple(vec_from_json(w["l"]) for w in obj["wedges"])
    wr = tuple(vec_from_json(w["r"]) for w in obj["wedges"])
    if "k" in obj and obj["k"] != len(pl):
        raise ValueError("k does not match the permutations")
    return Quadrangulation(pl, pr, wl, wr)


def cycle_from_text(text: str, pi) -> Cycle:
    r"""
    Parse ``r(1 3)`` or a word such as ``r·r`` / ``r.r``.
    """
    text = text.strip()
    k = len(pi[0])
    if text[:1] in (LEFT, RIGHT) and text[1:2] == "(":
        side = text[0]
        c = Cycle.make(side, [int(t) - 1 for t in text[2:-1].replace(",", " ").split()])
    else:
        word = text.replace("·", ".")
        if len(word) != k:
            raise ValueError(f"bad cycle word {text!r}")
        sides = {ch for ch in word if ch != "."}
        if len(sides) != 1:
            raise ValueError(f"bad cycle word {text!r}")
        side = sides.pop()
        support = [i for i, ch in enumerate(word) if ch == side]
        p = pi[0] if side == LEFT else pi[1]
        cyc = next((c for c in P.cycles(p) if set(c) == set(support)), None)
        if cyc is None:
            raise ValueError(f"{text!r} is not a cycle of pi_{side}")
        c = Cycle.make(side, cyc)
    _check_cycle(pi, c)
    return c
