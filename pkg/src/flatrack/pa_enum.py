r"""
Pseudo-Anosov classes in hyperelliptic components with an odd number of
quadrilaterals, enumerated as positive loops in the unlabeled DC graph.

Relabeling by `s` acts on combinatorial data by `s \star \pi = (s \pi_\ell
s^{-1}, s \pi_r s^{-1})` and on the wedge vector by the block permutation
matrix `\Pi_s`, which sends the block of quadrilateral `i` to block `s(i)`.
For odd `k` this action is free on a DC graph, so loops in the quotient lift
uniquely once a starting vertex is fixed.  A lifted loop is stored as a start
vertex, the cycles moved along, and the closing relabeling `s` that carries the
end vertex back to the start.

The invariant quadrangulation of a positive loop comes from Perron-Frobenius
data of `M = \Pi_s A_\gamma`: heights are the PF eigenvector of `M` and widths
the sign-twisted PF eigenvector of `J M^{-1} J`.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath

from . import perm as P
from .dc_hyp import (
    LEFT, RIGHT, Cycle, NotWellSlanted, Quadrangulation, all_cycles, cycle_from_text, dc_graph,
    move_pi, pi_from_tree, staircase_matrix, staircase_move, TreeOfRelations,
)
from .numkernel import (
    ExactPF, IntMatrix, PFData, Scalar, format_scalar, mat_is_primitive, normalize, pf_exact, pf_leading,
)


class EvenK(ValueError):
    pass


class LiftError(ValueError):
    pass


class ClosureFailure(ArithmeticError):
    pass


class BudgetExceeded(RuntimeError):
    pass


Pi = tuple[tuple[int, ...], tuple[int, ...]]


def act(s: P.Perm, pi) -> Pi:
    r"""`s \star \pi`."""
    return P.conjugate(s, tuple(pi[0])), P.conjugate(s, tuple(pi[1]))


def relabel_matrix(s: P.Perm) -> IntMatrix:
    r"""`\Pi_s`: block `i` of a wedge vector moves to block `s(i)`."""
    n = 2 * len(s)
    rows = [[0] * n for _ in range(n)]
    for i, j in enumerate(s):
        rows[2 * j][2 * i] = 1
        rows[2 * j + 1][2 * i + 1] = 1
    return IntMatrix(rows)


def sign_matrix(k: int) -> IntMatrix:
    """``J = diag(-1, 1, -1, 1, …)``, negating the left entries."""
    return IntMatrix([[(-1 if a % 2 == 0 else 1) if a == b else 0 for b in range(2 * k)] for a in range(2 * k)])


def hyperelliptic_seed(k: int) -> Pi:
    r"""
    A combinatorial datum in the hyperelliptic component with ``k``
    quadrilaterals, built from a path-shaped tree of relations whose edges
    cycle through the three involutions.
    """
    if k < 1:
        raise ValueError("k must be positive")
    inv = {c: list(range(k)) for c in "drl"}
    for j in range(k - 1):
        c = "drl"[j % 3]
        inv[c][j], inv[c][j + 1] = j + 1, j
    return pi_from_tree(TreeOfRelations(tuple(inv["l"]), tuple(inv["r"]), tuple(inv["d"])))


# the unlabeled graph


@dataclass
class UnlabeledDCGraph:
    r"""
    Quotient of a DC graph by relabeling.  ``symmetries`` are the relabelings
    preserving the labeled graph; ``projection`` sends each labeled vertex to
    the least member of its orbit.
    """

    labeled: list[Pi]
    symmetries: list[P.Perm]
    projection: dict
    vertices: list[Pi]
    edges: list  # (source, Cycle at the source representative, target)

    @property
    def k(self) -> int:
        return len(self.labeled[0][0])

    @property
    def degree(self) -> int:
        return len(self.symmetries)

    def fiber(self, v: Pi) -> list[Pi]:
        return [u for u in self.labeled if self.projection[u] == v]

    def normalizer(self, pi) -> P.Perm:
        """The symmetry carrying ``pi`` to its representative."""
        pi = (tuple(pi[0]), tuple(pi[1]))
        rep = self.projection[pi]
        for s in self.symmetries:
            if act(s, pi) == rep:
                return s
        raise LiftError("no symmetry reaches the representative")

    def out_edges(self, v: Pi) -> list:
        return [e for e in self.edges if e[0] == v]


def unlabeled_graph(pi, *, check_odd: bool = True) -> UnlabeledDCGraph:
    r"""
    The quotient of the DC graph of ``pi`` by relabeling.

    A relabeling that sends one vertex into the graph sends the whole graph
    onto itself, so the symmetries form a group acting on every fiber.
    """
    k = len(pi[0])
    if check_odd and k % 2 == 0:
        raise EvenK("the unlabeled graph is only a covering quotient for odd k")
    g = dc_graph(pi)
    verts = set(g.vertices)
    start = g.vertices[0]
    syms = [s for s in P.all_perms(k) if act(s, start) in verts]
    proj = {v: min(act(s, v) for s in syms) for v in g.vertices}
    reps = sorted(set(proj.values()))
    edges = [(v, c, proj[move_pi(v, c)]) for v in reps for c in all_cycles(v)]
    return UnlabeledDCGraph(list(g.vertices), syms, proj, reps, edges)


# lifted loops


@dataclass(frozen=True)
class LiftedLoop:
    r"""
    A path ``cycles`` from ``start`` in the labeled graph together with the
    relabeling ``sigma`` taking its end vertex back to ``start``.
    """

    start: Pi
    cycles: tuple[Cycle, ...]
    sigma: P.Perm

    @property
    def k(self) -> int:
        return len(self.start[0])

    def __len__(self):
        return len(self.cycles)

    def vertices(self) -> list[Pi]:
        out = [self.start]
        for c in self.cycles:
            out.append(move_pi(out[-1], c))
        return out

    def end(self) -> Pi:
        return self.vertices()[-1]

    def is_genuine(self) -> bool:
        return self.sigma == P.identity(self.k)

    def key(self) -> tuple:
        return (self.start, tuple((c.side, c.support) for c in self.cycles), self.sigma)

    def word(self) -> str:
        return " ".join(c.word(self.k) for c in self.cycles)

    def relabel(self, s: P.Perm) -> "LiftedLoop":
        return LiftedLoop(act(s, self.start), tuple(c.relabel(s) for c in self.cycles), P.conjugate(s, self.sigma))

    def __str__(self):
        return f"{self.word()} ; sigma = {P.format_cycles(self.sigma)}"


def lift_loop(graph: UnlabeledDCGraph, edges: Sequence, start) -> LiftedLoop:
    r"""
    Lift a loop presentation in the quotient, given as a sequence of
    ``(source, cycle)`` pairs at representatives, starting at the labeled
    vertex ``start``.
    """
    start = (tuple(start[0]), tuple(start[1]))
    if not edges:
        return LiftedLoop(start, (), P.identity(len(start[0])))
    if graph.projection.get(start) != edges[0][0]:
        raise LiftError("start vertex does not project to the first edge's source")
    cur, cycles = start, []
    for src, c in edges:
        s = graph.normalizer(cur)
        if act(s, cur) != src:
            raise LiftError("presentation is not a path in the quotient")
        lifted = c.relabel(P.inverse(s))
        cycles.append(lifted)
        cur = move_pi(cur, lifted)
    if graph.projection[cur] != graph.projection[start]:
        raise LiftError("presentation does not close up in the quotient")
    sigma = next(s for s in graph.symmetries if act(s, cur) == start)
    return LiftedLoop(start, tuple(cycles), sigma)


def project_loop(graph: UnlabeledDCGraph, loop: LiftedLoop) -> list:
    """The quotient presentation of a lifted loop."""
    out = []
    for v, c in zip(loop.vertices(), loop.cycles):
        s = graph.normalizer(v)
        out.append((act(s, v), c.relabel(s)))
    return out


def genuine_loop(loop: LiftedLoop) -> LiftedLoop:
    r"""
    Concatenate the lifts `\gamma, s^{-1}\star\gamma, s^{-2}\star\gamma, …`
    until the path closes in the labeled graph.
    """
    n = P.order(loop.sigma)
    cycles = []
    t = P.identity(loop.k)
    tinv = P.inverse(loop.sigma)
    for _ in range(n):
        cycles.extend(c.relabel(t) for c in loop.cycles)
        t = P.compose(tinv, t)
    out = LiftedLoop(loop.start, tuple(cycles), P.identity(loop.k))
    if out.end() != loop.start:
        raise LiftError("concatenated lift does not close")
    return out


def parse_loop(text: str, start) -> LiftedLoop:
    r"""
    A lifted loop from space-separated cycle words (``"r·· ·l·"``) read from
    the labeled vertex ``start``; the closing relabeling is found among all
    permutations.
    """
    start = (tuple(start[0]), tuple(start[1]))
    cur, cycles = start, []
    for tok in text.split():
        c = cycle_from_text(tok, cur)
        cycles.append(c)
        cur = move_pi(cur, c)
    k = len(start[0])
    sigma = next((s for s in P.all_perms(k) if act(s, cur) == start), None)
    if sigma is None:
        raise LiftError("path does not close up to relabeling")
    return LiftedLoop(start, tuple(cycles), sigma)


# matrices


def path_matrix(loop: LiftedLoop) -> IntMatrix:
    r"""`A_\gamma = A_{n-1} \cdots A_0`, so that wedge vectors move by left multiplication."""
    m = IntMatrix.identity(2 * loop.k)
    for v, c in zip(loop.vertices(), loop.cycles):
        m = staircase_matrix(v, c) @ m
    return m


def dagger(loop: LiftedLoop) -> IntMatrix:
    r"""`A_\gamma^\dagger = A_0 \cdots A_{n-1}`, the product in reversed order."""
    m = IntMatrix.identity(2 * loop.k)
    for v, c in zip(loop.vertices(), loop.cycles):
        m = m @ staircase_matrix(v, c)
    return m


def loop_matrix(loop: LiftedLoop) -> IntMatrix:
    r"""`\Pi_s A_\gamma`."""
    return relabel_matrix(loop.sigma) @ path_matrix(loop)


def dual_matrix(loop: LiftedLoop) -> IntMatrix:
    r"""`A_\gamma^\dagger \Pi_s^{-1}`, equal to `J (\Pi_s A_\gamma)^{-1} J`."""
    return dagger(loop) @ relabel_matrix(P.inverse(loop.sigma))


def check_sign_conjugation(loop: LiftedLoop) -> bool:
    r"""`A_\gamma^\dagger = J A_\gamma^{-1} J`, exactly."""
    j = sign_matrix(loop.k)
    return dagger(loop) == j @ path_matrix(loop).inverse() @ j


def is_positive(loop: LiftedLoop) -> bool:
    return mat_is_primitive(loop_matrix(loop))


# canonical forms


def _rotate(graph: UnlabeledDCGraph, loop: LiftedLoop) -> LiftedLoop:
    if len(loop) < 2:
        return loop
    first, rest = loop.cycles[0], loop.cycles[1:]
    moved = LiftedLoop(move_pi(loop.start, first), rest + (first.relabel(P.inverse(loop.sigma)),), loop.sigma)
    return moved.relabel(graph.normalizer(moved.start))


def _swap(loop: LiftedLoop, j: int) -> LiftedLoop | None:
    a, b = loop.cycles[j], loop.cycles[j + 1]
    if set(a.support) & set(b.support):
        return None
    v = loop.vertices()[j]
    p = {LEFT: v[0], RIGHT: v[1]}
    if not P.is_cycle_of(p[b.side], b.support):
        return None
    cycles = loop.cycles[:j] + (b, a) + loop.cycles[j + 2:]
    return LiftedLoop(loop.start, cycles, loop.sigma)


def equivalent_presentations(graph: UnlabeledDCGraph, loop: LiftedLoop, limit: int = 100_000) -> list[LiftedLoop]:
    r"""
    All lifts from representatives reachable by cyclic reordering and by
    swapping adjacent moves along disjoint staircases.
    """
    loop = loop.relabel(graph.normalizer(loop.start))
    seen = {loop.key(): loop}
    queue = deque([loop])
    while queue:
        cur = queue.popleft()
        nbrs = [_rotate(graph, cur)] + [_swap(cur, j) for j in range(len(cur) - 1)]
        for nb in nbrs:
            if nb is not None and nb.key() not in seen:
                if len(seen) >= limit:
                    raise BudgetExceeded("too many equivalent presentations")
                seen[nb.key()] = nb
                queue.append(nb)
    return list(seen.values())


def loop_canonical_form(graph: UnlabeledDCGraph, loop: LiftedLoop) -> LiftedLoop:
    """Least presentation, by key, over the equivalence class."""
    return min(equivalent_presentations(graph, loop), key=LiftedLoop.key)


def _periodic(word: list) -> bool:
    n = len(word)
    return any(n % d == 0 and word == word[:d] * (n // d) for d in range(1, n))


def is_power(graph: UnlabeledDCGraph, loop: LiftedLoop) -> bool:
    """Whether some equivalent presentation repeats a shorter quotient word."""
    return any(_periodic(project_loop(graph, x)) for x in equivalent_presentations(graph, loop))


# Perron-Frobenius construction


@dataclass
class PARecord:
    r"""
    A positive loop with its invariant quadrangulation.  Exact fields are
    filled when the dilatation is quadratic; otherwise ``lam``/``tau`` hold
    high-precision floats.
    """

    loop: LiftedLoop
    matrix: IntMatrix
    charpoly: tuple[int, ...]
    pf: PFData
    dilatation: Scalar | None
    lam: tuple
    tau: tuple
    power: bool = False
    certificate: str = "exact"
    quadrangulation: Quadrangulation | None = field(default=None, repr=False)

    @property
    def t0(self) -> float:
        return math.log(float(self.dilatation)) if self.dilatation is not None else math.log(self.pf.eigenvalue)

    @property
    def dilatation_float(self) -> float:
        return float(self.dilatation) if self.dilatation is not None else self.pf.eigenvalue

    def sort_key(self):
        return (self.dilatation_float, self.loop.key())

    def to_json(self) -> dict:
        fmt = (lambda x: format_scalar(x)) if self.certificate == "exact" else (lambda x: float(x))
        return {
            "loop": self.loop.word(),
            "start": [P.format_cycles(self.loop.start[0], fixed=True), P.format_cycles(self.loop.start[1], fixed=True)],
            "sigma": P.format_cycles(self.loop.sigma),
            "power": self.power,
            "charpoly": list(self.charpoly),
            "dilatation": format_scalar(self.dilatation) if self.dilatation is not None else None,
            "dilatation_interval": [float(self.pf.lower), float(self.pf.upper)],
            "t0": self.t0,
            "lambda": [fmt(x) for x in self.lam],
            "tau": [fmt(x) for x in self.tau],
            "certificate": self.certificate,
        }


@lru_cache(maxsize=4096)
def _pf_cached(m: IntMatrix) -> tuple[PFData, ExactPF | None]:
    pf = pf_leading(m)
    return pf, pf_exact(m, pf)


def closure_holds(loop: LiftedLoop, Q0: Quadrangulation, factor) -> bool:
    r"""
    `s \cdot \hat m_\gamma(g_{t_0} Q_0) = Q_0` with `e^{t_0}` = ``factor``,
    run through the geometric staircase moves, which refuse to move a
    staircase that is not well-slanted.
    """
    Q = Q0.flow(factor)
    try:
        for c in loop.cycles:
            Q = staircase_move(Q, c)
    except NotWellSlanted:
        return False
    return Q.relabel(loop.sigma) == Q0


def pf_construct(loop: LiftedLoop, power: bool = False) -> PARecord:
    r"""
    Invariant quadrangulation and dilatation of a positive loop.

    The genuine loop `\gamma_0` has matrix `(\Pi_s A_\gamma)^{ord(s)}`; its
    PF eigenvalue is `e^{t_1}` and `t_0 = t_1 / ord(s)` is the log of the PF
    eigenvalue of `\Pi_s A_\gamma` itself.  Widths are normalized to unit
    1-norm and heights to unit area, which keeps quadratic data exact.
    """
    m = loop_matrix(loop)
    if not mat_is_primitive(m):
        raise ValueError("loop is not positive")
    g0 = genuine_loop(loop)
    n = P.order(loop.sigma)
    m0, d0 = path_matrix(g0), dagger(g0)
    if m0 != m ** n:
        raise ClosureFailure("genuine loop matrix differs from the power of the loop matrix")
    pf, ex = _pf_cached(m)
    pf0, ex0 = _pf_cached(m0)
    _, exd = _pf_cached(d0)
    k = loop.k
    if ex is not None and ex0 is not None and exd is not None:
        if ex.eigenvalue ** n != ex0.eigenvalue or exd.eigenvalue != ex0.eigenvalue:
            raise ClosureFailure("height and width eigenvalues disagree")
        lam = tuple(normalize(-x if a % 2 == 0 else x) for a, x in enumerate(exd.eigenvector))
        tau = ex0.eigenvector
        pairs = lambda v: [(v[2 * i], v[2 * i + 1]) for i in range(k)]
        Q = Quadrangulation.from_data(*loop.start, pairs(lam), pairs(tau))
        area = Q.area()
        tau = tuple(normalize(x / area) for x in tau)
        Q = Quadrangulation.from_data(*loop.start, pairs(lam), pairs(tau))
        if not closure_holds(loop, Q, ex.eigenvalue):
            raise ClosureFailure(f"closure certificate fails for {loop}")
        return PARecord(loop, m, pf.charpoly, pf, ex.eigenvalue, lam, tau, power, "exact", Q)
    lam, tau, mu = _float_data(m, dual_matrix(loop))
    if not _float_closure(loop, lam, tau, mu):
        raise ClosureFailure(f"closure certificate fails for {loop}")
    if not (pf.lower <= Fraction(str(mu)) <= pf.upper or abs(float(mu) - pf.eigenvalue) < 1e-12):
        raise ClosureFailure("float eigenvalue leaves the certified bracket")
    return PARecord(loop, m, pf.charpoly, pf, None, lam, tau, power, "float")


_PREC = 60
_TOL = mpmath.mpf(10) ** -40


def _pf_vector(m: IntMatrix):
    with mpmath.workdps(_PREC):
        a = mpmath.matrix([[m[i, j] for j in range(m.n)] for i in range(m.n)])
        v = mpmath.matrix([1] * m.n)
        mu = mpmath.mpf(0)
        for _ in range(10_000):
            w = a * v
            s = sum(w)
            w = w / s
            done = mpmath.norm(w - v, 1) < _TOL
            v, mu = w, s
            if done:
                break
        return [v[i] for i in range(m.n)], mu


def _float_data(m: IntMatrix, md: IntMatrix):
    tau, mu = _pf_vector(m)
    u, _ = _pf_vector(md)
    with mpmath.workdps(_PREC):  # negation outside the context would round
        lam = [(-x if a % 2 == 0 else x) for a, x in enumerate(u)]
    return tuple(lam), tuple(tau), mu


def _float_closure(loop: LiftedLoop, lam, tau, mu) -> bool:
    r"""
    The closure check on high-precision floats: each staircase must be
    well-slanted by a margin above the working tolerance.
    """
    with mpmath.workdps(_PREC):
        x = [v * mu for v in lam]
        y = [v / mu for v in tau]
        for v, c in zip(loop.vertices(), loop.cycles):
            pl = v[0]
            for i in c.support:
                d = x[2 * i] + x[2 * pl[i] + 1]
                if (d > -_TOL) if c.side == RIGHT else (d < _TOL):
                    return False
            a = staircase_matrix(v, c)
            x = [sum(a[r, s] * x[s] for s in range(len(x))) for r in range(len(x))]
            y = [sum(a[r, s] * y[s] for s in range(len(y))) for r in range(len(y))]
        inv = P.inverse(loop.sigma)
        back = lambda z: [z[2 * inv[i] + e] for i in range(loop.k) for e in (0, 1)]
        x, y = back(x), back(y)
        scale = max(abs(t) for t in lam + tau)
        return all(abs(a - b) <= _TOL * 1e10 * scale for a, b in zip(x + y, list(lam) + list(tau)))


# enumeration


def closed_walks(graph: UnlabeledDCGraph, max_len: int) -> Iterable[LiftedLoop]:
    r"""
    Lifts from representatives of every closed walk in the quotient of
    length at most ``max_len``: labeled paths from a representative that end
    in its own fiber.
    """
    for rep in graph.vertices:
        stack = [(rep, ())]
        while stack:
            cur, path = stack.pop()
            if path and graph.projection[cur] == rep:
                sigma = next(s for s in graph.symmetries if act(s, cur) == rep)
                yield LiftedLoop(rep, path, sigma)
            if len(path) < max_len:
                for c in reversed(all_cycles(cur)):
                    stack.append((move_pi(cur, c), path + (c,)))


@dataclass
class Enumeration:
    records: list[PARecord]
    max_len: int
    classes: int
    positive: int
    frontier: float | None = None  # least dilatation above the cap, if any


def enumerate_pa(k: int, max_len: int, cap: float | None = None, *, seed=None, budget: int = 2_000_000) -> Enumeration:
    r"""
    Positive loop classes of length at most ``max_len`` with their invariant
    data, sorted by dilatation and then by canonical key.  Complete only up
    to loop length; classes above ``cap`` are dropped but the least such
    dilatation is reported.
    """
    if k % 2 == 0:
        raise EvenK("enumeration covers odd k only")
    graph = unlabeled_graph(seed or hyperelliptic_seed(k))
    classes: dict[tuple, LiftedLoop] = {}
    known: set[tuple] = set()
    walks = 0
    for loop in closed_walks(graph, max_len):
        walks += 1
        if walks > budget:
            raise BudgetExceeded(f"more than {budget} closed walks")
        if loop.key() in known:
            continue
        members = equivalent_presentations(graph, loop)
        known.update(x.key() for x in members)
        canon = min(members, key=LiftedLoop.key)
        classes[canon.key()] = canon
    records, frontier, positive = [], None, 0
    for canon in classes.values():
        if not is_positive(canon):
            continue
        positive += 1
        if cap is not None:
            pf, _ = _pf_cached(loop_matrix(canon))
            if pf.eigenvalue > cap:
                frontier = pf.eigenvalue if frontier is None else min(frontier, pf.eigenvalue)
                continue
        records.append(pf_construct(canon, is_power(graph, canon)))
    records.sort(key=PARecord.sort_key)
    return Enumeration(records, max_len, len(classes), positive, frontier)
