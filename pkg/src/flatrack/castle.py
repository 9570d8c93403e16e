r"""
k-sets of castle polygons and diagonal changes in arbitrary strata.

A castle polygon is a base triangle, whose bottom vertex has one side going
up-left and one going up-right, with stack triangles piled above it.  The
stacks form a full binary tree whose leaves are the upper sides of the
polygon.  An upper side labeled `r_j` is glued to the bottom-right side of
polygon `j` and one labeled `\ell_j` to its bottom-left side.  Reading the
leaves of polygon `i` from left to right gives the train-track relation

.. MATH::

    w_{i,r} - w_{i,\ell} = \sum_{\nu} s(\nu), \qquad
    s(r_j) = w_{j,r}, \quad s(\ell_j) = -w_{j,\ell}.

Forest words print every polygon as a parenthesized tree, for instance
``(l2)(r3(r1 l3))(r2 l1)`` or ``(ℓ₂)(r₃(r₁ℓ₃))(r₂ℓ₁)``.  Indices are
1-based in text and 0-based in code.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, NamedTuple, Sequence, Union

from .dc_hyp import LEFT, RIGHT, Quadrangulation
from .iet import KeaneViolation
from .numkernel import IntMatrix, Scalar, Vec, format_scalar, normalize, sign, vec_from_json, vec_to_json
from .surface import TranslationSurface


class CastleError(ValueError):
    pass


class ForestSyntaxError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


# trees


@dataclass(frozen=True, slots=True)
class Leaf:
    side: str
    index: int

    def name(self, unicode: bool = False) -> str:
        if unicode:
            return ("ℓ" if self.side == LEFT else "r") + str(self.index + 1).translate(_TO_SUB)
        return self.side + str(self.index + 1)


@dataclass(frozen=True, slots=True)
class Node:
    left: "Tree"
    right: "Tree"


Tree = Union[Leaf, Node]
Forest = tuple  # one tree per polygon

_TO_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")
_FROM_SUB = str.maketrans("₀₁₂₃₄₅₆₇₈₉", "0123456789")
_TOKEN = re.compile(r"\s*(?:(\()|(\))|([lrℓ])([0-9₀-₉]+))")


def leaves(tree: Tree) -> list[Leaf]:
    """Leaves from left to right."""
    out = []
    stack = [tree]
    while stack:
        t = stack.pop()
        if isinstance(t, Leaf):
            out.append(t)
        else:
            stack.append(t.right)
            stack.append(t.left)
    return out


def nodes(tree: Tree) -> list[Node]:
    out = []
    stack = [tree]
    while stack:
        t = stack.pop()
        if isinstance(t, Node):
            out.append(t)
            stack.append(t.right)
            stack.append(t.left)
    return out


def _replace(tree: Tree, old: Tree, new: Tree) -> Tree:
    if tree == old:
        return new
    if isinstance(tree, Leaf):
        return tree
    left = _replace(tree.left, old, new)
    right = _replace(tree.right, old, new)
    if left is tree.left and right is tree.right:
        return tree
    return Node(left, right)


def _parent(tree: Tree, child: Tree) -> Node | None:
    for n in nodes(tree):
        if n.left == child or n.right == child:
            return n
    return None


def _locate(forest: Sequence[Tree], leaf: Leaf) -> int:
    for j, tree in enumerate(forest):
        if leaf in leaves(tree):
            return j
    raise CastleError(f"leaf {leaf.name()} is missing from the forest")


def _map_leaves(tree: Tree, f) -> Tree:
    if isinstance(tree, Leaf):
        return f(tree)
    return Node(_map_leaves(tree.left, f), _map_leaves(tree.right, f))


# forest words


def parse_forest(text: str) -> Forest:
    r"""
    Parse a forest word.  Letters are ``l``, ``ℓ`` or ``r`` followed by an
    index in ASCII or subscript digits; whitespace is ignored.

    >>> format_forest(parse_forest("(ℓ₂)(r₃(r₁ℓ₃))(r₂ℓ₁)"))
    '(l2)(r3(r1 l3))(r2 l1)'
    """
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ForestSyntaxError(f"unexpected character at {pos} in {text!r}")
        if m.group(1):
            tokens.append("(")
        elif m.group(2):
            tokens.append(")")
        else:
            side = RIGHT if m.group(3) == "r" else LEFT
            tokens.append(Leaf(side, int(m.group(4).translate(_FROM_SUB)) - 1))
        pos = m.end()

    pos = 0

    def group() -> Tree:
        nonlocal pos
        pos += 1  # "("
        items = []
        while pos < len(tokens) and tokens[pos] != ")":
            if tokens[pos] == "(":
                items.append(group())
            else:
                items.append(tokens[pos])
                pos += 1
        if pos >= len(tokens):
            raise ForestSyntaxError(f"unbalanced parentheses in {text!r}")
        pos += 1  # ")"
        if len(items) == 1:
            return items[0]
        if len(items) == 2:
            return Node(items[0], items[1])
        raise ForestSyntaxError(f"a group must hold one or two terms in {text!r}")

    forest = []
    while pos < len(tokens):
        if tokens[pos] != "(":
            raise ForestSyntaxError(f"every tree must be parenthesized in {text!r}")
        forest.append(group())
    if not forest:
        raise ForestSyntaxError("empty forest word")
    _check_labels(forest)
    return tuple(forest)


def _check_labels(forest: Sequence[Tree]) -> None:
    k = len(forest)
    seen = [leaf for tree in forest for leaf in leaves(tree)]
    expected = {Leaf(s, i) for i in range(k) for s in (LEFT, RIGHT)}
    if len(seen) != 2 * k or set(seen) != expected:
        raise CastleError("upper sides do not partition the labels r_1, l_1, ..., r_k, l_k")


def format_forest(forest: Sequence[Tree], unicode: bool = False) -> str:
    r"""Canonical forest word; ASCII words separate adjacent letters by a space."""

    def inner(t: Tree) -> str:
        if isinstance(t, Leaf):
            return t.name(unicode)
        a, b = term(t.left), term(t.right)
        sep = " " if not unicode and isinstance(t.left, Leaf) and isinstance(t.right, Leaf) else ""
        return a + sep + b

    def term(t: Tree) -> str:
        return t.name(unicode) if isinstance(t, Leaf) else "(" + inner(t) + ")"

    return "".join("(" + inner(t) + ")" for t in forest)


# castle sets


@dataclass(frozen=True)
class CastleSet:
    r"""
    Forest plus wedges `(w_{i,\ell}, w_{i,r})`; construction does not
    validate, see :func:`validate_castle`.
    """

    forest: Forest
    wl: tuple
    wr: tuple

    @classmethod
    def make(cls, forest, wedges: Sequence[tuple[Vec, Vec]]) -> "CastleSet":
        if isinstance(forest, str):
            forest = parse_forest(forest)
        wl = tuple(w[0].normalized() for w in wedges)
        wr = tuple(w[1].normalized() for w in wedges)
        return cls(tuple(forest), wl, wr)

    @property
    def k(self) -> int:
        return len(self.forest)

    @property
    def word(self) -> str:
        return format_forest(self.forest)

    def side_vector(self, leaf: Leaf) -> Vec:
        return self.wr[leaf.index] if leaf.side == RIGHT else -self.wl[leaf.index]

    def tree_sum(self, tree: Tree) -> Vec:
        ls = leaves(tree)
        total = self.side_vector(ls[0])
        for leaf in ls[1:]:
            total = total + self.side_vector(leaf)
        return total

    def is_triangle(self, i: int) -> bool:
        return isinstance(self.forest[i], Leaf)

    def vector(self) -> list[Vec]:
        """Wedges in the order `(1,\\ell), (1,r), \\ldots, (k,\\ell), (k,r)`."""
        out = []
        for a, b in zip(self.wl, self.wr):
            out += [a, b]
        return out

    def with_vector(self, w: Sequence[Vec], forest: Forest | None = None) -> "CastleSet":
        return CastleSet(
            self.forest if forest is None else tuple(forest),
            tuple(v.normalized() for v in w[0::2]),
            tuple(v.normalized() for v in w[1::2]),
        )

    def area(self) -> Scalar:
        total = Fraction(0)
        for i, tree in enumerate(self.forest):
            total += self.wr[i].cross(self.wl[i])
            for n in nodes(tree):
                a = self.tree_sum(n.left)
                total += (a + self.tree_sum(n.right)).cross(a)
        return normalize(total / 2)

    def relabel(self, sigma: Sequence[int]) -> "CastleSet":
        r"""Polygon `i` becomes polygon `\sigma(i)`, leaf labels follow."""
        k = self.k
        forest: list = [None] * k
        wl: list = [None] * k
        wr: list = [None] * k
        for i in range(k):
            forest[sigma[i]] = _map_leaves(self.forest[i], lambda lf: Leaf(lf.side, sigma[lf.index]))
            wl[sigma[i]] = self.wl[i]
            wr[sigma[i]] = self.wr[i]
        return CastleSet(tuple(forest), tuple(wl), tuple(wr))

    def __str__(self):
        ws = ", ".join(f"({self.wl[i]}, {self.wr[i]})" for i in range(self.k))
        return f"{self.word} [{ws}]"


def triangle_counts(P: CastleSet) -> tuple[int, int]:
    """Numbers of base and stack triangles."""
    return P.k, sum(len(nodes(t)) for t in P.forest)


def _pos(x) -> bool:
    return sign(x) > 0


def _neg(x) -> bool:
    return sign(x) < 0


def validate_castle(P: CastleSet) -> None:
    r"""
    Raise :class:`CastleError` unless ``P`` is a k-set of castle polygons:
    labels partition the upper sides, children sit on the right side of
    their parent, no proper set of polygons is glued only to itself, every
    base and stack triangle is nondegenerate and the train-tracks hold.
    """
    k = P.k
    if k == 0 or len(P.wl) != k or len(P.wr) != k:
        raise CastleError("forest and wedges disagree on k")
    _check_labels(P.forest)
    for i, tree in enumerate(P.forest):
        for n in nodes(tree):
            if isinstance(n.left, Leaf) and n.left.side != RIGHT:
                raise CastleError(f"{n.left.name()} ends a left edge in tree {i + 1}")
            if isinstance(n.right, Leaf) and n.right.side != LEFT:
                raise CastleError(f"{n.right.name()} ends a right edge in tree {i + 1}")
    _check_irreducible(P.forest)
    for i in range(k):
        wl, wr = P.wl[i], P.wr[i]
        if not (_neg(wl.x) and _pos(wl.y) and _pos(wr.x) and _pos(wr.y)):
            raise CastleError(f"polygon {i + 1} has no base triangle")
        if P.tree_sum(P.forest[i]) != (wr - wl).normalized():
            raise CastleError(f"train-track relation fails for polygon {i + 1}")
        for n in nodes(P.forest[i]):
            a, b = P.tree_sum(n.left), P.tree_sum(n.right)
            if not (_pos(a.x) and _pos(a.y) and _pos(b.x) and _neg(b.y)):
                raise CastleError(f"a triangle of polygon {i + 1} is neither a base nor a stack triangle")


def is_valid(P: CastleSet) -> bool:
    try:
        validate_castle(P)
    except CastleError:
        return False
    return True


def _check_irreducible(forest: Sequence[Tree]) -> None:
    # a proper subset closed under its own leaves is a connected component of
    # the tree-to-leaf-index graph
    k = len(forest)
    parent = list(range(k))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, tree in enumerate(forest):
        for leaf in leaves(tree):
            parent[find(i)] = find(leaf.index)
    if len({find(i) for i in range(k)}) > 1:
        raise CastleError("reducible: a proper set of polygons is glued only to itself")


# moves


class Choice(NamedTuple):
    r"""Polygon ``index`` and side; ``side=None`` lets the geometry decide."""

    index: int
    side: str | None = None
    forward: bool = True

    def word(self, k: int) -> str:
        return "".join(self.side if j == self.index else "·" for j in range(k))


def parse_choice(text: str, k: int, forward: bool = True) -> Choice:
    r"""``(1,r)``, ``1r`` or a word such as ``r··`` / ``r..``."""
    t = text.strip().replace("ℓ", LEFT)
    m = re.fullmatch(r"\(?\s*(\d+)\s*,?\s*([lr])\s*\)?", t)
    if m:
        i = int(m.group(1)) - 1
        if not 0 <= i < k:
            raise ValueError(f"polygon index out of range in {text!r}")
        return Choice(i, m.group(2), forward)
    word = t.replace("·", ".")
    if len(word) == k and word.count(".") == k - 1 and word.strip(".") in (LEFT, RIGHT):
        i = next(j for j, ch in enumerate(word) if ch != ".")
        return Choice(i, word[i], forward)
    raise ValueError(f"bad choice {text!r}")


def _as_choice(c) -> Choice:
    if isinstance(c, Choice):
        return c
    if isinstance(c, int):
        return Choice(c)
    return Choice(*c)


def apex(P: CastleSet, i: int) -> Vec:
    r"""Top of the forward diagonal of polygon `i`, seen from its bottom vertex."""
    tree = P.forest[i]
    if isinstance(tree, Leaf):
        raise CastleError(f"polygon {i + 1} is a triangle")
    return (P.wl[i] + P.tree_sum(tree.left)).normalized()


def forward_side(P: CastleSet, i: int) -> str:
    s = sign(apex(P, i).x)
    if s == 0:
        raise KeaneViolation(f"vertical diagonal in polygon {i + 1}")
    return LEFT if s > 0 else RIGHT


def backward_side(P: CastleSet, i: int) -> str | None:
    r"""Side of the allowed backward move at `i`, or ``None``."""
    c = sign(P.wr[i].y - P.wl[i].y)
    if c == 0:
        return None
    leaf = Leaf(RIGHT, i) if c > 0 else Leaf(LEFT, i)
    tree = P.forest[_locate(P.forest, leaf)]
    node = _parent(tree, leaf)
    if node is None:
        return None
    slope = sign(P.tree_sum(node).y)
    if c > 0 and slope > 0:
        return LEFT
    if c < 0 and slope < 0:
        return RIGHT
    return None


def allowed(P: CastleSet) -> list[int]:
    """Polygons that are not triangles."""
    return [i for i in range(P.k) if not P.is_triangle(i)]


def allowed_backward(P: CastleSet) -> list[int]:
    return [i for i in range(P.k) if backward_side(P, i) is not None]


def _sgn(leaf: Leaf) -> int:
    return 1 if leaf.side == RIGHT else -1


def _col(leaf: Leaf) -> int:
    return 2 * leaf.index + (1 if leaf.side == RIGHT else 0)


def move_matrix(forest: Forest, c) -> IntMatrix:
    r"""
    Integer matrix of a move acting on the wedge vector; it differs from the
    identity in the row of the wedge side that is replaced.
    """
    c = _as_choice(c)
    i, side = c.index, c.side
    if side not in (LEFT, RIGHT):
        raise ValueError("the move matrix needs an explicit side")
    k = len(forest)
    rows = [[int(a == b) for b in range(2 * k)] for a in range(2 * k)]
    if c.forward:
        tree = forest[i]
        if isinstance(tree, Leaf):
            raise CastleError(f"polygon {i + 1} is a triangle")
        part, row, coef = (tree.left, 2 * i, 1) if side == RIGHT else (tree.right, 2 * i + 1, -1)
    else:
        leaf = Leaf(LEFT, i) if side == RIGHT else Leaf(RIGHT, i)
        node = _parent(forest[_locate(forest, leaf)], leaf)
        if node is None:
            raise CastleError(f"{leaf.name()} is a single upper side")
        part, row, coef = (node.left, 2 * i, -1) if side == RIGHT else (node.right, 2 * i + 1, 1)
    for leaf in leaves(part):
        rows[row][_col(leaf)] += coef * _sgn(leaf)
    if rows[row][row] != 1:
        raise CastleError("the cut piece would be glued to itself")
    return IntMatrix(rows)


def _forward_forest(forest: Forest, i: int, side: str) -> Forest:
    trees = list(forest)
    X, Y = trees[i].left, trees[i].right
    if side == RIGHT:
        trees[i] = Y
        target = Leaf(LEFT, i)
        glued = Node(X, target)
    else:
        trees[i] = X
        target = Leaf(RIGHT, i)
        glued = Node(target, Y)
    j = _locate(trees, target)
    trees[j] = _replace(trees[j], target, glued)
    return tuple(trees)


def _backward_forest(forest: Forest, i: int, side: str) -> Forest:
    trees = list(forest)
    target = Leaf(LEFT, i) if side == RIGHT else Leaf(RIGHT, i)
    j = _locate(trees, target)
    node = _parent(trees[j], target)
    trees[j] = _replace(trees[j], node, target)
    trees[i] = Node(node.left, trees[i]) if side == RIGHT else Node(trees[i], node.right)
    return tuple(trees)


def forward_move(P: CastleSet, c) -> CastleSet:
    r"""
    Diagonal change in polygon ``c.index``: cut along the forward diagonal
    and glue the piece without the base triangle onto its partner side.
    """
    c = _as_choice(c)
    i = c.index
    if P.is_triangle(i):
        raise CastleError(f"polygon {i + 1} is a triangle")
    side = forward_side(P, i)
    if c.side is not None and c.side != side:
        raise CastleError(f"polygon {i + 1} takes a {side} move, not {c.side}")
    A = move_matrix(P.forest, Choice(i, side))
    return P.with_vector(A.apply(P.vector()), _forward_forest(P.forest, i, side))


def backward_move(P: CastleSet, c) -> CastleSet:
    """Inverse of the forward move that produced ``P`` at ``c.index``."""
    c = _as_choice(c)
    i = c.index
    side = backward_side(P, i)
    if side is None or (c.side is not None and c.side != side):
        raise CastleError(f"no backward move at polygon {i + 1}")
    A = move_matrix(P.forest, Choice(i, side, False))
    return P.with_vector(A.apply(P.vector()), _backward_forest(P.forest, i, side))


def apply_choices(P: CastleSet, choices: Iterable) -> list[tuple[Choice, CastleSet]]:
    """Run a sequence of forward moves; each entry records the resolved choice."""
    out = []
    for c in choices:
        c = _as_choice(c)
        side = forward_side(P, c.index) if c.side is None else c.side
        P = forward_move(P, Choice(c.index, side))
        out.append((Choice(c.index, side), P))
    return out


# widths, balance and the first return


class Widths(NamedTuple):
    interval: tuple
    after: tuple
    width: Scalar
    width_after: Scalar


def width_intervals(P: CastleSet, i: int) -> Widths:
    r"""`I = [\lambda_\ell, \lambda_r]` and the interval `I'` after a move."""
    I = (P.wl[i].x, P.wr[i].x)
    if P.is_triangle(i):
        J = I
    elif forward_side(P, i) == LEFT:
        J = (P.wl[i].x, apex(P, i).x)
    else:
        J = (apex(P, i).x, P.wr[i].x)
    return Widths(I, J, normalize(I[1] - I[0]), normalize(J[1] - J[0]))


def _wide(P: CastleSet) -> bool:
    return all(sign(width_intervals(P, i).width - 1) >= 0 for i in range(P.k))


def _bad(P: CastleSet) -> list[int]:
    return [i for i in allowed(P) if sign(width_intervals(P, i).width_after - 1) >= 0]


def is_balanced(P: CastleSet) -> bool:
    """All widths at least one and every move would leave a width below one."""
    return _wide(P) and not _bad(P)


def balance(P: CastleSet, order: str = "ascending", *, rng: random.Random | None = None, budget: int = 10_000) -> CastleSet:
    r"""
    The balanced k-set equivalent to ``P``: backward moves until every width
    is at least one, then forward moves on polygons whose move keeps that.

    ``order`` picks among admissible polygons: ``"ascending"``,
    ``"descending"`` or ``"random"`` (with ``rng``).
    """
    if order == "random":
        rng = rng or random.Random(0)

    def pick(cands: list[int]) -> int:
        if order == "ascending":
            return cands[0]
        if order == "descending":
            return cands[-1]
        if order == "random":
            return rng.choice(cands)
        raise ValueError(f"unknown order {order!r}")

    moves = 0
    while not _wide(P):
        cands = allowed_backward(P)
        if not cands:
            raise CastleError("no backward move available")
        P = backward_move(P, pick(cands))
        moves += 1
        if moves > budget:
            raise BudgetExceeded(f"no balanced set within {budget} moves")
    while bad := _bad(P):
        P = forward_move(P, pick(bad))
        moves += 1
        if moves > budget:
            raise BudgetExceeded(f"no balanced set within {budget} moves")
    return P


def teich_flow_castle(P: CastleSet, t=None, *, factor=None) -> CastleSet:
    r"""
    `g_t P`: widths times `e^t`, heights divided by it.  Pass the exact
    ``factor`` `= e^t` to stay exact; a float ``t`` gives float wedges.
    """
    if factor is None:
        if t is None or t == 0:
            return P
        f = math.exp(float(t))
        flow = lambda v: Vec(float(v.x) * f, float(v.y) / f)  # noqa: E731
        return CastleSet(P.forest, tuple(map(flow, P.wl)), tuple(map(flow, P.wr)))
    f = normalize(factor)
    if sign(f) <= 0:
        raise ValueError("the flow factor must be positive")
    flow = lambda v: Vec(normalize(v.x * f), normalize(v.y / f))  # noqa: E731
    return CastleSet(P.forest, tuple(map(flow, P.wl)), tuple(map(flow, P.wr)))


class FirstReturn(NamedTuple):
    t: float
    factor: Scalar  # e^t, exact
    moved: tuple[int, ...]
    castle: CastleSet


def in_section(P: CastleSet) -> bool:
    return is_balanced(P) and any(width_intervals(P, i).width == 1 for i in range(P.k))


def first_return(P: CastleSet) -> FirstReturn:
    r"""
    Next visit of the Teichmüller flow to the section of balanced sets with
    a polygon of width one: move every polygon whose post-move width is
    maximal, flow until those widths are one, and rebalance.
    """
    if not in_section(P):
        raise CastleError("the castle set is not balanced with a polygon of width one")
    widths = {i: width_intervals(P, i).width_after for i in allowed(P)}
    top = None
    for w in widths.values():
        if top is None or sign(w - top) > 0:
            top = w
    moved = tuple(i for i, w in widths.items() if w == top)
    for i in moved:
        P = forward_move(P, i)
    factor = normalize(1 / top)
    P = balance(teich_flow_castle(P, factor=factor))
    return FirstReturn(math.log(float(factor)), factor, moved, P)


def match_relabeling(P: CastleSet, Q: CastleSet) -> tuple[int, ...] | None:
    r"""A permutation `\sigma` with ``P.relabel(sigma) == Q``, if any."""
    if P.k != Q.k:
        return None
    k = P.k
    targets = [[j for j in range(k) if Q.wl[j] == P.wl[i] and Q.wr[j] == P.wr[i]] for i in range(k)]
    if any(not t for t in targets):
        return None
    for sigma in permutations(range(k)):
        if all(sigma[i] in targets[i] for i in range(k)) and P.relabel(sigma) == Q:
            return sigma
    return None


class ClosedOrbit(NamedTuple):
    returns: int
    period: float
    factor: Scalar  # e^period, exact
    sigma: tuple[int, ...]
    times: tuple[float, ...]


def detect_closed_orbit(P: CastleSet, max_returns: int = 20) -> ClosedOrbit | None:
    r"""
    Iterate the first return until the castle set comes back to ``P`` up to
    relabeling; ``None`` when it does not within ``max_returns``.
    """
    Q = P
    factor = Fraction(1)
    times = []
    for n in range(1, max_returns + 1):
        r = first_return(Q)
        Q = r.castle
        factor = normalize(factor * r.factor)
        times.append(r.t)
        sigma = match_relabeling(Q, P)
        if sigma is not None:
            return ClosedOrbit(n, math.log(float(factor)), factor, sigma, tuple(times))
    return None


def describe_log(x) -> str:
    r"""``log(2)/2`` style text for `\log x` with `x` or `x^2` rational."""
    x = normalize(x)
    if isinstance(x, Fraction):
        return f"log({format_scalar(x)})"
    sq = normalize(x * x)
    if isinstance(sq, Fraction):
        return f"log({format_scalar(sq)})/2"
    return f"log({format_scalar(x)})"


# conversions


def from_quadrangulation(Q: Quadrangulation) -> CastleSet:
    r"""Quadrilateral `i` is the tree `(r_{\pi_\ell(i)} \ell_{\pi_r(i)})`."""
    forest = tuple(Node(Leaf(RIGHT, Q.pl[i]), Leaf(LEFT, Q.pr[i])) for i in range(Q.k))
    return CastleSet(forest, tuple(w.normalized() for w in Q.wl), tuple(w.normalized() for w in Q.wr))


def to_quadrangulation(P: CastleSet) -> Quadrangulation | None:
    pl, pr = [], []
    for tree in P.forest:
        if not (isinstance(tree, Node) and isinstance(tree.left, Leaf) and isinstance(tree.right, Leaf)):
            return None
        pl.append(tree.left.index)
        pr.append(tree.right.index)
    return Quadrangulation(tuple(pl), tuple(pr), P.wl, P.wr)


def to_surface(P: CastleSet) -> TranslationSurface:
    r"""
    Glue the polygons: vertices run from the bottom vertex to `w_{i,r}`, then
    right to left along the upper sides to `w_{i,\ell}`.
    """
    polys = []
    slot_of: dict[Leaf, tuple[int, int]] = {}
    for i, tree in enumerate(P.forest):
        ls = leaves(tree)
        pts = [Vec(Fraction(0), Fraction(0)), P.wr[i]]
        p = P.wr[i]
        for e, leaf in enumerate(reversed(ls), start=1):
            slot_of[leaf] = (i, e)
            if e < len(ls):
                p = (p - P.side_vector(leaf)).normalized()
                pts.append(p)
        pts.append(P.wl[i])
        polys.append(pts)
    gluing = []
    for leaf, slot in slot_of.items():
        j = leaf.index
        gluing.append((slot, (j, 0) if leaf.side == RIGHT else (j, len(polys[j]) - 1)))
    return TranslationSurface(polys, gluing)


def _colour(v: Vec) -> int:
    s = sign(v.x) * sign(v.y)
    if s == 0:
        raise KeaneViolation(f"horizontal or vertical edge {v}")
    return s


def _long_edge(tri: Sequence[Vec]) -> int:
    return max(range(3), key=lambda e: abs(float(tri[e].x)) + abs(float(tri[e].y)))


def _convex_flip(tris, t: int, e: int, u: int, f: int) -> bool:
    b, c = tris[t][(e + 1) % 3], tris[t][(e + 2) % 3]
    b2, c2 = tris[u][(f + 1) % 3], tris[u][(f + 2) % 3]
    return sign(c2.cross(b)) > 0 and sign(c.cross(b2)) > 0


def _flip(tris, glue, t: int, e: int, u: int, f: int) -> None:
    b, c = tris[t][(e + 1) % 3], tris[t][(e + 2) % 3]
    b2, c2 = tris[u][(f + 1) % 3], tris[u][(f + 2) % 3]
    d = (c2 + b).normalized()
    moved = {(t, (e + 2) % 3): (t, 0), (u, (f + 1) % 3): (t, 1), (u, (f + 2) % 3): (u, 0), (t, (e + 1) % 3): (u, 1)}
    outside = {new: glue[old] for old, new in moved.items()}
    for old in list(moved) + [(t, e), (u, f)]:
        del glue[old]
    tris[t] = [c, b2, d]
    tris[u] = [c2, b, -d]
    for new, other in outside.items():
        other = moved.get(other, other)
        glue[new] = other
        glue[other] = new
    glue[(t, 2)] = (u, 2)
    glue[(u, 2)] = (t, 2)


def veering_triangulation(X: TranslationSurface, budget: int = 10_000):
    r"""
    Flip until every triangle has an increasing and a decreasing edge.

    Works at the lowest-index triangle with a single colour and flips its
    longest edge.  When that quadrilateral is not convex, the neighbour is
    single-coloured with a strictly longer longest edge and is tried next.
    Returns ``(triangles, gluing, flips)`` with triangles as edge vectors.
    """
    T = X.triangulate()
    tris = [[T.edge_vector(t, e).normalized() for e in range(3)] for t in range(len(T.polygons))]
    glue = {(t, e): T.partner(t, e) for t in range(len(tris)) for e in range(3)}
    flips = 0
    while True:
        t = next((t for t, tri in enumerate(tris) if len({_colour(v) for v in tri}) == 1), None)
        if t is None:
            return tris, glue, flips
        for _ in range(len(tris) + 1):
            e = _long_edge(tris[t])
            u, f = glue[(t, e)]
            if _convex_flip(tris, t, e, u, f):
                break
            if len({_colour(v) for v in tris[u]}) != 1:
                raise CastleError("no convex flip at a single-coloured triangle")
            t = u
        else:
            raise CastleError("no convex flip at a single-coloured triangle")
        _flip(tris, glue, t, e, u, f)
        flips += 1
        if flips > budget:
            raise BudgetExceeded(f"no veering triangulation within {budget} flips")


def _lowest(tri: Sequence[Vec]) -> tuple[int, int]:
    """Indices of the lowest and the highest vertex."""
    ys = [Fraction(0), tri[0].y, normalize(tri[0].y + tri[1].y)]
    if any(sign(ys[a] - ys[b]) == 0 for a, b in ((0, 1), (1, 2), (0, 2))):
        raise KeaneViolation("horizontal edge in the triangulation")
    lo = hi = 0
    for m in (1, 2):
        if sign(ys[m] - ys[lo]) < 0:
            lo = m
        if sign(ys[m] - ys[hi]) > 0:
            hi = m
    return lo, hi


def from_surface(X: TranslationSurface, budget: int = 10_000) -> CastleSet:
    r"""
    Decompose ``X`` into a k-set of castle polygons: flip to a veering
    triangulation, take the triangles whose bottom vertex has an up-left and
    an up-right edge as bases and pile the others above them.
    """
    tris, glue, _ = veering_triangulation(X, budget)
    kinds = []
    base_index = {}
    for t, tri in enumerate(tris):
        lo, hi = _lowest(tri)
        if sign(tri[lo].x) > 0 and sign(tri[(lo - 1) % 3].x) > 0:
            base_index[t] = len(base_index)
            kinds.append(("base", lo))
        else:
            kinds.append(("stack", hi))

    def build(slot) -> Tree:
        u, f = glue[slot]
        kind, m = kinds[u]
        if kind == "base":
            if f == m:
                return Leaf(RIGHT, base_index[u])
            if f == (m - 1) % 3:
                return Leaf(LEFT, base_index[u])
        elif f == (m + 1) % 3:
            return Node(build((u, m)), build((u, (m + 2) % 3)))
        raise CastleError("the triangulation does not stack into castle polygons")

    forest, wl, wr = [], [], []
    for t, i in base_index.items():
        lo = kinds[t][1]
        wl.append(-tris[t][(lo - 1) % 3])
        wr.append(tris[t][lo])
        forest.append(build((t, (lo + 1) % 3)))
    P = CastleSet(tuple(forest), tuple(w.normalized() for w in wl), tuple(w.normalized() for w in wr))
    validate_castle(P)
    return P


# serialization


def castle_to_json(P: CastleSet) -> dict:
    return {
        "k": P.k,
        "forest": P.word,
        "wedges": [{"l": vec_to_json(P.wl[i]), "r": vec_to_json(P.wr[i])} for i in range(P.k)],
    }


def castle_from_json(obj) -> CastleSet:
    forest = parse_forest(obj["forest"])
    if "k" in obj and obj["k"] != len(forest):
        raise CastleError("k does not match the forest word")
    if len(obj["wedges"]) != len(forest):
        raise CastleError("one wedge pair per polygon is required")
    return CastleSet.make(forest, [(vec_from_json(w["l"]), vec_from_json(w["r"])) for w in obj["wedges"]])
