r"""
Interval exchange transformations and Rauzy-Veech induction.

An IET is given by two rows of letters (the order of the intervals before and
after the exchange) and a positive length for every letter.  The letter of
the last interval in the top row is `\alpha(top)`, the one of the bottom row
`\alpha(bot)`.  A *top* move happens when `\alpha(top)` is longer; it is then
the winner and the loser is moved in the bottom row right after the winner.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

import mpmath

from .numkernel import Scalar, normalize, sign

TOP = "top"
BOT = "bot"


class KeaneViolation(ValueError):
    r"""
    Two competing intervals have the same length; in the suspension this is a
    vertical saddle connection.
    """

    def __init__(self, message: str, letters: tuple[str, str] | None = None):
        super().__init__(message)
        self.letters = letters


@dataclass(frozen=True)
class PermPair:
    r"""
    Combinatorial datum: the top and bottom rows of the two-row notation.

    >>> PermPair.parse("ABCD/DCBA").monodromy()
    (3, 2, 1, 0)
    """

    top: tuple[str, ...]
    bot: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "top", tuple(self.top))
        object.__setattr__(self, "bot", tuple(self.bot))
        if len(self.top) < 2 or sorted(self.top) != sorted(self.bot) or len(set(self.top)) != len(self.top):
            raise ValueError(f"rows {self.top} and {self.bot} are not two orderings of one alphabet")

    @classmethod
    def parse(cls, text: str) -> "PermPair":
        r"""``"ABCD/DCBA"`` or ``"a b c / c b a"`` for multi-character letters."""
        top, bot = text.split("/")
        split = (lambda s: tuple(s.split())) if " " in text.strip() else (lambda s: tuple(s.strip()))
        return cls(split(top), split(bot))

    def __str__(self):
        sep = " " if any(len(a) > 1 for a in self.top) else ""
        return sep.join(self.top) + "/" + sep.join(self.bot)

    @property
    def d(self) -> int:
        return len(self.top)

    def monodromy(self) -> tuple[int, ...]:
        r"""
        `p = \pi_{bot} \circ \pi_{top}^{-1}` as 0-based images: the letter in
        top position `j` sits in bottom position `p(j)`.
        """
        where = {a: j for j, a in enumerate(self.bot)}
        return tuple(where[a] for a in self.top)

    def is_irreducible(self) -> bool:
        p = self.monodromy()
        return not any(set(p[:k]) == set(range(k)) for k in range(1, self.d))

    def move(self, kind: str) -> "PermPair":
        """Combinatorial part of a top or bottom Rauzy move."""
        if kind == TOP:
            winner, loser = self.top[-1], self.bot[-1]
            return PermPair(self.top, _insert_after(self.bot, loser, winner))
        if kind == BOT:
            winner, loser = self.bot[-1], self.top[-1]
            return PermPair(_insert_after(self.top, loser, winner), self.bot)
        raise ValueError(f"unknown move {kind!r}")


def _insert_after(row: tuple[str, ...], letter: str, anchor: str) -> tuple[str, ...]:
    rest = [a for a in row if a != letter]
    j = rest.index(anchor)
    return tuple(rest[: j + 1] + [letter] + rest[j + 1 :])


def monodromy(perm: PermPair) -> tuple[int, ...]:
    return perm.monodromy()


def is_irreducible(perm: PermPair) -> bool:
    return perm.is_irreducible()


@dataclass(frozen=True)
class IETDatum:
    perm: PermPair
    lengths: Mapping[str, Scalar] = field(hash=False)

    def __post_init__(self):
        lengths = {a: normalize(self.lengths[a]) for a in self.perm.top}
        if any(sign(v) <= 0 for v in lengths.values()):
            raise ValueError("lengths must be positive")
        object.__setattr__(self, "lengths", lengths)

    @classmethod
    def from_list(cls, perm: PermPair | str, values: Sequence) -> "IETDatum":
        """Lengths listed in top-row order."""
        if isinstance(perm, str):
            perm = PermPair.parse(perm)
        return cls(perm, dict(zip(perm.top, values)))

    def __eq__(self, other):
        return isinstance(other, IETDatum) and self.perm == other.perm and self.lengths == other.lengths

    def length_list(self) -> list:
        return [self.lengths[a] for a in self.perm.top]

    def total(self):
        return sum(self.length_list(), Fraction(0))

    def top_starts(self) -> dict:
        return _starts(self.perm.top, self.lengths)

    def bot_starts(self) -> dict:
        return _starts(self.perm.bot, self.lengths)

    def discontinuities(self) -> list:
        """Interior endpoints of the top partition."""
        starts = self.top_starts()
        return [starts[a] for a in self.perm.top[1:]]

    def _locate(self, x) -> str:
        starts = self.top_starts()
        for a in reversed(self.perm.top):
            if x >= starts[a]:
                return a
        raise ValueError("point outside the interval")

    def apply_right(self, x):
        r"""Right-continuous image, defined at discontinuities too."""
        if x < 0 or x >= self.total():
            raise ValueError("point outside the interval")
        a = self._locate(x)
        return normalize(x - self.top_starts()[a] + self.bot_starts()[a])

    def normalized(self) -> "IETDatum":
        t = self.total()
        return IETDatum(self.perm, {a: v / t for a, v in self.lengths.items()})


def _starts(row, lengths) -> dict:
    out = {}
    acc = Fraction(0)
    for a in row:
        out[a] = acc
        acc = acc + lengths[a]
    return out


def iet_apply(T: IETDatum, x) -> Scalar:
    r"""
    Image of ``x`` under the exchange: ``x`` keeps its offset inside its
    interval, which moves from its top position to its bottom position.

    >>> iet_apply(IETDatum.from_list("AB/BA", [Fraction(7, 10), Fraction(3, 10)]), Fraction(1, 5))
    Fraction(1, 2)
    """
    x = normalize(x)
    if x in T.discontinuities():
        raise ValueError(f"{x} is a discontinuity point")
    return T.apply_right(x)


class RVStep(NamedTuple):
    iet: IETDatum
    move: str
    winner: str
    loser: str


def rv_step(T: IETDatum) -> RVStep:
    """One Rauzy-Veech step, without renormalization."""
    a_top, a_bot = T.perm.top[-1], T.perm.bot[-1]
    c = sign(T.lengths[a_top] - T.lengths[a_bot])
    if c == 0:
        raise KeaneViolation(f"tie between {a_top} and {a_bot}", (a_top, a_bot))
    kind, winner, loser = (TOP, a_top, a_bot) if c > 0 else (BOT, a_bot, a_top)
    lengths = dict(T.lengths)
    lengths[winner] = lengths[winner] - lengths[loser]
    return RVStep(IETDatum(T.perm.move(kind), lengths), kind, winner, loser)


def rv_fast(T: IETDatum) -> tuple[IETDatum, int]:
    r"""
    Zorich acceleration: collapse the maximal run of moves of one type.

    The run length is computed by one integer division instead of looping.
    """
    first = rv_step(T)  # raises on an immediate tie
    kind, winner = first.move, first.winner
    # during the run the winner stays last in its row while the losers cycle
    # through the letters that follow it in the other row
    other = T.perm.bot if kind == TOP else T.perm.top
    j = other.index(winner)
    losers = list(other[j + 1 :])[::-1]
    cycle_len = sum(T.lengths[a] for a in losers)
    w = T.lengths[winner]
    full = math.floor(w / cycle_len)
    # w - full*cycle_len may still beat a prefix of the next sweep
    n = full * len(losers)
    rest = w - full * cycle_len
    if rest == 0:
        raise KeaneViolation(f"tie between {winner} and {losers[-1]}", (winner, losers[-1]))
    for a in losers:
        c = sign(rest - T.lengths[a])
        if c == 0:
            raise KeaneViolation(f"tie between {winner} and {a}", (winner, a))
        if c < 0:
            break
        rest = rest - T.lengths[a]
        n += 1
    # replay the combinatorics, which are periodic of period len(losers)
    perm = T.perm
    for _ in range(n % len(losers)):
        perm = perm.move(kind)
    lengths = dict(T.lengths)
    lengths[winner] = normalize(rest)
    return IETDatum(perm, lengths), n


# the torus: lambda is the length of the right interval in the top row


def _check_unit(x) -> Scalar:
    x = normalize(x)
    if not (0 < x < 1):
        raise ValueError("expected a value in (0, 1)")
    return x


def torus_slow(x) -> Scalar:
    r"""
    Renormalized Rauzy-Veech map on two intervals.

    >>> torus_slow(Fraction(1, 3)), torus_slow(Fraction(3, 4))
    (Fraction(1, 2), Fraction(2, 3))
    """
    x = _check_unit(x)
    c = sign(x - Fraction(1, 2))
    if c == 0:
        raise KeaneViolation("tie at 1/2")
    return normalize(x / (1 - x)) if c < 0 else normalize(2 - 1 / x)


class FastValue(NamedTuple):
    value: Scalar
    digit: int


def torus_fast(x) -> FastValue:
    r"""
    Zorich-accelerated map on two intervals together with the run length.

    On `(1/(k+2), 1/(k+1))` the run is `k` bottom moves, on
    `(k/(k+1), (k+1)/(k+2))` it is `k` top moves.
    """
    x = _check_unit(x)
    c = sign(x - Fraction(1, 2))
    if c == 0:
        raise KeaneViolation("tie at 1/2")
    if c < 0:
        u = 1 / x
        k = math.floor(u)
        if u == k:
            raise KeaneViolation("branch boundary")
        return FastValue(normalize(1 / (u - k + 1)), k - 1)
    u = x / (1 - x)
    k = math.floor(u)
    if u == k:
        raise KeaneViolation("branch boundary")
    return FastValue(normalize(1 - 1 / (u - k + 1)), k)


def farey(x) -> Scalar:
    x = _check_unit(x)
    c = sign(x - Fraction(1, 2))
    if c == 0:
        raise ValueError("farey is not defined at 1/2")
    return normalize(x / (1 - x)) if c < 0 else normalize((1 - x) / x)


def gauss(x) -> Scalar:
    """Fractional part of ``1/x``."""
    x = normalize(x)
    if not (0 < x <= 1):
        raise ValueError("expected a value in (0, 1]")
    u = 1 / x
    return normalize(u - math.floor(u))


class CFResult(NamedTuple):
    digits: list[int]
    terminated: bool


def cf_digits(x, n: int) -> CFResult:
    r"""
    First ``n`` continued fraction digits of ``x`` read off the accelerated
    torus map.

    ``x`` is pulled back by the Farey map (the smaller preimage
    `x/(1+x)`); each accelerated step then yields the next digit.  A rational
    input stops early with ``terminated=True``.

    >>> cf_digits(Fraction(2, 5), 5)
    CFResult(digits=[2, 2], terminated=True)
    """
    x = _check_unit(x)
    y = normalize(x / (1 + x))
    digits: list[int] = []
    while len(digits) < n:
        fy = farey(y)
        u = 1 / fy
        k = math.floor(u)
        digits.append(k)
        if u == k:
            return CFResult(digits, True)
        y = torus_fast(y).value
    return CFResult(digits, False)


def gauss_digits(x, n: int) -> CFResult:
    """Continued fraction digits by iterating the Gauss map directly."""
    x = normalize(x)
    digits: list[int] = []
    while len(digits) < n:
        u = 1 / x
        k = math.floor(u)
        digits.append(k)
        if u == k:
            return CFResult(digits, True)
        x = normalize(u - k)
    return CFResult(digits, False)


# invariant densities of the torus maps


def density_slow(x: float) -> float:
    return 1.0 / (2.0 * x * (1.0 - x))


def density_fast(x: float) -> float:
    c = 1.0 / (2.0 * math.log(2.0))
    return c / (1.0 - x) if x < 0.5 else c / x


def slow_branch_inverses():
    r"""Inverse branches of :func:`torus_slow`, each onto `(0, 1)`."""
    return [lambda v: v / (1 + v), lambda v: 1 / (2 - v)]


def fast_branch_inverse(k: int, kind: str):
    r"""
    Inverse of :func:`torus_fast` restricted to `P_k` (``kind="P"``, image
    `(1/2, 1)`) or `Q_k` (``kind="Q"``, image `(0, 1/2)`).
    """
    if kind == "P":
        return lambda v: v / (k * v + 1)
    return lambda v: (k + v / (1 - v)) / (1 + k + v / (1 - v))


def slow_mass(a, b):
    r"""`\nu([a,b])` for the slow density, in closed form."""
    f = lambda t: mpmath.log(t / (1 - t)) / 2
    return f(b) - f(a)


def fast_mass(a, b):
    r"""`\mu([a,b])` for the fast density, in closed form."""
    c = 1 / (2 * mpmath.log(2))

    def cdf(t):
        t = mpmath.mpf(t)
        if t <= mpmath.mpf(1) / 2:
            return -c * mpmath.log(1 - t)
        return c * (mpmath.log(2) + mpmath.log(2 * t))

    return cdf(b) - cdf(a)


# hitting time and Keane


class HittingTime(NamedTuple):
    argument: Scalar
    value: float


def hitting_time(T: IETDatum) -> HittingTime:
    r"""
    First time the flow brings the suspension to the boundary of its cone:
    `t_0 = -\log(1 - \min(\lambda_{\alpha(top)}, \lambda_{\alpha(bot)}))`,
    returned as the exact argument of the logarithm and its float value.
    """
    if T.total() != 1:
        raise ValueError("hitting_time expects total length 1")
    a, b = T.lengths[T.perm.top[-1]], T.lengths[T.perm.bot[-1]]
    if a == b:
        raise KeaneViolation("tie", (T.perm.top[-1], T.perm.bot[-1]))
    arg = normalize(1 - min(a, b))
    return HittingTime(arg, -math.log(float(arg)))


class KeaneVerdict(NamedTuple):
    violation: bool
    step: int | None
    source: int | None
    target: int | None


def keane_check(T: IETDatum, N: int = 10_000) -> KeaneVerdict:
    r"""
    Bounded search for a connection `T^m(u_i) = u_j`, `1 \le m \le N`, between
    interior discontinuities `u_i` of the top partition.
    """
    disc = T.discontinuities()
    where = {u: j for j, u in enumerate(disc)}
    for i, u in enumerate(disc):
        x = u
        for m in range(1, N + 1):
            x = T.apply_right(x)
            if x in where:
                return KeaneVerdict(True, m, i, where[x])
    return KeaneVerdict(False, None, None, None)


# Rauzy classes


@dataclass
class RauzyClass:
    vertices: list[PermPair]
    edges: list[tuple[PermPair, str, PermPair]]
    reduced: bool = False

    def __len__(self):
        return len(self.vertices)

    def to_dot(self) -> str:
        index = {v: i for i, v in enumerate(self.vertices)}
        lines = ["digraph rauzy {"]
        for v, i in index.items():
            lines.append(f'  v{i} [label="{v}"];')
        for s, kind, t in self.edges:
            lines.append(f'  v{index[s]} -> v{index[t]} [label="{kind}"];')
        lines.append("}")
        return "\n".join(lines)


def rauzy_class(perm: PermPair, reduced: bool = False) -> RauzyClass:
    r"""
    Closure of ``perm`` under top and bottom moves.

    The reduced class identifies data with equal monodromy; its vertices are
    represented by the first datum met in breadth-first order.
    """
    if not perm.is_irreducible():
        raise ValueError("Rauzy classes are defined for irreducible data")
    seen = {perm: None}
    order = [perm]
    edges = []
    queue = deque([perm])
    while queue:
        v = queue.popleft()
        for kind in (TOP, BOT):
            w = v.move(kind)
            edges.append((v, kind, w))
            if w not in seen:
                seen[w] = None
                order.append(w)
                queue.append(w)
    if not reduced:
        return RauzyClass(order, edges)
    rep: dict[tuple, PermPair] = {}
    for v in order:
        rep.setdefault(v.monodromy(), v)
    proj = lambda v: rep[v.monodromy()]
    red_edges = sorted({(proj(s), k, proj(t)) for s, k, t in edges}, key=lambda e: (order.index(e[0]), e[1], order.index(e[2])))
    return RauzyClass(list(rep.values()), red_edges, reduced=True)


# JSON


def iet_to_json(T: IETDatum) -> dict:
    from .numkernel import scalar_to_json

    return {"top": list(T.perm.top), "bot": list(T.perm.bot),
            "lengths": {a: scalar_to_json(T.lengths[a]) for a in T.perm.top}}


def iet_from_json(obj) -> IETDatum:
    from .numkernel import scalar_from_json

    perm = PermPair(tuple(obj["top"]), tuple(obj["bot"]))
    return IETDatum(perm, {a: scalar_from_json(v) for a, v in obj["lengths"].items()})
