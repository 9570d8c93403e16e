r"""
Permutations of `\{0, \ldots, k-1\}` stored as tuples of images.

Everything in the library is 0-based; the 1-based cycle notation used for
input and output lives here.
"""

from __future__ import annotations

import re
from itertools import permutations
from typing import Iterable, Sequence

Perm = tuple


def identity(k: int) -> Perm:
    return tuple(range(k))


def compose(*perms: Perm) -> Perm:
    r"""
    Right-to-left composition: ``compose(p, q)(i) == p[q[i]]``.
    """
    result = perms[-1]
    for p in reversed(perms[:-1]):
        result = tuple(p[i] for i in result)
    return result


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def conjugate(s: Perm, p: Perm) -> Perm:
    r"""`s p s^{-1}`, the relabeling of ``p`` by ``s``."""
    return compose(s, p, inverse(s))


def cycles(p: Perm) -> list[tuple[int, ...]]:
    """Cycles (fixed points included), each starting at its least element."""
    seen = set()
    out = []
    for i in range(len(p)):
        if i in seen:
            continue
        c = [i]
        seen.add(i)
        j = p[i]
        while j != i:
            c.append(j)
            seen.add(j)
            j = p[j]
        out.append(tuple(c))
    return out


def is_cycle_of(p: Perm, c: Sequence[int]) -> bool:
    if not c:
        return False
    return all(p[c[t]] == c[(t + 1) % len(c)] for t in range(len(c)))


def order(p: Perm) -> int:
    from math import lcm

    return lcm(*(len(c) for c in cycles(p))) if p else 1


def is_involution(p: Perm) -> bool:
    return all(p[p[i]] == i for i in range(len(p)))


def is_single_cycle(p: Perm) -> bool:
    return len(cycles(p)) == 1


def all_perms(k: int) -> Iterable[Perm]:
    return permutations(range(k))


def format_cycles(p: Perm, fixed: bool = False) -> str:
    r"""
    1-based cycle notation, e.g. ``(1 2 3)``; the identity prints as ``()``.
    """
    parts = []
    for c in cycles(p):
        if len(c) == 1 and not fixed:
            continue
        parts.append("(" + " ".join(str(i + 1) for i in c) + ")")
    return "".join(parts) or "()"


def parse_cycles(text: str, k: int) -> Perm:
    r"""
    Parse 1-based cycle notation such as ``(1 2 3)(4 5)`` or ``(1,3)``.

    >>> parse_cycles("(1 2 3)", 3)
    (1, 2, 0)
    """
    images = list(range(k))
    seen = set()
    text = text.strip()
    if not re.fullmatch(r"(\(\s*(\d+([\s,]+\d+)*)?\s*\)\s*)*", text):
        raise ValueError(f"bad cycle notation {text!r}")
    for body in re.findall(r"\(([^)]*)\)", text):
        items = [int(t) - 1 for t in re.split(r"[\s,]+", body.strip()) if t]
        for i in items:
            if not 0 <= i < k or i in seen:
                raise ValueError(f"bad cycle notation {text!r}")
            seen.add(i)
        for t, i in enumerate(items):
            images[i] = items[(t + 1) % len(items)]
    return tuple(images)


def from_images(images: Sequence[int]) -> Perm:
    """1-based image list to a permutation."""
    p = tuple(int(i) - 1 for i in images)
    if sorted(p) != list(range(len(p))):
        raise ValueError(f"not a permutation: {list(images)}")
    return p


def to_images(p: Perm) -> list[int]:
    return [i + 1 for i in p]
