"""Permutations as image tuples on 0..degree-1.

Composition is left-to-right (``x^(pq) = (x^p)^q``), matching right cosets
and right actions used everywhere else in the package.  Cycle notation is
1-based, e.g. ``(1,2,3)(4,5)``.
"""
from __future__ import annotations

import re
from typing import Iterable, Sequence

Perm = tuple[int, ...]

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def identity(degree: int) -> Perm:
    return tuple(range(degree))


def is_perm(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


def compose(p: Perm, q: Perm) -> Perm:
    """Apply ``p`` first, then ``q``."""
    return tuple(q[i] for i in p)


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def order(p: Perm) -> int:
    from math import lcm

    result = 1
    for c in cycles(p):
        result = lcm(result, len(c))
    return result


def cycles(p: Perm) -> list[tuple[int, ...]]:
    """Nontrivial cycles, each starting at its smallest point."""
    seen = [False] * len(p)
    out = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        j = p[start]
        while j != start:
            cyc.append(j)
            seen[j] = True
            j = p[j]
        if len(cyc) > 1:
            out.append(tuple(cyc))
    return out


def cycle_type(p: Perm) -> tuple[int, ...]:
    """Sorted cycle lengths including fixed points."""
    fixed = len(p) - sum(len(c) for c in cycles(p))
    return tuple(sorted([len(c) for c in cycles(p)] + [1] * fixed))


def to_cycles(p: Perm) -> str:
    cs = cycles(p)
    if not cs:
        return "()"
    return "".join("(" + ",".join(str(i + 1) for i in c) + ")" for c in cs)


def from_cycles(text: str, degree: int) -> Perm:
    """Parse 1-based cycle notation.  ``"()"`` or ``""`` is the identity."""
    stripped = "".join(text.split())
    pos = 0
    # cycles compose left to right
    result = identity(degree)
    while pos < len(stripped):
        m = _CYCLE_RE.match(stripped, pos)
        if m is None:
            raise ValueError(f"bad cycle notation {text!r}")
        body = m.group(1)
        pos = m.end()
        if not body:
            continue
        points = [int(tok) - 1 for tok in body.split(",")]
        if len(set(points)) != len(points):
            raise ValueError(f"repeated point in cycle {m.group(0)!r}")
        for pt in points:
            if not 0 <= pt < degree:
                raise ValueError(f"point {pt + 1} outside degree {degree}")
        img = list(range(degree))
        for a, b in zip(points, points[1:] + points[:1]):
            img[a] = b
        result = compose(result, tuple(img))
    return result


def from_cycle_list(cycle_list: Iterable[Sequence[int]], degree: int) -> Perm:
    """Build from 1-based cycles given as integer sequences, e.g. ``[(1, 3)]``."""
    result = identity(degree)
    for c in cycle_list:
        img = list(range(degree))
        pts = [x - 1 for x in c]
        for a, b in zip(pts, pts[1:] + pts[:1]):
            img[a] = b
        result = compose(result, tuple(img))
    return result
