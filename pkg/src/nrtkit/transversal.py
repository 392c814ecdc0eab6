"""Right cosets, normalized right transversals and their induced structure.

A transversal is stored as a choice table over coset indices; coset 0 is H
and its chosen element is the identity.  Ranks encode the non-identity
choices in mixed radix |H|, coset 1 being the least significant digit.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

import numpy as np

from .errors import PreconditionError, ValidationError
from .groups import GroupTable, SubgroupHandle, closure, quotient
from .loops import RightLoopTable


@dataclass(frozen=True, eq=False)
class CosetDecomposition:
    group: GroupTable = field(repr=False)
    subgroup: SubgroupHandle = field(repr=False)
    coset_of: np.ndarray = field(repr=False)
    members: np.ndarray = field(repr=False)  # (n, m), row c sorted

    @property
    def n(self) -> int:
        """Number of cosets (the index)."""
        return self.members.shape[0]

    @property
    def m(self) -> int:
        """Coset size |H|."""
        return self.members.shape[1]

    @cached_property
    def position(self) -> np.ndarray:
        """Position of each element inside its own coset row."""
        pos = np.empty(self.group.order, dtype=np.int64)
        for row in self.members:
            pos[row] = np.arange(len(row))
        pos.setflags(write=False)
        return pos

    @cached_property
    def radix_weights(self) -> np.ndarray:
        return np.array([self.m ** i for i in range(self.n - 1)], dtype=np.int64)


def right_cosets(G: GroupTable, H: SubgroupHandle) -> CosetDecomposition:
    """Cosets Hx numbered in order of their minimal element."""
    if H.parent is not G:
        raise PreconditionError("subgroup belongs to a different group")
    coset_of = np.full(G.order, -1, dtype=np.int64)
    rows = []
    for x in range(G.order):
        if coset_of[x] < 0:
            members = np.sort(G.mul[H.array, x])
            coset_of[members] = len(rows)
            rows.append(members)
    members = np.array(rows, dtype=np.int64)
    coset_of.setflags(write=False)
    members.setflags(write=False)
    return CosetDecomposition(G, H, coset_of, members)


@dataclass(frozen=True, eq=False)
class Transversal:
    decomp: CosetDecomposition = field(repr=False)
    choice: tuple[int, ...]

    def __post_init__(self):
        d = self.decomp
        if len(self.choice) != d.n:
            raise ValidationError("choice table must have one entry per coset")
        if self.choice[0] != 0:
            raise ValidationError("coset H must choose the identity")
        for c, x in enumerate(self.choice):
            if d.coset_of[x] != c:
                raise ValidationError(f"element {x} is not in coset {c}")

    def __eq__(self, other) -> bool:
        return isinstance(other, Transversal) and other.decomp is self.decomp and other.choice == self.choice

    def __hash__(self) -> int:
        return hash((id(self.decomp), self.choice))

    @property
    def group(self) -> GroupTable:
        return self.decomp.group

    @property
    def elements(self) -> frozenset[int]:
        return frozenset(self.choice)

    def names(self) -> list[str]:
        return [self.group.names[x] for x in self.choice]

    @property
    def rank(self) -> int:
        d = self.decomp
        digits = d.position[list(self.choice[1:])]
        return int(digits @ d.radix_weights) if d.n > 1 else 0

    def to_json(self) -> dict:
        return {
            "group_hash": self.group.content_hash,
            "subgroup": list(self.decomp.subgroup.elements),
            "choice": list(self.choice),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def transversal_from_json(decomp: CosetDecomposition, data: dict) -> Transversal:
    if data["group_hash"] != decomp.group.content_hash or tuple(data["subgroup"]) != decomp.subgroup.elements:
        raise ValidationError("transversal record belongs to a different pair")
    return Transversal(decomp, tuple(data["choice"]))


def transversal_from_set(decomp: CosetDecomposition, elements) -> Transversal:
    """Build from an unordered element set, checking it is an NRT."""
    elements = set(int(e) for e in elements)
    choice = [-1] * decomp.n
    for x in elements:
        c = int(decomp.coset_of[x])
        if choice[c] >= 0:
            raise ValidationError("two elements lie in the same coset")
        choice[c] = x
    if -1 in choice:
        raise ValidationError("some coset has no chosen element")
    return Transversal(decomp, tuple(choice))


# --------------------------------------------------------------------------
# counting, ranking, streaming


def nrt_count(G: GroupTable, H: SubgroupHandle) -> int:
    return H.order ** (G.order // H.order - 1)


def decomp_count(d: CosetDecomposition) -> int:
    return d.m ** (d.n - 1)


def unrank_many(d: CosetDecomposition, ranks) -> np.ndarray:
    """(L,) ranks -> (L, n) choice tables."""
    ranks = np.asarray(ranks, dtype=np.int64)
    total = decomp_count(d)
    if ranks.size and (ranks.min() < 0 or ranks.max() >= total):
        raise ValidationError(f"rank out of range [0, {total})")
    out = np.zeros((ranks.shape[0], d.n), dtype=np.int64)
    r = ranks.copy()
    for c in range(1, d.n):
        out[:, c] = d.members[c][r % d.m]
        r //= d.m
    return out


def rank_many(d: CosetDecomposition, choices: np.ndarray) -> np.ndarray:
    if d.n == 1:
        return np.zeros(choices.shape[0], dtype=np.int64)
    return d.position[choices[:, 1:]] @ d.radix_weights


def nrt_unrank(d: CosetDecomposition, rank: int) -> Transversal:
    return Transversal(d, tuple(int(x) for x in unrank_many(d, [rank])[0]))


def nrt_rank(S: Transversal) -> int:
    return S.rank


def iter_rank_chunks(d: CosetDecomposition, start: int = 0, stop: int | None = None, chunk: int = 65536):
    """Yield (first_rank, choices) blocks covering [start, stop) in rank order."""
    stop = decomp_count(d) if stop is None else stop
    for lo in range(start, stop, chunk):
        hi = min(lo + chunk, stop)
        yield lo, unrank_many(d, np.arange(lo, hi, dtype=np.int64))


def nrt_iter(d: CosetDecomposition, start: int = 0, stop: int | None = None) -> Iterator[Transversal]:
    for _, block in iter_rank_chunks(d, start, stop, chunk=4096):
        for row in block:
            yield Transversal(d, tuple(int(x) for x in row))


def partition_ranks(total: int, parts: int) -> list[tuple[int, int]]:
    """Split [0, total) into ``parts`` contiguous, nearly equal ranges."""
    parts = max(1, parts)
    bounds = [total * i // parts for i in range(parts + 1)]
    return [(a, b) for a, b in zip(bounds, bounds[1:])]


# --------------------------------------------------------------------------
# induced structure


def induced_tables(d: CosetDecomposition, choices: np.ndarray) -> np.ndarray:
    """Induced loop tables for a block of choice tables, shape (L, n, n)."""
    mul = d.group.mul
    prods = mul[choices[:, :, None], choices[:, None, :]]
    return d.coset_of[prods]


def induced_loop(S: Transversal) -> RightLoopTable:
    """op[i][j] is the coset whose chosen element lies in H * s_i * s_j."""
    d = S.decomp
    ch = np.array(S.choice)
    prods = d.group.mul[np.ix_(ch, ch)]
    op = d.coset_of[prods]
    # exactly one chosen element per coset, so Hxy meets S in a singleton
    chosen = ch[op]
    assert np.all(d.coset_of[chosen] == op)
    assert np.all(d.subgroup.mask[d.group.mul[prods, d.group.inv[chosen]]])
    return RightLoopTable.from_rows(op)


def chi(S: Transversal, g: int) -> tuple[int, ...]:
    """Permutation of coset indices x -> (coset of s_x * g)."""
    d = S.decomp
    return tuple(int(v) for v in d.coset_of[d.group.mul[list(S.choice), g]])


def chi_all(d: CosetDecomposition, choices: np.ndarray) -> np.ndarray:
    """chi for every group element over a block: shape (L, |G|, n)."""
    mul = d.group.mul
    return d.coset_of[mul[choices[:, None, :], np.arange(d.group.order)[None, :, None]]]


def defects(S: Transversal) -> np.ndarray:
    """The n x n array of x y (x o y)^{-1}, all lying in H."""
    d = S.decomp
    G = d.group
    ch = np.array(S.choice)
    op = induced_loop(S).op
    return G.mul[G.mul[np.ix_(ch, ch)], G.inv[ch[op]]]


def defects_many(d: CosetDecomposition, choices: np.ndarray) -> np.ndarray:
    G = d.group
    prods = G.mul[choices[:, :, None], choices[:, None, :]]
    op = d.coset_of[prods]
    rep = np.take_along_axis(choices, op.reshape(op.shape[0], -1), axis=1).reshape(op.shape)
    return G.mul[prods, G.inv[rep]]


def span(S: Transversal) -> SubgroupHandle:
    return closure(S.group, S.choice)


def h_s(S: Transversal) -> SubgroupHandle:
    """Subgroup of H generated by the defects; satisfies H_S * S = <S>."""
    G = S.group
    hs = closure(G, set(int(v) for v in defects(S).ravel()))
    if not all(x in S.decomp.subgroup for x in hs.elements):
        raise AssertionError("defect outside H")
    prod = {int(G.mul[h, s]) for h in hs.elements for s in S.choice}
    if prod != set(span(S).elements):
        raise AssertionError("H_S * S differs from <S>")
    return hs


def group_torsion(S: Transversal) -> list[tuple[int, ...]]:
    """chi(H_S): the group torsion as a sorted list of coset permutations."""
    return sorted({chi(S, h) for h in h_s(S).elements})


def is_subgroup(S: Transversal) -> bool:
    G = S.group
    ch = list(S.choice)
    els = S.elements
    return all(int(G.mul[a, b]) in els for a in ch for b in ch)


# --------------------------------------------------------------------------
# quotient correspondence


def quotient_pair(G: GroupTable, H: SubgroupHandle, N: SubgroupHandle):
    """(G/N, H/N, projection) for a normal N inside H."""
    if not set(N.elements) <= set(H.elements):
        raise PreconditionError("N must lie inside H")
    Q, proj = quotient(G, N)
    HN = SubgroupHandle.from_elements(Q, set(int(v) for v in proj[H.array]))
    return Q, HN, proj


def project_transversal(S: Transversal, qdecomp: CosetDecomposition, proj: np.ndarray) -> Transversal:
    """The NRT {Nx : x in S} of H/N in G/N."""
    return transversal_from_set(qdecomp, [int(proj[x]) for x in S.choice])
