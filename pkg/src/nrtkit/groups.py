"""Finite groups as explicit Cayley tables.

Element 0 is always the identity.  Tables are numpy arrays marked read-only,
so a :class:`GroupTable` can be shared freely between workers.
"""
from __future__ import annotations

import hashlib
import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import perm as P
from .errors import PreconditionError, ResourceBoundError, ValidationError

CLOSURE_BOUND = 10_000
ENUMERATION_BOUND = 48
BRUTE_FORCE_AUT_BOUND = 12

SCHEMA_VERSION = 1


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GroupTable:
    """A finite group given by its multiplication table.

    ``mul[x, y]`` is the index of ``x*y``.  ``perms`` holds a faithful
    permutation image per element when the group came from permutations;
    it is what lets cycle-notation subgroup selectors work.
    """

    mul: np.ndarray
    inv: np.ndarray
    names: tuple[str, ...]
    perms: tuple[P.Perm, ...] | None = None
    label: str = ""

    @classmethod
    def from_table(cls, mul, names=None, perms=None, label="", check=True) -> "GroupTable":
        mul = _frozen(mul)
        n = mul.shape[0]
        if mul.shape != (n, n) or n == 0:
            raise ValidationError("multiplication table must be square and nonempty")
        if check:
            _check_latin_identity(mul)
        inv = np.empty(n, dtype=np.int64)
        rows, cols = np.nonzero(mul == 0)
        inv[rows] = cols
        inv.setflags(write=False)
        if names is None:
            names = tuple(f"g{i}" for i in range(n))
        g = cls(mul=mul, inv=inv, names=tuple(names), perms=None if perms is None else tuple(perms), label=label)
        if check and n <= 64:
            if not g.is_associative():
                raise ValidationError("multiplication table is not associative")
        return g

    @property
    def order(self) -> int:
        return self.mul.shape[0]

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        tag = self.label or "group"
        return f"<GroupTable {tag} order={self.order} hash={self.content_hash[:12]}>"

    @cached_property
    def content_hash(self) -> str:
        return hashlib.sha256(self.mul.astype("<u4").tobytes()).hexdigest()

    @cached_property
    def element_orders(self) -> np.ndarray:
        out = np.zeros(self.order, dtype=np.int64)
        for x in range(self.order):
            k, y = 1, x
            while y != 0:
                y = self.mul[y, x]
                k += 1
            out[x] = k
        out.setflags(write=False)
        return out

    @cached_property
    def perm_index(self) -> dict[P.Perm, int]:
        if self.perms is None:
            return {}
        return {p: i for i, p in enumerate(self.perms)}

    @property
    def degree(self) -> int | None:
        return None if self.perms is None else len(self.perms[0])

    def index_of_perm(self, p: P.Perm) -> int:
        try:
            return self.perm_index[tuple(p)]
        except KeyError:
            raise ValidationError(f"{P.to_cycles(tuple(p))} is not an element of {self.label or 'the group'}") from None

    def is_associative(self) -> bool:
        m = self.mul
        # (xy)z == x(yz) for all x, y, z
        left = m[m[:, :, None], np.arange(self.order)[None, None, :]]
        right = m[np.arange(self.order)[:, None, None], m[None, :, :]]
        return bool(np.array_equal(left, right))

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def check_axioms(self) -> None:
        _check_latin_identity(self.mul)
        idx = np.arange(self.order)
        if not (np.all(self.mul[idx, self.inv] == 0) and np.all(self.mul[self.inv, idx] == 0)):
            raise ValidationError("inverse table inconsistent")
        if not self.is_associative():
            raise ValidationError("multiplication table is not associative")

    def power(self, x: int, k: int) -> int:
        y = 0
        for _ in range(k % self.element_orders[x]):
            y = int(self.mul[y, x])
        return y

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "order": self.order,
            "mul": [int(v) for v in self.mul.ravel()],
            "names": list(self.names),
            "hash": self.content_hash,
            "label": self.label,
        }

    @classmethod
    def from_json(cls, data: dict) -> "GroupTable":
        n = data["order"]
        g = cls.from_table(np.array(data["mul"]).reshape(n, n), names=data.get("names"), label=data.get("label", ""))
        if "hash" in data and data["hash"] != g.content_hash:
            raise ValidationError("content hash mismatch")
        return g

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _check_latin_identity(mul: np.ndarray) -> None:
    n = mul.shape[0]
    idx = np.arange(n)
    if not (np.array_equal(mul[0], idx) and np.array_equal(mul[:, 0], idx)):
        raise ValidationError("element 0 is not a two-sided identity")
    target = np.arange(n)
    if not (np.all(np.sort(mul, axis=1) == target) and np.all(np.sort(mul, axis=0) == target[:, None])):
        raise ValidationError("rows and columns must be permutations")


@dataclass(frozen=True, eq=False)
class SubgroupHandle:
    parent: GroupTable = field(repr=False)
    elements: tuple[int, ...]

    def __post_init__(self):
        els = self.elements
        if not els or els[0] != 0 or any(a >= b for a, b in zip(els, els[1:])):
            raise ValidationError("subgroup elements must be strictly sorted and contain 0")

    @classmethod
    def from_elements(cls, parent: GroupTable, elements: Iterable[int], check: bool = True) -> "SubgroupHandle":
        h = cls(parent, tuple(sorted(int(e) for e in set(elements))))
        if check:
            els = np.array(h.elements)
            prods = parent.mul[np.ix_(els, els)]
            if not np.all(h.mask[prods]) or not np.all(h.mask[parent.inv[els]]):
                raise ValidationError("element set is not closed under multiplication and inversion")
            if parent.order % h.order:
                raise ValidationError("subgroup order does not divide group order")
        return h

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return self.order

    def __contains__(self, x: int) -> bool:
        return bool(self.mask[x])

    def __eq__(self, other) -> bool:
        return isinstance(other, SubgroupHandle) and other.parent is self.parent and other.elements == self.elements

    def __hash__(self) -> int:
        return hash((id(self.parent), self.elements))

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[list(self.elements)] = True
        m.setflags(write=False)
        return m

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.elements, dtype=np.int64)
        a.setflags(write=False)
        return a

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    def names(self) -> list[str]:
        return [self.parent.names[e] for e in self.elements]

    def as_table(self) -> GroupTable:
        """The subgroup as a standalone group; element i is ``elements[i]``."""
        pos = {e: i for i, e in enumerate(self.elements)}
        els = self.array
        mul = np.vectorize(pos.__getitem__, otypes=[np.int64])(self.parent.mul[np.ix_(els, els)])
        perms = None if self.parent.perms is None else [self.parent.perms[e] for e in self.elements]
        return GroupTable.from_table(mul, names=self.names(), perms=perms, check=False)


# --------------------------------------------------------------------------
# construction


def build_from_generators(degree: int, gens: Sequence[Sequence[int]], bound: int = CLOSURE_BOUND, label: str = "") -> GroupTable:
    """Close a set of permutations under composition.

    Elements are numbered in breadth-first order: starting at the identity,
    each dequeued element is multiplied on the right by the generators in
    input order.
    """
    gens = [tuple(int(x) for x in g) for g in gens]
    for g in gens:
        if len(g) != degree or not P.is_perm(g):
            raise ValidationError(f"generator {g} is not a permutation of degree {degree}")
    ident = P.identity(degree)
    elements = [ident]
    index = {ident: 0}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = P.compose(x, g)
            if y not in index:
                if len(elements) >= bound:
                    raise ResourceBoundError(f"group closure exceeds order bound {bound}")
                index[y] = len(elements)
                elements.append(y)
                queue.append(y)
    n = len(elements)
    arr = np.array(elements, dtype=np.int64)  # n x degree
    keys = {tuple(e): i for i, e in enumerate(elements)}
    mul = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        # row i: x_i * x_j means apply x_i then x_j: image = x_j[x_i]
        prod = arr[:, arr[i]]  # prod[j] = x_j[x_i[k]] over k
        for j in range(n):
            mul[i, j] = keys[tuple(prod[j])]
    names = [P.to_cycles(e) for e in elements]
    return GroupTable.from_table(mul, names=names, perms=elements, label=label, check=n <= 64)


def closure(G: GroupTable, gens: Iterable[int]) -> SubgroupHandle:
    gens = [int(g) for g in gens if g != 0]
    seen = np.zeros(G.order, dtype=bool)
    seen[0] = True
    queue = [0]
    for x in queue:
        for g in gens:
            y = int(G.mul[x, g])
            if not seen[y]:
                seen[y] = True
                queue.append(y)
    return SubgroupHandle(G, tuple(int(i) for i in np.flatnonzero(seen)))


def trivial_subgroup(G: GroupTable) -> SubgroupHandle:
    return SubgroupHandle(G, (0,))


def whole(G: GroupTable) -> SubgroupHandle:
    return SubgroupHandle(G, tuple(range(G.order)))


# --------------------------------------------------------------------------
# subgroup structure


def subgroups_all(G: GroupTable, bound: int = ENUMERATION_BOUND) -> list[SubgroupHandle]:
    """Every subgroup exactly once, sorted by (size, element list).

    Cyclic subgroups seed the search; each layer joins the previous layer's
    new subgroups with every cyclic subgroup until nothing new appears.
    """
    if G.order > bound:
        raise ResourceBoundError(f"subgroup enumeration bound {bound} < |G| = {G.order}")
    cyclic: dict[tuple[int, ...], int] = {}
    for g in range(G.order):
        key = closure(G, [g]).elements
        cyclic.setdefault(key, g)
    found: dict[tuple[int, ...], tuple[int, ...]] = {k: (g,) if g else () for k, g in cyclic.items()}
    layer = list(found)
    while layer:
        nxt = []
        for key in layer:
            gens = found[key]
            keyset = set(key)
            for ckey, g in cyclic.items():
                if g in keyset:
                    continue
                joined = closure(G, gens + (g,)).elements
                if joined not in found:
                    found[joined] = gens + (g,)
                    nxt.append(joined)
        layer = nxt
    return [SubgroupHandle(G, k) for k in sorted(found, key=lambda k: (len(k), k))]


def conjugate_set(G: GroupTable, elems: np.ndarray, g: int) -> np.ndarray:
    """``g^-1 * e * g`` for each e."""
    return G.mul[G.mul[G.inv[g], elems], g]


def is_normal(G: GroupTable, H: SubgroupHandle) -> bool:
    els = H.array
    for g in range(G.order):
        if not np.all(H.mask[conjugate_set(G, els, g)]):
            return False
    return True


def normalizer(G: GroupTable, H: SubgroupHandle) -> SubgroupHandle:
    els = H.array
    keep = [g for g in range(G.order) if np.all(H.mask[conjugate_set(G, els, g)])]
    return SubgroupHandle(G, tuple(keep))


def center(G: GroupTable) -> SubgroupHandle:
    keep = [g for g in range(G.order) if np.array_equal(G.mul[g], G.mul[:, g])]
    return SubgroupHandle(G, tuple(keep))


def core(G: GroupTable, H: SubgroupHandle) -> SubgroupHandle:
    """Intersection of all conjugates of H; the largest normal subgroup inside H."""
    mask = H.mask.copy()
    els = H.array
    for g in range(G.order):
        conj = np.zeros(G.order, dtype=bool)
        conj[conjugate_set(G, els, g)] = True
        mask &= conj
    return SubgroupHandle(G, tuple(int(i) for i in np.flatnonzero(mask)))


def quotient(G: GroupTable, N: SubgroupHandle) -> tuple[GroupTable, np.ndarray]:
    """G/N with cosets numbered by minimal element (coset 0 is N)."""
    if not is_normal(G, N):
        raise PreconditionError("quotient requires a normal subgroup")
    coset_of = np.full(G.order, -1, dtype=np.int64)
    reps = []
    for x in range(G.order):
        if coset_of[x] < 0:
            coset_of[G.mul[N.array, x]] = len(reps)
            reps.append(x)
    reps_a = np.array(reps)
    mul = coset_of[G.mul[np.ix_(reps_a, reps_a)]]
    names = ["N" + G.names[r] if r else "N" for r in reps]
    Q = GroupTable.from_table(mul, names=names, label=f"{G.label}/N" if G.label else "", check=True)
    coset_of.setflags(write=False)
    return Q, coset_of


# --------------------------------------------------------------------------
# homomorphism search


def generating_sequence(G: GroupTable) -> list[int]:
    """A short generating sequence: greedily add the highest-order element
    outside the current span (ties by smallest index)."""
    gens: list[int] = []
    span = closure(G, gens)
    orders = G.element_orders
    while span.order < G.order:
        outside = [x for x in range(G.order) if x not in span]
        # prefer an element that enlarges the span the most
        best = max(outside, key=lambda x: (closure(G, gens + [x]).order, orders[x], -x))
        gens.append(best)
        span = closure(G, gens)
    return gens


def _extend(G: GroupTable, K: GroupTable, gens: Sequence[int], images: Sequence[int]) -> dict[int, int] | None:
    """Extend gens -> images to a homomorphism on <gens>, or None if the
    assignment is inconsistent or not injective."""
    f = {0: 0}
    used = {0}
    queue = [0]
    for x in queue:
        fx = f[x]
        for g, im in zip(gens, images):
            y = int(G.mul[x, g])
            fy = int(K.mul[fx, im])
            if y in f:
                if f[y] != fy:
                    return None
            else:
                if fy in used:
                    return None
                f[y] = fy
                used.add(fy)
                queue.append(y)
    return f


def _iso_search(G: GroupTable, K: GroupTable, first_only: bool):
    if G.order != K.order:
        return
    if sorted(G.element_orders.tolist()) != sorted(K.element_orders.tolist()):
        return
    gens = generating_sequence(G)
    by_order: dict[int, list[int]] = {}
    for y in range(K.order):
        by_order.setdefault(int(K.element_orders[y]), []).append(y)
    cands = [by_order.get(int(G.element_orders[g]), []) for g in gens]

    def rec(depth: int, images: list[int]):
        if depth == len(gens):
            f = _extend(G, K, gens, images)
            if f is not None and len(f) == G.order:
                yield tuple(f[x] for x in range(G.order))
            return
        for c in cands[depth]:
            trial = images + [c]
            if _extend(G, K, gens[: depth + 1], trial) is None:
                continue
            yield from rec(depth + 1, trial)

    for f in rec(0, []):
        yield f
        if first_only:
            return


def automorphisms(G: GroupTable, bound: int = ENUMERATION_BOUND) -> list[P.Perm]:
    """All automorphisms as permutations of element indices.

    Backtracks over images of a short generating sequence, with candidate
    images restricted to elements of the same order.  The identity comes first.
    """
    if G.order > bound:
        raise ResourceBoundError(f"automorphism bound {bound} < |G| = {G.order}")
    return sorted(_iso_search(G, G, first_only=False))


def automorphisms_bruteforce(G: GroupTable, bound: int = BRUTE_FORCE_AUT_BOUND) -> list[P.Perm]:
    """Cross-check oracle: test every order-preserving bijection fixing 0."""
    if G.order > bound:
        raise ResourceBoundError(f"brute-force automorphism bound {bound} < |G| = {G.order}")
    classes: dict[int, list[int]] = {}
    for x in range(1, G.order):
        classes.setdefault(int(G.element_orders[x]), []).append(x)
    keys = sorted(classes)
    out = []
    mul = G.mul.tolist()
    n = G.order
    for parts in itertools.product(*(itertools.permutations(classes[k]) for k in keys)):
        f = [0] * n
        for k, imgs in zip(keys, parts):
            for src, dst in zip(classes[k], imgs):
                f[src] = dst
        if all(f[mul[x][y]] == mul[f[x]][f[y]] for x in range(n) for y in range(n)):
            out.append(tuple(f))
    return sorted(out)


def find_isomorphism(G: GroupTable, K: GroupTable) -> P.Perm | None:
    """An isomorphism G -> K as an index map, or None."""
    for f in _iso_search(G, K, first_only=True):
        return f
    return None


def are_isomorphic(G: GroupTable, K: GroupTable) -> bool:
    return find_isomorphism(G, K) is not None


def aut_stabilizing(G: GroupTable, H: SubgroupHandle, bound: int = ENUMERATION_BOUND) -> list[P.Perm]:
    """Automorphisms of G mapping H onto H."""
    auts = automorphisms(G, bound=bound)
    els = set(H.elements)
    keep = [f for f in auts if {f[h] for h in H.elements} == els]
    if len(keep) <= 64:
        kset = set(keep)
        for a in keep:
            for b in keep:
                if P.compose(a, b) not in kset:
                    raise AssertionError("stabilizer is not closed under composition")
    return keep


def element_from_cycles(G: GroupTable, text: str) -> int:
    if G.perms is None:
        raise PreconditionError("group has no permutation representation")
    return G.index_of_perm(P.from_cycles(text, G.degree))
