"""Right loops: validation, invariants, isomorphism and canonical forms.

A right loop of order n is an n x n table over 0..n-1 where 0 is a two-sided
identity and every column map ``x -> op[x, y]`` (right translation R_y) is a
bijection.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator

import numpy as np

from .errors import ResourceBoundError, ValidationError

CANON_BOUND = 8
CENSUS_BOUND = 5


@dataclass(frozen=True, eq=False)
class RightLoopTable:
    op: np.ndarray

    @classmethod
    def from_rows(cls, rows) -> "RightLoopTable":
        a = np.array(rows, dtype=np.int64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError("loop table must be square")
        a.setflags(write=False)
        return cls(a)

    @property
    def order(self) -> int:
        return self.op.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, RightLoopTable) and np.array_equal(self.op, other.op)

    def __hash__(self) -> int:
        return hash(self.op.tobytes())

    def __repr__(self) -> str:
        return f"RightLoopTable({self.op.tolist()})"

    def rows(self) -> list[list[int]]:
        return self.op.tolist()

    def flat(self) -> list[int]:
        return [int(v) for v in self.op.ravel()]

    def relabel(self, f) -> "RightLoopTable":
        """Table of the same loop with element x renamed f[x]."""
        f = np.asarray(f)
        finv = np.argsort(f)
        return RightLoopTable.from_rows(f[self.op[np.ix_(finv, finv)]])

    def is_associative(self) -> bool:
        return _assoc(self.op)

    @cached_property
    def right_translations(self) -> np.ndarray:
        """Row y is R_y as an image array: R_y[x] = x o y."""
        return np.ascontiguousarray(self.op.T)


def _assoc(t: np.ndarray) -> bool:
    n = t.shape[0]
    idx = np.arange(n)
    left = t[t[:, :, None], idx[None, None, :]]  # (x o y) o z
    right = t[idx[:, None, None], t[None, :, :]]  # x o (y o z)
    return bool(np.array_equal(left, right))


def associative_mask(tables: np.ndarray) -> np.ndarray:
    """Batch associativity test for an (L, n, n) stack."""
    L, n, _ = tables.shape
    rows = np.arange(L)[:, None, None, None]
    idx = np.arange(n)
    xy = tables[:, :, :, None]  # x o y broadcast over z
    left = tables[rows, xy, idx[None, None, None, :]]
    yz = tables[:, None, :, :]  # y o z broadcast over x
    right = tables[rows, idx[None, :, None, None], yz]
    return np.all(left == right, axis=(1, 2, 3))


def validate_right_loop(t) -> bool:
    op = np.asarray(t.op if isinstance(t, RightLoopTable) else t)
    if op.ndim != 2 or op.shape[0] != op.shape[1] or op.shape[0] == 0:
        return False
    n = op.shape[0]
    idx = np.arange(n)
    if op.min() < 0 or op.max() >= n:
        return False
    if not (np.array_equal(op[0], idx) and np.array_equal(op[:, 0], idx)):
        return False
    return bool(np.all(np.sort(op, axis=0) == idx[:, None]))


def group_loop(mul) -> RightLoopTable:
    return RightLoopTable.from_rows(np.asarray(mul))


# --------------------------------------------------------------------------
# invariants


def _cycle_type(p) -> tuple[int, ...]:
    n = len(p)
    seen = [False] * n
    out = []
    for s in range(n):
        if not seen[s]:
            k, j = 0, s
            while not seen[j]:
                seen[j] = True
                j = p[j]
                k += 1
            out.append(k)
    return tuple(sorted(out))


@dataclass(frozen=True)
class LoopFingerprint:
    order: int
    right_cycle_types: tuple[tuple[tuple[int, ...], int], ...]
    idempotents: int
    commuting_pairs: int
    associative_triples: int
    bijective_left_translations: int


def fingerprint(t: RightLoopTable) -> LoopFingerprint:
    op = t.op
    n = t.order
    idx = np.arange(n)
    rct = Counter(_cycle_type(op[:, y].tolist()) for y in range(n))
    left = op[op[:, :, None], idx[None, None, :]]
    right = op[idx[:, None, None], op[None, :, :]]
    return LoopFingerprint(
        order=n,
        right_cycle_types=tuple(sorted(rct.items())),
        idempotents=int(np.sum(op[idx, idx] == idx)),
        commuting_pairs=int(np.sum(op == op.T)),
        associative_triples=int(np.sum(left == right)),
        bijective_left_translations=int(sum(len(set(row)) == n for row in op.tolist())),
    )


def element_invariants(op: list[list[int]]) -> list[tuple]:
    """Per-element data preserved by every isomorphism."""
    n = len(op)
    out = []
    for x in range(n):
        col = [op[z][x] for z in range(n)]
        sq = op[x][x]
        # right "powers" x, x o x, (x o x) o x, ... until repeat
        seen, p = [], x
        while p not in seen:
            seen.append(p)
            p = op[p][x]
        out.append((
            _cycle_type(col),
            _cycle_type(op[x]) if len(set(op[x])) == n else (),
            sq == x,
            sq == 0,
            len(seen),
            sum(op[x][y] == op[y][x] for y in range(n)),
        ))
    return out


# --------------------------------------------------------------------------
# isomorphism


def are_isomorphic(a: RightLoopTable, b: RightLoopTable) -> tuple[int, ...] | None:
    """A relabeling f with f(0) = 0 and f(x o y) = f(x) o f(y), or None.

    Backtracks over an assignment order chosen so every new element is a
    product of already-assigned ones where possible, pruning with per-element
    invariants.
    """
    if a.order != b.order:
        return None
    n = a.order
    A, B = a.op.tolist(), b.op.tolist()
    if n == 1:
        return (0,)
    ia, ib = element_invariants(A), element_invariants(B)
    if sorted(ia) != sorted(ib):
        return None
    cands = [[y for y in range(n) if ib[y] == ia[x]] for x in range(n)]
    f = [-1] * n
    used = [False] * n
    f[0] = 0
    used[0] = True
    # process elements with fewest candidates first
    order = sorted(range(1, n), key=lambda x: (len(cands[x]), x))

    def propagate(assigned: list[int]) -> list[int] | None:
        """Close f under products; return newly set elements or None on conflict."""
        new = []
        stack = list(assigned)
        known = [x for x in range(n) if f[x] >= 0]
        while stack:
            x = stack.pop()
            for y in list(known):
                for u, v in ((x, y), (y, x)):
                    w, fw = A[u][v], B[f[u]][f[v]]
                    if f[w] < 0:
                        if used[fw] or ib[fw] != ia[w]:
                            return _undo(new) or None
                        f[w] = fw
                        used[fw] = True
                        new.append(w)
                        known.append(w)
                        stack.append(w)
                    elif f[w] != fw:
                        return _undo(new) or None
        return new

    def _undo(new):
        for w in new:
            used[f[w]] = False
            f[w] = -1
        return None

    def rec(k: int) -> bool:
        while k < len(order) and f[order[k]] >= 0:
            k += 1
        if k == len(order):
            return True
        x = order[k]
        for y in cands[x]:
            if used[y]:
                continue
            f[x] = y
            used[y] = True
            new = propagate([x])
            if new is not None:
                if rec(k + 1):
                    return True
                _undo(new)
            f[x] = -1
            used[y] = False
        return False

    if rec(0):
        assert all(B[f[x]][f[y]] == f[A[x][y]] for x in range(n) for y in range(n))
        return tuple(f)
    return None


# --------------------------------------------------------------------------
# canonical forms


@dataclass(frozen=True, order=True)
class CanonicalForm:
    """Row-major table of a canonical representative."""

    order: int
    cells: tuple[int, ...]

    def table(self) -> RightLoopTable:
        return RightLoopTable.from_rows(np.array(self.cells).reshape(self.order, self.order))

    def to_list(self) -> list[int]:
        return list(self.cells)


def canonical_form(t: RightLoopTable, bound: int = CANON_BOUND) -> CanonicalForm:
    """Lexicographically minimal row-major table over all relabelings fixing 0.

    Depth-first over the images of 1..n-1 (equivalently, the preimage of each
    new label); a branch is abandoned as soon as the determined part of its
    table already exceeds the incumbent.
    """
    n = t.order
    if n > bound:
        raise ResourceBoundError(f"canonical form bound {bound} < order {n}")
    op = t.op.tolist()
    if n <= 2:
        return CanonicalForm(n, tuple(v for row in op for v in row))
    best: list[int] | None = None
    pre = [0] + [-1] * (n - 1)  # pre[new label] = old element
    lab = [0] + [-1] * (n - 1)  # lab[old element] = new label
    cells = [(a, b) for a in range(1, n) for b in range(1, n)]

    def compare(k: int) -> int:
        """-1 strictly better, 0 undecided, 1 strictly worse (labels 0..k set)."""
        if best is None:
            return -1 if k == n - 1 else 0
        for ci, (a, b) in enumerate(cells):
            if a > k or b > k:
                return 0
            w = lab[op[pre[a]][pre[b]]]
            inc = best[ci]
            if w < 0:
                # unassigned result gets a label > k
                return 1 if inc <= k else 0
            if w < inc:
                return -1 if k == n - 1 else 0
            if w > inc:
                return 1
        return 0 if k < n - 1 else 1

    def rec(k: int):
        nonlocal best
        if k == n:
            return
        for x in range(1, n):
            if lab[x] >= 0:
                continue
            pre[k], lab[x] = x, k
            c = compare(k)
            if c < 0 and k == n - 1:
                best = [lab[op[pre[a]][pre[b]]] for a, b in cells]
            elif c <= 0 and k < n - 1:
                rec(k + 1)
            pre[k], lab[x] = -1, -1

    rec(1)
    flat = list(range(n))
    for a in range(1, n):
        flat.append(a)
        flat.extend(best[(a - 1) * (n - 1):a * (n - 1)])
    return CanonicalForm(n, tuple(flat))


@lru_cache(maxsize=16)
def _relabelings(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All identity-fixing permutations and their inverses, as (k, n) arrays."""
    perms = np.array([(0,) + p for p in itertools.permutations(range(1, n))], dtype=np.int64).reshape(-1, n)
    invs = np.argsort(perms, axis=1)
    perms.setflags(write=False)
    invs.setflags(write=False)
    return perms, invs


def _word_layout(n: int) -> list[tuple[int, int]]:
    """Split the (n-1)^2 interior cells into chunks that fit in int64 base-n."""
    cells = (n - 1) ** 2
    per = max(1, int(63 / math.log2(max(n, 2))))
    return [(s, min(s + per, cells)) for s in range(0, cells, per)] or [(0, 0)]


def _encode(interior: np.ndarray, n: int) -> np.ndarray:
    """(L, cells) digits -> (L, words) int64, lexicographic order preserved."""
    words = []
    for s, e in _word_layout(n):
        w = np.zeros(interior.shape[0], dtype=np.int64)
        for c in range(s, e):
            w = w * n + interior[:, c]
        words.append(w)
    return np.stack(words, axis=1)


def _decode(words: np.ndarray, n: int) -> list[int]:
    digits = []
    for (s, e), w in zip(_word_layout(n), words):
        w = int(w)
        chunk = []
        for _ in range(e - s):
            chunk.append(w % n)
            w //= n
        digits.extend(reversed(chunk))
    flat = list(range(n))
    for a in range(1, n):
        flat.append(a)
        flat.extend(digits[(a - 1) * (n - 1):a * (n - 1)])
    return flat


def _lex_less(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise lexicographic a < b for (L, w) arrays."""
    less = np.zeros(a.shape[0], dtype=bool)
    eq = np.ones(a.shape[0], dtype=bool)
    for j in range(a.shape[1]):
        less |= eq & (a[:, j] < b[:, j])
        eq &= a[:, j] == b[:, j]
    return less


def canonical_keys(tables: np.ndarray, bound: int = CANON_BOUND) -> np.ndarray:
    """Batch canonical forms for an (L, n, n) stack, encoded as (L, w) int64
    words.  Same minimum as :func:`canonical_form`, computed by sweeping every
    identity-fixing relabeling across the whole stack."""
    tables = np.asarray(tables)
    L, n, _ = tables.shape
    if n > bound:
        raise ResourceBoundError(f"canonical form bound {bound} < order {n}")
    small = tables.astype(np.int8 if n <= 127 else np.int64)
    perms, invs = _relabelings(n)
    best = None
    for p, q in zip(perms, invs):
        # relabeled[a, b] = p[t[q[a], q[b]]] for interior a, b
        inner = small[:, q[1:]][:, :, q[1:]]
        relabeled = p[inner].reshape(L, -1)
        code = _encode(relabeled, n)
        if best is None:
            best = code
        else:
            take = _lex_less(code, best)
            best[take] = code[take]
    return best


def key_to_form(key: np.ndarray, n: int) -> CanonicalForm:
    return CanonicalForm(n, tuple(_decode(key, n)))


def canonical_form_batch(tables: np.ndarray) -> list[CanonicalForm]:
    tables = np.asarray(tables)
    n = tables.shape[1]
    return [key_to_form(k, n) for k in canonical_keys(tables)]


def generated_canonical_form(t: RightLoopTable) -> CanonicalForm:
    """Canonical form for loops beyond the exhaustive bound.

    Minimizes over relabelings produced by breadth-first product closure from
    generating tuples of minimal length, restricted to tuples whose first
    entry has the least per-element invariant among admissible starts.  The
    result is a relabeled copy of ``t`` and depends only on its isomorphism
    class, so equal forms mean isomorphic loops.
    """
    op = t.op.tolist()
    n = t.order
    if n == 1:
        return CanonicalForm(1, (0,))
    inv = element_invariants(op)

    def closure_order(seq) -> list[int] | None:
        order = [0]
        pos = [-1] * n
        pos[0] = 0
        for g in seq:
            if pos[g] >= 0:
                return None
            pos[g] = len(order)
            order.append(g)
        m = 0
        while m < len(order):
            x = order[m]
            for j in range(m + 1):
                y = order[j]
                for w in (op[x][y], op[y][x]):
                    if pos[w] < 0:
                        pos[w] = len(order)
                        order.append(w)
            m += 1
        return order if len(order) == n else None

    for k in range(1, n):
        tuples = [s for s in itertools.permutations(range(1, n), k) if closure_order(s) is not None]
        if tuples:
            break
    least = min(inv[s[0]] for s in tuples)
    best = None
    for s in tuples:
        if inv[s[0]] != least:
            continue
        order = closure_order(s)
        lab = [0] * n
        for i, x in enumerate(order):
            lab[x] = i
        cells = tuple(lab[op[order[a]][order[b]]] for a in range(n) for b in range(n))
        if best is None or cells < best:
            best = cells
    return CanonicalForm(n, best)


def any_canonical_form(t: RightLoopTable, bound: int = CANON_BOUND) -> CanonicalForm:
    return canonical_form(t, bound) if t.order <= bound else generated_canonical_form(t)


# --------------------------------------------------------------------------
# classification


@dataclass
class LoopClass:
    count: int
    representative: int  # stream position of the first member seen
    table: RightLoopTable


def classify_loops(loops: Iterable[RightLoopTable], chunk: int = 4096) -> dict[CanonicalForm, LoopClass]:
    """Group a stream of equal-order loops by canonical form."""
    out: dict[CanonicalForm, LoopClass] = {}
    buf: list[RightLoopTable] = []
    pos = 0

    def flush():
        nonlocal pos
        if not buf:
            return
        n = buf[0].order
        if n <= CANON_BOUND:
            forms = canonical_form_batch(np.stack([b.op for b in buf]))
        else:
            forms = [generated_canonical_form(b) for b in buf]
        for t, form in zip(buf, forms):
            cls = out.get(form)
            if cls is None:
                out[form] = LoopClass(1, pos, t)
            else:
                cls.count += 1
            pos += 1
        buf.clear()

    order = None
    for t in loops:
        if order is None:
            order = t.order
        elif t.order != order:
            raise ValidationError("classify_loops needs loops of one order")
        buf.append(t)
        if len(buf) >= chunk:
            flush()
    flush()
    return out


def merge_key_counts(parts: Iterable[dict]) -> dict:
    """Merge shard results ``{key: (count, first_rank)}`` by key."""
    merged: dict = {}
    for part in parts:
        for k, (c, r) in part.items():
            if k in merged:
                c0, r0 = merged[k]
                merged[k] = (c0 + c, min(r0, r))
            else:
                merged[k] = (c, r)
    return merged


# --------------------------------------------------------------------------
# census of right loops


def labeled_right_loop_count(n: int) -> int:
    return math.factorial(n - 1) ** (n - 1) if n > 1 else 1


def _translation_choices(n: int) -> list[np.ndarray]:
    """For each y >= 1, all permutations R with R(0) = y, as (k, n) arrays."""
    out = []
    for y in range(1, n):
        rest = [v for v in range(n) if v != y]
        out.append(np.array([(y,) + p for p in itertools.permutations(rest)], dtype=np.int64))
    return out


def census_shard_tables(n: int, first: int) -> np.ndarray:
    """All labeled loops whose R_1 is the ``first``-th admissible permutation."""
    choices = _translation_choices(n)
    k = math.factorial(n - 1)
    rest = choices[1:]
    count = k ** (n - 2)
    tables = np.empty((count, n, n), dtype=np.int8)
    tables[:, :, 0] = np.arange(n)
    tables[:, :, 1] = choices[0][first]
    for j, opts in enumerate(rest):
        y = j + 2
        stride = k ** (len(rest) - 1 - j)
        sel = (np.arange(count) // stride) % k
        tables[:, :, y] = opts[sel]
    return tables


def iter_labeled_right_loops(n: int) -> Iterator[RightLoopTable]:
    """Every labeled right loop of order n (R_0 = id, R_y(0) = y)."""
    if n == 1:
        yield RightLoopTable.from_rows([[0]])
        return
    for first in range(math.factorial(n - 1)):
        for t in census_shard_tables(n, first):
            yield RightLoopTable.from_rows(t)


def _census_shard(args) -> dict:
    n, first = args
    keys = canonical_keys(census_shard_tables(n, first))
    uniq, idx, counts = np.unique(keys, axis=0, return_index=True, return_counts=True)
    base = first * math.factorial(n - 1) ** (n - 2)
    return {tuple(int(v) for v in u): (int(c), base + int(i)) for u, i, c in zip(uniq, idx, counts)}


@dataclass
class CensusResult:
    n: int
    labeled: int
    classes: dict[CanonicalForm, tuple[int, int]]  # form -> (count, first labeled index)
    seconds: float = 0.0

    @property
    def count(self) -> int:
        return len(self.classes)

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "n": self.n,
            "labeled_count": self.labeled,
            "T_n": self.count,
            "classes": [{"table": f.to_list(), "count": c} for f, (c, _) in sorted(self.classes.items())],
        }


def census(n: int, jobs: int = 1, bound: int = CENSUS_BOUND) -> CensusResult:
    """Count right loops of order n up to isomorphism.

    Labeled loops are generated in shards by the choice of R_1, each shard is
    canonicalized in bulk and the per-shard key counts are merged.
    """
    import time

    if n > bound:
        raise ResourceBoundError(f"census bound {bound} < n = {n}")
    if n < 1:
        raise ValueError("n must be positive")
    t0 = time.perf_counter()
    if n <= 2:
        table = RightLoopTable.from_rows(np.array([[0, 1], [1, 0]])[:n, :n])
        form = canonical_form(table)
        return CensusResult(n, 1, {form: (1, 0)}, time.perf_counter() - t0)
    tasks = [(n, f) for f in range(math.factorial(n - 1))]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_census_shard, tasks))
    else:
        parts = [_census_shard(t) for t in tasks]
    merged = merge_key_counts(parts)
    classes = {key_to_form(np.array(k), n): v for k, v in merged.items()}
    return CensusResult(n, labeled_right_loop_count(n), classes, time.perf_counter() - t0)


def loop_torsion(t: RightLoopTable) -> set[tuple[int, ...]]:
    """Group torsion computed from the loop alone.

    Generated by the permutations ``R_x R_y R_{x o y}^{-1}`` (applied left to
    right), which are the images of the defects ``xy (x o y)^{-1}``.
    """
    op = t.op
    n = t.order
    R = op.T  # R[y][z] = z o y
    Rinv = np.argsort(R, axis=1)
    gens = set()
    for x in range(n):
        for y in range(n):
            g = Rinv[op[x, y]][R[y][R[x]]]
            gens.add(tuple(int(v) for v in g))
    ident = tuple(range(n))
    gens.discard(ident)
    group = {ident}
    frontier = [ident]
    gl = [np.array(g) for g in gens]
    while frontier:
        nxt = []
        for p in frontier:
            pa = np.array(p)
            for g in gl:
                q = tuple(int(v) for v in g[pa])
                if q not in group:
                    group.add(q)
                    nxt.append(q)
        frontier = nxt
    return group
