"""Aut_H(G) acting on transversals, orbit counting, and per-pair classification."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import perm as P
from .errors import PreconditionError, ResourceBoundError
from .groups import (
    ENUMERATION_BOUND,
    GroupTable,
    SubgroupHandle,
    aut_stabilizing,
    core,
    is_normal,
)
from .loops import (
    CANON_BOUND,
    RightLoopTable,
    canonical_keys,
    generated_canonical_form,
    key_to_form,
    merge_key_counts,
)
from .transversal import (
    CosetDecomposition,
    Transversal,
    decomp_count,
    group_torsion,
    induced_loop,
    induced_tables,
    is_subgroup,
    iter_rank_chunks,
    nrt_unrank,
    partition_ranks,
    rank_many,
    right_cosets,
    span,
    unrank_many,
)

ENGINE_VERSION = "1"
REPORT_SCHEMA_VERSION = 1
NRT_BOUND = 10 ** 6


def _is_aut_stabilizing(G: GroupTable, H: SubgroupHandle, f: Sequence[int]) -> bool:
    fa = np.asarray(f)
    if fa.shape != (G.order,) or fa[0] != 0 or len(set(f)) != G.order:
        return False
    if not np.array_equal(fa[G.mul], G.mul[np.ix_(fa, fa)]):
        return False
    return set(int(v) for v in fa[H.array]) == set(H.elements)


def act_many(d: CosetDecomposition, f: Sequence[int], choices: np.ndarray) -> np.ndarray:
    """Apply an automorphism fixing H setwise to a block of choice tables."""
    fa = np.asarray(f)
    img = fa[choices]
    # f(Hx) = H f(x), so coset c goes to the coset of f(any member)
    target = d.coset_of[fa[d.members[:, 0]]]
    out = np.empty_like(img)
    out[:, target] = img
    return out


def act(f: Sequence[int], S: Transversal) -> Transversal:
    """The transversal {f(s) : s in S}."""
    d = S.decomp
    if not _is_aut_stabilizing(d.group, d.subgroup, f):
        raise PreconditionError("map is not an automorphism of G fixing H")
    row = act_many(d, f, np.array([S.choice]))[0]
    return Transversal(d, tuple(int(x) for x in row))


def inner_automorphism(G: GroupTable, g: int) -> tuple[int, ...]:
    """x -> g x g^-1."""
    return tuple(int(v) for v in G.mul[G.mul[g, np.arange(G.order)], G.inv[g]])


@dataclass
class OrbitReport:
    acting_order: int
    orbit_count: int
    lengths: list[int]  # sorted descending
    representatives: list[int]  # minimal rank per orbit, ascending
    labels: np.ndarray | None = field(default=None, repr=False)  # orbit minimum per rank

    def to_json(self) -> dict:
        return {
            "acting_order": self.acting_order,
            "orbit_count": self.orbit_count,
            "lengths": self.lengths,
            "representatives": self.representatives,
        }


def orbit_labels(d: CosetDecomposition, maps: Sequence[Sequence[int]], chunk: int = 65536) -> np.ndarray:
    """For each rank, the least rank in its orbit under the group ``maps``.

    ``maps`` must be the full acting group (closed under composition), so the
    orbit of r is exactly {f(r)} and its minimum is a canonical label.
    """
    total = decomp_count(d)
    labels = np.empty(total, dtype=np.int64)
    for lo, block in iter_rank_chunks(d, chunk=chunk):
        best = np.arange(lo, lo + block.shape[0], dtype=np.int64)
        for f in maps:
            np.minimum(best, rank_many(d, act_many(d, f, block)), out=best)
        labels[lo:lo + block.shape[0]] = best
    return labels


def orbit_report(G: GroupTable, H: SubgroupHandle, auts=None, bound: int = NRT_BOUND,
                 aut_bound: int = ENUMERATION_BOUND) -> OrbitReport:
    """Orbits of Aut_H(G) on the transversals of H."""
    d = right_cosets(G, H)
    total = decomp_count(d)
    if total > bound:
        raise ResourceBoundError(f"{total} transversals exceed enumeration bound {bound}")
    if auts is None:
        auts = aut_stabilizing(G, H, bound=aut_bound)
    return _report_from_labels(len(auts), orbit_labels(d, auts))


def _report_from_labels(acting: int, labels: np.ndarray) -> OrbitReport:
    reps, counts = np.unique(labels, return_counts=True)
    return OrbitReport(
        acting_order=acting,
        orbit_count=int(reps.size),
        lengths=sorted((int(c) for c in counts), reverse=True),
        representatives=[int(r) for r in reps],
        labels=labels,
    )


def conjugation_orbit_report(G: GroupTable, H: SubgroupHandle, bound: int = NRT_BOUND) -> OrbitReport:
    """Direct orbit computation for H acting by conjugation (brute-force side
    of the Burnside cross-check)."""
    d = right_cosets(G, H)
    if decomp_count(d) > bound:
        raise ResourceBoundError("too many transversals for a direct orbit count")
    maps = [inner_automorphism(G, h) for h in H.elements]
    return _report_from_labels(H.order, orbit_labels(d, maps))


def conjugation_fixed_count(G: GroupTable, H: SubgroupHandle, h: int, d: CosetDecomposition | None = None) -> int:
    """Number of transversals S with h S h^-1 = S, without enumerating them.

    Conjugation by h sends coset Hx to Hxh^-1.  Along a cycle of cosets of
    length l the choice in one coset fixes all the others, and is consistent
    exactly when it commutes with h^l.  The coset H itself is forced to 1.
    """
    d = d or right_cosets(G, H)
    hinv = int(G.inv[h])
    cperm = [int(d.coset_of[G.mul[d.members[c][0], hinv]]) for c in range(d.n)]
    hl_cache: dict[int, int] = {}
    seen = [False] * d.n
    seen[0] = True
    total = 1
    for c in range(1, d.n):
        if seen[c]:
            continue
        length, j = 0, c
        while not seen[j]:
            seen[j] = True
            j = cperm[j]
            length += 1
        if length not in hl_cache:
            hl_cache[length] = G.power(h, length)
        hl = hl_cache[length]
        members = d.members[c]
        fixed = int(np.sum(G.mul[G.mul[hl, members], G.inv[hl]] == members))
        total *= fixed
        if total == 0:
            return 0
    return total


def burnside_conjugation_count(G: GroupTable, H: SubgroupHandle, jobs: int = 1) -> int:
    """Orbits of H on T(G, H) under S -> h S h^-1, by averaging fixed counts."""
    d = right_cosets(G, H)
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            terms = list(ex.map(_fix_term, [(G, H, h) for h in H.elements]))
    else:
        terms = [conjugation_fixed_count(G, H, h, d) for h in H.elements]
    total = sum(terms)
    assert total % H.order == 0
    return total // H.order


def _fix_term(args) -> int:
    G, H, h = args
    return conjugation_fixed_count(G, H, h)


# --------------------------------------------------------------------------
# classification


@dataclass
class ClassifyOptions:
    orbits: bool = False
    jobs: int = 1
    bound: int = NRT_BOUND
    aut_bound: int = ENUMERATION_BOUND
    chunk: int = 65536


@dataclass
class ClassInfo:
    size: int
    representative_rank: int
    representative: list[int]
    generates_group: bool
    is_subgroup: bool
    torsion_order: int
    table: list[int]
    canonical: list[int]

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class IsoClassReport:
    group_hash: str
    group_label: str
    subgroup: list[int]
    m: int
    n: int
    nrt_count: int
    phi: int
    classes: list[ClassInfo]
    normal: bool
    corefree: bool
    orbits: OrbitReport | None = None
    orbits_refine_classes: bool | None = None
    engine_version: str = ENGINE_VERSION
    seconds: float = 0.0
    class_labels: np.ndarray | None = field(default=None, repr=False)

    @property
    def class_sizes(self) -> list[int]:
        return [c.size for c in self.classes]

    def to_json(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "engine_version": self.engine_version,
            "group_hash": self.group_hash,
            "group_label": self.group_label,
            "subgroup": self.subgroup,
            "m": self.m,
            "n": self.n,
            "nrt_count": self.nrt_count,
            "phi": self.phi,
            "normal": self.normal,
            "corefree": self.corefree,
            "classes": [c.to_json() for c in self.classes],
            "orbits": None if self.orbits is None else self.orbits.to_json(),
            "orbits_refine_classes": self.orbits_refine_classes,
        }

    @classmethod
    def from_json(cls, data: dict) -> "IsoClassReport":
        if data.get("schema_version") != REPORT_SCHEMA_VERSION:
            raise ValueError("unsupported report schema version")
        orb = data.get("orbits")
        return cls(
            group_hash=data["group_hash"],
            group_label=data["group_label"],
            subgroup=list(data["subgroup"]),
            m=data["m"],
            n=data["n"],
            nrt_count=data["nrt_count"],
            phi=data["phi"],
            classes=[ClassInfo(**c) for c in data["classes"]],
            normal=data["normal"],
            corefree=data["corefree"],
            orbits=None if orb is None else OrbitReport(**orb),
            orbits_refine_classes=data.get("orbits_refine_classes"),
            engine_version=data["engine_version"],
        )


def _classify_range(d: CosetDecomposition, lo: int, hi: int, chunk: int, keep: bool):
    """Canonical-key counts for ranks [lo, hi); optionally the key per rank."""
    result: dict = {}
    keys_out = []
    for start, block in iter_rank_chunks(d, lo, hi, chunk):
        keys = canonical_keys(induced_tables(d, block))
        if keep:
            keys_out.append(keys)
        uniq, idx, counts = np.unique(keys, axis=0, return_index=True, return_counts=True)
        part = {tuple(int(v) for v in u): (int(c), start + int(i)) for u, i, c in zip(uniq, idx, counts)}
        result = merge_key_counts([result, part])
    return result, (np.concatenate(keys_out) if keep and keys_out else None)


def _classify_shard(args):
    G, H_elements, lo, hi, chunk = args
    d = right_cosets(G, SubgroupHandle(G, H_elements))
    return _classify_range(d, lo, hi, chunk, keep=False)[0]


def classify_pair(G: GroupTable, H: SubgroupHandle, options: ClassifyOptions | None = None) -> IsoClassReport:
    """Isomorphism classes of the loops induced on every transversal of H."""
    opts = options or ClassifyOptions()
    t0 = time.perf_counter()
    d = right_cosets(G, H)
    total = decomp_count(d)
    if total > opts.bound:
        raise ResourceBoundError(f"{total} transversals exceed enumeration bound {opts.bound}")

    auts = None
    orbit_rep = None
    if opts.orbits or d.n > CANON_BOUND:
        auts = aut_stabilizing(G, H, bound=max(opts.aut_bound, G.order if d.n > CANON_BOUND else 0))
        orbit_rep = _report_from_labels(len(auts), orbit_labels(d, auts, opts.chunk))

    labels_by_rank = None
    if d.n <= CANON_BOUND:
        if opts.jobs > 1 and not opts.orbits:
            from concurrent.futures import ProcessPoolExecutor

            tasks = [(G, H.elements, a, b, opts.chunk) for a, b in partition_ranks(total, opts.jobs)]
            with ProcessPoolExecutor(max_workers=opts.jobs) as ex:
                merged = merge_key_counts(ex.map(_classify_shard, tasks))
        else:
            merged, keys = _classify_range(d, 0, total, opts.chunk, keep=opts.orbits)
            if keys is not None:
                _, labels_by_rank = np.unique(keys, axis=0, return_inverse=True)
                labels_by_rank = labels_by_rank.ravel()
        forms = {k: key_to_form(np.array(k), d.n) for k in merged}
        entries = [(r, c, forms[k].to_list()) for k, (c, r) in merged.items()]
    else:
        # orbits refine isomorphism classes: canonicalize one transversal per orbit
        orbit_sizes = dict(zip(orbit_rep.representatives, np.unique(orbit_rep.labels, return_counts=True)[1].tolist()))
        by_form: dict = {}
        rep_form = {}
        for r in orbit_rep.representatives:
            form = generated_canonical_form(induced_loop(nrt_unrank(d, r)))
            rep_form[r] = form
            c, first = by_form.get(form, (0, r))
            by_form[form] = (c + orbit_sizes[r], min(first, r))
        entries = [(first, c, form.to_list()) for form, (c, first) in by_form.items()]
        if opts.orbits:
            form_id = {f: i for i, f in enumerate(by_form)}
            labels_by_rank = np.array([form_id[rep_form[int(l)]] for l in orbit_rep.labels])

    entries.sort()
    classes = []
    for rank, count, canon in entries:
        S = nrt_unrank(d, rank)
        classes.append(ClassInfo(
            size=count,
            representative_rank=rank,
            representative=list(S.choice),
            generates_group=span(S).order == G.order,
            is_subgroup=is_subgroup(S),
            torsion_order=len(group_torsion(S)),
            table=induced_loop(S).flat(),
            canonical=canon,
        ))
    report = IsoClassReport(
        group_hash=G.content_hash,
        group_label=G.label,
        subgroup=list(H.elements),
        m=H.order,
        n=d.n,
        nrt_count=total,
        phi=len(classes),
        classes=classes,
        normal=is_normal(G, H),
        corefree=core(G, H).order == 1,
    )
    if opts.orbits:
        report.orbits = orbit_rep
        report.class_labels = labels_by_rank
        report.orbits_refine_classes = bool(np.all(labels_by_rank == labels_by_rank[orbit_rep.labels]))
    report.seconds = time.perf_counter() - t0
    return report


def class_orbit_counts(report: IsoClassReport) -> list[int]:
    """Number of Aut_H(G) orbits inside each class (report order).

    Needs a report built with ``orbits=True``.
    """
    if report.orbits is None or report.class_labels is None:
        raise PreconditionError("report was built without orbit data")
    labels = report.class_labels
    orbit_of = report.orbits.labels
    out = []
    for c in report.classes:
        cid = labels[c.representative_rank]
        out.append(int(np.unique(orbit_of[labels == cid]).size))
    return out


def generating_classes_transitive(report: IsoClassReport) -> bool:
    """Whether every class whose representative generates G is one orbit."""
    counts = class_orbit_counts(report)
    return all(k == 1 for c, k in zip(report.classes, counts) if c.generates_group)


def transversal_label(S: Transversal) -> str:
    return "{" + ", ".join(S.names()) + "}"


def cycles_to_choice(d: CosetDecomposition, cycle_texts: Sequence[str]) -> Transversal:
    """Transversal from cycle-notation elements (the identity may be omitted)."""
    from .transversal import transversal_from_set

    G = d.group
    els = {0} | {G.index_of_perm(P.from_cycles(t, G.degree)) for t in cycle_texts}
    return transversal_from_set(d, els)
