"""Scan catalog pairs and check the decidable statements about phi = |I(G, H)|.

The verdict is a consistency check on finitely many pairs, never a proof.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from .catalog import catalog_groups
from .errors import ResourceBoundError
from .expr import group
from .groups import GroupTable, SubgroupHandle, automorphisms, core, is_normal, subgroups_all
from .orbits import NRT_BOUND, ClassifyOptions, burnside_conjugation_count, classify_pair
from .transversal import nrt_count

SCAN_SCHEMA_VERSION = 1


@dataclass
class PairRecord:
    group: str
    order: int
    subgroup: list[int]
    m: int
    n: int
    normal: bool
    corefree: bool
    phi: int | None
    method: str  # classified | propagated | burnside | skipped
    skipped_reason: str = ""
    seconds: float = 0.0

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d.pop("seconds")
        return d


@dataclass
class TheoremResult:
    name: str
    passed: bool
    counterexamples: list[dict] = field(default_factory=list)


@dataclass
class ScanVerdict:
    records: list[PairRecord]
    theorems: list[TheoremResult]
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(t.passed for t in self.theorems)

    @property
    def skipped(self) -> list[PairRecord]:
        return [r for r in self.records if r.method == "skipped"]

    def to_json(self) -> dict:
        return {
            "schema_version": SCAN_SCHEMA_VERSION,
            "kind": "consistency check",
            "pairs": [r.to_json() for r in self.records],
            "skipped": [r.to_json() for r in self.skipped],
            "theorems": [t.__dict__ for t in self.theorems],
            "passed": self.passed,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)


def _aut_classes(G: GroupTable, subs: list[SubgroupHandle]) -> list[list[SubgroupHandle]]:
    """Subgroups grouped by Aut(G)-orbit; phi is constant on each."""
    auts = automorphisms(G)
    index = {h.elements: h for h in subs}
    seen = set()
    out = []
    for h in subs:
        if h.elements in seen:
            continue
        orbit = {tuple(sorted(f[x] for x in h.elements)) for f in auts}
        seen |= orbit
        out.append(sorted((index[k] for k in orbit), key=lambda s: s.elements))
    return out


def _scan_group(args) -> list[PairRecord]:
    expr, bound = args
    G = group(expr)
    subs = subgroups_all(G)
    records = []
    for cls in _aut_classes(G, subs):
        lead = cls[0]
        t0 = time.perf_counter()
        count = nrt_count(G, lead)
        if count > bound:
            phi, method, why = None, "skipped", f"{count} NRTs > bound {bound}"
        else:
            try:
                phi, method, why = classify_pair(G, lead, ClassifyOptions(bound=bound)).phi, "classified", ""
            except ResourceBoundError as e:
                phi, method, why = None, "skipped", str(e)
        dt = time.perf_counter() - t0
        for i, H in enumerate(cls):
            records.append(PairRecord(
                group=expr,
                order=G.order,
                subgroup=list(H.elements),
                m=H.order,
                n=H.index,
                normal=is_normal(G, H),
                corefree=core(G, H).order == 1,
                phi=phi,
                method=method if i == 0 or method == "skipped" else "propagated",
                skipped_reason=why,
                seconds=dt if i == 0 else 0.0,
            ))
    return records


def _sym5_record() -> PairRecord:
    t0 = time.perf_counter()
    G = group("Sym(5)")
    H = SubgroupHandle(G, tuple(i for i, p in enumerate(G.perms) if p[4] == 4))
    # for (Sym(n), Sym(n-1)) conjugation orbits coincide with isomorphism classes
    phi = burnside_conjugation_count(G, H)
    return PairRecord("Sym(5)", 120, list(H.elements), 24, 5, False, True, phi, "burnside",
                      seconds=time.perf_counter() - t0)


def check_theorems(records: list[PairRecord]) -> list[TheoremResult]:
    done = [r for r in records if r.phi is not None]

    def ce(r: PairRecord) -> dict:
        return {"group": r.group, "subgroup": r.subgroup, "phi": r.phi}

    checks = {
        "phi != 2": lambda r: r.phi != 2,
        "phi != 4": lambda r: r.phi != 4,
        "phi = 1 iff H normal": lambda r: (r.phi == 1) == r.normal,
        "phi = 3 iff index 3 and H not normal": lambda r: (r.phi == 3) == (r.n == 3 and not r.normal),
    }
    out = []
    for name, pred in checks.items():
        bad = [ce(r) for r in done if not pred(r)]
        out.append(TheoremResult(name, not bad, bad))
    return out


def scan_theorems(max_order: int | None = None, ambient: str = "catalog", jobs: int = 1,
                  bound: int = NRT_BOUND, include_sym5: bool = True) -> ScanVerdict:
    t0 = time.perf_counter()
    exprs = catalog_groups(ambient, max_order)
    tasks = [(e, bound) for e in exprs]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_scan_group, tasks))
    else:
        parts = [_scan_group(t) for t in tasks]
    records = [r for part in parts for r in part]
    if include_sym5 and ambient == "catalog" and (max_order is None or max_order >= 120):
        records.append(_sym5_record())
    records.sort(key=lambda r: (r.order, r.group, r.m, r.subgroup))
    return ScanVerdict(records, check_theorems(records), time.perf_counter() - t0)
