"""Named groups and pairs used by the scan and the verification suite."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import perm as P
from .errors import ValidationError
from .expr import group, render, PermGroup
from .groups import (
    GroupTable,
    SubgroupHandle,
    closure,
    conjugate_set,
    generating_sequence,
    subgroups_all,
)

# Fixture groups beyond the subgroups of Sym(4).
FIXTURE_GROUPS = {
    "D12": "D(12)",
    "A4xC2": "Alt(4) x C(2)",
    "Q8:C3": "Q8 : C(3) [aut(5)]",
    "C3:C4": "C(3) : C(4) [inv]",
}

SL23_PERM = "Perm[8: (1,4,7)(2,8,5); (1,6,2,3)(4,7,8,5)]"


@dataclass
class CatalogPair:
    expr: str
    selector: str
    expected_phi: int | None = None
    expected_orbits: list[int] | None = None
    provenance: str = ""
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.expected_phi is not None or self.expected_orbits is not None) and not self.provenance:
            raise ValidationError("expected values need a provenance tag")

    def resolve(self) -> tuple[GroupTable, SubgroupHandle]:
        G = group(self.expr)
        return G, select_subgroup(G, self.selector)


# Pairs with values pinned by the source literature or frozen after derivation.
REFERENCE_PAIRS = [
    CatalogPair("D(8)", "gens:(1,2)(3,4)", 6, [2, 2, 1, 1, 1, 1], "REFERENCE: D8, non-normal C2"),
    CatalogPair("D(12)", "gens:(2,6)(3,5)", 20, None, "REFERENCE: D12, non-normal C2"),
    CatalogPair("Alt(4)", "gens:(1,2)(3,4)", 5, [8, 8, 8, 4, 4], "REFERENCE: Alt(4), V4 element"),
    CatalogPair("Sym(4)", "stab:4", 44, None, "REFERENCE: right loop census n=4"),
    CatalogPair("Sym(4)", "gens:(1,3);(1,2,3,4)", 3, None, "REFERENCE: Sym(4) over D8"),
    CatalogPair("Alt(4) x C(2)", "gens:(1,2)(3,4);(1,3)(2,4)(5,6)", 146, None, "DERIVED exhaustive classification, 1024 NRTs"),
]


_SEL_RE = re.compile(r"^\s*(?P<kind>[a-z]+)\s*:\s*(?P<body>.*)$", re.S)


def select_subgroup(G: GroupTable, selector: str) -> SubgroupHandle:
    """Resolve a subgroup selector.

    ``gens:(1,3);(1,2,3,4)``  generated by cycle-notation elements
    ``names:a;b``             generated by elements with these display names
    ``elems:0,5``             generated by element indices
    ``stab:k``                stabilizer of point k (1-based)
    ``index:k`` or ``k``      k-th entry of ``subgroups_all`` (ordering-dependent)
    """
    selector = selector.strip()
    if selector.isdigit():
        return _by_index(G, int(selector))
    m = _SEL_RE.match(selector)
    if m is None:
        raise ValidationError(f"bad subgroup selector {selector!r}")
    kind, body = m.group("kind"), m.group("body").strip()
    if kind == "gens":
        if G.perms is None:
            raise ValidationError("gens: selectors need a permutation group; use names: or elems:")
        gens = [G.index_of_perm(P.from_cycles(t, G.degree)) for t in body.split(";") if t.strip()]
        return closure(G, gens)
    if kind == "names":
        lookup = {nm: i for i, nm in enumerate(G.names)}
        try:
            gens = [lookup[t.strip()] for t in body.split(";") if t.strip()]
        except KeyError as e:
            raise ValidationError(f"no element named {e.args[0]!r}") from None
        return closure(G, gens)
    if kind == "elems":
        gens = [int(t) for t in body.split(",") if t.strip()]
        if any(not 0 <= g < G.order for g in gens):
            raise ValidationError("element index out of range")
        return closure(G, gens)
    if kind == "stab":
        if G.perms is None:
            raise ValidationError("stab: needs a permutation group")
        pt = int(body) - 1
        return SubgroupHandle(G, tuple(i for i, p in enumerate(G.perms) if p[pt] == pt))
    if kind == "index":
        return _by_index(G, int(body))
    raise ValidationError(f"unknown selector kind {kind!r}")


def _by_index(G: GroupTable, k: int) -> SubgroupHandle:
    subs = subgroups_all(G)
    if not 0 <= k < len(subs):
        raise ValidationError(f"subgroup index {k} out of range (0..{len(subs) - 1})")
    return subs[k]


def conjugacy_classes_of_subgroups(G: GroupTable, subs: list[SubgroupHandle] | None = None) -> list[list[SubgroupHandle]]:
    subs = subs if subs is not None else subgroups_all(G)
    index = {h.elements: h for h in subs}
    seen = set()
    classes = []
    for h in subs:
        if h.elements in seen:
            continue
        cls = {}
        for g in range(G.order):
            key = tuple(sorted(int(v) for v in conjugate_set(G, h.array, g)))
            cls[key] = index[key]
        seen.update(cls)
        classes.append(sorted(cls.values(), key=lambda s: s.elements))
    return classes


def sym4_subgroup_exprs() -> list[str]:
    """One permutation-group expression per conjugacy class of subgroups of Sym(4)."""
    S4 = group("Sym(4)")
    out = []
    for cls in conjugacy_classes_of_subgroups(S4):
        H = cls[0]
        T = H.as_table()
        gens = tuple(T.perms[g] for g in generating_sequence(T))
        out.append(render(PermGroup(4, gens)))
    return out


def catalog_groups(ambient: str = "catalog", max_order: int | None = None) -> list[str]:
    exprs = sym4_subgroup_exprs()
    if ambient == "catalog":
        exprs += list(FIXTURE_GROUPS.values())
    elif ambient != "Sym(4)":
        raise ValidationError(f"unknown ambient policy {ambient!r}")
    if max_order is not None:
        exprs = [e for e in exprs if group(e).order <= max_order]
    return exprs
