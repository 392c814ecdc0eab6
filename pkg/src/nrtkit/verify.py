"""The literature-value suite behind ``nrtkit verify --suite paper``."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .catalog import REFERENCE_PAIRS, select_subgroup
from .expr import group
from .groups import (
    are_isomorphic,
    aut_stabilizing,
    automorphisms,
    build_from_generators,
    core,
    is_normal,
    normalizer,
    subgroups_all,
)
from . import perm as P
from .loops import are_isomorphic as loops_isomorphic, census, group_loop
from .orbits import (
    ClassifyOptions,
    burnside_conjugation_count,
    classify_pair,
    cycles_to_choice,
    orbit_report,
)
from .scan import scan_theorems
from .transversal import induced_loop, nrt_count, right_cosets


@dataclass
class CheckResult:
    name: str
    expected: object
    computed: object
    passed: bool
    seconds: float


def _pair(expr: str, sel: str):
    G = group(expr)
    return G, select_subgroup(G, sel)


def _census(n):
    return census(n).count


def _burnside(n):
    return burnside_conjugation_count(*_pair(f"Sym({n})", f"stab:{n}"))


def _phi(expr, sel):
    return classify_pair(*_pair(expr, sel)).phi


def _orbit_lengths(expr, sel):
    return orbit_report(*_pair(expr, sel)).lengths


def _d8_generated():
    G = build_from_generators(4, [P.from_cycles("(1,3)", 4), P.from_cycles("(1,2,3,4)", 4)])
    return G.order == 8 and are_isomorphic(G, group("D(8)"))


def _unique_involution_subgroup():
    G = group("C(3) : C(4) [inv]")
    return sum(1 for h in subgroups_all(G) if h.order == 2)


def _core_order(expr, sel):
    return core(*_pair(expr, sel)).order


def _q8c3_c4_core():
    G = group("Q8 : C(3) [aut(5)]")
    cyclic4 = [h for h in subgroups_all(G) if h.order == 4 and max(G.element_orders[list(h.elements)]) == 4]
    return sorted({core(G, h).order for h in cyclic4})


def _index3_example_orbits():
    G, H = _pair("Sym(4)", "gens:(1,3);(1,2,3,4)")
    d = right_cosets(G, H)
    # one NRT per element-order profile; automorphisms preserve these profiles
    listed = [["(3,4)", "(2,3)"], ["(3,4)", "(2,4,3)"], ["(3,4)", "(1,2,4,3)"], ["(2,4,3)", "(2,3,4)"]]
    rep = orbit_report(G, H)
    labels = {int(rep.labels[cycles_to_choice(d, s).rank]) for s in listed}
    return len(labels)


def _lemma25_loops():
    G, H = _pair("D(8)", "gens:(1,2)(3,4)")
    d = right_cosets(G, H)
    y = next(x for x in range(G.order) if G.element_orders[x] == 4)
    x = H.elements[1]
    pw = [G.power(y, k) for k in range(4)]
    s1 = cycles_to_choice(d, [G.names[e] for e in pw[1:]])
    s2 = cycles_to_choice(d, [G.names[int(G.mul[x, pw[1]])], G.names[pw[2]], G.names[int(G.mul[x, pw[3]])]])
    c4 = group_loop(group("C(4)").mul)
    v4 = group_loop(group("C(2) x C(2)").mul)
    return (loops_isomorphic(induced_loop(s1), c4) is not None,
            loops_isomorphic(induced_loop(s2), v4) is not None)


def _aut_h_order(expr, sel):
    return len(aut_stabilizing(*_pair(expr, sel)))


CHECKS: list[tuple[str, Callable[[], object], Callable[[object], bool], object]] = [
    ("T_4 = 44 (census)", lambda: _census(4), lambda v: v == 44, 44),
    ("T_5 = 14022 (census)", lambda: _census(5), lambda v: v == 14022, 14022),
    ("conjugation orbits Sym(4)/Sym(3) = 44", lambda: _burnside(4), lambda v: v == 44, 44),
    ("conjugation orbits Sym(5)/Sym(4) = 14022", lambda: _burnside(5), lambda v: v == 14022, 14022),
    ("phi(Sym(4), Sym(3)) = 44", lambda: _phi("Sym(4)", "stab:4"), lambda v: v == 44, 44),
    ("phi(Sym(5), Sym(4)) = 14022", lambda: _phi("Sym(5)", "stab:5"), lambda v: v == 14022, 14022),
    ("<(1,3),(1,2,3,4)> is D8", _d8_generated, lambda v: v is True, True),
    ("C3 : C4 has one subgroup of order 2", _unique_involution_subgroup, lambda v: v == 1, 1),
    ("core of Sym(3) in Sym(4) trivial", lambda: _core_order("Sym(4)", "stab:4"), lambda v: v == 1, 1),
    ("C4 subgroups of Q8 : C3 have core of order 2", _q8c3_c4_core, lambda v: v == [2], [2]),
    ("|Aut(Alt(4))| = 24", lambda: len(automorphisms(group("Alt(4)"))), lambda v: v == 24, 24),
    ("N_Sym(4)(<(1,2)(3,4)>) has order 8",
     lambda: normalizer(*_pair("Sym(4)", "gens:(1,2)(3,4)")).order, lambda v: v == 8, 8),
    ("D8 non-normal C2: |Aut_H G| = 2", lambda: _aut_h_order("D(8)", "gens:(1,2)(3,4)"), lambda v: v == 2, 2),
    ("D8 non-normal C2: |T| = 8", lambda: nrt_count(*_pair("D(8)", "gens:(1,2)(3,4)")), lambda v: v == 8, 8),
    ("D8 non-normal C2: S1 ~ C4, S2 ~ C2 x C2", _lemma25_loops, lambda v: v == (True, True), (True, True)),
    ("Alt(4), <(1,2)(3,4)>: |Aut_H G| = 8", lambda: _aut_h_order("Alt(4)", "gens:(1,2)(3,4)"), lambda v: v == 8, 8),
    ("Alt(4) x C2 corefree index 6: phi > 4",
     lambda: _phi("Alt(4) x C(2)", "gens:(1,2)(3,4);(1,3)(2,4)(5,6)"), lambda v: v > 4, "> 4"),
    ("(Sym(4), D8): NRTs with distinct order profiles lie in 4 orbits", _index3_example_orbits, lambda v: v == 4, 4),
]

for _p in REFERENCE_PAIRS:
    CHECKS.append((f"phi({_p.expr}, {_p.selector}) = {_p.expected_phi} [{_p.provenance}]",
                   (lambda p=_p: _phi(p.expr, p.selector)), (lambda v, p=_p: v == p.expected_phi), _p.expected_phi))
    if _p.expected_orbits is not None:
        CHECKS.append((f"orbit lengths ({_p.expr}, {_p.selector}) [{_p.provenance}]",
                       (lambda p=_p: _orbit_lengths(p.expr, p.selector)),
                       (lambda v, p=_p: v == p.expected_orbits), _p.expected_orbits))

CHECKS.append(("theorem scan: phi not in {2,4}; phi=1 iff normal; phi=3 iff index-3 non-normal",
               lambda: scan_theorems().passed, lambda v: v is True, True))


def run_reference_suite(echo: Callable[[str], None] | None = print) -> list[CheckResult]:
    results = []
    for name, fn, ok, expected in CHECKS:
        t0 = time.perf_counter()
        try:
            value = fn()
            passed = bool(ok(value))
        except Exception as e:  # a crash is a failed check, reported as such
            value, passed = f"error: {e!r}", False
        res = CheckResult(name, expected, value, passed, time.perf_counter() - t0)
        results.append(res)
        if echo:
            echo(f"[{'PASS' if passed else 'FAIL'}] {name}: computed {value!r} ({res.seconds:.2f}s)")
    return results
