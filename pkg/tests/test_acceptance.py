"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are also printed when output is captured.
"""
import time

import numpy as np
import pytest

from nrtkit.catalog import catalog_groups
from nrtkit.expr import group
from nrtkit.groups import core, is_normal, subgroups_all
from nrtkit.loops import are_isomorphic, associative_mask, census
from nrtkit.orbits import (
    ClassifyOptions,
    act,
    burnside_conjugation_count,
    classify_pair,
    conjugation_fixed_count,
    cycles_to_choice,
    generating_classes_transitive,
    inner_automorphism,
)
from nrtkit.scan import scan_theorems
from nrtkit.transversal import (
    chi_all,
    decomp_count,
    defects_many,
    induced_loop,
    induced_tables,
    iter_rank_chunks,
    nrt_count,
    nrt_iter,
    project_transversal,
    quotient_pair,
    right_cosets,
)

from conftest import pair


@pytest.fixture
def report(capsys):
    def emit(label: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        assert ok, detail
    return emit


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    value = fn(*args, **kw)
    return value, time.perf_counter() - t0


def test_c1_census(report):
    c4 = census(4).count
    c5, t1 = timed(census, 5)
    c5p, t8 = timed(census, 5, jobs=8)
    ok = c4 == 44 and c5.count == 14022 and c5p.count == 14022 and t1 <= 60 and t8 <= 15
    report("1 census", ok, f"T_4={c4}, T_5={c5.count} in {t1:.1f}s (<=60), 8 workers {t8:.1f}s (<=15)")


def test_c2_symmetric_pairs(report):
    r4 = classify_pair(*pair("Sym(4)", "stab:4"))
    r5, t5 = timed(classify_pair, *pair("Sym(5)", "stab:5"))
    b4 = burnside_conjugation_count(*pair("Sym(4)", "stab:4"))
    b5 = burnside_conjugation_count(*pair("Sym(5)", "stab:5"))
    c4, c5 = census(4).count, census(5).count
    ok = r4.phi == b4 == c4 == 44 and r5.phi == b5 == c5 == 14022 and t5 <= 600
    report("2 phi(Sym(n), Sym(n-1))", ok,
           f"n=4: phi={r4.phi} burnside={b4} census={c4}; n=5: phi={r5.phi} burnside={b5} census={c5}, {t5:.1f}s (<=600)")


def test_c3_d8(report):
    rep = classify_pair(*pair("D(8)", "gens:(1,2)(3,4)"), ClassifyOptions(orbits=True))
    ok = rep.phi == 6 and rep.nrt_count == 8 and rep.orbits.lengths == [2, 2, 1, 1, 1, 1]
    report("3 D8, non-normal C2", ok, f"phi={rep.phi}, |T|={rep.nrt_count}, orbit lengths {rep.orbits.lengths}")


def test_c4_d12(report):
    G = group("D(12)")
    subs = [H for H in subgroups_all(G) if H.order == 2 and not is_normal(G, H)]
    phis = [classify_pair(G, H).phi for H in subs]
    report("4 D12, non-normal C2", len(subs) == 6 and set(phis) == {20}, f"phi over {len(subs)} subgroups: {sorted(set(phis))}")


def test_c5_alt4(report):
    rep = classify_pair(*pair("Alt(4)", "gens:(1,2)(3,4)"), ClassifyOptions(orbits=True))
    ok = rep.phi == 5 and rep.orbits.lengths == [8, 8, 8, 4, 4]
    report("5 Alt(4), <(1,2)(3,4)>", ok, f"phi={rep.phi}, orbit lengths {rep.orbits.lengths}")


def test_c6_alt4_x_c2(report):
    G = group("Alt(4) x C(2)")
    subs = [H for H in subgroups_all(G) if H.index == 6 and core(G, H).order == 1]
    phis = [classify_pair(G, H).phi for H in subs]
    counts = {nrt_count(G, H) for H in subs}
    ok = len(subs) == 3 and all(p > 4 for p in phis) and set(phis) == {146}
    report("6 Alt(4) x C2, corefree index 6", ok,
           f"phi={sorted(set(phis))} (>4, frozen 146) over {len(subs)} subgroups, {sorted(counts)} NRTs each")


def test_c7_theorem_scan(report):
    verdict, t = timed(scan_theorems)
    names = ", ".join(f"{x.name}: {'ok' if x.passed else 'violated'}" for x in verdict.theorems)
    ok = verdict.passed and not verdict.skipped and t <= 300
    report("7 theorem scan", ok, f"{len(verdict.records)} pairs, {len(verdict.skipped)} skipped, {t:.1f}s (<=300); {names}")


def _small_pairs(limit=4096):
    for expr in catalog_groups():
        G = group(expr)
        for H in subgroups_all(G):
            if nrt_count(G, H) <= limit:
                yield G, H


def test_c8a_kernel_core_and_torsion(report):
    pairs = checked = 0
    bad = []
    for G, H in _small_pairs():
        d = right_cosets(G, H)
        core_mask = np.zeros(G.order, dtype=bool)
        core_mask[list(core(G, H).elements)] = True
        for _, block in iter_rank_chunks(d, chunk=1024):
            kernel = np.all(chi_all(d, block) == np.arange(d.n), axis=2)
            trivial = np.all(core_mask[defects_many(d, block)].reshape(block.shape[0], -1), axis=1)
            if not np.all(kernel == core_mask) or not np.array_equal(trivial, associative_mask(induced_tables(d, block))):
                bad.append((G.label, H.elements))
            checked += block.shape[0]
        pairs += 1
    report("8a ker chi = core, torsion trivial iff associative", not bad, f"{pairs} pairs, {checked} NRTs, {len(bad)} failures")


def test_c8b_count_formula(report):
    bad = []
    n = 0
    for G, H in _small_pairs(limit=1024):
        d = right_cosets(G, H)
        n += 1
        if sum(1 for _ in nrt_iter(d)) != H.order ** (G.order // H.order - 1):
            bad.append(H.elements)
    report("8b |T(G,H)| = m^(n-1)", not bad, f"{n} pairs enumerated")


def test_c8c_burnside_closed_form(report):
    lines = []
    ok = True
    for expr, sel in [("D(8)", "gens:(1,2)(3,4)"), ("Sym(4)", "stab:4")]:
        G, H = pair(expr, sel)
        d = right_cosets(G, H)
        ts = list(nrt_iter(d))
        for h in H.elements:
            f = inner_automorphism(G, h)
            ok &= conjugation_fixed_count(G, H, h, d) == sum(act(f, S) == S for S in ts)
        lines.append(f"{expr}: {H.order} terms")
    report("8c Burnside fix(h) closed form vs brute force", ok, ", ".join(lines))


def test_c8d_transitivity(report):
    out = []
    ok = True
    for expr, sel in [("D(8)", "gens:(1,2)(3,4)"), ("Alt(4)", "gens:(1,2)(3,4)"), ("Sym(4)", "stab:4")]:
        rep = classify_pair(*pair(expr, sel), ClassifyOptions(orbits=True))
        good = rep.corefree and generating_classes_transitive(rep)
        ok &= good
        out.append(f"{expr}: {sum(c.generates_group for c in rep.classes)} generating classes")
    report("8d generating classes are single Aut_H(G) orbits", ok, "; ".join(out))


def test_c8e_sym4_d8_orbits(report):
    G, H = pair("Sym(4)", "gens:(1,3);(1,2,3,4)")
    d = right_cosets(G, H)
    rep = classify_pair(G, H, ClassifyOptions(orbits=True))
    sets = [["(3,4)", "(2,3)"], ["(3,4)", "(2,4,3)"], ["(3,4)", "(1,2,4,3)"], ["(2,4,3)", "(2,3,4)"]]
    labels = {int(rep.orbits.labels[cycles_to_choice(d, s).rank]) for s in sets}
    ok = rep.phi == 3 and len(labels) == 4
    report("8e (Sym(4), D8): 4 orbits, phi = 3", ok,
           f"phi={rep.phi}, distinct orbits among order-profile NRTs={len(labels)}, total orbits={rep.orbits.orbit_count}")


def test_c8f_quotient_correspondence(report):
    G, H = pair("Sym(4)", "gens:(1,3);(1,2,3,4)")
    Q, HN, proj = quotient_pair(G, H, core(G, H))
    qd = right_cosets(Q, HN)
    ts = list(nrt_iter(right_cosets(G, H)))
    ok = all(are_isomorphic(induced_loop(S), induced_loop(project_transversal(S, qd, proj))) is not None for S in ts)
    report("8f quotient map preserves loop isomorphism", ok, f"{len(ts)} NRTs of D8 in Sym(4) vs Sym(3)/C2")
