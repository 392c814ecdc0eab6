import json

import numpy as np
import pytest

from nrtkit.catalog import catalog_groups
from nrtkit.errors import ValidationError
from nrtkit.expr import group
from nrtkit.groups import are_isomorphic as groups_isomorphic, build_from_generators, core, subgroups_all
from nrtkit.loops import are_isomorphic, associative_mask, canonical_form, loop_torsion, validate_right_loop
from nrtkit.transversal import (
    Transversal,
    chi,
    chi_all,
    decomp_count,
    defects,
    defects_many,
    group_torsion,
    h_s,
    induced_loop,
    induced_tables,
    iter_rank_chunks,
    nrt_count,
    nrt_iter,
    nrt_rank,
    nrt_unrank,
    partition_ranks,
    project_transversal,
    quotient_pair,
    rank_many,
    right_cosets,
    transversal_from_json,
    transversal_from_set,
    unrank_many,
)

from conftest import pair


def small_pairs(limit=4096):
    out = []
    for expr in catalog_groups():
        G = group(expr)
        for H in subgroups_all(G):
            if nrt_count(G, H) <= limit:
                out.append((expr, G, H))
    return out


PAIRS = small_pairs()


def test_pair_scope_is_substantial():
    assert len(PAIRS) > 100


def test_cosets_partition(s4_s3):
    G, H = s4_s3
    d = right_cosets(G, H)
    assert d.n == 4 and d.m == 6
    assert sorted(d.members.ravel().tolist()) == list(range(24))
    assert list(d.members[0]) == list(H.elements)
    # cosets numbered by minimal element
    mins = d.members[:, 0]
    assert list(mins) == sorted(mins)


@pytest.mark.parametrize("expr,sel", [("Sym(4)", "stab:4"), ("D(8)", "gens:(1,2)(3,4)"),
                                      ("Alt(4) x C(2)", "gens:(1,2)(3,4);(1,3)(2,4)(5,6)")])
def test_count_matches_enumeration(expr, sel):
    G, H = pair(expr, sel)
    d = right_cosets(G, H)
    assert nrt_count(G, H) == H.order ** (G.order // H.order - 1) == decomp_count(d)
    seen = {S.choice for S in nrt_iter(d)}
    assert len(seen) == nrt_count(G, H)


def test_rank_unrank_round_trip(s4_s3):
    G, H = s4_s3
    d = right_cosets(G, H)
    total = decomp_count(d)
    choices = unrank_many(d, np.arange(total))
    assert np.array_equal(rank_many(d, choices), np.arange(total))
    for r in (0, 1, 77, total - 1):
        S = nrt_unrank(d, r)
        assert nrt_rank(S) == r
    with pytest.raises(ValidationError):
        unrank_many(d, [total])


def test_first_coset_is_least_significant(d8_pair):
    G, H = d8_pair
    d = right_cosets(G, H)
    a, b = nrt_unrank(d, 0), nrt_unrank(d, 1)
    assert a.choice[2:] == b.choice[2:] and a.choice[1] != b.choice[1]


@pytest.mark.parametrize("parts", [1, 2, 7])
def test_partition_determinism(parts, s4_s3):
    G, H = s4_s3
    d = right_cosets(G, H)
    total = decomp_count(d)
    ranges = partition_ranks(total, parts)
    assert ranges[0][0] == 0 and ranges[-1][1] == total
    assert all(a[1] == b[0] for a, b in zip(ranges, ranges[1:]))
    stitched = np.concatenate([blk for a, b in ranges for _, blk in iter_rank_chunks(d, a, b, chunk=50)])
    assert np.array_equal(stitched, unrank_many(d, np.arange(total)))


def test_transversal_validation(d8_pair):
    G, H = d8_pair
    d = right_cosets(G, H)
    S = nrt_unrank(d, 3)
    with pytest.raises(ValidationError):
        Transversal(d, (S.choice[1],) + S.choice[1:])
    with pytest.raises(ValidationError):
        transversal_from_set(d, [0, S.choice[1]])
    assert transversal_from_set(d, S.elements) == S


def test_json_round_trip(d8_pair):
    G, H = d8_pair
    d = right_cosets(G, H)
    S = nrt_unrank(d, 5)
    assert transversal_from_json(d, json.loads(S.dumps())) == S
    other = right_cosets(*pair("Sym(4)", "stab:4"))
    with pytest.raises(ValidationError):
        transversal_from_json(other, S.to_json())


def test_induced_loop_is_right_loop(s4_s3):
    G, H = s4_s3
    d = right_cosets(G, H)
    for S in nrt_iter(d):
        t = induced_loop(S)
        assert validate_right_loop(t)
        # x o y lies in H x y
        for i, x in enumerate(S.choice):
            for j, y in enumerate(S.choice):
                z = S.choice[t.op[i, j]]
                assert H.mask[G.mul[G.mul[x, y], G.inv[z]]]


@pytest.mark.parametrize("expr,G,H", PAIRS, ids=[f"{e}|{h.elements[:4]}|{h.order}" for e, _, h in PAIRS])
def test_chi_kernel_is_core_and_torsion_matches_associativity(expr, G, H):
    d = right_cosets(G, H)
    ident = np.arange(d.n)
    core_set = set(core(G, H).elements)
    core_mask = np.zeros(G.order, dtype=bool)
    core_mask[list(core_set)] = True
    for _, block in iter_rank_chunks(d, chunk=1024):
        perms = chi_all(d, block)
        kernel = np.all(perms == ident, axis=2)
        assert np.all(kernel == core_mask)
        torsion_trivial = np.all(core_mask[defects_many(d, block)].reshape(block.shape[0], -1), axis=1)
        assert np.array_equal(torsion_trivial, associative_mask(induced_tables(d, block)))


def test_chi_is_homomorphism(d8_pair):
    G, H = d8_pair
    d = right_cosets(G, H)
    for S in nrt_iter(d):
        for a in range(G.order):
            for b in range(G.order):
                pa, pb = chi(S, a), chi(S, b)
                assert chi(S, int(G.mul[a, b])) == tuple(pb[pa[i]] for i in range(d.n))


def test_torsion_from_loop_matches_group_side():
    G, H = pair("Sym(4)", "stab:4")
    d = right_cosets(G, H)
    for r in range(0, decomp_count(d), 5):
        S = nrt_unrank(d, r)
        assert set(group_torsion(S)) == loop_torsion(induced_loop(S))
        hs = h_s(S)
        assert set(hs.elements) <= set(H.elements)
        assert set(int(v) for v in defects(S).ravel()) <= set(hs.elements)


def test_quotient_correspondence_sym4_d8():
    G, H = pair("Sym(4)", "gens:(1,3);(1,2,3,4)")
    N = core(G, H)
    assert N.order == 4
    Q, HN, proj = quotient_pair(G, H, N)
    qd = right_cosets(Q, HN)
    d = right_cosets(G, H)
    for S in nrt_iter(d):
        T = project_transversal(S, qd, proj)
        assert are_isomorphic(induced_loop(S), induced_loop(T)) is not None


def test_torsion_depends_only_on_loop():
    # isomorphic loops from different pairs carry isomorphic torsion groups
    seen = {}
    hits = 0
    for expr, G, H in PAIRS:
        d = right_cosets(G, H)
        if d.n > 6 or decomp_count(d) > 512:
            continue
        for S in nrt_iter(d):
            form = canonical_form(induced_loop(S))
            gens = group_torsion(S)
            T = build_from_generators(d.n, gens)
            if form in seen:
                other_expr, U = seen[form]
                if other_expr != expr:
                    hits += 1
                assert groups_isomorphic(T, U)
            else:
                seen[form] = (expr, T)
    assert hits > 0
