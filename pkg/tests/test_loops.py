import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nrtkit.errors import ResourceBoundError
from nrtkit.expr import group
from nrtkit.loops import (
    RightLoopTable,
    are_isomorphic,
    canonical_form,
    canonical_form_batch,
    canonical_keys,
    census,
    census_shard_tables,
    classify_loops,
    fingerprint,
    generated_canonical_form,
    group_loop,
    iter_labeled_right_loops,
    key_to_form,
    labeled_right_loop_count,
    merge_key_counts,
    validate_right_loop,
)
from nrtkit.orbits import classify_pair
from nrtkit.transversal import induced_loop, nrt_iter, right_cosets

from conftest import pair


def random_right_loop(n: int, rng: random.Random) -> RightLoopTable:
    """Column y is a random R_y with R_y(0) = y; column 0 is the identity."""
    op = np.zeros((n, n), dtype=np.int64)
    op[:, 0] = np.arange(n)
    for y in range(1, n):
        rest = list(range(n))
        rest.remove(y)
        rng.shuffle(rest)
        op[0, y] = y
        op[1:, y] = rest
    return RightLoopTable.from_rows(op)


def random_relabel(t: RightLoopTable, rng: random.Random) -> RightLoopTable:
    f = list(range(1, t.order))
    rng.shuffle(f)
    return t.relabel([0] + f)


def brute_canonical(t: RightLoopTable) -> tuple:
    n = t.order
    best = None
    for rest in itertools.permutations(range(1, n)):
        cells = tuple(t.relabel((0,) + rest).flat())
        if best is None or cells < best:
            best = cells
    return best


def test_random_loops_are_valid():
    rng = random.Random(3)
    for n in range(1, 7):
        assert validate_right_loop(random_right_loop(n, rng))


def test_validation_rejects():
    assert not validate_right_loop(RightLoopTable.from_rows([[0, 1], [1, 1]]))
    # right translations bijective but no left identity
    assert not validate_right_loop(RightLoopTable.from_rows([[1, 0], [0, 1]]))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_canonical_form_matches_bruteforce(n):
    rng = random.Random(n)
    for _ in range(15):
        t = random_right_loop(n, rng)
        assert canonical_form(t).to_list() == list(brute_canonical(t))


@pytest.mark.parametrize("n", [1, 2, 4, 5, 6])
def test_exhaustive_and_batched_routes_agree(n):
    rng = random.Random(100 + n)
    tables = [random_right_loop(n, rng) for _ in range(20)]
    batch = canonical_form_batch(np.stack([t.op for t in tables]))
    assert batch == [canonical_form(t) for t in tables]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_canonical_form_is_relabeling_invariant(seed):
    rng = random.Random(seed)
    t = random_right_loop(5, rng)
    u = random_relabel(t, rng)
    assert canonical_form(t) == canonical_form(u)
    assert generated_canonical_form(t) == generated_canonical_form(u)
    assert fingerprint(t) == fingerprint(u)
    f = are_isomorphic(t, u)
    assert f is not None
    assert t.relabel(f) == u


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_distinct_forms_are_not_isomorphic(seed):
    rng = random.Random(seed)
    a, b = random_right_loop(4, rng), random_right_loop(4, rng)
    same = canonical_form(a) == canonical_form(b)
    assert same == (are_isomorphic(a, b) is not None)


def test_group_loops():
    for expr in ["C(4)", "C(2) x C(2)", "Sym(3)", "D(8)", "Q8"]:
        t = group_loop(group(expr).mul)
        assert validate_right_loop(t) and t.is_associative()
    c4, v4 = group_loop(group("C(4)").mul), group_loop(group("C(2) x C(2)").mul)
    assert are_isomorphic(c4, v4) is None
    assert canonical_form(c4) != canonical_form(v4)


def test_fingerprint_soundness_on_order_4_census():
    # a fingerprint is an invariant: every labeled loop shares it with its canonical form
    for t in iter_labeled_right_loops(4):
        assert fingerprint(t) == fingerprint(canonical_form(t).table())
    prints = {fingerprint(f.table()) for f in census(4).classes}
    assert 1 < len(prints) <= 44


def test_labeled_counts():
    assert labeled_right_loop_count(3) == 4
    assert labeled_right_loop_count(4) == 6 ** 3
    assert sum(1 for _ in iter_labeled_right_loops(4)) == 216
    assert all(validate_right_loop(t) for t in iter_labeled_right_loops(3))


def test_census_small_values():
    assert [census(n).count for n in (1, 2, 3, 4)] == [1, 1, 3, 44]
    with pytest.raises(ResourceBoundError):
        census(6)


def test_census_order_4_matches_streaming_classifier():
    streamed = classify_loops(iter_labeled_right_loops(4), chunk=50)
    assert set(streamed) == set(census(4).classes)
    assert sum(c.count for c in streamed.values()) == 216


@pytest.mark.parametrize("n", [3, 4, 5])
def test_census_matches_sym_classification(n):
    G, H = pair(f"Sym({n})", f"stab:{n}")
    rep = classify_pair(G, H)
    res = census(n)
    assert {tuple(c.canonical) for c in rep.classes} == {tuple(f.to_list()) for f in res.classes}


def test_shard_merge_is_order_independent():
    n = 4
    parts = []
    for first in range(6):
        keys = canonical_keys(census_shard_tables(n, first))
        uniq, counts = np.unique(keys, axis=0, return_counts=True)
        parts.append({tuple(int(v) for v in u): (int(c), first) for u, c in zip(uniq, counts)})
    a = merge_key_counts(parts)
    b = merge_key_counts(reversed(parts))
    assert a == b
    assert len(a) == 44 and sum(c for c, _ in a.values()) == 216
    assert {key_to_form(np.array(k), n) for k in a} == set(census(4).classes)


def test_induced_loops_of_normal_subgroup_are_groups():
    G, H = pair("Sym(4)", "gens:(1,2)(3,4);(1,3)(2,4)")
    for S in nrt_iter(right_cosets(G, H)):
        t = induced_loop(S)
        assert t.is_associative()
        assert are_isomorphic(t, group_loop(group("Sym(3)").mul)) is not None
