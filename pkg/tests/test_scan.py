import pytest

from nrtkit.scan import PairRecord, check_theorems, scan_theorems


@pytest.fixture(scope="module")
def sym4_scan():
    return scan_theorems(ambient="Sym(4)")


def test_sym4_scan_covers_all_pairs(sym4_scan):
    # 11 conjugacy classes of subgroups, each taken with all of its own subgroups
    assert len(sym4_scan.records) > 50
    assert not sym4_scan.skipped
    assert sym4_scan.passed


def test_scan_is_independent_of_workers(sym4_scan):
    other = scan_theorems(ambient="Sym(4)", jobs=2)
    assert other.dumps() == sym4_scan.dumps()


def test_normal_pairs_have_phi_one(sym4_scan):
    for r in sym4_scan.records:
        assert (r.phi == 1) == r.normal


def test_budget_skips_are_reported():
    v = scan_theorems(ambient="Sym(4)", bound=100)
    assert v.skipped
    assert all(r.phi is None and r.skipped_reason for r in v.skipped)
    assert "skipped" in v.to_json()


def test_theorem_checker_flags_counterexamples():
    fake = [PairRecord("X", 8, [0, 1], 2, 4, False, True, 4, "classified"),
            PairRecord("Y", 6, [0, 1], 2, 3, True, False, 1, "classified")]
    results = {t.name: t for t in check_theorems(fake)}
    assert not results["phi != 4"].passed
    assert results["phi != 4"].counterexamples[0]["group"] == "X"
    assert results["phi = 1 iff H normal"].passed
