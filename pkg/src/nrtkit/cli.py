"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource bound.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections import Counter

from .cache import cache_load, cache_store, default_cache_dir
from .catalog import select_subgroup
from .errors import NRTError, ParseError, ResourceBoundError, ValidationError
from .expr import group
from .groups import automorphisms, center, core, is_normal, subgroups_all
from .loops import census
from .orbits import ClassifyOptions, burnside_conjugation_count, classify_pair
from .scan import scan_theorems
from .transversal import nrt_count

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


def _emit(fmt: str, rows: list[dict], doc: dict | None = None) -> None:
    if fmt == "json":
        print(json.dumps(doc if doc is not None else rows, sort_keys=True, indent=1))
    elif fmt == "csv":
        if rows:
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
            print(buf.getvalue(), end="")
    else:
        if not rows:
            return
        cols = list(rows[0])
        widths = {c: max(len(c), *(len(str(r[c])) for r in rows)) for c in cols}
        print("  ".join(c.ljust(widths[c]) for c in cols))
        for r in rows:
            print("  ".join(str(r[c]).ljust(widths[c]) for c in cols))


def cmd_group_info(args) -> int:
    G = group(args.expr)
    info = {"group": G.label, "order": G.order, "abelian": G.is_abelian(),
            "center_order": center(G).order, "hash": G.content_hash}
    if G.order <= 48:
        subs = subgroups_all(G)
        by_order = Counter(h.order for h in subs)
        info["subgroups"] = len(subs)
        info["subgroups_by_order"] = " ".join(f"{k}:{by_order[k]}" for k in sorted(by_order))
        info["automorphisms"] = len(automorphisms(G))
    _emit(args.format, [info], info)
    return EXIT_OK


def cmd_subgroups(args) -> int:
    G = group(args.expr)
    rows = []
    for i, H in enumerate(subgroups_all(G)):
        rows.append({"index": i, "order": H.order, "normal": is_normal(G, H), "core": core(G, H).order,
                     "elements": " ".join(H.names()) if args.names else ",".join(map(str, H.elements))})
    _emit(args.format, rows)
    return EXIT_OK


def cmd_nrt_count(args) -> int:
    G = group(args.expr)
    H = select_subgroup(G, args.subgroup)
    row = {"group": G.label, "m": H.order, "n": H.index, "nrt_count": nrt_count(G, H)}
    _emit(args.format, [row], row)
    return EXIT_OK


def cmd_classify(args) -> int:
    G = group(args.expr)
    H = select_subgroup(G, args.subgroup)
    cache_dir = args.cache or default_cache_dir()
    report = None
    if cache_dir:
        report = cache_load(cache_dir, G.content_hash, H.elements)
        if report is not None and args.orbits and report.orbits is None:
            report = None
    if report is None:
        report = classify_pair(G, H, ClassifyOptions(orbits=args.orbits, jobs=args.jobs))
        if cache_dir:
            cache_store(cache_dir, report)
    if args.format == "json":
        _emit("json", [], report.to_json())
        return EXIT_OK
    row = {"group": G.label, "subgroup": ",".join(map(str, H.elements)), "m": report.m, "n": report.n,
           "phi": report.phi, "orbit_count": report.orbits.orbit_count if report.orbits else "",
           "wall_time": f"{report.seconds:.3f}"}
    if args.format == "csv":
        _emit("csv", [row])
        return EXIT_OK
    _emit("table", [row])
    print()
    _emit("table", [{"class": i, "size": c.size, "rep_rank": c.representative_rank,
                     "generates_G": c.generates_group, "subgroup": c.is_subgroup, "torsion": c.torsion_order}
                    for i, c in enumerate(report.classes)])
    if report.orbits:
        print(f"\norbit lengths: {report.orbits.lengths}")
        print(f"orbits refine classes: {report.orbits_refine_classes}")
    return EXIT_OK


def cmd_census(args) -> int:
    res = census(args.n, jobs=args.jobs)
    if args.format == "json":
        _emit("json", [], res.to_json())
    elif args.format == "csv":
        _emit("csv", [{"n": res.n, "labeled_count": res.labeled, "T_n": res.count, "wall_time": f"{res.seconds:.3f}"}])
    else:
        print(res.count)
    return EXIT_OK


def cmd_burnside(args) -> int:
    G = group(args.expr)
    H = select_subgroup(G, args.subgroup)
    value = burnside_conjugation_count(G, H, jobs=args.jobs)
    if args.format == "table":
        print(value)
    else:
        _emit(args.format, [{"group": G.label, "m": H.order, "n": H.index, "orbits": value}],
              {"group": G.label, "subgroup": list(H.elements), "orbits": value})
    return EXIT_OK


def cmd_scan(args) -> int:
    verdict = scan_theorems(max_order=args.max_order, ambient=args.ambient, jobs=args.jobs)
    if args.format == "json":
        print(verdict.dumps())
    else:
        rows = [{"group": r.group, "subgroup": ",".join(map(str, r.subgroup)), "m": r.m, "n": r.n,
                 "normal": r.normal, "corefree": r.corefree, "phi": r.phi, "method": r.method,
                 "wall_time": f"{r.seconds:.3f}"} for r in verdict.records]
        _emit(args.format, rows)
        if args.format == "table":
            print(f"\nconsistency check over {len(verdict.records)} pairs ({len(verdict.skipped)} skipped)")
            for r in verdict.skipped:
                print(f"  skipped {r.group} {r.subgroup}: {r.skipped_reason}")
            for t in verdict.theorems:
                print(f"  [{'PASS' if t.passed else 'FAIL'}] {t.name}" +
                      (f"  counterexamples: {t.counterexamples[:3]}" if t.counterexamples else ""))
    return EXIT_OK if verdict.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    from .verify import run_reference_suite

    results = run_reference_suite()
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nrtkit", description="Normalized right transversals and their right loops.")
    sub = p.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=["table", "json", "csv"], default="table")

    g = sub.add_parser("group", help="group commands")
    gsub = g.add_subparsers(dest="group_command", required=True)
    gi = gsub.add_parser("info", parents=[fmt], help="basic facts about a group")
    gi.add_argument("expr")
    gi.set_defaults(func=cmd_group_info)

    s = sub.add_parser("subgroups", parents=[fmt], help="list all subgroups")
    s.add_argument("expr")
    s.add_argument("--names", action="store_true", help="show element names instead of indices")
    s.set_defaults(func=cmd_subgroups)

    n = sub.add_parser("nrt", help="transversal commands")
    nsub = n.add_subparsers(dest="nrt_command", required=True)
    nc = nsub.add_parser("count", parents=[fmt], help="number of normalized right transversals")
    nc.add_argument("expr")
    nc.add_argument("--subgroup", required=True)
    nc.set_defaults(func=cmd_nrt_count)

    c = sub.add_parser("classify", parents=[fmt], help="isomorphism classes of induced right loops")
    c.add_argument("expr")
    c.add_argument("--subgroup", required=True)
    c.add_argument("--orbits", action="store_true", help="also compute Aut_H(G) orbits")
    c.add_argument("--cache", default=None, help="cache directory (default: $NRTKIT_CACHE)")
    c.add_argument("--jobs", type=int, default=1)
    c.set_defaults(func=cmd_classify)

    ce = sub.add_parser("census", parents=[fmt], help="count right loops of order n")
    ce.add_argument("n", type=int)
    ce.add_argument("--jobs", type=int, default=1)
    ce.set_defaults(func=cmd_census)

    b = sub.add_parser("burnside", parents=[fmt], help="conjugation orbits of H on transversals")
    b.add_argument("expr")
    b.add_argument("--subgroup", required=True)
    b.add_argument("--jobs", type=int, default=1)
    b.set_defaults(func=cmd_burnside)

    sc = sub.add_parser("scan", parents=[fmt], help="check phi statements over catalog pairs")
    sc.add_argument("--max-order", type=int, default=None)
    sc.add_argument("--ambient", choices=["Sym(4)", "catalog"], default="catalog")
    sc.add_argument("--jobs", type=int, default=1)
    sc.set_defaults(func=cmd_scan)

    v = sub.add_parser("verify", help="run the literature-value suite")
    v.add_argument("--suite", choices=["paper"], default="paper")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except ResourceBoundError as e:
        print(f"resource bound: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ParseError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NRTError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
