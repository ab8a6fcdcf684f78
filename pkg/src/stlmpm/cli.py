"""Command-line entry point: ``stlmpm {offline,monitor,proptest,dump-tree}``.

Exit codes: 0 on success (or a feas/sat conclusion), 2 when the monitor
issues a violation, 1 on errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .errors import MonitorError
from .monitor import RunStatus
from .scenario import (Scenario, check_property_scenario, gen_property_suite, run_monitor,
                       run_offline)


def _offline(args) -> int:
    scn = Scenario.load(args.scenario)
    _, summary = run_offline(scn, table_path=args.table, summary_path=args.summary)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _monitor(args) -> int:
    scn = Scenario.load(args.scenario)
    state = run_monitor(scn, table_path=args.table, verdicts_path=args.verdicts,
                        csv_path=args.csv, use_table=args.use_table)
    for r in state.log:
        print(f"k={r.k:3d} cell={r.cell:5d} {r.verdict.value:4s} root={r.root.symbol} {r.basic}")
    return 2 if state.status is RunStatus.CONCLUDED_VIO else 0


def _proptest(args) -> int:
    suite = gen_property_suite(args.seed, args.count, depth=args.depth)
    if args.emit:
        with open(args.emit, "w") as fh:
            json.dump(suite, fh, indent=1, sort_keys=True)
            fh.write("\n")
    t0 = time.perf_counter()
    totals = {"entries": 0, "mismatches": 0, "prefixes": 0, "prefix_mismatches": 0}
    for doc in suite:
        res = check_property_scenario(doc, n_traj=args.trajectories, n_prefix=args.prefixes)
        for key in totals:
            totals[key] += res[key]
        if res["mismatches"] or res["prefix_mismatches"]:
            print(f"MISMATCH {res['name']}: {doc['formula']}  {res}")
    totals["scenarios"] = len(suite)
    totals["wall_time_s"] = round(time.perf_counter() - t0, 2)
    print(json.dumps(totals, sort_keys=True))
    return 0 if not (totals["mismatches"] or totals["prefix_mismatches"]) else 1


def _dump_tree(args) -> int:
    scn = Scenario.load(args.scenario)
    _, tree = scn.build()
    print(tree.dump())
    print(f"formula horizon: {tree.formula_horizon()}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stlmpm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    o = sub.add_parser("offline", help="precompute and export the feasible-set table")
    o.add_argument("scenario")
    o.add_argument("--table", help="artifact path (default: scenario outputs.table)")
    o.add_argument("--summary", help="summary path (default: scenario outputs.summary)")
    o.set_defaults(func=_offline)

    m = sub.add_parser("monitor", help="run the monitor over the scenario trajectory")
    m.add_argument("scenario")
    m.add_argument("--table", help="preloaded table artifact (default: compute lazily)")
    m.add_argument("--use-table", action="store_true", help="load the scenario's outputs.table")
    m.add_argument("--verdicts", help="verdict log path (JSON lines)")
    m.add_argument("--csv", help="per-step CSV path")
    m.set_defaults(func=_monitor)

    t = sub.add_parser("proptest", help="random oracle-equivalence checks")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--count", type=int, default=100)
    t.add_argument("--depth", type=int, default=3)
    t.add_argument("--trajectories", type=int, default=10)
    t.add_argument("--prefixes", type=int, default=3)
    t.add_argument("--emit", help="write the generated scenarios to this JSON file")
    t.set_defaults(func=_proptest)

    d = sub.add_parser("dump-tree", help="print the syntax tree with evaluation horizons")
    d.add_argument("scenario")
    d.set_defaults(func=_dump_tree)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MonitorError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
