"""Command line entry point: ``toposim <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .engine import InconclusiveStream, NonInterferenceWindow, verify_noninterference
from .graphs import BASELINES, compare_baselines, gen_ba, gen_cm, gen_er, metrics, read_graph, table_json
from .harness import (
    EXIT_CONFIG, EXIT_INVARIANT, EXIT_PRECONDITION, ConfigError, InvariantBreach, PreconditionFailure,
    Scenario, bench_speedup, load_scenario, run_scenario, sweep_recall_vs_futures, sweep_recall_vs_group,
)
from .harness.pipeline import relabel
from .netsim import BlockRecord, write_edge_list

EXIT_FAIL = 1


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _models(text: str) -> list[str]:
    out = [x.strip().lower() for x in text.split(",") if x.strip()]
    bad = [m for m in out if m not in BASELINES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown baseline {bad[0]!r}")
    return out


def read_block_stream(path: str) -> list[BlockRecord]:
    """CSV ``height,produce_time,gas_used_fraction,included_tx_prices`` with prices joined by ';'."""
    blocks = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.DictReader(fh), 2):
            try:
                prices = tuple(Fraction(p) for p in (row.get("included_tx_prices") or "").split(";") if p.strip())
                blocks.append(BlockRecord(int(row["height"]), float(row["produce_time"]),
                                          Fraction(row["gas_used_fraction"]), prices))
            except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"{path}:{lineno}: bad block row ({exc})") from None
    return blocks


def write_block_stream(blocks: Sequence[BlockRecord], path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["height", "produce_time", "gas_used_fraction", "included_tx_prices"])
        for b in blocks:
            w.writerow([b.height, b.produce_time, str(b.gas_used_fraction), ";".join(map(str, b.included_tx_prices))])


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> int:
    if args.model == "er":
        if args.edges is None:
            raise ConfigError("--edges is required for er")
        g = gen_er(args.nodes, args.edges, args.seed)
    elif args.model == "ba":
        if args.avg_degree is None:
            raise ConfigError("--avg-degree is required for ba")
        g = gen_ba(args.nodes, args.avg_degree, args.seed, halve=args.halve)
    else:
        if not args.degree_seq:
            raise ConfigError("--degree-seq is required for cm")
        g = gen_cm(args.degree_seq, args.seed)
    write_edge_list(relabel(g), args.out)
    return 0


def _scenario_for(args) -> Scenario:
    sc = load_scenario(args.config) if args.config else Scenario()
    changes = {"topology_file": args.topology, "model": None, "mode": args.mode, "group_size": args.group_size}
    return sc.with_(**changes, output=args.out)


def cmd_measure(args) -> int:
    res = run_scenario(_scenario_for(args), args.out)
    print(res.message)
    return res.code


def cmd_run(args) -> int:
    res = run_scenario(args.scenario, args.out)
    print(res.message)
    return res.code


def cmd_analyze(args) -> int:
    g = read_graph(args.graph)
    if g.number_of_nodes() == 0:
        raise ConfigError(f"{args.graph}: empty graph")
    if args.baselines:
        table = compare_baselines(g, args.runs, args.seed, models=args.baselines)
    else:
        table = {"measured": metrics(g, args.runs, args.seed)}
    _emit(table_json(table), args.out)
    return 0


def cmd_validate(args) -> int:
    sc = load_scenario(args.scenario)
    kind = args.sweep or sc.sweep
    values = args.values or list(sc.sweep_values)
    if kind is None or not values:
        raise ConfigError("validate needs a sweep kind and values")
    if kind == "futures":
        rows = [{"Z": z, "recall": str(r)} for z, r in sweep_recall_vs_futures(sc, values)]
    else:
        rows = [{"K": k, "precision": str(p), "recall": str(r)} for k, p, r in sweep_recall_vs_group(sc, values)]
    _emit(json.dumps({"sweep": kind, "points": rows}, indent=2) + "\n", args.out)
    return 0


def cmd_bench(args) -> int:
    rows = bench_speedup(load_scenario(args.scenario), args.group_sizes)
    _emit(json.dumps({"rows": rows}, indent=2) + "\n", args.out)
    return 0


def cmd_verify_blocks(args) -> int:
    blocks = read_block_stream(args.stream)
    w = NonInterferenceWindow(args.t1, args.t2, args.expiry, Fraction(args.y0))
    try:
        res = verify_noninterference(blocks, w)
    except InconclusiveStream as exc:
        print(f"inconclusive: {exc}")
        return EXIT_PRECONDITION
    print(json.dumps(res.as_dict(), sort_keys=True))
    return 0 if res.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toposim", description="Overlay topology measurement simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random graph as an edge list")
    g.add_argument("--model", choices=BASELINES, required=True)
    g.add_argument("--nodes", type=int)
    g.add_argument("--edges", type=int)
    g.add_argument("--degree-seq", type=_ints)
    g.add_argument("--avg-degree", type=int)
    g.add_argument("--halve", action="store_true", help="BA attachment round(l'/2) instead of l'")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    m = sub.add_parser("measure", help="measure a topology file end to end")
    m.add_argument("--topology", required=True)
    m.add_argument("--mode", choices=("serial", "parallel"), default="serial")
    m.add_argument("--group-size", type=int, default=1)
    m.add_argument("--config")
    m.add_argument("--out", required=True, help="output directory")
    m.set_defaults(func=cmd_measure)

    a = sub.add_parser("analyze", help="graph statistics with optional baselines")
    a.add_argument("--graph", required=True)
    a.add_argument("--baselines", type=_models, default=[])
    a.add_argument("--runs", type=int, default=10)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("validate", help="recall sweeps over Z or K")
    v.add_argument("--scenario", required=True)
    v.add_argument("--sweep", choices=("futures", "group"))
    v.add_argument("--values", type=_ints)
    v.add_argument("--out")
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("bench", help="parallel speedup table")
    b.add_argument("--scenario", required=True)
    b.add_argument("--group-sizes", type=_ints, required=True)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    vb = sub.add_parser("verify-blocks", help="non-interference check over a block stream")
    vb.add_argument("--stream", required=True)
    vb.add_argument("--t1", type=float, required=True)
    vb.add_argument("--t2", type=float, required=True)
    vb.add_argument("--expiry", type=float, required=True)
    vb.add_argument("--y0", required=True)
    vb.set_defaults(func=cmd_verify_blocks)

    r = sub.add_parser("run", help="run a scenario file")
    r.add_argument("scenario")
    r.add_argument("--out")
    r.set_defaults(func=cmd_run)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PreconditionFailure as exc:
        print(f"precondition failure: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except InvariantBreach as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
