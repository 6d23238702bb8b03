"""Command-line interface.

Subcommands: solve, bench, escape, ablate-stepsize, oracle, gen-graph.
Configuration comes from a JSON file; any flag given on the command line
overrides the corresponding config key. Exit code 0 on success, 2 on
validation or I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .diagnostics import specific_heat_curve
from .graphs import GraphFormatError, gen_ba, gen_er, parse_graph, to_dimacs, to_edge_list
from .harness import (
    ExperimentConfig,
    format_bench_table,
    run_ablation,
    run_bench,
    run_escape_table,
    run_experiment,
    run_oracle,
    write_json,
    write_specific_heat_csv,
)
from .samplers import SamplerConfig


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reanneal",
        description="Annealed gradient-based discrete sampling with reheating",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run annealing chains on one instance")
    solve.add_argument("--config", type=Path, help="JSON experiment config")
    solve.add_argument("--problem", choices=["mis", "maxclique", "maxcut", "toy1d", "toy2d"])
    solve.add_argument("--graph", help="graph file path, or - for stdin")
    solve.add_argument("--graph-format", choices=["auto", "edgelist", "dimacs"])
    solve.add_argument("--generator", choices=["er", "ba"])
    solve.add_argument("--n", type=int)
    solve.add_argument("--p", type=float)
    solve.add_argument("--m", type=int, help="attachment count for the ba generator")
    solve.add_argument("--graph-seed", type=int)
    solve.add_argument("--lambda", dest="lam", type=float)
    solve.add_argument("--sampler", choices=["random-walk", "rw", "dmala", "path-aux", "pas"])
    solve.add_argument("--alpha", type=float)
    solve.add_argument("--path-length", type=int)
    solve.add_argument("--balancing", choices=["sqrt", "ratio"])
    solve.add_argument("--t-init", type=float)
    solve.add_argument("--t-final", type=float)
    solve.add_argument("--length", type=int)
    solve.add_argument("--chains", type=int)
    solve.add_argument("--master-seed", type=int)
    solve.add_argument("--reheat", choices=["on", "off"])
    solve.add_argument("--epsilon", type=float, help="wandering value threshold")
    solve.add_argument("--wandering-length", type=int, help="consecutive-step threshold")
    solve.add_argument("--sample-size", type=int, help="specific-heat window size")
    solve.add_argument("--t-skip", type=int)
    solve.add_argument("--state-stride", type=int)
    solve.add_argument("--init", choices=["random", "zeros"])
    solve.add_argument("--workers", type=int)
    solve.add_argument("--out", type=Path, help="output directory for traces + summary")
    solve.add_argument(
        "--specific-heat-csv",
        action="store_true",
        help="also export the windowed specific-heat curve per chain",
    )

    bench = sub.add_parser("bench", help="solve every instance in a directory")
    bench.add_argument("--instances", type=Path, required=True)
    bench.add_argument("--config", type=Path, help="base JSON config")
    bench.add_argument("--references", type=Path, help="JSON {instance: objective}")
    bench.add_argument("--out", type=Path)

    escape = sub.add_parser("escape", help="escape-rate sweep on the 2-bit well")
    escape.add_argument("--sampler", default="dmala")
    escape.add_argument("--alpha", type=float, default=0.2)
    escape.add_argument("--path-length", type=int, default=1)
    escape.add_argument("--balancing", choices=["sqrt", "ratio"], default="sqrt")
    escape.add_argument("--temperatures", required=True, help="comma-separated list")
    escape.add_argument("--trials", type=int, required=True)
    escape.add_argument("--steps", type=int, default=20)
    escape.add_argument("--seed", type=int, default=0)
    escape.add_argument("--out", type=Path, help="CSV path (default: stdout)")

    ablate = sub.add_parser(
        "ablate-stepsize", help="swap dmala stepsize on detection instead of reheating"
    )
    ablate.add_argument("--config", type=Path, required=True)
    ablate.add_argument("--alpha2", type=float, required=True)
    ablate.add_argument("--out", type=Path, help="JSON report path")

    oracle = sub.add_parser("oracle", help="exact optimum by exhaustive enumeration")
    oracle.add_argument("--graph", required=True, help="graph file path, or - for stdin")
    oracle.add_argument("--format", choices=["auto", "edgelist", "dimacs"], default="auto")
    oracle.add_argument("--problem", required=True, choices=["mis", "maxclique", "maxcut"])
    oracle.add_argument("--lambda", dest="lam", type=float)

    gen = sub.add_parser("gen-graph", help="write a seeded random graph")
    gen.add_argument("--model", choices=["er", "ba"], required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=float)
    gen.add_argument("--m", type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--format", choices=["edgelist", "dimacs"], default="edgelist")
    gen.add_argument("--out", help="output path, or - for stdout", default="-")

    return parser


def _read_graph_text(source: str) -> str:
    return sys.stdin.read() if source == "-" else Path(source).read_text()


def _solve_config(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    if args.config is not None:
        cfg = json.loads(args.config.read_text())
    if args.problem:
        cfg["problem"] = args.problem
    if args.graph:
        cfg["graph"] = {"path": args.graph, "fmt": args.graph_format or "auto"}
    elif args.generator:
        g = {"generator": args.generator, "n": args.n, "seed": args.graph_seed or 0}
        if args.p is not None:
            g["p"] = args.p
        if args.m is not None:
            g["m"] = args.m
        cfg["graph"] = g
    if args.lam is not None:
        cfg["lam"] = args.lam
    sampler = cfg.setdefault("sampler", {})
    for key, val in [
        ("kind", args.sampler),
        ("alpha", args.alpha),
        ("path_length", args.path_length),
        ("balancing", args.balancing),
    ]:
        if val is not None:
            sampler[key] = val
    schedule = cfg.setdefault("schedule", {})
    for key, val in [
        ("t_init", args.t_init),
        ("t_final", args.t_final),
        ("length", args.length),
    ]:
        if val is not None:
            schedule[key] = val
    if args.reheat == "off":
        cfg["reheat"] = None
    elif args.reheat == "on" and not isinstance(cfg.get("reheat"), dict):
        cfg["reheat"] = {}
    for key, val in [
        ("epsilon", args.epsilon),
        ("n_threshold", args.wandering_length),
        ("m", args.sample_size),
        ("t_skip", args.t_skip),
    ]:
        if val is not None:
            if not isinstance(cfg.get("reheat"), dict):
                cfg["reheat"] = {}
            cfg["reheat"][key] = val
    for key, val in [
        ("chains", args.chains),
        ("master_seed", args.master_seed),
        ("state_stride", args.state_stride),
        ("init", args.init),
        ("workers", args.workers),
    ]:
        if val is not None:
            cfg[key] = val
    return cfg


def _cmd_solve(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_dict(_solve_config(args))
    result, traces = run_experiment(config, args.out)
    if args.specific_heat_csv and args.out is not None:
        m = config.reheat.m if config.reheat is not None else 100
        for res, trace in zip(result.chains, traces):
            write_specific_heat_csv(
                args.out / f"chain_{res.chain_index:03d}_specific_heat.csv", trace, m
            )
    print(f"aggregate best objective: {result.aggregate_best_objective!r}")
    if result.aggregate_repaired_objective is not None:
        print(f"aggregate repaired objective: {result.aggregate_repaired_objective!r}")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    base = ExperimentConfig.from_dict(
        json.loads(args.config.read_text()) if args.config else {}
    )
    references = None
    if args.references is not None:
        references = json.loads(args.references.read_text())
    report = run_bench(args.instances, base, references, args.out)
    if not report["instances"]:
        print("warning: no instances found", file=sys.stderr)
    print(format_bench_table(report), end="")
    return 0


def _cmd_escape(args: argparse.Namespace) -> int:
    sampler = SamplerConfig(
        kind=args.sampler,
        alpha=args.alpha,
        path_length=args.path_length,
        balancing=args.balancing,
    )
    temperatures = [float(tok) for tok in args.temperatures.split(",") if tok]
    table = run_escape_table(sampler, temperatures, args.trials, args.steps, args.seed)
    if args.out is not None:
        args.out.write_text(table)
    else:
        print(table, end="")
    return 0


def _cmd_ablate(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_dict(json.loads(args.config.read_text()))
    report = run_ablation(config, args.alpha2)
    if args.out is not None:
        write_json(args.out, report)
    print(f"baseline mean best objective: {report['baseline_mean']!r}")
    print(f"override mean best objective: {report['override_mean']!r}")
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    graph = parse_graph(_read_graph_text(args.graph), args.format)
    value, state = run_oracle(graph, args.problem, args.lam)
    print(f"optimum objective: {value!r}")
    print(f"optimum state: {state}")
    return 0


def _cmd_gen_graph(args: argparse.Namespace) -> int:
    if args.model == "er":
        if args.p is None:
            raise ValueError("er generator needs --p")
        graph = gen_er(args.n, args.p, args.seed)
    else:
        if args.m is None:
            raise ValueError("ba generator needs --m")
        graph = gen_ba(args.n, args.m, args.seed)
    text = to_edge_list(graph) if args.format == "edgelist" else to_dimacs(graph)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "bench": _cmd_bench,
    "escape": _cmd_escape,
    "ablate-stepsize": _cmd_ablate,
    "oracle": _cmd_oracle,
    "gen-graph": _cmd_gen_graph,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, GraphFormatError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
