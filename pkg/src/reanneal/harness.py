"""Experiment harness: configuration, multi-chain runs, benchmarks, reports.

Configs are plain JSON (flags override keys); every run echoes the resolved
config into its output directory so results are reproducible from the
directory alone. Chain seeds derive from (master_seed, chain_index) through
the documented SplitMix64 stream, so enlarging a run never perturbs the
chains already in it.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .annealing import ChainTrace, Schedule, run_sa
from .diagnostics import escape_sweep, specific_heat_curve
from .energies import EnergyModel, brute_force_optimum, make_model, repair
from .graphs import Graph, gen_ba, gen_er, parse_graph
from .reheat import ReheatConfig, run_resco, run_stepsize_ablation
from .rng import derive_seed
from .samplers import SamplerConfig

DEFAULT_T_SKIP = {
    "mis": 200,
    "maxclique": 130,
    "maxcut": 200,
    "toy1d": 100,
    "toy2d": 100,
}


@dataclass
class GraphSource:
    """Where the instance graph comes from: a file or a seeded generator."""

    path: str | None = None
    fmt: str = "auto"
    generator: str | None = None
    n: int | None = None
    p: float | None = None
    m: int | None = None
    seed: int = 0

    def load(self) -> Graph:
        if (self.path is None) == (self.generator is None):
            raise ValueError("graph source needs exactly one of path or generator")
        if self.path is not None:
            import sys

            text = sys.stdin.read() if self.path == "-" else Path(self.path).read_text()
            return parse_graph(text, self.fmt)
        if self.generator == "er":
            if self.n is None or self.p is None:
                raise ValueError("er generator needs n and p")
            return gen_er(self.n, self.p, self.seed)
        if self.generator == "ba":
            if self.n is None or self.m is None:
                raise ValueError("ba generator needs n and m")
            return gen_ba(self.n, self.m, self.seed)
        raise ValueError(f"unknown generator {self.generator!r}")


@dataclass
class ExperimentConfig:
    problem: str = "toy2d"
    graph: GraphSource | None = None
    lam: float | None = None
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    t_init: float = 1.0
    t_final: float = 1e-3
    length: int = 20_000
    reheat: ReheatConfig | None = None
    chains: int = 1
    master_seed: int = 0
    state_stride: int | None = None
    init: str = "random"
    workers: int = 1

    def __post_init__(self):
        if self.chains < 1:
            raise ValueError(f"chains must be >= 1, got {self.chains}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    def schedule(self) -> Schedule:
        return Schedule(self.t_init, self.t_final, self.length)

    def build_model(self) -> EnergyModel:
        graph = self.graph.load() if self.graph is not None else None
        return make_model(self.problem, graph, self.lam)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["reheat"] = None if self.reheat is None else asdict(self.reheat)
        return d

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        raw = dict(raw)
        problem = raw.get("problem", "toy2d")
        graph = raw.get("graph")
        if isinstance(graph, dict):
            graph = GraphSource(**graph)
        sampler = raw.get("sampler", {})
        if isinstance(sampler, dict):
            sampler = SamplerConfig(**sampler)
        schedule = raw.pop("schedule", {})
        reheat = raw.get("reheat")
        if isinstance(reheat, dict):
            reheat = dict(reheat)
            reheat.setdefault("t_skip", DEFAULT_T_SKIP.get(problem, 200))
            reheat = ReheatConfig(**reheat)
        known = {
            "lam",
            "chains",
            "master_seed",
            "state_stride",
            "init",
            "workers",
            "length",
            "t_init",
            "t_final",
        }
        extra = {k: v for k, v in raw.items() if k in known}
        extra.update(
            {k: schedule[k] for k in ("t_init", "t_final", "length") if k in schedule}
        )
        unknown = set(raw) - known - {"problem", "graph", "sampler", "reheat"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(problem=problem, graph=graph, sampler=sampler, reheat=reheat, **extra)


@dataclass
class ChainResult:
    chain_index: int
    seed: int
    best_energy: float
    best_objective: float
    best_state: str
    repaired_objective: float | None
    reheat_count: int
    reheat_steps: tuple[int, ...]
    wall_clock_s: float
    trace_path: str | None


@dataclass
class RunResult:
    problem: str
    chains: list[ChainResult]
    aggregate_best_objective: float
    mean_best_objective: float
    aggregate_repaired_objective: float | None

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "chains": [asdict(c) for c in self.chains],
            "aggregate_best_objective": self.aggregate_best_objective,
            "mean_best_objective": self.mean_best_objective,
            "aggregate_repaired_objective": self.aggregate_repaired_objective,
        }


def state_to_str(state: np.ndarray) -> str:
    return "".join(str(int(b)) for b in state)


def _run_one_chain(
    model: EnergyModel, config: ExperimentConfig, chain_index: int
) -> tuple[ChainTrace, ChainResult]:
    seed = derive_seed(config.master_seed, chain_index)
    schedule = config.schedule()
    start = time.perf_counter()
    if config.reheat is not None:
        trace = run_resco(
            model,
            config.sampler,
            schedule,
            config.reheat,
            seed,
            init=config.init,
            state_stride=config.state_stride,
        )
    else:
        trace = run_sa(
            model,
            config.sampler,
            schedule,
            seed,
            init=config.init,
            state_stride=config.state_stride,
        )
    elapsed = time.perf_counter() - start
    repaired = None
    if config.problem in ("mis", "maxclique"):
        repaired = model.objective(repair(model, trace.best_state))
    result = ChainResult(
        chain_index=chain_index,
        seed=seed,
        best_energy=trace.best_energy,
        best_objective=-trace.best_energy,
        best_state=state_to_str(trace.best_state),
        repaired_objective=repaired,
        reheat_count=len(trace.reheat_steps),
        reheat_steps=trace.reheat_steps,
        wall_clock_s=elapsed,
        trace_path=None,
    )
    return trace, result


def _chain_job(args):
    config_dict, chain_index = args
    config = ExperimentConfig.from_dict(config_dict)
    model = config.build_model()
    return _run_one_chain(model, config, chain_index)


def run_experiment(
    config: ExperimentConfig, output_dir: str | Path | None = None
) -> tuple[RunResult, list[ChainTrace]]:
    """Run all chains of one experiment; optionally export traces + summary."""
    model = config.build_model()
    pairs: list[tuple[ChainTrace, ChainResult]] = []
    if config.workers > 1 and config.chains > 1:
        jobs = [(config.to_dict(), i) for i in range(config.chains)]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            pairs = list(pool.map(_chain_job, jobs))
    else:
        for i in range(config.chains):
            pairs.append(_run_one_chain(model, config, i))

    traces = [t for t, _ in pairs]
    results = [r for _, r in pairs]
    best = max(results, key=lambda r: r.best_objective)
    result = RunResult(
        problem=config.problem,
        chains=results,
        aggregate_best_objective=best.best_objective,
        mean_best_objective=float(np.mean([r.best_objective for r in results])),
        aggregate_repaired_objective=best.repaired_objective,
    )
    if output_dir is not None:
        _export_run(config, result, traces, Path(output_dir))
    return result, traces


def _export_run(
    config: ExperimentConfig,
    result: RunResult,
    traces: list[ChainTrace],
    outdir: Path,
) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    write_json(outdir / "config.json", config.to_dict())
    for res, trace in zip(result.chains, traces):
        name = f"chain_{res.chain_index:03d}.csv"
        write_trace_csv(outdir / name, trace)
        res.trace_path = name
        if trace.states is not None:
            write_states_csv(outdir / f"chain_{res.chain_index:03d}_states.csv", trace)
    write_json(outdir / "summary.json", result.to_dict())


def write_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_trace_csv(path: Path, trace: ChainTrace) -> None:
    reheats = set(trace.reheat_steps)
    best = np.minimum.accumulate(trace.energies)
    with open(path, "w") as fh:
        fh.write("step,energy,temperature,best_energy,reheat_flag\n")
        for t in range(1, trace.steps + 1):
            fh.write(
                f"{t},{trace.energies[t - 1]!r},{trace.temperatures[t - 1]!r},"
                f"{best[t - 1]!r},{1 if t in reheats else 0}\n"
            )


def write_states_csv(path: Path, trace: ChainTrace) -> None:
    with open(path, "w") as fh:
        fh.write("step,state\n")
        for step, state in zip(trace.states.step_indices, trace.states.states):
            fh.write(f"{step},{state_to_str(state)}\n")


def write_specific_heat_csv(path: Path, trace: ChainTrace, m: int) -> None:
    curve = specific_heat_curve(trace, m)
    with open(path, "w") as fh:
        fh.write("step,specific_heat\n")
        for step, value in curve:
            fh.write(f"{int(step)},{value!r}\n")


# ---------------------------------------------------------------------------
# benchmark over an instance directory


def run_bench(
    instance_dir: str | Path,
    base_config: ExperimentConfig,
    references: dict[str, float] | None = None,
    output_dir: str | Path | None = None,
) -> dict:
    """Solve every parseable graph file in a directory; report objectives
    and, when references are supplied, achieved/reference ratios. A bad
    instance becomes a failed row, never an abort."""
    instance_dir = Path(instance_dir)
    files = sorted(p for p in instance_dir.iterdir() if p.is_file())
    rows = []
    ratios = []
    failures = 0
    for path in files:
        row: dict = {"instance": path.name}
        try:
            cfg_dict = base_config.to_dict()
            cfg_dict["graph"] = {"path": str(path), "fmt": "auto"}
            cfg = ExperimentConfig.from_dict(cfg_dict)
            result, _ = run_experiment(cfg)
        except (ValueError, OSError) as exc:
            row["error"] = str(exc)
            failures += 1
            rows.append(row)
            continue
        row["best_objective"] = result.aggregate_best_objective
        row["repaired_objective"] = result.aggregate_repaired_objective
        if references and path.name in references:
            ref = references[path.name]
            row["reference"] = ref
            row["ratio"] = result.aggregate_best_objective / ref
            ratios.append(row["ratio"])
        rows.append(row)
    report = {
        "instances": rows,
        "failures": failures,
        "mean_ratio": float(np.mean(ratios)) if ratios else None,
    }
    if output_dir is not None:
        outdir = Path(output_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        write_json(outdir / "bench.json", report)
        (outdir / "bench.txt").write_text(format_bench_table(report))
    return report


def format_bench_table(report: dict) -> str:
    header = f"{'instance':<30} {'objective':>12} {'reference':>12} {'ratio':>8}"
    lines = [header, "-" * len(header)]
    for row in report["instances"]:
        if "error" in row:
            lines.append(f"{row['instance']:<30} FAILED: {row['error']}")
            continue
        ref = row.get("reference")
        ratio = row.get("ratio")
        lines.append(
            f"{row['instance']:<30} {row['best_objective']:>12.4f} "
            f"{ref if ref is not None else '-':>12} "
            f"{f'{ratio:.4f}' if ratio is not None else '-':>8}"
        )
    if report["mean_ratio"] is not None:
        lines.append(f"mean ratio: {report['mean_ratio']:.4f}")
    lines.append(f"failures: {report['failures']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# stepsize-override ablation


def run_ablation(config: ExperimentConfig, alpha2: float) -> dict:
    """Paired comparison: untouched dmala annealing vs the stepsize-override
    arm, same per-chain seeds. Reproduces the null result that raising the
    stepsize on detection does not substitute for reheating."""
    if config.sampler.kind != "dmala":
        raise ValueError("stepsize ablation requires the dmala sampler")
    if alpha2 <= 0:
        raise ValueError(f"alpha2 must be positive, got {alpha2}")
    if config.reheat is None:
        raise ValueError("stepsize ablation needs a reheat config for detection")
    model = config.build_model()
    schedule = config.schedule()
    override_cfg = SamplerConfig(
        kind="dmala",
        alpha=config.sampler.alpha,
        path_length=config.sampler.path_length,
        balancing=config.sampler.balancing,
        stepsize_override=alpha2,
    )
    rows = []
    for i in range(config.chains):
        seed = derive_seed(config.master_seed, i)
        base = run_sa(model, config.sampler, schedule, seed, init=config.init)
        over, detections = run_stepsize_ablation(
            model, override_cfg, schedule, config.reheat, seed, init=config.init
        )
        rows.append(
            {
                "chain_index": i,
                "seed": seed,
                "baseline_best_objective": -base.best_energy,
                "override_best_objective": -over.best_energy,
                "detections": len(detections),
            }
        )
    base_mean = float(np.mean([r["baseline_best_objective"] for r in rows]))
    over_mean = float(np.mean([r["override_best_objective"] for r in rows]))
    return {
        "alpha1": config.sampler.alpha,
        "alpha2": alpha2,
        "chains": rows,
        "baseline_mean": base_mean,
        "override_mean": over_mean,
    }


# ---------------------------------------------------------------------------
# small wrappers used by the CLI


def run_escape_table(
    sampler: SamplerConfig, temperatures, trials: int, steps: int, seed: int
) -> str:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rows = escape_sweep(sampler, temperatures, trials, steps, seed)
    lines = ["temperature,escape_rate"]
    lines.extend(f"{T!r},{rate!r}" for T, rate in rows)
    return "\n".join(lines) + "\n"


def run_oracle(graph: Graph, problem: str, lam: float | None = None) -> tuple[float, str]:
    model = make_model(problem, graph, lam)
    state, energy = brute_force_optimum(model)
    return -energy, state_to_str(state)
