"""Annealed gradient-based discrete sampling with specific-heat reheating."""

from .annealing import ChainTrace, Schedule, StateTrace, run_sa, temperature_at
from .diagnostics import (
    escape_sweep,
    escaping_rate,
    find_stop_point,
    hamming_curve,
    specific_heat_curve,
)
from .energies import (
    EnergyModel,
    MaxCliqueEnergy,
    MaxCutEnergy,
    MisEnergy,
    Toy1DEnergy,
    Toy2DEnergy,
    brute_force_optimum,
    finite_difference_gradient,
    make_model,
    repair,
)
from .graphs import (
    Graph,
    complement,
    gen_ba,
    gen_er,
    parse_dimacs,
    parse_edge_list,
    to_edge_list,
)
from .harness import ExperimentConfig, GraphSource, RunResult, run_experiment
from .reheat import (
    ReheatConfig,
    SpecificHeatTracker,
    WanderingDetector,
    run_resco,
    run_stepsize_ablation,
    specific_heat,
)
from .rng import SplitMix64, derive_seed
from .samplers import (
    SamplerConfig,
    StepOutcome,
    dmala_step,
    metropolis_accept,
    pas_step,
    random_walk_step,
)

__all__ = [
    "ChainTrace",
    "EnergyModel",
    "ExperimentConfig",
    "Graph",
    "GraphSource",
    "MaxCliqueEnergy",
    "MaxCutEnergy",
    "MisEnergy",
    "ReheatConfig",
    "RunResult",
    "SamplerConfig",
    "Schedule",
    "SpecificHeatTracker",
    "SplitMix64",
    "StateTrace",
    "StepOutcome",
    "Toy1DEnergy",
    "Toy2DEnergy",
    "WanderingDetector",
    "brute_force_optimum",
    "complement",
    "derive_seed",
    "dmala_step",
    "escape_sweep",
    "escaping_rate",
    "find_stop_point",
    "finite_difference_gradient",
    "gen_ba",
    "gen_er",
    "hamming_curve",
    "make_model",
    "metropolis_accept",
    "parse_dimacs",
    "parse_edge_list",
    "pas_step",
    "random_walk_step",
    "repair",
    "run_experiment",
    "run_resco",
    "run_sa",
    "run_stepsize_ablation",
    "specific_heat",
    "specific_heat_curve",
    "temperature_at",
    "to_edge_list",
]
