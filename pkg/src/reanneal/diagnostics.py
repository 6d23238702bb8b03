"""Post-hoc trace analysis: stop points, distance curves, specific-heat
curves, and the constant-temperature escape experiment on the 2-bit well."""

from __future__ import annotations

import numpy as np

from .annealing import ChainTrace, StateTrace
from .energies import Toy2DEnergy
from .reheat import specific_heat
from .rng import derive_seed
from .samplers import SamplerConfig, make_kernel

_ESCAPE_CHUNK = 1 << 17


def find_stop_point(trace: ChainTrace, epsilon: float, n: int) -> int | None:
    """First step whose last ``n`` consecutive energy changes are all below
    ``epsilon``; None if the chain never settles that long.

    Uses the full energy sequence including the initial state, so the result
    lines up exactly with the online detector driving reheats.
    """
    if trace.steps < 1:
        raise ValueError("trace is empty")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    seq = np.concatenate([[trace.initial_energy], trace.energies])
    diffs = np.abs(np.diff(seq))
    run = 0
    for t, d in enumerate(diffs, start=1):
        run = run + 1 if d < epsilon else 0
        if run >= n:
            return t
    return None


def hamming_curve(state_trace: StateTrace, reference: np.ndarray) -> np.ndarray:
    """(step, hamming distance to reference) for each recorded state."""
    ref = np.asarray(reference)
    if state_trace.states.shape[1:] != ref.shape:
        raise ValueError(
            f"reference shape {ref.shape} does not match recorded states "
            f"{state_trace.states.shape[1:]}"
        )
    dist = (state_trace.states != ref[None, :]).sum(axis=1)
    return np.column_stack([state_trace.step_indices, dist]).astype(np.int64)


def specific_heat_curve(trace: ChainTrace, m: int) -> np.ndarray:
    """(step, C_hat) for steps m..L, from recorded energies and temperatures."""
    if m < 2:
        raise ValueError(f"sample size must be >= 2, got {m}")
    if trace.steps < m:
        raise ValueError(f"trace has {trace.steps} steps, need at least {m}")
    rows = []
    for t in range(m, trace.steps + 1):
        window = trace.energies[t - m : t]
        rows.append((t, specific_heat(window, trace.temperatures[t - 1])))
    return np.array(rows, dtype=np.float64)


def running_argmax_curve(curve: np.ndarray) -> tuple[float, int]:
    """(max value, argmax step) of a (step, value) curve; later ties win."""
    best_v = -np.inf
    best_t = -1
    for t, v in curve:
        if v >= best_v:
            best_v = v
            best_t = int(t)
    return best_v, best_t


def escaping_rate(
    sampler_config: SamplerConfig,
    temperature: float,
    trials: int,
    steps: int = 20,
    seed: int = 0,
) -> float:
    """Fraction of chains that reach (1, 1) from (0, 0) on the 2-bit double
    well within ``steps`` kernel applications at a constant temperature.

    A first-passage count: a chain that visits the optimum and leaves again
    still escaped. Trials run as one vectorized batch per chunk.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    model = Toy2DEnergy()
    kernel = make_kernel(sampler_config)
    rng = np.random.Generator(np.random.PCG64(seed))
    escaped_total = 0
    done = 0
    while done < trials:
        b = min(_ESCAPE_CHUNK, trials - done)
        X = np.zeros((b, 2), dtype=np.int64)
        f = model.energy_batch(X)
        escaped = np.zeros(b, dtype=bool)
        for _ in range(steps):
            X, f, _, _ = kernel(model, X, temperature, rng, f)
            escaped |= (X == 1).all(axis=1)
            if escaped.all():
                break
        escaped_total += int(escaped.sum())
        done += b
    return escaped_total / trials


def escape_sweep(
    sampler_config: SamplerConfig,
    temperatures,
    trials: int,
    steps: int = 20,
    seed: int = 0,
) -> list[tuple[float, float]]:
    """Escaping rate per temperature, each sweep point on its own substream."""
    out = []
    for k, T in enumerate(temperatures):
        rate = escaping_rate(sampler_config, T, trials, steps, derive_seed(seed, k))
        out.append((float(T), rate))
    return out
