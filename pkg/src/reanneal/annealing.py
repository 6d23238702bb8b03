"""Temperature schedules and the annealed chain driver.

The driver is inhomogeneous: one sampler step per schedule index. A chain
keeps its own temperature pointer ``t_temp`` which normally advances with
the loop counter; a controller (the reheat machinery lives in
:mod:`reanneal.reheat`) may reset it, which is the only way the two ever
differ. Plain simulated annealing is the controller-free case, so a
controller that never fires produces a bit-for-bit identical trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .energies import EnergyModel
from .samplers import Kernel, SamplerConfig, make_kernel


@dataclass(frozen=True)
class Schedule:
    """Exponential decay from t_init to t_final over ``length`` steps."""

    t_init: float
    t_final: float
    length: int
    kind: str = "exponential"

    def __post_init__(self):
        if self.kind != "exponential":
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.t_init <= 0 or self.t_final <= 0:
            raise ValueError("temperatures must be positive")
        if self.t_final > self.t_init:
            raise ValueError(
                f"t_final={self.t_final} must not exceed t_init={self.t_init}"
            )
        if self.length < 1:
            raise ValueError(f"length must be >= 1, got {self.length}")

    def temperature_at(self, t: float) -> float:
        return temperature_at(self, t)


def temperature_at(schedule: Schedule, t: float) -> float:
    """T(t) = t_init * (t_final / t_init)^(t / L) for t in [0, L]."""
    if t < 0 or t > schedule.length:
        raise ValueError(f"step {t} outside [0, {schedule.length}]")
    return schedule.t_init * (schedule.t_final / schedule.t_init) ** (
        t / schedule.length
    )


@dataclass
class StateTrace:
    """States recorded every k steps, aligned with their step indices."""

    states: np.ndarray
    step_indices: np.ndarray


@dataclass
class ChainTrace:
    """Per-step record of one annealing chain.

    ``energies[t-1]`` and ``temperatures[t-1]`` belong to step t (1-based);
    ``initial_energy`` is f(x_0) before any step. ``reheat_steps`` is empty
    for plain runs.
    """

    energies: np.ndarray
    temperatures: np.ndarray
    reheat_steps: tuple[int, ...]
    best_energy: float
    best_state: np.ndarray
    steps: int
    initial_energy: float
    states: StateTrace | None = field(default=None, repr=False)

    @property
    def best_objective(self) -> float:
        return -self.best_energy


class ChainController(Protocol):
    """Hooks the reheat (and ablation) machinery into the chain loop."""

    def on_start(self, initial_energy: float) -> None: ...

    def after_step(self, t: int, f_t: float, T_t: float) -> int | None:
        """Observe a step; return a schedule index to reheat to, or None."""
        ...

    def swap_kernel(self) -> Kernel | None:
        """A replacement kernel to use from the next step on, or None."""
        ...


def initial_state(
    model: EnergyModel, rng: np.random.Generator, init: str = "random"
) -> np.ndarray:
    """Draw x_0 as a (1, d) int array: uniform by default, or all-zeros."""
    if init == "zeros":
        return np.zeros((1, model.d), dtype=np.int64)
    if init != "random":
        raise ValueError(f"unknown init {init!r}")
    if model.is_binary:
        return rng.integers(0, 2, size=(1, model.d), dtype=np.int64)
    return rng.integers(0, model.x_max + 1, size=(1, model.d), dtype=np.int64)


def run_chain(
    model: EnergyModel,
    sampler_config: SamplerConfig,
    schedule: Schedule,
    seed: int,
    *,
    controller: ChainController | None = None,
    init: str = "random",
    x0: np.ndarray | None = None,
    state_stride: int | None = None,
) -> ChainTrace:
    """Run one annealed chain of exactly ``schedule.length`` sampler steps."""
    if state_stride is not None and state_stride < 1:
        raise ValueError(f"state_stride must be >= 1, got {state_stride}")
    rng = np.random.Generator(np.random.PCG64(seed))
    if x0 is not None:
        X = np.asarray(x0, dtype=np.int64).reshape(1, model.d).copy()
    else:
        X = initial_state(model, rng, init)
    f = model.energy_batch(X)
    f0 = float(f[0])
    if controller is not None:
        controller.on_start(f0)

    kernel = make_kernel(sampler_config)
    L = schedule.length
    energies = np.empty(L)
    temperatures = np.empty(L)
    reheat_steps: list[int] = []
    best_f = math.inf
    best_state = X[0].copy()
    rec_states: list[np.ndarray] = []
    rec_steps: list[int] = []

    t_temp = 1
    for t in range(1, L + 1):
        T_eff = temperature_at(schedule, t_temp)
        X, f, _, _ = kernel(model, X, T_eff, rng, f)
        f_t = float(f[0])
        energies[t - 1] = f_t
        temperatures[t - 1] = T_eff
        if f_t < best_f:
            best_f = f_t
            best_state = X[0].copy()
        if controller is not None:
            target = controller.after_step(t, f_t, T_eff)
            if target is not None:
                # first post-reheat step samples at T(target) itself
                t_temp = target
                reheat_steps.append(t)
            else:
                t_temp += 1
            replacement = controller.swap_kernel()
            if replacement is not None:
                kernel = replacement
        else:
            t_temp += 1
        if state_stride is not None and t % state_stride == 0:
            rec_states.append(X[0].copy())
            rec_steps.append(t)

    states = None
    if state_stride is not None:
        states = StateTrace(
            states=np.array(rec_states, dtype=np.int64).reshape(len(rec_steps), model.d),
            step_indices=np.array(rec_steps, dtype=np.int64),
        )
    return ChainTrace(
        energies=energies,
        temperatures=temperatures,
        reheat_steps=tuple(reheat_steps),
        best_energy=best_f,
        best_state=best_state,
        steps=L,
        initial_energy=f0,
        states=states,
    )


def run_sa(
    model: EnergyModel,
    sampler_config: SamplerConfig,
    schedule: Schedule,
    seed: int,
    *,
    init: str = "random",
    x0: np.ndarray | None = None,
    state_stride: int | None = None,
) -> ChainTrace:
    """Plain simulated annealing: anneal the chain with no reheat controller."""
    return run_chain(
        model,
        sampler_config,
        schedule,
        seed,
        controller=None,
        init=init,
        x0=x0,
        state_stride=state_stride,
    )
