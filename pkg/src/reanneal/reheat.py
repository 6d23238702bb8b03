"""Wandering detection, specific-heat tracking, and the reheated annealer.

The controller watches the chain's energy sequence. Two pieces of state:

* a wandering detector that counts consecutive steps whose absolute energy
  change stays below epsilon; reaching the length threshold N means the
  chain is wandering in a contour of near-equal solutions;
* a specific-heat tracker that maintains C_hat(t) = var(last M energies)
  / T(t)^2 and remembers the step with the largest value seen after a skip
  threshold (the early steps carry a spurious variance peak from the fast
  initial descent and must be excluded).

On detection the chain's temperature pointer jumps back to the tracked
argmax step, i.e. the next step samples at the estimated critical
temperature, and the detector starts over. By default the tracker freezes
at the first reheat so later reheats return to the same temperature.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .annealing import ChainTrace, Schedule, run_chain
from .energies import EnergyModel
from .samplers import Kernel, SamplerConfig, make_kernel


def specific_heat(window, T: float) -> float:
    """Population variance of an energy window divided by T^2."""
    if T <= 0:
        raise ValueError(f"temperature must be positive, got {T}")
    arr = np.asarray(window, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError(f"window must hold at least 2 energies, got {arr.size}")
    return float(np.var(arr)) / (T * T)


@dataclass
class WanderingDetector:
    """Counts consecutive sub-epsilon energy changes; fires at n_threshold."""

    epsilon: float
    n_threshold: int
    consecutive_count: int = 0

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.n_threshold < 1:
            raise ValueError(f"n_threshold must be >= 1, got {self.n_threshold}")

    def update(self, f_prev: float, f_curr: float) -> bool:
        if abs(f_curr - f_prev) < self.epsilon:
            self.consecutive_count += 1
        else:
            self.consecutive_count = 0
        return self.consecutive_count >= self.n_threshold

    def reset(self) -> None:
        self.consecutive_count = 0


class SpecificHeatTracker:
    """Online maximum of the windowed specific heat after a skip threshold.

    Ties go to the later step (the comparison is >=), and the argmax starts
    at t_skip so an early reheat has a defined target. ``freeze`` stops all
    further updates.
    """

    def __init__(self, m: int, t_skip: int):
        if m < 2:
            raise ValueError(f"sample size must be >= 2, got {m}")
        if t_skip < m:
            raise ValueError(f"t_skip={t_skip} must be >= sample size {m}")
        self.m = m
        self.t_skip = t_skip
        self.window: deque[float] = deque(maxlen=m)
        self.c_star = 0.0
        self.t_star = t_skip
        self.frozen = False
        self._last_t: int | None = None

    def update(self, t: int, f_t: float, T_t: float) -> None:
        if self._last_t is not None and t <= self._last_t:
            raise ValueError(f"steps must increase, got {t} after {self._last_t}")
        self._last_t = t
        self.window.append(float(f_t))
        if self.frozen or t < self.t_skip or len(self.window) < self.m:
            return
        c = specific_heat(list(self.window), T_t)
        if c >= self.c_star:
            self.c_star = c
            self.t_star = t

    def freeze(self) -> None:
        self.frozen = True


@dataclass
class ReheatConfig:
    """Detector and tracker thresholds; defaults follow the graph benchmarks."""

    epsilon: float = 0.01
    n_threshold: int = 100
    m: int = 100
    t_skip: int = 200
    freeze_tc_after_first_reheat: bool = True

    def __post_init__(self):
        WanderingDetector(self.epsilon, self.n_threshold)  # validates
        if self.m < 2:
            raise ValueError(f"sample size must be >= 2, got {self.m}")
        if self.t_skip < self.m:
            raise ValueError(f"t_skip={self.t_skip} must be >= sample size {self.m}")


class ReheatController:
    """Algorithm hook: track C_hat, detect wandering, emit reheat targets."""

    def __init__(self, config: ReheatConfig):
        self.config = config
        self.detector = WanderingDetector(config.epsilon, config.n_threshold)
        self.tracker = SpecificHeatTracker(config.m, config.t_skip)
        self._f_prev = 0.0

    def on_start(self, initial_energy: float) -> None:
        self._f_prev = initial_energy

    def after_step(self, t: int, f_t: float, T_t: float) -> int | None:
        self.tracker.update(t, f_t, T_t)
        fired = self.detector.update(self._f_prev, f_t)
        self._f_prev = f_t
        if not fired:
            return None
        self.detector.reset()
        target = self.tracker.t_star
        if self.config.freeze_tc_after_first_reheat:
            self.tracker.freeze()
        return target

    def swap_kernel(self) -> Kernel | None:
        return None


class StepsizeOverrideController:
    """Ablation hook: on first detection swap the dmala stepsize, never reheat."""

    def __init__(self, config: ReheatConfig, sampler_config: SamplerConfig):
        if sampler_config.kind != "dmala":
            raise ValueError("stepsize override is only defined for the dmala sampler")
        if sampler_config.stepsize_override is None:
            raise ValueError("sampler_config.stepsize_override is not set")
        self.detector = WanderingDetector(config.epsilon, config.n_threshold)
        self._swapped_config = SamplerConfig(
            kind="dmala",
            alpha=sampler_config.stepsize_override,
            path_length=sampler_config.path_length,
            balancing=sampler_config.balancing,
        )
        self._f_prev = 0.0
        self._pending_swap = False
        self._swapped = False
        self.detection_steps: list[int] = []

    def on_start(self, initial_energy: float) -> None:
        self._f_prev = initial_energy

    def after_step(self, t: int, f_t: float, T_t: float) -> int | None:
        fired = self.detector.update(self._f_prev, f_t)
        self._f_prev = f_t
        if fired:
            self.detector.reset()
            self.detection_steps.append(t)
            if not self._swapped:
                self._pending_swap = True
        return None

    def swap_kernel(self) -> Kernel | None:
        if not self._pending_swap:
            return None
        self._pending_swap = False
        self._swapped = True
        return make_kernel(self._swapped_config)


def run_resco(
    model: EnergyModel,
    sampler_config: SamplerConfig,
    schedule: Schedule,
    reheat_config: ReheatConfig,
    seed: int,
    *,
    init: str = "random",
    x0: np.ndarray | None = None,
    state_stride: int | None = None,
) -> ChainTrace:
    """Reheated annealing: exactly ``schedule.length`` steps, reheats included.

    With thresholds that never fire this is bit-for-bit plain annealing
    under the same seed.
    """
    if reheat_config.t_skip >= schedule.length:
        raise ValueError(
            f"t_skip={reheat_config.t_skip} must be below chain length "
            f"{schedule.length}"
        )
    controller = ReheatController(reheat_config)
    return run_chain(
        model,
        sampler_config,
        schedule,
        seed,
        controller=controller,
        init=init,
        x0=x0,
        state_stride=state_stride,
    )


def run_stepsize_ablation(
    model: EnergyModel,
    sampler_config: SamplerConfig,
    schedule: Schedule,
    reheat_config: ReheatConfig,
    seed: int,
    *,
    init: str = "random",
    x0: np.ndarray | None = None,
) -> tuple[ChainTrace, tuple[int, ...]]:
    """Anneal with detection on, but answer detection by swapping the dmala
    stepsize instead of reheating. Returns the trace and the detection steps."""
    controller = StepsizeOverrideController(reheat_config, sampler_config)
    trace = run_chain(
        model,
        sampler_config,
        schedule,
        seed,
        controller=controller,
        init=init,
        x0=x0,
    )
    return trace, tuple(controller.detection_steps)
