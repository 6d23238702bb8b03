"""Discrete MCMC transition kernels at a fixed temperature.

Three kernels over the Boltzmann target exp(-f(x)/T):

* random walk: uniform single-coordinate move, Metropolis-corrected with the
  exact energy difference. The non-gradient baseline.
* dmala: per-coordinate softmax proposal mixing gradient drift with a
  stepsize penalty, all coordinates updated at once, followed by a joint
  Metropolis-Hastings correction.
* path-aux: a path of single-coordinate moves, each drawn from a locally
  balanced weight g(exp(-delta/T)) built from the relaxation gradient, with
  one joint correction for the whole path (reverse path = same coordinates,
  reversed order, weights recomputed at the intermediate states).

The printed per-coordinate drift for this family is sometimes written with
the opposite sign; here the drift lowers energy, which is what leaves
exp(-f/T) invariant fast (the correction step makes the chain exact under
either sign, see the stationarity tests).

All proposal arithmetic is in log space; at low temperature the drift term
easily overflows exp(). Kernels are pure given (model, state, T, rng) and
operate on a batch axis: states have shape (B, d), and the single-chain
wrappers returning :class:`StepOutcome` use B = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import expit, log_expit

from .energies import EnergyModel, Toy1DEnergy

KINDS = ("random-walk", "dmala", "path-aux")
BALANCINGS = ("sqrt", "ratio")

_KIND_ALIASES = {
    "rw": "random-walk",
    "random-walk": "random-walk",
    "random_walk": "random-walk",
    "randomwalk": "random-walk",
    "dmala": "dmala",
    "pas": "path-aux",
    "path-aux": "path-aux",
    "path_aux": "path-aux",
    "pathaux": "path-aux",
}

BatchStep = tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
Kernel = Callable[..., BatchStep]


@dataclass
class SamplerConfig:
    """Transition-kernel choice plus its knobs.

    ``stepsize_override`` is the ablation hook: when a run detects wandering
    it may swap the dmala stepsize to this value instead of reheating.
    """

    kind: str = "path-aux"
    alpha: float = 0.2
    path_length: int = 4
    balancing: str = "sqrt"
    stepsize_override: float | None = None

    def __post_init__(self):
        if self.kind not in _KIND_ALIASES:
            raise ValueError(f"unknown sampler kind {self.kind!r}")
        self.kind = _KIND_ALIASES[self.kind]
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.path_length < 1:
            raise ValueError(f"path_length must be >= 1, got {self.path_length}")
        if self.balancing not in BALANCINGS:
            raise ValueError(f"unknown balancing function {self.balancing!r}")
        if self.stepsize_override is not None and self.stepsize_override <= 0:
            raise ValueError(
                f"stepsize_override must be positive, got {self.stepsize_override}"
            )


@dataclass
class StepOutcome:
    """Result of one kernel application to a single chain."""

    state: np.ndarray
    energy: float
    accepted: bool
    proposal_distance: int


def metropolis_accept(delta_f: float, T: float, u: float) -> bool:
    """u < min(1, exp(-delta_f / T)); non-increasing moves always accept."""
    if T <= 0:
        raise ValueError(f"temperature must be positive, got {T}")
    if delta_f <= 0:
        return True
    return u < np.exp(-delta_f / T)


def _check_temperature(T: float) -> None:
    if T <= 0:
        raise ValueError(f"temperature must be positive, got {T}")


def _accept_mask(log_alpha: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(log_alpha.shape[0])
    with np.errstate(divide="ignore"):
        return np.log(u) < log_alpha


def balance_log_weights(delta_hat: np.ndarray, T: float, balancing: str) -> np.ndarray:
    """log g(exp(-delta_hat / T)) for the supported balancing functions."""
    if balancing == "sqrt":
        return -delta_hat / (2.0 * T)
    if balancing == "ratio":
        return log_expit(-delta_hat / T)
    raise ValueError(f"unknown balancing function {balancing!r}")


def _logsumexp_rows(a: np.ndarray) -> np.ndarray:
    """Row-wise logsumexp; assumes at least one finite entry per row."""
    m = a.max(axis=1)
    return m + np.log(np.exp(a - m[:, None]).sum(axis=1))


def _categorical_rows(log_w: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """One category per row from unnormalized log weights; returns (index, logZ)."""
    logz = _logsumexp_rows(log_w)
    p = np.exp(log_w - logz[:, None])
    cum = np.cumsum(p, axis=1)
    u = rng.random(log_w.shape[0])
    idx = (cum < u[:, None]).sum(axis=1)
    return np.minimum(idx, log_w.shape[1] - 1), logz


# ---------------------------------------------------------------------------
# random walk


def rw_step_batch(
    model: EnergyModel,
    X: np.ndarray,
    T: float,
    rng: np.random.Generator,
    f_x: np.ndarray | None = None,
) -> BatchStep:
    _check_temperature(T)
    B, d = X.shape
    if f_x is None:
        f_x = model.energy_batch(X)
    rows = np.arange(B)
    if model.is_binary:
        coords = rng.integers(0, d, size=B)
        delta = model.flip_delta_batch(X)[rows, coords]
        valid = np.ones(B, dtype=bool)
        move = 1 - 2 * X[rows, coords]
    else:
        move = rng.integers(0, 2, size=B) * 2 - 1
        coords = np.zeros(B, dtype=np.int64)
        target = X[:, 0] + move
        valid = (target >= 0) & (target <= model.x_max)
        delta = np.where(valid, model.shift_delta_batch(X, move), np.inf)
    u = rng.random(B)
    ratio = np.exp(-np.maximum(delta, 0.0) / T)
    ratio = np.where(np.isfinite(delta), ratio, 0.0)
    accepted = valid & (u < ratio)
    X2 = X.copy()
    X2[rows[accepted], coords[accepted]] += move[accepted]
    f2 = f_x + np.where(accepted, delta, 0.0)
    dist = accepted.astype(np.int64)
    return X2, f2, accepted, dist


# ---------------------------------------------------------------------------
# dmala


def dmala_flip_scores(
    grad: np.ndarray, X: np.ndarray, T: float, alpha: float
) -> np.ndarray:
    """Score of flipping each binary coordinate: drift minus stepsize penalty.

    The keep-current candidate always scores 0, so the flip probability is
    expit of this value.
    """
    return -0.5 * grad * (1.0 - 2.0 * X) / T - 1.0 / (2.0 * alpha)


def dmala_step_batch(
    model: EnergyModel,
    X: np.ndarray,
    T: float,
    rng: np.random.Generator,
    alpha: float,
    f_x: np.ndarray | None = None,
) -> BatchStep:
    _check_temperature(T)
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not model.is_binary:
        return _dmala_step_grid(model, X, T, rng, alpha, f_x)
    B, d = X.shape
    f0, g0 = model.value_and_grad_batch(X)
    s0 = dmala_flip_scores(g0, X, T, alpha)
    flips = rng.random((B, d)) < expit(s0)
    X2 = np.where(flips, 1 - X, X)
    log_fwd = np.where(flips, log_expit(s0), log_expit(-s0)).sum(axis=1)
    f2, g2 = model.value_and_grad_batch(X2)
    s2 = dmala_flip_scores(g2, X2, T, alpha)
    log_rev = np.where(flips, log_expit(s2), log_expit(-s2)).sum(axis=1)
    log_alpha = -(f2 - f0) / T + log_rev - log_fwd
    accepted = _accept_mask(log_alpha, rng)
    keep = ~accepted
    X2[keep] = X[keep]
    f2 = np.where(accepted, f2, f0)
    dist = np.where(accepted, flips.sum(axis=1), 0).astype(np.int64)
    return X2, f2, accepted, dist


def _dmala_step_grid(
    model: Toy1DEnergy,
    X: np.ndarray,
    T: float,
    rng: np.random.Generator,
    alpha: float,
    f_x: np.ndarray | None,
) -> BatchStep:
    """Categorical dmala over the 1-D integer grid: softmax across all values."""
    B = X.shape[0]
    rows = np.arange(B)
    values = np.arange(model.x_max + 1, dtype=np.float64)[None, :]

    def scores(state: np.ndarray, grad: np.ndarray) -> np.ndarray:
        diff = values - state[:, :1]
        return -0.5 * grad[:, :1] * diff / T - diff**2 / (2.0 * alpha)

    f0, g0 = model.value_and_grad_batch(X)
    s0 = scores(X.astype(np.float64), g0)
    pick, logz0 = _categorical_rows(s0, rng)
    log_fwd = s0[rows, pick] - logz0
    X2 = X.copy()
    X2[:, 0] = pick
    f2, g2 = model.value_and_grad_batch(X2)
    s2 = scores(X2.astype(np.float64), g2)
    log_rev = s2[rows, X[:, 0]] - _logsumexp_rows(s2)
    log_alpha = -(f2 - f0) / T + log_rev - log_fwd
    accepted = _accept_mask(log_alpha, rng)
    keep = ~accepted
    X2[keep] = X[keep]
    f2 = np.where(accepted, f2, f0)
    dist = np.where(accepted & (X2[:, 0] != X[:, 0]), 1, 0).astype(np.int64)
    return X2, f2, accepted, dist


# ---------------------------------------------------------------------------
# path-auxiliary


def pas_step_batch(
    model: EnergyModel,
    X: np.ndarray,
    T: float,
    rng: np.random.Generator,
    path_length: int,
    balancing: str = "sqrt",
    f_x: np.ndarray | None = None,
) -> BatchStep:
    _check_temperature(T)
    if path_length < 1:
        raise ValueError(f"path_length must be >= 1, got {path_length}")
    if f_x is None:
        f_x = model.energy_batch(X)
    if model.is_binary:
        return _pas_binary(model, X, T, rng, path_length, balancing, f_x)
    return _pas_grid(model, X, T, rng, path_length, balancing, f_x)


def _pas_binary(
    model: EnergyModel,
    X: np.ndarray,
    T: float,
    rng: np.random.Generator,
    R: int,
    balancing: str,
    f0: np.ndarray,
) -> BatchStep:
    B, d = X.shape
    rows = np.arange(B)
    Y = X.copy()
    log_fwd = np.zeros(B)
    log_rev = np.zeros(B)
    # each path state's flip weights serve twice: sampling the next move and
    # scoring the reverse of the previous one
    fy, g = model.value_and_grad_batch(Y)
    logw = balance_log_weights(g * (1.0 - 2.0 * Y), T, balancing)
    for _ in range(R):
        pick, logz = _categorical_rows(logw, rng)
        log_fwd += logw[rows, pick] - logz
        Y[rows, pick] = 1 - Y[rows, pick]
        fy, g = model.value_and_grad_batch(Y)
        logw = balance_log_weights(g * (1.0 - 2.0 * Y), T, balancing)
        log_rev += logw[rows, pick] - _logsumexp_rows(logw)
    log_alpha = -(fy - f0) / T + log_rev - log_fwd
    accepted = _accept_mask(log_alpha, rng)
    dist = np.where(accepted, (Y != X).sum(axis=1), 0).astype(np.int64)
    keep = ~accepted
    Y[keep] = X[keep]
    f2 = np.where(accepted, fy, f0)
    return Y, f2, accepted, dist


def _pas_grid(
    model: Toy1DEnergy,
    X: np.ndarray,
    T: float,
    rng: np.random.Generator,
    R: int,
    balancing: str,
    f0: np.ndarray,
) -> BatchStep:
    """Path of +-1 moves on the integer grid; out-of-range moves get weight 0."""
    B = X.shape[0]
    rows = np.arange(B)
    moves = np.array([-1.0, 1.0])
    Y = X.copy()
    log_fwd = np.zeros(B)
    log_rev = np.zeros(B)

    def move_log_weights(state: np.ndarray, grad: np.ndarray) -> np.ndarray:
        delta_hat = grad[:, :1] * moves[None, :]
        logw = balance_log_weights(delta_hat, T, balancing)
        target = state[:, :1] + moves[None, :]
        return np.where((target >= 0) & (target <= model.x_max), logw, -np.inf)

    fy, g = model.value_and_grad_batch(Y)
    logw = move_log_weights(Y, g)
    for _ in range(R):
        pick, logz = _categorical_rows(logw, rng)
        step = np.where(pick == 1, 1, -1)
        log_fwd += logw[rows, pick] - logz
        Y[:, 0] += step
        fy, g = model.value_and_grad_batch(Y)
        logw = move_log_weights(Y, g)
        back = (pick == 0).astype(np.int64)  # reverse of -1 is +1 and vice versa
        log_rev += logw[rows, back] - _logsumexp_rows(logw)
    log_alpha = -(fy - f0) / T + log_rev - log_fwd
    accepted = _accept_mask(log_alpha, rng)
    dist = np.where(accepted & (Y[:, 0] != X[:, 0]), 1, 0).astype(np.int64)
    keep = ~accepted
    Y[keep] = X[keep]
    f2 = np.where(accepted, fy, f0)
    return Y, f2, accepted, dist


# ---------------------------------------------------------------------------
# public single-chain surface


def _single(model: EnergyModel, x: np.ndarray, result: BatchStep) -> StepOutcome:
    X2, f2, accepted, dist = result
    return StepOutcome(
        state=X2[0].copy(),
        energy=float(f2[0]),
        accepted=bool(accepted[0]),
        proposal_distance=int(dist[0]),
    )


def random_walk_step(
    model: EnergyModel, x: np.ndarray, T: float, rng: np.random.Generator
) -> StepOutcome:
    X = np.asarray(x)[None, :]
    return _single(model, x, rw_step_batch(model, X, T, rng))


def dmala_step(
    model: EnergyModel,
    x: np.ndarray,
    T: float,
    alpha: float,
    rng: np.random.Generator,
) -> StepOutcome:
    X = np.asarray(x)[None, :]
    return _single(model, x, dmala_step_batch(model, X, T, rng, alpha))


def pas_step(
    model: EnergyModel,
    x: np.ndarray,
    T: float,
    path_length: int,
    balancing: str,
    rng: np.random.Generator,
) -> StepOutcome:
    X = np.asarray(x)[None, :]
    return _single(
        model, x, pas_step_batch(model, X, T, rng, path_length, balancing)
    )


def make_kernel(config: SamplerConfig) -> Kernel:
    """Bind a config to a batch kernel fn(model, X, T, rng, f_x=None)."""
    if config.kind == "random-walk":
        return rw_step_batch
    if config.kind == "dmala":

        def dmala_kernel(model, X, T, rng, f_x=None):
            return dmala_step_batch(model, X, T, rng, config.alpha, f_x)

        return dmala_kernel
    if config.kind == "path-aux":

        def pas_kernel(model, X, T, rng, f_x=None):
            return pas_step_batch(
                model, X, T, rng, config.path_length, config.balancing, f_x
            )

        return pas_kernel
    raise ValueError(f"unknown sampler kind {config.kind!r}")
