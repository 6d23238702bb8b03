"""Penalized energy functions over binary states, plus small analysis models.

Every model exposes the minimized energy f, the gradient of its continuous
relaxation (the polynomial formula evaluated off the integer lattice), and,
for binary models, exact single-flip energy differences. The graph energies
are multilinear, so their relaxation gradient times the coordinate change
equals the exact flip delta; the two toy models are where gradient and exact
differences genuinely part ways.

Batch conventions: states are int arrays of shape (d,) or (B, d); batched
methods return per-row results. Adjacency lives in CSR form, so gradients
are neighbor sums, never dense matrix products.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csr_array

from .graphs import Graph, complement

MIS_LAMBDA_DEFAULT = 1.0001
CLIQUE_LAMBDA_DEFAULT = 1.0
BRUTE_FORCE_MAX_DIM = 25

_CHUNK = 1 << 18


def _adjacency_csr(graph: Graph) -> csr_array:
    u, v = graph.edge_arrays()
    data = np.ones(2 * len(u))
    rows = np.concatenate([u, v])
    cols = np.concatenate([v, u])
    return csr_array((data, (rows, cols)), shape=(graph.n, graph.n))


class EnergyModel:
    """Shared surface: dimension checks and single-state wrappers."""

    kind: str
    d: int
    is_binary: bool = True

    def _as_batch(self, x: np.ndarray) -> tuple[np.ndarray, bool]:
        arr = np.asarray(x)
        single = arr.ndim == 1
        if single:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[1] != self.d:
            raise ValueError(
                f"state has dimension {arr.shape[-1] if arr.ndim else 0}, "
                f"model expects {self.d}"
            )
        return arr, single

    def energy_batch(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def value_and_grad_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def relaxed_energy(self, z: np.ndarray) -> float:
        """The relaxation f~ at an arbitrary real point (finite-difference oracle)."""
        raise NotImplementedError

    def energy(self, x: np.ndarray) -> float:
        X, _ = self._as_batch(x)
        return float(self.energy_batch(X)[0])

    def gradient(self, x: np.ndarray) -> np.ndarray:
        X, single = self._as_batch(x)
        _, g = self.value_and_grad_batch(X)
        return g[0] if single else g

    def gradient_batch(self, X: np.ndarray) -> np.ndarray:
        return self.value_and_grad_batch(X)[1]

    def objective(self, x: np.ndarray) -> float:
        """Reported quantity: -f(x), so higher is better for every model."""
        return -self.energy(x)

    def flip_delta_batch(self, X: np.ndarray) -> np.ndarray:
        """Exact f(flip_i x) - f(x) per coordinate (binary models only)."""
        raise NotImplementedError


class _ConflictPenaltyModel(EnergyModel):
    """-(selected count) + lambda * (conflicting selected pairs).

    Conflicts are edges of ``conflict_adj`` with both endpoints selected.
    MIS uses the graph itself; max clique uses the complement.
    """

    def __init__(self, conflict_adj: csr_array, lam: float, d: int):
        self.conflict_adj = conflict_adj
        self.lam = float(lam)
        self.d = d
        coo = conflict_adj.tocoo()
        self._rows = coo.row.astype(np.int64)
        self._cols = coo.col.astype(np.int64)

    def _neighbor_sums(self, X: np.ndarray) -> np.ndarray:
        if X.shape[0] == 1:
            # single-row chains dominate; bincount over the endpoint lists
            # skips the sparse-matmul dispatch overhead
            out = np.bincount(self._rows, weights=X[0, self._cols], minlength=self.d)
            return out[None, :]
        return (self.conflict_adj @ X.T).T

    def energy_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        N = self._neighbor_sums(X)
        return -X.sum(axis=1) + self.lam * 0.5 * (X * N).sum(axis=1)

    def value_and_grad_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        X = np.asarray(X, dtype=np.float64)
        N = self._neighbor_sums(X)
        f = -X.sum(axis=1) + self.lam * 0.5 * (X * N).sum(axis=1)
        return f, -1.0 + self.lam * N

    def flip_delta_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return (1.0 - 2.0 * X) * (-1.0 + self.lam * self._neighbor_sums(X))

    def relaxed_energy(self, z: np.ndarray) -> float:
        z = np.asarray(z, dtype=np.float64)
        N = self.conflict_adj @ z
        return float(-z.sum() + self.lam * 0.5 * (z * N).sum())

    def violation_counts(self, x: np.ndarray) -> np.ndarray:
        """Per-node count of conflicting selected neighbors (0 if unselected)."""
        x = np.asarray(x, dtype=np.float64)
        return np.rint(x * (self.conflict_adj @ x)).astype(np.int64)


class MisEnergy(_ConflictPenaltyModel):
    """Maximum independent set with edge-conflict penalty."""

    kind = "mis"

    def __init__(self, graph: Graph, lam: float = MIS_LAMBDA_DEFAULT):
        if lam <= 1.0:
            raise ValueError(f"MIS penalty must exceed 1, got {lam}")
        super().__init__(_adjacency_csr(graph), lam, graph.n)
        self.graph = graph


class MaxCliqueEnergy(_ConflictPenaltyModel):
    """Maximum clique: the MIS penalty applied over the complement graph."""

    kind = "maxclique"

    def __init__(self, graph: Graph, lam: float = CLIQUE_LAMBDA_DEFAULT):
        if lam <= 0.0:
            raise ValueError(f"penalty must be positive, got {lam}")
        super().__init__(_adjacency_csr(complement(graph)), lam, graph.n)
        self.graph = graph


class MaxCutEnergy(EnergyModel):
    """Unconstrained max cut: energy is minus the number of cut edges."""

    kind = "maxcut"

    def __init__(self, graph: Graph):
        self.graph = graph
        self.adj = _adjacency_csr(graph)
        self.d = graph.n
        self.m = graph.num_edges
        coo = self.adj.tocoo()
        self._rows = coo.row.astype(np.int64)
        self._cols = coo.col.astype(np.int64)

    def _spin_sums(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        S = 2.0 * np.asarray(X, dtype=np.float64) - 1.0
        if S.shape[0] == 1:
            out = np.bincount(self._rows, weights=S[0, self._cols], minlength=self.d)
            return S, out[None, :]
        return S, (self.adj @ S.T).T

    def energy_batch(self, X: np.ndarray) -> np.ndarray:
        S, AS = self._spin_sums(X)
        same_side = 0.5 * (S * AS).sum(axis=1)
        return -(self.m - same_side) / 2.0

    def value_and_grad_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        S, AS = self._spin_sums(X)
        f = -(self.m - 0.5 * (S * AS).sum(axis=1)) / 2.0
        return f, AS

    def flip_delta_batch(self, X: np.ndarray) -> np.ndarray:
        S, AS = self._spin_sums(X)
        return -S * AS

    def relaxed_energy(self, z: np.ndarray) -> float:
        s = 2.0 * np.asarray(z, dtype=np.float64) - 1.0
        same_side = 0.5 * float(s @ (self.adj @ s))
        return -(self.m - same_side) / 2.0


class Toy2DEnergy(EnergyModel):
    """Two-bit double well -(x1+x2)(x1+x2-3/2).

    (0, 0) is a strict local minimum and (1, 1) the global one; every
    one-flip path between them climbs by 1/2, which is what makes this the
    standard escape testbed.
    """

    kind = "toy2d"
    d = 2

    def _sums(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64).sum(axis=1)

    def energy_batch(self, X: np.ndarray) -> np.ndarray:
        s = self._sums(X)
        return -s * (s - 1.5)

    def value_and_grad_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        s = self._sums(X)
        grad = np.repeat((-2.0 * s + 1.5)[:, None], 2, axis=1)
        return -s * (s - 1.5), grad

    def flip_delta_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        delta = 1.0 - 2.0 * X
        s = X.sum(axis=1)[:, None]
        return delta * (-2.0 * s - delta + 1.5)

    def relaxed_energy(self, z: np.ndarray) -> float:
        s = float(np.asarray(z, dtype=np.float64).sum())
        return -s * (s - 1.5)


class Toy1DEnergy(EnergyModel):
    """Quartic x^4/4 - 4x^3/3 + 15x^2/8 on the integer grid 0..x_max.

    Global minimum at x = 0; the relaxation has a spurious local minimum at
    x = 2.5 whose gradient shuttles samplers between 2 and 3. Single
    categorical coordinate, moves are +-1.
    """

    kind = "toy1d"
    d = 1
    is_binary = False

    def __init__(self, x_max: int = 8):
        if x_max < 1:
            raise ValueError(f"x_max must be >= 1, got {x_max}")
        self.x_max = x_max

    def energy_batch(self, X: np.ndarray) -> np.ndarray:
        x = np.asarray(X, dtype=np.float64)[:, 0]
        return x**4 / 4.0 - 4.0 * x**3 / 3.0 + 15.0 * x**2 / 8.0

    def value_and_grad_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(X, dtype=np.float64)[:, 0]
        f = x**4 / 4.0 - 4.0 * x**3 / 3.0 + 15.0 * x**2 / 8.0
        return f, (x**3 - 4.0 * x**2 + 3.75 * x)[:, None]

    def relaxed_energy(self, z: np.ndarray) -> float:
        x = float(np.asarray(z, dtype=np.float64).reshape(()))
        return x**4 / 4.0 - 4.0 * x**3 / 3.0 + 15.0 * x**2 / 8.0

    def shift_delta_batch(self, X: np.ndarray, delta: np.ndarray) -> np.ndarray:
        """Exact f(x + delta) - f(x) for per-row integer shifts."""
        x = np.asarray(X, dtype=np.float64)[:, 0]
        y = x + np.asarray(delta, dtype=np.float64)
        return (
            y**4 / 4.0 - 4.0 * y**3 / 3.0 + 15.0 * y**2 / 8.0
        ) - (x**4 / 4.0 - 4.0 * x**3 / 3.0 + 15.0 * x**2 / 8.0)


def finite_difference_gradient(
    model: EnergyModel, z: np.ndarray, h: float = 1e-4
) -> np.ndarray:
    """Central differences of the relaxation, the oracle the gradients are tested against."""
    if h <= 0:
        raise ValueError(f"step size must be positive, got {h}")
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (model.d,):
        raise ValueError(f"point has shape {z.shape}, model expects ({model.d},)")
    out = np.empty(model.d)
    for i in range(model.d):
        zp, zm = z.copy(), z.copy()
        zp[i] += h
        zm[i] -= h
        out[i] = (model.relaxed_energy(zp) - model.relaxed_energy(zm)) / (2.0 * h)
    return out


def repair(model: EnergyModel, x: np.ndarray) -> np.ndarray:
    """Greedily unselect conflicted nodes until the selection is feasible.

    Repeatedly drops the selected node with the most conflicting selected
    neighbors (lowest index on ties). Only meaningful for the selection
    problems; the result is a feasible independent set / clique.
    """
    if not isinstance(model, _ConflictPenaltyModel):
        raise ValueError(f"repair is not defined for problem kind {model.kind!r}")
    out = np.asarray(x).copy()
    if out.shape != (model.d,):
        raise ValueError(f"state has shape {out.shape}, model expects ({model.d},)")
    while True:
        counts = model.violation_counts(out)
        worst = int(np.argmax(counts))
        if counts[worst] == 0:
            return out
        out[worst] = 0


def brute_force_optimum(model: EnergyModel) -> tuple[np.ndarray, float]:
    """Exhaustive minimizer for desk-size instances.

    Binary models enumerate all of {0,1}^d (d <= 25), the 1-D toy its
    integer grid. Ties resolve to the lowest binary-encoded state, where
    coordinate i contributes x_i * 2^i.
    """
    if not model.is_binary:
        grid = np.arange(model.x_max + 1, dtype=np.int64)[:, None]
        energies = model.energy_batch(grid)
        best = int(np.argmin(energies))
        return grid[best].copy(), float(energies[best])
    if model.d > BRUTE_FORCE_MAX_DIM:
        raise ValueError(
            f"brute force supports d <= {BRUTE_FORCE_MAX_DIM}, got {model.d}"
        )
    coords = np.arange(model.d, dtype=np.uint64)
    best_f = np.inf
    best_state: np.ndarray | None = None
    for start in range(0, 1 << model.d, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, 1 << model.d), dtype=np.uint64)
        bits = ((codes[:, None] >> coords) & np.uint64(1)).astype(np.int8)
        energies = model.energy_batch(bits)
        idx = int(np.argmin(energies))
        if energies[idx] < best_f:
            best_f = float(energies[idx])
            best_state = bits[idx].astype(np.int64)
    assert best_state is not None
    return best_state, best_f


def make_model(
    problem: str, graph: Graph | None = None, lam: float | None = None
) -> EnergyModel:
    """Instantiate a model by problem name, applying per-problem defaults."""
    problem = problem.lower()
    if problem in ("mis", "maxclique", "maxcut"):
        if graph is None:
            raise ValueError(f"problem {problem!r} requires a graph")
    if problem == "mis":
        return MisEnergy(graph, MIS_LAMBDA_DEFAULT if lam is None else lam)
    if problem == "maxclique":
        return MaxCliqueEnergy(graph, CLIQUE_LAMBDA_DEFAULT if lam is None else lam)
    if problem == "maxcut":
        if lam is not None:
            raise ValueError("maxcut is unconstrained and takes no penalty")
        return MaxCutEnergy(graph)
    if problem == "toy2d":
        return Toy2DEnergy()
    if problem == "toy1d":
        return Toy1DEnergy()
    raise ValueError(f"unknown problem {problem!r}")
