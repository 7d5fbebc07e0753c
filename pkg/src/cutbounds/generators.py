"""Seeded samplers for the ring-lattice models and dual radio networks."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import bounds
from .graph_core import Graph
from .models import DRN, SWR, SWS, TORUS, ModelParams, _check_lattice
from .seeding import as_rng


@lru_cache(maxsize=64)
def lattice_pairs(n: int, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``triu`` pair indices and a flag marking ring-lattice pairs."""
    rows, cols = np.triu_indices(n, 1)
    gap = cols - rows
    dist = np.minimum(gap, n - gap)
    is_lattice = dist <= k // 2
    for a in (rows, cols, is_lattice):
        a.setflags(write=False)
    return rows, cols, is_lattice


def ring_lattice(n: int, k: int) -> Graph:
    _check_lattice(n, k)
    rows, cols, is_lattice = lattice_pairs(n, k)
    return Graph.from_mask(n, rows[is_lattice], cols[is_lattice])


def _lattice_model_mask(
    n: int, k: int, keep: float, add: float, rng: np.random.Generator
) -> np.ndarray:
    _, _, is_lattice = lattice_pairs(n, k)
    u = rng.random(is_lattice.size)
    return np.where(is_lattice, u < keep, u < add)


def sample_sws(params: SWS, seed) -> Graph:
    rng = as_rng(seed)
    rows, cols, _ = lattice_pairs(params.n, params.k)
    present = _lattice_model_mask(params.n, params.k, 1.0, params.p, rng)
    return Graph.from_mask(params.n, rows[present], cols[present])


def sample_swr(params: SWR, seed) -> Graph:
    rng = as_rng(seed)
    rows, cols, _ = lattice_pairs(params.n, params.k)
    # lattice edges survive with probability 1-p so that the mean degree stays k
    present = _lattice_model_mask(params.n, params.k, 1.0 - params.p, params.chord_probability, rng)
    return Graph.from_mask(params.n, rows[present], cols[present])


def lattice_indicators(params: SWS | SWR, trials: int, seed) -> np.ndarray:
    """Edge-indicator matrix of shape ``(trials, C(n, 2))`` in ``triu`` order.

    Row ``i`` uses the same draws as ``sample_*(params, stream_i)`` would if
    the streams were taken from one generator in sequence.
    """
    rng = as_rng(seed)
    if isinstance(params, SWS):
        keep, add = 1.0, params.p
    else:
        keep, add = 1.0 - params.p, params.chord_probability
    _, _, is_lattice = lattice_pairs(params.n, params.k)
    u = rng.random((trials, is_lattice.size))
    return np.where(is_lattice, u < keep, u < add)


def _check_unit_square(points: np.ndarray) -> None:
    if np.any(points < 0.0) or np.any(points > 1.0):
        raise ValueError("coordinates must lie in [0, 1]")


def torus_distance(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_unit_square(a)
    _check_unit_square(b)
    delta = np.abs(a - b)
    delta = np.minimum(delta, 1.0 - delta)
    return float(np.hypot(*delta))


def pairwise_distances(positions: np.ndarray, metric: str) -> np.ndarray:
    """Distances between all node pairs; works on ``(..., n, 2)`` arrays."""
    delta = np.abs(positions[..., :, None, :] - positions[..., None, :, :])
    if metric == TORUS:
        delta = np.minimum(delta, 1.0 - delta)
    return np.sqrt((delta**2).sum(axis=-1))


def drn_adjacency(positions: np.ndarray, in_vl: np.ndarray, rS: float, rL: float, metric: str) -> np.ndarray:
    """Boolean adjacency for node positions ``(..., n, 2)`` and membership ``(..., n)``."""
    dist = pairwise_distances(positions, metric)
    short = dist <= rS
    long_ = (dist <= rL) & in_vl[..., :, None] & in_vl[..., None, :]
    adj = short | long_
    n = positions.shape[-2]
    adj[..., np.arange(n), np.arange(n)] = False
    return adj


def draw_drn_nodes(params: DRN, rng: np.random.Generator, trials: int | None = None):
    """Positions then long-range membership, in that order of draws."""
    shape = () if trials is None else (trials,)
    positions = rng.random(shape + (params.n, 2))
    in_vl = rng.random(shape + (params.n,)) < params.p
    return positions, in_vl


@dataclass(frozen=True)
class DRNInstance:
    """A sampled dual radio network and the node data it was built from."""

    params: DRN
    graph: Graph
    positions: np.ndarray
    in_vl: np.ndarray


def sample_drn(params: DRN, seed) -> DRNInstance:
    rng = as_rng(seed)
    positions, in_vl = draw_drn_nodes(params, rng)
    adj = drn_adjacency(positions, in_vl, params.rS, params.rL, params.metric)
    rows, cols = np.nonzero(np.triu(adj, 1))
    positions.setflags(write=False)
    in_vl.setflags(write=False)
    return DRNInstance(params, Graph.from_mask(params.n, rows, cols), positions, in_vl)


def sample(params: ModelParams, seed) -> Graph:
    """Dispatch on the parameter type and return just the graph."""
    if isinstance(params, SWS):
        return sample_sws(params, seed)
    if isinstance(params, SWR):
        return sample_swr(params, seed)
    if isinstance(params, DRN):
        return sample_drn(params, seed).graph
    raise TypeError(f"unsupported model parameters: {params!r}")


@dataclass(frozen=True)
class WeightedGraph:
    """Complete graph whose weights are edge-presence probabilities.

    ``lattice`` records ``(k, w1, w2)`` when the weights follow the
    lattice/non-lattice two-level pattern.
    """

    weights: np.ndarray
    lattice: tuple[int, float, float] | None = None

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weights must be a square matrix")
        if not np.allclose(w, w.T, rtol=0.0, atol=0.0):
            raise ValueError("weights must be symmetric")
        np.fill_diagonal(w, 0.0)
        if np.any(w < 0.0) or np.any(w > 1.0):
            raise ValueError("weights must lie in [0, 1]")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def weight(self, i: int, j: int) -> float:
        return float(self.weights[i, j])

    def pair_weights(self) -> np.ndarray:
        return self.weights[np.triu_indices(self.n, 1)]


def lattice_weighted(n: int, k: int, w1: float, w2: float) -> WeightedGraph:
    """Complete graph with weight ``w1`` on ring-lattice pairs and ``w2`` elsewhere."""
    _check_lattice(n, k)
    rows, cols, is_lattice = lattice_pairs(n, k)
    w = np.zeros((n, n))
    vals = np.where(is_lattice, w1, w2)
    w[rows, cols] = vals
    w[cols, rows] = vals
    return WeightedGraph(w, (k, float(w1), float(w2)))


def expected_graph(params: ModelParams) -> WeightedGraph:
    if isinstance(params, SWS):
        return lattice_weighted(params.n, params.k, 1.0, params.p)
    if isinstance(params, SWR):
        return lattice_weighted(params.n, params.k, 1.0 - params.p, params.chord_probability)
    if isinstance(params, DRN):
        mu = bounds.mu_drn(params.p, params.rS, params.rL, params.metric)
        w = np.full((params.n, params.n), mu)
        return WeightedGraph(w)
    raise TypeError(f"unsupported model parameters: {params!r}")
