"""Graphs, node roles, relay cuts and cut capacities.

A cut of size ``x`` splits the relay set into ``members`` (the relays kept on
the source side together with ``s``) and the remaining relays (on the
terminal side together with ``t``).  Its capacity is the total capacity of
source-to-far-relay, near-relay-to-far-relay and near-relay-to-terminal
edges.  Edges touching other terminals, and a direct ``s``-``t`` edge, are not
part of that sum unless the graph-theoretic mode is requested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

PAPER = "paper"
GRAPH = "graph"
MODES = (PAPER, GRAPH)

ENUMERATION_LIMIT = 20
TOLERANCE = 1e-9


class EnumerationLimitError(RuntimeError):
    """Raised when an exhaustive enumeration would exceed its size limit."""


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0..n-1`` with per-edge capacities.

    ``edges`` holds sorted pairs ``(u, v)`` with ``u < v``; ``capacities`` is
    aligned with it.  Use :meth:`from_edges` to build one from arbitrary input.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    capacities: tuple[float, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("node count must be nonnegative")
        if len(self.edges) != len(self.capacities):
            raise ValueError("edges and capacities differ in length")
        if not self.edges:
            return
        arr = np.asarray(self.edges, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("edges must be pairs")
        if np.any(arr[:, 0] == arr[:, 1]):
            raise ValueError("self-loops are not allowed")
        if np.any(arr[:, 0] > arr[:, 1]):
            raise ValueError("edge pairs must be stored as (u, v) with u < v")
        if arr.min() < 0 or arr.max() >= self.n:
            raise ValueError(f"edge endpoint out of range for n={self.n}")
        keys = arr[:, 0] * self.n + arr[:, 1]
        if np.any(np.diff(keys) <= 0):
            raise ValueError("edges must be sorted and free of duplicates")
        caps = np.asarray(self.capacities, dtype=float)
        if np.any(~np.isfinite(caps)) or np.any(caps < 0):
            raise ValueError("capacities must be finite and nonnegative")

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        capacities: Iterable[float] | None = None,
    ) -> Graph:
        """Canonicalise pairs (orientation and order); duplicates are an error."""
        pairs = [(int(u), int(v)) for u, v in edges]
        caps = [1.0] * len(pairs) if capacities is None else [float(c) for c in capacities]
        if len(caps) != len(pairs):
            raise ValueError("edges and capacities differ in length")
        table: dict[tuple[int, int], float] = {}
        for (u, v), c in zip(pairs, caps):
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            key = (u, v) if u < v else (v, u)
            if key in table:
                raise ValueError(f"duplicate edge {key}")
            table[key] = c
        ordered = sorted(table)
        return cls(int(n), tuple(ordered), tuple(table[e] for e in ordered))

    @classmethod
    def from_mask(cls, n: int, rows: np.ndarray, cols: np.ndarray) -> Graph:
        """Unit-capacity graph from index arrays already in ``triu`` order."""
        edges = tuple(zip(rows.tolist(), cols.tolist()))
        return cls(int(n), edges, (1.0,) * len(edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def capacity(self) -> Mapping[tuple[int, int], float]:
        return dict(zip(self.edges, self.capacities))

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        nbrs: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for (u, v), c in zip(self.edges, self.capacities):
            nbrs[u].append((v, c))
            nbrs[v].append((u, c))
        return tuple(tuple(sorted(row)) for row in nbrs)

    @cached_property
    def is_unit(self) -> bool:
        return all(c == 1.0 for c in self.capacities)

    def cap(self, u: int, v: int) -> float:
        """Capacity of the link between ``u`` and ``v`` (0 when absent)."""
        if u > v:
            u, v = v, u
        return self.capacity.get((u, v), 0.0)

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self.capacity

    def degree(self, u: int) -> float:
        return sum(c for _, c in self.adjacency[u])

    def without_edge(self, u: int, v: int) -> Graph:
        if u > v:
            u, v = v, u
        if (u, v) not in self.capacity:
            return self
        keep = [i for i, e in enumerate(self.edges) if e != (u, v)]
        return Graph(self.n, tuple(self.edges[i] for i in keep), tuple(self.capacities[i] for i in keep))

    def with_edge(self, u: int, v: int, capacity: float = 1.0) -> Graph:
        return Graph.from_edges(self.n, list(self.edges) + [(u, v)], list(self.capacities) + [capacity])

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Graph with node ``i`` renamed to ``perm[i]``."""
        return Graph.from_edges(self.n, [(perm[u], perm[v]) for u, v in self.edges], self.capacities)

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        if self.edges:
            idx = np.asarray(self.edges)
            a[idx[:, 0], idx[:, 1]] = self.capacities
            a[idx[:, 1], idx[:, 0]] = self.capacities
        return a


@dataclass(frozen=True)
class RoleAssignment:
    """Source ``s``, ordered terminals, and the relays (everything else)."""

    n: int
    s: int
    terminals: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "terminals", tuple(int(t) for t in self.terminals))
        if not 0 <= self.s < self.n:
            raise ValueError(f"source {self.s} out of range for n={self.n}")
        if not self.terminals:
            raise ValueError("at least one terminal is required")
        if len(set(self.terminals)) != len(self.terminals):
            raise ValueError("terminals must be distinct")
        for t in self.terminals:
            if not 0 <= t < self.n:
                raise ValueError(f"terminal {t} out of range for n={self.n}")
            if t == self.s:
                raise ValueError("the source cannot be a terminal")

    @cached_property
    def relays(self) -> tuple[int, ...]:
        taken = {self.s, *self.terminals}
        return tuple(i for i in range(self.n) if i not in taken)

    @property
    def alpha(self) -> int:
        return len(self.terminals)

    @property
    def N(self) -> int:
        return self.n - 1 - self.alpha

    def for_terminal(self, t: int) -> RoleAssignment:
        """Single-terminal view in which every node other than ``s``, ``t`` relays."""
        if t not in self.terminals:
            raise ValueError(f"{t} is not a terminal")
        return RoleAssignment(self.n, self.s, (t,))


@dataclass(frozen=True)
class CutPartition:
    members: frozenset[int]

    def __init__(self, members: Iterable[int] = ()):
        object.__setattr__(self, "members", frozenset(int(i) for i in members))

    @property
    def x(self) -> int:
        return len(self.members)

    def sorted_members(self) -> list[int]:
        return sorted(self.members)

    def complement(self, roles: RoleAssignment) -> frozenset[int]:
        return frozenset(roles.relays) - self.members


def ring_distance(i: int, j: int, n: int) -> int:
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"node index out of range for n={n}: ({i}, {j})")
    d = abs(i - j)
    return min(d, n - d)


def cut_capacity(
    g: Graph,
    roles: RoleAssignment,
    t: int,
    cut: CutPartition,
    mode: str = PAPER,
) -> float:
    """Total capacity of the edges crossing ``cut`` for terminal ``t``.

    In paper mode only the three relay-cut edge families count.  In graph mode
    the cut is taken over every node except ``s`` and ``t`` (so other terminals
    may sit on either side) and a direct ``s``-``t`` edge is added.
    """
    check_mode(mode)
    if t not in roles.terminals:
        raise ValueError(f"{t} is not a terminal")
    eligible = set(roles.relays) if mode == PAPER else set(roles.for_terminal(t).relays)
    near = cut.members
    if not near <= eligible:
        raise ValueError(f"cut contains non-relay nodes: {sorted(near - eligible)}")
    far = eligible - near
    s = roles.s
    total = sum(g.cap(s, i) for i in far)
    total += sum(g.cap(j, t) for j in near)
    for j in near:
        for i, c in g.adjacency[j]:
            if i in far:
                total += c
    if mode == GRAPH:
        total += g.cap(s, t)
    return total


def crossing_edge_count(x: int, N: int) -> int:
    """Number of node pairs that can cross a size-``x`` cut over ``N`` relays."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if not 0 <= x <= N:
        raise ValueError(f"cut size {x} outside [0, {N}]")
    return N + x * (N - x)


def enumerate_cuts(roles: RoleAssignment, limit: int = ENUMERATION_LIMIT) -> Iterator[CutPartition]:
    """All ``2**N`` relay subsets, by increasing bitmask over the sorted relays."""
    relays = roles.relays
    if len(relays) > limit:
        raise EnumerationLimitError(
            f"refusing to enumerate 2^{len(relays)} cuts (limit N <= {limit})"
        )
    for mask in range(1 << len(relays)):
        yield CutPartition(r for b, r in enumerate(relays) if mask >> b & 1)


def close(a: float, b: float, tol: float = TOLERANCE) -> bool:
    return math.isclose(a, b, rel_tol=0.0, abs_tol=tol)
