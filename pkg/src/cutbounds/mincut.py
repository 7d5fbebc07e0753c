"""Exact s-t capacities, the relay-cut brute-force oracle and global min cuts."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .generators import WeightedGraph
from .graph_core import (
    GRAPH,
    PAPER,
    CutPartition,
    EnumerationLimitError,
    Graph,
    RoleAssignment,
    check_mode,
    cut_capacity,
    enumerate_cuts,
)

RESIDUAL_EPS = 1e-12
GLOBAL_CUT_LIMIT = 24


@dataclass(frozen=True)
class CapacityResult:
    value: float
    witness: CutPartition
    mode: str
    terminal: int


class _FlowNetwork:
    """Arc arrays for Dinic's algorithm.  Arc ``a ^ 1`` is the reverse of ``a``."""

    def __init__(self, n: int):
        self.n = n
        self.head: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[float] = []

    def add_undirected(self, u: int, v: int, c: float) -> None:
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(c)

    def _levels(self, s: int, t: int) -> list[int] | None:
        level = [-1] * self.n
        level[s] = 0
        queue = deque([s])
        to, cap, head = self.to, self.cap, self.head
        while queue:
            u = queue.popleft()
            for a in head[u]:
                v = to[a]
                if level[v] < 0 and cap[a] > RESIDUAL_EPS:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[t] >= 0 else None

    def _augment(self, s: int, t: int, level: list[int], it: list[int]) -> float:
        """Push one path of the level graph; 0 when the level graph is blocked."""
        to, cap, head = self.to, self.cap, self.head
        path: list[int] = []
        u = s
        while True:
            if u == t:
                push = min(cap[a] for a in path)
                for a in path:
                    cap[a] -= push
                    cap[a ^ 1] += push
                return push
            arcs = head[u]
            while it[u] < len(arcs):
                a = arcs[it[u]]
                v = to[a]
                if cap[a] > RESIDUAL_EPS and level[v] == level[u] + 1:
                    break
                it[u] += 1
            else:
                if u == s:
                    return 0.0
                level[u] = -1  # dead end: prune from this phase
                a = path.pop()
                u = to[a ^ 1]
                it[u] += 1
                continue
            path.append(arcs[it[u]])
            u = to[arcs[it[u]]]

    def max_flow(self, s: int, t: int) -> float:
        flow = 0.0
        while (level := self._levels(s, t)) is not None:
            it = [0] * self.n
            while (pushed := self._augment(s, t, level, it)) > 0.0:
                flow += pushed
        return flow

    def source_side(self, s: int) -> list[int]:
        """Nodes reachable from ``s`` in the residual graph, by ascending index."""
        seen = [False] * self.n
        seen[s] = True
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for a in sorted(self.head[u], key=self.to.__getitem__):
                v = self.to[a]
                if not seen[v] and self.cap[a] > RESIDUAL_EPS:
                    seen[v] = True
                    queue.append(v)
        return [i for i in range(self.n) if seen[i]]


def _solve(g: Graph, s: int, t: int, include: set[int] | None) -> tuple[float, list[int]]:
    net = _FlowNetwork(g.n)
    for (u, v), c in zip(g.edges, g.capacities):
        if c <= 0.0:
            continue
        if include is not None and (u not in include or v not in include):
            continue
        net.add_undirected(u, v, c)
    value = net.max_flow(s, t)
    return value, net.source_side(s)


def st_capacity(g: Graph, roles: RoleAssignment, t: int, mode: str = PAPER) -> CapacityResult:
    """Minimum s-t cut for one terminal.

    Paper mode solves on ``s``, ``t`` and the relays only, without the direct
    ``s``-``t`` edge, so the value is the minimum relay-cut capacity.  Graph
    mode solves on the whole graph.
    """
    check_mode(mode)
    if t not in roles.terminals:
        raise ValueError(f"{t} is not a terminal")
    s = roles.s
    if mode == PAPER:
        include = {s, t, *roles.relays}
        value, side = _solve(g.without_edge(s, t), s, t, include)
        eligible = set(roles.relays)
    else:
        value, side = _solve(g, s, t, None)
        eligible = set(range(g.n)) - {s, t}
    if g.is_unit:
        value = float(round(value))
    witness = CutPartition(i for i in side if i in eligible)
    return CapacityResult(value, witness, mode, t)


def sT_capacity(g: Graph, roles: RoleAssignment, mode: str = PAPER) -> CapacityResult:
    """Minimum over terminals; ties go to the lowest terminal index."""
    if not roles.terminals:
        raise ValueError("empty terminal set")
    best = None
    for t in sorted(roles.terminals):
        res = st_capacity(g, roles, t, mode)
        if best is None or res.value < best.value - (0.0 if g.is_unit else 1e-9):
            best = res
    return best


def brute_force_capacity(g: Graph, roles: RoleAssignment, t: int, limit: int = 20) -> CapacityResult:
    """Minimum relay-cut capacity by enumerating every relay subset."""
    best_value = None
    best_cut = None
    for cut in enumerate_cuts(roles, limit):
        value = cut_capacity(g, roles, t, cut, PAPER)
        if best_value is None or value < best_value:
            best_value, best_cut = value, cut
    return CapacityResult(best_value, best_cut, PAPER, t)


def _bipartition_cut_values(w: np.ndarray, chunk: int = 1 << 15) -> float:
    """Smallest crossing weight over nonempty subsets of nodes ``0..n-2``.

    Node ``n-1`` stays outside, which visits every bipartition exactly once.
    """
    n = w.shape[0]
    deg = w.sum(axis=1)
    m = n - 1
    sub = w[:m, :m]
    bits = np.arange(m)
    best = np.inf
    total = 1 << m
    for start in range(1, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        x = ((masks[:, None] >> bits) & 1).astype(float)
        inside = np.einsum("ij,jk,ik->i", x, sub, x)
        vals = x @ deg[:m] - inside
        best = min(best, float(vals.min()))
    # the degree-minus-inside form can round a zero cut slightly negative
    return max(0.0, best)


def global_min_cut(wg: WeightedGraph, limit: int = GLOBAL_CUT_LIMIT) -> float:
    """Minimum total weight across any split of the nodes into two nonempty parts.

    Exhaustive up to ``limit`` nodes.  Beyond that, a two-level lattice
    weighting whose off-lattice part is connected (``n - 1 - k >= 2``) has a
    single-node minimum cut, since both parts are connected circulant graphs.
    """
    n = wg.n
    if n < 2:
        raise ValueError("need at least two nodes")
    if n <= limit:
        return _bipartition_cut_values(np.asarray(wg.weights))
    if wg.lattice is not None:
        k, w1, w2 = wg.lattice
        if n - 1 - k >= 2 or w2 == 0.0:
            return k * w1 + (n - 1 - k) * w2
    raise EnumerationLimitError(f"exhaustive global min cut limited to n <= {limit}, got n={n}")


__all__ = [
    "CapacityResult",
    "GRAPH",
    "PAPER",
    "brute_force_capacity",
    "global_min_cut",
    "sT_capacity",
    "st_capacity",
]
