"""Seeded Monte Carlo checks of the capacity brackets and of edge independence."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import stats

from . import bounds
from .generators import draw_drn_nodes, drn_adjacency, sample
from .graph_core import PAPER, CutPartition, RoleAssignment, check_mode
from .models import DRN, LATTICE_MODELS, ModelParams
from .seeding import derive_rng, derive_seed

log = logging.getLogger(__name__)

ANTIPODAL = "antipodal"
RANDOM = "random"
POLICIES = (ANTIPODAL, RANDOM)

DEFAULT_BUDGET = 20_000_000
SIGNIFICANCE = 0.01


class BudgetExceeded(RuntimeError):
    """The requested run is larger than the configured work budget."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One concentration experiment.

    ``terminal_policy`` is ``"antipodal"``, ``"random"`` or an explicit tuple
    of terminal indices (the source is then ``source``).  ``None`` picks
    antipodal for ring models and random for dual radio networks.
    """

    model: ModelParams
    trials: int
    master_seed: int
    alpha: int = 1
    d: float | None = None
    mode: str = PAPER
    terminal_policy: str | tuple[int, ...] | None = None
    source: int = 0
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.alpha < 1 or self.alpha > self.model.n - 2:
            raise ValueError(f"alpha must lie in [1, n-2], got {self.alpha}")
        check_mode(self.mode)
        policy = self.terminal_policy
        if policy is None:
            policy = ANTIPODAL if isinstance(self.model, LATTICE_MODELS) else RANDOM
            object.__setattr__(self, "terminal_policy", policy)
        if isinstance(policy, str):
            if policy not in POLICIES:
                raise ValueError(f"terminal policy must be one of {POLICIES} or a list")
            if policy == ANTIPODAL and not isinstance(self.model, LATTICE_MODELS):
                raise ValueError("antipodal terminals need a ring model")
        else:
            terms = tuple(int(t) for t in policy)
            object.__setattr__(self, "terminal_policy", terms)
            object.__setattr__(self, "alpha", len(terms))
            RoleAssignment(self.model.n, self.source, terms)


def antipodal_terminals(n: int, alpha: int, s: int = 0) -> tuple[int, ...]:
    """The ``alpha`` nodes closest to the antipode of ``s``, nearest first."""
    anti = (s + n // 2) % n
    order = [anti]
    step = 1
    while len(order) < alpha:
        for cand in ((anti + step) % n, (anti - step) % n):
            if cand != s and cand not in order and len(order) < alpha:
                order.append(cand)
        step += 1
    return tuple(order)


def trial_roles(config: ExperimentConfig, index: int) -> RoleAssignment:
    n = config.model.n
    policy = config.terminal_policy
    if policy == ANTIPODAL:
        return RoleAssignment(n, 0, antipodal_terminals(n, config.alpha))
    if policy == RANDOM:
        rng = derive_rng(config.master_seed, "roles", index)
        picks = rng.choice(n, size=config.alpha + 1, replace=False)
        return RoleAssignment(n, int(picks[0]), tuple(int(t) for t in picks[1:]))
    return RoleAssignment(n, config.source, policy)


def run_trial(config: ExperimentConfig, index: int) -> float:
    from .mincut import sT_capacity

    g = sample(config.model, derive_seed(config.master_seed, "trial", index))
    return sT_capacity(g, trial_roles(config, index), config.mode).value


def _run_chunk(config: ExperimentConfig, indices: Sequence[int]) -> list[float]:
    return [run_trial(config, i) for i in indices]


def _binomial_ci(count: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    ci = stats.binomtest(count, trials).proportion_ci(confidence_level=level, method="exact")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    report: bounds.BoundReport
    capacities: tuple[float, ...]
    lower_violations: int
    upper_violations: int
    mean_ratio: float
    std_ratio: float
    runtime_s: float
    workers: int

    @property
    def trials(self) -> int:
        return len(self.capacities)

    @property
    def lower_frequency_ci(self) -> tuple[float, float]:
        return _binomial_ci(self.lower_violations, self.trials)

    @property
    def upper_frequency_ci(self) -> tuple[float, float]:
        return _binomial_ci(self.upper_violations, self.trials)

    @property
    def lower_budget(self) -> float:
        """Expected number of lower violations allowed by the probability bound."""
        return self.report.lower_prob_bound * self.trials

    @property
    def upper_budget(self) -> float:
        return self.report.upper_prob_bound * self.trials

    @property
    def exceeds_bounds(self) -> bool:
        """True when a violation frequency is significantly above its bound
        (the 95% interval lies entirely above it)."""
        return (
            self.lower_frequency_ci[0] > self.report.lower_prob_bound
            or self.upper_frequency_ci[0] > self.report.upper_prob_bound
        )

    def summary(self) -> dict:
        rep = self.report
        row = dict(rep.model.as_dict())
        row.update(
            alpha=rep.alpha,
            d=rep.d,
            d_valid=rep.d_valid,
            **{"lambda": rep.lam},
            epsilon=rep.epsilon,
            c_min=rep.c_min,
            lower_threshold=rep.lower_threshold,
            upper_threshold=rep.upper_threshold,
            trials=self.trials,
            master_seed=self.config.master_seed,
            lower_violations=self.lower_violations,
            upper_violations=self.upper_violations,
            mean_ratio=self.mean_ratio,
            std_ratio=self.std_ratio,
        )
        return row

    def as_dict(self) -> dict:
        lo_ci, up_ci = self.lower_frequency_ci, self.upper_frequency_ci
        return {
            "report": self.report.as_dict(),
            "mode": self.config.mode,
            "terminal_policy": self.config.terminal_policy,
            "master_seed": self.config.master_seed,
            "trials": self.trials,
            "capacities": list(self.capacities),
            "lower_violations": self.lower_violations,
            "upper_violations": self.upper_violations,
            "lower_frequency_ci95": list(lo_ci),
            "upper_frequency_ci95": list(up_ci),
            "lower_budget": self.lower_budget,
            "upper_budget": self.upper_budget,
            "exceeds_bounds": self.exceeds_bounds,
            "mean_ratio": self.mean_ratio,
            "std_ratio": self.std_ratio,
            "runtime_s": self.runtime_s,
            "workers": self.workers,
        }


def _check_budget(config: ExperimentConfig) -> None:
    work = config.model.n * config.trials
    if work > config.budget:
        raise BudgetExceeded(f"n*trials = {work} exceeds the budget of {config.budget}")


def run_concentration(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Sample ``trials`` graphs, solve each for its s-T capacity and count
    bracket violations.  The capacities list does not depend on ``workers``."""
    _check_budget(config)
    report = bounds.theorem_report(config.model, config.alpha, config.d)
    if not report.d_valid:
        log.warning("d=%g is outside (1, %g); bracket check is not meaningful", report.d, report.d_max)
    start = time.perf_counter()
    indices = list(range(config.trials))
    if workers <= 1:
        caps = _run_chunk(config, indices)
    else:
        size = math.ceil(len(indices) / (4 * workers))
        chunks = [indices[i : i + size] for i in range(0, len(indices), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            caps = [c for part in pool.map(_run_chunk, [config] * len(chunks), chunks) for c in part]
    elapsed = time.perf_counter() - start
    arr = np.asarray(caps, dtype=float)
    ratios = arr / report.c_min
    return ExperimentResult(
        config=config,
        report=report,
        capacities=tuple(caps),
        lower_violations=int(np.sum(arr <= report.lower_threshold)),
        upper_violations=int(np.sum(arr >= report.upper_threshold)),
        mean_ratio=float(ratios.mean()),
        std_ratio=float(ratios.std(ddof=1)) if arr.size > 1 else 0.0,
        runtime_s=elapsed,
        workers=max(1, workers),
    )


@dataclass(frozen=True)
class SweepRow:
    index: int
    config: ExperimentConfig
    result: ExperimentResult

    def summary(self) -> dict:
        return {"point": self.index, **self.result.summary()}


def point_seed(master_seed: int, index: int) -> int:
    return int(derive_seed(master_seed, "point", index).generate_state(1, np.uint64)[0] >> 1)


def run_sweep(grid: Sequence[ExperimentConfig], master_seed: int, workers: int = 1) -> list[SweepRow]:
    """Run every grid point in order; point ``i`` is reseeded from (seed, i)."""
    if not grid:
        raise ValueError("empty sweep grid")
    points = [replace(cfg, master_seed=point_seed(master_seed, i)) for i, cfg in enumerate(grid)]
    for cfg in points:
        _check_budget(cfg)
    return [SweepRow(i, cfg, run_concentration(cfg, workers)) for i, cfg in enumerate(points)]


@dataclass(frozen=True)
class IndependenceTestResult:
    model: DRN
    trials: int
    cut: CutPartition
    roles: RoleAssignment
    mu: float
    pair_stats: np.ndarray = field(repr=False)
    rejection_rate: float
    shared_rejection_rate: float
    disjoint_rejection_rate: float
    triangles: int
    triple_ratio: float
    triple_ci: tuple[float, float]
    significance: float = SIGNIFICANCE

    @property
    def n_pairs(self) -> int:
        return len(self.pair_stats)

    def as_dict(self) -> dict:
        shared = self.pair_stats["shared"]
        return {
            **self.model.as_dict(),
            "trials": self.trials,
            "cut_size": self.cut.x,
            "mu": self.mu,
            "significance": self.significance,
            "pairs": self.n_pairs,
            "shared_pairs": int(shared.sum()),
            "rejection_rate": self.rejection_rate,
            "shared_rejection_rate": self.shared_rejection_rate,
            "disjoint_rejection_rate": self.disjoint_rejection_rate,
            "triangles": self.triangles,
            "triple_ratio": self.triple_ratio,
            "triple_ci95": list(self.triple_ci),
        }


def min_independence_trials(mu: float) -> int:
    """Trials needed for an expected joint count of at least 5 per edge pair."""
    return max(100, math.ceil(5.0 / mu**2))


def crossing_pairs(roles: RoleAssignment, t: int, cut: CutPartition) -> list[tuple[int, int]]:
    near = sorted(cut.members)
    far = sorted(cut.complement(roles))
    pairs = [(roles.s, i) for i in far]
    pairs += [(j, i) for j in near for i in far]
    pairs += [(j, t) for j in near]
    return pairs


def run_independence_test(
    model: DRN,
    trials: int,
    seed: int,
    cut_size: int | None = None,
    max_pairs: int = 2000,
    chunk: int = 500,
) -> IndependenceTestResult:
    """Covariance tests between indicators of edges crossing one fixed cut.

    The source is node 0, the terminal node ``n-1`` and the near side the
    first ``cut_size`` relays (default ``floor(N/2)``); node labels are
    exchangeable so this is any cut of that size.  Up to ``max_pairs`` pairs
    of crossing edges are drawn uniformly and each is tested with
    ``z = sqrt(T) * phi``.  Disjoint triangles with one near node and two far
    nodes (one same-side edge) are pooled to estimate ``P(all three)/mu^3``.
    """
    n = model.n
    roles = RoleAssignment(n, 0, (n - 1,))
    x = roles.N // 2 if cut_size is None else cut_size
    cut = CutPartition(roles.relays[:x])
    mu = bounds.mu_drn(model.p, model.rS, model.rL, model.metric)
    need = min_independence_trials(mu)
    if trials < need:
        raise ValueError(f"need at least {need} trials for mu={mu:.4g} (expected joint count >= 5)")

    edges = crossing_pairs(roles, n - 1, cut)
    near = sorted(cut.members)
    far = sorted(cut.complement(roles))
    triangles = [(near[i], far[2 * i], far[2 * i + 1]) for i in range(min(len(near), len(far) // 2))]
    tri_edges = [(a, b) for a, b, c in triangles] + [(a, c) for a, b, c in triangles] + [(b, c) for a, b, c in triangles]

    eu = np.array([e[0] for e in edges + tri_edges])
    ev = np.array([e[1] for e in edges + tri_edges])
    rng = derive_rng(seed, "independence")
    blocks = []
    for start in range(0, trials, chunk):
        size = min(chunk, trials - start)
        positions, in_vl = draw_drn_nodes(model, rng, size)
        adj = drn_adjacency(positions, in_vl, model.rS, model.rL, model.metric)
        blocks.append(adj[:, eu, ev])
    ind = np.concatenate(blocks).astype(float)
    cross = ind[:, : len(edges)]
    tri = ind[:, len(edges) :].reshape(trials, 3, len(triangles))

    first, second = np.triu_indices(len(edges), 1)
    pick_rng = derive_rng(seed, "pairs")
    chosen = np.sort(pick_rng.choice(first.size, size=min(max_pairs, first.size), replace=False))
    e_idx, f_idx = first[chosen], second[chosen]
    shared = np.array([len(set(edges[a]) & set(edges[b])) > 0 for a, b in zip(e_idx, f_idx)])

    p = cross.mean(axis=0)
    joint = (cross[:, e_idx] * cross[:, f_idx]).mean(axis=0)
    var = p[e_idx] * (1 - p[e_idx]) * p[f_idx] * (1 - p[f_idx])
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.sqrt(trials) * (joint - p[e_idx] * p[f_idx]) / np.sqrt(var)
    z = np.where(var > 0, z, 0.0)
    crit = stats.norm.ppf(1 - SIGNIFICANCE / 2)
    reject = np.abs(z) > crit

    pair_stats = np.zeros(len(chosen), dtype=[("e", int), ("f", int), ("shared", bool), ("z", float)])
    pair_stats["e"], pair_stats["f"], pair_stats["shared"], pair_stats["z"] = e_idx, f_idx, shared, z

    hits = int(tri.prod(axis=1).sum())
    draws = trials * len(triangles)
    lo, hi = _binomial_ci(hits, draws)
    mu3 = mu**3
    return IndependenceTestResult(
        model=model,
        trials=trials,
        cut=cut,
        roles=roles,
        mu=mu,
        pair_stats=pair_stats,
        rejection_rate=float(reject.mean()),
        shared_rejection_rate=float(reject[shared].mean()) if shared.any() else 0.0,
        disjoint_rejection_rate=float(reject[~shared].mean()) if (~shared).any() else 0.0,
        triangles=len(triangles),
        triple_ratio=hits / draws / mu3,
        triple_ci=(lo / mu3, hi / mu3),
    )
