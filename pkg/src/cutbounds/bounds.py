"""Closed-form capacity bounds for graphs whose cut edges are independent.

All functions are pure.  Probability bounds that exceed 1 are returned as is
and flagged; the clamped value is always a separate field.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .models import DRN, SQUARE, SWR, SWS, TORUS_MAX_RANGE, TORUS, ModelParams

if TYPE_CHECKING:
    from .generators import WeightedGraph


def lambda_of(wg: WeightedGraph) -> float:
    """Smallest strictly positive pair probability."""
    w = wg.pair_weights()
    positive = w[w > 0.0]
    if positive.size == 0:
        raise ValueError("no pair has a positive connection probability")
    return float(positive.min())


def _check_n(n: int) -> None:
    if n < 4:
        raise ValueError(f"n must be at least 4 so that ln(n-2) > 0, got {n}")


def epsilon_of(d: float, lam: float, n: int) -> float:
    _check_n(n)
    if lam <= 0.0 or d <= 0.0:
        raise ValueError("d and lambda must be positive")
    m = n - 2
    return math.sqrt(d * math.log(m) / (lam * lam * m))


@dataclass(frozen=True)
class Interval:
    """Open interval ``(lower, upper)``; empty when ``upper <= lower``."""

    lower: float
    upper: float

    @property
    def empty(self) -> bool:
        return not self.upper > self.lower

    def __contains__(self, value: float) -> bool:
        return self.lower < value < self.upper


def d_range(lam: float, n: int) -> Interval:
    _check_n(n)
    m = n - 2
    return Interval(1.0, lam * lam * m / math.log(m))


def hoeffding_cut_bound(N: int, x: int, epsilon: float, lam: float) -> float:
    """Tail bound on a single size-``x`` cut falling to ``(1-eps)`` of its mean."""
    if not 0 <= x <= N:
        raise ValueError(f"cut size {x} outside [0, {N}]")
    return math.exp(-2.0 * (N + x * (N - x)) * epsilon**2 * lam**2)


def union_bound(N: int, epsilon: float, lam: float) -> float:
    """Bound on any cut falling short, summed over all cut sizes.  Unclamped."""
    if N < 1:
        raise ValueError("N must be at least 1")
    a = epsilon**2 * lam**2 * N
    return math.exp(math.log(2.0) - 2.0 * a + N * math.log1p(math.exp(-a)))


def union_bound_clamped(N: int, epsilon: float, lam: float) -> float:
    return min(1.0, union_bound(N, epsilon, lam))


def cmin_sws(n: int, k: int, p: float) -> float:
    SWS(n, k, p)
    return k + (n - 1 - k) * p


def cmin_swr(k: int) -> float:
    if k < 2 or k % 2:
        raise ValueError(f"k must be an even integer >= 2, got {k}")
    return float(k)


def mu_drn(p: float, rS: float, rL: float, metric: str = TORUS) -> float:
    """Pairwise connection probability of a dual radio network."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if not 0.0 < rS <= rL:
        raise ValueError(f"ranges must satisfy 0 < rS <= rL, got rS={rS}, rL={rL}")
    if metric == TORUS and rL > TORUS_MAX_RANGE:
        raise ValueError(f"torus metric requires rL <= 1/sqrt(pi), got {rL}")
    return math.pi * rS**2 + math.pi * p**2 * (rL**2 - rS**2)


def cmin_drn(n: int, mu: float) -> float:
    if n < 2:
        raise ValueError("n must be at least 2")
    return (n - 2) * mu


def lambda_swr(params: SWR) -> float:
    candidates = [v for v in (1.0 - params.p, params.chord_probability) if v > 0.0]
    return min(candidates)


def lower_probability(alpha: int, n: int, d: float) -> float:
    """``alpha * 2 / (N^{2d} - N^{d+1})`` with ``N = n - 2``; inf when the
    denominator is not positive (``d <= 1``)."""
    N = n - 2
    denom = N ** (2 * d) - N ** (d + 1)
    if denom <= 0.0:
        return math.inf
    return alpha * 2.0 / denom


def upper_probability(n: int, d: float) -> float:
    return float(n - 2) ** (-2.0 * d)


def default_d(interval: Interval) -> float:
    if interval.empty:
        return 1.0
    return 1.0 + 0.5 * (interval.upper - 1.0)


@dataclass(frozen=True)
class BoundReport:
    model: ModelParams
    alpha: int
    d: float
    lam: float
    epsilon: float
    c_min: float
    lower_threshold: float
    upper_threshold: float
    lower_prob_bound: float
    upper_prob_bound: float
    d_valid: bool
    d_max: float
    mu: float | None = None
    mu_prime: float | None = None
    epsilon_prime: float | None = None

    @property
    def lower_prob_bound_clamped(self) -> float:
        return min(1.0, self.lower_prob_bound)

    @property
    def upper_prob_bound_clamped(self) -> float:
        return min(1.0, self.upper_prob_bound)

    @property
    def vacuous(self) -> bool:
        return self.lower_prob_bound > 1.0 or self.upper_prob_bound > 1.0

    @property
    def lower_includes_zero(self) -> bool:
        return self.lower_threshold < 0.0

    def as_dict(self) -> dict:
        """Flat record; ``lambda`` is spelled out in full."""
        out = dict(self.model.as_dict())
        out.update(
            alpha=self.alpha,
            d=self.d,
            d_max=self.d_max,
            d_valid=self.d_valid,
            **{"lambda": self.lam},
            epsilon=self.epsilon,
            c_min=self.c_min,
            lower_threshold=self.lower_threshold,
            upper_threshold=self.upper_threshold,
            lower_prob_bound=self.lower_prob_bound,
            upper_prob_bound=self.upper_prob_bound,
            lower_prob_bound_clamped=self.lower_prob_bound_clamped,
            upper_prob_bound_clamped=self.upper_prob_bound_clamped,
            vacuous=self.vacuous,
            lower_includes_zero=self.lower_includes_zero,
            mu=self.mu,
            mu_prime=self.mu_prime,
            epsilon_prime=self.epsilon_prime,
        )
        return out


def _center_and_lambda(model: ModelParams) -> tuple[float, float, float | None]:
    if isinstance(model, SWS):
        if model.p <= 0.0:
            # no random pairs: every pair probability is 0 or 1
            return cmin_sws(model.n, model.k, model.p), 1.0, None
        return cmin_sws(model.n, model.k, model.p), model.p, None
    if isinstance(model, SWR):
        return cmin_swr(model.k), lambda_swr(model), None
    if isinstance(model, DRN):
        mu = mu_drn(model.p, model.rS, model.rL, model.metric)
        return cmin_drn(model.n, mu), mu, mu
    raise TypeError(f"unsupported model parameters: {model!r}")


def theorem_report(model: ModelParams, alpha: int = 1, d: float | None = None) -> BoundReport:
    """Assemble the two-sided capacity bracket and its probability bounds.

    Never refuses: when ``d`` falls outside its admissible interval the
    report is still filled in and ``d_valid`` is False.  Square-metric dual
    radio networks are routed to :func:`square_drn_report`.
    """
    if isinstance(model, DRN) and model.metric == SQUARE:
        return square_drn_report(model, alpha, d)
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    c_min, lam, mu = _center_and_lambda(model)
    interval = d_range(lam, model.n)
    if d is None:
        d = default_d(interval)
    eps = epsilon_of(d, lam, model.n)
    return BoundReport(
        model=model,
        alpha=alpha,
        d=d,
        lam=lam,
        epsilon=eps,
        c_min=c_min,
        lower_threshold=(1.0 - eps) * c_min,
        upper_threshold=(1.0 + eps) * c_min,
        lower_prob_bound=lower_probability(alpha, model.n, d),
        upper_prob_bound=upper_probability(model.n, d),
        d_valid=d in interval,
        d_max=interval.upper,
        mu=mu,
    )


def square_drn_report(model: DRN, alpha: int = 1, d: float | None = None) -> BoundReport:
    """Bracket for a dual radio network on the plain unit square.

    The lower side comes from equalising every node to the corner coverage
    ``mu / 4``, which multiplies the deviation radius by 4; the upper side
    keeps ``mu`` and ``epsilon``.
    """
    if model.metric != SQUARE:
        raise ValueError("square_drn_report needs a square-metric DRN")
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    mu = mu_drn(model.p, model.rS, model.rL, model.metric)
    interval = d_range(mu, model.n)
    if d is None:
        d = default_d(interval)
    eps = epsilon_of(d, mu, model.n)
    mu_prime = mu / 4.0
    eps_prime = 4.0 * eps  # equals epsilon_of(d, mu_prime, n) up to rounding
    c_min = cmin_drn(model.n, mu)
    return BoundReport(
        model=model,
        alpha=alpha,
        d=d,
        lam=mu,
        epsilon=eps,
        c_min=c_min,
        lower_threshold=(1.0 - 4.0 * eps) * (model.n - 2) * mu_prime,
        upper_threshold=(1.0 + eps) * c_min,
        lower_prob_bound=lower_probability(alpha, model.n, d),
        upper_prob_bound=upper_probability(model.n, d),
        d_valid=d in interval,
        d_max=interval.upper,
        mu=mu,
        mu_prime=mu_prime,
        epsilon_prime=eps_prime,
    )


class Growth(enum.Enum):
    CONSTANT = "constant"
    LOG_POLY_FRACTION = "logpolyfraction"
    OTHER = "other"


class Regime(enum.Enum):
    CONVERGES_BY_REWIRE_DOMINANCE = "ConvergesByRewireDominance"
    CONVERGES_BY_DENSE_LATTICE = "ConvergesByDenseLattice"
    DIVERGES_BOUNDED_K = "DivergesBoundedK"
    UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class RegimeResult:
    regime: Regime
    condition: str


def swr_epsilon_regime(n: int, k: int, p: float, growth: Growth | str = Growth.OTHER) -> RegimeResult:
    """Large-n behaviour of the deviation radius for the rewiring model.

    ``growth`` tags how ``k`` scales with ``n`` along the family.  At ``p = 1``
    no lattice pair survives, so the rewiring branch does not apply and the
    classification falls through to the growth of ``k``.
    """
    SWR(n, k, p)
    growth = Growth(growth) if isinstance(growth, str) else growth
    threshold = 1.0 - k / (n - 1)
    if threshold <= p < 1.0:
        return RegimeResult(Regime.CONVERGES_BY_REWIRE_DOMINANCE, f"p={p} >= 1 - k/(n-1) = {threshold:.6g}")
    if growth is Growth.LOG_POLY_FRACTION:
        return RegimeResult(Regime.CONVERGES_BY_DENSE_LATTICE, "k/n >= 1/ln^a(n) for all large n")
    if growth is Growth.CONSTANT:
        return RegimeResult(Regime.DIVERGES_BOUNDED_K, "k <= b for all large n")
    return RegimeResult(Regime.UNCLASSIFIED, "k growth outside the classified families")
