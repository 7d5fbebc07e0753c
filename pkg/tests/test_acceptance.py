"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` and read the "acceptance criteria"
section of the terminal summary.  Criteria that are known not to hold are left
failing on purpose; see the README for why.
"""

import itertools
import math
import time

import mpmath as mp
import numpy as np
import pytest

from cutbounds import bounds
from cutbounds.experiments import ExperimentConfig, run_concentration, run_independence_test
from cutbounds.generators import draw_drn_nodes, drn_adjacency, lattice_weighted, sample
from cutbounds.graph_core import PAPER, RoleAssignment
from cutbounds.mincut import brute_force_capacity, global_min_cut, st_capacity
from cutbounds.models import DRN, SQUARE, SWR, SWS

mp.mp.dps = 60

MASTER_SEED = 20240917
CRIT4 = ExperimentConfig(SWS(200, 8, 0.2), trials=1000, master_seed=MASTER_SEED, d=1.2)


def _random_instance(rng, i):
    n = int(rng.integers(4, 13))
    kind = i % 3
    if kind == 0:
        k = 2 * int(rng.integers(1, (n - 2) // 2 + 1))
        params = SWS(n, k, float(rng.random()))
    elif kind == 1:
        k = 2 * int(rng.integers(1, (n - 2) // 2 + 1))
        cap = min(1.0, (n - k - 1) / k)
        params = SWR(n, k, float(rng.random()) * cap)
    else:
        rS = float(rng.uniform(0.05, 0.4))
        params = DRN(n, float(rng.random()), rS, float(rng.uniform(rS, 0.56)))
    s, t = (int(v) for v in rng.choice(n, 2, replace=False))
    return params, RoleAssignment(n, s, (t,))


def test_criterion_1_oracle_equivalence(acceptance):
    rng = np.random.default_rng(MASTER_SEED)
    start = time.perf_counter()
    mismatches = []
    for i in range(500):
        params, roles = _random_instance(rng, i)
        g = sample(params, MASTER_SEED + i)
        t = roles.terminals[0]
        if st_capacity(g, roles, t, PAPER).value != brute_force_capacity(g, roles, t).value:
            mismatches.append((params, roles))
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 60
    acceptance(1, ok, f"500 instances, {len(mismatches)} mismatches, {elapsed:.1f}s")
    assert ok


def test_criterion_2_lattice_closed_form(acceptance):
    failures = []
    cases = 0
    for n in range(6, 13):
        for k in range(2, n - 1, 2):
            for w1, w2 in itertools.product((0.0, 0.3, 1.0), repeat=2):
                cases += 1
                got = global_min_cut(lattice_weighted(n, k, w1, w2))
                want = k * w1 + (n - 1 - k) * w2
                if abs(got - want) > 1e-9:
                    failures.append((n, k, w1, w2, got, want))
    detail = f"{cases} cases, {len(failures)} differ"
    if failures:
        detail += "; all have n = k+2 (off-lattice pairs form a perfect matching): " + ", ".join(
            f"(n={n},k={k},w1={w1},w2={w2}: {got:g} vs {want:g})" for n, k, w1, w2, got, want in failures
        )
    ok = not failures
    acceptance(2, ok, detail)
    assert ok, detail


def test_criterion_3_pair_probability(acceptance):
    model = DRN(2, 0.5, 0.1, 0.3)
    mu = bounds.mu_drn(0.5, 0.1, 0.3)
    trials = 1_000_000
    start = time.perf_counter()
    pos, vl = draw_drn_nodes(model, np.random.default_rng(MASTER_SEED), trials)
    freq = float(drn_adjacency(pos, vl, 0.1, 0.3, "torus")[:, 0, 1].mean())
    elapsed = time.perf_counter() - start
    tol = 4 * math.sqrt(mu * (1 - mu) / trials)
    ok = abs(freq - mu) <= tol and abs(mu - 0.0942478) < 5e-8 and elapsed < 30
    acceptance(3, ok, f"freq={freq:.6f} mu={mu:.7f} |diff|={abs(freq - mu):.2e} tol={tol:.2e} {elapsed:.1f}s")
    assert ok


@pytest.fixture(scope="module")
def crit4_result():
    return run_concentration(CRIT4, workers=1)


def test_criterion_4_concentration(acceptance, crit4_result):
    res = crit4_result
    rep = res.report
    window = (1 - rep.epsilon, 1 + rep.epsilon)
    ok = (
        rep.d_valid
        and res.trials == 1000
        and res.lower_violations == 0
        and res.upper_violations == 0
        and window[0] <= res.mean_ratio <= window[1]
        and res.runtime_s < 300
    )
    acceptance(
        4,
        ok,
        f"violations lower={res.lower_violations} upper={res.upper_violations}, "
        f"mean_ratio={res.mean_ratio:.4f} in [{window[0]:.3f}, {window[1]:.3f}], "
        f"budgets {rep.lower_prob_bound:.2e}/{rep.upper_prob_bound:.2e}, {res.runtime_s:.1f}s",
    )
    assert ok


def test_criterion_5_rewiring_center(acceptance):
    parts = []
    ok = True
    for p in (0.2, 0.5, 0.8):
        res = run_concentration(ExperimentConfig(SWR(200, 8, p), trials=500, master_seed=MASTER_SEED))
        rep = res.report
        ratio = float(np.mean(res.capacities)) / 8
        ok &= rep.c_min == 8.0
        if rep.d_valid:
            inside = 1 - rep.epsilon <= ratio <= 1 + rep.epsilon
            ok &= inside
            parts.append(f"p={p}: c_min={rep.c_min:g} ratio={ratio:.3f} window ok={inside}")
        else:
            parts.append(f"p={p}: c_min={rep.c_min:g} ratio={ratio:.3f} FLAGGED d-range empty (d_max={rep.d_max:.3g})")
    acceptance(5, ok, "; ".join(parts))
    assert ok


def test_criterion_6_independence_in_cut(acceptance):
    res = run_independence_test(DRN(64, 0.5, 0.1, 0.3), 10_000, MASTER_SEED)
    lo, hi = res.triple_ci
    ok_pairs = res.rejection_rate <= 0.05
    ok_triple = lo > 1.0
    ok = ok_pairs and ok_triple
    acceptance(
        6,
        ok,
        f"{res.n_pairs} pairs, rejection {res.rejection_rate:.2%} (<=5% needed; node-sharing pairs "
        f"{res.shared_rejection_rate:.1%}, disjoint {res.disjoint_rejection_rate:.1%}); "
        f"triangle ratio {res.triple_ratio:.2f} CI [{lo:.2f}, {hi:.2f}]",
    )
    assert ok


def test_criterion_7_square_bracket(acceptance):
    res = run_concentration(ExperimentConfig(DRN(100, 0.5, 0.1, 0.3, SQUARE), trials=500, master_seed=MASTER_SEED))
    rep = res.report
    low = max(0.0, rep.lower_threshold)
    caps = np.asarray(res.capacities)
    inside = bool(np.all((caps >= low) & (caps <= rep.upper_threshold)))
    within_budget = res.lower_violations <= rep.lower_prob_bound * res.trials and (
        res.upper_violations <= rep.upper_prob_bound * res.trials
    )
    ok = inside and within_budget
    acceptance(
        7,
        ok,
        f"capacities in [{caps.min():g}, {caps.max():g}] vs bracket [{low:g}, {rep.upper_threshold:.3f}], "
        f"violations {res.lower_violations}/{res.upper_violations}, d_valid={rep.d_valid} "
        f"(budgets {rep.lower_prob_bound:g}/{rep.upper_prob_bound:.3g}, vacuous={rep.vacuous})",
    )
    assert ok


def _pinned_grid():
    """50 tuples (n, k, p, d, lam, N, x, eps, rS, rL), fixed by the seed below."""
    rng = np.random.default_rng(7)
    grid = []
    for _ in range(50):
        n = int(rng.integers(6, 5000))
        k = 2 * int(rng.integers(1, min(50, (n - 2) // 2) + 1))
        p = round(float(rng.random()), 4)
        d = round(float(rng.uniform(1.0, 3.0)), 4)
        lam = round(float(rng.uniform(0.05, 1.0)), 4)
        N = int(rng.integers(1, 31))
        x = int(rng.integers(0, N + 1))
        eps = round(float(rng.uniform(0.05, 1.0)), 4)
        rS = round(float(rng.uniform(0.01, 0.3)), 4)
        rL = round(float(rng.uniform(rS, 0.56)), 4)
        grid.append((n, k, p, d, lam, N, x, eps, rS, rL))
    return grid


def _mp_values(n, k, p, d, lam, N, x, eps, rS, rL):
    f = mp.mpf
    m = f(n - 2)
    return {
        "epsilon": mp.sqrt(f(d) * mp.log(m) / (f(lam) ** 2 * m)),
        "d_max": f(lam) ** 2 * m / mp.log(m),
        "hoeffding": mp.exp(-2 * (N + x * (N - x)) * f(eps) ** 2 * f(lam) ** 2),
        "union": 2 * mp.exp(-2 * f(eps) ** 2 * f(lam) ** 2 * N) * (1 + mp.exp(-f(eps) ** 2 * f(lam) ** 2 * N)) ** N,
        "c_min": k + (n - 1 - k) * f(p),
        "mu": mp.pi * f(rS) ** 2 + mp.pi * f(p) ** 2 * (f(rL) ** 2 - f(rS) ** 2),
    }


def test_criterion_8_formula_regression(acceptance):
    worst = {}
    dominance_failures = 0
    for n, k, p, d, lam, N, x, eps, rS, rL in _pinned_grid():
        got = {
            "epsilon": bounds.epsilon_of(d, lam, n),
            "d_max": bounds.d_range(lam, n).upper,
            "hoeffding": bounds.hoeffding_cut_bound(N, x, eps, lam),
            "union": bounds.union_bound(N, eps, lam),
            "c_min": bounds.cmin_sws(n, k, p),
            "mu": bounds.mu_drn(p, rS, rL),
        }
        want = _mp_values(n, k, p, d, lam, N, x, eps, rS, rL)
        for key, value in got.items():
            err = float(abs(mp.mpf(value) - want[key]) / abs(want[key]))
            worst[key] = max(worst.get(key, 0.0), err)
        direct = sum(mp.binomial(N, j) * mp.exp(-2 * (N + j * (N - j)) * mp.mpf(eps) ** 2 * mp.mpf(lam) ** 2) for j in range(N + 1))
        if not got["union"] >= float(direct) * (1 - 1e-12):
            dominance_failures += 1
    ok = max(worst.values()) <= 1e-12 and dominance_failures == 0
    acceptance(
        8,
        ok,
        "50 tuples, worst relative error " + ", ".join(f"{k}={v:.1e}" for k, v in worst.items()) + f"; dominance failures {dominance_failures}",
    )
    assert ok


@pytest.mark.parametrize("workers", [2, 4])
def test_criterion_9_worker_determinism(acceptance, crit4_result, workers):
    other = run_concentration(CRIT4, workers=workers)
    same = other.capacities == crit4_result.capacities
    acceptance(9, same, f"workers=1 vs workers={workers}: {len(other.capacities)} capacities bit-identical={same}")
    assert same
