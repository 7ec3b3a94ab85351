"""Self-contained verification checks behind the `verify` CLI subcommand.

Each check exercises one analytic guarantee numerically (packing radii,
tail identities, bound/enumeration agreement, normal-approximation
accuracy, simulation consistency) and reports pass/fail with a short
detail string.  The suite is deterministic for a fixed seed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .approx import approx_bsc, berry_esseen_bound, moment_constants, verify_moment_bounds
from .bounds import (
    achievability_general,
    bec_achievability,
    bsc_achievability,
    error_event_prob,
    search_max_m_bsc,
)
from .packing import (
    ChannelMatrix,
    build_binary_message_set_by_size,
    build_dmc_message_set_by_grid,
    grid_simplex,
    min_pairwise_kl,
)
from .probability import (
    LOG2E,
    Distribution,
    binomial_tail,
    kl_divergence,
    llr_moments,
    std_normal_cdf,
    std_normal_quantile,
    total_variation,
)
from .sim import SimConfig, run_trials


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_distribution(rng: np.random.Generator, k: int) -> Distribution:
    return Distribution(rng.dirichlet(np.ones(k)))


def check_pinsker(rng: np.random.Generator) -> CheckResult:
    worst = math.inf
    for _ in range(2000):
        k = int(rng.integers(2, 5))
        p, q = _random_distribution(rng, k), _random_distribution(rng, k)
        try:
            slack = kl_divergence(p, q) - 2.0 * LOG2E * total_variation(p, q) ** 2
        except Exception:
            continue
        worst = min(worst, slack)
    return CheckResult("pinsker_inequality", worst >= -1e-12,
                       f"min D - 2 log2(e) TV^2 = {worst:.3e}")


def check_normal_roundtrip(rng: np.random.Generator) -> CheckResult:
    # Above x ~ 5.5 the double storing cdf(x) cannot distinguish nearby x
    # (ulp near 1 over a vanishing density), so the tolerance widens to
    # that representation limit; below it the strict 1e-9 applies.
    worst_slack = -math.inf
    for x in np.linspace(-8.0, 8.0, 161):
        x = float(x)
        u = std_normal_cdf(x)
        density = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        tol = max(1e-9, 2.0 * math.ulp(u) / density)
        err = abs(std_normal_quantile(u) - x)
        worst_slack = max(worst_slack, err - tol)
    return CheckResult("normal_quantile_roundtrip", worst_slack <= 0.0,
                       f"max (err - tol) = {worst_slack:.3e}")


def check_binomial_normalization(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for n in (1, 7, 100, 2048, 100_000):
        p = float(rng.uniform(0.01, 0.99))
        worst = max(worst, abs(binomial_tail(n, 0, n, p) - 1.0))
    return CheckResult("binomial_tail_normalization", worst <= 1e-12,
                       f"max |total - 1| = {worst:.3e}")


def check_grid_counts(rng: np.random.Generator) -> CheckResult:
    for n in range(1, 13):
        for k in (2, 3, 4):
            got = len(grid_simplex(1.0 / n, k))
            want = math.comb(n + k - 1, k - 1)
            if got != want:
                return CheckResult("grid_count_identity", False,
                                   f"n={n} k={k}: {got} != {want}")
    return CheckResult("grid_count_identity", True, "all (n, k) counts match")


def _random_channel(rng: np.random.Generator, k: int) -> ChannelMatrix:
    # Diagonally weighted rows keep the matrix well conditioned and the
    # achievable set fat enough to hold several grid points.
    rows = rng.dirichlet(np.ones(k), size=k) * 0.5 + 0.5 * np.eye(k)
    return ChannelMatrix(rows / rows.sum(axis=1, keepdims=True))


def check_packing_radius(rng: np.random.Generator) -> CheckResult:
    worst = math.inf
    tried = 0
    while tried < 30:
        k = int(rng.integers(2, 5))
        grid_n = int(rng.integers(1, 13))
        w = _random_channel(rng, k)
        try:
            ms = build_dmc_message_set_by_grid(w, grid_n)
        except Exception:
            continue
        if len(ms) < 2:
            continue
        tried += 1
        worst = min(worst, min_pairwise_kl(ms) - ms.radius_r0)
    return CheckResult("packing_radius", worst >= -1e-12,
                       f"min (KL - r0) over 30 sets = {worst:.3e}")


def _exhaustive_unions(deltas: list[float], m: int, n: int) -> tuple[float, float]:
    """Exact full-union and neighbor-union error probabilities for a binary
    set, by brute force over all 2^n outputs."""
    pm = deltas[m]
    full = 0.0
    nbr = 0.0
    neighbors = [j for j in (m - 1, m + 1) if 0 <= j < len(deltas)]
    for word in itertools.product((0, 1), repeat=n):
        t = word.count(0)  # symbol 0 carries probability delta
        w_m = pm ** t * (1 - pm) ** (n - t)
        if any(deltas[j] ** t * (1 - deltas[j]) ** (n - t) >= w_m
               for j in range(len(deltas)) if j != m):
            full += w_m
        if any(deltas[j] ** t * (1 - deltas[j]) ** (n - t) >= w_m
               for j in neighbors):
            nbr += w_m
    return full, nbr


def check_neighbor_union(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for m_count in (3, 4):
        ms = build_binary_message_set_by_size(0.11, 0.11, m_count)
        deltas = [c[0] for c in ms.centers]
        for n in (1, 3, 6):
            for m in range(m_count):
                full, nbr = _exhaustive_unions(deltas, m, n)
                worst = max(worst, abs(full - nbr))
    return CheckResult("neighbor_union_equivalence", worst <= 1e-12,
                       f"max |full - neighbor| = {worst:.3e}")


def check_binary_bound_exact(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for m_count, n in ((3, 17), (4, 29), (5, 40)):
        ms = build_binary_message_set_by_size(0.11, 0.11, m_count)
        worst = max(worst, abs(bsc_achievability(0.11, ms, n)
                               - achievability_general(ms, n)))
    return CheckResult("binary_bound_matches_enumeration", worst <= 1e-12,
                       f"max |closed form - enumeration| = {worst:.3e}")


def check_bec_reduction(rng: np.random.Generator) -> CheckResult:
    for _ in range(10):
        m = int(rng.integers(2, 8))
        n = int(rng.integers(1, 200))
        if bec_achievability(0.22, m, n) != bsc_achievability(
                0.11, build_binary_message_set_by_size(0.11, 0.11, m), n):
            return CheckResult("bec_bsc_reduction", False, f"mismatch at m={m} n={n}")
    return CheckResult("bec_bsc_reduction", True, "bit-identical on 10 random (m, n)")


def check_moment_intervals(rng: np.random.Generator) -> CheckResult:
    for w in (ChannelMatrix.bsc(0.11), _random_channel(rng, 3)):
        cap = moment_constants(w).r0_cap
        rep = verify_moment_bounds(w, cap / 4.0)
        if not rep.all_pass:
            return CheckResult("moment_intervals", False,
                               f"violation among {len(rep.pairs)} pairs")
    return CheckResult("moment_intervals", True, "all neighbor pairs inside intervals")


def check_normal_sandwich(rng: np.random.Generator) -> CheckResult:
    worst = -math.inf
    for _ in range(20):
        delta = float(rng.uniform(0.06, 0.3))
        m_count = int(rng.integers(2, 7))
        ms = build_binary_message_set_by_size(delta, delta, m_count)
        i = int(rng.integers(0, m_count - 1))
        p, q = ms.centers[i], ms.centers[i + 1]
        for n in (50, 100):
            exact = error_event_prob(p, q, n)
            mo = llr_moments(p, q)
            mid = std_normal_cdf(-math.sqrt(n) * mo.mean / math.sqrt(mo.variance))
            worst = max(worst, abs(exact - mid) - berry_esseen_bound(mo, n))
    return CheckResult("normal_sandwich", worst <= 0.0,
                       f"max |exact - normal| - radius = {worst:.3e}")


def check_approx_gap(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for n in (20, 100, 300, 1000):
        exact = search_max_m_bsc(0.11, n, 1e-3).log2_m
        approx = approx_bsc(0.11, n, 1e-3, ceil_variant=True)
        worst = max(worst, abs(exact - approx))
    return CheckResult("approximation_gap", worst <= 1.0,
                       f"max |log2 M gap| = {worst:.3f} bits")


def check_simulation(rng: np.random.Generator) -> CheckResult:
    w = ChannelMatrix.bsc(0.11)
    ms = build_binary_message_set_by_size(0.11, 0.11, 3)
    n, trials = 60, 4000
    bound = bsc_achievability(0.11, ms, n)
    rep = run_trials(SimConfig(channel=w, message_set=ms, n=n, trials=trials,
                               seed=20240811))
    ok = rep.p_hat <= bound + 3.0 * rep.stderr + 1e-12
    return CheckResult("simulation_below_bound", ok,
                       f"p_hat={rep.p_hat:.2e} bound={bound:.2e}")


_CHECKS = (
    check_pinsker,
    check_normal_roundtrip,
    check_binomial_normalization,
    check_grid_counts,
    check_packing_radius,
    check_neighbor_union,
    check_binary_bound_exact,
    check_bec_reduction,
    check_moment_intervals,
    check_normal_sandwich,
    check_approx_gap,
    check_simulation,
)


def run_all_checks(seed: int = 1234) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [check(rng) for check in _CHECKS]
