"""Achievability bounds for noisy permutation channels.

The decoder only sees the empirical distribution of the received word, so
the error analysis reduces to pairwise log-likelihood-ratio tests between
a transmitted marginal and the packing centers one grid step away from it
(its neighbor set).  This module evaluates those error events exactly,
either by enumerating output types or, for binary alphabets, through
closed-form binomial tail sums, and searches for the largest message
count whose error bound stays below a target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np
from scipy.special import gammaln

from .errors import (
    InfeasibleError,
    InputError,
    ResourceLimitError,
    SupportViolationError,
)
from .packing import (
    ChannelMatrix,
    MessageSet,
    SetKind,
    build_binary_message_set_by_size,
    build_dmc_message_set_by_grid,
)
from .probability import Distribution, binomial_tail, llr_moments, std_normal_cdf

#: Default cap on the number of output types enumerated exactly.
TYPE_CAP = 10**7

#: Metric totals within this of zero count as decoding ties (= errors).
TIE_TOL = 1e-12

# Relief applied inside floor/ceil so that thresholds landing exactly on an
# integer keep the tie on the error side despite float rounding.
_SNAP = 1e-9

#: Recognized bound/approximation tags (the CSV `method` vocabulary).
METHODS = frozenset({
    "THM2_EXACT", "THM3_BSC", "THM4_BEC",
    "APPROX_GENERAL", "APPROX_BSC", "APPROX_BSC_CEIL",
    "APPROX_BEC", "APPROX_BEC_CEIL", "SIMULATION",
})


@dataclass(frozen=True)
class BoundPoint:
    """One point of a rate/blocklength tradeoff curve."""

    n: int
    eps_target: float
    m_achieved: int
    log2_m: float
    rate: float
    eps_bound: float
    method: str

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise InputError(f"unknown method tag {self.method!r}")


def rate_of(log2_m: float, n: int) -> float:
    """Code rate log2(M) / log2(n); zero for the degenerate M = 1 point."""
    if log2_m == 0.0:
        return 0.0
    if n <= 1:
        return math.inf
    return log2_m / math.log2(n)


@dataclass(frozen=True)
class NeighborSet:
    """Packing centers one grid step away from an owner center."""

    owner_index: int
    neighbors: tuple[tuple[int, Distribution], ...]

    def __len__(self) -> int:
        return len(self.neighbors)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.neighbors)


def _neighbor_indices(s: MessageSet, m: int) -> list[int]:
    size = len(s)
    if not 0 <= m < size:
        raise InputError(f"message index {m} out of range [0, {size})")
    if s.kind is SetKind.BINARY:
        return [i for i in (m - 1, m + 1) if 0 <= i < size]
    assert s.grid_coords is not None
    index_of = {c: i for i, c in enumerate(s.grid_coords)}
    base = s.grid_coords[m]
    k = len(base)
    found = set()
    for i in range(k):
        for j in range(k):
            if i == j or base[j] == 0:
                continue
            cand = list(base)
            cand[i] += 1
            cand[j] -= 1
            hit = index_of.get(tuple(cand))
            if hit is not None:
                found.add(hit)
    return sorted(found)


def neighbor_set(s: MessageSet, m: int) -> NeighborSet:
    """All set members reachable from center m by moving one grid step of
    mass between a single pair of coordinates."""
    idx = _neighbor_indices(s, m)
    return NeighborSet(owner_index=m,
                       neighbors=tuple((i, s.centers[i]) for i in idx))


def decoding_metric(p: Distribution, q: Distribution, y: int) -> float:
    """Per-symbol log-likelihood ratio log2(p(y)/q(y)), bits."""
    if len(p) != len(q):
        raise InputError(f"length mismatch: {len(p)} vs {len(q)}")
    if not 0 <= y < len(p):
        raise InputError(f"symbol index {y} out of range [0, {len(p)})")
    if p[y] <= 0.0 or q[y] <= 0.0:
        raise SupportViolationError(f"metric undefined at symbol {y}: p={p[y]}, q={q[y]}")
    return math.log2(p[y] / q[y])


# ---------------------------------------------------------------------------
# Exact error-event probability by type enumeration
# ---------------------------------------------------------------------------


def error_event_prob(p: Distribution, q: Distribution, n: int,
                     cap: int = TYPE_CAP, tie_tol: float = TIE_TOL) -> float:
    """P[ sum_i log2(p(Y_i)/q(Y_i)) <= 0 ] for Y_1..Y_n iid from p, exact.

    Enumerates output type vectors, accumulating the multinomial mass of
    every type whose metric total is <= 0.  Totals within ``tie_tol`` of
    zero count as errors, keeping the quantity an upper bound under the
    tie-breaking convention of the decoder.
    """
    if n < 1:
        raise InputError(f"blocklength must be >= 1, got {n}")
    if len(p) != len(q):
        raise InputError(f"length mismatch: {len(p)} vs {len(q)}")
    pa, qa = p.probs, q.probs
    if np.any(pa <= 0.0) or np.any(qa <= 0.0):
        raise SupportViolationError("both distributions must have full support")
    k = len(p)
    if math.comb(n + k - 1, k - 1) > cap:
        raise ResourceLimitError(
            f"{math.comb(n + k - 1, k - 1)} types exceed the cap {cap}")

    d = np.log2(pa / qa)                      # metric per symbol, bits
    logp = np.log(pa)                         # natural log for pmf weights
    lf = gammaln(np.arange(n + 1) + 1.0)      # lf[t] = ln t!
    lgn = float(gammaln(n + 1.0))
    selected: list[np.ndarray] = []

    def scan(coord: int, rem: int, metric0: float, logw0: float) -> None:
        if coord == k - 2:
            ta = np.arange(rem + 1)
            tb = rem - ta
            metric = metric0 + ta * d[k - 2] + tb * d[k - 1]
            logw = (logw0 + ta * logp[k - 2] + tb * logp[k - 1]
                    - lf[ta] - lf[tb])
            mask = metric <= tie_tol
            if mask.any():
                selected.append(logw[mask])
            return
        for t in range(rem + 1):
            scan(coord + 1, rem - t, metric0 + t * d[coord],
                 logw0 + t * logp[coord] - lf[t])

    scan(0, n, 0.0, lgn)
    if not selected:
        return 0.0
    vals = np.concatenate(selected)
    top = float(vals.max())
    ev = np.exp(vals - top)
    ev.sort()
    return min(1.0, max(0.0, math.exp(top) * float(ev.sum())))


def _error_event_estimate(p: Distribution, q: Distribution, n: int) -> float:
    """Normal-approximation stand-in for error_event_prob, shifted up by
    the third-moment correction so it stays an upper estimate."""
    mo = llr_moments(p, q)
    if mo.variance <= 0.0:
        return 1.0
    phi = std_normal_cdf(-math.sqrt(n) * mo.mean / math.sqrt(mo.variance))
    radius = 6.0 * mo.third_abs / mo.variance ** 1.5 / math.sqrt(n)
    return min(1.0, phi + radius)


def achievability_general(s: MessageSet, n: int, cap: int = TYPE_CAP) -> float:
    """Uniform-message average of per-message neighbor error sums, each
    summand clamped at 1.  Exact (type enumeration); raises
    ResourceLimitError when the alphabet/blocklength make that infeasible.
    """
    per_message = []
    for m in range(len(s)):
        total = 0.0
        for j in _neighbor_indices(s, m):
            total += error_event_prob(s.centers[m], s.centers[j], n, cap=cap)
        per_message.append(min(1.0, total))
    if not per_message:
        raise InputError("empty message set")
    return math.fsum(per_message) / len(per_message)


def _achievability_estimate(s: MessageSet, n: int, cap: int) -> tuple[float, bool]:
    """achievability_general with a normal-approximation fallback once the
    exact enumeration exceeds the cap.  Returns (value, was_exact)."""
    try:
        return achievability_general(s, n, cap=cap), True
    except ResourceLimitError:
        per_message = []
        for m in range(len(s)):
            total = 0.0
            for j in _neighbor_indices(s, m):
                total += _error_event_estimate(s.centers[m], s.centers[j], n)
            per_message.append(min(1.0, total))
        return math.fsum(per_message) / len(per_message), False


# ---------------------------------------------------------------------------
# Binary alphabet: closed-form binomial tails
# ---------------------------------------------------------------------------


def dominance_fraction(p_m: float, p_j: float) -> float:
    """Fraction f such that the pairwise test between binary marginals
    (p_m, 1-p_m) and (p_j, 1-p_j) flips at count threshold n*f.

    Monotonically increasing in p_j, which is what confines the error
    union to the two adjacent centers.
    """
    if not (0.0 < p_m < 1.0 and 0.0 < p_j < 1.0):
        raise InputError(f"marginals must lie in (0, 1), got {p_m}, {p_j}")
    if p_j == p_m:
        raise InputError("marginals must differ")
    num = math.log((1.0 - p_j) / (1.0 - p_m))
    den = math.log(p_m * (1.0 - p_j) / (p_j * (1.0 - p_m)))
    return num / den


def _lower_threshold(delta_i: float, delta_prev: float, n: int) -> int:
    x = n * dominance_fraction(delta_i, delta_prev)
    return max(-1, min(n, math.floor(x + _SNAP)))


def _upper_threshold(delta_i: float, delta_next: float, n: int) -> int:
    x = n * dominance_fraction(delta_i, delta_next)
    return max(0, min(n + 1, math.ceil(x - _SNAP)))


def bsc_achievability(delta: float, centers: MessageSet, n: int) -> float:
    """Average-error upper bound for a symmetric binary channel followed by
    a random permutation, evaluated through exact binomial tails.

    ``centers`` must be a BINARY set built with delta1 = delta2 = delta,
    sorted ascending (the constructors guarantee this).
    """
    if n < 1:
        raise InputError(f"blocklength must be >= 1, got {n}")
    if centers.kind is not SetKind.BINARY or centers.binary_params is None:
        raise InputError("centers must come from the binary construction")
    bp = centers.binary_params
    if abs(bp.delta1 - delta) > 1e-12 or abs(bp.delta2 - delta) > 1e-12:
        raise InputError(
            f"center interval [{bp.delta1}, {1 - bp.delta2}] does not match delta={delta}")
    deltas = [c[0] for c in centers.centers]
    m_count = len(deltas)
    if m_count < 2:
        raise InputError("need at least 2 centers")
    per_message = []
    for i in range(m_count):
        total = 0.0
        if i > 0:
            t_lo = _lower_threshold(deltas[i], deltas[i - 1], n)
            total += binomial_tail(n, 0, t_lo, deltas[i])
        if i < m_count - 1:
            t_up = _upper_threshold(deltas[i], deltas[i + 1], n)
            total += binomial_tail(n, t_up, n, deltas[i])
        per_message.append(min(1.0, total))
    return math.fsum(per_message) / m_count


def bec_achievability(eta: float, m: int, n: int) -> float:
    """Average-error upper bound for the binary erasure channel, obtained
    bit-identically from the symmetric binary channel at crossover eta/2
    (erasures degrade to symmetric flips of half their probability)."""
    if not 0.0 < eta < 1.0:
        raise InputError(f"erasure probability must lie in (0, 1), got {eta}")
    delta = eta / 2.0
    return bsc_achievability(delta, build_binary_message_set_by_size(delta, delta, m), n)


# ---------------------------------------------------------------------------
# Maximal message count search
# ---------------------------------------------------------------------------

#: After the first infeasible M, this many further values must also be
#: infeasible before the scan stops (non-monotonicity guard).
_LOOKAHEAD = 3

ChannelSpec = Union[ChannelMatrix, tuple[str, float]]


def _search_result(n: int, eps: float, best_m: int, best_bound: float,
                   method: str) -> BoundPoint:
    log2_m = math.log2(best_m)
    return BoundPoint(n=n, eps_target=eps, m_achieved=best_m, log2_m=log2_m,
                      rate=rate_of(log2_m, n), eps_bound=best_bound, method=method)


def _check_search_args(n: int, eps: float) -> None:
    if n < 1:
        raise InputError(f"blocklength must be >= 1, got {n}")
    if not 0.0 < eps < 1.0:
        raise InputError(f"target error must lie in (0, 1), got {eps}")


def search_max_m_bsc(delta: float, n: int, eps: float) -> BoundPoint:
    """Largest M >= 2 whose binary-channel bound is <= eps, scanning up
    from M = 2; M = 1 encodes infeasibility."""
    _check_search_args(n, eps)
    if not 0.0 < delta < 0.5:
        raise InputError(f"crossover must lie in (0, 0.5), got {delta}")
    best_m, best_bound = 1, 0.0
    fails = 0
    m = 2
    while fails <= _LOOKAHEAD:
        ms = build_binary_message_set_by_size(delta, delta, m)
        b = bsc_achievability(delta, ms, n)
        if b <= eps:
            best_m, best_bound = m, b
            fails = 0
        else:
            fails += 1
        m += 1
    return _search_result(n, eps, best_m, best_bound, "THM3_BSC")


def search_max_m_bec(eta: float, n: int, eps: float) -> BoundPoint:
    if not 0.0 < eta < 1.0:
        raise InputError(f"erasure probability must lie in (0, 1), got {eta}")
    return replace(search_max_m_bsc(eta / 2.0, n, eps), method="THM4_BEC")


def search_max_m_general(w: ChannelMatrix, n: int, eps: float,
                         cap: int = TYPE_CAP) -> BoundPoint:
    """Largest achievable grid message set for an arbitrary strictly
    positive full-rank square channel.

    Scans grid resolutions upward (set sizes are nondecreasing in the
    resolution) with the same infeasibility lookahead as the binary scan.
    Falls back to the normal-approximation error estimate when exact type
    enumeration would exceed ``cap``; the method tag records that.
    """
    _check_search_args(n, eps)
    best_m, best_bound = 1, 0.0
    used_fallback = False
    fails = 0
    last_size = 0
    grid = 1
    while fails <= _LOOKAHEAD:
        try:
            ms = build_dmc_message_set_by_grid(w, grid, cap=10**6)
        except InfeasibleError:
            grid += 1
            if grid > 4096:
                break
            continue
        except ResourceLimitError:
            break
        grid += 1
        if len(ms) < 2 or len(ms) == last_size:
            continue
        last_size = len(ms)
        b, exact = _achievability_estimate(ms, n, cap)
        if b <= eps and len(ms) > best_m:
            best_m, best_bound = len(ms), b
            used_fallback = not exact
            fails = 0
        elif b > eps:
            fails += 1
    method = "THM2_EXACT" if not used_fallback else "APPROX_GENERAL"
    return _search_result(n, eps, best_m, best_bound, method)


def search_max_m(channel: ChannelSpec, n: int, eps: float) -> BoundPoint:
    """Dispatch on channel kind: ("bsc", delta), ("bec", eta), or a
    ChannelMatrix for the general grid search."""
    if isinstance(channel, ChannelMatrix):
        return search_max_m_general(channel, n, eps)
    kind, param = channel
    if kind == "bsc":
        return search_max_m_bsc(param, n, eps)
    if kind == "bec":
        return search_max_m_bec(param, n, eps)
    raise InputError(f"unknown channel kind {kind!r}")
