"""Gaussian approximations of the achievable message count.

For blocklength n and target error eps, the achievable log2 M is
approximated by

    ell * log2( sqrt(n) / (-ell * Phi^{-1}(eps / R)) ) + log2(lambda)

with ell = |Y| - 1, R = |Y|(|Y|-1) the neighbor-count budget, and lambda
the achievable-set volume ratio.  The binary particularizations absorb
lambda = 1 - 2 delta into the log argument, optionally rounding the inner
value up to the next integer message count.  The constant remainder term
is omitted everywhere, matching how the curves are plotted.

The module also carries the moment machinery that justifies the
approximation: interval constants for the variance/third-moment of the
per-symbol log-likelihood ratio over neighbor pairs, and the Berry-Esseen
radius quantifying the normal-approximation error of the decoding metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bounds import neighbor_set
from .errors import InfeasibleError, InputError
from .packing import ChannelMatrix, build_dmc_message_set, volume_ratio
from .probability import (
    LOG2E,
    LLRMoments,
    llr_moments,
    std_normal_cdf,
    std_normal_quantile,
)


@dataclass(frozen=True)
class MomentConstants:
    """Interval constants for V(P||Q) and T(P||Q) over neighbor pairs.

    Valid for grid message sets of KL radius r0 <= r0_cap on the given
    channel: f0_lower*r0 <= V <= f0_upper*r0 and T <= t_upper_coeff*r0^1.5.
    """

    p_min: float
    p_max: float
    f0_lower: float
    f0_upper: float
    t_upper_coeff: float
    r0_cap: float


def moment_constants(w: ChannelMatrix) -> MomentConstants:
    """Moment interval constants for a strictly positive full-rank square
    channel.

    Coordinate extrema over the achievable marginal set occur at the
    images of the input simplex's vertices, i.e. at the rows of W, so
    p_min/p_max are simply the extreme entries of the matrix.
    """
    if not w.is_square or not w.full_rank:
        raise InputError("channel must be a full-rank square matrix")
    if not w.strictly_positive:
        raise InputError("channel matrix must be strictly positive")
    p_min = float(w.matrix.min())
    p_max = float(w.matrix.max())
    return MomentConstants(
        p_min=p_min,
        p_max=p_max,
        f0_lower=65.0 * LOG2E / 72.0,
        f0_upper=5.0 * LOG2E / (2.0 * p_min * (1.0 - p_max) ** 2),
        t_upper_coeff=36.0 * math.sqrt(2.0) * LOG2E ** 1.5
        / (p_min ** 2 * (1.0 - p_max) ** 3),
        r0_cap=2.0 * LOG2E / 9.0,
    )


@dataclass(frozen=True)
class MomentPairCheck:
    owner: int
    neighbor: int
    variance: float
    third_abs: float
    variance_ok: bool
    third_ok: bool


@dataclass(frozen=True)
class MomentReport:
    constants: MomentConstants
    r0: float
    cap_exceeded: bool
    pairs: tuple[MomentPairCheck, ...]

    @property
    def all_pass(self) -> bool:
        return not self.cap_exceeded and all(p.variance_ok and p.third_ok
                                             for p in self.pairs)


def verify_moment_bounds(w: ChannelMatrix, r0: float) -> MomentReport:
    """Measure V and T on every (center, neighbor) pair of the grid set of
    radius r0 and check them against the moment_constants intervals.

    Violations are reported, not raised; r0 above the cap yields a report
    flagged cap_exceeded with no pairs.
    """
    consts = moment_constants(w)
    if r0 > consts.r0_cap:
        return MomentReport(constants=consts, r0=r0, cap_exceeded=True, pairs=())
    ms = build_dmc_message_set(w, r0)
    checks = []
    for m in range(len(ms)):
        for j, q in neighbor_set(ms, m).neighbors:
            mo = llr_moments(ms.centers[m], q)
            v_ok = consts.f0_lower * r0 <= mo.variance <= consts.f0_upper * r0
            t_ok = mo.third_abs <= consts.t_upper_coeff * r0 ** 1.5
            checks.append(MomentPairCheck(owner=m, neighbor=j,
                                          variance=mo.variance,
                                          third_abs=mo.third_abs,
                                          variance_ok=v_ok, third_ok=t_ok))
    return MomentReport(constants=consts, r0=r0, cap_exceeded=False,
                        pairs=tuple(checks))


# ---------------------------------------------------------------------------
# Berry-Esseen radius for the iid decoding-metric sum
# ---------------------------------------------------------------------------


def berry_esseen_bound(moments: LLRMoments, n: int, c0: float = 6.0) -> float:
    """Uniform normal-approximation radius B_n / sqrt(n) for the CDF of the
    standardized sum of n iid log-likelihood ratios, B_n = c0 * T / V^1.5.

    c0 defaults to 6; tighter modern constants can be passed in.
    """
    if n < 1:
        raise InputError(f"blocklength must be >= 1, got {n}")
    if moments.variance <= 0.0:
        raise InfeasibleError("zero-variance log-likelihood ratio has no normal scale")
    return c0 * moments.third_abs / moments.variance ** 1.5 / math.sqrt(n)


def berry_esseen_interval(moments: LLRMoments, n: int, x: float,
                          c0: float = 6.0) -> tuple[float, float]:
    """Two-sided estimate Phi(x) -+ B_n/sqrt(n) for
    P[ sum <= n (mean + x sqrt(V/n)) ], clamped into [0, 1]."""
    radius = berry_esseen_bound(moments, n, c0)
    mid = std_normal_cdf(x)
    return max(0.0, mid - radius), min(1.0, mid + radius)


# ---------------------------------------------------------------------------
# log2 M approximations (remainder term omitted)
# ---------------------------------------------------------------------------


def _negative_quantile(u: float) -> float:
    """Quantile for arguments that must sit strictly below 1/2."""
    if not 0.0 < u < 0.5:
        raise InfeasibleError(
            f"quantile argument {u} outside (0, 0.5): approximation undefined")
    return std_normal_quantile(u)


def approx_general(w: ChannelMatrix, n: int, eps: float) -> float:
    """Approximate achievable log2 M for a strictly positive full-rank
    square channel: ell*log2(sqrt(n)/(-ell*quantile)) + log2(volume ratio),
    with the quantile taken at eps over the neighbor-count budget
    |Y|(|Y|-1)."""
    if n < 2:
        raise InputError(f"blocklength must be >= 2, got {n}")
    lam = volume_ratio(w)
    ell = w.ny - 1
    r_count = 2 * math.comb(w.ny, 2)
    q = _negative_quantile(eps / r_count)
    return ell * math.log2(math.sqrt(n) / (-ell * q)) + math.log2(lam)


def approx_bsc(delta: float, n: int, eps: float, ceil_variant: bool = False) -> float:
    """Approximate achievable log2 M for the symmetric binary channel:
    log2 of (1-2 delta) sqrt(n) / (-Phi^{-1}(eps/2)), optionally rounding
    the inner value up to the next integer message count first."""
    if not 0.0 < delta < 0.5:
        raise InputError(f"crossover must lie in (0, 0.5), got {delta}")
    if n < 1:
        raise InputError(f"blocklength must be >= 1, got {n}")
    q = _negative_quantile(eps / 2.0)
    inner = (1.0 - 2.0 * delta) * math.sqrt(n) / (-q)
    if ceil_variant:
        # Snap relief keeps an inner value that is mathematically integer
        # from being bumped a whole message up by float noise.
        return math.log2(max(1, math.ceil(inner - 1e-9)))
    return math.log2(inner)


def approx_bec(eta: float, n: int, eps: float, ceil_variant: bool = False) -> float:
    """Binary-erasure variant: identical to the symmetric binary channel at
    crossover eta/2 (so the inner width is 1 - eta)."""
    if not 0.0 < eta < 1.0:
        raise InputError(f"erasure probability must lie in (0, 1), got {eta}")
    return approx_bsc(eta / 2.0, n, eps, ceil_variant=ceil_variant)


def radius_for_target(eps: float, n_samples: int, f0: float, f1: float,
                      r_count: int) -> float:
    """Packing radius that drives the normal-approximated neighbor error
    sum below eps: (Phi^{-1}(eps/r_count - f1/sqrt(n)))^2 * f0 / n.

    Diagnostic: connects a target error to the radius (hence message
    count) the moment constants certify.  f1 is the Berry-Esseen level,
    f0 the variance-per-radius constant.
    """
    if n_samples < 1:
        raise InputError(f"sample count must be >= 1, got {n_samples}")
    if r_count < 1:
        raise InputError(f"neighbor budget must be >= 1, got {r_count}")
    if f0 <= 0.0:
        raise InputError(f"variance constant must be positive, got {f0}")
    arg = eps / r_count - f1 / math.sqrt(n_samples)
    if arg <= 0.0:
        raise InfeasibleError(
            f"target eps={eps} infeasible: corrected quantile argument {arg} <= 0")
    if arg >= 1.0:
        raise InputError(f"corrected quantile argument {arg} must be < 1")
    q = std_normal_quantile(arg)
    return q * q * f0 / n_samples
