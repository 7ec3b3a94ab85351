"""Monte Carlo simulation of the full message -> codeword -> permutation ->
channel -> decode chain, for validating the analytic bounds empirically.

Every message is realized as an iid codeword drawn from the input
distribution whose channel image is the message's marginal (random coding;
no fixed codebook).  Decoding is maximum likelihood over the message set,
which depends on the received word only through its symbol counts; score
ties count as errors, matching the convention of the analytic bounds.

Reproducibility: randomness comes from Philox4x64 counter-based streams.
Trial t of a run seeded with s uses the 128-bit key (s mod 2^64) * 2^64 + t;
the permutation draws live in a separate counter block (purpose << 192) of
the same key so that toggling the permutation stage never shifts the
message, codeword, or channel-noise draws.  Results are therefore identical
for any batching or thread layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InfeasibleError, InputError
from .packing import ChannelMatrix, MessageSet, marginal_space_contains
from .probability import Distribution

#: Absolute tolerance on log2 likelihood scores for declaring a decoder tie.
SCORE_TIE_TOL = 1e-9

_MASK64 = (1 << 64) - 1
_PURPOSE_MAIN = 0
_PURPOSE_PERMUTE = 1


def _trial_rng(seed: int, trial: int, purpose: int) -> np.random.Generator:
    key = ((seed & _MASK64) << 64) | (trial & _MASK64)
    return np.random.Generator(np.random.Philox(key=key, counter=purpose << 192))


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: channel, message set, blocklength, trial count,
    seed, and whether to apply the permutation stage explicitly."""

    channel: ChannelMatrix
    message_set: MessageSet
    n: int
    trials: int
    seed: int
    permute: bool = True


@dataclass(frozen=True)
class SimReport:
    errors: int
    trials: int
    p_hat: float
    stderr: float
    ci95: tuple[float, float]
    ties: int


@dataclass(frozen=True)
class PermutationCheck:
    """Paired permute-on/permute-off runs under the same noise streams."""

    report_on: SimReport
    report_off: SimReport
    difference: float
    combined_stderr: float
    z_score: float

    @property
    def within_noise(self) -> bool:
        return abs(self.difference) <= 3.0 * self.combined_stderr \
            or self.difference == 0.0


def input_distribution_for(w: ChannelMatrix, p_marginal: Distribution) -> Distribution:
    """The unique input distribution whose channel image is p_marginal.

    Negative solution entries within 1e-10 are clamped to zero and the
    vector renormalized; anything more negative means the marginal is not
    achievable.
    """
    if not w.is_square or not w.full_rank:
        raise InputError("channel must be a full-rank square matrix")
    if len(p_marginal) != w.ny:
        raise InputError(f"marginal length {len(p_marginal)} != alphabet {w.ny}")
    x = np.linalg.solve(w.matrix.T, p_marginal.probs)
    if np.any(x < -1e-10):
        raise InfeasibleError(
            f"marginal is not an achievable channel output (min preimage entry {x.min()})")
    x = np.where(x < 0.0, 0.0, x)
    return Distribution(x / x.sum())


def ml_decode(log_centers: np.ndarray, counts: np.ndarray,
              tol: float = SCORE_TIE_TOL) -> tuple[int, bool]:
    """Maximum-likelihood decode from symbol counts.

    log_centers is the (M, |Y|) matrix of log2 center probabilities.
    Returns (argmax index, tie flag); the tie flag is set when two or more
    messages share the top score within tol.
    """
    scores = log_centers @ counts
    best = int(np.argmax(scores))
    top = scores[best]
    tie = int(np.sum(scores >= top - tol)) >= 2
    return best, tie


def _validate_config(cfg: SimConfig) -> None:
    if cfg.n < 1:
        raise InputError(f"blocklength must be >= 1, got {cfg.n}")
    if cfg.trials < 1:
        raise InputError(f"trial count must be >= 1, got {cfg.trials}")
    if not cfg.channel.is_square or not cfg.channel.full_rank:
        raise InputError("channel must be a full-rank square matrix")
    for c in cfg.message_set.centers:
        if not marginal_space_contains(cfg.channel, c, tol=1e-9):
            raise InputError(f"message marginal {c!r} is not achievable by the channel")


def run_trials(cfg: SimConfig) -> SimReport:
    """Simulate cfg.trials independent transmissions and report the
    empirical error rate with a 95% normal confidence interval."""
    _validate_config(cfg)
    w = cfg.channel
    ms = cfg.message_set
    m_count = len(ms)
    n = cfg.n

    input_cdfs = np.vstack([
        np.cumsum(input_distribution_for(w, c).probs) for c in ms.centers])
    input_cdfs[:, -1] = 1.0
    channel_cdfs = np.cumsum(w.matrix, axis=1)
    channel_cdfs[:, -1] = 1.0
    log_centers = np.log2(np.vstack([c.probs for c in ms.centers]))

    errors = 0
    ties = 0
    for trial in range(cfg.trials):
        g = _trial_rng(cfg.seed, trial, _PURPOSE_MAIN)
        m = int(g.integers(m_count))
        z = np.searchsorted(input_cdfs[m], g.random(n), side="right")
        if cfg.permute:
            sigma = _trial_rng(cfg.seed, trial, _PURPOSE_PERMUTE).permutation(n)
            x = np.empty(n, dtype=np.int64)
            x[sigma] = z
        else:
            x = z
        u = g.random(n)
        y = np.sum(u[:, None] >= channel_cdfs[x], axis=1)
        counts = np.bincount(y, minlength=w.ny).astype(float)
        m_hat, tie = ml_decode(log_centers, counts)
        if tie:
            ties += 1
            errors += 1
        elif m_hat != m:
            errors += 1

    p_hat = errors / cfg.trials
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / cfg.trials)
    ci = (max(0.0, p_hat - 1.96 * stderr), min(1.0, p_hat + 1.96 * stderr))
    return SimReport(errors=errors, trials=cfg.trials, p_hat=p_hat,
                     stderr=stderr, ci95=ci, ties=ties)


def permutation_invariance_check(cfg: SimConfig) -> PermutationCheck:
    """Run cfg with the permutation stage on and off under the same seed
    (hence identical message/codeword/channel draws) and compare the
    empirical error rates with a two-proportion z test."""
    on = run_trials(replace(cfg, permute=True))
    off = run_trials(replace(cfg, permute=False))
    diff = on.p_hat - off.p_hat
    combined = math.sqrt(on.stderr ** 2 + off.stderr ** 2)
    pooled = (on.errors + off.errors) / (on.trials + off.trials)
    var = pooled * (1.0 - pooled) * (1.0 / on.trials + 1.0 / off.trials)
    z = diff / math.sqrt(var) if var > 0.0 else 0.0
    return PermutationCheck(report_on=on, report_off=off, difference=diff,
                            combined_stderr=combined, z_score=z)
