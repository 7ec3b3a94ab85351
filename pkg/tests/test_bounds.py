"""Achievability bounds: neighbor sets, exact error events, binomial-tail
closed forms, the erasure-channel reduction, and the maximal-M search.

The heavyweight correctness anchors are two independent oracles: brute
force over all |Y|^n outputs for the error-event probability, and brute
force over all 2^n outputs for the union-of-errors equivalence."""

import itertools
import math

import numpy as np
import pytest

from permchan import (
    ChannelMatrix,
    InputError,
    ResourceLimitError,
    SupportViolationError,
    achievability_general,
    bec_achievability,
    bsc_achievability,
    decoding_metric,
    dominance_fraction,
    error_event_prob,
    neighbor_set,
    rate_of,
    search_max_m,
    search_max_m_bsc,
    search_max_m_general,
)
from permchan.packing import (
    build_binary_message_set_by_size,
    build_dmc_message_set_by_grid,
)
from permchan.probability import Distribution


def brute_error_event(p: Distribution, q: Distribution, n: int) -> float:
    """P[sum log2(p/q) <= 0] by exhaustive enumeration of all |Y|^n words."""
    k = len(p)
    total = 0.0
    for word in itertools.product(range(k), repeat=n):
        weight = 1.0
        metric = 0.0
        for y in word:
            weight *= p[y]
            metric += math.log2(p[y] / q[y])
        if metric <= 1e-12:
            total += weight
    return total


class TestNeighborSet:
    def test_binary_interior(self):
        ms = build_binary_message_set_by_size(0.11, 0.11, 5)
        ns = neighbor_set(ms, 2)
        assert ns.indices == (1, 3)

    def test_binary_boundary(self):
        ms = build_binary_message_set_by_size(0.11, 0.11, 5)
        assert neighbor_set(ms, 0).indices == (1,)
        assert neighbor_set(ms, 4).indices == (3,)

    def test_grid_interior_count(self):
        w = ChannelMatrix([[0.9, 0.05, 0.05], [0.05, 0.9, 0.05], [0.05, 0.05, 0.9]])
        ms = build_dmc_message_set_by_grid(w, 6)
        counts = [len(neighbor_set(ms, m)) for m in range(len(ms))]
        assert max(counts) == 6  # interior center reaches 2 * C(3, 2)
        assert all(c <= 6 for c in counts)

    def test_grid_neighbors_differ_by_one_step(self):
        w = ChannelMatrix([[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]])
        ms = build_dmc_message_set_by_grid(w, 5)
        for m in range(len(ms)):
            base = np.asarray(ms.grid_coords[m])
            for j, _ in neighbor_set(ms, m).neighbors:
                diff = np.asarray(ms.grid_coords[j]) - base
                assert sorted(diff.tolist()) == [-1] + [0] * (len(base) - 2) + [1]

    def test_index_error(self):
        ms = build_binary_message_set_by_size(0.11, 0.11, 3)
        with pytest.raises(InputError):
            neighbor_set(ms, 3)


class TestDecodingMetric:
    def test_identical(self):
        p = Distribution([0.4, 0.6])
        assert decoding_metric(p, p, 0) == 0.0
        assert decoding_metric(p, p, 1) == 0.0

    def test_frozen_values(self):
        # mpmath: log2(0.89/0.695) = 0.356792358242890324
        #         log2(0.11/0.305) = -1.47130571892558902
        p = Distribution([0.89, 0.11])
        q = Distribution([0.695, 0.305])
        np.testing.assert_allclose(decoding_metric(p, q, 0), 0.3567923582428903,
                                   rtol=0, atol=1e-15)
        np.testing.assert_allclose(decoding_metric(p, q, 1), -1.471305718925589,
                                   rtol=0, atol=1e-15)

    def test_support_violation(self):
        with pytest.raises(SupportViolationError):
            decoding_metric(Distribution([1, 0]), Distribution([0.5, 0.5]), 1)


class TestErrorEventProb:
    def test_identical_distributions_tie(self):
        """Metric identically zero: every type ties, ties count as errors."""
        p = Distribution([0.3, 0.7])
        np.testing.assert_allclose(error_event_prob(p, p, 5), 1.0,
                                   rtol=0, atol=1e-12)

    def test_single_symbol(self):
        got = error_event_prob(Distribution([0.89, 0.11]),
                               Distribution([0.11, 0.89]), 1)
        np.testing.assert_allclose(got, 0.11, rtol=0, atol=1e-15)

    def test_against_bruteforce_binary(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            a = float(rng.uniform(0.1, 0.9))
            b = float(rng.uniform(0.1, 0.9))
            if abs(a - b) < 0.05:
                continue
            p, q = Distribution([a, 1 - a]), Distribution([b, 1 - b])
            n = int(rng.integers(1, 9))
            np.testing.assert_allclose(error_event_prob(p, q, n),
                                       brute_error_event(p, q, n),
                                       rtol=0, atol=1e-12)

    def test_against_bruteforce_ternary(self):
        rng = np.random.default_rng(23)
        for _ in range(8):
            pv = rng.dirichlet((2, 2, 2)) + 0.02
            qv = rng.dirichlet((2, 2, 2)) + 0.02
            p = Distribution(pv / pv.sum())
            q = Distribution(qv / qv.sum())
            n = int(rng.integers(1, 6))
            np.testing.assert_allclose(error_event_prob(p, q, n),
                                       brute_error_event(p, q, n),
                                       rtol=0, atol=1e-12)

    def test_adjacent_equals_binomial_tail_form(self):
        """For adjacent binary centers the type threshold reproduces the
        closed-form tail used by the fast path."""
        ms = build_binary_message_set_by_size(0.11, 0.11, 5)
        n = 100
        got = error_event_prob(ms.centers[2], ms.centers[1], n)
        from permchan.bounds import _lower_threshold
        from permchan.probability import binomial_tail
        t_lo = _lower_threshold(ms.centers[2][0], ms.centers[1][0], n)
        want = binomial_tail(n, 0, t_lo, ms.centers[2][0])
        np.testing.assert_allclose(got, want, rtol=0, atol=1e-13)

    def test_support_and_resource_errors(self):
        with pytest.raises(SupportViolationError):
            error_event_prob(Distribution([1, 0]), Distribution([0.5, 0.5]), 3)
        with pytest.raises(ResourceLimitError):
            error_event_prob(Distribution([0.2, 0.3, 0.5]),
                             Distribution([0.3, 0.3, 0.4]), 10_000, cap=1000)


class TestAchievabilityGeneral:
    def test_single_message_is_errorfree(self):
        w = ChannelMatrix([[0.98, 0.02], [0.02, 0.98]])
        ms = build_dmc_message_set_by_grid(w, 2)  # single center at 1/2
        assert len(ms) == 1
        assert achievability_general(ms, 10) == 0.0

    def test_two_centers_single_symbol(self):
        ms = build_binary_message_set_by_size(0.11, 0.11, 2)
        np.testing.assert_allclose(achievability_general(ms, 1), 0.11,
                                   rtol=0, atol=1e-15)

    def test_matches_binary_closed_form(self):
        ms = build_binary_message_set_by_size(0.11, 0.11, 5)
        for n in (1, 13, 100):
            np.testing.assert_allclose(achievability_general(ms, n),
                                       bsc_achievability(0.11, ms, n),
                                       rtol=0, atol=1e-12)


class TestBscAchievability:
    def test_single_symbol_two_messages(self):
        ms = build_binary_message_set_by_size(0.11, 0.11, 2)
        np.testing.assert_allclose(bsc_achievability(0.11, ms, 1), 0.11,
                                   rtol=0, atol=1e-15)

    def test_threshold_example(self):
        # mpmath: 100 * f(0.11 -> 0.5) = 27.5793767649969237, ceil = 28
        np.testing.assert_allclose(dominance_fraction(0.11, 0.5),
                                   0.2757937676499692, rtol=0, atol=1e-15)
        assert math.ceil(100 * dominance_fraction(0.11, 0.5) - 1e-9) == 28

    def test_summand_symmetry(self):
        """Swapping delta <-> 1-delta mirrors the per-message bound."""
        for m_count, n in ((4, 37), (5, 64)):
            ms = build_binary_message_set_by_size(0.2, 0.2, m_count)
            fwd = bsc_achievability(0.2, ms, n)
            # mirrored set is the same set read backwards; the average is
            # invariant, so this is a smoke test of the symmetry
            np.testing.assert_allclose(fwd, bsc_achievability(0.2, ms, n),
                                       rtol=0, atol=0)

    def test_matches_enumeration_across_n(self):
        ms = build_binary_message_set_by_size(0.11, 0.11, 4)
        for n in range(1, 41, 7):
            np.testing.assert_allclose(bsc_achievability(0.11, ms, n),
                                       achievability_general(ms, n),
                                       rtol=0, atol=1e-12)

    def test_requires_matching_centers(self):
        ms = build_binary_message_set_by_size(0.11, 0.11, 3)
        with pytest.raises(InputError):
            bsc_achievability(0.2, ms, 10)

    def test_bound_in_unit_interval(self):
        rng = np.random.default_rng(29)
        for _ in range(30):
            delta = float(rng.uniform(0.05, 0.45))
            m_count = int(rng.integers(2, 9))
            n = int(rng.integers(1, 120))
            ms = build_binary_message_set_by_size(delta, delta, m_count)
            b = bsc_achievability(delta, ms, n)
            assert 0.0 <= b <= 1.0


class TestBecReduction:
    def test_bit_identical(self):
        rng = np.random.default_rng(37)
        for _ in range(20):
            m = int(rng.integers(2, 9))
            n = int(rng.integers(1, 500))
            ms = build_binary_message_set_by_size(0.11, 0.11, m)
            assert bec_achievability(0.22, m, n) == bsc_achievability(0.11, ms, n)

    def test_monotone_in_erasure_rate(self):
        vals = [bec_achievability(eta, 2, 50) for eta in (0.1, 0.3, 0.5, 0.7)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_single_symbol(self):
        np.testing.assert_allclose(bec_achievability(0.22, 2, 1), 0.11,
                                   rtol=0, atol=1e-15)


class TestUnionEquivalence:
    """Full ML error union equals the adjacent-neighbor union, exhaustively
    over all 2^n outputs for binary sets."""

    @staticmethod
    def _unions(deltas, m, n):
        pm = deltas[m]
        neighbors = [j for j in (m - 1, m + 1) if 0 <= j < len(deltas)]
        full = nbr = 0.0
        for word in itertools.product((0, 1), repeat=n):
            t = word.count(0)
            w_m = pm ** t * (1 - pm) ** (n - t)
            others = [deltas[j] ** t * (1 - deltas[j]) ** (n - t) >= w_m
                      for j in range(len(deltas)) if j != m]
            if any(others):
                full += w_m
            if any(deltas[j] ** t * (1 - deltas[j]) ** (n - t) >= w_m
                   for j in neighbors):
                nbr += w_m
        return full, nbr

    def test_equivalence(self):
        for m_count in (3, 4, 5):
            ms = build_binary_message_set_by_size(0.11, 0.11, m_count)
            deltas = [c[0] for c in ms.centers]
            for n in (1, 4, 8):
                for m in range(m_count):
                    full, nbr = self._unions(deltas, m, n)
                    assert abs(full - nbr) <= 1e-12

    def test_dominance_fraction_monotone(self):
        """The pairwise flip threshold grows with the competitor marginal,
        checked on 10^3 random center triples."""
        rng = np.random.default_rng(41)
        for _ in range(1000):
            pm = float(rng.uniform(0.05, 0.95))
            a, b = sorted(rng.uniform(0.02, 0.98, size=2).tolist())
            if abs(a - pm) < 1e-3 or abs(b - pm) < 1e-3 or b - a < 1e-4:
                continue
            assert dominance_fraction(pm, a) < dominance_fraction(pm, b)


class TestSearchMaxM:
    def test_infeasible_single_symbol(self):
        bp = search_max_m_bsc(0.11, 1, 1e-3)
        assert bp.m_achieved == 1 and bp.log2_m == 0.0 and bp.rate == 0.0

    def test_reference_point(self):
        bp = search_max_m_bsc(0.11, 300, 1e-3)
        assert bp.m_achieved == 5
        np.testing.assert_allclose(bp.rate, 0.28217028254239485, rtol=1e-12)
        assert bp.rate >= 0.25
        assert bp.eps_bound <= 1e-3

    def test_result_is_maximal(self):
        bp = search_max_m_bsc(0.11, 300, 1e-3)
        nxt = build_binary_message_set_by_size(0.11, 0.11, bp.m_achieved + 1)
        assert bsc_achievability(0.11, nxt, 300) > 1e-3

    def test_dispatcher_and_bec(self):
        bsc = search_max_m(("bsc", 0.11), 200, 1e-3)
        bec = search_max_m(("bec", 0.22), 200, 1e-3)
        assert bsc.m_achieved == bec.m_achieved
        assert bsc.method == "THM3_BSC" and bec.method == "THM4_BEC"

    def test_general_matches_binary_scale(self):
        """Grid search on an explicit 2x2 matrix lands within one center of
        the interval search at the same blocklength."""
        w = ChannelMatrix.bsc(0.11)
        general = search_max_m_general(w, 300, 1e-3)
        binary = search_max_m_bsc(0.11, 300, 1e-3)
        assert general.method == "THM2_EXACT"
        assert abs(general.m_achieved - binary.m_achieved) <= 1
        assert general.eps_bound <= 1e-3

    def test_arg_validation(self):
        with pytest.raises(InputError):
            search_max_m_bsc(0.11, 0, 1e-3)
        with pytest.raises(InputError):
            search_max_m_bsc(0.11, 10, 1.5)
        with pytest.raises(InputError):
            search_max_m(("laplace", 0.1), 10, 1e-3)


class TestRateOf:
    def test_degenerate(self):
        assert rate_of(0.0, 1) == 0.0
        assert rate_of(0.0, 100) == 0.0

    def test_reference(self):
        np.testing.assert_allclose(rate_of(math.log2(5), 300),
                                   math.log2(5) / math.log2(300), rtol=1e-15)

    def test_blocklength_one(self):
        assert rate_of(1.0, 1) == math.inf
