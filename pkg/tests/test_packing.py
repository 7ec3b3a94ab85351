"""Message-set construction: grids, interval sets, packing counts,
achievable-set membership, and the KL-radius guarantee."""

import math

import numpy as np
import pytest

from permchan import (
    ChannelMatrix,
    InfeasibleError,
    InputError,
    ResourceLimitError,
    SetKind,
    SingularMatrixError,
    build_binary_message_set,
    build_binary_message_set_by_size,
    build_dmc_message_set,
    build_dmc_message_set_by_grid,
    grid_simplex,
    kl_divergence,
    marginal_space_contains,
    min_pairwise_kl,
    packing_count_bounds,
    packing_lower_bound_subspace,
    total_variation,
    volume_ratio,
)
from permchan.probability import LOG2E, Distribution


def r0_for_grid(grid_n: int) -> float:
    """KL radius whose grid resolution is exactly 1/grid_n."""
    return 2.0 * LOG2E / (grid_n * grid_n)


class TestChannelMatrix:
    def test_bsc(self):
        w = ChannelMatrix.bsc(0.11)
        assert w.is_square and w.strictly_positive and w.full_rank
        np.testing.assert_allclose(w.det_abs, 0.78, atol=1e-14)

    def test_bec_shape(self):
        w = ChannelMatrix.bec(0.22)
        assert (w.nx, w.ny) == (2, 3)
        assert not w.is_square

    def test_row_normalization(self):
        w = ChannelMatrix([[0.5, 0.5 + 1e-10], [0.25, 0.75]])
        np.testing.assert_allclose(w.matrix.sum(axis=1), [1.0, 1.0], atol=1e-15)

    def test_rejects_bad_rows(self):
        with pytest.raises(InputError):
            ChannelMatrix([[0.5, 0.6], [0.5, 0.5]])


class TestGridSimplex:
    def test_coarsest(self):
        pts = grid_simplex(1.0, 2)
        assert len(pts) == 2
        assert [tuple(p.probs) for p in pts] == [(0.0, 1.0), (1.0, 0.0)]

    def test_counts_match_combinatorics(self):
        for grid_n in range(1, 13):
            for k in (2, 3, 4):
                assert len(grid_simplex(1.0 / grid_n, k)) == \
                    math.comb(grid_n + k - 1, k - 1)

    def test_quarter_step_line(self):
        pts = grid_simplex(0.25, 2)
        firsts = [p[0] for p in pts]
        np.testing.assert_allclose(firsts, [0.0, 0.25, 0.5, 0.75, 1.0], atol=1e-15)

    def test_quarter_step_triangle_count(self):
        assert len(grid_simplex(0.25, 3)) == 15

    def test_lexicographic_order(self):
        pts = grid_simplex(0.5, 3)
        coords = [tuple(round(v * 2) for v in p.probs) for p in pts]
        assert coords == sorted(coords)

    def test_cap(self):
        with pytest.raises(ResourceLimitError):
            grid_simplex(0.001, 4, cap=1000)


class TestMembership:
    def test_uniform_is_achievable(self):
        w = ChannelMatrix.bsc(0.11)
        assert marginal_space_contains(w, Distribution([0.5, 0.5]))

    def test_outside_interval(self):
        w = ChannelMatrix.bsc(0.11)
        assert not marginal_space_contains(w, Distribution([0.05, 0.95]))

    def test_boundary_is_achievable(self):
        w = ChannelMatrix.bsc(0.11)
        assert marginal_space_contains(w, Distribution([0.11, 0.89]))

    def test_singular_rejected(self):
        w = ChannelMatrix([[0.5, 0.5], [0.5, 0.5]])
        with pytest.raises(SingularMatrixError):
            marginal_space_contains(w, Distribution([0.5, 0.5]))


class TestDmcMessageSet:
    def test_bsc_quarter_grid(self):
        w = ChannelMatrix.bsc(0.11)
        ms = build_dmc_message_set(w, r0_for_grid(4))
        assert ms.kind is SetKind.DMC_GRID and ms.grid_n == 4
        np.testing.assert_allclose([c[0] for c in ms.centers], [0.25, 0.5, 0.75],
                                   atol=1e-15)

    def test_near_identity_channel(self):
        # Corners of the simplex sit just outside the achievable interval
        # [0.02, 0.98], so only interior grid points survive.
        w = ChannelMatrix([[0.98, 0.02], [0.02, 0.98]])
        ms = build_dmc_message_set_by_grid(w, 2)
        np.testing.assert_allclose([c[0] for c in ms.centers], [0.5], atol=1e-15)
        ms4 = build_dmc_message_set_by_grid(w, 4)
        np.testing.assert_allclose([c[0] for c in ms4.centers], [0.25, 0.5, 0.75],
                                   atol=1e-15)

    def test_radius_guarantee(self):
        """min pairwise KL >= r0 on randomized constructions."""
        rng = np.random.default_rng(5)
        built = 0
        while built < 60:
            k = int(rng.integers(2, 5))
            rows = rng.dirichlet(np.ones(k), size=k) * 0.4 + 0.6 * np.eye(k)
            w = ChannelMatrix(rows / rows.sum(axis=1, keepdims=True))
            grid_n = int(rng.integers(1, 13))
            try:
                ms = build_dmc_message_set_by_grid(w, grid_n)
            except InfeasibleError:
                continue
            if len(ms) < 2:
                continue
            built += 1
            assert min_pairwise_kl(ms) >= ms.radius_r0 - 1e-12

    def test_grid_tv_spacing(self):
        """Minimum pairwise TV on a grid set equals one grid step."""
        w = ChannelMatrix.bsc(0.2)
        for grid_n in (3, 5, 8):
            ms = build_dmc_message_set_by_grid(w, grid_n)
            tvs = [total_variation(a, b)
                   for i, a in enumerate(ms.centers)
                   for b in ms.centers[i + 1:]]
            np.testing.assert_allclose(min(tvs), 1.0 / grid_n, atol=1e-12)

    def test_requires_strict_positivity(self):
        w = ChannelMatrix([[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(InputError):
            build_dmc_message_set(w, 0.1)

    def test_too_coarse(self):
        w = ChannelMatrix.bsc(0.3)
        # resolution 1: only the simplex corners, both outside [0.3, 0.7]
        with pytest.raises(InfeasibleError):
            build_dmc_message_set_by_grid(w, 1)


class TestBinaryMessageSet:
    def test_frozen_example(self):
        xi = 1.0 - 0.11 - 0.11
        ms = build_binary_message_set(0.11, 0.11, r0=2.0 * LOG2E * (xi / 4) ** 2)
        assert ms.grid_n == 4
        np.testing.assert_allclose([c[0] for c in ms.centers],
                                   [0.11, 0.305, 0.5, 0.695, 0.89], atol=1e-15)

    def test_endpoints_only(self):
        xi = 0.5
        ms = build_binary_message_set(0.25, 0.25, r0=2.0 * LOG2E * xi ** 2)
        np.testing.assert_allclose([c[0] for c in ms.centers], [0.25, 0.75],
                                   atol=1e-15)

    def test_size_formula(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            d1 = float(rng.uniform(0.02, 0.4))
            d2 = float(rng.uniform(0.02, 0.4))
            grid_n = int(rng.integers(1, 15))
            xi = 1.0 - d1 - d2
            ms = build_binary_message_set(d1, d2, 2.0 * LOG2E * (xi / grid_n) ** 2)
            assert len(ms) == ms.grid_n + 1

    def test_radius_guarantee(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            d1 = float(rng.uniform(0.02, 0.4))
            d2 = float(rng.uniform(0.02, 0.4))
            grid_n = int(rng.integers(1, 15))
            xi = 1.0 - d1 - d2
            r0 = 2.0 * LOG2E * (xi / grid_n) ** 2
            ms = build_binary_message_set(d1, d2, r0)
            assert min_pairwise_kl(ms) >= r0 - 1e-12

    def test_binary_tv_spacing(self):
        ms = build_binary_message_set_by_size(0.11, 0.11, 5)
        tvs = [total_variation(a, b)
               for i, a in enumerate(ms.centers) for b in ms.centers[i + 1:]]
        np.testing.assert_allclose(min(tvs), 0.78 / 4, atol=1e-12)

    def test_by_size_consistency(self):
        """m evenly spaced centers coincide with the radius construction."""
        for m in (2, 3, 5, 9):
            by_size = build_binary_message_set_by_size(0.11, 0.11, m)
            xi = 0.78
            radius = build_binary_message_set(0.11, 0.11,
                                              2.0 * LOG2E * (xi / (m - 1)) ** 2)
            assert len(by_size) == len(radius) == m
            for a, b in zip(by_size.centers, radius.centers):
                assert a.allclose(b, tol=1e-14)

    def test_by_size_examples(self):
        np.testing.assert_allclose(
            [c[0] for c in build_binary_message_set_by_size(0.11, 0.11, 2).centers],
            [0.11, 0.89], atol=1e-15)
        np.testing.assert_allclose(
            [c[0] for c in build_binary_message_set_by_size(0.2, 0.3, 3).centers],
            [0.2, 0.45, 0.7], atol=1e-15)

    def test_by_size_records_realized_radius(self):
        ms = build_binary_message_set_by_size(0.11, 0.11, 5)
        np.testing.assert_allclose(ms.radius_r0, min_pairwise_kl(ms), rtol=1e-14)

    def test_parameter_checks(self):
        with pytest.raises(InputError):
            build_binary_message_set(0.0, 0.1, 0.01)
        with pytest.raises(InputError):
            build_binary_message_set(0.6, 0.5, 0.01)
        with pytest.raises(InputError):
            build_binary_message_set_by_size(0.1, 0.1, 1)
        with pytest.raises(InfeasibleError):
            build_binary_message_set(0.11, 0.11, r0=10.0)


class TestPackingCounts:
    def test_bracket_random(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            k = int(rng.integers(2, 5))
            r0 = float(rng.uniform(0.001, 2.5))
            lower, upper, exact = packing_count_bounds(r0, k)
            assert lower <= exact <= upper

    def test_line_grid(self):
        _, _, exact = packing_count_bounds(r0_for_grid(10), 2)
        assert exact == 11

    def test_triangle_example(self):
        lower, upper, exact = packing_count_bounds(r0_for_grid(4), 3)
        assert exact == 15
        assert lower <= 15 <= upper

    def test_k4_example(self):
        _, _, exact = packing_count_bounds(r0_for_grid(10), 4)
        assert exact == math.comb(13, 3) == 286

    def test_subspace_lower_bound_k2(self):
        # lam * (1/r) - 2k * C(grid_n, 0) with k = 2
        got = packing_lower_bound_subspace(r0_for_grid(10), 2, 0.78)
        np.testing.assert_allclose(got, 0.78 * 10 - 4, rtol=1e-12)
        got = packing_lower_bound_subspace(r0_for_grid(7), 2, 1.0)
        np.testing.assert_allclose(got, 7 - 4, rtol=1e-12)

    def test_subspace_lower_bound_k3(self):
        got = packing_lower_bound_subspace(r0_for_grid(4), 3, 1.0)
        want = ((4 + 1) / 2.0) ** 2 - 6 * math.comb(5, 1)
        np.testing.assert_allclose(got, want, rtol=1e-12)

    def test_may_be_negative(self):
        assert packing_lower_bound_subspace(r0_for_grid(1), 3, 0.1) < 0.0


class TestVolumeRatio:
    def test_bsc_family(self):
        for delta in np.arange(0.05, 0.46, 0.05):
            w = ChannelMatrix.bsc(float(delta))
            np.testing.assert_allclose(volume_ratio(w), 1.0 - 2.0 * float(delta),
                                       rtol=0, atol=1e-12)

    def test_near_identity(self):
        w = ChannelMatrix([[1 - 1e-6, 1e-6], [1e-6, 1 - 1e-6]])
        np.testing.assert_allclose(volume_ratio(w), 1.0, atol=1e-5)

    def test_three_by_three(self):
        w = ChannelMatrix([[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]])
        np.testing.assert_allclose(volume_ratio(w), 0.49, rtol=0, atol=1e-12)

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            volume_ratio(ChannelMatrix([[0.5, 0.5], [0.5, 0.5]]))


class TestMinPairwiseKL:
    def test_matches_bruteforce(self):
        rng = np.random.default_rng(31)
        for m in (2, 3, 6):
            ms = build_binary_message_set_by_size(
                float(rng.uniform(0.05, 0.3)), float(rng.uniform(0.05, 0.3)), m)
            brute = min(kl_divergence(a, b)
                        for i, a in enumerate(ms.centers)
                        for j, b in enumerate(ms.centers) if i != j)
            np.testing.assert_allclose(min_pairwise_kl(ms), brute, rtol=1e-12)

    def test_requires_two_centers(self):
        ms = build_binary_message_set_by_size(0.11, 0.11, 2)
        single = type(ms)(centers=ms.centers[:1], radius_r0=0.0, grid_n=1,
                          kind=ms.kind, binary_params=ms.binary_params)
        with pytest.raises(InputError):
            min_pairwise_kl(single)
