"""Tests for the benchmark metric battery."""
import numpy as np
import pytest

from maskbench.errors import EmptyGroundTruth, SizeMismatch
from maskbench.metrics import (
    MetricScores,
    e_measure_mean,
    evaluate_pair,
    mae,
    max_f_beta,
    s_measure,
    weighted_f_beta,
)
from maskbench.raster import BinaryMask, GrayMap

from helpers import crisp, random_gray, random_mask, rect_mask

from oracles import e_measure_naive, max_f_naive, s_measure_naive, wfb_naive


def half_plane(side=64):
    g = np.zeros((side, side), dtype=bool)
    g[:, : side // 2] = True
    return BinaryMask(g)


def centered_square(side=32):
    g = np.zeros((side, side), dtype=bool)
    q = side // 4
    g[q : side - q, q : side - q] = True
    return BinaryMask(g)


def inverted(g: BinaryMask) -> GrayMap:
    return GrayMap((~g.data).astype(np.float64))


class TestMae:
    def test_equal_maps(self, rng):
        g = random_mask(rng)
        assert mae(crisp(g), g) == 0.0

    def test_inverted(self, rng):
        g = random_mask(rng)
        assert mae(inverted(g), g) == 1.0

    def test_constant_half(self, rng):
        g = random_mask(rng)
        p = GrayMap(np.full(g.data.shape, 0.5))
        assert mae(p, g) == 0.5

    def test_symmetry(self, rng):
        for _ in range(10):
            g = random_mask(rng, shape=(32, 32))
            p = random_gray(rng, shape=(32, 32))
            flipped = mae(GrayMap(1.0 - p.values), BinaryMask(~g.data))
            assert abs(mae(p, g) - flipped) < 1e-12

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatch):
            mae(GrayMap(np.zeros((4, 4))), BinaryMask(np.zeros((4, 5), dtype=np.uint8)))


class TestMaxF:
    def test_perfect(self, rng):
        g = random_mask(rng)
        assert max_f_beta(crisp(g), g) == 1.0

    def test_all_ones_against_half_plane(self):
        g = half_plane()
        p = GrayMap(np.ones(g.data.shape))
        # precision 0.5 and recall 1 at every threshold
        want = 1.3 * 0.5 / (0.3 * 0.5 + 1.0)
        assert abs(max_f_beta(p, g) - want) < 1e-12

    def test_all_zeros_scores_zero(self, rng):
        g = random_mask(rng)
        assert max_f_beta(GrayMap(np.zeros(g.data.shape)), g) == 0.0

    def test_empty_ground_truth(self):
        p = GrayMap(np.zeros((8, 8)))
        with pytest.raises(EmptyGroundTruth):
            max_f_beta(p, BinaryMask(np.zeros((8, 8), dtype=np.uint8)))

    def test_monotone_remap_invariance(self, rng):
        for _ in range(5):
            levels = np.sort(rng.choice(256, size=40, replace=False))
            levels[0] = 0
            img = rng.choice(levels, size=(40, 40))
            img[0, 0] = 0
            target = np.sort(rng.choice(256, size=levels.size, replace=False))
            target[0] = 0
            lut = dict(zip(levels.tolist(), target.tolist()))
            remapped = np.vectorize(lut.__getitem__)(img)
            g = random_mask(rng, shape=(40, 40))
            a = max_f_beta(GrayMap(img / 255.0), g)
            b = max_f_beta(GrayMap(remapped / 255.0), g)
            assert a == b

    def test_matches_naive_sweep(self, rng):
        for _ in range(5):
            g = random_mask(rng, shape=(24, 24))
            p = random_gray(rng, shape=(24, 24))
            assert abs(max_f_beta(p, g) - max_f_naive(p, g)) < 1e-12


class TestWeightedF:
    def test_perfect(self, rng):
        g = random_mask(rng)
        assert weighted_f_beta(crisp(g), g) == 1.0

    def test_inverted_half_plane_scores_low(self):
        g = half_plane()
        assert weighted_f_beta(inverted(g), g) < 0.05

    def test_constant_against_half_plane_matches_oracle(self):
        g = half_plane()
        p = GrayMap(np.full(g.data.shape, 0.5))
        assert abs(weighted_f_beta(p, g) - wfb_naive(p, g)) < 1e-6

    def test_matches_oracle_on_rectangles(self, rng):
        # rectangle GTs keep every background pixel's nearest foreground
        # pixel unique, so the oracle's tie handling cannot diverge
        for _ in range(5):
            top, left = rng.integers(2, 10, size=2)
            h, w = rng.integers(6, 18, size=2)
            g = rect_mask((32, 32), int(top), int(top + h), int(left), int(left + w))
            p = random_gray(rng, shape=(32, 32))
            assert abs(weighted_f_beta(p, g) - wfb_naive(p, g)) < 1e-6

    def test_empty_ground_truth(self):
        with pytest.raises(EmptyGroundTruth):
            weighted_f_beta(GrayMap(np.zeros((8, 8))), BinaryMask(np.zeros((8, 8), dtype=np.uint8)))


class TestSMeasure:
    def test_perfect(self, rng):
        g = random_mask(rng)
        assert s_measure(crisp(g), g) == 1.0

    def test_empty_gt_scores_one_minus_mean(self):
        g = BinaryMask(np.zeros((16, 16), dtype=np.uint8))
        assert s_measure(GrayMap(np.zeros((16, 16))), g) == 1.0
        assert s_measure(GrayMap(np.full((16, 16), 0.3)), g) == pytest.approx(0.7)

    def test_full_gt_scores_mean(self):
        g = BinaryMask(np.ones((16, 16), dtype=np.uint8))
        assert s_measure(GrayMap(np.full((16, 16), 0.25)), g) == pytest.approx(0.25)

    def test_inverted_centered_square(self):
        g = centered_square()
        assert abs(s_measure(inverted(g), g) - s_measure_naive(inverted(g), g)) < 1e-6

    def test_all_zero_prediction(self):
        g = centered_square()
        p = GrayMap(np.zeros(g.data.shape))
        assert abs(s_measure(p, g) - s_measure_naive(p, g)) < 1e-6

    def test_matches_oracle(self, rng):
        for _ in range(5):
            g = random_mask(rng, shape=(32, 32))
            p = random_gray(rng, shape=(32, 32))
            assert abs(s_measure(p, g) - s_measure_naive(p, g)) < 1e-6

    def test_alpha_passthrough(self, rng):
        g = random_mask(rng, shape=(32, 32))
        p = random_gray(rng, shape=(32, 32))
        for alpha in (0.0, 0.3, 1.0):
            assert abs(s_measure(p, g, alpha=alpha) - s_measure_naive(p, g, alpha=alpha)) < 1e-6

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatch):
            s_measure(GrayMap(np.zeros((4, 4))), BinaryMask(np.zeros((5, 4), dtype=np.uint8)))


class TestEMeasure:
    def test_perfect(self, rng):
        g = random_mask(rng)
        assert e_measure_mean(crisp(g), g) == 1.0

    def test_inverted_scores_zero(self):
        g = centered_square()
        p = inverted(g)
        assert e_measure_mean(p, g) == e_measure_naive(p, g) == 0.0

    def test_constant_at_gt_mean(self):
        # a constant prediction has no variation to align with the GT, so
        # every threshold contributes the centered baseline 1/4
        g = centered_square()
        p = GrayMap(np.full(g.data.shape, float(g.data.mean())))
        assert e_measure_mean(p, g) == 0.25
        assert e_measure_naive(p, g) == 0.25

    def test_empty_gt_counts_background_agreement(self):
        g = BinaryMask(np.zeros((16, 16), dtype=np.uint8))
        p = np.zeros((16, 16))
        p[:4, :4] = 1.0
        assert e_measure_mean(GrayMap(p), g) == pytest.approx((256 - 16) / 256)

    def test_full_gt_counts_foreground_agreement(self):
        g = BinaryMask(np.ones((16, 16), dtype=np.uint8))
        p = np.zeros((16, 16))
        p[:4, :4] = 1.0
        assert e_measure_mean(GrayMap(p), g) == pytest.approx(16 / 256)

    def test_matches_oracle(self, rng):
        for _ in range(5):
            g = random_mask(rng, shape=(24, 24))
            p = random_gray(rng, shape=(24, 24))
            assert abs(e_measure_mean(p, g) - e_measure_naive(p, g)) < 1e-6

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatch):
            e_measure_mean(GrayMap(np.zeros((4, 4))), BinaryMask(np.zeros((4, 5), dtype=np.uint8)))


class TestEvaluatePair:
    def test_perfect_pair(self, rng):
        g = random_mask(rng, shape=(64, 64))
        scores, report = evaluate_pair(crisp(g), g)
        assert scores.max_f == 1.0
        assert scores.weighted_f == 1.0
        assert scores.mae == 0.0
        assert scores.s_measure == 1.0
        assert scores.e_measure_mean == 1.0
        assert report.total == 0

    def test_random_pair_in_range(self, rng):
        g = random_mask(rng, shape=(32, 32))
        p = random_gray(rng, shape=(32, 32))
        scores, report = evaluate_pair(p, g)
        for value in (
            scores.max_f,
            scores.weighted_f,
            scores.mae,
            scores.s_measure,
            scores.e_measure_mean,
        ):
            assert 0.0 <= value <= 1.0
        assert report.total >= 0
        assert report.total == (
            report.fn_boundary_points
            + report.fn_region_clicks
            + report.fp_boundary_points
            + report.fp_region_clicks
        )

    def test_scores_validated(self):
        with pytest.raises(ValueError):
            MetricScores(max_f=1.5, weighted_f=0.0, mae=0.0, s_measure=0.0, e_measure_mean=0.0)
