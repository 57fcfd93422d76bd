import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tradecluster.affinity import gaussian_similarity, knn_sparsify, median_heuristic_sigma
from tradecluster.errors import DegenerateData, KOutOfRange, NonPositiveSigma, TooFewRows

coords = st.floats(min_value=-50, max_value=50, allow_nan=False, allow_subnormal=False)
point_sets = st.integers(2, 12).flatmap(lambda n: arrays(float, (n, 3), elements=coords))


def check_similarity(S):
    assert np.array_equal(S, S.T)
    assert np.all(np.diag(S) == 1)
    assert S.min() >= 0 and S.max() <= 1


class TestGaussian:
    def test_identical_points(self):
        S = gaussian_similarity(np.array([[1.0, 2.0], [1.0, 2.0]]), 0.5).S
        assert S[0, 1] == 1

    def test_distance_sigma_sqrt2(self):
        sigma = 1.7
        X = np.array([[0.0], [sigma * math.sqrt(2)]])
        assert gaussian_similarity(X, sigma).S[0, 1] == pytest.approx(math.exp(-1), rel=1e-12)
        assert gaussian_similarity(X, sigma).S[0, 1] == pytest.approx(0.367879, abs=1e-6)

    def test_far_pair_underflows_to_zero(self):
        S = gaussian_similarity(np.array([[0.0], [100.0]]), 1.0).S
        assert S[0, 1] < 1e-300
        assert S[0, 1] == 0.0

    def test_negative_exponent_bounds(self, blobs):
        check_similarity(gaussian_similarity(blobs[0], 3.0).S)

    @pytest.mark.parametrize("sigma", [0, -1, float("nan")])
    def test_bad_sigma(self, sigma):
        with pytest.raises(NonPositiveSigma):
            gaussian_similarity(np.zeros((3, 1)), sigma)

    def test_too_few_rows(self):
        with pytest.raises(TooFewRows):
            gaussian_similarity(np.zeros((1, 2)), 1.0)

    @given(point_sets, st.floats(0.1, 20))
    def test_invariants(self, X, sigma):
        check_similarity(gaussian_similarity(X, sigma).S)

    def test_monotone_in_sigma(self):
        X = np.array([[0.0, 0.0], [1.0, 2.0]])
        vals = [gaussian_similarity(X, s).S[0, 1] for s in np.linspace(0.2, 5, 30)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    @given(point_sets, st.integers(0, 2**32 - 1))
    @settings(max_examples=50)
    def test_isometry_invariance(self, X, seed):
        rng = np.random.default_rng(seed)
        Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        moved = X @ Q + rng.uniform(-100, 100, size=3)
        a = gaussian_similarity(X, 10.0).S
        b = gaussian_similarity(moved, 10.0).S
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)


class TestMedianSigma:
    def test_three_points_on_line(self):
        assert median_heuristic_sigma(np.array([[0.0], [1.0], [3.0]])) == 2

    def test_single_pair(self):
        assert median_heuristic_sigma(np.array([[0.0, 0.0], [3.0, 4.0]])) == 5

    def test_identical_points(self):
        with pytest.raises(DegenerateData):
            median_heuristic_sigma(np.ones((4, 2)))

    def test_mostly_duplicates_falls_back_to_positive_median(self):
        X = np.array([[0.0], [0.0], [0.0], [2.0]])
        # distances (0, 0, 0, 2, 2, 2): ordinary median 1
        assert median_heuristic_sigma(X) == 1.0
        X = np.array([[0.0], [0.0], [0.0], [0.0], [4.0]])
        # six zero distances out of ten -> positive median 4
        assert median_heuristic_sigma(X) == 4.0


class TestKnn:
    def line(self):
        return gaussian_similarity(np.array([[0.0], [1.0], [10.0]]), 5.0)

    def test_full_neighbourhood_unchanged(self, blobs):
        sim = gaussian_similarity(blobs[0], 3.0)
        np.testing.assert_array_equal(knn_sparsify(sim, sim.n - 1).S, sim.S)

    def test_collinear_k1(self):
        sim = self.line()
        out = knn_sparsify(sim, 1).S
        assert out[0, 1] == sim.S[0, 1] and out[1, 0] == sim.S[1, 0]
        assert out[1, 2] == sim.S[1, 2] and out[2, 1] == sim.S[2, 1]
        assert out[0, 2] == 0 and out[2, 0] == 0
        assert knn_sparsify(sim, 1).sparsified_k == 1

    @pytest.mark.parametrize("k", [0, 3, -1])
    def test_out_of_range(self, k):
        with pytest.raises(KOutOfRange):
            knn_sparsify(self.line(), k)

    @given(point_sets, st.integers(1, 11))
    def test_symmetric_superset_of_mutual(self, X, k):
        n = X.shape[0]
        k = min(k, n - 1)
        sim = gaussian_similarity(X, 20.0)
        out = knn_sparsify(sim, k).S
        check_similarity(out)
        # brute-force neighbour sets with lower-index tie break
        nbrs = []
        for i in range(n):
            others = sorted((j for j in range(n) if j != i), key=lambda j: (-sim.S[i, j], j))
            nbrs.append(set(others[:k]))
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                either = j in nbrs[i] or i in nbrs[j]
                assert (out[i, j] == sim.S[i, j]) if either else (out[i, j] == 0)
                if j in nbrs[i] and i in nbrs[j]:
                    assert out[i, j] == sim.S[i, j]
