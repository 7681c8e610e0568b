"""Truncated SVD baseline: optimality, identities, and conventions."""

import numpy as np
import pytest

from rbfmat import (
    SvdApprox,
    reconstruct,
    svd_mse_curve,
    svd_param_count,
    svd_vector_param_count,
    symmetric_lowrank,
    truncated_svd,
)
from rbfmat.datagen import erdos_renyi, sbm


def mse(a, b):
    d = np.asarray(a) - np.asarray(b)
    return float(np.mean(d * d))


class TestTruncatedSvd:
    def test_rank_one_matrix_is_reproduced_exactly(self):
        x = np.array([1.0, -2.0, 0.5])
        y = np.array([3.0, 1.0])
        matrix = np.outer(x, y)
        approx = truncated_svd(matrix, 1)
        assert mse(reconstruct(approx), matrix) < 1e-20

    def test_identity_truncation_error(self):
        # identity has all unit singular values: rank-r truncation keeps r
        # of them, so the MSE is (n - r) / n**2
        eye = np.eye(10)
        for r in (0, 3, 7, 10):
            approx = truncated_svd(eye, r)
            assert mse(reconstruct(approx), eye) == pytest.approx(
                (10 - r) / 100, abs=1e-15)

    def test_factors_are_orthonormal(self):
        rng = np.random.default_rng(40)
        matrix = rng.normal(0, 1, (8, 6))
        approx = truncated_svd(matrix, 4)
        assert np.allclose(approx.left.T @ approx.left, np.eye(4), atol=1e-10)
        assert np.allclose(approx.right.T @ approx.right, np.eye(4), atol=1e-10)
        assert np.all(np.diff(approx.values) <= 1e-12)
        assert np.all(approx.values >= 0)

    def test_transpose_consistency(self):
        rng = np.random.default_rng(41)
        matrix = rng.normal(0, 1, (7, 5))
        a = reconstruct(truncated_svd(matrix, 3))
        b = reconstruct(truncated_svd(matrix.T, 3))
        assert np.allclose(a, b.T, atol=1e-12)

    def test_sign_convention_is_deterministic(self):
        rng = np.random.default_rng(42)
        matrix = rng.normal(0, 1, (6, 6))
        a = truncated_svd(matrix, 3)
        b = truncated_svd(matrix.copy(), 3)
        assert np.array_equal(a.left, b.left)
        assert np.array_equal(a.right, b.right)
        for k in range(3):
            col = a.left[:, k]
            assert col[np.argmax(np.abs(col))] >= 0

    def test_full_rank_reconstruction_is_exact(self):
        rng = np.random.default_rng(43)
        matrix = rng.normal(0, 1, (5, 9))
        approx = truncated_svd(matrix, 5)
        assert np.allclose(reconstruct(approx), matrix, atol=1e-12)

    def test_rank_zero_gives_zero_matrix(self):
        approx = truncated_svd(np.ones((4, 3)), 0)
        assert approx.rank == 0
        assert np.array_equal(reconstruct(approx), np.zeros((4, 3)))

    def test_rank_validation(self):
        with pytest.raises(ValueError):
            truncated_svd(np.ones((4, 3)), 4)
        with pytest.raises(ValueError):
            truncated_svd(np.ones((4, 3)), -1)


class TestSymmetricLowrank:
    def test_keeps_largest_magnitude_eigenvalues(self):
        # diag(3, -2, 1): the rank-1 approximation keeps eigenvalue 3 and
        # leaves squared error (4 + 1) / 9
        matrix = np.diag([3.0, -2.0, 1.0])
        approx = symmetric_lowrank(matrix, 1)
        assert approx.values[0] == pytest.approx(3.0, rel=1e-12)
        assert mse(reconstruct(approx), matrix) == pytest.approx(5 / 9, rel=1e-12)

    def test_negative_eigenvalues_are_kept_by_magnitude(self):
        matrix = np.diag([-5.0, 2.0, 1.0])
        approx = symmetric_lowrank(matrix, 1)
        assert approx.values[0] == pytest.approx(-5.0, rel=1e-12)

    def test_reconstruction_is_exactly_symmetric(self):
        rng = np.random.default_rng(44)
        raw = rng.normal(0, 1, (9, 9))
        matrix = raw + raw.T
        out = reconstruct(symmetric_lowrank(matrix, 4))
        assert np.array_equal(out, out.T)

    def test_block_expectation_has_exact_low_rank(self):
        # the expected adjacency of a 5-block model is a rank-5 matrix
        sizes = [4, 5, 6, 7, 8]
        p_in, p_out = 0.8, 0.2
        blocks = np.concatenate([np.full(s, b) for b, s in enumerate(sizes)])
        expected = np.where(blocks[:, None] == blocks[None, :], p_in, p_out)
        approx = symmetric_lowrank(expected, 5)
        assert mse(reconstruct(approx), expected) < 1e-20

    def test_requires_symmetry(self):
        with pytest.raises(ValueError):
            symmetric_lowrank(np.array([[0.0, 1.0], [0.0, 0.0]]), 1)
        with pytest.raises(ValueError):
            symmetric_lowrank(np.zeros((2, 3)), 1)

    def test_matches_general_svd_error_on_psd_matrices(self):
        # on a positive semidefinite matrix both truncations keep the same
        # subspace, so the errors agree
        rng = np.random.default_rng(45)
        b = rng.normal(0, 1, (8, 8))
        matrix = b @ b.T
        for r in (1, 3, 5):
            e_sym = mse(reconstruct(symmetric_lowrank(matrix, r)), matrix)
            e_gen = mse(reconstruct(truncated_svd(matrix, r)), matrix)
            assert e_sym == pytest.approx(e_gen, rel=1e-9, abs=1e-12)


class TestSvdMseCurve:
    def test_identity_curve_is_linear(self):
        curve = svd_mse_curve(np.eye(10), 10)
        assert np.allclose(curve, (10 - np.arange(11)) / 100, atol=1e-15)

    def test_full_rank_tail_is_zero(self):
        rng = np.random.default_rng(46)
        matrix = rng.normal(0, 1, (6, 8))
        curve = svd_mse_curve(matrix, 6)
        assert curve[-1] < 1e-18

    def test_rank_zero_entry_is_mean_square(self):
        rng = np.random.default_rng(47)
        matrix = rng.normal(0, 1, (7, 7))
        curve = svd_mse_curve(matrix, 3)
        assert curve[0] == pytest.approx(np.mean(matrix ** 2), rel=1e-12)

    def test_curve_matches_direct_reconstruction(self):
        rng = np.random.default_rng(48)
        matrix = rng.normal(0, 1, (9, 5))
        curve = svd_mse_curve(matrix, 5)
        for r in range(6):
            direct = mse(reconstruct(truncated_svd(matrix, r)), matrix)
            assert curve[r] == pytest.approx(direct, rel=1e-9, abs=1e-15)

    def test_curve_is_nonincreasing(self):
        adjacency = erdos_renyi(30, 0.4, np.random.default_rng(49))
        curve = svd_mse_curve(adjacency, 30)
        assert np.all(np.diff(curve) <= 1e-15)

    def test_dense_adjacency_needs_near_full_rank(self):
        # a dense random 0/1 matrix has a flat spectrum: pushing the MSE
        # below 1e-5 takes nearly all of the 40 ranks
        adjacency = erdos_renyi(40, 0.5, np.random.default_rng(50))
        curve = svd_mse_curve(adjacency, 40)
        min_rank = int(np.argmax(curve < 1e-5))
        assert 38 <= min_rank <= 40

    def test_max_rank_validation(self):
        with pytest.raises(ValueError):
            svd_mse_curve(np.ones((3, 4)), 4)


class TestParamCounts:
    def test_general_counts(self):
        approx = truncated_svd(np.ones((10, 6)), 2)
        assert svd_param_count(approx) == 2 * 16 + 2
        assert svd_vector_param_count(approx) == 32

    def test_symmetric_counts_store_one_factor(self):
        matrix = np.eye(5)
        approx = symmetric_lowrank(matrix, 2)
        assert svd_param_count(approx) == 2 * 5 + 2
        assert svd_vector_param_count(approx) == 10


class TestSvdApprox:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            SvdApprox(np.zeros((3, 2)), np.zeros(2), np.zeros((4, 1)))
        with pytest.raises(ValueError):
            SvdApprox(np.zeros((3, 2)), np.zeros((2, 1)), np.zeros((4, 2)))

    def test_symmetric_requires_square(self):
        with pytest.raises(ValueError):
            SvdApprox(np.zeros((3, 1)), np.zeros(1), np.zeros((4, 1)),
                      symmetric=True)

    def test_eckart_young_on_random_candidates(self):
        # the truncation beats arbitrary same-rank candidates
        rng = np.random.default_rng(51)
        matrix = rng.normal(0, 1, (8, 6))
        best = mse(reconstruct(truncated_svd(matrix, 2)), matrix)
        for _ in range(200):
            cand = rng.normal(0, 1, (8, 2)) @ rng.normal(0, 1, (2, 6))
            assert mse(cand, matrix) >= best


def test_sbm_expectation_curve_flattens_after_block_count():
    # beyond one rank per block the expected adjacency is exhausted
    sizes = [6, 8, 10]
    blocks = np.concatenate([np.full(s, b) for b, s in enumerate(sizes)])
    expected = np.where(blocks[:, None] == blocks[None, :], 0.7, 0.1)
    curve = svd_mse_curve(expected, 10)
    assert curve[3] < 1e-25
    assert curve[2] > 1e-4


def test_adjacency_sample_matches_symmetric_path():
    adjacency, _ = sbm([5, 6, 7], 0.9, 0.1, np.random.default_rng(52))
    sym = reconstruct(symmetric_lowrank(adjacency, 3))
    gen = reconstruct(truncated_svd(adjacency, 3))
    # both are rank-3; errors agree up to eigen/singular mismatch on
    # indefinite matrices, and the symmetric path is never better than the
    # unconstrained optimum
    assert mse(sym, adjacency) >= mse(gen, adjacency) - 1e-12
