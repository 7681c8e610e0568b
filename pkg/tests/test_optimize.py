"""Initialization, optimizer updates, minibatch sampling, and batched fits."""

import numpy as np
import pytest

from rbfmat import (
    AdagradOptimizer,
    AdamOptimizer,
    AllRunsDivergedError,
    FitConfig,
    RbfModel,
    apply_gradient_step,
    evaluate_full,
    fit,
    gradient,
    init_model,
    make_optimizer,
    mse_loss,
    sample_minibatch,
)


class TestFitConfig:
    def test_rejects_unknown_optimizer(self):
        with pytest.raises(ValueError):
            FitConfig(components=1, optimizer="sgd")

    def test_rejects_nonpositive_hyperparameters(self):
        with pytest.raises(ValueError):
            FitConfig(components=1, learning_rate=0.0)
        with pytest.raises(ValueError):
            FitConfig(components=1, init_scale=0.0)
        with pytest.raises(ValueError):
            FitConfig(components=1, max_iters=0)
        with pytest.raises(ValueError):
            FitConfig(components=1, batch_runs=0)

    def test_stochastic_requires_minibatch_size(self):
        with pytest.raises(ValueError):
            FitConfig(components=1, stochastic=True)

    def test_seed_must_fit_64_bits(self):
        with pytest.raises(ValueError):
            FitConfig(components=1, seed=-1)
        with pytest.raises(ValueError):
            FitConfig(components=1, seed=2 ** 64)


class TestInitModel:
    def test_deterministic_for_fixed_generator(self):
        a = init_model(3, 20, 20, True, 0.1, np.random.default_rng(42))
        b = init_model(3, 20, 20, True, 0.1, np.random.default_rng(42))
        assert np.array_equal(a.row_coords, b.row_coords)
        assert np.array_equal(a.weights, b.weights)
        assert a.offset == b.offset

    def test_coordinate_spread_tracks_init_scale(self):
        model = init_model(1, 1000, 1000, True, 0.1, np.random.default_rng(7))
        assert 0.08 < model.row_coords.std() < 0.12
        wide = init_model(1, 1000, 1000, True, 1.0, np.random.default_rng(7))
        assert 0.8 < wide.row_coords.std() < 1.2

    def test_offset_starts_at_zero(self):
        model = init_model(2, 10, 10, True, 0.1, np.random.default_rng(0))
        assert model.offset == 0.0

    def test_weights_alternate_signs_with_shared_magnitude(self):
        model = init_model(4, 10, 10, True, 0.1, np.random.default_rng(1),
                           value_range=3.0)
        w = model.weights
        assert np.all(np.sign(w) == [1.0, -1.0, 1.0, -1.0])
        assert np.allclose(np.abs(w), np.abs(w[0]), rtol=1e-15)
        # shared jitter is |Normal(1, 0.2)|, so the magnitude stays near
        # value_range * sqrt(2 / components)
        nominal = 3.0 * np.sqrt(2.0 / 4)
        assert 0.3 * nominal < abs(w[0]) < 2.0 * nominal

    def test_initial_matrix_is_nearly_constant_at_small_scale(self):
        model = init_model(3, 50, 50, True, 0.01, np.random.default_rng(2))
        out = evaluate_full(model)
        assert out.max() - out.min() <= 0.05 * np.abs(model.weights).sum()

    def test_asymmetric_draws_column_coordinates(self):
        model = init_model(2, 5, 8, False, 0.1, np.random.default_rng(3))
        assert not model.symmetric
        assert model.col_coords.shape == (2, 8)

    def test_validates_dimensions(self):
        with pytest.raises(ValueError):
            init_model(1, 5, 6, True, 0.1, np.random.default_rng(0))
        with pytest.raises(ValueError):
            init_model(1, 0, 5, False, 0.1, np.random.default_rng(0))


class TestAdamOptimizer:
    def test_zero_gradient_leaves_parameters_unchanged(self):
        opt = AdamOptimizer(3, learning_rate=0.1)
        theta = np.array([1.0, -2.0, 0.5])
        opt.step(theta, np.zeros(3))
        assert np.array_equal(theta, [1.0, -2.0, 0.5])

    def test_first_step_size_is_learning_rate(self):
        # bias correction makes the first update lr * g / (|g| + eps)
        opt = AdamOptimizer(1, learning_rate=0.1)
        theta = np.zeros(1)
        opt.step(theta, np.ones(1))
        assert theta[0] == pytest.approx(-0.1, rel=1e-6)

    def test_steps_oppose_gradient_sign(self):
        opt = AdamOptimizer(4, learning_rate=0.05)
        theta = np.zeros(4)
        grad = np.array([1.0, -2.0, 0.5, -0.1])
        opt.step(theta, grad)
        assert np.all(np.sign(theta) == -np.sign(grad))

    def test_decoupled_decay_shrinks_prefix_only(self):
        opt = AdamOptimizer(2, learning_rate=0.1, weight_decay=0.5, decay_len=1)
        theta = np.array([1.0, 1.0])
        opt.step(theta, np.zeros(2))
        assert theta[0] == pytest.approx(0.95, rel=1e-12)
        assert theta[1] == 1.0

    def test_state_advances_across_calls(self):
        opt = AdamOptimizer(1, learning_rate=0.1)
        theta = np.zeros(1)
        opt.step(theta, np.ones(1))
        opt.step(theta, np.ones(1))
        assert opt.t == 2


class TestAdagradOptimizer:
    def test_update_sizes_decay_as_inverse_sqrt(self):
        # with a constant unit gradient the k-th update is lr / sqrt(k)
        opt = AdagradOptimizer(1, learning_rate=0.1)
        theta = np.zeros(1)
        prev = 0.0
        for k in range(1, 6):
            opt.step(theta, np.ones(1))
            update = prev - theta[0]
            assert update == pytest.approx(0.1 / np.sqrt(k), rel=1e-6)
            prev = theta[0]


class TestMakeOptimizer:
    def test_adam_has_no_decay(self):
        opt = make_optimizer(FitConfig(components=1, optimizer="adam"), 5, 3)
        assert isinstance(opt, AdamOptimizer)
        assert opt.weight_decay == 0.0

    def test_adamw_decays_coordinates(self):
        cfg = FitConfig(components=1, optimizer="adamw", weight_decay=0.02)
        opt = make_optimizer(cfg, 5, 3)
        assert opt.weight_decay == 0.02
        assert opt.decay_len == 3

    def test_adagrad_selected_by_name(self):
        opt = make_optimizer(FitConfig(components=1, optimizer="adagrad"), 5, 3)
        assert isinstance(opt, AdagradOptimizer)


class TestApplyGradientStep:
    def test_single_step_decreases_loss(self):
        rng = np.random.default_rng(30)
        model = RbfModel(rng.normal(0, 0.1, (1, 6)), [1.0], 0.0)
        target = np.eye(6)
        opt = AdamOptimizer(8, learning_rate=0.01)
        before = mse_loss(target, model)
        stepped = apply_gradient_step(opt, model, gradient(target, model))
        assert mse_loss(target, stepped) < before

    def test_returns_new_model(self):
        model = RbfModel([[0.0, 1.0]], [1.0], 0.0)
        opt = AdamOptimizer(4, learning_rate=0.1)
        stepped = apply_gradient_step(opt, model, gradient(np.eye(2), model))
        assert stepped is not model
        assert np.array_equal(model.row_coords, [[0.0, 1.0]])


class TestSampleMinibatch:
    def test_exhaustive_sample_covers_grid(self):
        sample = sample_minibatch(3, 4, 12, np.random.default_rng(0))
        flat = sorted(i * 4 + j for i, j in sample.pairs)
        assert flat == list(range(12))

    def test_deterministic_for_fixed_generator(self):
        a = sample_minibatch(10, 10, 7, np.random.default_rng(5))
        b = sample_minibatch(10, 10, 7, np.random.default_rng(5))
        assert np.array_equal(a.pairs, b.pairs)

    def test_single_draws_are_uniform(self):
        rng = np.random.default_rng(6)
        counts = np.zeros(16)
        draws = 20000
        for _ in range(draws):
            sample = sample_minibatch(4, 4, 1, rng)
            counts[sample.rows[0] * 4 + sample.cols[0]] += 1
        freq = counts / draws
        p = 1 / 16
        sigma = np.sqrt(p * (1 - p) / draws)
        assert np.all(np.abs(freq - p) < 5 * sigma)

    def test_size_validation(self):
        with pytest.raises(ValueError):
            sample_minibatch(3, 3, 0, np.random.default_rng(0))
        with pytest.raises(ValueError):
            sample_minibatch(3, 3, 10, np.random.default_rng(0))


class TestFit:
    def test_constant_matrix_fits_essentially_exactly(self):
        target = np.full((6, 6), 3.0)
        cfg = FitConfig(components=1, symmetric=True, max_iters=2000,
                        batch_runs=5, seed=1)
        report = fit(target, cfg)
        assert report.best_loss < 1e-8

    def test_report_is_internally_consistent(self):
        rng = np.random.default_rng(31)
        target = rng.normal(0, 1, (8, 8))
        target = (target + target.T) / 2
        cfg = FitConfig(components=2, symmetric=True, max_iters=300,
                        batch_runs=4, seed=2, trace_stride=50)
        report = fit(target, cfg)
        assert report.per_run_final_losses.shape == (4,)
        assert report.best_loss == report.per_run_final_losses.min()
        assert report.best_loss == pytest.approx(
            mse_loss(target, report.best_model), rel=1e-12)
        last_iter, last_loss = report.loss_trajectory[-1]
        assert last_iter == report.iterations_used
        assert last_loss == report.best_loss
        assert report.seed == 2

    def test_identical_results_across_thread_counts(self):
        rng = np.random.default_rng(32)
        target = rng.normal(0, 1, (10, 10))
        cfg = FitConfig(components=2, max_iters=200, batch_runs=6, seed=3)
        serial = fit(target, cfg, threads=1)
        pooled = fit(target, cfg, threads=3)
        assert np.array_equal(serial.per_run_final_losses,
                              pooled.per_run_final_losses)
        assert np.array_equal(serial.best_model.row_coords,
                              pooled.best_model.row_coords)
        assert np.array_equal(serial.best_model.col_coords,
                              pooled.best_model.col_coords)
        assert serial.best_model.offset == pooled.best_model.offset

    def test_growing_the_batch_appends_runs(self):
        # run k is seeded by (seed, k), so a larger batch reruns the same
        # prefix and can only improve the best loss
        rng = np.random.default_rng(33)
        target = rng.normal(0, 1, (8, 8))
        cfg_small = FitConfig(components=1, max_iters=150, batch_runs=3, seed=4)
        cfg_large = FitConfig(components=1, max_iters=150, batch_runs=8, seed=4)
        small = fit(target, cfg_small)
        large = fit(target, cfg_large)
        assert np.array_equal(large.per_run_final_losses[:3],
                              small.per_run_final_losses)
        assert large.best_loss <= small.best_loss

    def test_target_loss_stops_early(self):
        target = np.full((5, 5), 2.0)
        cfg = FitConfig(components=1, symmetric=True, max_iters=5000,
                        batch_runs=3, seed=5, target_loss=1e-6)
        report = fit(target, cfg)
        assert report.best_loss <= 1e-6
        assert report.iterations_used < 5000

    def test_all_divergent_runs_raise(self):
        # an enormous learning rate overflows the squared residuals
        target = np.eye(4)
        cfg = FitConfig(components=1, symmetric=True, learning_rate=1e200,
                        max_iters=5, batch_runs=3, seed=6)
        with pytest.raises(AllRunsDivergedError):
            fit(target, cfg)

    def test_recovers_planted_coordinates(self):
        # fit a matrix generated by a known model and compare coordinates
        # after centering, up to global reflection
        rng = np.random.default_rng(77)
        true_u = rng.normal(0.0, 1.0, 12)
        planted = RbfModel(true_u[None, :], [2.0], 0.5)
        target = evaluate_full(planted)
        cfg = FitConfig(components=1, symmetric=True, max_iters=6000,
                        batch_runs=10, seed=3, target_loss=1e-12)
        report = fit(target, cfg)
        assert report.best_loss < 1e-9
        fitted = report.best_model.row_coords[0]
        a = true_u - true_u.mean()
        b = fitted - fitted.mean()
        err = min(np.abs(a - b).max(), np.abs(a + b).max())
        assert err < 1e-3

    def test_stochastic_fit_reduces_full_loss(self):
        rng = np.random.default_rng(34)
        true_u = rng.normal(0.0, 1.0, 10)
        target = evaluate_full(RbfModel(true_u[None, :], [1.5], 0.0))
        cfg = FitConfig(components=1, symmetric=True, stochastic=True,
                        minibatch_size=30, max_iters=4000, batch_runs=5,
                        seed=7, trace_stride=200)
        report = fit(target, cfg)
        assert report.best_loss < 1e-2

    def test_stochastic_minibatch_cannot_exceed_entries(self):
        cfg = FitConfig(components=1, stochastic=True, minibatch_size=100,
                        max_iters=10, batch_runs=1)
        with pytest.raises(ValueError):
            fit(np.eye(3), cfg)

    def test_symmetric_fit_requires_square_target(self):
        cfg = FitConfig(components=1, symmetric=True, max_iters=10, batch_runs=1)
        with pytest.raises(ValueError):
            fit(np.zeros((3, 4)), cfg)
