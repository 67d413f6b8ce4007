"""Dataset generator tests: supports, noise levels, determinism, round trip."""

import numpy as np
import pytest

from bnnbench.datasets import (TASK_IDS, generate_bundle, latent_truth,
                               load_bundle, save_bundle, task_by_id,
                               uniform_union)


def in_union(x, intervals):
    return np.array([any(lo <= v <= hi for lo, hi in intervals) for v in x])


class TestLatents:
    def test_pinned_values(self):
        assert latent_truth(task_by_id("AF1"), np.array([0.0]))[0] == pytest.approx(1.0)
        assert latent_truth(task_by_id("AF2"), np.array([2.0]))[0] == pytest.approx(0.8)
        assert latent_truth(task_by_id("AF3"), np.array([0.0]))[0] == pytest.approx(0.0)

    def test_quadratic_variant(self):
        t = task_by_id("AF2")
        assert latent_truth(t, np.array([2.0]),
                            quadratic_variant=True)[0] == pytest.approx(0.4)

    def test_teacher_requires_weights(self):
        with pytest.raises(ValueError):
            latent_truth(task_by_id("AF4"), np.array([0.0]))


class TestTaskSpecs:
    def test_table_values(self):
        t1, t2 = task_by_id("AF1"), task_by_id("AF2")
        t3, t4 = task_by_id("AF3"), task_by_id("AF4")
        assert (t1.sigma, t1.n_train, t1.n_test, t1.ood) == (0.2, 100, 200, False)
        assert (t2.sigma, t2.n_train, t2.n_test, t2.ood) == (0.25, 100, 200, True)
        # AF3's noise is stated as a variance of 0.25
        assert (t3.sigma, t3.n_train, t3.n_test, t3.ood) == (0.5, 82, 200, True)
        assert (t4.sigma, t4.n_train, t4.n_test, t4.ood) == (0.02, 120, 120, True)
        assert t1.surrogate_arch().param_count == 10401
        assert t4.surrogate_arch().param_count == 20501
        assert t1.surrogate_arch(hidden_width=20).layer_sizes == (1, 20, 20, 1)

    def test_unknown_id(self):
        with pytest.raises(ValueError):
            task_by_id("AF9")

    def test_id_normalization(self):
        assert task_by_id("af#2").task_id == "AF2"


class TestUniformUnion:
    def test_containment_and_proportions(self):
        rng = np.random.default_rng(0)
        intervals = ((-4.0, -1.0), (1.0, 4.0))
        x = uniform_union(rng, 20000, intervals)
        assert in_union(x, intervals).all()
        # equal lengths: close to half the mass in each component
        frac = (x < 0).mean()
        assert abs(frac - 0.5) < 0.02

    def test_length_weighting(self):
        rng = np.random.default_rng(1)
        intervals = ((0.0, 1.0), (2.0, 5.0))  # lengths 1 and 3
        x = uniform_union(rng, 40000, intervals)
        assert abs((x < 1.5).mean() - 0.25) < 0.02


class TestBundles:
    @pytest.mark.parametrize("task_id", TASK_IDS)
    def test_supports_and_sizes(self, task_id):
        task = task_by_id(task_id)
        b = generate_bundle(task, n_replicates=3, seed=11)
        assert b.n_replicates == 3
        for ds in b.train_sets:
            assert ds.n == task.n_train
            assert in_union(ds.x[:, 0], task.train_intervals).all()
        assert b.test.n == task.n_test
        assert in_union(b.test.x[:, 0], task.test_intervals).all()
        assert b.grid.shape == (200, 1)
        assert b.latent_truth.shape == (task.n_test,)

    def test_af1_residual_noise_level(self):
        task = task_by_id("AF1")
        b = generate_bundle(task, n_replicates=8, seed=3)
        for ds in b.train_sets:
            resid = ds.y[:, 0] - latent_truth(task, ds.x)
            assert abs(resid.std(ddof=1) - 0.2) < 0.15 * 0.2
            assert (np.abs(ds.x) <= 3.0).all()

    def test_af3_split_counts(self):
        b = generate_bundle("AF3", n_replicates=4, seed=5)
        for ds in b.train_sets:
            x = ds.x[:, 0]
            inner = (np.abs(x) < 2.0).sum()
            assert inner == 2
            # the pinned points are the last two drawn
            assert (np.abs(x[-2:]) <= 2.0).all()

    def test_ood_test_points_exist(self):
        # OOD relative to where training mass concentrates (AF3's two pinned
        # inner points do not make the inner region in-distribution)
        for task_id in ("AF2", "AF3", "AF4"):
            task = task_by_id(task_id)
            b = generate_bundle(task, n_replicates=1, seed=7)
            outside = ~in_union(b.test.x[:, 0], task.dense_train_intervals)
            assert outside.any(), f"{task_id} test set has no OOD points"

    def test_deterministic_and_test_fixed_across_sizes(self):
        b1 = generate_bundle("AF2", n_replicates=3, seed=9)
        b2 = generate_bundle("AF2", n_replicates=3, seed=9)
        for d1, d2 in zip(b1.train_sets, b2.train_sets):
            assert np.array_equal(d1.x, d2.x) and np.array_equal(d1.y, d2.y)
        assert np.array_equal(b1.test.x, b2.test.x)
        # fewer replicates at the same seed: same test set, same leading sets
        b3 = generate_bundle("AF2", n_replicates=2, seed=9)
        assert np.array_equal(b3.test.x, b1.test.x)
        assert np.array_equal(b3.train_sets[0].x, b1.train_sets[0].x)

    def test_teacher_frozen_within_bundle(self):
        b = generate_bundle("AF4", n_replicates=2, seed=13)
        assert b.teacher_params is not None
        assert b.teacher_params.shape == (20501,)
        # replicates share the teacher: residual std should match sigma
        task = task_by_id("AF4")
        for ds in b.train_sets:
            f = latent_truth(task, ds.x, b.teacher_params)
            resid = ds.y[:, 0] - f
            se = task.sigma / np.sqrt(2 * (task.n_train - 1))
            assert abs(resid.std(ddof=1) - task.sigma) < 5 * se

    def test_sigma_zero_override(self):
        b = generate_bundle("AF2", n_replicates=1, seed=15, sigma=0.0)
        ds = b.train_sets[0]
        np.testing.assert_allclose(ds.y[:, 0], 0.1 * ds.x[:, 0] ** 3, atol=1e-14)

    def test_round_trip(self, tmp_path):
        b = generate_bundle("AF4", n_replicates=2, seed=17)
        out = save_bundle(b, tmp_path)
        loaded = load_bundle(out)
        assert loaded.task.task_id == "AF4"
        assert loaded.n_replicates == 2
        for d1, d2 in zip(loaded.train_sets, b.train_sets):
            np.testing.assert_allclose(d1.x, d2.x, rtol=1e-15)
            np.testing.assert_allclose(d1.y, d2.y, rtol=1e-15)
        np.testing.assert_allclose(loaded.test.y, b.test.y, rtol=1e-15)
        np.testing.assert_allclose(loaded.teacher_params, b.teacher_params)
        np.testing.assert_allclose(loaded.latent_truth, b.latent_truth, rtol=1e-12)
