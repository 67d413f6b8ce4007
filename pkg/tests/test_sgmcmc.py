"""SGMCMC tests: step identities, stationary moments, chain orchestration."""

import math

import numpy as np
import pytest

from bnnbench.samplers import (ChainDivergenceError, SampleSet, SgmcmcConfig,
                               cyclical_step_size, psgld_step, run_sgmcmc,
                               sghmc_step, sgld_step)
from targets import BayesianLinearPosterior, GaussianTarget


def make_linear(seed=0, n=20, d=2, sigma=1.0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, d))
    w_true = rng.normal(size=d)
    y = x @ w_true + sigma * rng.normal(size=n)
    return BayesianLinearPosterior(x, y, sigma)


class _CountingTarget:
    """Wrapper that counts full-gradient evaluations (anchor refreshes)."""

    def __init__(self, inner):
        self.inner = inner
        self.full_grads = 0

    @property
    def dim(self):
        return self.inner.dim

    def potential(self, w):
        return self.inner.potential(w)

    def grad(self, w):
        self.full_grads += 1
        return self.inner.grad(w)

    def stochastic_grad(self, w, schedule, vr=None):
        return self.inner.stochastic_grad(w, schedule, vr)


class TestStepIdentities:
    def test_sgld_zero_grad_zero_noise_is_identity(self):
        w = np.array([1.0, -2.0, 0.5])
        out = sgld_step(w, np.zeros(3), 1e-3, np.zeros(3))
        np.testing.assert_array_equal(out, w)

    def test_sgld_arithmetic(self):
        out = sgld_step(np.array([1.0]), np.array([2.0]), 0.01, np.array([0.5]))
        assert out[0] == pytest.approx(1.0 - 0.02 + math.sqrt(0.02) * 0.5,
                                       rel=1e-14)

    def test_sghmc_full_friction_zeroes_momentum(self):
        w = np.array([1.0, 2.0])
        v = np.array([0.5, -0.5])
        new_w, new_v = sghmc_step(w, v, np.zeros(2), 1e-3, 1.0, np.zeros(2))
        np.testing.assert_array_equal(new_w, w + v)
        np.testing.assert_array_equal(new_v, np.zeros(2))

    def test_sghmc_at_rest_position_unchanged(self):
        w = np.array([3.0, -1.0])
        g = np.array([2.0, 4.0])
        new_w, new_v = sghmc_step(w, np.zeros(2), g, 0.01, 0.1, np.zeros(2))
        np.testing.assert_array_equal(new_w, w)
        np.testing.assert_allclose(new_v, -0.01 * g, rtol=1e-14)

    def test_psgld_zero_accumulator_matches_rescaled_sgld(self):
        # D = 1/damping when the accumulator is zero, so the move equals
        # plain SGLD at step eps/damping
        w = np.array([0.3, -0.7])
        g = np.array([1.5, 2.5])
        xi = np.array([0.2, -0.4])
        eps, damping = 1e-4, 1e-2
        moved, acc = psgld_step(w, g, np.zeros(2), eps, 0.9, damping, xi)
        np.testing.assert_allclose(moved, sgld_step(w, g, eps / damping, xi),
                                   rtol=1e-12)
        np.testing.assert_allclose(acc, 0.1 * g * g, rtol=1e-14)

    def test_psgld_constant_gradient_accumulator_geometric(self):
        g = np.array([2.0, -3.0])
        acc = np.zeros(2)
        for k in range(1, 200):
            _, acc = psgld_step(np.zeros(2), g, acc, 1e-5, 0.9, 1e-5,
                                np.zeros(2))
            np.testing.assert_allclose(acc, (1.0 - 0.9 ** k) * g * g,
                                       rtol=1e-10)
        np.testing.assert_allclose(acc, g * g, rtol=1e-8)

    def test_psgld_preconditioner_ignores_current_gradient(self):
        # the move must use D built from the incoming accumulator only
        w = np.array([1.0])
        acc = np.array([4.0])
        eps, damping = 1e-3, 1e-5
        for g in (np.array([0.1]), np.array([100.0])):
            moved, _ = psgld_step(w, g, acc, eps, 0.99, damping, np.zeros(1))
            d = 1.0 / (damping + 2.0)
            assert moved[0] == pytest.approx(1.0 - eps * d * g[0], rel=1e-12)


class TestCyclicalSchedule:
    def test_cycle_starts_at_base(self):
        assert cyclical_step_size(1, 0.5, 1000, 10) == 0.5
        assert cyclical_step_size(101, 0.5, 1000, 10) == 0.5  # restart

    def test_mid_cycle_is_half(self):
        assert cyclical_step_size(51, 0.5, 100, 1) == pytest.approx(0.25,
                                                                    rel=1e-12)

    def test_end_of_cycle_value(self):
        expected = 0.5 * 0.3 * (math.cos(math.pi * 99 / 100) + 1.0)
        assert cyclical_step_size(100, 0.3, 1000, 10) == pytest.approx(
            expected, rel=1e-14)

    def test_monotone_within_cycle(self):
        vals = [cyclical_step_size(k, 1.0, 100, 1) for k in range(1, 101)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_out_of_range_iteration_raises(self):
        with pytest.raises(ValueError):
            cyclical_step_size(0, 1.0, 100, 1)
        with pytest.raises(ValueError):
            cyclical_step_size(101, 1.0, 100, 1)


class TestStationaryMoments:
    """Hand loops on 100 iid standard-normal coordinates.

    Gradient of U = |w|^2/2 is w itself, so the exact stationary law is
    N(0, I) and the empirical second moment pools 100 chains.
    """

    def test_sgld_variance_within_ten_percent(self):
        rng = np.random.default_rng(11)
        d, eps = 100, 1e-2
        w = np.zeros(d)
        tot = cnt = 0
        for k in range(12000):
            w = sgld_step(w, w, eps, rng.standard_normal(d))
            if k >= 2000:
                tot += float(w @ w)
                cnt += d
        var = tot / cnt
        assert abs(var - 1.0) < 0.10
        # discrete OU chains have variance 1/(1 - eps/2) exactly
        assert var == pytest.approx(1.0 / (1.0 - eps / 2), abs=0.03)

    def test_sghmc_variance_within_ten_percent(self):
        # momentum resampling every 10 steps resets the w-v anticorrelation
        # and heats the chain ~6%; that offset is part of the protocol
        rng = np.random.default_rng(12)
        d, eps, friction = 100, 1e-3, 0.1
        w = np.zeros(d)
        v = np.zeros(d)
        tot = cnt = 0
        for k in range(60000):
            if k % 10 == 0:
                v = math.sqrt(eps) * rng.standard_normal(d)
            w, v = sghmc_step(w, v, w, eps, friction, rng.standard_normal(d))
            if k >= 10000:
                tot += float(w @ w)
                cnt += d
        assert abs(tot / cnt - 1.0) < 0.10

    def test_psgld_variance_within_fifteen_percent(self):
        # pSGLD's regime is noisy gradients: the accumulator's noise floor
        # keeps the preconditioner nearly constant. ghat = w + 3 zeta is an
        # unbiased estimate with exactly that structure.
        rng = np.random.default_rng(13)
        d, eps = 100, 1e-2
        w = np.zeros(d)
        acc = None
        tot = cnt = 0
        for k in range(30000):
            g = w + 3.0 * rng.standard_normal(d)
            if acc is None:
                acc = g * g
            w, acc = psgld_step(w, g, acc, eps, 0.99, 1e-5,
                                rng.standard_normal(d))
            if k >= 6000:
                tot += float(w @ w)
                cnt += d
        assert abs(tot / cnt - 1.0) < 0.15


class TestRunSgmcmc:
    def test_sgld_recovers_gaussian(self):
        d = 10
        mean = np.linspace(-2.0, 2.0, d)
        target = GaussianTarget(mean, np.eye(d))
        cfg = SgmcmcConfig(family="sgld", step_size=1e-2,
                           total_iterations=30000, seed=5)
        out = run_sgmcmc(target, cfg, np.zeros(d))
        assert out.samples.shape[0] <= cfg.thin_pool
        err = np.abs(out.samples.mean(axis=0) - mean)
        assert err.max() < 0.4
        assert np.abs(out.samples.var(axis=0) - 1.0).max() < 0.25

    def test_sghmc_recovers_gaussian(self):
        d = 10
        target = GaussianTarget(np.zeros(d), np.eye(d))
        cfg = SgmcmcConfig(family="sghmc", step_size=1e-3,
                           total_iterations=60000, seed=6)
        out = run_sgmcmc(target, cfg, np.zeros(d))
        assert np.abs(out.samples.mean(axis=0)).max() < 0.4
        assert np.abs(out.samples.var(axis=0) - 1.0).max() < 0.3

    def test_psgld_runs_on_conjugate_model(self):
        post = make_linear()
        cfg = SgmcmcConfig(family="sgld", variant="preconditioned",
                           step_size=1e-3, total_iterations=4000,
                           batch_size=5, seed=7)
        out = run_sgmcmc(post, cfg, post.post_mean.copy())
        assert out.algorithm == "psgld"
        assert np.isfinite(out.samples).all()
        # stays in the posterior's neighborhood: no 1/damping blowup
        assert np.abs(out.samples - post.post_mean).max() < 3.0

    def test_cv_anchors_once_svrg_reanchors_periodically(self):
        post = make_linear()
        base = dict(step_size=1e-5, total_iterations=12, burn_in=2,
                    batch_size=5, seed=3)
        cv = _CountingTarget(post)
        run_sgmcmc(cv, SgmcmcConfig(variant="cv", **base),
                   post.post_mean.copy())
        assert cv.full_grads == 1
        svrg = _CountingTarget(post)
        run_sgmcmc(svrg, SgmcmcConfig(variant="svrg", svrg_period=5, **base),
                   post.post_mean.copy())
        assert svrg.full_grads == 1 + 12 // 5

    def test_cyclical_variant_runs(self):
        post = make_linear()
        cfg = SgmcmcConfig(family="sghmc", variant="cyclical", cycles=2,
                           step_size=1e-5, total_iterations=40, burn_in=10,
                           batch_size=5, seed=1)
        out = run_sgmcmc(post, cfg, post.post_mean.copy())
        assert out.algorithm == "sghmc-cyclical"
        assert np.isfinite(out.samples).all()

    def test_thinning_to_pool_size_is_permutation(self):
        target = GaussianTarget(np.zeros(2), np.eye(2))
        kw = dict(family="sgld", step_size=5e-2, total_iterations=60,
                  burn_in=30, seed=9)
        raw = run_sgmcmc(target, SgmcmcConfig(**kw), np.zeros(2)).samples
        thinned = run_sgmcmc(target, SgmcmcConfig(thin_target=len(raw), **kw),
                             np.zeros(2)).samples
        assert thinned.shape == raw.shape
        order_a = np.lexsort(raw.T)
        order_b = np.lexsort(thinned.T)
        np.testing.assert_allclose(raw[order_a], thinned[order_b], rtol=1e-14)

    def test_thin_target_sets_exact_size(self):
        target = GaussianTarget(np.zeros(2), np.eye(2))
        cfg = SgmcmcConfig(step_size=5e-2, total_iterations=60, burn_in=30,
                           thin_target=7, seed=2)
        out = run_sgmcmc(target, cfg, np.zeros(2))
        assert out.samples.shape == (7, 2)
        assert out.info["thinned"]

    def test_pool_capped_by_stride(self):
        target = GaussianTarget(np.zeros(2), np.eye(2))
        cfg = SgmcmcConfig(step_size=5e-2, total_iterations=300, burn_in=100,
                           thin_pool=32, seed=2)
        out = run_sgmcmc(target, cfg, np.zeros(2))
        assert out.samples.shape[0] <= 32
        assert out.info["collect_stride"] == math.ceil(200 / 32)

    def test_deterministic_and_seed_sensitive(self):
        post = make_linear()
        kw = dict(step_size=1e-4, total_iterations=50, burn_in=10,
                  batch_size=5)
        a = run_sgmcmc(post, SgmcmcConfig(seed=4, **kw), post.post_mean.copy())
        b = run_sgmcmc(post, SgmcmcConfig(seed=4, **kw), post.post_mean.copy())
        c = run_sgmcmc(post, SgmcmcConfig(seed=5, **kw), post.post_mean.copy())
        np.testing.assert_array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)

    def test_divergence_raises_with_iteration(self):
        post = make_linear()
        cfg = SgmcmcConfig(step_size=1e8, total_iterations=100, burn_in=0,
                           batch_size=5, seed=0)
        with pytest.raises(ChainDivergenceError) as err:
            run_sgmcmc(post, cfg, post.post_mean.copy())
        assert err.value.iteration is not None
        assert err.value.iteration >= 1

    def test_init_shape_checked(self):
        post = make_linear()
        cfg = SgmcmcConfig(total_iterations=10, burn_in=0, batch_size=5)
        with pytest.raises(ValueError, match="shape"):
            run_sgmcmc(post, cfg, np.zeros(post.dim + 1))


ALL_VARIANTS = [("sgld", "plain", 5e-3), ("sgld", "cv", 5e-3),
                ("sgld", "svrg", 5e-3), ("sgld", "cyclical", 5e-3),
                ("sgld", "preconditioned", 5e-3),
                ("sghmc", "plain", 1e-3), ("sghmc", "cv", 1e-3),
                ("sghmc", "svrg", 1e-3), ("sghmc", "cyclical", 1e-3)]


class TestVariantSmoke:
    """Every variant recovers the 2-D conjugate posterior mean."""

    @pytest.mark.parametrize("family,variant,eps", ALL_VARIANTS)
    def test_mean_within_standard_errors(self, family, variant, eps):
        post = make_linear()
        cfg = SgmcmcConfig(family=family, variant=variant, step_size=eps,
                           total_iterations=20000, batch_size=10, seed=42,
                           cycles=4 if variant == "cyclical" else None,
                           thin_pool=512)
        samples = run_sgmcmc(post, cfg, post.post_mean.copy()).samples
        # batch-means SE honors autocorrelation; with 8 batches the SE
        # estimate itself is ~27% noisy, so the 3-sigma criterion gets a
        # finite-batch allowance
        nb = 8
        bm = samples[: (len(samples) // nb) * nb].reshape(nb, -1, 2)
        se = bm.mean(axis=1).std(axis=0, ddof=1) / math.sqrt(nb)
        err = np.abs(samples.mean(axis=0) - post.post_mean)
        assert (err <= 4.0 * se).all()


class TestConfigValidation:
    def test_burn_in_consuming_all_iterations_rejected(self):
        with pytest.raises(ValueError, match="retained"):
            SgmcmcConfig(total_iterations=10, burn_in=10)

    def test_burn_in_defaults_to_half(self):
        assert SgmcmcConfig(total_iterations=101).burn_in == 50

    def test_bad_family_and_variant(self):
        with pytest.raises(ValueError, match="family"):
            SgmcmcConfig(family="hmc")
        with pytest.raises(ValueError, match="variant"):
            SgmcmcConfig(variant="fancy")

    def test_preconditioned_sghmc_rejected(self):
        with pytest.raises(ValueError, match="sgld"):
            SgmcmcConfig(family="sghmc", variant="preconditioned")

    def test_cyclical_requires_cycles(self):
        with pytest.raises(ValueError, match="cycles"):
            SgmcmcConfig(variant="cyclical")

    @pytest.mark.parametrize("kw", [
        dict(step_size=0.0),
        dict(step_size=-1e-3),
        dict(friction=0.0),
        dict(friction=1.5),
        dict(thin_target=0),
        dict(batch_size=0),
        dict(resample_period=0),
        dict(svrg_period=0),
        dict(precond_damping=0.0),
        dict(precond_decay=1.0),
    ])
    def test_bad_numeric_fields(self, kw):
        with pytest.raises(ValueError):
            SgmcmcConfig(**kw)

    def test_labels(self):
        assert SgmcmcConfig().label() == "sgld"
        assert SgmcmcConfig(family="sghmc").label() == "sghmc"
        assert SgmcmcConfig(variant="preconditioned").label() == "psgld"
        assert SgmcmcConfig(family="sghmc", variant="cv").label() == "sghmc-cv"


class TestSampleSet:
    def test_rejects_empty_and_non_finite(self):
        with pytest.raises(ValueError):
            SampleSet(np.empty((0, 3)), "x", {}, 0)
        with pytest.raises(ValueError, match="finite"):
            SampleSet(np.array([[1.0, np.nan]]), "x", {}, 0)

    def test_promotes_single_vector(self):
        s = SampleSet(np.array([1.0, 2.0]), "x", {}, 0)
        assert s.samples.shape == (1, 2)
        assert s.n == 1 and s.dim == 2
