import numpy as np
import pytest
from scipy.special import expit

from didbounds import (
    DesignMatrix,
    fit_logit,
    fit_ols,
    predict_probability,
    quadratic_expansion,
)
from didbounds.errors import DimensionMismatch, SeparationDetected, SingleClass


def design(X, names=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    names = names or tuple(f"c{j}" for j in range(X.shape[1]))
    return DesignMatrix(X, tuple(names))


class TestDesignMatrix:
    def test_rejects_nonfinite(self):
        with pytest.raises(DimensionMismatch):
            design([[1.0], [np.inf]])

    def test_rejects_label_mismatch(self):
        with pytest.raises(DimensionMismatch):
            DesignMatrix(np.ones((3, 2)), ("only_one",))

    def test_with_intercept(self):
        d = DesignMatrix.with_intercept(np.arange(3.0), ("x",))
        assert d.column_labels == ("const", "x")
        assert np.allclose(d.values[:, 0], 1.0)


class TestOls:
    def test_intercept_only_is_mean(self):
        fit = fit_ols(design(np.ones((3, 1))), np.array([1.0, 2.0, 3.0]))
        assert fit.coefficients[0] == pytest.approx(2.0, abs=1e-12)

    def test_exact_line(self):
        x = np.arange(5.0)
        d = DesignMatrix.with_intercept(x, ("x",))
        fit = fit_ols(d, 3.0 + 2.0 * x)
        assert np.allclose(fit.coefficients, [3.0, 2.0], atol=1e-10)
        assert not fit.rank_deficient

    def test_residual_orthogonality(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(50, 3))
        y = rng.normal(size=50)
        d = design(X)
        fit = fit_ols(d, y)
        resid = y - d.values @ fit.coefficients
        # normal equations: X'r = 0
        assert np.max(np.abs(X.T @ resid)) < 1e-8

    def test_rank_deficient_flag_and_min_norm(self):
        X = np.column_stack([np.ones(10), np.ones(10)])
        y = np.arange(10.0)
        fit = fit_ols(design(X), y)
        assert fit.rank_deficient
        # minimum-norm solution splits the intercept evenly
        assert fit.coefficients[0] == pytest.approx(fit.coefficients[1])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            fit_ols(design(np.ones((4, 1))), np.ones(3))

    def test_fitted_values_invariant_to_reparameterization(self):
        rng = np.random.default_rng(11)
        X = np.column_stack([np.ones(40), rng.normal(size=(40, 2))])
        y = rng.normal(size=40)
        A = np.array([[1.0, 0.3, -0.2], [0.0, 2.0, 0.5], [0.0, 0.0, -1.5]])
        f1 = fit_ols(design(X), y)
        f2 = fit_ols(design(X @ A), y)
        assert np.allclose(X @ f1.coefficients, (X @ A) @ f2.coefficients,
                           atol=1e-8)


class TestLogit:
    def test_intercept_only_matches_log_odds(self):
        y = np.array([1.0, 1.0, 1.0, 0.0])
        fit = fit_logit(design(np.ones((4, 1))), y)
        assert fit.converged
        assert fit.coefficients[0] == pytest.approx(np.log(3.0), abs=1e-8)

    def test_irrelevant_covariate_slope_near_zero(self):
        rng = np.random.default_rng(5)
        n = 50_000
        x = rng.normal(size=n)
        y = (rng.uniform(size=n) < 0.3).astype(float)
        d = DesignMatrix.with_intercept(x, ("x",))
        fit = fit_logit(d, y)
        assert fit.converged
        assert abs(fit.coefficients[1]) < 0.05
        phat = y.mean()
        assert fit.coefficients[0] == pytest.approx(
            np.log(phat / (1 - phat)), abs=0.05
        )

    def test_recovers_known_coefficients(self):
        rng = np.random.default_rng(2)
        n = 100_000
        x = rng.normal(size=n)
        y = (rng.uniform(size=n) < expit(-1.0 + 2.0 * x)).astype(float)
        fit = fit_logit(DesignMatrix.with_intercept(x, ("x",)), y)
        assert fit.converged
        assert np.allclose(fit.coefficients, [-1.0, 2.0], atol=0.05)

    def test_perfect_separation_detected(self):
        x = np.array([-2.0, -1.0, -0.5, 0.5, 1.0, 2.0])
        y = (x > 0).astype(float)
        with pytest.raises(SeparationDetected):
            fit_logit(DesignMatrix.with_intercept(x, ("x",)), y)

    def test_single_class(self):
        with pytest.raises(SingleClass):
            fit_logit(design(np.ones((3, 1))), np.ones(3))

    def test_non_binary_rejected(self):
        with pytest.raises(DimensionMismatch):
            fit_logit(design(np.ones((3, 1))), np.array([0.0, 0.5, 1.0]))

    def test_loglik_nondecreasing_over_iterations(self):
        # rerun with increasing iteration caps; converged or not, the
        # objective must never fall
        rng = np.random.default_rng(9)
        x = rng.normal(size=(200, 2))
        y = (rng.uniform(size=200) < expit(x[:, 0] - 0.5 * x[:, 1])).astype(float)
        d = DesignMatrix.with_intercept(x, ("a", "b"))
        lls = []
        for cap in range(1, 8):
            fit = fit_logit(d, y, max_iter=cap)
            lls.append(fit.log_likelihood)
        assert all(b >= a - 1e-9 for a, b in zip(lls, lls[1:]))

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(13)
        X = np.column_stack([np.ones(80), rng.normal(size=(80, 2))])
        y = (rng.uniform(size=80) < 0.4).astype(float)

        def loglik(beta):
            eta = X @ beta
            return float(y @ eta - np.logaddexp(0.0, eta).sum())

        for _ in range(5):
            beta = rng.normal(scale=0.5, size=3)
            eta = X @ beta
            p = expit(eta)
            analytic = X.T @ (y - p)
            h = 1e-6
            fd = np.array([
                (loglik(beta + h * e) - loglik(beta - h * e)) / (2 * h)
                for e in np.eye(3)
            ])
            assert np.allclose(analytic, fd, rtol=1e-6, atol=1e-6)


class TestPredictProbability:
    def test_zero_coefficients_give_half(self):
        fit = fit_logit(design(np.ones((4, 1))),
                        np.array([1.0, 0.0, 1.0, 0.0]))
        p = predict_probability(fit, design(np.zeros((3, 1))))
        assert np.allclose(p, 0.5)

    def test_monotone_in_index(self):
        rng = np.random.default_rng(3)
        x = np.sort(rng.normal(size=30))
        y = (rng.uniform(size=30) < expit(x)).astype(float)
        y[0], y[-1] = 0.0, 1.0  # keep both classes
        d = DesignMatrix.with_intercept(x, ("x",))
        fit = fit_logit(d, y)
        p = predict_probability(fit, d)
        if fit.coefficients[1] > 0:
            assert np.all(np.diff(p) >= -1e-12)

    def test_clipping(self):
        fit = fit_logit(design(np.ones((4, 1))),
                        np.array([1.0, 0.0, 1.0, 0.0]))
        big = design(np.full((2, 1), 1e4))
        p = predict_probability(fit, big, clip=1e-3)
        assert np.all(p <= 1 - 1e-3)
        assert np.all(p >= 1e-3)

    def test_dimension_mismatch(self):
        fit = fit_logit(design(np.ones((4, 1))),
                        np.array([1.0, 0.0, 1.0, 0.0]))
        with pytest.raises(DimensionMismatch):
            predict_probability(fit, design(np.ones((2, 2))))


class TestQuadraticExpansion:
    def test_columns_and_labels(self):
        X = np.array([[1.0, 2.0], [3.0, 4.0]])
        Xq, labels = quadratic_expansion(X, ["a", "b"])
        assert labels == ["a", "b", "a^2", "b^2", "a*b"]
        assert np.allclose(Xq[0], [1, 2, 1, 4, 2])
        assert np.allclose(Xq[1], [3, 4, 9, 16, 12])

    def test_single_column(self):
        Xq, labels = quadratic_expansion(np.array([2.0, 3.0]), ["x"])
        assert labels == ["x", "x^2"]
        assert np.allclose(Xq, [[2, 4], [3, 9]])
