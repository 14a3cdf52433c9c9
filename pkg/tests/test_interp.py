import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from kernmol.errors import ConditioningError
from kernmol.interp import KernelInterpolator
from kernmol.kernel import build_matrix, variable_shape


def _random_instance(rng, n, eps0):
    """Smooth data on a random strictly increasing grid over [0, 1]."""
    x = np.sort(rng.uniform(0, 1, n))
    x[0], x[-1] = 0.0, 1.0
    while np.any(np.diff(x) <= 0):
        x = np.sort(rng.uniform(0, 1, n))
        x[0], x[-1] = 0.0, 1.0
    a1, a2, ph = rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0, np.pi)
    y = a1 * np.sin(2 * np.pi * x + ph) + a2 * x**2 + 0.3 * x
    return x, y


class TestFit:
    def test_zero_values_zero_coefficients(self):
        it = KernelInterpolator(eps0=0.75).fit(np.linspace(0, 1, 7), np.zeros(7))
        np.testing.assert_array_equal(it.alpha_, np.zeros(7))

    def test_two_point_residual(self):
        it = KernelInterpolator(eps0=1.0).fit([0.0, 1.0], [1.0, 1.0])
        res = it.kernel_matrix_ @ it.alpha_ - np.array([1.0, 1.0])
        assert np.max(np.abs(res)) <= 1e-12

    def test_single_point_rejected(self):
        with pytest.raises(ValueError):
            KernelInterpolator().fit([0.5], [1.0])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            KernelInterpolator().fit([0.0, 1.0], [1.0, 2.0, 3.0])

    def test_unsorted_sites_rejected(self):
        with pytest.raises(ValueError):
            KernelInterpolator().fit([0.0, 0.7, 0.3], [1.0, 2.0, 3.0])

    def test_refit_roundtrip_recovers_coefficients(self):
        rng = np.random.default_rng(4)
        x = np.linspace(0, 1, 9)
        shapes = variable_shape(x, 0.75)
        alpha0 = rng.standard_normal(9)
        v = build_matrix(x, shapes) @ alpha0
        it = KernelInterpolator(eps0=0.75).fit(x, v)
        np.testing.assert_allclose(it.alpha_, alpha0, rtol=1e-8, atol=1e-10)

    def test_column_input_accepted(self):
        x = np.linspace(0, 1, 5)[:, None]
        it = KernelInterpolator(eps0=1.0).fit(x, np.ones(5))
        assert it.x_.shape == (5,)

    def test_near_singular_raises_conditioning_error(self):
        # nearly flat kernels make the matrix numerically rank one
        x = np.linspace(0, 1, 20)
        with pytest.raises(ConditioningError) as exc:
            KernelInterpolator(eps0=1e-8).fit(x, np.sin(x))
        assert exc.value.cond_estimate > 1e14


class TestPredict:
    def test_zero_coefficients_zero_everywhere(self):
        it = KernelInterpolator(eps0=1.0).fit([0.0, 0.5, 1.0], [0.0, 0.0, 0.0])
        xs = np.linspace(-0.5, 1.5, 11)
        np.testing.assert_array_equal(it.predict(xs), np.zeros(11))

    def test_reproduces_data_at_sites(self):
        rng = np.random.default_rng(1)
        x, y = _random_instance(rng, 15, 0.75)
        it = KernelInterpolator(eps0=0.75).fit(x, y)
        assert np.max(np.abs(it.predict(x) - y)) <= 1e-8 * np.max(np.abs(y))

    def test_derivative_matches_finite_difference(self):
        rng = np.random.default_rng(8)
        x, y = _random_instance(rng, 14, 0.75)
        it = KernelInterpolator(eps0=0.75).fit(x, y)
        xs = rng.uniform(0.05, 0.95, 50)
        h = 1e-6
        fd = (it.predict(xs + h) - it.predict(xs - h)) / (2 * h)
        dx = it.predict(xs, deriv=1)
        assert np.max(np.abs(dx - fd)) <= 1e-6 * max(1.0, np.max(np.abs(fd)))

    def test_unfitted_raises(self):
        with pytest.raises(NotFittedError):
            KernelInterpolator().predict([0.0])


class TestLoocv:
    def test_zero_data_zero_indicator(self):
        it = KernelInterpolator(eps0=0.75).fit(np.linspace(0, 1, 6), np.zeros(6))
        np.testing.assert_array_equal(it.loocv_errors(), np.zeros(6))

    def test_two_point_rule_equals_hand_partial_interpolant(self):
        # with one point left out, the partial interpolant through the other
        # is y_j * K(x, x_j) (unit diagonal), so the prediction error at x_k
        # is |y_j K(x_k, x_j) - y_k|
        x = np.array([0.0, 0.7])
        y = np.array([1.3, -0.4])
        it = KernelInterpolator(eps0=1.2).fit(x, y)
        e = it.loocv_errors()
        k01 = it.kernel_matrix_[0, 1]
        k10 = it.kernel_matrix_[1, 0]
        np.testing.assert_allclose(e, [abs(y[1] * k01 - y[0]), abs(y[0] * k10 - y[1])],
                                   rtol=1e-12)

    def test_rule_matches_brute_force_n12(self):
        rng = np.random.default_rng(12)
        x, y = _random_instance(rng, 12, 0.75)
        it = KernelInterpolator(eps0=0.75).fit(x, y)
        e = it.loocv_errors()
        direct = it.loocv_errors_direct()
        assert np.max(np.abs(e - direct)) / np.max(e) <= 1e-8

    def test_rule_matches_brute_force_random_instances(self):
        rng = np.random.default_rng(77)
        checked = 0
        while checked < 15:
            n = int(rng.integers(5, 31))
            eps0 = rng.uniform(0.5, 3.0)
            x, y = _random_instance(rng, n, eps0)
            it = KernelInterpolator(eps0=eps0).fit(x, y)
            if it.cond1_estimate_ > 1e8:
                continue
            e = it.loocv_errors()
            direct = it.loocv_errors_direct()
            assert np.max(np.abs(e - direct)) / max(np.max(e), 1e-300) <= 1e-8
            checked += 1

    def test_positive_homogeneity_in_data(self):
        rng = np.random.default_rng(3)
        x, y = _random_instance(rng, 10, 1.0)
        e1 = KernelInterpolator(eps0=1.0).fit(x, y).loocv_errors()
        lam = 7.5
        e2 = KernelInterpolator(eps0=1.0).fit(x, lam * y).loocv_errors()
        np.testing.assert_allclose(e2, lam * e1, rtol=1e-12)

    def test_seed_checks_env_runs_oracle(self, monkeypatch):
        monkeypatch.setenv("KERNMOL_SEED_CHECKS", "1")
        rng = np.random.default_rng(5)
        x, y = _random_instance(rng, 9, 0.75)
        e = KernelInterpolator(eps0=0.75).fit(x, y).loocv_errors()
        assert np.all(e >= 0)

    def test_zero_inverse_diagonal_is_degenerate(self, monkeypatch):
        from kernmol import interp as interp_mod
        from kernmol.errors import DegenerateIndicatorError

        it = KernelInterpolator(eps0=1.0).fit([0.0, 0.5, 1.0], [1.0, 2.0, 3.0])
        monkeypatch.setattr(interp_mod.densela, "inverse_diagonal",
                            lambda f: np.array([0.5, 0.0, 0.5]))
        with pytest.raises(DegenerateIndicatorError) as exc:
            it.loocv_errors()
        assert exc.value.index == 1


class TestSklearnSurface:
    def test_get_set_params_and_clone(self):
        it = KernelInterpolator(eps0=2.0)
        assert it.get_params() == {"eps0": 2.0}
        it.set_params(eps0=0.5)
        assert it.eps0 == 0.5
        copy = clone(it)
        assert copy.get_params() == {"eps0": 0.5}

    def test_score_is_r2_like(self):
        x = np.linspace(0, 1, 11)
        y = np.sin(np.pi * x)
        it = KernelInterpolator(eps0=0.75).fit(x, y)
        assert it.score(x, y) == pytest.approx(1.0, abs=1e-10)
