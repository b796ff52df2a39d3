import numpy as np
import pytest

from sensornet import (
    NumericalError,
    PureState,
    ValidationError,
    classical_fim_povm2,
    correlation_profile,
    likelihood_single,
    make_gamma_state_2,
    make_gamma_state_d,
    make_product_state,
    qfi_inverse_closed_form,
    qfi_pure,
    qfi_sensor_symmetric,
    verify_povm_optimality,
)


def gamma_family_strength(gamma, d):
    return (1.0 - gamma**2) / (1.0 + (2 ** (d - 1) - 1) * gamma**2)


def finite_difference_fim(gamma, theta, step=1e-6):
    """Independent oracle: central differences of the outcome probabilities."""
    theta = np.asarray(theta, dtype=float)
    fim = np.zeros((2, 2))
    for n in (0, 1):
        for k in (0, 1):
            p = likelihood_single(n, k, theta, gamma)
            grad = np.zeros(2)
            for axis in range(2):
                up = theta.copy()
                up[axis] += step
                down = theta.copy()
                down[axis] -= step
                grad[axis] = (
                    likelihood_single(n, k, up, gamma)
                    - likelihood_single(n, k, down, gamma)
                ) / (2 * step)
            fim += np.outer(grad, grad) / p
    return fim


class TestQfiPure:
    def test_two_sensor_family(self):
        rng = np.random.default_rng(1)
        for gamma in rng.uniform(-3, 3, size=20):
            J = (1 - gamma**2) / (1 + gamma**2)
            info = qfi_pure(make_gamma_state_2(gamma))
            np.testing.assert_allclose(info.matrix, [[1, J], [J, 1]], atol=1e-12)

    def test_balanced_product_state_identity(self):
        info = qfi_pure(make_product_state(0.5, 3))
        np.testing.assert_allclose(info.matrix, np.eye(3), atol=1e-12)
        assert info.invertible

    def test_z_eigenstate_zero_matrix(self):
        info = qfi_pure(make_product_state(1.0, 3))
        np.testing.assert_allclose(info.matrix, 0.0, atol=1e-15)
        assert not info.invertible

    def test_closed_form_agreement(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            d = int(rng.integers(2, 9))
            gamma = rng.uniform(-3, 3)
            direct = qfi_pure(make_gamma_state_d(gamma, d))
            prof = correlation_profile(make_gamma_state_d(gamma, d))
            closed = qfi_sensor_symmetric(prof.common_v, prof.common_J, d)
            np.testing.assert_allclose(direct.matrix, closed.matrix, atol=1e-10)


class TestClosedForm:
    def test_uncorrelated_identity(self):
        info = qfi_sensor_symmetric(0.25, 0.0, 5)
        np.testing.assert_allclose(info.matrix, np.eye(5), atol=1e-15)
        np.testing.assert_allclose(info.eigenvalues, 1.0)
        assert info.invertible

    def test_maximal_correlation_not_invertible(self):
        info = qfi_sensor_symmetric(0.25, 1.0, 2)
        np.testing.assert_allclose(info.matrix, [[1, 1], [1, 1]], atol=1e-15)
        assert not info.invertible

    def test_lower_boundary_eigenvalue_vanishes(self):
        info = qfi_sensor_symmetric(0.25, 1.0 / (1.0 - 3), 3)
        assert info.eigenvalues[0] == pytest.approx(0.0, abs=1e-15)
        assert not info.invertible

    def test_characteristic_polynomial_roots(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            d = int(rng.integers(2, 9))
            v = rng.uniform(0.01, 0.25)
            J = rng.uniform(1.0 / (1.0 - d) + 0.01, 0.99)
            info = qfi_sensor_symmetric(v, J, d)
            lam1 = 4 * v * (1 + (d - 1) * J)
            lam2 = 4 * v * (1 - J)
            for lam in (lam1, lam2):
                det = np.linalg.det(info.matrix - lam * np.eye(d))
                assert abs(det) < 1e-8

    def test_range_validation(self):
        with pytest.raises(ValidationError):
            qfi_sensor_symmetric(0.3, 0.0, 2)
        with pytest.raises(ValidationError):
            qfi_sensor_symmetric(0.25, 1.5, 2)

    def test_indefinite_input_rejected(self):
        # below the invertibility floor the closed form is no longer a valid
        # information matrix of any probe
        with pytest.raises(NumericalError):
            qfi_sensor_symmetric(0.25, -0.9, 3)


class TestClosedFormInverse:
    def test_uncorrelated(self):
        inv = qfi_inverse_closed_form(0.2, 0.0, 4)
        np.testing.assert_allclose(inv, np.eye(4) / 0.8, atol=1e-14)

    def test_two_sensor_reference(self):
        J = 0.561
        inv = qfi_inverse_closed_form(0.25, J, 2)
        expected = np.array([[1, -J], [-J, 1]]) / (1 - J**2)
        np.testing.assert_allclose(inv, expected, atol=1e-12)

    def test_matches_dense_solver(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            d = int(rng.integers(2, 11))
            v = rng.uniform(0.01, 0.25)
            J = rng.uniform(1.0 / (1.0 - d) + 0.02, 0.98)
            closed = qfi_inverse_closed_form(v, J, d)
            dense = np.linalg.inv(qfi_sensor_symmetric(v, J, d).matrix)
            np.testing.assert_allclose(closed, dense, atol=1e-10)

    def test_product_is_identity(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            d = int(rng.integers(2, 11))
            v = rng.uniform(0.05, 0.25)
            J = rng.uniform(1.0 / (1.0 - d) + 0.05, 0.95)
            product = qfi_inverse_closed_form(v, J, d) @ qfi_sensor_symmetric(v, J, d).matrix
            np.testing.assert_allclose(product, np.eye(d), atol=1e-10)

    def test_rejects_singular_range(self):
        with pytest.raises(ValidationError):
            qfi_inverse_closed_form(0.25, 1.0, 2)
        with pytest.raises(ValidationError):
            qfi_inverse_closed_form(0.25, -0.6, 3)


class TestClassicalFim:
    def test_uniform_probe_identity(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            theta = rng.uniform(0, 2 * np.pi, size=2)
            info = classical_fim_povm2(1.0, tuple(theta))
            np.testing.assert_allclose(info.matrix, np.eye(2), atol=1e-12)

    def test_reference_off_diagonal(self):
        info = classical_fim_povm2(0.531, (1.0, 2.0))
        assert info.matrix[0, 1] == pytest.approx(0.561, abs=1e-3)
        assert info.matrix[0, 1] == pytest.approx((1 - 0.531**2) / (1 + 0.531**2), abs=1e-12)

    def test_constant_across_grid(self):
        axis = np.linspace(0, np.pi / 2, 7)
        mats = [
            classical_fim_povm2(2.0, (a, b)).matrix for a in axis for b in axis
        ]
        spread = np.max(np.abs(np.array(mats) - mats[0]))
        assert spread < 1e-9

    def test_finite_difference_oracle(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            gamma = rng.uniform(0.2, 2.5)
            theta = rng.uniform(0.3, 1.2, size=2)  # away from vanishing outcomes
            analytic = classical_fim_povm2(gamma, tuple(theta)).matrix
            numeric = finite_difference_fim(gamma, theta)
            np.testing.assert_allclose(analytic, numeric, atol=1e-6)

    def test_quantum_bound_direction(self):
        rng = np.random.default_rng(15)
        for _ in range(30):
            gamma = rng.uniform(0.1, 3.0)
            theta = tuple(rng.uniform(0, 2 * np.pi, size=2))
            fq = qfi_pure(make_gamma_state_2(gamma)).matrix
            fc = classical_fim_povm2(gamma, theta).matrix
            gap_eigs = np.linalg.eigvalsh(fq - fc)
            assert gap_eigs.min() > -1e-9

    def test_rejects_degenerate_gamma(self):
        with pytest.raises(ValidationError):
            classical_fim_povm2(0.0, (0.5, 0.5))


class TestPovmOptimality:
    @pytest.mark.parametrize("gamma", [0.334, 0.531, 1.0])
    def test_optimal_on_quarter_grid(self, gamma):
        axis = np.linspace(0, np.pi / 2, 5)
        grid = [(a, b) for a in axis for b in axis]
        assert verify_povm_optimality(gamma, grid, tol=1e-9)

    def test_tolerance_zero_fails(self):
        axis = np.linspace(0.1, 1.0, 3)
        grid = [(a, b) for a in axis for b in axis]
        assert not verify_povm_optimality(0.7, grid, tol=0.0)


class TestInfoMatrixValidation:
    def test_rejects_asymmetric(self):
        from sensornet.fisher_info import InfoMatrix

        with pytest.raises(NumericalError):
            InfoMatrix(
                matrix=np.array([[1.0, 0.5], [0.0, 1.0]]),
                kind="quantum",
                invertible=True,
                eigenvalues=np.array([1.0, 1.0]),
            )

    def test_rejects_bad_kind(self):
        from sensornet.fisher_info import InfoMatrix

        with pytest.raises(ValidationError):
            InfoMatrix(
                matrix=np.eye(2),
                kind="hybrid",
                invertible=True,
                eigenvalues=np.ones(2),
            )

    def test_random_state_psd(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            d = int(rng.integers(1, 6))
            z = rng.normal(size=2**d) + 1j * rng.normal(size=2**d)
            info = qfi_pure(PureState(d, z / np.linalg.norm(z)))
            assert info.eigenvalues.min() > -1e-10
