import numpy as np
import pytest

from sensornet import (
    PureState,
    ValidationError,
    apply_encoding,
    correlation_profile,
    is_product_state,
    make_gamma_state_2,
    make_gamma_state_d,
    make_product_state,
)
from sensornet.qubit_network import reduced_qubit_purity


def gamma_family_strength(gamma, d):
    return (1.0 - gamma**2) / (1.0 + (2 ** (d - 1) - 1) * gamma**2)


def random_product_state(rng, d):
    amps = np.ones(1, dtype=complex)
    for _ in range(d):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        amps = np.kron(amps, z / np.linalg.norm(z))
    return PureState(d, amps)


class TestConstruction:
    def test_gamma_2_uniform(self):
        state = make_gamma_state_2(1.0)
        np.testing.assert_allclose(state.amplitudes, np.full(4, 0.5), atol=1e-15)

    def test_gamma_2_bell(self):
        state = make_gamma_state_2(0.0)
        expected = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-15)

    def test_gamma_2_strength_near_reference(self):
        prof = correlation_profile(make_gamma_state_2(0.531))
        assert prof.common_J == pytest.approx((1 - 0.531**2) / (1 + 0.531**2), abs=1e-15)
        assert prof.common_J == pytest.approx(0.561, abs=1e-3)

    def test_gamma_d_matches_gamma_2(self):
        rng = np.random.default_rng(42)
        for gamma in rng.uniform(-3, 3, size=10):
            a = make_gamma_state_2(gamma).amplitudes
            b = make_gamma_state_d(gamma, 2).amplitudes
            np.testing.assert_allclose(a, b, atol=1e-15)

    def test_gamma_plus_one_is_plus_tensor_power(self):
        state = make_gamma_state_d(1.0, 3)
        np.testing.assert_allclose(state.amplitudes, np.full(8, 1 / (2 * np.sqrt(2))), atol=1e-15)

    def test_gamma_minus_one_d3_amplitudes(self):
        state = make_gamma_state_d(-1.0, 3)
        expected = np.full(8, -1.0)
        expected[0] = 1.0
        expected[-1] = 1.0
        expected /= 2.0 * np.sqrt(2.0)
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-15)

    def test_gamma_d_rejects_small_d(self):
        with pytest.raises(ValidationError):
            make_gamma_state_d(0.5, 1)

    def test_product_state_half_matches_uniform(self):
        a = make_product_state(0.5, 2).amplitudes
        b = make_gamma_state_2(1.0).amplitudes
        np.testing.assert_allclose(a, b, atol=1e-15)

    def test_product_state_a_one(self):
        state = make_product_state(1.0, 3)
        expected = np.zeros(8)
        expected[0] = 1.0
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-15)

    def test_product_state_rejects_bad_population(self):
        with pytest.raises(ValidationError):
            make_product_state(1.5, 2)
        with pytest.raises(ValidationError):
            make_product_state(-0.1, 2)

    def test_norm_validation(self):
        with pytest.raises(ValidationError):
            PureState(1, np.array([1.0, 1.0]))

    def test_length_validation(self):
        with pytest.raises(ValidationError):
            PureState(2, np.array([1.0, 0.0]))

    def test_dimension_cap(self):
        with pytest.raises(ValidationError):
            PureState(21, np.zeros(2**21))


class TestEncoding:
    def test_zero_phases_identity(self):
        state = make_gamma_state_d(0.7, 3)
        out = apply_encoding(state, np.zeros(3))
        np.testing.assert_allclose(out.amplitudes, state.amplitudes, atol=1e-15)

    def test_two_sensor_phase_pattern(self):
        gamma = 0.6
        t1, t2 = 0.83, -1.27
        out = apply_encoding(make_gamma_state_2(gamma), np.array([t1, t2]))
        norm = np.sqrt(2 * (1 + gamma**2))
        expected = np.array(
            [
                np.exp(-0.5j * (t1 + t2)),
                gamma * np.exp(-0.5j * (t1 - t2)),
                gamma * np.exp(+0.5j * (t1 - t2)),
                np.exp(+0.5j * (t1 + t2)),
            ]
        ) / norm
        np.testing.assert_allclose(out.amplitudes, expected, atol=1e-15)

    def test_norm_preserved_on_random_states(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            d = int(rng.integers(1, 6))
            z = rng.normal(size=2**d) + 1j * rng.normal(size=2**d)
            state = PureState(d, z / np.linalg.norm(z))
            out = apply_encoding(state, rng.uniform(-10, 10, size=d))
            assert abs(np.sum(np.abs(out.amplitudes) ** 2) - 1.0) < 1e-12

    def test_full_period_shift_preserves_all_probabilities(self):
        # 2*pi per sensor is a global sign at most: expect identical outcome
        # probabilities for arbitrary projective measurements
        rng = np.random.default_rng(11)
        d = 3
        z = rng.normal(size=2**d) + 1j * rng.normal(size=2**d)
        state = PureState(d, z / np.linalg.norm(z))
        shifted = apply_encoding(state, np.full(d, 2.0 * np.pi))
        for _ in range(5):
            m = rng.normal(size=(2**d, 2**d)) + 1j * rng.normal(size=(2**d, 2**d))
            basis, _ = np.linalg.qr(m)
            p_orig = np.abs(basis.conj().T @ state.amplitudes) ** 2
            p_shift = np.abs(basis.conj().T @ shifted.amplitudes) ** 2
            np.testing.assert_allclose(p_orig, p_shift, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            apply_encoding(make_gamma_state_2(1.0), np.zeros(3))


class TestCorrelationProfile:
    def test_gamma_family_profile(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            d = int(rng.integers(2, 7))
            gamma = rng.uniform(-4, 4)
            prof = correlation_profile(make_gamma_state_d(gamma, d))
            assert prof.sensor_symmetric
            assert prof.common_v == pytest.approx(0.25, abs=1e-10)
            assert prof.common_J == pytest.approx(gamma_family_strength(gamma, d), abs=1e-10)

    def test_uniform_state_uncorrelated(self):
        prof = correlation_profile(make_gamma_state_2(1.0))
        assert prof.common_J == pytest.approx(0.0, abs=1e-12)

    def test_z_eigenstate_undefined_strengths(self):
        prof = correlation_profile(make_product_state(1.0, 3))
        np.testing.assert_allclose(prof.variances, 0.0, atol=1e-15)
        assert not prof.strengths_defined.any()
        assert prof.strength(0, 1) is None
        # all variances vanish identically, so the profile still counts as symmetric
        assert prof.sensor_symmetric
        assert prof.common_J is None

    def test_partial_zero_variance_not_symmetric(self):
        # sensor 1 pinned to |0>, sensor 2 balanced
        single = np.array([1.0, 0.0])
        other = np.array([1.0, 1.0]) / np.sqrt(2.0)
        state = PureState(2, np.kron(single, other))
        prof = correlation_profile(state)
        assert not prof.sensor_symmetric
        assert prof.strength(0, 1) is None

    def test_product_state_quarter_variance(self):
        prof = correlation_profile(make_product_state(0.5, 4))
        np.testing.assert_allclose(prof.variances, 0.25, atol=1e-12)
        off = ~np.eye(4, dtype=bool)
        np.testing.assert_allclose(prof.strengths[off], 0.0, atol=1e-12)

    def test_strength_bounds(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            d = int(rng.integers(2, 6))
            z = rng.normal(size=2**d) + 1j * rng.normal(size=2**d)
            prof = correlation_profile(PureState(d, z / np.linalg.norm(z)))
            defined = prof.strengths_defined
            assert np.all(np.abs(prof.strengths[defined]) <= 1.0 + 1e-12)

    def test_gamma_family_strength_ranges(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            d = int(rng.integers(2, 7))
            inside = rng.uniform(-1, 1)
            J_in = correlation_profile(make_gamma_state_d(inside, d)).common_J
            assert -1e-12 <= J_in <= 1.0 + 1e-12
            outside = rng.uniform(1, 6) * rng.choice([-1.0, 1.0])
            J_out = correlation_profile(make_gamma_state_d(outside, d)).common_J
            assert -1.0 / (2 ** (d - 1) - 1) - 1e-12 < J_out < 0.0


class TestProductCriterion:
    def test_three_sensor_family_members(self):
        assert is_product_state(make_gamma_state_d(1.0, 3))
        assert not is_product_state(make_gamma_state_d(-1.0, 3))

    def test_bell_state_entangled(self):
        assert not is_product_state(make_gamma_state_2(0.0))

    def test_random_tensor_products(self):
        rng = np.random.default_rng(21)
        for _ in range(30):
            d = int(rng.integers(2, 6))
            assert is_product_state(random_product_state(rng, d))

    def test_two_sensor_family_product_only_at_unit_gamma(self):
        tol = 1e-9
        rng = np.random.default_rng(33)
        for _ in range(60):
            gamma = rng.uniform(-3, 3)
            if abs(gamma**2 - 1.0) <= 10 * tol:
                continue
            assert not is_product_state(make_gamma_state_2(gamma), tol=tol)

    def test_reduced_purity_range(self):
        purity = reduced_qubit_purity(make_gamma_state_2(0.0), 0)
        assert purity == pytest.approx(0.5, abs=1e-12)
