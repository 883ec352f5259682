"""Schmidt structure, entropies, Bell-frame tools, CHSH, and PPT checks.

Oracles: explicit reconstruction of the decomposed vector, eigenvalues of
reduced density matrices, Bloch-vector products for factorized states, and a
finite-difference expansion of the joint spin expectation.
"""

import math

import numpy as np
import pytest

from qtangle import (
    BELL_LABELS,
    BlochCurve,
    Cut,
    DegenerateInputError,
    HermitianOp,
    Ket,
    MeasurementSetting,
    ProductTrajectory,
    ValidationError,
    bell_decompose,
    chsh_value,
    correlation,
    correlation_expansion,
    correlation_matrix,
    entanglement_entropy,
    partial_trace,
    ppt_negativity,
    schmidt,
    tensor_product,
)

SQ2 = math.sqrt(2)
CUT2 = Cut.splitting((0,), 2)


def random_ket(rng, dims):
    amps = rng.standard_normal(math.prod(dims)) + 1j * rng.standard_normal(math.prod(dims))
    return Ket(amps / np.linalg.norm(amps), tuple(dims))


def bell(label):
    table = {
        "phi_plus": [1, 0, 0, 1],
        "phi_minus": [1, 0, 0, -1],
        "psi_plus": [0, 1, 1, 0],
        "psi_minus": [0, 1, -1, 0],
    }
    return Ket(np.array(table[label]) / SQ2, (2, 2))


class TestSchmidt:
    def test_reconstruction_oracle(self):
        rng = np.random.default_rng(10)
        for dims in ((2, 2), (2, 3), (3, 4), (2, 2, 3)):
            cut = Cut((0,), tuple(range(1, len(dims))))
            state = random_ket(rng, dims)
            data = schmidt(state, cut)
            rebuilt = sum(
                c * np.kron(l.amplitudes, r.amplitudes)
                for c, l, r in zip(data.coefficients, data.left_basis, data.right_basis)
            )
            assert np.allclose(rebuilt, state.amplitudes, atol=1e-12)

    def test_coefficients_descend_and_square_to_one(self):
        rng = np.random.default_rng(11)
        state = random_ket(rng, (3, 3))
        c = schmidt(state, CUT2).coefficients
        assert np.all(np.diff(c) <= 1e-15)
        assert np.sum(c**2) == pytest.approx(1.0, abs=1e-12)

    def test_squared_coefficients_match_reduced_spectrum(self):
        rng = np.random.default_rng(12)
        state = random_ket(rng, (2, 4))
        rho = np.outer(state.amplitudes, state.amplitudes.conj())
        reduced = HermitianOp(rho, (2, 4))
        spectrum = np.linalg.eigvalsh(partial_trace(reduced, CUT2, keep="left").matrix)[::-1]
        assert np.allclose(schmidt(state, CUT2).coefficients ** 2, spectrum, atol=1e-12)

    def test_phase_convention_first_left_amplitude_real(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            data = schmidt(random_ket(rng, (3, 3)), CUT2)
            for vec in data.left_basis:
                lead = vec.amplitudes[np.flatnonzero(np.abs(vec.amplitudes) > 1e-12)[0]]
                assert abs(lead.imag) < 1e-12 and lead.real > 0

    def test_unnormalized_input_records_norm(self):
        state = Ket(np.array([3.0, 0, 0, 3.0]), (2, 2))
        data = schmidt(state, CUT2)
        assert data.input_norm == pytest.approx(3 * SQ2)
        assert np.sum(data.coefficients**2) == pytest.approx(1.0, abs=1e-12)

    def test_zero_vector_rejected(self):
        with pytest.raises(DegenerateInputError):
            schmidt(Ket(np.zeros(4, dtype=complex), (2, 2)), CUT2)


class TestEntropy:
    def test_bell_state_is_one_bit(self):
        assert entanglement_entropy(bell("psi_plus"), CUT2) == pytest.approx(1.0, abs=1e-12)

    def test_product_state_is_zero(self):
        rng = np.random.default_rng(14)
        a, b = random_ket(rng, (3,)), random_ket(rng, (4,))
        assert entanglement_entropy(tensor_product((a, b)), Cut((0,), (1,))) < 1e-12

    def test_biased_superposition_binary_entropy(self):
        p = 0.3
        amps = np.zeros(4)
        amps[0], amps[3] = math.sqrt(p), math.sqrt(1 - p)
        want = -p * math.log2(p) - (1 - p) * math.log2(1 - p)
        assert entanglement_entropy(Ket(amps, (2, 2)), CUT2) == pytest.approx(want, abs=1e-12)

    def test_never_negative(self):
        rng = np.random.default_rng(15)
        for _ in range(50):
            a, b = random_ket(rng, (2,)), random_ket(rng, (2,))
            assert entanglement_entropy(tensor_product((a, b)), CUT2) >= 0.0


class TestBellDecompose:
    def test_each_bell_state_is_a_unit_axis(self):
        for k, label in enumerate(BELL_LABELS):
            coeffs = bell_decompose(bell(label))
            expected = np.zeros(4)
            expected[k] = 1.0
            assert np.allclose(coeffs, expected, atol=1e-14)

    def test_roundtrip(self):
        rng = np.random.default_rng(16)
        state = random_ket(rng, (2, 2))
        coeffs = bell_decompose(state)
        rebuilt = sum(c * bell(l).amplitudes for c, l in zip(coeffs, BELL_LABELS))
        assert np.allclose(rebuilt, state.amplitudes, atol=1e-13)

    def test_dims_checked(self):
        with pytest.raises(ValueError):
            bell_decompose(Ket.basis((2, 3), (0, 0)))


def bloch_vector(ket):
    a = ket.amplitudes
    return np.array(
        [
            2 * (a[0].conjugate() * a[1]).real,
            2 * (a[0].conjugate() * a[1]).imag,
            abs(a[0]) ** 2 - abs(a[1]) ** 2,
        ]
    )


class TestCorrelation:
    def test_product_state_factorizes(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            a, b = random_ket(rng, (2,)), random_ket(rng, (2,))
            axes = rng.standard_normal((2, 3))
            axes /= np.linalg.norm(axes, axis=1, keepdims=True)
            setting = MeasurementSetting(axes[0], axes[1])
            got = correlation(tensor_product((a, b)), setting)
            want = (axes[0] @ bloch_vector(a)) * (axes[1] @ bloch_vector(b))
            assert got == pytest.approx(want, abs=1e-12)

    def test_psi_plus_matrix_is_diag_1_1_minus1(self):
        m = correlation_matrix(bell("psi_plus"))
        assert np.allclose(m, np.diag([1.0, 1.0, -1.0]), atol=1e-12)

    def test_axis_validation(self):
        with pytest.raises(ValidationError):
            MeasurementSetting([1.0, 0.0, 0.1], [0.0, 0.0, 1.0])
        with pytest.raises(ValueError):
            MeasurementSetting([1.0, 0.0], [0.0, 0.0, 1.0])


class TestChsh:
    def test_bell_states_hit_tsirelson(self):
        for label in BELL_LABELS:
            assert chsh_value(bell(label)) == pytest.approx(2 * SQ2, abs=1e-12)

    def test_product_states_classical(self):
        rng = np.random.default_rng(18)
        for _ in range(50):
            state = tensor_product((random_ket(rng, (2,)), random_ket(rng, (2,))))
            assert chsh_value(state) <= 2 + 1e-9

    def test_never_above_tsirelson(self):
        rng = np.random.default_rng(19)
        for _ in range(50):
            assert chsh_value(random_ket(rng, (2, 2))) <= 2 * SQ2 + 1e-9

    def test_norm_checked(self):
        with pytest.raises(ValidationError):
            chsh_value(Ket(np.array([1.0, 0, 0, 1.0]), (2, 2)))


class TestCorrelationExpansion:
    def pair(self):
        return ProductTrajectory((BlochCurve([0.0, 1.0]), BlochCurve([0.0, 1.0])))

    def test_z_axes_at_origin(self):
        setting = MeasurementSetting([0, 0, 1.0], [0, 0, 1.0])
        c0, c1, c2 = correlation_expansion(self.pair(), 0.0, setting)
        assert (c0, c1) == pytest.approx((1.0, 0.0), abs=1e-14)
        assert c2 == pytest.approx(-1.0, abs=1e-14)

    def test_curvature_is_minus_axis_overlap_at_origin(self):
        rng = np.random.default_rng(20)
        for _ in range(20):
            axes = rng.standard_normal((2, 3))
            axes[:, 1] = 0.0  # curve stays real, only the xz plane matters
            axes /= np.linalg.norm(axes, axis=1, keepdims=True)
            setting = MeasurementSetting(axes[0], axes[1])
            c0, c1, c2 = correlation_expansion(self.pair(), 0.0, setting)
            assert c0 == pytest.approx(axes[0][2] * axes[1][2], abs=1e-12)
            # at the origin: value is az*bz, half-curvature is ax*bx - az*bz
            assert c2 + c0 == pytest.approx(axes[0][0] * axes[1][0], abs=1e-12)

    def test_matches_fd_oracle_along_curve(self):
        rng = np.random.default_rng(21)
        traj = ProductTrajectory((BlochCurve([0.2, 0.9, -0.3]), BlochCurve([0.2, 0.9, -0.3])))
        h = 1e-2
        for _ in range(20):
            axes = rng.standard_normal((2, 3))
            axes /= np.linalg.norm(axes, axis=1, keepdims=True)
            setting = MeasurementSetting(axes[0], axes[1])
            t = rng.uniform(0, 1.5)

            def e(s):
                return correlation(traj.state(s), setting)

            c0, c1, c2 = correlation_expansion(traj, t, setting)
            d1 = (-e(t + 2 * h) + 8 * e(t + h) - 8 * e(t - h) + e(t - 2 * h)) / (12 * h)
            d2 = (
                -e(t + 2 * h) + 16 * e(t + h) - 30 * e(t) + 16 * e(t - h) - e(t - 2 * h)
            ) / (12 * h**2)
            assert c0 == pytest.approx(e(t), abs=1e-12)
            assert c1 == pytest.approx(d1, abs=1e-7)
            assert c2 == pytest.approx(d2 / 2, abs=1e-7)

    def test_mismatched_factors_rejected(self):
        traj = ProductTrajectory((BlochCurve([0.0, 1.0]), BlochCurve([0.0, 2.0])))
        setting = MeasurementSetting([0, 0, 1.0], [0, 0, 1.0])
        with pytest.raises(ValueError):
            correlation_expansion(traj, 0.0, setting)

    def test_out_of_plane_curve_rejected(self):
        traj = ProductTrajectory(
            (BlochCurve([0.0, 1.0], [0.0, 0.5]), BlochCurve([0.0, 1.0], [0.0, 0.5]))
        )
        setting = MeasurementSetting([0, 0, 1.0], [0, 0, 1.0])
        with pytest.raises(ValueError):
            correlation_expansion(traj, 0.0, setting)


class TestPptNegativity:
    def density(self, matrix, dims):
        return HermitianOp(np.asarray(matrix, dtype=complex), dims)

    def test_phi_minus_negativity_half(self):
        state = bell("phi_minus")
        rho = self.density(np.outer(state.amplitudes, state.amplitudes.conj()), (2, 2))
        assert ppt_negativity(rho, CUT2) == pytest.approx(0.5, abs=1e-12)

    def test_product_density_zero(self):
        rng = np.random.default_rng(22)
        a, b = random_ket(rng, (2,)), random_ket(rng, (2,))
        rho = np.kron(
            np.outer(a.amplitudes, a.amplitudes.conj()),
            np.outer(b.amplitudes, b.amplitudes.conj()),
        )
        assert ppt_negativity(self.density(rho, (2, 2)), CUT2) < 1e-12

    def test_isotropic_mixture_threshold(self):
        state = bell("phi_minus")
        proj = np.outer(state.amplitudes, state.amplitudes.conj())
        for eps, entangled in ((0.2, False), (1 / 3 + 1e-6, True), (0.9, True)):
            rho = (1 - eps) * np.eye(4) / 4 + eps * proj
            neg = ppt_negativity(self.density(rho, (2, 2)), CUT2)
            assert (neg > 1e-9) == entangled

    def test_middle_cut_of_three_sites(self):
        state = bell("psi_plus")
        rho = np.kron(np.outer(state.amplitudes, state.amplitudes.conj()), np.eye(2) / 2)
        op = self.density(rho, (2, 2, 2))
        assert ppt_negativity(op, Cut((0,), (1, 2))) == pytest.approx(0.5, abs=1e-12)
        assert ppt_negativity(op, Cut((2,), (0, 1))) < 1e-12
