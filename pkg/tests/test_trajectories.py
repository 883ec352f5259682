"""Curves, tangents, and operator differentials against independent oracles.

The main oracle is finite differencing of the state map itself: any assembled
tangent or operator differential must match a Richardson-extrapolated central
difference of the thing it claims to differentiate.
"""

import math

import numpy as np
import pytest

from qtangle import (
    BlochCurve,
    Cut,
    DegenerateInputError,
    Ensemble,
    Ket,
    LocalHamiltonianCurve,
    ParameterRangeError,
    PhaseCurve,
    ProductTrajectory,
    RegisterProgram,
    SampledCurve,
    TangentVector,
    UnitaryCurve,
    UnsupportedMethodError,
    ValidationError,
    curve_through,
    differentiate,
    entanglement_entropy,
    eval_curve,
    horizontal_tangent,
    infinitesimal_composition,
    partial_trace,
    product_tangent,
    projector_differential,
    propagator,
    pseudo_pure_differential,
    register_state,
    register_tangent,
    separable_mixed_differential,
    with_global_phase,
)

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1j], [1j, 0.0]])


def richardson_fd(fn, t, h=1e-4):
    """Fourth-order derivative oracle built only from evaluations of fn."""
    fine = (fn(t + h / 2) - fn(t - h / 2)) / h
    coarse = (fn(t + h) - fn(t - h)) / (2 * h)
    return (4 * fine - coarse) / 3


def qubit_arc():
    """theta(t) = t, phi = 0: the workhorse real qubit curve."""
    return BlochCurve([0.0, 1.0])


class TestEvalCurve:
    def test_bloch_at_zero_is_ground_state(self):
        assert np.allclose(eval_curve(qubit_arc(), 0.0).amplitudes, [1.0, 0.0])

    def test_hamiltonian_orbit_closed_form(self):
        curve = LocalHamiltonianCurve(SY / 2, Ket.basis((2,), (0,)))
        for theta in (0.3, 1.1, 2.5):
            expected = [math.cos(theta / 2), math.sin(theta / 2)]
            assert np.allclose(eval_curve(curve, theta).amplitudes, expected, atol=1e-12)

    def test_phase_curve_at_pi_flips_sign(self):
        plus = Ket(np.array([1.0, 1.0]) / math.sqrt(2), (2,))
        state = eval_curve(PhaseCurve([0.0, 1.0], plus), math.pi)
        assert np.allclose(state.amplitudes, -plus.amplitudes, atol=1e-12)

    def test_states_stay_normalized(self):
        rng = np.random.default_rng(0)
        curve = BlochCurve([0.4, 1.3, -0.2], [0.1, 0.7])
        for t in rng.uniform(-2, 2, size=20):
            assert eval_curve(curve, t).norm() == pytest.approx(1.0, abs=1e-10)


class TestDifferentiate:
    def test_bloch_velocity_at_origin(self):
        tv = differentiate(qubit_arc(), 0.0)
        assert np.allclose(tv.direction, [0.0, 0.5], atol=1e-14)

    def test_phase_velocity_is_rate_times_state(self):
        base = Ket(np.array([1.0, 1j]) / math.sqrt(2), (2,))
        tv = differentiate(PhaseCurve([0.0, 0.7], base), 1.3)
        expected = 0.7j * np.exp(0.7j * 1.3) * base.amplitudes
        assert np.allclose(tv.direction, expected, atol=1e-13)

    def test_all_methods_agree_on_smooth_curve(self):
        curve = BlochCurve([0.3, 0.9, 0.4], [0.0, 0.5])
        exact = differentiate(curve, 0.8, method="analytic").direction
        fd = differentiate(curve, 0.8, method="central_fd", h=1e-5).direction
        rich = differentiate(curve, 0.8, method="richardson", h=1e-4).direction
        assert np.allclose(fd, exact, atol=1e-9)
        assert np.allclose(rich, exact, atol=1e-12)

    def test_central_fd_is_second_order(self):
        curve = BlochCurve([0.2, 1.1, 0.3])
        exact = differentiate(curve, 0.5, method="analytic").direction
        errs = [
            np.linalg.norm(differentiate(curve, 0.5, method="central_fd", h=h).direction - exact)
            for h in (1e-3, 5e-4)
        ]
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.2)

    def test_richardson_is_fourth_order(self):
        curve = BlochCurve([0.2, 1.1, 0.3, 0.0, 0.2])
        exact = differentiate(curve, 0.5, method="analytic").direction
        errs = [
            np.linalg.norm(differentiate(curve, 0.5, method="richardson", h=h).direction - exact)
            for h in (2e-2, 1e-2)
        ]
        assert errs[0] / errs[1] == pytest.approx(16.0, rel=0.35)

    def test_norm_preservation_overlap_bounds(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            curve = BlochCurve(rng.uniform(-1, 1, size=2), rng.uniform(-1, 1, size=2))
            t = rng.uniform(0, 2)
            exact = differentiate(curve, t, method="analytic")
            fd = differentiate(curve, t, method="central_fd")
            assert abs(exact.base_overlap().real) < 1e-12
            assert abs(fd.base_overlap().real) < 1e-8

    def test_analytic_on_sampled_curve_is_unsupported(self):
        grid = np.linspace(0, 1, 9)
        samples = [eval_curve(qubit_arc(), t) for t in grid]
        curve = SampledCurve(grid, samples)
        with pytest.raises(UnsupportedMethodError):
            differentiate(curve, 0.5, method="analytic")

    def test_sampled_range_error(self):
        grid = np.linspace(0, 1, 9)
        curve = SampledCurve(grid, [eval_curve(qubit_arc(), t) for t in grid])
        with pytest.raises(ParameterRangeError):
            curve.state(1.5)

    def test_sampled_derivative_tracks_source_curve(self):
        grid = np.linspace(0, 2, 41)
        src = BlochCurve([0.1, 1.2])
        curve = SampledCurve(grid, [eval_curve(src, t) for t in grid])
        got = differentiate(curve, 1.0, method="richardson", h=1e-3).direction
        want = differentiate(src, 1.0, method="analytic").direction
        assert np.allclose(got, want, atol=1e-5)

    def test_bad_method_and_step_rejected(self):
        with pytest.raises(ValueError):
            differentiate(qubit_arc(), 0.0, method="nope")
        with pytest.raises(ValueError):
            differentiate(qubit_arc(), 0.0, method="central_fd", h=0.0)


class TestProductTangent:
    def test_two_real_qubits_give_bell_combination(self):
        traj = ProductTrajectory((qubit_arc(), qubit_arc()))
        for theta in np.linspace(0, math.pi, 13):
            tv = product_tangent(traj, theta)
            got = tv.direction / np.linalg.norm(tv.direction)
            c, s = math.cos(theta), math.sin(theta)
            psi_plus = np.array([0, 1, 1, 0]) / math.sqrt(2)
            phi_minus = np.array([1, 0, 0, -1]) / math.sqrt(2)
            assert np.allclose(got, c * psi_plus - s * phi_minus, atol=1e-10)

    def test_direction_matches_state_map_fd_oracle(self):
        rng = np.random.default_rng(2)
        curves = (
            BlochCurve([0.3, 0.8], [0.1, -0.4]),
            LocalHamiltonianCurve(SY / 2 + 0.2 * SX, Ket(np.array([0.6, 0.8j]), (2,))),
            PhaseCurve([0.0, 1.1], Ket(rng.standard_normal(3) + 0j, (3,), unit=False).normalized()),
        )
        traj = ProductTrajectory(curves)
        t = 0.9
        oracle = richardson_fd(lambda s: traj.state(s).amplitudes, t)
        assert np.allclose(product_tangent(traj, t).direction, oracle, atol=1e-10)

    def test_frozen_factor_contributes_nothing(self):
        traj = ProductTrajectory(
            (qubit_arc(), qubit_arc(), qubit_arc()), frozen=(False, False, True)
        )
        t = 0.7
        tv = product_tangent(traj, t)
        two = ProductTrajectory((qubit_arc(), qubit_arc()))
        inner_part = product_tangent(two, t).direction
        third = qubit_arc().state(t).amplitudes
        assert np.allclose(tv.direction, np.kron(inner_part, third), atol=1e-12)
        ket = tv.normalized_direction()
        assert entanglement_entropy(ket, Cut((0, 1), (2,))) == pytest.approx(0.0, abs=1e-10)

    def test_phase_only_motion_is_stationary(self):
        b1 = Ket(np.array([1.0, 0.0]), (2,))
        b2 = Ket(np.array([0.6, 0.8]), (2,))
        traj = ProductTrajectory((PhaseCurve([0.0, 0.4], b1), PhaseCurve([0.0, 1.1], b2)))
        tv = product_tangent(traj, 0.0)
        assert np.allclose(tv.direction, 1.5j * tv.base.amplitudes, atol=1e-13)


class TestHorizontalTangent:
    def test_projects_out_base_component(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            amps = rng.standard_normal(6) + 1j * rng.standard_normal(6)
            base = Ket(amps / np.linalg.norm(amps), (2, 3))
            direction = rng.standard_normal(6) + 1j * rng.standard_normal(6)
            out = horizontal_tangent(TangentVector(base, direction))
            assert abs(out.base_overlap()) < 1e-13

    def test_pure_gauge_becomes_zero(self):
        base = Ket(np.array([0.6, 0.8]), (2,))
        tv = TangentVector(base, 0.9j * base.amplitudes)
        assert np.linalg.norm(horizontal_tangent(tv).direction) < 1e-13

    def test_already_horizontal_unchanged(self):
        traj = ProductTrajectory((qubit_arc(), qubit_arc()))
        tv = product_tangent(traj, 0.4)
        out = horizontal_tangent(tv)
        assert np.allclose(out.direction, tv.direction, atol=1e-13)

    def test_gauge_covariance_of_entropy(self):
        traj = ProductTrajectory((qubit_arc(), qubit_arc()))
        modulated = ProductTrajectory(
            (with_global_phase(qubit_arc(), [0.3, 1.7]), qubit_arc())
        )
        cut = Cut.splitting((0,), 2)
        for t in (0.2, 0.9, 1.7):
            a = horizontal_tangent(product_tangent(traj, t))
            b = horizontal_tangent(product_tangent(modulated, t))
            ea = entanglement_entropy(a.normalized_direction(), cut)
            eb = entanglement_entropy(b.normalized_direction(), cut)
            assert ea == pytest.approx(eb, abs=1e-10)
            # directions agree up to the global phase exp(i phi(t))
            phase = np.exp(1j * (0.3 + 1.7 * t))
            assert np.allclose(b.direction, phase * a.direction, atol=1e-10)

    def test_zero_direction_cannot_normalize(self):
        base = Ket(np.array([1.0, 0.0]), (2,))
        with pytest.raises(DegenerateInputError):
            TangentVector(base, np.zeros(2, dtype=complex)).normalized_direction()


class TestRegister:
    def make_program(self):
        step1 = (
            UnitaryCurve.rotation(SY / 2),
            UnitaryCurve.rotation(SY / 2),
            UnitaryCurve.constant(np.eye(2)),
        )
        step2 = (
            UnitaryCurve.rotation(SX / 2),
            UnitaryCurve.rotation(SY / 2),
            UnitaryCurve.constant(np.diag([1.0, 1j])),
        )
        return RegisterProgram.uniform_superposition((step1, step2), 3)

    def test_initial_state_is_uniform(self):
        prog = self.make_program()
        assert np.allclose(prog.initial.amplitudes, np.full(8, 1 / math.sqrt(8)))

    def test_identity_steps_give_zero_tangent(self):
        steps = ((UnitaryCurve.constant(np.eye(2)),) * 2,)
        prog = RegisterProgram.uniform_superposition(steps, 2)
        tv = register_tangent(prog, 1, 0.5)
        assert np.linalg.norm(tv.direction) == 0.0

    def test_tangent_matches_fd_of_step_state(self):
        prog = self.make_program()
        for k in (1, 2):
            t = 0.6
            oracle = richardson_fd(lambda s: register_state(prog, k, s).amplitudes, t)
            got = register_tangent(prog, k, t)
            assert np.allclose(got.direction, oracle, atol=1e-9)
            assert np.allclose(got.base.amplitudes, register_state(prog, k, t).amplitudes)

    def test_constant_third_site_keeps_cut_unentangled(self):
        prog = self.make_program()
        cut = Cut((0, 1), (2,))
        for k, t in ((1, 0.3), (1, 0.9), (2, 0.2), (2, 0.8)):
            ket = register_tangent(prog, k, t).normalized_direction()
            assert entanglement_entropy(ket, cut) < 1e-10

    def test_two_site_rotation_entangles_tangent(self):
        steps = ((UnitaryCurve.rotation(SY / 2), UnitaryCurve.rotation(SY / 2)),)
        prog = RegisterProgram.uniform_superposition(steps, 2)
        ket = register_tangent(prog, 1, 0.7).normalized_direction()
        assert entanglement_entropy(ket, Cut.splitting((0,), 2)) > 0.5

    def test_step_index_validated(self):
        prog = self.make_program()
        with pytest.raises(ValueError):
            register_tangent(prog, 3, 0.0)

    def test_resolve_time_walks_steps(self):
        prog = self.make_program()
        assert prog.resolve_time(0.25) == (1, 0.25)
        assert prog.resolve_time(1.5) == (2, 0.5)
        assert prog.resolve_time(2.0) == (2, 1.0)

    def test_nonunitary_base_rejected(self):
        with pytest.raises(ValidationError):
            UnitaryCurve.constant(np.diag([1.0, 2.0]))


class TestPseudoPureDifferential:
    def arc_tangent(self, t):
        traj = ProductTrajectory((qubit_arc(), qubit_arc()))
        return product_tangent(traj, t)

    def test_trace_vanishes_for_norm_preserving_curve(self):
        tv = self.arc_tangent(0.0)
        drho = pseudo_pure_differential(tv.base, tv, 0.1)
        assert abs(drho.trace()) < 1e-12

    def test_partial_trace_is_scaled_factor_differential(self):
        t = 0.6
        tv = self.arc_tangent(t)
        eps = 0.1
        drho = pseudo_pure_differential(tv.base, tv, eps)
        reduced = partial_trace(drho, Cut.splitting((0,), 2), keep="left")
        factor = differentiate(qubit_arc(), t)
        expected = eps * projector_differential(factor).matrix
        assert np.allclose(reduced.matrix, expected, atol=1e-12)
        assert np.linalg.norm(reduced.matrix) == pytest.approx(eps / math.sqrt(2), abs=1e-12)

    def test_epsilon_one_matches_projector_fd_oracle(self):
        traj = ProductTrajectory((qubit_arc(), qubit_arc()))
        t = 0.8
        tv = product_tangent(traj, t)
        drho = pseudo_pure_differential(tv.base, tv, 1.0)
        oracle = richardson_fd(
            lambda s: np.outer(traj.state(s).amplitudes, traj.state(s).amplitudes.conj()), t
        )
        assert np.allclose(drho.matrix, oracle, atol=1e-12)

    def test_epsilon_range_enforced(self):
        tv = self.arc_tangent(0.0)
        for eps in (0.0, -0.2, 1.4):
            with pytest.raises(ValueError):
                pseudo_pure_differential(tv.base, tv, eps)

    def test_detached_tangent_rejected(self):
        tv = self.arc_tangent(0.0)
        other = Ket.basis((2, 2), (1, 1))
        with pytest.raises(ValueError):
            pseudo_pure_differential(other, tv, 0.5)


def rotating_pair():
    plus = Ket(np.array([1.0, 1.0]) / math.sqrt(2), (2,))
    minus = Ket(np.array([1.0, -1.0]) / math.sqrt(2), (2,))
    comp1 = ProductTrajectory((qubit_arc(), PhaseCurve(0.0, plus)), frozen=(False, True))
    comp2 = ProductTrajectory(
        (BlochCurve([math.pi, -1.0]), PhaseCurve(0.0, minus)), frozen=(False, True)
    )
    return Ensemble((0.5, 0.5), (comp1, comp2))


class TestSeparableMixedDifferential:
    def test_single_component_matches_projector_fd_oracle(self):
        comp = ProductTrajectory((qubit_arc(), BlochCurve([0.2, 0.7], [0.0, 0.3])))
        ens = Ensemble((1.0,), (comp,))
        t = 0.5
        drho = separable_mixed_differential(ens, t)
        oracle = richardson_fd(
            lambda s: np.outer(comp.state(s).amplitudes, comp.state(s).amplitudes.conj()), t
        )
        assert np.allclose(drho.matrix, oracle, atol=1e-12)

    def test_motionless_ensemble_gives_zero(self):
        a = PhaseCurve(0.0, Ket.basis((2,), (0,)))
        b = PhaseCurve(0.0, Ket(np.array([0.6, 0.8]), (2,)))
        ens = Ensemble((0.5, 0.5), (ProductTrajectory((a, b)), ProductTrajectory((b, a))))
        drho = separable_mixed_differential(ens, 0.3)
        assert np.linalg.norm(drho.matrix) < 1e-14

    def test_rotating_pair_reduced_norm(self):
        ens = rotating_pair()
        for t in (0.0, 0.4, 0.7):
            drho = separable_mixed_differential(ens, t)
            reduced = partial_trace(drho, Cut.splitting((0,), 2), keep="left")
            want = abs(math.cos(t)) / math.sqrt(2)
            assert np.linalg.norm(reduced.matrix) == pytest.approx(want, abs=1e-12)

    def test_trace_and_hermiticity(self):
        ens = rotating_pair()
        drho = separable_mixed_differential(ens, 0.3)
        assert abs(drho.trace()) < 1e-10
        assert np.max(np.abs(drho.matrix - drho.matrix.conj().T)) < 1e-12

    def test_weight_validation(self):
        comp = ProductTrajectory((qubit_arc(), qubit_arc()))
        with pytest.raises(ValueError):
            Ensemble((0.4, 0.4), (comp, comp))
        with pytest.raises(ValueError):
            Ensemble((1.2, -0.2), (comp, comp))

    def test_components_must_be_bipartite(self):
        comp = ProductTrajectory((qubit_arc(), qubit_arc(), qubit_arc()))
        with pytest.raises(ValueError):
            Ensemble((1.0,), (comp,))


class TestInfinitesimalComposition:
    def test_zero_generator_and_zero_time(self):
        assert np.allclose(infinitesimal_composition(np.zeros((2, 2)), 1.0, 7), np.eye(2))
        assert np.allclose(infinitesimal_composition(SY, 0.0, 7), np.eye(2))

    def test_converges_to_exponential_at_first_order(self):
        exact = propagator(SY, 1.0)
        dists = [
            np.linalg.norm(infinitesimal_composition(SY, 1.0, n) - exact, ord=2)
            for n in (64, 128, 256)
        ]
        assert dists[0] / dists[1] == pytest.approx(2.0, rel=0.15)
        assert dists[1] / dists[2] == pytest.approx(2.0, rel=0.15)

    def test_propagator_is_unitary_exponential(self):
        u = propagator(SY / 2, 1.2)
        assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12)
        expected = math.cos(0.6) * np.eye(2) - 1j * math.sin(0.6) * SY
        assert np.allclose(u, expected, atol=1e-12)


class TestCurveThrough:
    def test_reproduces_state_and_velocity(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            amps = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            state = Ket(amps / np.linalg.norm(amps), (3,))
            d = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            d -= np.vdot(state.amplitudes, d).real * state.amplitudes
            curve = curve_through(state, d)
            assert np.allclose(curve.state(0.0).amplitudes, state.amplitudes, atol=1e-12)
            assert np.allclose(differentiate(curve, 0.0).direction, d, atol=1e-10)

    def test_rejects_norm_breaking_direction(self):
        state = Ket.basis((2,), (0,))
        with pytest.raises(ValueError):
            curve_through(state, state.amplitudes * 0.3)
