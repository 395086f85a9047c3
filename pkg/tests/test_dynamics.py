import numpy as np
import pytest

from sfqramp.dynamics import (
    error_budget,
    free_evolution,
    kick_unitary,
    leakage_closed,
    pauli_decompose,
    process_fidelity,
    project_computational,
    propagate,
    target_unitary,
    with_open_fidelity,
)
from sfqramp.schedule import Ramp, Schedule

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def rotation(axis, theta):
    return np.cos(theta / 2) * PAULI["I"] + 1j * np.sin(theta / 2) * PAULI[axis]


class TestKickUnitary:
    def test_zero_angle(self, model):
        u = kick_unitary(model, "inductive", 0.0)
        assert np.abs(u - np.eye(model.n_levels)).max() < 1e-12

    @pytest.mark.parametrize("coupling", ["inductive", "capacitive"])
    def test_unitary(self, model, coupling):
        u = kick_unitary(model, coupling, 0.4)
        assert np.abs(u @ u.conj().T - np.eye(model.n_levels)).max() < 1e-10

    def test_small_kick_approximates_x_rotation(self, model):
        theta = 0.15
        u = kick_unitary(model, "inductive", theta)
        block = project_computational(u)
        # |0> -> |1> transfer magnitude matches the ideal rotation up to the
        # leakage of a single kick
        leak = leakage_closed(block)
        assert leak < 5e-3
        assert abs(abs(block[1, 0]) - np.sin(theta / 2)) < np.sqrt(leak)

    def test_capacitive_block_is_y_rotation(self, model):
        theta = 0.03
        block = project_computational(kick_unitary(model, "capacitive", theta))
        ideal = rotation("Y", theta)
        assert np.abs(block - ideal).max() < np.sqrt(leakage_closed(block))

    def test_cached_per_model(self, model):
        a = kick_unitary(model, "inductive", 0.15)
        b = kick_unitary(model, "inductive", 0.15)
        assert a is b

    def test_rejects_negative_angle(self, model):
        with pytest.raises(ValueError):
            kick_unitary(model, "inductive", -0.1)


class TestFreeEvolution:
    def test_zero_time(self, model):
        assert np.abs(free_evolution(model, 0.0) - np.eye(model.n_levels)).max() == 0

    def test_one_period_closes_qubit(self, model):
        u = free_evolution(model, model.period)
        assert u[0, 0] == 1.0
        assert abs(u[1, 1] - 1.0) < 1e-12
        # leakage levels are generally not back in phase
        assert abs(u[2, 2] - 1.0) > 1e-3

    def test_half_period(self, model):
        u = free_evolution(model, model.period / 2)
        assert abs(u[1, 1] + 1.0) < 1e-12


class TestPropagate:
    def test_zero_kicks_is_identity(self, model):
        sched = Schedule(Ramp(1, ()), 0, "inductive", 0.15)
        block = project_computational(propagate(model, sched))
        assert np.abs(block - np.eye(2)).max() < 1e-12

    def test_unitarity_long_schedule(self, model, rng):
        times = tuple(np.sort(rng.uniform(0, 5 * model.period, size=6)))
        sched = Schedule(Ramp(5, times), 180, "capacitive", 0.03)
        u = propagate(model, sched)
        assert np.abs(u @ u.conj().T - np.eye(model.n_levels)).max() < 1e-9

    def test_naive_train_pi_gate(self, model):
        # kick count follows theta_targ/theta_kick; fidelity is poor without ramps
        sched = Schedule(Ramp(1, ()), 21, "inductive", 0.15)
        u_q = project_computational(propagate(model, sched))
        infid = 1.0 - process_fidelity(u_q, target_unitary("inductive", np.pi))
        assert 1e-3 < infid < 1e-1


class TestProjectAndTarget:
    def test_identity_block(self):
        assert np.array_equal(project_computational(np.eye(6)), np.eye(2))

    def test_block_diagonal(self):
        block = rotation("X", 0.7)
        full = np.eye(6, dtype=complex)
        full[:2, :2] = block
        assert np.abs(project_computational(full) - block).max() == 0

    def test_singular_values_bounded(self, model, rng):
        times = tuple(np.sort(rng.uniform(0, 2 * model.period, size=4)))
        u = propagate(model, Schedule(Ramp(2, times), 10, "inductive", 0.15))
        s = np.linalg.svd(project_computational(u), compute_uv=False)
        assert s.max() <= 1 + 1e-12

    def test_targets(self):
        assert np.abs(target_unitary("inductive", 0.0) - np.eye(2)).max() < 1e-15
        assert np.abs(target_unitary("inductive", np.pi) - 1j * PAULI["X"]).max() < 1e-15
        expected = (PAULI["I"] + 1j * PAULI["Y"]) / np.sqrt(2)
        assert np.abs(target_unitary("capacitive", np.pi / 2) - expected).max() < 1e-15


class TestProcessFidelity:
    def test_perfect_match(self):
        u = rotation("X", 1.1)
        assert process_fidelity(u, u) == pytest.approx(1.0)

    def test_global_phase_invariance(self):
        u = rotation("Y", 0.6)
        assert process_fidelity(np.exp(0.7j) * u, u) == pytest.approx(1.0)

    def test_known_half_fidelity(self):
        u_q = (PAULI["I"] - 1j * PAULI["X"]) / np.sqrt(2)
        assert process_fidelity(u_q, PAULI["X"]) == pytest.approx(0.5)


class TestLeakage:
    def test_unitary_has_none(self):
        assert abs(leakage_closed(rotation("Z", 0.3))) < 1e-14

    def test_zero_matrix(self):
        assert leakage_closed(np.zeros((2, 2))) == pytest.approx(1.0)

    def test_direct_formula(self):
        assert leakage_closed(np.diag([1.0, 0.9])) == pytest.approx(0.095)

    def test_matches_delta_parametrization(self, rng):
        # Eq.-level identity: 1 - Tr(U U^dag)/2 == 2 delta - delta^2
        for _ in range(50):
            raw = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            u_q = raw / max(1.0, np.linalg.svd(raw, compute_uv=False).max())
            d = pauli_decompose(u_q).delta
            assert abs(leakage_closed(u_q) - (2 * d - d**2)) < 1e-12


class TestPauliDecompose:
    def test_x_rotation(self):
        theta = 0.9
        dec = pauli_decompose(rotation("X", theta))
        assert dec.c_i == pytest.approx(np.cos(theta / 2))
        assert dec.c_x == pytest.approx(1j * np.sin(theta / 2))
        assert dec.delta == pytest.approx(0.0, abs=1e-14)
        assert abs(dec.c_x) == pytest.approx(np.sin(theta / 2))

    def test_pi_rotation_phase_convention(self):
        dec = pauli_decompose(rotation("X", np.pi))
        assert abs(dec.c_i) < 1e-14
        assert dec.c_x == pytest.approx(1j)

    def test_scalar_contraction(self):
        dec = pauli_decompose(0.8 * np.eye(2))
        assert dec.delta == pytest.approx(0.2)
        assert dec.c_i == pytest.approx(1.0)
        assert 2 * dec.delta - dec.delta**2 == pytest.approx(
            leakage_closed(0.8 * np.eye(2))
        )

    def test_unit_norm_property(self, rng):
        for _ in range(50):
            raw = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            dec = pauli_decompose(raw)
            total = sum(abs(c) ** 2 for c in (dec.c_i, dec.c_x, dec.c_y, dec.c_z))
            assert abs(total - 1.0) < 1e-12
            assert dec.c_i.real >= 0 and abs(dec.c_i.imag) < 1e-12

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            pauli_decompose(np.zeros((2, 2)))


class TestErrorBudget:
    @pytest.mark.parametrize("coupling,theta", [
        ("inductive", 0.4), ("inductive", np.pi), ("capacitive", 1.3),
        ("capacitive", np.pi), ("inductive", 2 * np.pi),
    ])
    def test_ideal_target_vanishes(self, coupling, theta):
        budget = error_budget(target_unitary(coupling, theta), coupling, theta)
        for name in ("infidelity_closed", "leakage", "phase_error",
                     "discretization_error", "unaccounted"):
            assert abs(getattr(budget, name)) < 1e-12

    def test_small_z_error(self):
        theta, eps = 1.1, 1e-3
        u_q = rotation("X", theta) @ rotation("Z", eps)
        budget = error_budget(u_q, "inductive", theta)
        # brute-force the Z coefficient of the phase-aligned decomposition
        overlap = np.trace(target_unitary("inductive", theta).conj().T @ u_q)
        aligned = u_q * np.conj(overlap / abs(overlap))
        c_z = 0.5 * np.trace(PAULI["Z"] @ aligned)
        assert budget.phase_error == pytest.approx(abs(c_z) ** 2, rel=1e-9)
        assert budget.phase_error == pytest.approx(
            np.sin(eps / 2) ** 2 * np.cos(theta / 2) ** 2, rel=1e-3
        )

    def test_scalar_contraction_budget(self):
        theta = 0.8
        budget = error_budget(0.99 * target_unitary("inductive", theta), "inductive", theta)
        assert budget.leakage == pytest.approx(1 - 0.99**2)
        assert abs(budget.phase_error) < 1e-14
        assert abs(budget.discretization_error) < 1e-14
        assert budget.infidelity_closed == pytest.approx(budget.leakage, abs=1e-12)

    def test_closure_exact(self, rng):
        for _ in range(20):
            raw = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            u_q = raw / max(1.0, np.linalg.svd(raw, compute_uv=False).max())
            budget = error_budget(u_q, "capacitive", 2.0)
            reconstructed = (budget.leakage + budget.phase_error
                             + budget.discretization_error + budget.unaccounted)
            assert budget.infidelity_closed == pytest.approx(reconstructed, abs=1e-12)

    def test_overrotation_continuous_at_pi(self):
        # slight overshoot past pi must not blow up the discretization term
        for eps in (1e-4, -1e-4):
            u_q = rotation("X", np.pi + eps)
            budget = error_budget(u_q, "inductive", np.pi)
            assert budget.discretization_error < 1e-6

    def test_open_fields(self):
        budget = error_budget(target_unitary("inductive", 1.0), "inductive", 1.0)
        assert budget.infidelity_open is None and budget.incoherent is None
        updated = with_open_fidelity(budget, 0.9995)
        assert updated.infidelity_open == pytest.approx(5e-4, rel=1e-9)
        assert updated.incoherent == pytest.approx(1.0 - budget.infidelity_closed - 0.9995)
