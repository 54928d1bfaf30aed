import math

import numpy as np
import pytest

from rrsp.efficiency import EfficiencyModel, ModeAmplitudes, balanced_amplitudes
from rrsp.statevector import (
    HeraldOutcome,
    JointState,
    TargetState,
    absorption_sign_correction,
    apply_controlled_phase,
    apply_corrections,
    apply_register_hadamards,
    initial_joint_state,
    run_absorption_oracle,
    run_ideal_protocol,
    run_reversed_protocol,
    sample_absorption_outcomes,
    state_fidelity,
)


def target_oracle(n, thetas):
    # amplitude of |v> assembled bit by bit, independent of mode_bits
    out = np.zeros(1 << n, dtype=complex)
    for v in range(1 << n):
        phase = sum(thetas[l] for l in range(n) if (v >> l) & 1)
        out[v] = np.exp(1j * phase)
    return out / np.sqrt(1 << n)


class TestTargetState:
    def test_statevector_matches_oracle(self):
        rng = np.random.default_rng(3)
        for n in (1, 2, 4):
            thetas = rng.uniform(0, 2 * math.pi, n)
            t = TargetState(n, thetas)
            np.testing.assert_allclose(t.statevector(), target_oracle(n, thetas), atol=1e-13)

    def test_validation(self):
        with pytest.raises(ValueError):
            TargetState(2, [0.1])
        with pytest.raises(ValueError):
            TargetState(0, [])


class TestJointState:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            JointState(1, np.ones((2, 2), dtype=complex))

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            JointState(2, np.eye(2, dtype=complex) / np.sqrt(2))

    def test_immutable(self):
        state = JointState(1, np.eye(2, dtype=complex) / np.sqrt(2))
        with pytest.raises(ValueError):
            state.amplitudes[0, 0] = 0.0


class TestControlledPhase:
    def test_single_qubit_interacting_branch_negated(self):
        # photon in bin 1 against qubit |1> flips sign; bin 0 never does
        amps = np.full((2, 2), 0.5, dtype=complex)
        out = apply_controlled_phase(JointState(1, amps)).amplitudes
        np.testing.assert_allclose(out, [[0.5, 0.5], [0.5, -0.5]], atol=1e-15)

    def test_two_qubit_sign_table_oracle(self):
        n = 2
        amps = np.full((4, 4), 0.25, dtype=complex)
        out = apply_controlled_phase(JointState(n, amps)).amplitudes
        for x in range(4):
            for v in range(4):
                sign = 1.0
                for l in range(n):
                    if (x >> l) & 1 and (v >> l) & 1:
                        sign = -sign
                assert out[x, v] == pytest.approx(0.25 * sign, abs=1e-15)

    def test_norm_preserved(self):
        rng = np.random.default_rng(11)
        raw = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        raw /= np.linalg.norm(raw)
        out = apply_controlled_phase(JointState(3, raw))
        assert np.linalg.norm(out.amplitudes) == pytest.approx(1.0, abs=1e-12)

    def test_involution(self):
        rng = np.random.default_rng(12)
        raw = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        raw /= np.linalg.norm(raw)
        state = JointState(2, raw)
        twice = apply_controlled_phase(apply_controlled_phase(state))
        np.testing.assert_allclose(twice.amplitudes, state.amplitudes, atol=1e-14)


class TestRegisterHadamards:
    def test_plus_state_collapses_to_zero(self):
        client = ModeAmplitudes(1, np.array([1.0, 1.0]) / math.sqrt(2))
        state = apply_register_hadamards(initial_joint_state(client))
        # H|+> = |0> on the register factor
        np.testing.assert_allclose(
            state.amplitudes, np.array([[1, 0], [1, 0]]) / math.sqrt(2), atol=1e-14
        )

    def test_norm_preserved(self):
        rng = np.random.default_rng(13)
        raw = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        raw /= np.linalg.norm(raw)
        out = apply_register_hadamards(JointState(3, raw))
        assert np.linalg.norm(out.amplitudes) == pytest.approx(1.0, abs=1e-12)


class TestIdealProtocol:
    def test_requires_lossless_model(self):
        lossy = EfficiencyModel(eta_t=0.9, eta_0=1.0, eta_1=1.0, eta_d=1.0, n=1)
        with pytest.raises(ValueError):
            run_ideal_protocol(lossy, TargetState(1, [0.0]))

    def test_requires_matching_sizes(self):
        with pytest.raises(ValueError):
            run_ideal_protocol(EfficiencyModel.lossless(2), TargetState(1, [0.0]))

    def test_port_probabilities_uniform(self):
        for n in (1, 2, 3):
            target = TargetState(n, np.linspace(0.3, 1.1, n))
            outcomes = run_ideal_protocol(EfficiencyModel.lossless(n), target)
            assert [o.port for o in outcomes] == list(range(1 << n))
            for o in outcomes:
                assert o.probability == pytest.approx(1.0 / (1 << n), abs=1e-12)

    def test_port_zero_no_phases_gives_plus_state(self):
        n = 3
        outcomes = run_ideal_protocol(EfficiencyModel.lossless(n), TargetState(n, np.zeros(n)))
        plus = np.full(1 << n, 1.0 / math.sqrt(1 << n))
        np.testing.assert_allclose(outcomes[0].register_state, plus, atol=1e-12)

    def test_single_qubit_port_zero_hand_value(self):
        # theta = pi/2 prepares (|0> + i|1>)/sqrt(2) directly on port 0
        outcomes = run_ideal_protocol(EfficiencyModel.lossless(1), TargetState(1, [math.pi / 2]))
        expected = np.array([1.0, 1.0j]) / math.sqrt(2)
        assert state_fidelity(outcomes[0].register_state, expected) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_corrections_reach_target_on_every_port(self):
        rng = np.random.default_rng(21)
        for n in (1, 2, 3, 4):
            for _ in range(5):
                target = TargetState(n, rng.uniform(0, 2 * math.pi, n))
                expected = target.statevector()
                for outcome in run_ideal_protocol(EfficiencyModel.lossless(n), target):
                    corrected = apply_corrections(outcome)
                    assert state_fidelity(corrected, expected) == pytest.approx(
                        1.0, abs=1e-9
                    )

    def test_six_qubit_spot_check(self):
        rng = np.random.default_rng(22)
        target = TargetState(6, rng.uniform(0, 2 * math.pi, 6))
        outcomes = run_ideal_protocol(EfficiencyModel.lossless(6), target)
        expected = target.statevector()
        for outcome in outcomes[::7]:
            assert state_fidelity(apply_corrections(outcome), expected) == pytest.approx(
                1.0, abs=1e-9
            )


class TestCorrections:
    def test_port_zero_is_identity(self):
        state = np.array([0.6, 0.8j])
        outcome = HeraldOutcome(0, state, 0.5)
        np.testing.assert_allclose(apply_corrections(outcome), state, atol=1e-15)

    def test_single_qubit_port_one_is_z_flip(self):
        # rotation angle -2*pi*1*1/2 = -pi multiplies |1> by -1
        outcome = HeraldOutcome(1, np.array([1.0, 1.0]) / math.sqrt(2), 0.5)
        np.testing.assert_allclose(
            apply_corrections(outcome), np.array([1.0, -1.0]) / math.sqrt(2), atol=1e-14
        )

    def test_corrections_are_diagonal_phases(self):
        rng = np.random.default_rng(5)
        raw = rng.normal(size=8) + 1j * rng.normal(size=8)
        raw /= np.linalg.norm(raw)
        corrected = apply_corrections(HeraldOutcome(5, raw, 0.125))
        np.testing.assert_allclose(np.abs(corrected), np.abs(raw), atol=1e-14)


class TestAbsorptionOracle:
    def test_all_zero_outcomes_uniform_state(self):
        n = 2
        state = run_absorption_oracle(TargetState(n, np.zeros(n)), np.zeros(4, dtype=int))
        np.testing.assert_allclose(state, np.full(4, 0.5), atol=1e-12)

    def test_two_bin_hand_trace(self):
        state = run_absorption_oracle(TargetState(1, [0.0]), np.array([0, 1]))
        np.testing.assert_allclose(state, np.array([1.0, -1.0]) / math.sqrt(2), atol=1e-12)
        fixed = absorption_sign_correction(state, np.array([0, 1]))
        np.testing.assert_allclose(fixed, np.array([1.0, 1.0]) / math.sqrt(2), atol=1e-12)

    def test_wrong_outcome_length(self):
        with pytest.raises(ValueError):
            run_absorption_oracle(TargetState(2, np.zeros(2)), np.zeros(3, dtype=int))

    def test_non_bit_outcomes(self):
        with pytest.raises(ValueError):
            run_absorption_oracle(TargetState(1, [0.0]), np.array([0, 2]))

    def test_matches_reflection_protocol(self):
        # same preparation through a completely different circuit
        rng = np.random.default_rng(31)
        for n in (1, 2, 3, 4, 5):
            for _ in range(4):
                thetas = rng.uniform(0, 2 * math.pi, n)
                outcomes_bits = rng.integers(0, 2, size=1 << n)
                target = TargetState(n, thetas)
                absorbed = run_absorption_oracle(target, outcomes_bits)
                fixed = absorption_sign_correction(absorbed, outcomes_bits)
                port0 = run_ideal_protocol(EfficiencyModel.lossless(n), target)[0]
                reference = apply_corrections(port0)
                assert state_fidelity(fixed, reference) == pytest.approx(1.0, abs=1e-9)

    def test_sampler_reproducible(self):
        a = sample_absorption_outcomes(3, seed=9)
        b = sample_absorption_outcomes(3, seed=9)
        np.testing.assert_array_equal(a, b)
        assert a.shape == (8,)
        assert set(np.unique(a)) <= {0, 1}


class TestReversedProtocol:
    def test_lossless_matches_forward_direction(self):
        rng = np.random.default_rng(41)
        for n in (1, 2, 3):
            target = TargetState(n, rng.uniform(0, 2 * math.pi, n))
            forward = run_ideal_protocol(EfficiencyModel.lossless(n), target)
            reverse = run_reversed_protocol(EfficiencyModel.lossless(n), target)
            for f, r in zip(forward, reverse):
                assert r.port == f.port
                assert r.probability == pytest.approx(f.probability, abs=1e-12)
                assert state_fidelity(r.register_state, f.register_state) == pytest.approx(
                    1.0, abs=1e-10
                )

    def test_lossless_total_probability_one(self):
        outcomes = run_reversed_protocol(EfficiencyModel.lossless(2), TargetState(2, np.zeros(2)))
        assert sum(o.probability for o in outcomes) == pytest.approx(1.0, abs=1e-12)

    def test_lossy_total_probability_is_balanced_success(self):
        from rrsp.efficiency import ideal_success_probability

        model = EfficiencyModel(eta_t=0.5, eta_0=0.9, eta_1=0.7, eta_d=0.8, n=3)
        target = TargetState(3, np.linspace(0.2, 1.4, 3))
        outcomes = run_reversed_protocol(model, target)
        total = sum(o.probability for o in outcomes)
        assert total == pytest.approx(ideal_success_probability(model), abs=1e-12)
        # balancing keeps every port equally likely
        probs = [o.probability for o in outcomes]
        assert max(probs) - min(probs) < 1e-12

    def test_lossy_heralded_states_still_exact(self):
        model = EfficiencyModel(eta_t=0.4, eta_0=0.95, eta_1=0.55, eta_d=0.9, n=2)
        target = TargetState(2, [0.7, 2.1])
        expected = target.statevector()
        for outcome in run_reversed_protocol(model, target):
            corrected = apply_corrections(outcome)
            assert state_fidelity(corrected, expected) == pytest.approx(1.0, abs=1e-9)
