"""Tests for leakage channels, their validation, dilation and entropy degradation."""

import numpy as np
import pytest

from src.entropy import min_entropy
from src.leakage import (
    LeakageChannel,
    LeakageValidationError,
    append_zero,
    apply_leakage,
    apply_leakage_cq,
    classical_bit_leak,
    cnot_copy_attack,
    cnot_copy_state,
    dense_bit_copy,
    dilation_round_trip,
    measure_chain_degradation,
    random_leakage_channel,
    stinespring_dilate,
    superdense_leak,
    superdense_state,
    validate_leakage_channel,
)
from src.leakage.degradation import shifted_budget
from src.metrics.adversary import enumerated_family
from src.qcore.channels import dephasing_channel, depolarizing_channel, identity_channel, unitary_channel
from src.qcore.errors import DimensionMismatchError
from src.qcore.states import random_cq_state, random_density, random_unitary, uniform_cq_state
from src.utils.helpers import Verdict


class TestValidation:
    """Each defining clause of a leakage channel."""

    def test_append_zero_is_valid(self, rng):
        state = random_cq_state(1, (2,), rng)
        report = validate_leakage_channel(append_zero(1, (2,)), state)
        assert report.valid
        assert report.residual == pytest.approx(0.0, abs=1e-12)
        assert all(report.clauses.values())

    def test_dense_bit_copy_is_valid(self, rng):
        state = random_cq_state(1, (2,), rng)
        assert validate_leakage_channel(dense_bit_copy((2,)), state).valid

    def test_cnot_copy_into_e_fails_marginal_clause(self):
        report = validate_leakage_channel(cnot_copy_attack(1), cnot_copy_state(1))
        assert not report.valid
        assert report.failed_clause == "marginal-invariant"
        assert report.clauses["leakage-bound"]
        with pytest.raises(LeakageValidationError) as excinfo:
            report.raise_if_invalid()
        assert excinfo.value.clause == "marginal-invariant"

    def test_leak_larger_than_declared(self):
        two_bits = classical_bit_leak(2, (2,), bits=2)
        understated = LeakageChannel(two_bits.pre_process, two_bits.leak_map, 1.0, 0)
        report = validate_leakage_channel(understated, superdense_state())
        assert report.failed_clause == "leakage-bound"
        assert report.residual == pytest.approx(1.0)

    def test_dimension_mismatch_reported(self, rng):
        state = random_cq_state(2, (3,), rng)
        report = validate_leakage_channel(superdense_leak(), state)
        assert report.failed_clause == "dimension"
        assert not any(report.clauses.values())

    def test_superdense_needs_mixed_side_information(self):
        state = uniform_cq_state(2, random_density((2,), np.random.default_rng(1)))
        report = validate_leakage_channel(superdense_leak(), state)
        assert report.failed_clause == "marginal-invariant"

    def test_random_leak_valid_by_construction(self, rng):
        for _ in range(5):
            state = random_cq_state(1, (2,), rng)
            chan = random_leakage_channel(state, rng)
            assert validate_leakage_channel(chan, state).valid

    def test_apply_rejects_invalid_channel(self):
        with pytest.raises(LeakageValidationError):
            apply_leakage_cq(cnot_copy_attack(2), cnot_copy_state(2))

    def test_negative_lambda(self):
        with pytest.raises(ValueError):
            LeakageChannel(identity_channel((2,)), superdense_leak().leak_map, -1.0)

    def test_encoding_preserves_behaviour(self):
        chan = superdense_leak()
        decoded = LeakageChannel.from_dict(chan.to_dict())
        assert decoded.lam == chan.lam
        assert decoded.l_dim == 2
        assert validate_leakage_channel(decoded, superdense_state()).valid


class TestApplyLeakage:
    """Composition φ = Λ ∘ ψ."""

    def test_zero_lambda_leaves_state(self, rng):
        state = random_cq_state(1, (2,), rng)
        after = apply_leakage_cq(append_zero(1, (2,)), state)
        assert after.side_dims == (1, 2)
        for x in state.symbols:
            np.testing.assert_allclose(after.conditionals[x].matrix, state.conditionals[x].matrix, atol=1e-12)

    def test_dense_output_order(self):
        rho = apply_leakage(superdense_leak(), superdense_state())
        assert rho.dims == (4, 2, 2)
        assert rho.trace == pytest.approx(1.0)

    def test_dense_and_controlled_agree(self, rng):
        state = random_cq_state(1, (2,), rng)
        dense = apply_leakage(dense_bit_copy((2,)), state)
        controlled = apply_leakage(classical_bit_leak(1, (2,)), state)
        np.testing.assert_allclose(dense.matrix, controlled.matrix, atol=1e-12)

    def test_classical_copy_drops_one_bit(self):
        after = apply_leakage_cq(classical_bit_leak(2, (2,)), superdense_state())
        assert min_entropy(superdense_state()) - min_entropy(after) == pytest.approx(1.0, abs=1e-7)

    def test_cnot_attack_erases_six_bits(self):
        state = cnot_copy_state(6)
        assert min_entropy(state) == pytest.approx(6.0)
        after = apply_leakage_cq(cnot_copy_attack(6), state, validate=False)
        assert min_entropy(after) <= 1e-7

    def test_superdense_drops_two_bits(self):
        after = apply_leakage_cq(superdense_leak(), superdense_state())
        assert min_entropy(superdense_state()) - min_entropy(after) == pytest.approx(2.0, abs=1e-7)


class TestDilation:
    """Stinespring isometries."""

    def test_unitary_channel(self, rng):
        dilation = stinespring_dilate(unitary_channel(random_unitary(3, rng)))
        assert dilation.aux_dim == 1
        assert dilation.isometry_error <= 1e-10

    def test_depolarizing(self, rng):
        channel = depolarizing_channel(2, 1.0)
        dilation = stinespring_dilate(channel)
        assert dilation.aux_dim == 4
        assert dilation_round_trip(channel, dilation, rng) <= 1e-9

    def test_dephasing(self, rng):
        channel = dephasing_channel(2)
        dilation = stinespring_dilate(channel)
        assert dilation.aux_dim == 2
        assert dilation_round_trip(channel, dilation, rng) <= 1e-9

    def test_non_minimal_keeps_all_operators(self):
        channel = depolarizing_channel(2, 0.0)
        assert stinespring_dilate(channel, minimal=False).aux_dim == 4
        assert stinespring_dilate(channel).aux_dim == 1


class TestDegradation:
    """Entropy drop against the 2λ bound."""

    def test_identity_leak(self, rng):
        state = random_cq_state(1, (2,), rng)
        report = measure_chain_degradation(state, append_zero(1, (2,)))
        assert report.slack == pytest.approx(0.0, abs=1e-7)
        assert report.h_after == pytest.approx(report.h_before, abs=1e-7)
        assert report.verdict is Verdict.PASS

    def test_classical_leak_slack(self):
        report = measure_chain_degradation(superdense_state(), classical_bit_leak(2, (2,)))
        assert report.classical_leak
        assert report.slack == pytest.approx(1.0, abs=1e-7)
        assert report.classical_slack == pytest.approx(0.0, abs=1e-7)

    def test_superdense_is_tight(self):
        report = measure_chain_degradation(superdense_state(), superdense_leak())
        assert report.h_before == pytest.approx(2.0, abs=1e-7)
        assert report.h_after == pytest.approx(0.0, abs=1e-7)
        assert report.slack == pytest.approx(0.0, abs=1e-7)
        assert not report.classical_leak
        assert report.holds

    def test_invalid_channel_raises(self):
        with pytest.raises(LeakageValidationError):
            measure_chain_degradation(cnot_copy_state(2), cnot_copy_attack(2))

    def test_random_leaks_respect_bound(self, rng):
        for _ in range(10):
            state = random_cq_state(1, (2,), rng)
            report = measure_chain_degradation(state, random_leakage_channel(state, rng))
            assert report.holds
            assert report.data_processing_ok

    def test_budget_interval(self):
        report = measure_chain_degradation(superdense_state(), superdense_leak(), budget=2)
        assert report.shifted_budget == 2 * 2 + 2 + 5 + 0
        assert report.interval_after is not None
        assert report.interval_consistent

    def test_family_per_side(self):
        # the leak adds a qubit: one qubit before, two after
        report = measure_chain_degradation(
            superdense_state(),
            superdense_leak(),
            budget=2,
            family_before=enumerated_family(1, 2),
            family_after=enumerated_family(2, 2),
        )
        assert report.interval_before is not None
        assert report.interval_after is not None

    def test_family_for_wrong_side_rejected(self):
        with pytest.raises(DimensionMismatchError):
            measure_chain_degradation(
                superdense_state(), superdense_leak(), budget=2, family_after=enumerated_family(1, 2)
            )
        with pytest.raises(DimensionMismatchError):
            measure_chain_degradation(superdense_state(), superdense_leak(), family_before=enumerated_family(2, 2))

    def test_shifted_budget_unbounded(self):
        assert shifted_budget(None, 1.0, 0) is None
        assert shifted_budget(3, 1.0, None) is None
        assert shifted_budget(3, 1.5, 2) == 6 + 3 + 5 + 2

    def test_report_dict(self):
        data = measure_chain_degradation(superdense_state(), superdense_leak()).to_dict()
        assert data["verdict"] == "pass"
        assert data["validation"]["valid"]
