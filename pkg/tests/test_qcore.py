"""Tests for states, channels, measurements and their encodings."""

import numpy as np
import pytest

from src.qcore.channels import (
    ClassicallyControlledChannel,
    KrausChannel,
    apply_channel,
    basis_povm,
    cnot_copy_channel,
    dephasing_channel,
    depolarizing_channel,
    identity_channel,
    povm_guess_probability,
    random_channel,
    xor_branches,
)
from src.qcore.errors import DimensionMismatchError, InvalidStateError, SizeCapError
from src.qcore.measurements import helstrom_measurement, pretty_good_measurement
from src.qcore.serialization import channel_from_dict, channel_to_dict, cq_from_dict, cq_to_dict
from src.qcore.states import (
    CqState,
    DensityOperator,
    TraceNorm,
    basis_state,
    classical_copy_state,
    maximally_entangled,
    maximally_mixed,
    partial_trace,
    purify,
    random_cq_state,
    random_density,
    random_unitary,
    tensor,
    uniform_cq_state,
)


class TestDensityOperator:
    """Validation of density operators."""

    def test_rejects_non_hermitian(self):
        with pytest.raises(InvalidStateError):
            DensityOperator(np.array([[0.5, 0.5], [0.0, 0.5]]), (2,))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(InvalidStateError):
            DensityOperator(np.diag([1.5, -0.5]), (2,))

    def test_rejects_trace_above_one(self):
        with pytest.raises(InvalidStateError):
            DensityOperator.from_matrix(np.eye(2))

    def test_subnormalized_flag_inferred(self):
        rho = DensityOperator.from_matrix(np.diag([0.5, 0.0]))
        assert rho.trace_norm is TraceNorm.SUBNORMALIZED
        assert rho.trace == pytest.approx(0.5)

    def test_dims_must_match_matrix(self):
        with pytest.raises((DimensionMismatchError, InvalidStateError)):
            DensityOperator(np.eye(4) / 4, (2, 3))

    def test_matrix_is_read_only(self):
        rho = maximally_mixed(2)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 1.0

    def test_dimension_cap_from_environment(self, monkeypatch):
        monkeypatch.setenv("UNPLAB_MAX_DIM", "4")
        maximally_mixed(4)
        with pytest.raises(SizeCapError):
            maximally_mixed(8)

    def test_rank(self):
        assert basis_state(1, 3).rank() == 1
        assert maximally_mixed(3).rank() == 3


class TestStructuralOperations:
    """Partial trace, tensor products and purification."""

    def test_partial_trace_of_bell_state_is_maximally_mixed(self):
        bell = maximally_entangled(2).density()
        reduced = partial_trace(bell, [0])
        np.testing.assert_allclose(reduced.matrix, np.eye(2) / 2, atol=1e-12)

    def test_partial_trace_of_product(self, rng):
        a = random_density((2,), rng)
        b = random_density((3,), rng)
        joint = tensor(a, b)
        np.testing.assert_allclose(partial_trace(joint, [1]).matrix, b.matrix, atol=1e-12)
        np.testing.assert_allclose(partial_trace(joint, [0]).matrix, a.matrix, atol=1e-12)

    def test_purify_round_trip(self, rng):
        rho = random_density((3,), rng, rank=2)
        psi = purify(rho)
        assert psi.dims == (3, 2)
        back = partial_trace(psi.density(), [0])
        np.testing.assert_allclose(back.matrix, rho.matrix, atol=1e-9)

    def test_purify_rejects_subnormalized(self):
        with pytest.raises(InvalidStateError):
            purify(DensityOperator.from_matrix(np.diag([0.5, 0.0])))

    def test_random_unitary_is_unitary(self, rng):
        u = random_unitary(4, rng)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-10)


class TestCqState:
    """Classical-quantum states."""

    def test_symbol_length_checked(self):
        with pytest.raises(InvalidStateError):
            CqState({(0, 1): 1.0}, {(0, 1): maximally_mixed(2)}, 1)

    def test_mismatched_symbols_rejected(self):
        with pytest.raises(InvalidStateError):
            CqState({(0,): 1.0}, {(1,): maximally_mixed(2)}, 1)

    def test_joint_is_block_diagonal(self, qubit_pair):
        omega, zero = qubit_pair
        state = CqState({(0,): 0.5, (1,): 0.5}, {(0,): omega, (1,): zero}, 1)
        joint = state.joint()
        assert joint.dims == (2, 2)
        np.testing.assert_allclose(joint.matrix[:2, 2:], 0)
        np.testing.assert_allclose(joint.matrix[2:, 2:], 0.5 * zero.matrix)
        assert joint.trace == pytest.approx(1.0)

    def test_from_weighted_handles_zero_blocks(self):
        weighted = {(0,): np.diag([1.0, 0.0]), (1,): np.zeros((2, 2))}
        state = CqState.from_weighted(weighted, 1, (2,))
        assert state.probs[(1,)] == 0.0
        assert state.conditionals[(1,)].is_normalized

    def test_side_marginal_of_copy_state(self):
        state = classical_copy_state(2)
        np.testing.assert_allclose(state.side_marginal(), np.eye(4) / 4)

    def test_trace_side_keeps_probabilities(self, rng):
        state = random_cq_state(1, (2, 2), rng)
        reduced = state.trace_side([1])
        assert reduced.side_dims == (2,)
        assert reduced.probs == state.probs

    def test_uniform_state_trivial_side(self):
        state = uniform_cq_state(3)
        assert state.side_dim == 1
        assert state.total_probability == pytest.approx(1.0)


class TestChannels:
    """Kraus channels and classically controlled channels."""

    def test_non_trace_preserving_rejected(self):
        with pytest.raises(InvalidStateError):
            KrausChannel((np.diag([1.0, 0.5]),), (2,), (2,))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(DimensionMismatchError):
            KrausChannel((np.eye(3),), (2,), (2,))

    def test_full_depolarizing_gives_maximally_mixed(self, rng):
        rho = random_density((3,), rng)
        out = apply_channel(depolarizing_channel(3, 1.0), rho)
        np.testing.assert_allclose(out.matrix, np.eye(3) / 3, atol=1e-12)

    def test_dephasing_keeps_diagonal(self, rng):
        rho = random_density((2,), rng)
        out = apply_channel(dephasing_channel(2), rho)
        np.testing.assert_allclose(out.matrix, np.diag(np.diag(rho.matrix)), atol=1e-12)

    def test_channel_on_subsystem(self, rng):
        a = random_density((2,), rng)
        b = random_density((2,), rng)
        out = apply_channel(depolarizing_channel(2, 1.0), tensor(a, b), [1])
        np.testing.assert_allclose(out.matrix, np.kron(a.matrix, np.eye(2) / 2), atol=1e-12)

    def test_input_dims_checked(self, rng):
        with pytest.raises(DimensionMismatchError):
            apply_channel(identity_channel((3,)), random_density((2,), rng))

    def test_compose(self, rng):
        first = random_channel(2, 3, rng)
        second = random_channel(3, 2, rng)
        rho = random_density((2,), rng)
        direct = apply_channel(second, apply_channel(first, rho))
        composed = apply_channel(second.compose(first), rho)
        np.testing.assert_allclose(composed.matrix, direct.matrix, atol=1e-10)

    def test_cnot_copy_makes_copy_state(self):
        state = uniform_cq_state(1, basis_state(0, 2))
        control = ClassicallyControlledChannel(1, xor_branches(1, 1))
        copied = control.apply_to_cq(state)
        for x, rho in copied.conditionals.items():
            np.testing.assert_allclose(rho.matrix, basis_state(x[0], 2).matrix, atol=1e-12)

    def test_dense_form_agrees_with_branches(self, rng):
        state = random_cq_state(1, (2,), rng)
        control = ClassicallyControlledChannel(1, {(0,): depolarizing_channel(2, 0.3), (1,): dephasing_channel(2)})
        via_branches = control.apply_to_cq(state).joint()
        via_dense = apply_channel(control.to_kraus(), state.joint())
        np.testing.assert_allclose(via_dense.matrix, via_branches.matrix, atol=1e-10)

    def test_cnot_copy_channel_dims(self):
        phi = cnot_copy_channel(2)
        assert phi.in_dims == (4, 4)
        assert phi.d_out == 16

    def test_wrong_branch_count_rejected(self):
        with pytest.raises(DimensionMismatchError):
            ClassicallyControlledChannel(2, xor_branches(1, 1))


class TestMeasurements:
    """POVMs and named measurements."""

    def test_basis_povm_guesses_copy_state(self):
        state = classical_copy_state(2)
        from src.utils.helpers import int_to_bits

        povm = basis_povm(4, lambda z: int_to_bits(z, 2))
        assert povm_guess_probability(povm, state) == pytest.approx(1.0)

    def test_helstrom_success(self, qubit_pair):
        omega, zero = qubit_pair
        state = CqState({(0,): 0.5, (1,): 0.5}, {(0,): omega, (1,): zero}, 1)
        povm = helstrom_measurement(0.5 * omega.matrix, 0.5 * zero.matrix, outcomes=((0,), (1,)))
        assert povm_guess_probability(povm, state) == pytest.approx(0.75)

    def test_helstrom_zero_plus(self):
        zero = basis_state(0, 2)
        plus = DensityOperator.from_pure(np.array([1, 1]) / np.sqrt(2))
        state = CqState({(0,): 0.5, (1,): 0.5}, {(0,): zero, (1,): plus}, 1)
        povm = helstrom_measurement(0.5 * zero.matrix, 0.5 * plus.matrix, outcomes=((0,), (1,)))
        assert povm_guess_probability(povm, state) == pytest.approx((2 + np.sqrt(2)) / 4)

    def test_pretty_good_is_a_povm(self, rng):
        state = random_cq_state(2, (2,), rng)
        povm = pretty_good_measurement(state.weighted_blocks(), state.symbols)
        total = sum(povm.elements.values())
        np.testing.assert_allclose(total, np.eye(2), atol=1e-10)
        assert 0 <= povm_guess_probability(povm, state) <= 1 + 1e-10


class TestSerialization:
    """Encodings used in config and report files."""

    def test_cq_state_decode(self, rng):
        state = random_cq_state(2, (2,), rng)
        decoded = cq_from_dict(cq_to_dict(state))
        assert decoded.alphabet_bits == 2
        for x in state.symbols:
            assert decoded.probs[x] == pytest.approx(state.probs[x])
            np.testing.assert_allclose(decoded.conditionals[x].matrix, state.conditionals[x].matrix, atol=1e-12)

    def test_malformed_cq_state(self):
        with pytest.raises(InvalidStateError):
            cq_from_dict({"probs": {"0": 1.0}})

    def test_channel_decode(self):
        phi = depolarizing_channel(2, 0.5)
        decoded = channel_from_dict(channel_to_dict(phi))
        assert decoded.in_dims == (2,)
        np.testing.assert_allclose(decoded.apply_matrix(np.diag([1.0, 0.0])), np.diag([0.75, 0.25]), atol=1e-12)
