"""Tests for predictor oracles and the reconstruction circuit."""

import numpy as np
import pytest

from src.qcore.errors import DimensionMismatchError, InvalidStateError
from src.qcore.states import PureVector
from src.reconstruct import (
    PredictorOracle,
    basis_side_info,
    build_reconstructor,
    make_biased_predictor,
    make_ideal_ip_predictor,
    reconstruction_sweep,
    run_reconstruction,
)

X_GATE = np.array([[0, 1], [1, 0]])


class TestOracles:
    """Ideal and biased inner-product predictors."""

    def test_ideal_flips_on_odd_inner_product(self):
        oracle = make_ideal_ip_predictor(1)
        np.testing.assert_allclose(oracle.blocks[1, 1], X_GATE)
        np.testing.assert_allclose(oracle.blocks[1, 0], np.eye(2))

    def test_ideal_zero_source_never_flips(self):
        oracle = make_ideal_ip_predictor(2)
        for y in range(4):
            np.testing.assert_allclose(oracle.blocks[0, y], np.eye(2))

    def test_ideal_is_unitary(self):
        oracle = make_ideal_ip_predictor(2)
        u = oracle.unitary()
        np.testing.assert_allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-10)

    def test_non_unitary_blocks_rejected(self):
        blocks = np.zeros((1, 2, 2, 2), dtype=complex)
        with pytest.raises(InvalidStateError):
            PredictorOracle(1, blocks, 1, 0)

    def test_block_shape_checked(self):
        with pytest.raises(InvalidStateError):
            PredictorOracle(2, np.zeros((4, 2, 2, 2)), 1, 0)

    def test_biased_half_matches_ideal_bias(self):
        oracle = make_biased_predictor(3, 0.5)
        for x in range(8):
            assert oracle.output_bias(x) == pytest.approx(1.0)

    def test_biased_zero_is_independent(self):
        oracle = make_biased_predictor(3, 0.0)
        for x in range(8):
            assert oracle.output_bias(x) == pytest.approx(0.5)

    def test_biased_quarter(self):
        oracle = make_biased_predictor(3, 0.25)
        for x in range(8):
            assert oracle.output_bias(x) == pytest.approx(0.75, abs=1e-9)

    def test_biased_epsilon_range(self):
        with pytest.raises(ValueError):
            make_biased_predictor(2, 0.6)
        with pytest.raises(ValueError):
            make_biased_predictor(2, -0.1)


class TestReconstructionCircuit:
    """Structure and exact simulation."""

    def test_gate_count(self):
        circuit = build_reconstructor(make_ideal_ip_predictor(3))
        s = circuit.oracle.declared_gate_cost
        assert circuit.gate_count == 2 * s + 2 * 4 + 2

    def test_middle_stage_is_phase_cnot(self):
        circuit = build_reconstructor(make_ideal_ip_predictor(2))
        assert circuit.stages[len(circuit.stages) // 2] == "phase-cnot"

    def test_circuit_is_unitary(self):
        u = build_reconstructor(make_ideal_ip_predictor(1)).to_matrix()
        np.testing.assert_allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-10)

    def test_biased_circuit_is_unitary(self):
        u = build_reconstructor(make_biased_predictor(1, 0.3)).to_matrix()
        np.testing.assert_allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-10)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_ideal_predictor_reconstructs_exactly(self, n):
        circuit = build_reconstructor(make_ideal_ip_predictor(n))
        for x in range(1 << n):
            assert run_reconstruction(circuit, x) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_biased_predictor_meets_bound(self, n):
        circuit = build_reconstructor(make_biased_predictor(n, 0.3))
        for x in range(1 << n):
            assert run_reconstruction(circuit, x) >= 4 * 0.3 ** 2 - 1e-6

    def test_zero_bias_probability_is_valid(self):
        circuit = build_reconstructor(make_biased_predictor(2, 0.0))
        for x in range(4):
            assert 0.0 <= run_reconstruction(circuit, x) <= 1.0 + 1e-12

    def test_outcome_distribution_normalized(self):
        circuit = build_reconstructor(make_biased_predictor(2, 0.2))
        dist = circuit.outcome_distribution(basis_side_info(3, 2))
        assert dist.shape == (2, 4)
        assert dist.sum() == pytest.approx(1.0)

    def test_x_range_checked(self):
        circuit = build_reconstructor(make_ideal_ip_predictor(2))
        with pytest.raises(DimensionMismatchError):
            run_reconstruction(circuit, 4)

    def test_side_dimension_checked(self):
        circuit = build_reconstructor(make_ideal_ip_predictor(2))
        with pytest.raises(DimensionMismatchError):
            run_reconstruction(circuit, 1, PureVector(np.array([1, 0], dtype=complex), (2,)))


class TestSweep:
    """Grid sweeps over (n, ε, x)."""

    def test_rows_sorted_and_complete(self):
        rows = reconstruction_sweep([3, 2], [0.4, 0.1], workers=3)
        assert len(rows) == 2 * (4 + 8)
        keys = [(r.n, r.epsilon, r.x) for r in rows]
        assert keys == sorted(keys)

    def test_all_cells_meet_bound(self):
        rows = reconstruction_sweep([2, 3], [0.1, 0.25, 0.5])
        assert all(r.meets_bound for r in rows)
        exact = [r for r in rows if r.epsilon == 0.5]
        assert all(r.success == pytest.approx(1.0, abs=1e-9) for r in exact)

    def test_selected_sources(self):
        rows = reconstruction_sweep([4], [0.3], xs=[0, 15])
        assert [r.x for r in rows] == [0, 15]
        assert rows[0].bound == pytest.approx(0.36)

    def test_worker_count_does_not_change_rows(self):
        one = reconstruction_sweep([2, 3], [0.2], workers=1)
        many = reconstruction_sweep([2, 3], [0.2], workers=4)
        assert [(r.x, r.success) for r in one] == [(r.x, r.success) for r in many]
