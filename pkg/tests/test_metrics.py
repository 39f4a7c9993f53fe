"""Tests for distances, operator order and bounded-adversary distinguishing."""

import numpy as np
import pytest

from src.metrics import (
    AdversaryFamily,
    InvalidFamilyError,
    Strategy,
    StrategyKind,
    block_purified_distance,
    computational_distance,
    constant_family,
    enumerated_family,
    family_from_dict,
    fidelity,
    generalized_fidelity,
    named_family,
    operator_leq,
    purified_distance,
    trace_distance,
    unbounded_family,
)
from src.metrics.circuits import enumerate_circuits
from src.qcore.channels import apply_channel, dephasing_channel
from src.qcore.errors import DimensionMismatchError, SizeCapError
from src.qcore.states import (
    DensityOperator,
    basis_state,
    maximally_entangled,
    maximally_mixed,
    partial_trace,
    random_density,
    tensor,
)

PLUS = np.array([1, 1]) / np.sqrt(2)


class TestDistances:
    """Trace distance, fidelity and purified distance."""

    def test_trace_distance_mixed_vs_pure(self, qubit_pair):
        omega, zero = qubit_pair
        assert trace_distance(omega, zero) == pytest.approx(0.5)

    def test_trace_distance_orthogonal(self):
        assert trace_distance(basis_state(0, 2), basis_state(1, 2)) == pytest.approx(1.0)

    def test_fidelity_mixed_vs_pure(self, qubit_pair):
        omega, zero = qubit_pair
        assert fidelity(omega, zero) == pytest.approx(0.5)
        assert purified_distance(omega, zero) == pytest.approx(1 / np.sqrt(2))

    def test_generalized_fidelity_of_subnormalized_with_itself(self):
        half = DensityOperator.from_matrix(np.diag([0.5, 0.0]))
        assert generalized_fidelity(half, half) == pytest.approx(1.0)
        assert purified_distance(half, half) == pytest.approx(0.0, abs=1e-7)

    def test_purified_distance_bounds_trace_distance(self, rng):
        for _ in range(20):
            a = random_density((3,), rng)
            b = random_density((3,), rng)
            td = trace_distance(a, b)
            pd = purified_distance(a, b)
            assert td <= pd + 1e-9
            assert pd <= np.sqrt(2 * td) + 1e-9

    def test_block_purified_distance_matches_dense(self, rng):
        blocks_a = [0.5 * random_density((2,), rng).matrix, 0.5 * random_density((2,), rng).matrix]
        blocks_b = [0.3 * random_density((2,), rng).matrix, 0.7 * random_density((2,), rng).matrix]
        dense_a = np.zeros((4, 4), dtype=complex)
        dense_b = np.zeros((4, 4), dtype=complex)
        dense_a[:2, :2], dense_a[2:, 2:] = blocks_a
        dense_b[:2, :2], dense_b[2:, 2:] = blocks_b
        assert block_purified_distance(blocks_a, blocks_b) == pytest.approx(
            purified_distance(dense_a, dense_b), abs=1e-9
        )

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            trace_distance(maximally_mixed(2), maximally_mixed(3))


class TestOperatorOrder:
    """Operator inequalities and their eigenvalue certificates."""

    def test_bell_state_not_below_product(self):
        bell = maximally_entangled(2).density()
        product = tensor(maximally_mixed(2), maximally_mixed(2))
        check = operator_leq(bell, product)
        assert not check.holds
        # I/4 minus a rank-one projector
        assert check.min_eigenvalue == pytest.approx(-0.75)

    def test_bell_state_below_scaled_product(self):
        bell = maximally_entangled(2).density()
        scaled = 4 * tensor(maximally_mixed(2), maximally_mixed(2)).matrix
        assert operator_leq(bell, scaled)

    def test_pinching_inequality(self, rng):
        # ρ ≤ d · P(ρ) for the basis pinching P
        pinch = dephasing_channel(3)
        for _ in range(200):
            rho = random_density((3,), rng)
            pinched = apply_channel(pinch, rho)
            assert operator_leq(rho, 3 * pinched.matrix, tol=1e-9).holds

    def test_bipartite_pinching_bound(self, rng):
        # ρ_AB ≤ dim(B)² · ρ_A ⊗ ω_B
        for dims in [(2, 2)] * 100 + [(3, 2)] * 100:
            rho_ab = random_density(dims, rng)
            rho_a = partial_trace(rho_ab, [0])
            bound = dims[1] ** 2 * tensor(rho_a, maximally_mixed(dims[1])).matrix
            check = operator_leq(rho_ab, bound, tol=1e-9)
            assert check.holds
            assert check.min_eigenvalue >= -1e-9


class TestAdversaryFamilies:
    """Family construction and budgets."""

    def test_constants_always_present(self):
        family = AdversaryFamily(())
        names = {s.name for s in family.strategies}
        assert {"always-0", "always-1"} <= names

    def test_over_budget_rejected(self):
        expensive = Strategy("costly", StrategyKind.HELSTROM, 10)
        with pytest.raises(InvalidFamilyError):
            AdversaryFamily((expensive,), budget=5)

    def test_named_family_filters_by_budget(self):
        family = named_family(2, budget=4)
        names = {s.name for s in family.strategies}
        assert "basis" in names
        assert "helstrom" in names
        assert "pretty_good" not in names

    def test_unknown_named_strategy(self):
        with pytest.raises(InvalidFamilyError):
            named_family(2, include=("oracle",))

    def test_restrict(self):
        family = named_family(2)
        restricted = family.restrict(0)
        assert {s.name for s in restricted.strategies} == {"always-0", "always-1", "basis"}

    def test_family_from_dict(self):
        assert family_from_dict({"unbounded": True}, 2).unbounded
        constants = family_from_dict({"strategies": ["constants"], "budget": 0}, 2)
        assert len(constants) == 2
        named = family_from_dict({"strategies": ["basis"], "budget": 3}, 2)
        assert "basis" in {s.name for s in named.strategies}

    def test_enumeration_caps(self):
        with pytest.raises(SizeCapError):
            enumerate_circuits(4, 1)
        with pytest.raises(SizeCapError):
            enumerate_circuits(1, 7)

    def test_enumeration_dedupes_unitaries(self):
        circuits = enumerate_circuits(1, 2)
        # H·H = I is never listed twice
        assert "H0.H0" not in {c.name for c in circuits}
        assert circuits[0].gate_count == 0


class TestComputationalDistance:
    """Distances as seen by bounded families."""

    def test_basis_family_on_zero_vs_plus(self):
        zero = basis_state(0, 2)
        plus = DensityOperator.from_pure(PLUS)
        interval = computational_distance(zero, plus, named_family(2, include=("basis",)))
        assert interval.lower == pytest.approx(0.25)
        assert interval.upper == pytest.approx(np.sqrt(2) / 2)
        assert interval.best_strategy == "basis"

    def test_constant_family_sees_trace_difference(self):
        a = 0.75 * basis_state(0, 2).matrix
        b = 0.25 * basis_state(1, 2).matrix
        interval = computational_distance(a, b, constant_family())
        assert interval.lower == pytest.approx(0.25)

    def test_constant_family_blind_to_normalized_states(self, qubit_pair):
        omega, zero = qubit_pair
        assert computational_distance(omega, zero, constant_family()).lower == pytest.approx(0.0)

    def test_unbounded_family_is_trace_distance(self, rng):
        a = random_density((4,), rng)
        b = random_density((4,), rng)
        interval = computational_distance(a, b, unbounded_family())
        assert interval.lower == pytest.approx(trace_distance(a, b))
        assert interval.width == pytest.approx(0.0)

    def test_lower_never_exceeds_trace_distance(self, rng):
        family = named_family(2)
        for _ in range(20):
            a = random_density((2,), rng)
            b = random_density((2,), rng)
            interval = computational_distance(a, b, family)
            assert interval.lower <= interval.upper + 1e-12

    def test_enumerated_family_monotone_in_budget(self, rng):
        a = random_density((4,), rng)
        b = random_density((4,), rng)
        small = computational_distance(a, b, enumerated_family(2, 2))
        large = computational_distance(a, b, enumerated_family(2, 3))
        assert large.lower >= small.lower - 1e-12
        assert large.family_size > small.family_size

    def test_enumerated_family_restrict_matches_fresh(self, rng):
        a = random_density((2,), rng)
        b = random_density((2,), rng)
        restricted = enumerated_family(1, 3).restrict(2)
        fresh = enumerated_family(1, 2)
        assert computational_distance(a, b, restricted).lower == pytest.approx(
            computational_distance(a, b, fresh).lower
        )
