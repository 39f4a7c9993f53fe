"""Tests for the IP extractor, weak designs, composition and the reductions."""

import numpy as np
import pytest

from src.extractors import (
    DesignConstructionError,
    ExtractorSpec,
    WeakDesign,
    build_weak_design,
    composed_extractor_test,
    cyclic_design,
    distinguish_equals_predict,
    ext_compose,
    hybrid_locate_bit,
    ip,
    ip_extractor_test,
    ip_threshold,
    raz_seed_length,
    seed_union,
    verify_weak_design,
)
from src.metrics import named_family
from src.qcore.errors import DimensionMismatchError, SizeCapError
from src.qcore.states import (
    CqState,
    DensityOperator,
    basis_state,
    maximally_mixed,
    random_cq_state,
    uniform_cq_state,
)
from src.utils.helpers import Verdict, int_to_bits

TRIVIAL = DensityOperator(np.ones((1, 1)), (1,))


def point_mass(x):
    return CqState({tuple(x): 1.0}, {tuple(x): TRIVIAL}, len(x))


def bit_pair_state(rho0, rho1):
    return CqState({(0,): 0.5, (1,): 0.5}, {(0,): rho0, (1,): rho1}, 1)


class TestInnerProduct:
    """The IP function and its extractor test."""

    def test_zero_source(self):
        for y in range(16):
            assert ip((0, 0, 0, 0), int_to_bits(y, 4)) == 0

    def test_unit_seeds_select_bits(self):
        x = (1, 0, 1, 1)
        for i in range(4):
            e = tuple(1 if j == i else 0 for j in range(4))
            assert ip(x, e) == x[i]

    def test_all_ones(self):
        assert ip((1, 1, 1, 1), (1, 1, 1, 1)) == 0

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            ip((1, 0), (1, 0, 1))

    def test_threshold(self):
        assert ip_threshold(0.25) == pytest.approx(5.0)
        assert ip_threshold(1.0) == pytest.approx(1.0)

    def test_uniform_source_distance(self):
        # only the all-zero seed leaves the output bit constant
        report = ip_extractor_test(uniform_cq_state(4), 0.25)
        assert report.distance == pytest.approx(1 / 32)
        assert report.exact
        assert report.seeds_evaluated == 16

    def test_uniform_source_below_threshold_is_unmet(self):
        report = ip_extractor_test(uniform_cq_state(4), 0.25)
        assert not report.hypothesis_met
        assert report.verdict is Verdict.HYPOTHESIS_UNMET

    def test_uniform_source_above_threshold_passes(self):
        report = ip_extractor_test(uniform_cq_state(6), 0.25)
        assert report.hypothesis_met
        assert report.distance == pytest.approx(1 / 128)
        assert report.verdict is Verdict.PASS

    def test_random_quantum_sources_never_violate(self, rng):
        uniform = np.full(64, 1 / 64)
        for _ in range(20):
            report = ip_extractor_test(random_cq_state(6, (2,), rng, probs=uniform), 0.25)
            assert report.verdict is not Verdict.VIOLATION
            if report.hypothesis_met:
                assert report.distance <= 0.25 + 1e-9

    def test_point_mass(self):
        report = ip_extractor_test(point_mass((1, 0, 1)), 0.5)
        assert report.distance == pytest.approx(0.5)
        assert report.h_min == pytest.approx(0.0, abs=1e-9)
        assert report.verdict is Verdict.HYPOTHESIS_UNMET

    def test_two_point_source_at_threshold_boundary(self):
        probs = {(0, 1, 1): 0.5, (1, 1, 0): 0.5}
        state = CqState(probs, {x: TRIVIAL for x in probs}, 3)
        report = ip_extractor_test(state, 1.0)
        assert report.hypothesis_met
        assert report.verdict is Verdict.PASS

    def test_sampled_seeds(self, rng):
        report = ip_extractor_test(uniform_cq_state(5), 0.5, trials=40, rng=rng)
        assert not report.exact
        assert report.seeds_evaluated == 40
        assert 0.0 <= report.distance <= 0.5

    def test_family_interval_on_joint_state(self):
        report = ip_extractor_test(uniform_cq_state(2), 0.5, family=named_family(1))
        assert report.family_interval is not None
        assert report.family_interval.upper == pytest.approx(report.distance)
        assert report.family_interval.lower <= report.family_interval.upper + 1e-12

    def test_source_size_cap(self):
        with pytest.raises(SizeCapError):
            ip_extractor_test(point_mass((0,) * 13), 0.5)

    def test_copied_source_is_not_hidden(self):
        # X perfectly known to E: every nonzero seed gives a known bit
        state = CqState(
            {int_to_bits(i, 1): 0.5 for i in range(2)},
            {int_to_bits(i, 1): basis_state(i, 2) for i in range(2)},
            1,
        )
        report = ip_extractor_test(state, 0.5)
        assert report.distance == pytest.approx(0.5)


class TestWeakDesign:
    """Design construction and verification."""

    def test_seed_length(self):
        assert raz_seed_length(4, 8) == 120

    def test_built_design_is_valid(self):
        design = build_weak_design(4, 8, seed=3)
        assert design.d == 120
        assert design.m == 8
        assert all(len(s) == 4 for s in design.sets)
        assert verify_weak_design(design).valid

    def test_build_is_deterministic(self):
        assert build_weak_design(3, 5, seed=7).sets == build_weak_design(3, 5, seed=7).sets

    def test_cyclic_design_passes(self):
        design = cyclic_design(3, 4)
        assert design.d == 4
        assert verify_weak_design(design).valid

    def test_cyclic_design_rejects_large_t(self):
        with pytest.raises(DesignConstructionError):
            cyclic_design(5, 4)

    def test_overlap_violation_reported(self):
        design = WeakDesign(((0, 1), (0, 1)), 2, 1.0, 2)
        check = verify_weak_design(design)
        assert not check.valid
        assert check.worst_index == 1
        assert check.worst_sum == 4.0

    def test_wrong_set_size(self):
        design = WeakDesign(((0, 1), (2,)), 2, 1.0, 3)
        check = verify_weak_design(design)
        assert not check.valid
        assert check.worst_index == 1

    def test_set_outside_universe(self):
        design = WeakDesign(((0, 5),), 2, 1.0, 3)
        assert not verify_weak_design(design).valid

    def test_encoding(self):
        design = build_weak_design(2, 3)
        assert WeakDesign.from_dict(design.to_dict()) == design


class TestComposition:
    """m-bit extractor from IP and a design."""

    def test_constant_one_bit_extractor(self):
        design = WeakDesign(((0, 1), (2, 3)), 2, 1.0, 4)
        assert ext_compose((1, 1), (1, 0, 1, 1), design, one_bit=lambda x, y: 0) == (0, 0)

    def test_hand_expanded_ip(self):
        design = WeakDesign(((0, 1, 2, 3), (4, 5, 6, 7)), 4, 1.0, 8)
        x = (1, 0, 1, 1)
        y = (1, 1, 0, 1, 1, 0, 0, 0)
        # 1·1 ⊕ 0·1 ⊕ 1·0 ⊕ 1·1 = 0 and 1·1 ⊕ 0 ⊕ 0 ⊕ 0 = 1
        assert ext_compose(x, y, design) == (0, 1)

    def test_seed_length_checked(self):
        design = WeakDesign(((0, 1),), 2, 1.0, 2)
        with pytest.raises(DimensionMismatchError):
            ext_compose((1, 0), (1, 0, 1), design)

    def test_spec_checks_design(self):
        design = WeakDesign(((0, 1),), 2, 1.0, 2)
        with pytest.raises(DimensionMismatchError):
            ExtractorSpec(2, 2, 0.5, design)
        with pytest.raises(DimensionMismatchError):
            ExtractorSpec(3, 1, 0.5, design)

    def test_single_output_matches_ip_test(self, rng):
        state = random_cq_state(3, (2,), rng)
        spec = ExtractorSpec(3, 1, 0.5, WeakDesign(((0, 1, 2),), 3, 1.0, 3))
        composed = composed_extractor_test(spec, state)
        assert composed.distance == pytest.approx(ip_extractor_test(state, 0.5).distance, abs=1e-10)
        assert composed.seed_bits_used == 3

    def test_disjoint_design_uniform_source(self):
        # 16 seed pairs: 6 give independent bits, 9 give one repeated or constant bit, 1 gives 00
        spec = ExtractorSpec(2, 2, 1.0, WeakDesign(((0, 1), (2, 3)), 2, 1.0, 4))
        report = composed_extractor_test(spec, uniform_cq_state(2))
        assert report.distance == pytest.approx((9 * 0.5 + 0.75) / 16)
        assert report.verdict is Verdict.HYPOTHESIS_UNMET
        assert not report.hypothesis_met

    def test_unused_seed_bits_factor_out(self):
        design = WeakDesign(((0, 1), (3, 4)), 2, 1.0, 6)
        assert seed_union(design) == [0, 1, 3, 4]

    def test_seed_cap(self):
        spec = ExtractorSpec(4, 8, 0.5, build_weak_design(4, 8))
        with pytest.raises(SizeCapError):
            composed_extractor_test(spec, uniform_cq_state(4))

    def test_source_length_checked(self):
        spec = ExtractorSpec(2, 1, 0.5, WeakDesign(((0, 1),), 2, 1.0, 2))
        with pytest.raises(DimensionMismatchError):
            composed_extractor_test(spec, uniform_cq_state(3))


class TestReductions:
    """Distinguishing versus predicting, and the hybrid argument."""

    def test_identical_conditionals(self):
        interval, predictor = distinguish_equals_predict(bit_pair_state(maximally_mixed(2), maximally_mixed(2)))
        assert interval.upper == pytest.approx(0.0, abs=1e-12)
        assert predictor.success == pytest.approx(0.5)

    def test_orthogonal_conditionals(self):
        interval, predictor = distinguish_equals_predict(bit_pair_state(basis_state(0, 2), basis_state(1, 2)))
        assert interval.lower == pytest.approx(0.5)
        assert predictor.success == pytest.approx(1.0)

    def test_zero_plus_matches_helstrom(self):
        plus = DensityOperator.from_pure(np.array([1, 1]) / np.sqrt(2))
        interval, predictor = distinguish_equals_predict(bit_pair_state(basis_state(0, 2), plus))
        assert interval.lower == pytest.approx(np.sqrt(2) / 4)
        assert predictor.success == pytest.approx((2 + np.sqrt(2)) / 4)
        assert predictor.success == pytest.approx(0.5 + interval.lower)

    def test_bounded_family_predictor(self):
        plus = DensityOperator.from_pure(np.array([1, 1]) / np.sqrt(2))
        family = named_family(2, include=("basis",))
        interval, predictor = distinguish_equals_predict(bit_pair_state(basis_state(0, 2), plus), family)
        assert predictor.strategy == "basis"
        assert predictor.success >= 0.5 + interval.lower - 1e-12

    def test_predictor_success_matches_distance(self, rng):
        for _ in range(100):
            interval, predictor = distinguish_equals_predict(random_cq_state(1, (2,), rng))
            assert predictor.success == pytest.approx(0.5 + interval.lower, abs=1e-10)

    def test_requires_one_bit(self):
        with pytest.raises(DimensionMismatchError):
            distinguish_equals_predict(uniform_cq_state(2))

    def test_independent_bits_locate_nothing(self):
        assert hybrid_locate_bit(uniform_cq_state(3, maximally_mixed(2)), 1e-9) is None

    def test_copied_first_bit(self):
        probs = {int_to_bits(i, 2): 0.25 for i in range(4)}
        conds = {x: basis_state(x[0], 2) for x in probs}
        result = hybrid_locate_bit(CqState(probs, conds, 2), 0.1)
        assert result is not None
        assert result.index == 1
        assert result.gap == pytest.approx(0.5)
        assert result.gaps[1] == pytest.approx(0.0, abs=1e-12)

    def test_gap_at_least_average(self, rng):
        for m in (2, 3, 4):
            state = random_cq_state(m, (2,), rng)
            result = hybrid_locate_bit(state, 0.0)
            assert result is not None
            assert result.gap >= result.total_distance / m - 1e-9
