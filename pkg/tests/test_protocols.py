"""Tests for the alternating-extraction runner and its checks."""

import numpy as np
import pytest

from src.constants import CIRCUIT
from src.leakage import LeakageValidationError
from src.protocols import (
    CSV_HEADER,
    ClassicalRegisterEnsemble,
    ProtocolConfig,
    ProtocolConfigError,
    check_entropy_track,
    check_extraction_quality,
    check_markov_preservation,
    config_from_dict,
    cumulative_distance_bound,
    entropy_bound,
    independent_sources,
    preset_config,
    run_alternating,
    shared_copy_sources,
)
from src.protocols.alternating import chained_table
from src.protocols.presets import build_extractor
from src.utils.helpers import Verdict


def fresh_config(n=2, rounds=2, lam=1, **extra):
    data = {
        "variant": "fresh-seed",
        "rounds": rounds,
        "lambda": lam,
        "sources": {"kind": "independent", "n": n},
        "extractor": {"m": 1, "eps_ext": 1.0, "design": "weak"},
    }
    data.update(extra)
    return config_from_dict(data, seed=5)


class TestEnsemble:
    """Exact classical-register states."""

    def test_independent_sources(self):
        state = independent_sources(2)
        assert state.min_entropy("A") == pytest.approx(2.0, abs=1e-7)
        assert state.cmi("A", "B") == pytest.approx(0.0, abs=1e-9)

    def test_shared_copy_is_known_to_e(self):
        state = shared_copy_sources(2)
        assert state.min_entropy("A") == pytest.approx(0.0, abs=1e-7)
        assert state.cmi("A", "B") == pytest.approx(0.0, abs=1e-9)

    def test_appended_register_is_uniform(self):
        state = independent_sources(2).with_uniform("K", 3)
        assert state.uniformity_distance("K") == pytest.approx(0.0, abs=1e-12)

    def test_derived_register_is_determined(self):
        state = independent_sources(2).derive("C", 1, lambda v: v["A"] >> 1)
        assert state.min_entropy("C", given=["A"]) == pytest.approx(0.0, abs=1e-7)
        assert state.uniformity_distance("C") == pytest.approx(0.0, abs=1e-12)

    def test_key_outside_register_rejected(self):
        with pytest.raises(ValueError):
            ClassicalRegisterEnsemble(("A",), (1,), {(2,): np.ones((1, 1))}, (1,))


class TestConfiguration:
    """Configuration parsing and validation."""

    def test_unknown_preset(self):
        with pytest.raises(ProtocolConfigError):
            config_from_dict({"preset": "nope"})

    def test_negative_rounds(self):
        with pytest.raises(ProtocolConfigError):
            fresh_config(rounds=-1)

    def test_unknown_psi(self):
        with pytest.raises(ProtocolConfigError):
            fresh_config(psi="scramble")

    def test_leak_larger_than_source(self):
        with pytest.raises(ProtocolConfigError):
            fresh_config(n=2, lam=3)

    def test_chained_needs_square_extractor(self):
        # a weak design for one output bit uses more seed bits than it outputs
        with pytest.raises(ProtocolConfigError):
            fresh_config(variant="chained")

    def test_presets_build(self):
        for name in ("alternating-2round", "alternating-4round", "fresh-3round", "fresh-extract", "markov-break"):
            assert preset_config(name).rounds >= 1

    def test_correlated_sources_rejected_at_start(self):
        blocks = {(z, z): np.full((1, 1), 0.25) for z in range(4)}
        sources = ClassicalRegisterEnsemble(("A", "B"), (2, 2), blocks, (1,))
        config = ProtocolConfig(sources, 1, 1, build_extractor(2, {"m": 1}))
        with pytest.raises(ProtocolConfigError):
            run_alternating(config)


class TestEntropyBound:
    """Guaranteed per-source entropies."""

    def test_chained_start(self):
        assert entropy_bound("chained", "A", 0, 5.0, 1.0) == pytest.approx(5.0)
        assert entropy_bound("chained", "B", 0, 5.0, 1.0) == pytest.approx(3.0)

    def test_chained_after_one_round(self):
        assert entropy_bound("chained", "A", 1, 5.0, 1.0) == pytest.approx(1.0)
        assert entropy_bound("chained", "B", 1, 5.0, 1.0) == pytest.approx(3.0)

    def test_fresh_counts_active_rounds(self):
        assert entropy_bound("fresh-seed", "B", 1, 5.0, 1.0) == pytest.approx(3.0)
        assert entropy_bound("fresh-seed", "A", 1, 5.0, 1.0) == pytest.approx(5.0)
        assert entropy_bound("fresh-seed", "A", 2, 5.0, 1.0) == pytest.approx(3.0)


class TestAlternatingRun:
    """Rounds on exact states."""

    def test_zero_rounds(self):
        transcript = run_alternating(fresh_config(rounds=0))
        assert len(transcript.snapshots) == 1
        assert transcript.rounds == []
        assert transcript.csv_rows() == []
        assert transcript.snapshots[0].h_a == pytest.approx(2.0, abs=1e-7)

    def test_classical_leak_costs_one_bit_per_active_round(self):
        transcript = run_alternating(fresh_config())
        first, second = transcript.rounds
        assert (first.active, second.active) == ("B", "A")
        assert first.h_active_after == pytest.approx(1.0, abs=1e-7)
        assert first.passive_change == pytest.approx(0.0, abs=1e-7)
        assert first.leaked == pytest.approx(1.0)
        final = transcript.snapshots[-1]
        assert final.h_a == pytest.approx(1.0, abs=1e-7)
        assert final.h_b == pytest.approx(1.0, abs=1e-7)
        assert final.bound_a == pytest.approx(0.0)
        assert final.bound_b == pytest.approx(0.0)

    def test_entropy_track_holds(self):
        check = check_entropy_track(run_alternating(fresh_config(rounds=3)))
        assert check.holds
        assert check.verdict is Verdict.PASS
        assert check.passive_drops == ()

    def test_chained_entropy_track(self):
        transcript = run_alternating(preset_config("alternating-2round"))
        assert transcript.rounds[0].seed_distance == pytest.approx(0.0, abs=1e-12)
        check = check_entropy_track(transcript)
        assert check.holds
        assert check.worst_snapshot == 0
        assert check.min_slack == pytest.approx(0.0, abs=1e-7)

    def test_four_chained_rounds(self):
        transcript = run_alternating(preset_config("alternating-4round"))
        assert len(transcript.rounds) == 4
        assert check_entropy_track(transcript).min_slack >= -1e-7
        assert max(check_markov_preservation(transcript).values) <= 1e-8
        for i in range(1, 5):
            assert cumulative_distance_bound(transcript, i).within_bound

    def test_budget_schedule(self):
        transcript = run_alternating(preset_config("fresh-3round"))
        cost = 4 + CIRCUIT.LEAK_COST_PER_QUBIT
        assert [s.budget for s in transcript.snapshots] == [64 - i * cost for i in range(4)]
        assert all(rec.family_lower is not None for rec in transcript.rounds)
        for rec in transcript.rounds:
            assert rec.family_lower <= rec.extractor_distance + 1e-9

    def test_csv_rows_match_header(self):
        transcript = run_alternating(fresh_config())
        rows = transcript.csv_rows()
        assert len(rows) == 2
        assert all(len(row) == len(CSV_HEADER) for row in rows)

    def test_same_seed_same_transcript(self):
        one = run_alternating(preset_config("fresh-3round", seed=11))
        two = run_alternating(preset_config("fresh-3round", seed=11))
        assert one.csv_rows() == two.csv_rows()
        assert one.to_dict() == two.to_dict()


class TestPublishedSeeds:
    """Chained seeds join the adversary's knowledge once their round is over."""

    def test_published_registers(self):
        transcript = run_alternating(preset_config("alternating-2round"))
        assert transcript.published == [(), ("K0",), ("K0", "K1")]
        assert transcript.states[2].registers == ("A", "B", "K0", "K1")

    def test_entropy_conditioned_on_published_seeds(self):
        config = config_from_dict({"preset": "alternating-4round", "lambda": 0})
        transcript = run_alternating(config)
        table = chained_table(config.extractor)
        m = config.extractor.m

        replay = config.sources.with_uniform("K0", config.extractor.d)
        replay = replay.derive("K1", m, lambda v: int(table[v["K0"], v["B"]]))
        expected = replay.min_entropy("B", given=["K0", "K1"])

        assert transcript.rounds[2].active == "B"
        assert transcript.rounds[2].h_active_before == pytest.approx(expected, abs=1e-7)
        # K1 is a non-constant function of B for most K0
        assert expected < 2.0 - 1e-3
        assert transcript.snapshots[2].h_b == pytest.approx(expected, abs=1e-7)

    def test_seed_names_reserved(self):
        sources = independent_sources(2).with_uniform("K0", 1)
        with pytest.raises(ProtocolConfigError):
            ProtocolConfig(sources, 1, 0, build_extractor(2, {"m": 3, "design": "cyclic"}), variant="chained")


class TestMarkovPreservation:
    """A–E–B survives valid leakage and breaks under the CNOT copy."""

    def test_valid_leak_keeps_chain(self):
        check = check_markov_preservation(run_alternating(fresh_config(rounds=3)))
        assert check.holds
        assert check.first_violation is None
        assert max(check.values) <= 1e-8

    def test_cnot_copy_breaks_chain(self):
        transcript = run_alternating(preset_config("markov-break"))
        assert not transcript.rounds[0].validation.valid
        check = check_markov_preservation(transcript)
        assert check.first_violation == 1
        assert check.values[1] == pytest.approx(2.0, abs=1e-7)
        assert check.verdict is Verdict.VIOLATION

    def test_cnot_copy_refused_without_opt_in(self):
        config = config_from_dict({"preset": "markov-break", "allow_invalid": False})
        with pytest.raises(LeakageValidationError):
            run_alternating(config)


class TestExtractionChecks:
    """Per-round and cumulative output distances."""

    def test_unmet_hypothesis_reported(self):
        transcript = run_alternating(fresh_config())
        assert not transcript.rounds[0].hypothesis_met
        assert check_extraction_quality(transcript, 0).verdict is Verdict.HYPOTHESIS_UNMET

    def test_enough_entropy_passes(self):
        # five uniform bits reach the one-bit threshold at ε_ext = 1
        transcript = run_alternating(fresh_config(n=5, rounds=1, lam=0))
        check = check_extraction_quality(transcript, 0)
        assert check.hypothesis_met
        assert check.distance == pytest.approx(1 / 64)
        assert check.verdict is Verdict.PASS
        cumulative = cumulative_distance_bound(transcript, 1)
        assert cumulative.bound == pytest.approx(1.0)
        assert cumulative.verdict is Verdict.PASS

    def test_fresh_extract_meets_threshold(self):
        # ε_ext = 1/2 puts each bit at error 1/4, so k_ext = 1 + 4 + 1 + 2
        transcript = run_alternating(preset_config("fresh-extract"))
        assert transcript.k_ext == pytest.approx(8.0)
        for i, rec in enumerate(transcript.rounds):
            assert rec.h_active_before == pytest.approx(8.0, abs=1e-7)
            check = check_extraction_quality(transcript, i)
            assert check.hypothesis_met
            assert check.bound == pytest.approx(0.5)
            # only the all-zero seed fixes the inner product
            assert check.distance == pytest.approx(1 / 512)
            assert check.verdict is Verdict.PASS

    def test_fresh_extract_cumulative(self):
        transcript = run_alternating(preset_config("fresh-extract"))
        first = cumulative_distance_bound(transcript, 1)
        assert first.bound == pytest.approx(0.5)
        assert first.hypotheses_met
        assert first.measured <= first.bound
        assert first.verdict is Verdict.PASS
        both = cumulative_distance_bound(transcript, 2)
        assert both.bound == pytest.approx(1.0)
        assert both.verdict is Verdict.PASS

    def test_cumulative_at_start(self):
        check = cumulative_distance_bound(run_alternating(fresh_config()), 0)
        assert check.bound == 0.0
        assert check.measured == 0.0
        assert check.verdict is Verdict.PASS

    def test_round_range_checked(self):
        transcript = run_alternating(fresh_config())
        with pytest.raises(ValueError):
            check_extraction_quality(transcript, 2)
        with pytest.raises(ValueError):
            cumulative_distance_bound(transcript, 3)
