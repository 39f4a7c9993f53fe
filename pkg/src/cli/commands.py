"""Subcommand implementations.

Each command takes an ExperimentConfig and returns a CommandResult holding
the JSON report, an optional table for CSV output and the overall verdict.
Nothing in a report depends on wall-clock time, so identical configs give
identical bytes.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional, Sequence, TypeVar

import numpy as np

from ..config.settings import max_dimension
from ..constants import SOLVER
from ..entropy.chain import ChainRuleReport, verify_chain_rule
from ..entropy.guessing import guessing_probability, min_entropy
from ..entropy.smoothing import EntropyQuery, unpredictability_interval
from ..entropy.vonneumann import cmi, conditional_entropy
from ..extractors.composition import composed_extractor_test
from ..extractors.design import build_weak_design, cyclic_design, raz_seed_length, verify_weak_design
from ..extractors.inner_product import ip_extractor_test
from ..leakage.channels import (
    LeakageChannel,
    apply_leakage_cq,
    classical_bit_leak,
    cnot_copy_attack,
    cnot_copy_state,
    superdense_leak,
    superdense_state,
    validate_leakage_channel,
)
from ..leakage.degradation import measure_chain_degradation
from ..metrics.adversary import AdversaryFamily, family_from_dict, named_family
from ..metrics.distances import trace_distance
from ..protocols.alternating import CSV_HEADER, run_alternating
from ..protocols.checks import (
    check_entropy_track,
    check_extraction_quality,
    check_markov_preservation,
    cumulative_distance_bound,
)
from ..protocols.presets import build_extractor, config_from_dict
from ..qcore.errors import InvalidStateError, LabError
from ..qcore.states import CqState, random_cq_state
from ..reconstruct.circuit import reconstruction_sweep
from ..utils.exporter import flatten_report
from ..utils.helpers import Verdict, make_rng
from ..utils.logging import PerformanceLogger, get_logger
from .config import ConfigError, ExperimentConfig, read_config_file
from .states import build_state

logger = get_logger("cli.commands")

T = TypeVar("T")

FIELD_HEADER = ("field", "value")


@dataclass
class CommandResult:
    """Report payload, CSV table and verdict of one subcommand run."""

    report: dict[str, Any]
    verdict: Verdict
    header: Sequence[str] = FIELD_HEADER
    rows: Optional[list[list[Any]]] = None

    def table(self) -> tuple[Sequence[str], list[list[Any]]]:
        if self.rows is None:
            return FIELD_HEADER, flatten_report(self.report)
        return self.header, self.rows

    @property
    def exit_code(self) -> int:
        return self.verdict.exit_code


def _int(params: dict[str, Any], key: str, default: int) -> int:
    try:
        return int(params.get(key, default))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"'{key}' must be an integer: {e}") from e


def _float(params: dict[str, Any], key: str, default: float) -> float:
    try:
        return float(params.get(key, default))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"'{key}' must be a number: {e}") from e


def _fan_out(count: int, seed: int, workers: int, task: Callable[[int, np.random.Generator], T]) -> list[T]:
    """Run task(i, rng_i) for i < count on a thread pool; results in index order.

    Every instance gets its own generator spawned from the run seed, so the
    output does not depend on scheduling.
    """
    streams = np.random.SeedSequence(seed).spawn(count)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [pool.submit(task, i, np.random.default_rng(streams[i])) for i in range(count)]
        return [f.result() for f in futures]


def _family(params: dict[str, Any], side_dim: int) -> AdversaryFamily:
    data = params.get("family")
    if data is None:
        return named_family(side_dim)
    if not isinstance(data, dict):
        raise ConfigError("'family' must be a mapping")
    try:
        return family_from_dict(data, side_dim)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"invalid adversary family: {e}") from e


# =============================================================================
# entropy
# =============================================================================

def cmd_entropy(config: ExperimentConfig) -> CommandResult:
    """Min-entropy with certificate, the unpredictability interval and optional CMI."""
    params = config.params
    tol = config.tolerance
    state = build_state(params.get("state", "helstrom"), make_rng(config.seed))
    budget = params.get("budget")
    try:
        query = EntropyQuery(state, _float(params, "epsilon", 0.0), None if budget is None else int(budget))
    except (InvalidStateError, TypeError, ValueError) as e:
        raise ConfigError(f"invalid entropy query: {e}") from e

    cert = guessing_probability(state)
    feasibility = cert.dual_feasibility(state.weighted_blocks())
    interval = unpredictability_interval(query, _family(params, state.side_dim))

    report: dict[str, Any] = {
        "state": {"alphabet_bits": state.alphabet_bits, "side_dims": list(state.side_dims)},
        "epsilon": query.epsilon,
        "budget": query.budget,
        "guessing_probability": cert.value,
        "h_min": cert.min_entropy,
        "h_min_certified": cert.certified_min_entropy,
        "certificate": {
            "method": cert.method,
            "gap": cert.gap,
            "dual_feasibility": feasibility,
            "converged": cert.converged,
            "iterations": cert.iterations,
        },
        "interval": {
            "lower": interval.lower,
            "upper": interval.upper,
            "best_strategy": interval.best_strategy,
            "family_complete": interval.family_complete,
            "cap": interval.cap,
        },
    }

    if state.alphabet_bits == 1 and len(state.conditionals) == 2:
        rho0, rho1 = (state.conditionals[x] for x in sorted(state.conditionals))
        report["conditional_distance"] = trace_distance(rho0, rho1)

    if (1 << state.alphabet_bits) * state.side_dim <= max_dimension():
        joint = state.joint()
        side = list(range(1, len(joint.dims)))
        report["h_conditional"] = conditional_entropy(joint, side)
        request = params.get("cmi")
        if request is not None:
            try:
                report["cmi"] = cmi(joint, request["a"], request["b"], request.get("c", []))
            except (KeyError, TypeError) as e:
                raise ConfigError(f"'cmi' needs subsystem lists a, b and optional c: {e}") from e
    else:
        logger.info("Joint state exceeds the dimension cap; von Neumann quantities skipped")

    ok = (
        feasibility >= -SOLVER.DUAL_FEASIBILITY
        and cert.gap <= max(tol, SOLVER.GAP)
        and interval.upper >= interval.lower - tol
        and cert.certified_min_entropy <= cert.min_entropy + tol
    )
    verdict = Verdict.PASS if ok else Verdict.VIOLATION
    report["verdict"] = verdict.value
    return CommandResult(report, verdict)


# =============================================================================
# extract
# =============================================================================

EXTRACT_HEADER = ("index", "distance", "h_min", "threshold", "hypothesis_met", "verdict")


def cmd_extract(config: ExperimentConfig) -> CommandResult:
    """IP or composed extractor test on one or more seeded sources."""
    params = config.params
    kind = params.get("extractor", "ip")
    if kind not in ("ip", "composed"):
        raise ConfigError(f"extractor must be 'ip' or 'composed', got '{kind}'")
    count = _int(params, "count", 1)
    if count < 1:
        raise ConfigError(f"count must be >= 1, got {count}")
    eps_ext = _float(params, "eps_ext", 0.25)
    if not 0 < eps_ext <= 1:
        raise ConfigError(f"eps_ext must be in (0, 1], got {eps_ext}")
    state_spec = params.get("state", {"kind": "random", "n": 4, "side_dims": [2], "uniform": True})
    trials = params.get("trials")

    def run(i: int, rng: np.random.Generator):
        state = build_state(state_spec, rng)
        if kind == "ip":
            family = None
            if "family" in params:
                family = _family(params, 2 * (1 << state.alphabet_bits) * state.side_dim)
            return ip_extractor_test(state, eps_ext, family, None if trials is None else int(trials), rng)
        spec = build_extractor(
            state.alphabet_bits,
            {"m": params.get("m", 1), "eps_ext": eps_ext, "design": params.get("design", "weak")},
            config.seed,
        )
        return composed_extractor_test(spec, state, _float(params, "smoothing", 0.0))

    with PerformanceLogger(logger, f"{kind} extractor test on {count} sources"):
        reports = _fan_out(count, config.seed, _int(params, "workers", 4), run)

    rows = []
    for i, rep in enumerate(reports):
        threshold = rep.threshold if kind == "ip" else rep.spec.k_ext
        rows.append([i, rep.distance, rep.h_min, threshold, rep.hypothesis_met, rep.verdict])
    verdict = Verdict.worst([rep.verdict for rep in reports])
    met = sum(1 for rep in reports if rep.hypothesis_met)
    logger.info(f"{met}/{count} sources met the entropy hypothesis; verdict {verdict.value}")

    report = {
        "extractor": kind,
        "eps_ext": eps_ext,
        "count": count,
        "hypotheses_met": met,
        "max_distance": max(rep.distance for rep in reports),
        "results": [rep.to_dict() for rep in reports],
        "verdict": verdict.value,
    }
    return CommandResult(report, verdict, EXTRACT_HEADER, rows)


# =============================================================================
# design
# =============================================================================

DESIGN_HEADER = ("index", "set", "overlap_sum")


def cmd_design(config: ExperimentConfig) -> CommandResult:
    """Build a weak design, run the independent verifier and compare d with the formula."""
    params = config.params
    t, m = _int(params, "t", 4), _int(params, "m", 8)
    if t < 1 or m < 1:
        raise ConfigError(f"t and m must be >= 1, got t={t}, m={m}")
    kind = params.get("kind", "weak")
    if kind == "weak":
        design = build_weak_design(t, m, seed=config.seed, restarts=_int(params, "restarts", 8))
    elif kind == "cyclic":
        design = cyclic_design(t, m)
    else:
        raise ConfigError(f"design kind must be 'weak' or 'cyclic', got '{kind}'")

    check = verify_weak_design(design)
    expected = raz_seed_length(t, m)
    ok = check.valid and (kind != "weak" or design.d == expected)
    verdict = Verdict.PASS if ok else Verdict.VIOLATION
    if not ok:
        logger.warning(f"Design failed: {check.message or f'd = {design.d}, expected {expected}'}")

    as_sets = [set(s) for s in design.sets]
    rows = [
        [i, " ".join(str(k) for k in s), sum(2 ** len(as_sets[i] & as_sets[j]) for j in range(i))]
        for i, s in enumerate(design.sets)
    ]
    report = {
        "kind": kind,
        "design": design.to_dict(),
        "expected_d": expected,
        "check": {
            "valid": check.valid,
            "worst_index": check.worst_index,
            "worst_sum": check.worst_sum,
            "bound": check.bound,
            "message": check.message,
        },
        "verdict": verdict.value,
    }
    return CommandResult(report, verdict, DESIGN_HEADER, rows)


# =============================================================================
# reconstruct
# =============================================================================

RECONSTRUCT_HEADER = ("n", "epsilon", "x", "success", "bound", "gate_count", "meets_bound")


def cmd_reconstruct(config: ExperimentConfig) -> CommandResult:
    """Success probability over an (n, ε, x) grid; ε = 1/2 runs the ideal predictor."""
    params = config.params
    try:
        ns = [int(n) for n in params.get("ns", [2, 3, 4])]
        epsilons = [float(e) for e in params.get("epsilons", [0.1, 0.2, 0.3, 0.4, 0.5])]
        xs = params.get("xs")
        xs = None if xs is None else [int(x) for x in xs]
    except (TypeError, ValueError) as e:
        raise ConfigError(f"reconstruction grid must be lists of numbers: {e}") from e
    if any(n < 1 for n in ns):
        raise ConfigError(f"every n must be >= 1, got {ns}")
    if any(not 0 < e <= 0.5 for e in epsilons):
        raise ConfigError(f"every epsilon must be in (0, 1/2], got {epsilons}")

    rows = reconstruction_sweep(ns, epsilons, xs, workers=_int(params, "workers", 4))
    short = [r for r in rows if not r.meets_bound]
    verdict = Verdict.VIOLATION if short else Verdict.PASS
    table = [[r.n, r.epsilon, r.x, r.success, r.bound, r.gate_count, r.meets_bound] for r in rows]
    report = {
        "ns": ns,
        "epsilons": epsilons,
        "cells": len(rows),
        "below_bound": len(short),
        "min_margin": min((r.success - r.bound for r in rows), default=0.0),
        "rows": [dict(zip(RECONSTRUCT_HEADER, row)) for row in table],
        "verdict": verdict.value,
    }
    return CommandResult(report, verdict, RECONSTRUCT_HEADER, table)


# =============================================================================
# chain
# =============================================================================

CHAIN_SWEEP_HEADER = ("index", "h_xbc", "h_xb", "ell", "slack", "classical_slack", "holds")
CHAIN_SCENARIOS = ("superdense", "classical-leak", "cnot-attack", "random", "custom")


def _chain_holds(report: ChainRuleReport, tol: float) -> bool:
    ok = report.slack >= -tol
    if report.classical_slack is not None:
        ok = ok and report.classical_slack >= -tol
    if report.interval_consistent is not None:
        ok = ok and report.interval_consistent
    return ok


def _custom_channel(data: Any) -> LeakageChannel:
    if isinstance(data, dict) and "path" in data:
        data = read_config_file(Path(data["path"]))
    if not isinstance(data, dict):
        raise ConfigError("'channel' must be a mapping or {path: FILE}")
    try:
        return LeakageChannel.from_dict(data)
    except (LabError, KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"cannot decode leakage channel: {e}") from e


def _degradation_run(state: CqState, chan: LeakageChannel, params: dict[str, Any], tol: float) -> CommandResult:
    epsilon = _float(params, "epsilon", 0.0)
    budget = params.get("budget")
    deg = measure_chain_degradation(state, chan, epsilon, None if budget is None else int(budget))
    after = apply_leakage_cq(chan, state, validate=False)
    chain = verify_chain_rule(after, c_index=0, epsilon=epsilon)

    ok = deg.slack >= -tol and deg.data_processing_ok and deg.interval_consistent is not False
    ok = ok and _chain_holds(chain, tol)
    verdict = Verdict.PASS if ok else Verdict.VIOLATION
    report = {
        "channel": chan.name,
        "degradation": deg.to_dict(),
        "chain_rule": chain.to_dict(),
        "verdict": verdict.value,
    }
    return CommandResult(report, verdict)


def _cnot_attack_run(k: int) -> CommandResult:
    """The copy attack must be rejected; its entropy collapse is reported alongside."""
    state = cnot_copy_state(k)
    chan = cnot_copy_attack(k)
    validation = validate_leakage_channel(chan, state)
    after = apply_leakage_cq(chan, state, validate=False)
    h_before, h_after = min_entropy(state), min_entropy(after)
    rejected = not validation.valid
    if rejected:
        logger.info(f"Copy attack rejected on clause '{validation.failed_clause}'; H {h_before:.6f} -> {h_after:.6f}")
    else:
        logger.warning("Copy attack passed validation")
    verdict = Verdict.PASS if rejected else Verdict.VIOLATION
    report = {
        "channel": chan.name,
        "k": k,
        "h_before": h_before,
        "h_after": h_after,
        "rejected": rejected,
        "validation": validation.to_dict(),
        "verdict": verdict.value,
    }
    return CommandResult(report, verdict)


def _chain_sweep(config: ExperimentConfig) -> CommandResult:
    params = config.params
    count = _int(params, "count", 100)
    n, b_dim, c_dim = _int(params, "n", 1), _int(params, "b_dim", 2), _int(params, "c_dim", 2)
    if count < 1 or n < 1 or b_dim < 1 or c_dim < 1:
        raise ConfigError("count, n, b_dim and c_dim must all be >= 1")
    epsilon = _float(params, "epsilon", 0.0)

    def run(i: int, rng: np.random.Generator) -> ChainRuleReport:
        return verify_chain_rule(random_cq_state(n, (b_dim, c_dim), rng), epsilon=epsilon)

    with PerformanceLogger(logger, f"chain rule sweep ({count} states)"):
        reports = _fan_out(count, config.seed, _int(params, "workers", 4), run)

    failures = [i for i, rep in enumerate(reports) if not _chain_holds(rep, config.tolerance)]
    if failures:
        logger.warning(f"Chain rule failed on instances {failures}")
    verdict = Verdict.VIOLATION if failures else Verdict.PASS
    rows = [
        [i, r.h_xbc, r.h_xb, r.ell, r.slack, r.classical_slack, _chain_holds(r, config.tolerance)]
        for i, r in enumerate(reports)
    ]
    report = {
        "scenario": "random",
        "count": count,
        "dims": {"n": n, "b": b_dim, "c": c_dim},
        "min_slack": min(r.slack for r in reports),
        "failures": failures,
        "results": [rep.to_dict() for rep in reports],
        "verdict": verdict.value,
    }
    return CommandResult(report, verdict, CHAIN_SWEEP_HEADER, rows)


def cmd_chain(config: ExperimentConfig) -> CommandResult:
    """Chain-rule scenarios: tightness presets, the copy attack, random sweeps or a custom channel."""
    params = config.params
    scenario = params.get("scenario", "superdense")
    if scenario == "random":
        return _chain_sweep(config)
    if scenario == "cnot-attack":
        k = _int(params, "k", 6)
        if k < 1:
            raise ConfigError(f"k must be >= 1, got {k}")
        result = _cnot_attack_run(k)
    elif scenario == "superdense":
        result = _degradation_run(superdense_state(), superdense_leak(), params, config.tolerance)
    elif scenario == "classical-leak":
        state = superdense_state()
        chan = classical_bit_leak(state.alphabet_bits, state.side_dims, bits=_int(params, "bits", 1))
        result = _degradation_run(state, chan, params, config.tolerance)
    elif scenario == "custom":
        state = build_state(params.get("state"), make_rng(config.seed))
        result = _degradation_run(state, _custom_channel(params.get("channel")), params, config.tolerance)
    else:
        raise ConfigError(f"scenario must be one of {CHAIN_SCENARIOS}, got '{scenario}'")
    result.report = {"scenario": scenario, **result.report}
    return result


# =============================================================================
# ocl-sim
# =============================================================================

def cmd_ocl_sim(config: ExperimentConfig) -> CommandResult:
    """Run the alternating extraction protocol and every transcript check."""
    protocol = config_from_dict(config.params, seed=config.seed)
    transcript = run_alternating(protocol)

    markov = check_markov_preservation(transcript)
    extraction = [check_extraction_quality(transcript, i) for i in range(len(transcript.rounds))]
    cumulative = [cumulative_distance_bound(transcript, i) for i in range(1, len(transcript.rounds) + 1)]
    track = check_entropy_track(transcript)

    verdicts = [markov.verdict, track.verdict]
    verdicts += [c.verdict for c in extraction] + [c.verdict for c in cumulative]
    verdict = Verdict.worst(verdicts)
    logger.info(
        f"Protocol '{protocol.variant}' with {protocol.rounds} rounds: verdict {verdict.value} "
        f"(Markov {'kept' if markov.holds else 'broken'}, min entropy slack {track.min_slack:.6g})"
    )
    report = {
        "transcript": transcript.to_dict(),
        "checks": {
            "markov": markov.to_dict(),
            "extraction": [c.to_dict() for c in extraction],
            "cumulative": [c.to_dict() for c in cumulative],
            "entropy_track": track.to_dict(),
        },
        "verdict": verdict.value,
    }
    return CommandResult(report, verdict, CSV_HEADER, transcript.csv_rows())


COMMANDS: dict[str, Callable[[ExperimentConfig], CommandResult]] = {
    "entropy": cmd_entropy,
    "extract": cmd_extract,
    "design": cmd_design,
    "reconstruct": cmd_reconstruct,
    "chain": cmd_chain,
    "ocl-sim": cmd_ocl_sim,
}


def run_command(config: ExperimentConfig) -> CommandResult:
    with PerformanceLogger(logger, f"unplab {config.subcommand}"):
        return COMMANDS[config.subcommand](config)
