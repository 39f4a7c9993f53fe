"""Alternating extraction from two sources under per-round quantum leakage.

Round i uses T_i = B for even i and T_i = A for odd i. The chained variant
feeds each output back as the next seed, K_{i+1} = Ext(T_i, K_i), and
publishes K_i once round i is over: it stays in the state as register
``K<i>`` and every later entropy is conditioned on it. The fresh-seed variant draws an
independent public seed every round. In both, the adversary applies ψ to
E (simulated by its dilation, the purifying system joining R) and then a
leak controlled by T_i writes λ qubits into a new part of E.
"""

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from scipy.linalg import block_diag

from ..config.settings import max_dimension
from ..constants import CIRCUIT, TOLERANCE
from ..extractors.composition import (
    ExtractorSpec,
    iter_seeded_outputs,
    output_table,
    seed_union,
    seeded_output_distance,
)
from ..leakage.channels import LeakageChannel, LeakageValidationError, ValidationReport, validate_leakage_channel
from ..leakage.dilation import stinespring_dilate
from ..metrics.adversary import named_family
from ..metrics.computational import computational_distance
from ..qcore.channels import identity_channel
from ..utils.helpers import bits_to_int, int_to_bits, make_rng
from ..utils.logging import PerformanceLogger, get_logger
from .config import ProtocolConfig, ProtocolConfigError, build_leak_branches, build_psi
from .ensemble import ClassicalRegisterEnsemble

logger = get_logger("protocols.alternating")

INITIAL_CMI_TOLERANCE = 1e-9

# family distances are only evaluated for a bounded number of seed assignments
_FAMILY_SEED_LIMIT = 256


def active_source(i: int) -> str:
    return "B" if i % 2 == 0 else "A"


def seed_register(i: int) -> str:
    """Register name of the seed published after round i."""
    return f"K{i}"


def entropy_bound(variant: str, source: str, j: int, k: float, lam: float) -> float:
    """Guaranteed H_min(source | E_j) after j rounds.

    Chained seeds: k − (1 + (−1)^{j+1} + 2j)λ for A and k − (1 + (−1)^j + 2j)λ
    for B. Fresh seeds: k − δ·2λ with δ the number of rounds in which the
    source was active.
    """
    if variant == "chained":
        sign = (-1) ** (j + 1) if source == "A" else (-1) ** j
        return k - (1 + sign + 2 * j) * lam
    delta = j // 2 if source == "A" else (j + 1) // 2
    return k - delta * 2 * lam


@dataclass(frozen=True)
class Snapshot:
    """Entropies of both sources given E_j, against their guaranteed bounds."""

    index: int
    h_a: float
    h_b: float
    bound_a: float
    bound_b: float
    cmi: float
    e_dims: tuple[int, ...]
    r_dim: int
    budget: Optional[int]

    @property
    def slack(self) -> float:
        return min(self.h_a - self.bound_a, self.h_b - self.bound_b)

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "h_a": self.h_a,
            "h_b": self.h_b,
            "bound_a": self.bound_a,
            "bound_b": self.bound_b,
            "slack": self.slack,
            "cmi": self.cmi,
            "e_dims": list(self.e_dims),
            "r_dim": self.r_dim,
            "budget": self.budget,
        }


@dataclass(frozen=True)
class RoundRecord:
    """Everything measured in one round."""

    index: int
    active: str
    seed_distance: float
    h_active_before: float
    h_passive_before: float
    h_active_mid: float
    h_active_after: float
    h_passive_after: float
    cmi: float
    validation: ValidationReport
    extractor_distance: float
    family_lower: Optional[float]
    hypothesis_met: bool
    leaked: float
    e_dims: tuple[int, ...]
    r_dim: int
    psi: str

    @property
    def passive(self) -> str:
        return "A" if self.active == "B" else "B"

    @property
    def passive_change(self) -> float:
        return self.h_passive_after - self.h_passive_before

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "active": self.active,
            "seed_distance": self.seed_distance,
            "h_active_before": self.h_active_before,
            "h_passive_before": self.h_passive_before,
            "h_active_mid": self.h_active_mid,
            "h_active_after": self.h_active_after,
            "h_passive_after": self.h_passive_after,
            "passive_change": self.passive_change,
            "cmi": self.cmi,
            "validation": self.validation.to_dict(),
            "extractor_distance": self.extractor_distance,
            "family_lower": self.family_lower,
            "hypothesis_met": self.hypothesis_met,
            "leaked": self.leaked,
            "e_dims": list(self.e_dims),
            "r_dim": self.r_dim,
            "psi": self.psi,
        }


CSV_HEADER = (
    "round",
    "active",
    "h_active_before",
    "h_active_after",
    "h_passive_before",
    "h_passive_after",
    "bound_a",
    "bound_b",
    "cmi",
    "seed_distance",
    "extractor_distance",
    "family_lower",
    "hypothesis_met",
    "leak_valid",
    "budget",
)


@dataclass(eq=False)
class ProtocolTranscript:
    """Header, one snapshot per round boundary, one record per round and the stored states.

    ``states[j]`` is the joint state of (A, B, E_j, R_j) after j rounds, with
    the seeds published so far as classical registers named in ``published[j]``.
    """

    config: ProtocolConfig
    k: float
    k_ext: float
    leak_cost: int = CIRCUIT.LEAK_COST_PER_QUBIT
    snapshots: list[Snapshot] = field(default_factory=list)
    rounds: list[RoundRecord] = field(default_factory=list)
    states: list[ClassicalRegisterEnsemble] = field(default_factory=list)
    published: list[tuple[str, ...]] = field(default_factory=list)

    @property
    def spec(self) -> ExtractorSpec:
        return self.config.extractor

    def budget_after(self, i: int) -> Optional[int]:
        """s − i(t + c·λ), with c the gate cost of writing one leaked qubit."""
        s = self.config.budget
        if s is None:
            return None
        return s - i * (self.config.psi_gate_cost + self.leak_cost * self.config.lam)

    def bound(self, source: str, j: int) -> float:
        return entropy_bound(self.config.variant, source, j, self.k, self.config.lam)

    def header(self) -> dict[str, Any]:
        return {
            "variant": self.config.variant,
            "rounds": self.config.rounds,
            "lambda": self.config.lam,
            "k": self.k,
            "k_ext": self.k_ext,
            "eps_ext": self.spec.eps_ext,
            "epsilon": self.config.epsilon,
            "budget": self.config.budget,
            "psi": self.config.psi,
            "leak": self.config.leak,
            "psi_gate_cost": self.config.psi_gate_cost,
            "leak_cost_per_qubit": self.leak_cost,
            "budget_rule": "s - i*(t + c*lambda)",
            "seed": self.config.seed,
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "header": self.header(),
            "extractor": self.spec.to_dict(),
            "snapshots": [s.to_dict() for s in self.snapshots],
            "rounds": [r.to_dict() for r in self.rounds],
        }

    def csv_rows(self) -> list[list[Any]]:
        rows = []
        for rec in self.rounds:
            snap = self.snapshots[rec.index + 1]
            rows.append([
                rec.index,
                rec.active,
                rec.h_active_before,
                rec.h_active_after,
                rec.h_passive_before,
                rec.h_passive_after,
                snap.bound_a,
                snap.bound_b,
                rec.cmi,
                rec.seed_distance,
                rec.extractor_distance,
                rec.family_lower,
                rec.hypothesis_met,
                rec.validation.valid,
                snap.budget,
            ])
        return rows


def chained_table(spec: ExtractorSpec) -> np.ndarray:
    """z[k, t] = Ext(t, k) for every seed k and source value t."""
    union = seed_union(spec.design)
    symbols = [int_to_bits(t, spec.n) for t in range(1 << spec.n)]
    seeds = [int_to_bits(k, spec.d) for k in range(1 << spec.d)]
    assignments = np.array([bits_to_int([y[p] for p in union]) for y in seeds], dtype=np.int64)
    return output_table(spec, symbols, union, assignments)


def _snapshot(
    state: ClassicalRegisterEnsemble,
    j: int,
    transcript: ProtocolTranscript,
    published: tuple[str, ...] = (),
) -> Snapshot:
    eps = transcript.config.epsilon
    return Snapshot(
        j,
        state.min_entropy("A", given=published, epsilon=eps),
        state.min_entropy("B", given=published, epsilon=eps),
        transcript.bound("A", j),
        transcript.bound("B", j),
        state.cmi("A", "B", given=published),
        state.e_dims,
        state.r_dim,
        transcript.budget_after(j),
    )


def _fresh_family_lower(
    spec: ExtractorSpec,
    state: ClassicalRegisterEnsemble,
    active: str,
    budget: int,
) -> Optional[float]:
    """Seed-averaged best advantage of the named family against (Ext(T, y), E) vs U ⊗ E."""
    outputs = 1 << spec.m
    dim = outputs * state.e_dim
    count = 1 << len(seed_union(spec.design))
    if dim > max_dimension() or count > _FAMILY_SEED_LIMIT:
        logger.debug(f"Family distance skipped (dimension {dim}, seeds {count})")
        return None
    cq = state.cq_state(active)
    blocks = np.asarray(cq.weighted_blocks())
    rho_e = blocks.sum(axis=0)
    reference = block_diag(*([rho_e / outputs] * outputs))
    family = named_family(dim, budget)
    total = 0.0
    for grouped in iter_seeded_outputs(spec, cq.symbols, blocks):
        for per_seed in grouped:
            total += computational_distance(block_diag(*per_seed), reference, family).lower
    return total / count


def _chained_family_lower(
    state: ClassicalRegisterEnsemble,
    m: int,
    given: tuple[str, ...],
    budget: int,
) -> Optional[float]:
    """Best family advantage on (K_{i+1}, seeds, E) against U ⊗ (seeds, E).

    ``given`` names K_i and every seed published before it; only seed
    values that occur get a block.
    """
    outputs = 1 << m
    seeds = state.grouped(list(given))
    values = sorted(seeds)
    dim = outputs * len(values) * state.e_dim
    if dim > max_dimension():
        logger.debug(f"Family distance skipped (dimension {dim})")
        return None
    zero = np.zeros((state.e_dim, state.e_dim), dtype=complex)
    joint = state.grouped(["K_next", *given])
    actual = block_diag(*[joint.get((z,) + g, zero) for z in range(outputs) for g in values])
    ideal = block_diag(*[seeds[g] / outputs for _ in range(outputs) for g in values])
    return computational_distance(actual, ideal, named_family(dim, budget)).lower


def run_alternating(config: ProtocolConfig) -> ProtocolTranscript:
    """Run every round on the exact state and record the measured quantities."""
    spec = config.extractor
    rng = make_rng(config.seed)
    state = config.sources
    eps = config.epsilon

    initial_cmi = state.cmi("A", "B")
    if initial_cmi > INITIAL_CMI_TOLERANCE:
        raise ProtocolConfigError(f"sources are not conditionally independent given E: I(A:B|E) = {initial_cmi:.3e}")
    k = config.k
    if k is None:
        k = min(state.min_entropy("A", epsilon=eps), state.min_entropy("B", epsilon=eps))

    transcript = ProtocolTranscript(config, k, spec.k_ext)
    transcript.snapshots.append(_snapshot(state, 0, transcript))
    transcript.states.append(state)
    transcript.published.append(())

    chained = config.variant == "chained"
    table = chained_table(spec) if chained else None
    published: tuple[str, ...] = ()
    if chained:
        state = state.with_uniform("K", spec.d)

    logger.info(
        f"Alternating extraction: {config.variant}, {config.rounds} rounds, lambda={config.lam}, "
        f"k={k:.4f}, k_ext={spec.k_ext:.4f}"
    )
    for i in range(config.rounds):
        active = active_source(i)
        passive = "A" if active == "B" else "B"
        with PerformanceLogger(logger, f"round {i} (T={active})"):
            h_active_before = state.min_entropy(active, given=published, epsilon=eps)
            h_passive_before = state.min_entropy(passive, given=published, epsilon=eps)
            seed_distance = state.uniformity_distance("K", given=published) if chained else 0.0
            if chained:
                state = state.derive("K_next", spec.m, lambda v, t=active: int(table[v["K"], v[t]]))

            psi = build_psi(config.psi, state.e_dims, rng)
            if psi is not None:
                state = state.apply_isometry(stinespring_dilate(psi))
            h_active_mid = state.min_entropy(active, given=published, epsilon=eps)

            leak = build_leak_branches(config.leak, spec.n, config.lam, state.e_dims, state.r_dim)
            channel = LeakageChannel(
                identity_channel(state.e_dims + (state.r_dim,)),
                leak,
                float(config.lam),
                config.psi_gate_cost,
                f"round-{i}-{config.leak}",
            )
            validation = validate_leakage_channel(channel, state.cq_state(active, include_env=True))
            if not validation.valid and not config.allow_invalid:
                raise LeakageValidationError(
                    validation.failed_clause or "unknown", validation.residual, validation.message
                )
            state = state.apply_controlled(active, leak)

            h_active_after = state.min_entropy(active, given=published, epsilon=eps)
            h_passive_after = state.min_entropy(passive, given=published, epsilon=eps)

            family_lower = None
            if chained:
                seeds = ("K",) + published
                distance = state.uniformity_distance("K_next", given=seeds)
                if config.budget is not None:
                    budget = max(0, transcript.budget_after(i + 1) or 0)
                    family_lower = _chained_family_lower(state, spec.m, seeds, budget)
                # K_i goes public, K_{i+1} stays secret until the next round is over
                state = state.rename("K", seed_register(i)).rename("K_next", "K")
                published = published + (seed_register(i),)
            else:
                cq = state.cq_state(active)
                distance = seeded_output_distance(spec, cq.symbols, np.asarray(cq.weighted_blocks()))
                if config.budget is not None:
                    family_lower = _fresh_family_lower(spec, state, active, max(0, transcript.budget_after(i + 1) or 0))

            met = h_active_before >= spec.k_ext + 2 * config.lam - TOLERANCE.INEQUALITY
            if not met:
                logger.info(
                    f"Round {i}: hypothesis unmet, H_min({active}|E)={h_active_before:.4f} "
                    f"< k_ext + 2*lambda = {spec.k_ext + 2 * config.lam:.4f}"
                )
            if not validation.valid:
                logger.warning(f"Round {i}: running with an invalid leak ({validation.failed_clause})")

            joint = state.drop(["K"]) if chained else state
            transcript.states.append(joint)
            transcript.published.append(published)
            snapshot = _snapshot(joint, i + 1, transcript, published)
            transcript.snapshots.append(snapshot)
            transcript.rounds.append(RoundRecord(
                i,
                active,
                seed_distance,
                h_active_before,
                h_passive_before,
                h_active_mid,
                h_active_after,
                h_passive_after,
                snapshot.cmi,
                validation,
                distance,
                family_lower,
                met,
                float(np.log2(leak.out_dims[0])),
                state.e_dims,
                state.r_dim,
                config.psi,
            ))
        logger.debug(
            f"Round {i}: H({active}|E) {h_active_before:.4f} -> {h_active_after:.4f}, "
            f"distance {distance:.6g}, CMI {snapshot.cmi:.3e}"
        )
    return transcript
