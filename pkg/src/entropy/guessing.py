"""Optimal guessing probability with primal/dual certificates.

P_guess(X|E) = max_{E_x} Σ_x tr(E_x σ_x) with σ_x = p_x ρ_x. The dual
problem is min tr Y subject to Y ≥ σ_x for every x; every certificate
carries a feasible Y so the reported bracket can be checked independently.
"""

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from ..constants import SOLVER, TOLERANCE
from ..qcore import linalg as la
from ..qcore.channels import Povm
from ..qcore.errors import DimensionMismatchError
from ..qcore.measurements import complete_povm, pretty_good_measurement
from ..qcore.serialization import matrix_to_dict, povm_to_dict
from ..qcore.states import CqState, _enforce_cap
from ..utils.helpers import Bits, safe_log2
from ..utils.logging import get_logger

logger = get_logger("entropy.guessing")


@dataclass(frozen=True, eq=False)
class GuessCertificate:
    """Primal POVM and dual operator bracketing the optimal guessing probability."""

    value: float
    povm: Povm
    dual_sigma: np.ndarray
    gap: float
    dual_value: float
    converged: bool = True
    iterations: int = 0
    method: str = "exact"

    def dual_feasibility(self, weighted: Sequence[np.ndarray]) -> float:
        """min_x λ_min(Y − σ_x); non-negative up to tolerance for a valid certificate."""
        return min(la.min_eigenvalue(self.dual_sigma - s) for s in weighted)

    @property
    def min_entropy(self) -> float:
        return -safe_log2(self.value)

    @property
    def certified_min_entropy(self) -> float:
        """−log₂ of the dual value: a guaranteed lower bound on H_min."""
        return -safe_log2(self.dual_value)

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "dual_value": self.dual_value,
            "gap": self.gap,
            "converged": self.converged,
            "iterations": self.iterations,
            "method": self.method,
            "povm": povm_to_dict(self.povm),
            "dual_sigma": matrix_to_dict(self.dual_sigma),
        }


def _trace(m: np.ndarray) -> float:
    return float(np.real(np.trace(m)))


def _certificate(
    elements: dict[Any, np.ndarray],
    weighted: Sequence[np.ndarray],
    symbols: Sequence[Any],
    dual: np.ndarray,
    method: str,
    iterations: int = 0,
    converged: bool = True,
) -> GuessCertificate:
    povm = Povm(elements)
    value = float(sum(povm.probability(x, s) for x, s in zip(symbols, weighted)))
    dual_value = _trace(dual)
    return GuessCertificate(value, povm, dual, abs(dual_value - value), dual_value, converged, iterations, method)


def _single(weighted, symbols, d) -> GuessCertificate:
    eye = np.eye(d, dtype=complex)
    return _certificate({symbols[0]: eye}, weighted, symbols, la.hermitize(weighted[0]), "exact")


def _binary(weighted, symbols, d) -> GuessCertificate:
    s0, s1 = weighted
    eigvals, eigvecs = la.eigh_hermitian(s0 - s1)
    pos = eigvecs[:, eigvals > 0]
    e0 = pos @ pos.conj().T
    e1 = la.hermitize(np.eye(d, dtype=complex) - e0)
    # Y = σ1 + (σ0 − σ1)₊ dominates both blocks and matches the Helstrom value
    delta_pos = (pos * eigvals[eigvals > 0]) @ pos.conj().T
    dual = la.hermitize(s1 + delta_pos)
    return _certificate({symbols[0]: e0, symbols[1]: e1}, weighted, symbols, dual, "helstrom")


def _common_basis(weighted: Sequence[np.ndarray]) -> np.ndarray | None:
    """Eigenbasis of a generic combination; None unless it diagonalizes every block.

    Blocks commute exactly when such a basis exists.
    """
    coeffs = np.random.default_rng(0).standard_normal(len(weighted))
    stack = np.asarray(weighted)
    combo = la.hermitize(np.einsum("k,kij->ij", coeffs, stack))
    _, basis = la.eigh_hermitian(combo)
    rotated = np.einsum("ai,kab,bj->kij", basis.conj(), stack, basis, optimize=True)
    off = rotated * (1 - np.eye(basis.shape[0]))
    if off.size and np.max(np.abs(off)) > SOLVER.COMMUTE * max(1.0, np.max(np.abs(stack))) * 1e3:
        return None
    return basis


def _diagonal(weighted, symbols, basis) -> GuessCertificate:
    diags = np.real(np.array([np.diag(basis.conj().T @ s @ basis) for s in weighted]))
    winners = np.argmax(diags, axis=0)
    best = diags.max(axis=0)
    d = basis.shape[0]
    elements = {}
    for i, x in enumerate(symbols):
        cols = basis[:, winners == i]
        elements[x] = cols @ cols.conj().T if cols.size else np.zeros((d, d), dtype=complex)
    dual = la.hermitize((basis * best) @ basis.conj().T)
    return _certificate(elements, weighted, symbols, dual, "commuting")


def _dual_from_primal(weighted: Sequence[np.ndarray], elements: Sequence[np.ndarray]) -> np.ndarray:
    gamma = la.hermitize(sum(s @ e for s, e in zip(weighted, elements)))
    shift = max(0.0, max(la.max_eigenvalue(s - gamma) for s in weighted))
    return gamma + shift * np.eye(gamma.shape[0], dtype=complex)


def _iterate(weighted, symbols, d, tol: float, max_iter: int) -> GuessCertificate:
    total = np.sum(weighted, axis=0)
    support = la.support_basis(total)
    k = support.shape[1]
    reduced = [la.hermitize(support.conj().T @ s @ support) for s in weighted]

    start = pretty_good_measurement(reduced, list(range(len(reduced))))
    pis = [np.array(start.elements[i]) for i in range(len(reduced))]
    best_primal, best_elements = -1.0, pis
    best_dual_value, best_dual = np.inf, None
    converged = False
    iteration = 0

    for iteration in range(1, max_iter + 1):
        primal = float(sum(_trace(e @ s) for e, s in zip(pis, reduced)))
        if primal > best_primal:
            best_primal, best_elements = primal, pis
        dual = _dual_from_primal(reduced, pis)
        dual_value = _trace(dual)
        if dual_value < best_dual_value:
            best_dual_value, best_dual = dual_value, dual
        if best_dual_value - best_primal <= tol:
            converged = True
            break
        # Π_x ← G⁻¹ σ_x Π_x σ_x G⁻¹ with G = (Σ σ_x Π_x σ_x)^{1/2}
        g = la.hermitize(sum(s @ p @ s for s, p in zip(reduced, pis)))
        g_inv = la.psd_power(g, -0.5, SOLVER.PINV_CUTOFF)
        pis = [la.hermitize(g_inv @ s @ p @ s @ g_inv) for s, p in zip(reduced, pis)]
        pis = list(complete_povm(dict(enumerate(pis))).elements.values())

    if not converged:
        logger.warning(
            f"Guessing solver stopped after {iteration} iterations with gap "
            f"{best_dual_value - best_primal:.3e} (tolerance {tol:.1e})"
        )

    # Lift back; the kernel of Σσ goes to the first outcome
    kernel = np.eye(d, dtype=complex) - support @ support.conj().T
    elements = {}
    for i, x in enumerate(symbols):
        e = support @ best_elements[i] @ support.conj().T
        if i == 0:
            e = e + kernel
        elements[x] = la.hermitize(e)
    lifted_dual = la.hermitize(support @ best_dual @ support.conj().T)
    elements = dict(complete_povm(elements).elements)
    logger.debug(f"Guessing solver: {len(symbols)} symbols, support {k}/{d}, {iteration} iterations")
    return _certificate(elements, weighted, symbols, lifted_dual, "fixed-point", iteration, converged)


def guess_weighted(
    weighted: Sequence[np.ndarray],
    symbols: Sequence[Bits],
    tol: float = SOLVER.GAP,
    max_iter: int = SOLVER.MAX_ITERATIONS,
) -> GuessCertificate:
    """Certified max_{E} Σ_x tr(E_x σ_x) for PSD blocks σ_x (subnormalized allowed)."""
    if len(weighted) != len(symbols) or not weighted:
        raise DimensionMismatchError("one symbol per weighted block required")
    weighted = [la.hermitize(np.asarray(s, dtype=complex)) for s in weighted]
    d = weighted[0].shape[0]
    if any(s.shape != (d, d) for s in weighted):
        raise DimensionMismatchError("weighted blocks have differing shapes")

    live = [i for i, s in enumerate(weighted) if _trace(s) > TOLERANCE.TRACE]
    if not live:
        live = [0]
    if len(live) < len(weighted):
        # Zero-weight symbols get zero POVM elements
        sub = guess_weighted([weighted[i] for i in live], [symbols[i] for i in live], tol, max_iter)
        elements = dict(sub.povm.elements)
        for i, x in enumerate(symbols):
            if i not in live:
                elements[x] = np.zeros((d, d), dtype=complex)
        return _certificate(
            elements, weighted, symbols, sub.dual_sigma, sub.method, sub.iterations, sub.converged
        )

    if len(weighted) == 1:
        return _single(weighted, symbols, d)
    if len(weighted) == 2:
        return _binary(weighted, symbols, d)
    basis = _common_basis(weighted)
    if basis is not None:
        return _diagonal(weighted, symbols, basis)
    return _iterate(weighted, symbols, d, tol, max_iter)


def guessing_probability(state: CqState, tol: float = SOLVER.GAP) -> GuessCertificate:
    """Optimal probability of guessing X from E, with certificate."""
    _enforce_cap(len(state.symbols) * state.side_dim)
    return guess_weighted(state.weighted_blocks(), state.symbols, tol)


def min_entropy(state: CqState) -> float:
    """H_min(X|E) = −log₂ P_guess(X|E) in bits."""
    return guessing_probability(state).min_entropy
