"""Named measurement builders: Helstrom and pretty-good measurements."""

from typing import Any, Sequence

import numpy as np

from . import linalg as la
from .channels import Povm
from .errors import DimensionMismatchError


def helstrom_measurement(sigma0: np.ndarray, sigma1: np.ndarray, outcomes: Sequence[Any] = (0, 1)) -> Povm:
    """Optimal two-outcome measurement for weighted operators σ0, σ1.

    Outcome 0 is the projector onto the positive part of σ0 − σ1.
    """
    if sigma0.shape != sigma1.shape:
        raise DimensionMismatchError(f"shapes {sigma0.shape} and {sigma1.shape} differ")
    eigvals, eigvecs = la.eigh_hermitian(sigma0 - sigma1)
    pos = eigvecs[:, eigvals > 0]
    e0 = pos @ pos.conj().T
    e1 = np.eye(sigma0.shape[0], dtype=complex) - e0
    return Povm({outcomes[0]: e0, outcomes[1]: la.hermitize(e1)})


def pretty_good_measurement(weighted: Sequence[np.ndarray], outcomes: Sequence[Any]) -> Povm:
    """E_x = S^{-1/2} σ_x S^{-1/2} with S = Σ σ_x; the kernel of S goes to the first outcome."""
    if len(weighted) != len(outcomes):
        raise DimensionMismatchError("one outcome label per operator required")
    total = np.sum(weighted, axis=0)
    inv_sqrt = la.psd_power(total, -0.5)
    elements = {x: la.hermitize(inv_sqrt @ s @ inv_sqrt) for x, s in zip(outcomes, weighted)}
    support = inv_sqrt @ total @ inv_sqrt
    kernel = np.eye(total.shape[0], dtype=complex) - support
    first = outcomes[0]
    elements[first] = la.hermitize(elements[first] + kernel)
    return complete_povm(elements)


def complete_povm(elements: dict[Any, np.ndarray]) -> Povm:
    """Symmetrically renormalize near-POVM elements so they sum to I exactly."""
    total = la.hermitize(sum(elements.values()))
    eigvals, eigvecs = la.eigh_psd(total)
    keep = eigvals > 1e-12
    inv_sqrt = (eigvecs[:, keep] / np.sqrt(eigvals[keep])) @ eigvecs[:, keep].conj().T
    fixed = {x: la.hermitize(inv_sqrt @ e @ inv_sqrt) for x, e in elements.items()}
    kernel = eigvecs[:, ~keep] @ eigvecs[:, ~keep].conj().T
    first = next(iter(fixed))
    fixed[first] = fixed[first] + kernel
    for x, e in fixed.items():
        vals, vecs = la.eigh_psd(e)
        fixed[x] = (vecs * vals) @ vecs.conj().T
    return Povm(fixed)
