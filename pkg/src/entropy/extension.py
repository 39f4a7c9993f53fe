"""Extending a reduced state to a joint state close to a given one."""

import numpy as np

from ..qcore import linalg as la
from ..qcore.errors import DimensionMismatchError
from ..qcore.states import DensityOperator, purification_matrix


def extend_state(sigma_a: DensityOperator, rho_ab: DensityOperator) -> DensityOperator:
    """Return σ_AB with Tr_B σ_AB = σ_A and Δ_P(ρ_AB, σ_AB) ≤ Δ_P(ρ_A, σ_A).

    A is the leading block of ``rho_ab.dims`` matching ``sigma_a.dims``.
    Purifications of ρ_AB and σ_A share the reference B⊗R; aligning them
    with the Uhlmann unitary and tracing out R gives the extension.
    """
    k = len(sigma_a.dims)
    if tuple(rho_ab.dims[:k]) != tuple(sigma_a.dims):
        raise DimensionMismatchError(f"sigma dims {sigma_a.dims} are not a prefix of rho dims {rho_ab.dims}")
    d_a = sigma_a.dim
    d_b = rho_ab.dim // d_a

    psi = purification_matrix(rho_ab.matrix, min_reference=d_a)
    r = psi.shape[1]
    psi = psi.reshape(d_a, d_b * r)
    phi = purification_matrix(sigma_a.matrix, min_reference=d_b * r)

    n = phi.T @ psi.conj()
    u, _, wh = np.linalg.svd(n, full_matrices=False)
    v = wh.conj().T @ u.conj().T
    x = (phi @ v.T).reshape(d_a * d_b, r)
    sigma_ab = la.hermitize(x @ x.conj().T)
    return DensityOperator.from_matrix(sigma_ab, rho_ab.dims, check=False)
