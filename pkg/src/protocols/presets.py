"""Source states and named protocol configurations."""

import copy
from typing import Any, Mapping, Optional

import numpy as np

from ..extractors.composition import ExtractorSpec
from ..extractors.design import build_weak_design, cyclic_design
from ..qcore.states import random_density
from ..utils.helpers import make_rng
from .config import ProtocolConfig, ProtocolConfigError
from .ensemble import ClassicalRegisterEnsemble, product_ensemble, uniform_distribution


def independent_sources(n: int) -> ClassicalRegisterEnsemble:
    """Uniform independent A and B with trivial E₀."""
    return product_ensemble({"A": uniform_distribution(n), "B": uniform_distribution(n)})


def random_product_sources(n: int, rng: np.random.Generator) -> ClassicalRegisterEnsemble:
    """ρ_{AE₁} ⊗ ρ_{BE₂} with random near-uniform distributions and random qubit conditionals."""
    size = 1 << n
    p_a = rng.dirichlet(np.full(size, 8.0))
    p_b = rng.dirichlet(np.full(size, 8.0))
    rho_a = [random_density((2,), rng).matrix for _ in range(size)]
    rho_b = [random_density((2,), rng).matrix for _ in range(size)]
    blocks = {
        (a, b): p_a[a] * p_b[b] * np.kron(rho_a[a], rho_b[b])
        for a in range(size)
        for b in range(size)
    }
    return ClassicalRegisterEnsemble(("A", "B"), (n, n), blocks, (2, 2))


def shared_copy_sources(n: int) -> ClassicalRegisterEnsemble:
    """A = B = Z uniform with E₀ = |Z⟩ on n qubits.

    Conditioned on E the sources are fixed, so I(A:B|E) = 0; any map that
    erases Z from E turns them into perfectly correlated unknowns.
    """
    size = 1 << n
    blocks = {}
    for z in range(size):
        ket = np.zeros((size, size), dtype=complex)
        ket[z, z] = 1.0 / size
        blocks[(z, z)] = ket
    return ClassicalRegisterEnsemble(("A", "B"), (n, n), blocks, (size,))


SOURCE_KINDS = ("independent", "random-product", "shared-copy")

PRESETS: dict[str, dict[str, Any]] = {
    "alternating-2round": {
        "variant": "chained",
        "rounds": 2,
        "lambda": 1,
        "sources": {"kind": "independent", "n": 2},
        "extractor": {"m": 3, "eps_ext": 1.0, "design": "cyclic"},
        "psi": "identity",
        "leak": "classical-bit",
    },
    "alternating-4round": {
        "variant": "chained",
        "rounds": 4,
        "lambda": 1,
        "sources": {"kind": "independent", "n": 2},
        "extractor": {"m": 3, "eps_ext": 1.0, "design": "cyclic"},
        "psi": "identity",
        "leak": "classical-bit",
    },
    "fresh-3round": {
        "variant": "fresh-seed",
        "rounds": 3,
        "lambda": 1,
        "sources": {"kind": "random-product", "n": 3},
        "extractor": {"m": 1, "eps_ext": 1.0, "design": "weak"},
        "psi": "random-unitary",
        "psi_gate_cost": 4,
        "budget": 64,
        "leak": "classical-bit",
    },
    "fresh-extract": {
        "variant": "fresh-seed",
        "rounds": 2,
        "lambda": 0,
        "sources": {"kind": "independent", "n": 8},
        "extractor": {"m": 1, "eps_ext": 0.5, "design": "weak"},
        "psi": "identity",
        "leak": "classical-bit",
    },
    "markov-break": {
        "variant": "fresh-seed",
        "rounds": 1,
        "lambda": 0,
        "sources": {"kind": "shared-copy", "n": 2},
        "extractor": {"m": 1, "eps_ext": 1.0, "design": "weak"},
        "psi": "identity",
        "leak": "cnot-copy",
        "allow_invalid": True,
    },
}


def build_sources(spec: Mapping[str, Any], rng: np.random.Generator) -> ClassicalRegisterEnsemble:
    kind = spec.get("kind", "independent")
    n = int(spec.get("n", 2))
    if kind == "independent":
        return independent_sources(n)
    if kind == "random-product":
        return random_product_sources(n, rng)
    if kind == "shared-copy":
        return shared_copy_sources(n)
    raise ProtocolConfigError(f"sources kind must be one of {SOURCE_KINDS}, got '{kind}'")


def build_extractor(n: int, spec: Mapping[str, Any], seed: int = 0) -> ExtractorSpec:
    m = int(spec.get("m", 1))
    eps_ext = float(spec.get("eps_ext", 1.0))
    kind = spec.get("design", "weak")
    if kind == "cyclic":
        design = cyclic_design(n, m)
    elif kind == "weak":
        design = build_weak_design(n, m, seed=seed)
    else:
        raise ProtocolConfigError(f"design must be 'cyclic' or 'weak', got '{kind}'")
    return ExtractorSpec(n, m, eps_ext, design)


def config_from_dict(data: Mapping[str, Any], seed: Optional[int] = None) -> ProtocolConfig:
    """ProtocolConfig from a JSON/YAML mapping; ``preset`` entries are expanded first."""
    data = dict(data)
    if "preset" in data:
        name = data.pop("preset")
        if name not in PRESETS:
            raise ProtocolConfigError(f"unknown protocol preset '{name}', choose from {sorted(PRESETS)}")
        merged = copy.deepcopy(PRESETS[name])
        merged.update(data)
        data = merged
    seed = int(data.get("seed", 0)) if seed is None else seed
    rng = make_rng(seed)
    source_spec = data.get("sources", {})
    if isinstance(source_spec, str):
        source_spec = {"kind": source_spec}
    sources = build_sources(source_spec, rng)
    n = sources.width("A")
    try:
        return ProtocolConfig(
            sources=sources,
            rounds=int(data.get("rounds", 2)),
            lam=int(data.get("lambda", 1)),
            extractor=build_extractor(n, data.get("extractor", {}), seed),
            variant=str(data.get("variant", "fresh-seed")),
            psi=str(data.get("psi", "identity")),
            leak=str(data.get("leak", "classical-bit")),
            epsilon=float(data.get("epsilon", 0.0)),
            budget=None if data.get("budget") is None else int(data["budget"]),
            psi_gate_cost=int(data.get("psi_gate_cost", 0)),
            k=None if data.get("k") is None else float(data["k"]),
            seed=seed,
            allow_invalid=bool(data.get("allow_invalid", False)),
        )
    except (TypeError, ValueError) as e:
        raise ProtocolConfigError(f"invalid protocol configuration: {e}") from e


def preset_config(name: str, seed: int = 0) -> ProtocolConfig:
    return config_from_dict({"preset": name}, seed)
