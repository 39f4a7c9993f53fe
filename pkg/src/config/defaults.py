"""Default configuration values for the unpredictability lab."""

from typing import Any

DEFAULT_CONFIG: dict[str, Any] = {
    "numerics": {
        "hermitian_tol": 1e-10,
        "psd_tol": 1e-10,
        "max_dim": 256,  # Total Hilbert dimension cap (UNPLAB_MAX_DIM overrides)
        "statevector_max_qubits": 22,
    },
    "solver": {
        "gap_tol": 1e-7,  # Primal-dual gap for guessing certificates
        "dual_tol": 1e-8,  # Dual feasibility eigenvalue tolerance
        "max_iter": 10000,
    },
    "extractors": {
        "max_seed_bits": 16,  # Exhaustive seed enumeration cap
    },
    "protocols": {
        "max_aux_dim": 64,  # R register compressed above this
        "max_total_dim": 1024,
    },
    "output": {
        "format": "json",  # "json" | "csv"
        "csv_digits": 12,
    },
    "ledger": {
        "enabled": False,
        "db_path": "",  # Empty = <data dir>/runs.db
    },
    "logging": {
        "level": "INFO",  # "DEBUG" | "INFO" | "WARNING" | "ERROR"
        "file": False,
    },
}
