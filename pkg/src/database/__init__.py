"""Experiment-run ledger."""

from .models import ExperimentRun
from .repository import RunRepository, DatabaseError

__all__ = ["ExperimentRun", "RunRepository", "DatabaseError"]
