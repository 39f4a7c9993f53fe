"""Data access repository for the experiment-run ledger."""

import json
from contextlib import contextmanager
from typing import Any, Optional, List

from sqlalchemy.exc import SQLAlchemyError

from .models import ExperimentRun, init_database
from ..utils.logging import get_logger


logger = get_logger("database")


class DatabaseError(Exception):
    """Base exception for database operations."""
    pass


class RunRepository:
    """Data access layer for recorded experiment runs."""

    def __init__(self, db_path: str = "runs.db"):
        """Initialize repository.

        Args:
            db_path: Path to SQLite database file
        """
        self._db_path = db_path
        self._session_factory = None
        self._initialized = False

    def initialize(self) -> bool:
        """Initialize the database connection.

        Returns:
            True if initialization successful
        """
        try:
            self._session_factory = init_database(self._db_path)
            self._initialized = True
            logger.info(f"Run ledger initialized: {self._db_path}")
            return True
        except SQLAlchemyError as e:
            logger.error(f"Failed to initialize run ledger: {e}")
            return False

    @contextmanager
    def _session_scope(self):
        """Provide a transactional scope around operations."""
        if not self._initialized and not self.initialize():
            raise DatabaseError(f"Run ledger unavailable: {self._db_path}")

        session = self._session_factory()
        try:
            yield session
            session.commit()
        except SQLAlchemyError as e:
            session.rollback()
            logger.error(f"Database error: {e}")
            raise DatabaseError(f"Database operation failed: {e}") from e
        finally:
            session.close()

    def record_run(
        self,
        subcommand: str,
        config_digest: str,
        exit_code: int,
        seed: Optional[int] = None,
        preset: Optional[str] = None,
        summary: Optional[dict[str, Any]] = None,
    ) -> Optional[int]:
        """Append one run to the ledger.

        Args:
            subcommand: CLI subcommand name
            config_digest: sha256 of the canonical experiment config
            exit_code: Process exit code of the run
            seed: RNG seed used
            preset: Built-in preset name, if any
            summary: Small JSON-compatible summary of the report

        Returns:
            New run id, or None on error
        """
        try:
            with self._session_scope() as session:
                run = ExperimentRun(
                    subcommand=subcommand,
                    preset=preset,
                    seed=seed,
                    config_digest=config_digest,
                    exit_code=exit_code,
                    summary_json=json.dumps(summary, sort_keys=True) if summary else None,
                )
                session.add(run)
                session.flush()
                run_id = run.id
                logger.debug(f"Recorded {subcommand} run {run_id} (exit {exit_code})")
                return run_id
        except DatabaseError as e:
            logger.error(f"Failed to record run: {e}")
            return None

    def get_run(self, run_id: int) -> Optional[ExperimentRun]:
        """Get a run by id."""
        try:
            with self._session_scope() as session:
                run = session.query(ExperimentRun).filter_by(id=run_id).first()
                if run:
                    session.expunge(run)
                return run
        except DatabaseError as e:
            logger.error(f"Failed to get run {run_id}: {e}")
            return None

    def list_runs(self, subcommand: Optional[str] = None, limit: int = 50) -> List[ExperimentRun]:
        """List recent runs, newest first.

        Args:
            subcommand: Only runs of this subcommand (None = all)
            limit: Maximum number of runs

        Returns:
            List of runs
        """
        try:
            with self._session_scope() as session:
                query = session.query(ExperimentRun)
                if subcommand is not None:
                    query = query.filter_by(subcommand=subcommand)
                runs = query.order_by(ExperimentRun.id.desc()).limit(limit).all()
                for run in runs:
                    session.expunge(run)
                return runs
        except DatabaseError as e:
            logger.error(f"Failed to list runs: {e}")
            return []

    def close(self) -> None:
        """Release the session factory."""
        self._session_factory = None
        self._initialized = False
