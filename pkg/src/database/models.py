"""SQLAlchemy database models for the experiment-run ledger."""

import json
from datetime import datetime, timezone
from typing import Any

from sqlalchemy import create_engine, Column, Integer, String, DateTime, Text, BigInteger
from sqlalchemy.orm import declarative_base, sessionmaker


def utc_now() -> datetime:
    """Get current UTC time as timezone-aware datetime."""
    return datetime.now(timezone.utc)


Base = declarative_base()


class ExperimentRun(Base):
    """One CLI invocation and its outcome."""

    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True)
    subcommand = Column(String(32), nullable=False)
    preset = Column(String(64), nullable=True)
    seed = Column(BigInteger, nullable=True)
    config_digest = Column(String(64), nullable=False)
    exit_code = Column(Integer, nullable=False)
    summary_json = Column(Text, nullable=True)
    created_at = Column(DateTime, default=utc_now)

    @property
    def summary(self) -> dict[str, Any]:
        """Decoded run summary."""
        if not self.summary_json:
            return {}
        return json.loads(self.summary_json)

    def __repr__(self) -> str:
        return (
            f"<ExperimentRun(id={self.id}, subcommand='{self.subcommand}', "
            f"exit_code={self.exit_code})>"
        )


def init_database(db_path: str = "runs.db") -> sessionmaker:
    """Initialize the database and return a session factory.

    Args:
        db_path: Path to SQLite database file

    Returns:
        Session factory for creating database sessions
    """
    engine = create_engine(f"sqlite:///{db_path}")
    Base.metadata.create_all(engine)
    return sessionmaker(bind=engine)
