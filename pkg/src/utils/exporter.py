"""Report export utilities for the unpredictability lab."""

import csv
import io
import json
import math
from dataclasses import dataclass, fields, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from .logging import get_logger

logger = get_logger("utils.exporter")


@dataclass
class ExportResult:
    """Result of an export operation."""

    success: bool
    file_path: Optional[Path] = None
    rows_exported: int = 0
    error_message: str = ""


def to_jsonable(value: Any) -> Any:
    """Convert reports, numpy scalars/arrays and enums to plain JSON values.

    Non-finite floats become strings ("inf", "-inf", "nan") so the output
    stays strict JSON.
    """
    if hasattr(value, "to_dict") and not isinstance(value, type):
        return to_jsonable(value.to_dict())
    if is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in fields(value)}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, Path):
        return str(value)
    return value


class ReportExporter:
    """Writes reports as JSON (full precision) or CSV (fixed significant digits)."""

    def __init__(self, csv_digits: int = 12):
        """Initialize exporter.

        Args:
            csv_digits: Significant digits for floats in CSV output
        """
        self._csv_digits = csv_digits

    def render_json(self, payload: Any) -> str:
        """Serialize a payload to a JSON string with a trailing newline."""
        return json.dumps(to_jsonable(payload), indent=2, allow_nan=False) + "\n"

    def render_csv(self, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        """Serialize rows to CSV text."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([self._format_cell(v) for v in row])
        return buffer.getvalue()

    def write_json(self, payload: Any, output_file: Path) -> ExportResult:
        """Write a JSON report.

        Args:
            payload: Report object (dataclass, dict, list)
            output_file: Output path

        Returns:
            ExportResult with success status
        """
        try:
            text = self.render_json(payload)
            output_file.parent.mkdir(parents=True, exist_ok=True)
            with open(output_file, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)

            logger.info(f"Exported JSON report to {output_file}")
            return ExportResult(success=True, file_path=output_file, rows_exported=1)

        except (OSError, TypeError, ValueError) as e:
            logger.error(f"Failed to export JSON report: {e}")
            return ExportResult(success=False, error_message=str(e))

    def write_csv(
        self,
        header: Sequence[str],
        rows: Sequence[Sequence[Any]],
        output_file: Path,
    ) -> ExportResult:
        """Write a CSV table.

        Args:
            header: Column names
            rows: Table rows
            output_file: Output path

        Returns:
            ExportResult with success status
        """
        try:
            text = self.render_csv(header, rows)
            output_file.parent.mkdir(parents=True, exist_ok=True)
            with open(output_file, "w", encoding="utf-8", newline="") as f:
                f.write(text)

            logger.info(f"Exported {len(rows)} rows to {output_file}")
            return ExportResult(success=True, file_path=output_file, rows_exported=len(rows))

        except (OSError, TypeError, ValueError) as e:
            logger.error(f"Failed to export CSV table: {e}")
            return ExportResult(success=False, error_message=str(e))

    def _format_cell(self, value: Any) -> Any:
        if isinstance(value, (bool, np.bool_)):
            return "true" if value else "false"
        if isinstance(value, (float, np.floating)):
            return format(float(value), f".{self._csv_digits}g")
        if isinstance(value, np.integer):
            return int(value)
        if isinstance(value, Enum):
            return value.value
        if value is None:
            return ""
        return value


def flatten_report(payload: Any, prefix: str = "") -> list[list[Any]]:
    """Dotted-path (field, value) rows for reports without a natural table."""
    value = to_jsonable(payload) if not prefix else payload
    if isinstance(value, dict):
        rows: list[list[Any]] = []
        for key, item in value.items():
            rows.extend(flatten_report(item, f"{prefix}.{key}" if prefix else str(key)))
        return rows
    if isinstance(value, list) and value:
        rows = []
        for i, item in enumerate(value):
            rows.extend(flatten_report(item, f"{prefix}.{i}" if prefix else str(i)))
        return rows
    if isinstance(value, list):
        return [[prefix, None]]
    return [[prefix, value]]
