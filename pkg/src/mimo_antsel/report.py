"""CSV and JSON emission of sweep results."""

import csv
from collections.abc import Iterable
from pathlib import Path

import structlog

from .exceptions import OutputError
from .models import SweepResult, SweepRow

logger = structlog.get_logger(__name__)

CSV_HEADER = [
    "scenario",
    "strategy",
    "N",
    "dpc_mean_bpshz",
    "zf_mean_bpshz",
    "dpc_gain_pct",
    "zf_gain_pct",
    "iters",
    "wall_ms",
]
TRACE_HEADER = ["strategy", "N", "antenna_index"]
FLOAT_COLUMNS = {"dpc_mean_bpshz", "zf_mean_bpshz", "dpc_gain_pct", "zf_gain_pct", "wall_ms"}
INT_COLUMNS = {"N", "iters"}


def format_float(value: float | None) -> str:
    """17 significant digits, enough to round-trip a float64; None becomes empty."""
    return "" if value is None else format(value, ".17g")


def _write_rows(path: Path, header: list[str], rows: Iterable[list[str]]) -> None:
    try:
        with path.open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise OutputError(path, e) from e


def emit_csv(result: SweepResult, path: Path) -> None:
    """Write one line per (strategy, N) row in the order the sweep produced them.

    Raises:
        OutputError: If the file cannot be written
    """
    lines = (
        [
            row.scenario,
            row.strategy.value,
            str(row.N),
            format_float(row.dpc_mean),
            format_float(row.zf_mean),
            format_float(row.dpc_gain_pct),
            format_float(row.zf_gain_pct),
            str(row.iters),
            format_float(row.wall_ms),
        ]
        for row in result.rows
    )
    _write_rows(path, CSV_HEADER, lines)
    logger.info("csv_written", path=str(path), rows=len(result.rows))


def read_csv(path: Path) -> list[dict[str, str | int | float | None]]:
    """Parse a sweep CSV back into typed values; empty cells become None.

    Raises:
        ValueError: If the header does not match
    """
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected CSV header in {path}: {reader.fieldnames}")
        records: list[dict[str, str | int | float | None]] = []
        for raw in reader:
            record: dict[str, str | int | float | None] = {}
            for key, text in raw.items():
                if text == "" and key in FLOAT_COLUMNS:
                    record[key] = None
                elif key in FLOAT_COLUMNS:
                    record[key] = float(text)
                elif key in INT_COLUMNS:
                    record[key] = int(text)
                else:
                    record[key] = text
            records.append(record)
    return records


def emit_selection_trace(rows: Iterable[SweepRow], path: Path) -> None:
    """Write the active antennas of every row, 1-based, one antenna per line.

    Raises:
        OutputError: If the file cannot be written
    """
    lines = (
        [row.strategy.value, str(row.N), str(index + 1)] for row in rows for index in row.indices
    )
    _write_rows(path, TRACE_HEADER, lines)
    logger.info("trace_written", path=str(path))


def emit_summary(result: SweepResult, path: Path) -> None:
    """Write n90, report-point gains, power loss, baselines and sanity violations as JSON.

    Raises:
        OutputError: If the file cannot be written
    """
    try:
        path.write_text(
            result.model_dump_json(indent=2, exclude={"rows"}) + "\n", encoding="utf-8"
        )
    except OSError as e:
        raise OutputError(path, e) from e
    logger.info("summary_written", path=str(path))
