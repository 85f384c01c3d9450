import csv
import io
import os
from typing import Iterable, Sequence, TextIO
import logging

logger = logging.getLogger(__name__)


def format_value(value) -> str:
    """Render numbers with repr precision so reruns produce identical bytes"""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(value) for value in row])


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write a UTF-8 CSV file with a header row, creating parent directories"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        write_rows(f, header, rows)
    logger.info(f"Wrote {path}")


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    write_rows(buffer, header, rows)
    return buffer.getvalue()

