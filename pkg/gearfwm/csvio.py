"""Sweep data as ``theta_deg,alpha_deg`` CSV (LF endings, ``.`` decimals).

Values are written with repr so a read-back is bit-exact.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable

from .errors import CsvFormatError
from .fs import write_text_atomic

HEADER = ("theta_deg", "alpha_deg")


def format_sweep_csv(rows: Iterable[tuple[float, float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for theta, alpha in rows:
        writer.writerow((repr(float(theta)), repr(float(alpha))))
    return buf.getvalue()


def write_sweep_csv(rows: Iterable[tuple[float, float]], path: Path) -> Path:
    return write_text_atomic(Path(path), format_sweep_csv(rows))


def read_sweep_csv(path: Path) -> list[tuple[float, float]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CsvFormatError(f"{path}: {e.strerror or e}") from None

    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != HEADER:
        raise CsvFormatError(f"{path}:1: expected header {','.join(HEADER)}, got {header!r}")

    rows: list[tuple[float, float]] = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise CsvFormatError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
        try:
            rows.append((float(row[0]), float(row[1])))
        except ValueError:
            raise CsvFormatError(f"{path}:{lineno}: not a number in {row!r}") from None
    return rows
