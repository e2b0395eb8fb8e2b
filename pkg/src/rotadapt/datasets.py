"""CSV reading/writing for point sets (header ``x,y``, one point per row)."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np

from .core import InvalidInput, as_point_set

__all__ = ["CSVFormatError", "format_points_csv", "read_points_csv", "write_points_csv"]

HEADER = ("x", "y")


class CSVFormatError(InvalidInput):
    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


def _parse_rows(lines, path):
    reader = csv.reader(lines)
    points = []
    header_seen = False
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        cells = [cell.strip() for cell in row]
        if not header_seen:
            header_seen = True
            if tuple(c.lower() for c in cells) == HEADER:
                continue
            if len(cells) == 2:
                try:
                    float(cells[0]), float(cells[1])
                except ValueError:
                    raise CSVFormatError(path, line, f"expected header 'x,y', got {','.join(row)!r}") from None
        if len(cells) != 2:
            raise CSVFormatError(path, line, f"expected 2 columns, got {len(cells)}: {','.join(row)!r}")
        try:
            x, y = float(cells[0]), float(cells[1])
        except ValueError:
            raise CSVFormatError(path, line, f"not a number in row {','.join(row)!r}") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise CSVFormatError(path, line, f"non-finite value in row {','.join(row)!r}")
        points.append((x, y))
    if not points:
        raise CSVFormatError(path, max(1, reader.line_num), "no data rows")
    return np.array(points, dtype=np.float64)


def read_points_csv(path) -> np.ndarray:
    """Load an ``(n, 2)`` array; errors name the offending line."""
    path = Path(path)
    with path.open(newline="") as fh:
        return _parse_rows(fh, path)


def format_points_csv(points) -> str:
    pts = as_point_set(points)
    buf = io.StringIO()
    buf.write("x,y\n")
    for x, y in pts:
        # repr round-trips doubles exactly
        buf.write(f"{float(x)!r},{float(y)!r}\n")
    return buf.getvalue()


def write_points_csv(points, path) -> None:
    Path(path).write_text(format_points_csv(points))
