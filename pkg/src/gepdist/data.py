"""Embedded datasets and plain-text sample loading."""

from __future__ import annotations

import math
from pathlib import Path

from .core import Sample
from .errors import DataError

__all__ = ["DATASETS", "builtin_dataset", "load_sample"]

# March precipitation (inches), Minneapolis/St Paul, 30 successive years (Hinkley, 1977)
PRECIPITATION = (
    0.77, 1.74, 0.81, 1.2, 1.95, 1.2, 0.47, 1.43, 3.37, 2.2,
    3, 3.09, 1.51, 2.1, 0.52, 1.62, 1.31, 0.32, 0.59, 0.81,
    2.81, 1.87, 1.18, 1.35, 4.75, 2.48, 0.96, 1.89, 0.9, 2.05,
)  # fmt: skip

# prices of 31 children's wooden toys, Suffolk craft shop, April 1991 (The Open University, 1993)
TOYS = (
    4.2, 1.12, 1.39, 2, 3.99, 2.15, 1.74, 5.81, 1.7, 2.85,
    0.5, 0.99, 11.5, 5.12, 0.9, 1.99, 6.24, 2.6, 3, 12.2,
    7.36, 4.75, 11.59, 8.69, 9.8, 1.85, 1.99, 1.35, 10, 0.65, 1.45,
)  # fmt: skip

DATASETS = {"precipitation": PRECIPITATION, "toys": TOYS}


def builtin_dataset(name: str) -> Sample:
    try:
        return Sample(DATASETS[name])
    except KeyError:
        raise DataError(f"unknown dataset {name!r}; choose from {sorted(DATASETS)}") from None


def load_sample(path, column: int | None = None, skip_header: bool = False) -> Sample:
    """Read one value per line, or one comma-separated column.

    Blank lines and lines starting with '#' are ignored.  ``skip_header``
    drops the first non-comment line.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    values = []
    header_pending = skip_header
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header_pending:
            header_pending = False
            continue
        field = line
        if column is not None:
            cells = [c.strip() for c in line.split(",")]
            if column >= len(cells):
                raise DataError(f"line {lineno}: no column {column} in {raw!r}", line=lineno, content=raw)
            field = cells[column]
        try:
            value = float(field)
        except ValueError:
            raise DataError(f"line {lineno}: cannot parse {raw!r} as a number", line=lineno, content=raw) from None
        if not math.isfinite(value) or value <= 0.0:
            raise DataError(
                f"line {lineno}: observations must be positive and finite, got {raw!r}", line=lineno, content=raw
            )
        values.append(value)
    if not values:
        raise DataError(f"{path} contains no observations")
    return Sample(values)
