"""CSV ingestion and per-variable standardisation."""
from __future__ import annotations

import csv
import math

import numpy as np

from .errors import IngestionError
from .moments import SampleMatrix

MIN_ROWS = 3


def ingest_csv(path) -> SampleMatrix:
    """Read a CSV with a header of variable names and one observation per row.

    Raises
    ------
    IngestionError
        On ragged rows, non-numeric or non-finite cells, or fewer than three
        observations.  The message names the offending row and column.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IngestionError(f"cannot open {path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: file is empty") from None
        except (UnicodeDecodeError, csv.Error) as exc:
            raise IngestionError(f"{path}: {exc}") from None
        header = [h.strip() for h in header]
        if not header or not any(header):
            raise IngestionError(f"{path}: missing header row")
        p = len(header)
        rows = []
        try:
            for line_no, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != p:
                    raise IngestionError(
                        f"{path}: row {line_no} has {len(row)} fields, expected {p}")
                values = []
                for col, cell in enumerate(row):
                    try:
                        x = float(cell)
                    except ValueError:
                        raise IngestionError(
                            f"{path}: row {line_no}, column {col + 1} ({header[col]!r}): "
                            f"non-numeric value {cell!r}") from None
                    if not math.isfinite(x):
                        raise IngestionError(
                            f"{path}: row {line_no}, column {col + 1} ({header[col]!r}): "
                            f"non-finite value {cell!r}")
                    values.append(x)
                rows.append(values)
        except (UnicodeDecodeError, csv.Error) as exc:
            raise IngestionError(f"{path}: {exc}") from None
    if len(rows) < MIN_ROWS:
        raise IngestionError(f"{path}: n < {MIN_ROWS} (found {len(rows)} observations)")
    return SampleMatrix(np.array(rows, dtype=np.float64).T, header)


def whiten(sample: SampleMatrix) -> SampleMatrix:
    """Centre every variable and scale it to unit sample variance (ddof=1).

    Variables are standardised one at a time; correlations between them are
    kept, so the covariance of the result is the correlation matrix.
    """
    x = sample.data
    sd = x.std(axis=1, ddof=1)
    flat = np.flatnonzero(~(sd > 0))
    if flat.size:
        names = [sample.names[k] for k in flat]
        raise IngestionError(f"zero-variance variable(s) cannot be whitened: {', '.join(names)}")
    z = (x - x.mean(axis=1, keepdims=True)) / sd[:, None]
    return SampleMatrix(z, sample.column_names)
