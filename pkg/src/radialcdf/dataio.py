"""CSV ingestion and deterministic file output.

Input files are headered CSV (RFC 4180, '.' decimal) with either projected
position columns ``x1,x2`` or a precomputed squared-radius column ``y``.
Outputs are written with repr-exact floats and sorted JSON keys so that
identical configurations produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import IngestionError, InvalidInputError
from .estimators import SquaredRadiusSample

__all__ = ["Dataset", "ingest", "write_csv", "write_json", "SPEC_VERSION"]

SPEC_VERSION = "1"

RECENTER_MODES = ("none", "mean", "median")


@dataclass
class Dataset:
    """An ingested sample plus row-level diagnostics."""

    sample: SquaredRadiusSample
    columns: str  # "x1,x2" or "y"
    recenter: str
    n_rows: int
    rejected_rows: list = field(default_factory=list)  # (row number, reason)


def _parse_rows(path: Path, fields: list[str], threshold: int):
    rows, bad = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in fields if c not in header]
        if missing:
            raise IngestionError(f"{path}: missing required column(s) {missing}; header is {header}")
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.append((lineno, [float(row[c]) for c in fields]))
            except (TypeError, ValueError, KeyError):
                bad.append((lineno, "unparsable"))
    if len(bad) > threshold:
        listing = ", ".join(f"line {r}" for r, _ in bad[:20])
        raise IngestionError(
            f"{path}: {len(bad)} unparsable row(s) exceed the rejection threshold {threshold}: {listing}",
            bad_rows=bad,
        )
    return rows, bad


def ingest(
    path,
    columns: str | None = None,
    recenter: str = "none",
    rejection_threshold: int = 0,
) -> Dataset:
    """Read a CSV of positions or squared radii into a sorted sample.

    Position files may be recentered by subtracting the per-coordinate mean
    or median before squaring.  Rows with nonpositive squared radius are
    dropped and reported; unparsable rows beyond ``rejection_threshold``
    abort ingestion.
    """
    path = Path(path)
    if recenter not in RECENTER_MODES:
        raise InvalidInputError(f"recenter must be one of {RECENTER_MODES}")
    if columns is None:
        with open(path, newline="", encoding="utf-8") as fh:
            header = next(csv.reader(fh), [])
        if "y" in header:
            columns = "y"
        elif "x1" in header and "x2" in header:
            columns = "x1,x2"
        else:
            raise IngestionError(f"{path}: header must name either 'y' or 'x1','x2'; got {header}")
    if columns not in ("y", "x1,x2"):
        raise InvalidInputError("columns must be 'y' or 'x1,x2'")
    if columns == "y" and recenter != "none":
        raise InvalidInputError("recentering applies to position columns only")

    fields = ["y"] if columns == "y" else ["x1", "x2"]
    rows, rejected = _parse_rows(path, fields, rejection_threshold)
    linenos = [r for r, _ in rows]
    values = np.asarray([v for _, v in rows], dtype=float).reshape(len(rows), len(fields))

    if columns == "y":
        yvals = values[:, 0]
    else:
        if recenter == "mean" and len(values):
            values = values - values.mean(axis=0)
        elif recenter == "median" and len(values):
            values = values - np.median(values, axis=0)
        yvals = values[:, 0] ** 2 + values[:, 1] ** 2

    keep = np.isfinite(yvals) & (yvals > 0)
    for lineno, ok in zip(linenos, keep):
        if not ok:
            rejected.append((lineno, "nonpositive squared radius"))
    if not np.any(keep):
        raise IngestionError(f"{path}: no usable rows after rejection", bad_rows=rejected)
    return Dataset(
        sample=SquaredRadiusSample(yvals[keep]),
        columns=columns,
        recenter=recenter,
        n_rows=len(rows),
        rejected_rows=sorted(rejected),
    )


def write_csv(path, header: list[str], rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def write_json(path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
