"""File formats: mask lists, matrix grids, reports.

Indices in files are 1-based (matching the usual matrix notation); they are
shifted to the 0-based internal convention on read.  Matrix grids are plain
comma-separated values where an empty cell or ``NaN`` means unobserved.
Numeric text output uses 17 significant digits so values round-trip.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .graph import ObservationMask


def format_float(value: float) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.17g}"


def read_mask_csv(path, n_rows: int | None = None,
                  n_cols: int | None = None) -> tuple[ObservationMask, int]:
    """Read a ``row,col`` mask file; returns (mask, duplicate count).

    Dimensions default to the largest index seen; pass ``n_rows``/``n_cols``
    to pad with trailing unobserved rows or columns.
    """
    pairs: list[tuple[int, int]] = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["row", "col"]:
            raise ValueError(f"{path}: expected header 'row,col'")
        for line_no, fields in enumerate(reader, start=2):
            if not fields or all(not f.strip() for f in fields):
                continue
            try:
                row, col = int(fields[0]), int(fields[1])
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{line_no}: malformed mask row") from exc
            if row < 1 or col < 1:
                raise ValueError(f"{path}:{line_no}: indices are 1-based")
            pairs.append((row - 1, col - 1))
    if not pairs and (n_rows is None or n_cols is None):
        raise ValueError(f"{path}: empty mask needs explicit dimensions")
    inferred_rows = max((i for i, _ in pairs), default=-1) + 1
    inferred_cols = max((j for _, j in pairs), default=-1) + 1
    mask = ObservationMask.from_pairs(n_rows or inferred_rows,
                                      n_cols or inferred_cols, pairs)
    duplicates = len(pairs) - mask.n_observed
    return mask, duplicates


def write_mask_csv(path, mask: ObservationMask) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["row", "col"])
        for i, j in mask.pairs_row_major:
            writer.writerow([i + 1, j + 1])


def read_grid_csv(path) -> np.ndarray:
    """Comma-separated matrix; empty cells and ``nan`` become NaN."""
    rows: list[list[float]] = []
    with open(path, newline="") as handle:
        for line_no, fields in enumerate(csv.reader(handle), start=1):
            # skip blank lines but keep rows of genuinely empty cells
            if not fields or (len(fields) == 1 and not fields[0].strip()):
                continue
            values = []
            for field in fields:
                text = field.strip()
                if not text or text.lower() == "nan":
                    values.append(math.nan)
                elif text.lower() in ("inf", "+inf", "infinity"):
                    values.append(math.inf)
                else:
                    try:
                        values.append(float(text))
                    except ValueError as exc:
                        raise ValueError(
                            f"{path}:{line_no}: bad cell {text!r}") from exc
            rows.append(values)
    if not rows:
        raise ValueError(f"{path}: empty grid")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: ragged rows (widths {sorted(widths)})")
    return np.array(rows, dtype=float)


def write_grid_csv(path, matrix) -> None:
    arr = np.asarray(matrix, dtype=float)
    with open(path, "w", newline="") as handle:
        for row in arr:
            handle.write(",".join(format_float(v) for v in row))
            handle.write("\n")


def resistance_csv_text(resistances: np.ndarray,
                        pairs=None) -> str:
    """CSV body ``row,col,effective_resistance`` (1-based, inf allowed)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["row", "col", "effective_resistance"])
    n, m = resistances.shape
    if pairs is None:
        pairs = ((i, j) for i in range(n) for j in range(m))
    for i, j in pairs:
        writer.writerow([i + 1, j + 1, format_float(float(resistances[i, j]))])
    return buffer.getvalue()


def matrix_to_jsonable(matrix, keep=None):
    """Nested lists with ``None`` for non-finite or masked-out cells."""
    arr = np.asarray(matrix, dtype=float)
    result = []
    for i in range(arr.shape[0]):
        row = []
        for j in range(arr.shape[1]):
            value = arr[i, j]
            masked = keep is not None and not keep[i, j]
            row.append(None if masked or not math.isfinite(value) else float(value))
        result.append(row)
    return result


def write_json(path, payload) -> None:
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def read_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    mapping: dict[str, str] = {}
    with open(path) as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected 'key = value'")
            key, value = line.split("=", 1)
            mapping[key.strip().lower()] = value.strip()
    return mapping
