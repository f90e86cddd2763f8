"""CSV and MNIST-IDX ingestion plus draw/summary emission.

All floating-point output uses the shortest round-trippable decimal form,
and every emitted file gets a JSON metadata sidecar recording the seed and
solver configuration needed to reproduce it byte-for-byte.
"""

from __future__ import annotations

import csv
import gzip
import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .objectives import Dataset

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801


class ParseError(ValueError):
    """Malformed input file; the message names the offending location."""


def _format_value(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def read_csv(path: str | Path, response_column: str) -> Dataset:
    """Load a numeric CSV with a header row into a Dataset.

    The named column becomes the response; all other columns form the
    design matrix in file order. Ragged rows, non-numeric cells, and
    non-finite values raise ParseError naming the row and column.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if response_column not in header:
            raise ParseError(f"{path}: response column {response_column!r} not in header {header}")
        rows: list[list[float]] = []
        for i, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ParseError(
                    f"{path}: row {i} has {len(row)} cells, expected {len(header)}"
                )
            parsed = []
            for name, cell in zip(header, row):
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(
                        f"{path}: row {i}, column {name!r}: not a number: {cell!r}"
                    ) from None
                if not math.isfinite(value):
                    raise ParseError(
                        f"{path}: row {i}, column {name!r}: non-finite value {cell!r}"
                    )
                parsed.append(value)
            rows.append(parsed)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    table = np.asarray(rows, dtype=np.float64)
    response_idx = header.index(response_column)
    keep = [j for j in range(len(header)) if j != response_idx]
    return Dataset(
        design=table[:, keep],
        response=table[:, response_idx],
        feature_names=[header[j] for j in keep],
    )


def write_csv(path: str | Path, header: list[str], columns: list[np.ndarray]) -> None:
    """Write columns at full precision (round-trippable shortest repr)."""
    n = len(columns[0])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i in range(n):
            writer.writerow([_format_value(col[i]) for col in columns])


def write_sidecar(path: str | Path, metadata: dict) -> Path:
    """Write the reproducibility sidecar ``<file>.meta.json``."""
    sidecar = Path(str(path) + ".meta.json")
    with open(sidecar, "w") as fh:
        json.dump(metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return sidecar


def write_draws_csv(path: str | Path, draws, names: list[str], metadata: dict) -> None:
    """One row per draw: draw_id followed by one column per coordinate."""
    if isinstance(draws, np.ndarray):
        matrix = np.atleast_2d(draws)
        ids = np.arange(matrix.shape[0])
    else:
        good = [r for r in draws if not r.failed and r.parameters is not None]
        matrix = np.vstack([np.asarray(r.parameters, dtype=np.float64) for r in good])
        ids = np.array([r.draw_id for r in good])
    columns = [ids] + [matrix[:, j] for j in range(matrix.shape[1])]
    write_csv(path, ["draw_id"] + list(names), columns)
    write_sidecar(path, metadata)


def write_summary_json(path: str | Path, summary, metadata: dict) -> None:
    payload = {
        "summary": summary.to_records(),
        "draw_count": summary.draw_count,
        "quantile_method": "linear interpolation of order statistics (type 7)",
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_sidecar(path, metadata)


@dataclass(frozen=True)
class IdxFile:
    """Raw contents of one big-endian IDX container."""

    magic: int
    dims: tuple[int, ...]
    payload: bytes


def read_idx_file(path: str | Path) -> IdxFile:
    """Parse an IDX file (gzip accepted by extension sniffing)."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 4:
        raise ParseError(f"{path}: truncated header")
    magic = struct.unpack(">I", raw[:4])[0]
    if magic == IMAGES_MAGIC:
        ndim = 3
    elif magic == LABELS_MAGIC:
        ndim = 1
    else:
        raise ParseError(f"{path}: unsupported magic 0x{magic:08x}")
    header_len = 4 + 4 * ndim
    if len(raw) < header_len:
        raise ParseError(f"{path}: truncated dimension header")
    dims = struct.unpack(f">{ndim}I", raw[4:header_len])
    payload = raw[header_len:]
    expected = int(np.prod(dims))
    if len(payload) != expected:
        raise ParseError(
            f"{path}: payload has {len(payload)} bytes, expected {expected} from dims {dims}"
        )
    return IdxFile(magic=magic, dims=dims, payload=payload)


def read_idx(path: str | Path) -> np.ndarray:
    """Decode an IDX file to images in [0, 1] (n, rows*cols) or labels 0-9."""
    idx = read_idx_file(path)
    data = np.frombuffer(idx.payload, dtype=np.uint8)
    if idx.magic == IMAGES_MAGIC:
        n, rows, cols = idx.dims
        return data.reshape(n, rows * cols).astype(np.float64) / 255.0
    labels = data.astype(np.int64)
    if labels.size and labels.max() > 9:
        raise ParseError(f"{path}: label {labels.max()} outside 0..9")
    return labels


def write_idx(path: str | Path, array: np.ndarray) -> None:
    """Write images (n, rows, cols) or labels (n,) as uint8 IDX."""
    array = np.asarray(array)
    path = Path(path)
    if array.ndim == 3:
        magic, dims = IMAGES_MAGIC, array.shape
    elif array.ndim == 1:
        magic, dims = LABELS_MAGIC, array.shape
    else:
        raise ValueError("expected images (n, rows, cols) or labels (n,)")
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "wb") as fh:
        fh.write(struct.pack(">I", magic))
        fh.write(struct.pack(f">{len(dims)}I", *dims))
        fh.write(array.astype(np.uint8).tobytes())
