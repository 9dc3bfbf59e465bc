"""Dataset ingestion, result persistence, and image rendering.

Formats: numeric CSV (comma-separated, period decimal, newline rows); PGM
P2/P5 grayscale images with maxval up to 65535; line-delimited benchmark
record files with a ``#nbmf-records v1`` header.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .core import (
    DimensionError,
    EmptyInputError,
    ParseError,
    SchemaVersionError,
    ValidationError,
    as_matrix,
)
from .bench import TttRecord

RECORDS_HEADER = "#nbmf-records v1"


# ---------------------------------------------------------------------------
# CSV matrices
# ---------------------------------------------------------------------------

def load_csv_matrix(path, require_nonnegative: bool = False) -> np.ndarray:
    """Parse a rectangular numeric CSV into a row-major matrix.

    With ``require_nonnegative`` the loader rejects NaN, infinite, and
    negative cells, naming the offending cell; use it when the matrix is
    destined to be a factorization input.
    """
    rows = []
    width = None
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise ParseError(
                f"expected {width} columns, found {len(cells)}", line=lineno)
        parsed = []
        for col, cell in enumerate(cells):
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(
                    f"column {col + 1}: {cell.strip()!r} is not a number",
                    line=lineno) from None
            if require_nonnegative and not (value >= 0 and np.isfinite(value)):
                raise ParseError(
                    f"column {col + 1}: value {cell.strip()} not allowed "
                    "(matrix must be finite and nonnegative)", line=lineno)
            parsed.append(value)
        rows.append(parsed)
    if not rows:
        raise EmptyInputError(f"{path} contains no data rows")
    return np.array(rows, dtype=np.float64)


def write_csv_matrix(matrix, path) -> None:
    """Write with shortest round-trip float formatting (read-back exact)."""
    matrix = as_matrix(matrix, "matrix")
    with open(path, "w", encoding="ascii") as fh:
        for row in matrix:
            fh.write(",".join(repr(float(x)) for x in row))
            fh.write("\n")


# ---------------------------------------------------------------------------
# PGM images
# ---------------------------------------------------------------------------

def _read_pgm_tokens(data: bytes, count: int):
    """Header tokens: whitespace-separated, ``#`` comments to end of line."""
    tokens = []
    i = 0
    n = len(data)
    while len(tokens) < count and i < n:
        c = data[i:i + 1]
        if c == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
        elif c.isspace():
            i += 1
        else:
            start = i
            while i < n and not data[i:i + 1].isspace() and data[i:i + 1] != b"#":
                i += 1
            tokens.append(data[start:i])
    return tokens, i


def read_pgm(path) -> tuple[np.ndarray, int]:
    """Read a P2 (ASCII) or P5 (binary) PGM; returns (pixels, maxval) with
    pixels shaped (height, width) as unsigned integers."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, pos = _read_pgm_tokens(data, 4)
    if len(tokens) < 4:
        raise ParseError(f"{path}: truncated PGM header")
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise ParseError(f"{path}: not a PGM file (magic {magic!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError:
        raise ParseError(f"{path}: non-numeric PGM header fields") from None
    if width < 1 or height < 1:
        raise ParseError(f"{path}: invalid dimensions {width}x{height}")
    if not 0 < maxval <= 65535:
        raise ParseError(f"{path}: maxval {maxval} out of range (1..65535)")
    count = width * height
    if magic == b"P5":
        raster = data[pos + 1:]  # single whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
        expected = count * dtype.itemsize
        if len(raster) < expected:
            raise ParseError(f"{path}: raster truncated "
                             f"({len(raster)} bytes, expected {expected})")
        pixels = np.frombuffer(raster[:expected], dtype=dtype).astype(np.uint16)
    else:
        body = data[pos:].split()
        if len(body) < count:
            raise ParseError(f"{path}: raster truncated "
                             f"({len(body)} samples, expected {count})")
        try:
            pixels = np.array([int(t) for t in body[:count]], dtype=np.uint16)
        except ValueError:
            raise ParseError(f"{path}: non-numeric P2 sample") from None
    if pixels.max(initial=0) > maxval:
        raise ParseError(f"{path}: sample exceeds declared maxval {maxval}")
    return pixels.reshape(height, width), maxval


def write_pgm(pixels, path, maxval: int = 255, binary: bool = True,
              comment: str | None = None) -> None:
    pixels = np.asarray(pixels)
    if pixels.ndim != 2:
        raise DimensionError(f"pixels must be 2-D, got shape {pixels.shape}")
    if not 0 < maxval <= 65535:
        raise ValidationError(f"maxval {maxval} out of range (1..65535)")
    if pixels.min(initial=0) < 0 or pixels.max(initial=0) > maxval:
        raise ValidationError("pixel values must lie in [0, maxval]")
    height, width = pixels.shape
    header = f"{'P5' if binary else 'P2'}\n"
    if comment:
        header += "".join(f"# {line}\n" for line in comment.splitlines())
    header += f"{width} {height}\n{maxval}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        if binary:
            dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
            fh.write(pixels.astype(dtype).tobytes())
        else:
            body = "\n".join(" ".join(str(int(v)) for v in row) for row in pixels)
            fh.write(body.encode("ascii") + b"\n")


@dataclass(frozen=True)
class ImageDataset:
    """A directory of same-size grayscale images flattened into a matrix:
    one column per image, pixels scaled to [0, 1], row-major within each
    image (pixel (y, x) lands at row y*width + x)."""

    image_width: int
    image_height: int
    count: int
    matrix: np.ndarray


def load_pgm_directory(path) -> ImageDataset:
    """Load every .pgm file under ``path`` (sorted by filename)."""
    try:
        names = sorted(f for f in os.listdir(path) if f.lower().endswith(".pgm"))
    except OSError as exc:
        raise ParseError(f"cannot list {path}: {exc.strerror}") from exc
    if not names:
        raise EmptyInputError(f"no .pgm files found in {path}")
    columns = []
    shape = None
    for name in names:
        pixels, maxval = read_pgm(os.path.join(path, name))
        if shape is None:
            shape = pixels.shape
        elif pixels.shape != shape:
            raise DimensionError(
                f"{name} is {pixels.shape[1]}x{pixels.shape[0]}, expected "
                f"{shape[1]}x{shape[0]} like the rest of the directory")
        columns.append(pixels.reshape(-1).astype(np.float64) / maxval)
    height, width = shape
    return ImageDataset(
        image_width=width,
        image_height=height,
        count=len(names),
        matrix=np.column_stack(columns),
    )


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

CONTRAST_MODES = ("absolute", "rescaled")


def _quantize(img01: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(img01 * 255.0), 0, 255).astype(np.uint16)


def render_feature_grid(W, image_width: int, image_height: int,
                        grid_cols: int, contrast: str = "absolute"):
    """Tile the k columns of W as images, row-major in the grid, with
    one-pixel white separators.  Returns (pixels, metadata).

    ``absolute`` maps [0, scale] to [black, white] where scale is 1 when
    every entry fits in [0, 1] and the global maximum otherwise (recorded
    in the metadata).  ``rescaled`` stretches each feature's own range to
    full contrast; a constant feature renders black.
    """
    W = as_matrix(W, "W")
    n, k = W.shape
    if n != image_width * image_height:
        raise DimensionError(
            f"W has {n} rows, expected {image_width}x{image_height}="
            f"{image_width * image_height}")
    if contrast not in CONTRAST_MODES:
        raise ValidationError(f"contrast must be one of {CONTRAST_MODES}")
    if grid_cols < 1:
        raise ValidationError("grid_cols must be >= 1")
    grid_rows = -(-k // grid_cols)
    out_h = grid_rows * image_height + (grid_rows - 1)
    out_w = grid_cols * image_width + (grid_cols - 1)
    canvas = np.full((out_h, out_w), 255, dtype=np.uint16)
    global_max = float(W.max()) if W.size else 0.0
    scale = 1.0 if global_max <= 1.0 else global_max
    for j in range(grid_rows * grid_cols):
        gy, gx = divmod(j, grid_cols)
        y0 = gy * (image_height + 1)
        x0 = gx * (image_width + 1)
        if j >= k:
            tile01 = np.zeros((image_height, image_width))
        else:
            feat = W[:, j].reshape(image_height, image_width)
            if contrast == "absolute":
                tile01 = feat / scale if scale > 0 else feat
            else:
                lo, hi = float(feat.min()), float(feat.max())
                tile01 = (feat - lo) / (hi - lo) if hi > lo else np.zeros_like(feat)
        canvas[y0:y0 + image_height, x0:x0 + image_width] = _quantize(tile01)
    meta = {
        "contrast": contrast,
        "grid": (grid_rows, grid_cols),
        "tile": (image_width, image_height),
        "scale": scale if contrast == "absolute" else None,
    }
    return canvas, meta


def render_reconstruction(v_col, W, h_col, image_width: int, image_height: int):
    """(original, reconstruction, selected feature indices).

    The reconstruction W @ h is clamped to [0, 1] before quantization;
    the selected indices are the positions of set bits in h.
    """
    W = as_matrix(W, "W")
    v = np.asarray(v_col, dtype=np.float64).reshape(-1)
    h = np.asarray(h_col).reshape(-1)
    n = image_width * image_height
    if W.shape[0] != n or v.shape[0] != n:
        raise DimensionError(
            f"image pixels {n} do not match W rows {W.shape[0]} / column "
            f"length {v.shape[0]}")
    if h.shape[0] != W.shape[1]:
        raise DimensionError(
            f"h has length {h.shape[0]}, expected {W.shape[1]}")
    recon = np.clip(W @ h.astype(np.float64), 0.0, 1.0)
    original = _quantize(np.clip(v, 0.0, 1.0).reshape(image_height, image_width))
    reconstruction = _quantize(recon.reshape(image_height, image_width))
    selected = [int(i) for i in np.flatnonzero(h)]
    return original, reconstruction, selected


# ---------------------------------------------------------------------------
# Benchmark record files
# ---------------------------------------------------------------------------

def write_records(records, path) -> None:
    """One schema-versioned header line, then one tab-separated record per
    line; floats use shortest round-trip formatting."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(RECORDS_HEADER + "\n")
        for rec in records:
            fh.write("\t".join((
                rec.instance_id,
                rec.challenger_name,
                repr(float(rec.target_energy)),
                repr(float(rec.time_to_target_us)),
                "1" if rec.capped else "0",
                repr(float(rec.reference_time_us)),
            )) + "\n")


def read_records(path) -> list[TttRecord]:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise SchemaVersionError(f"{path} is empty, expected {RECORDS_HEADER!r}")
    if lines[0] != RECORDS_HEADER:
        raise SchemaVersionError(
            f"{path} declares {lines[0]!r}, expected {RECORDS_HEADER!r}")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 6:
            raise ParseError(f"expected 6 fields, found {len(fields)}", line=lineno)
        try:
            records.append(TttRecord(
                instance_id=fields[0],
                challenger_name=fields[1],
                target_energy=float(fields[2]),
                time_to_target_us=float(fields[3]),
                capped=fields[4] == "1",
                reference_time_us=float(fields[5]),
            ))
        except ValueError:
            raise ParseError("malformed numeric field", line=lineno) from None
    return records
