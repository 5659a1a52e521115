"""File formats: 8-bit binary PGM images, CSV traces and JSON summaries."""

import csv
import json
import math
from pathlib import Path

import numpy as np

__all__ = [
    "read_pgm",
    "write_pgm",
    "TRACE_HEADER",
    "write_trace_csv",
    "read_trace_csv",
    "write_times_csv",
    "write_json",
]

TRACE_HEADER = ["k", "psi", "loss", "log10_gap", "cossim_h", "cossim_x",
                "restart", "step"]


def _pgm_tokens(data):
    """Split a PGM header into its four tokens and the raster offset."""
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PGM header")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def read_pgm(path):
    """Read an 8-bit P5 PGM and return floats in ``[0, 1]``."""
    data = Path(path).read_bytes()
    tokens, offset = _pgm_tokens(data)
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    width, height, maxval = (int(t) for t in tokens[1:])
    if not 0 < maxval < 256:
        raise ValueError(f"{path}: only 8-bit PGM is supported")
    raster = np.frombuffer(data, dtype=np.uint8, count=width * height,
                           offset=offset)
    return raster.reshape(height, width).astype(float) / maxval


def write_pgm(path, array):
    """Write ``array`` as P5, mapping ``[min, max]`` linearly onto ``[0, 255]``.

    A ``<path>.json`` sidecar records ``min`` and ``max`` so the mapping can
    be inverted.
    """
    array = np.asarray(array, dtype=float)
    if array.ndim != 2:
        raise ValueError("PGM images must be 2-D")
    lo = float(array.min())
    hi = float(array.max())
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    pixels = np.rint((array - lo) * scale).astype(np.uint8)
    height, width = pixels.shape
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())
    write_json(path.with_suffix(path.suffix + ".json"),
               {"min": lo, "max": hi, "width": width, "height": height})


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def _log10_gap(psi, psi_true):
    if psi_true is None:
        return math.nan
    gap = abs(psi - psi_true)
    return math.log10(gap) if gap > 0 else -math.inf


def write_trace_csv(path, trace, psi_true=None):
    """One row per iteration; floats are written round-trip exact."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for rec in trace:
            writer.writerow([_fmt(v) for v in (
                rec.k, rec.psi, rec.loss, _log10_gap(rec.psi, psi_true),
                rec.cossim_h, rec.cossim_x, rec.restart, rec.step)])


def read_trace_csv(path):
    """Read a trace CSV back into a dict of numpy arrays keyed by column."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != TRACE_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = [[float(v) for v in row] for row in reader]
    cols = np.array(rows).T if rows else np.zeros((len(header), 0))
    return {name: cols[i] for i, name in enumerate(header)}


def write_times_csv(path, trace):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "seconds"])
        for rec in trace:
            writer.writerow([rec.k, _fmt(rec.seconds)])


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
