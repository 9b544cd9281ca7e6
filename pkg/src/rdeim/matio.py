"""File formats: the RDMXMAT1 binary matrix container and CSV result tables.

RDMXMAT1 layout: 8-byte magic b"RDMXMAT1", then rows and cols as unsigned
64-bit little-endian integers, then rows*cols float64 little-endian values
in column-major order. Round-trips are bit-exact.
"""

import struct
from dataclasses import dataclass, field

import numpy as np

from ._util import as_matrix

MAGIC = b"RDMXMAT1"


def write_matrix(path, A):
    """Write a dense matrix to an RDMXMAT1 file."""
    A = as_matrix(A, "A")
    rows, cols = A.shape
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<QQ", rows, cols))
        fh.write(np.asfortranarray(A, dtype="<f8").tobytes(order="F"))


def read_matrix(path):
    """Read an RDMXMAT1 file back into an ndarray.

    Raises ValueError naming the path on a bad magic, a truncated payload,
    or non-finite entries.
    """
    with open(path, "rb") as fh:
        head = fh.read(8)
        if head != MAGIC:
            raise ValueError(f"{path}: not an RDMXMAT1 file (magic {head!r})")
        dims = fh.read(16)
        if len(dims) != 16:
            raise ValueError(f"{path}: truncated header")
        rows, cols = struct.unpack("<QQ", dims)
        payload = fh.read()
    expected = 8 * rows * cols
    if len(payload) != expected:
        raise ValueError(
            f"{path}: payload holds {len(payload)} bytes, expected {expected} "
            f"for a {rows} x {cols} matrix"
        )
    data = np.frombuffer(payload, dtype="<f8")
    A = data.reshape((rows, cols), order="F").astype(np.float64)
    if A.size and not np.isfinite(A).all():
        raise ValueError(f"{path}: matrix contains non-finite entries")
    return A


@dataclass
class ResultTable:
    """Column-named result rows plus scalar summary statistics."""

    columns: tuple
    rows: list
    summary: dict = field(default_factory=dict)


def _fmt(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def emit_csv(table, path):
    """Write a ResultTable as CSV with a header row.

    Floats are rendered with shortest round-trip repr, so identical tables
    produce identical bytes.
    """
    lines = [",".join(table.columns)]
    for row in table.rows:
        if len(row) != len(table.columns):
            raise ValueError(
                f"row width {len(row)} does not match header width {len(table.columns)}"
            )
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
