"""File formats for matrices, models, factorizations, point sets, and curves.

Text formats are comma-separated with floats printed as %.17g, enough
digits to round-trip float64 exactly.  The binary matrix format is the
magic bytes "RBFM", row and column counts as little-endian uint32, then
the entries row-major as little-endian float64.

Structured text layouts (one object per file):

* model:    header ``r,n,m,symmetric,offset``; a line of r weights; r lines
            of row coordinates (n values each); for asymmetric models r
            more lines of column coordinates (m values each).
* svd:      header ``rank,n,m,symmetric``; a line of rank values; rank
            lines holding left vectors (n values each); for asymmetric
            factorizations rank more lines of right vectors (m values).
* points:   header naming columns ``p0,..,p{d-1}`` plus optional ``label``;
            one row per point.
* roc:      header ``threshold,fpr,tpr``; one row per operating point; a
            final row ``auc,<value>``.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

from .analysis import RocCurve
from .datagen import PointCloud
from .model import RbfModel, as_matrix
from .svd import SvdApprox

_MAGIC = b"RBFM"


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _fmt_line(values) -> str:
    return ",".join(_fmt(v) for v in values)


def _parse_line(line: str) -> np.ndarray:
    line = line.strip()
    if not line:
        return np.empty(0)
    return np.array([float(f) for f in line.split(",")])


# -- matrices ---------------------------------------------------------------

def save_matrix_csv(path, matrix) -> None:
    matrix = as_matrix(matrix, "matrix")
    np.savetxt(path, matrix, delimiter=",", fmt="%.17g")


def load_matrix_csv(path) -> np.ndarray:
    return as_matrix(np.loadtxt(path, delimiter=",", ndmin=2), "matrix")


def matrix_to_bytes(matrix) -> bytes:
    """Canonical binary serialization (also the checksum preimage)."""
    matrix = as_matrix(matrix, "matrix")
    n, m = matrix.shape
    header = struct.pack("<4sII", _MAGIC, n, m)
    return header + np.ascontiguousarray(matrix, dtype="<f8").tobytes()


def save_matrix_bin(path, matrix) -> None:
    with open(path, "wb") as fh:
        fh.write(matrix_to_bytes(matrix))


def load_matrix_bin(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[:4] != _MAGIC:
        raise ValueError(f"{path}: not a binary matrix file")
    _, n, m = struct.unpack("<4sII", data[:12])
    if n < 1 or m < 1:
        raise ValueError(f"{path}: bad dimensions {n}x{m}")
    expected = 12 + 8 * n * m
    if len(data) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(data)}")
    entries = np.frombuffer(data, dtype="<f8", offset=12)
    return as_matrix(entries.reshape(n, m), "matrix")


def load_matrix(path) -> np.ndarray:
    """Load either format, sniffing the binary magic bytes."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
    return load_matrix_bin(path) if magic == _MAGIC else load_matrix_csv(path)


def matrix_checksum(matrix) -> str:
    """SHA-256 hex digest of the canonical binary serialization."""
    return hashlib.sha256(matrix_to_bytes(matrix)).hexdigest()


# -- models -----------------------------------------------------------------

def save_model_csv(path, model: RbfModel) -> None:
    lines = [
        f"{model.components},{model.n},{model.m},"
        f"{int(model.symmetric)},{_fmt(model.offset)}",
        _fmt_line(model.weights),
    ]
    lines.extend(_fmt_line(row) for row in model.row_coords)
    if not model.symmetric:
        lines.extend(_fmt_line(row) for row in model.col_coords)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model_csv(path) -> RbfModel:
    with open(path, encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty model file")
    head = lines[0].split(",")
    if len(head) != 5:
        raise ValueError(f"{path}: model header must have 5 fields")
    r, n, m, sym_flag = (int(f) for f in head[:4])
    offset = float(head[4])
    symmetric = bool(sym_flag)
    expected = 2 + r + (0 if symmetric else r)
    if len(lines) < expected:
        raise ValueError(f"{path}: expected {expected} lines, found {len(lines)}")
    weights = _parse_line(lines[1])
    if weights.size != r:
        raise ValueError(f"{path}: expected {r} weights, found {weights.size}")
    row = np.array([_parse_line(lines[2 + k]) for k in range(r)]).reshape(r, n)
    col = None
    if not symmetric:
        col = np.array(
            [_parse_line(lines[2 + r + k]) for k in range(r)]
        ).reshape(r, m)
    return RbfModel(row, weights, offset, col)


# -- factorizations ---------------------------------------------------------

def save_svd_csv(path, approx: SvdApprox) -> None:
    lines = [
        f"{approx.rank},{approx.n},{approx.m},{int(approx.symmetric)}",
        _fmt_line(approx.values),
    ]
    lines.extend(_fmt_line(approx.left[:, k]) for k in range(approx.rank))
    if not approx.symmetric:
        lines.extend(_fmt_line(approx.right[:, k]) for k in range(approx.rank))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_svd_csv(path) -> SvdApprox:
    with open(path, encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty factorization file")
    head = lines[0].split(",")
    if len(head) != 4:
        raise ValueError(f"{path}: factorization header must have 4 fields")
    rank, n, m, sym_flag = (int(f) for f in head)
    symmetric = bool(sym_flag)
    expected = 2 + rank + (0 if symmetric else rank)
    if len(lines) < expected:
        raise ValueError(f"{path}: expected {expected} lines, found {len(lines)}")
    values = _parse_line(lines[1])
    if values.size != rank:
        raise ValueError(f"{path}: expected {rank} values, found {values.size}")
    left = np.array([_parse_line(lines[2 + k]) for k in range(rank)]).reshape(rank, n).T
    if symmetric:
        return SvdApprox(left, values, left, symmetric=True)
    right = (
        np.array([_parse_line(lines[2 + rank + k]) for k in range(rank)])
        .reshape(rank, m)
        .T
    )
    return SvdApprox(left, values, right, symmetric=False)


# -- point clouds -----------------------------------------------------------

def save_points_csv(path, cloud: PointCloud) -> None:
    dim = cloud.points.shape[1]
    names = [f"p{c}" for c in range(dim)]
    rows = cloud.points
    if cloud.labels is not None:
        names.append("label")
        rows = np.column_stack((cloud.points, cloud.labels))
    lines = [",".join(names)]
    lines.extend(_fmt_line(row) for row in rows)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_points_csv(path) -> PointCloud:
    with open(path, encoding="ascii") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    if len(lines) < 2:
        raise ValueError(f"{path}: point file needs a header and data rows")
    names = lines[0].split(",")
    labeled = names[-1] == "label"
    data = np.array([_parse_line(line) for line in lines[1:]])
    if data.shape[1] != len(names):
        raise ValueError(f"{path}: rows do not match the header")
    if labeled:
        return PointCloud(data[:, :-1], labels=data[:, -1])
    return PointCloud(data)


# -- roc curves -------------------------------------------------------------

def save_roc_csv(path, curve: RocCurve) -> None:
    lines = ["threshold,fpr,tpr"]
    lines.extend(
        f"{_fmt(t)},{_fmt(f)},{_fmt(r)}"
        for t, f, r in zip(curve.thresholds, curve.fpr, curve.tpr)
    )
    lines.append(f"auc,{_fmt(curve.auc)}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_roc_csv(path) -> RocCurve:
    with open(path, encoding="ascii") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    if len(lines) < 3 or lines[0] != "threshold,fpr,tpr":
        raise ValueError(f"{path}: not a roc curve file")
    footer = lines[-1].split(",")
    if len(footer) != 2 or footer[0] != "auc":
        raise ValueError(f"{path}: missing auc footer")
    data = np.array([_parse_line(line) for line in lines[1:-1]])
    return RocCurve(data[:, 0], data[:, 1], data[:, 2], float(footer[1]))
