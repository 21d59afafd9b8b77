"""Dense linear algebra primitives and the SLMX matrix file format.

Matrices and vectors are plain float64 numpy arrays (row-major, 2-D and
1-D respectively); the validators below enforce finiteness and shape on
construction.  Heavy factorizations delegate to LAPACK via numpy/scipy.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    InvalidParameter,
    NotSymmetric,
    RankDeficient,
)

DEFAULT_RANK_TOL = 1e-10

SLMX_MAGIC = b"SLMX"
SLMX_VERSION = 1


def as_matrix(a) -> np.ndarray:
    """Validate and return ``a`` as a 2-D float64 array with finite entries."""
    arr = np.ascontiguousarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D array, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatch(f"matrix must be non-empty, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise InvalidParameter("matrix entries must be finite")
    return arr


def as_vector(v) -> np.ndarray:
    """Validate and return ``v`` as a 1-D float64 array with finite entries."""
    arr = np.ascontiguousarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D array, got ndim={arr.ndim}")
    if not np.isfinite(arr).all():
        raise InvalidParameter("vector entries must be finite")
    return arr


def matvec(a, x) -> np.ndarray:
    """Matrix-vector product with shape checking."""
    a = as_matrix(a)
    x = as_vector(x)
    if a.shape[1] != x.shape[0]:
        raise DimensionMismatch(
            f"matrix has {a.shape[1]} columns but vector has dim {x.shape[0]}"
        )
    return a @ x


def sym_eigendecomposition(s) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.

    The input must be square and symmetric to 1e-12 relative tolerance.
    Columns of the returned matrix are the eigenvectors.
    """
    s = as_matrix(s)
    if s.shape[0] != s.shape[1]:
        raise NotSymmetric(f"matrix is {s.shape[0]}x{s.shape[1]}, not square")
    scale = max(1.0, float(np.abs(s).max()))
    if np.abs(s - s.T).max() > 1e-12 * scale:
        raise NotSymmetric("matrix is not symmetric within 1e-12 relative tolerance")
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(s)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigendecomposition failed: {exc}") from exc
    return eigenvalues, eigenvectors


def numerical_rank(a, tol: float = DEFAULT_RANK_TOL) -> int:
    """Count singular values exceeding ``tol`` times the largest one."""
    if tol <= 0:
        raise InvalidParameter("rank tolerance must be positive")
    a = as_matrix(a)
    singular_values = np.linalg.svd(a, compute_uv=False)
    largest = singular_values[0] if singular_values.size else 0.0
    if largest == 0.0:
        return 0
    return int(np.count_nonzero(singular_values > tol * largest))


def pseudoinverse_apply(q, z) -> np.ndarray:
    """Least-squares solution of Q w = z for a full-column-rank Q.

    Computed through a QR factorization of Q rather than the normal
    equations; raises RankDeficient when the numerical rank of Q is
    below its column count.
    """
    q = as_matrix(q)
    z = as_vector(z)
    if q.shape[0] != z.shape[0]:
        raise DimensionMismatch(
            f"matrix has {q.shape[0]} rows but vector has dim {z.shape[0]}"
        )
    if numerical_rank(q) < q.shape[1]:
        raise RankDeficient("matrix does not have full column rank")
    factor_q, factor_r = np.linalg.qr(q, mode="reduced")
    return scipy.linalg.solve_triangular(factor_r, factor_q.T @ z, lower=False)


def round_cap(v, lo: float, hi: float) -> np.ndarray:
    """Round each component to the nearest integer (ties away from zero),
    then clamp into [lo, hi]."""
    if lo > hi:
        raise InvalidParameter(f"lower cap {lo} exceeds upper cap {hi}")
    v = as_vector(v)
    rounded = np.copysign(np.floor(np.abs(v) + 0.5), v)
    return np.clip(rounded, lo, hi)


# ---------------------------------------------------------------- SLMX format
#
# Binary layout, little-endian: magic "SLMX", u32 version, u64 rows,
# u64 cols, then rows*cols float64 entries in row-major order.

_HEADER = struct.Struct("<4sIQQ")


def pack_matrix(a) -> bytes:
    """Serialize a matrix to SLMX bytes."""
    a = as_matrix(a)
    header = _HEADER.pack(SLMX_MAGIC, SLMX_VERSION, a.shape[0], a.shape[1])
    return header + a.astype("<f8", copy=False).tobytes()


def unpack_matrix(data: bytes, offset: int = 0) -> tuple[np.ndarray, int]:
    """Deserialize one SLMX block from ``data`` starting at ``offset``.

    Returns the matrix and the offset just past the block.
    """
    if len(data) - offset < _HEADER.size:
        raise InvalidParameter("SLMX block truncated: header missing")
    magic, version, rows, cols = _HEADER.unpack_from(data, offset)
    if magic != SLMX_MAGIC:
        raise InvalidParameter(f"bad SLMX magic {magic!r}")
    if version != SLMX_VERSION:
        raise InvalidParameter(f"unsupported SLMX version {version}")
    start = offset + _HEADER.size
    nbytes = rows * cols * 8
    if len(data) - start < nbytes:
        raise InvalidParameter("SLMX block truncated: payload missing")
    flat = np.frombuffer(data, dtype="<f8", count=rows * cols, offset=start)
    matrix = as_matrix(flat.reshape(rows, cols))
    return matrix, start + nbytes


def save_matrix(path, a) -> None:
    Path(path).write_bytes(pack_matrix(a))


def load_matrix(path) -> np.ndarray:
    data = Path(path).read_bytes()
    matrix, end = unpack_matrix(data)
    if end != len(data):
        raise InvalidParameter(f"{len(data) - end} trailing bytes after SLMX block")
    return matrix


def save_matrix_csv(path, a) -> None:
    """Plain-text export for debugging; one row per line."""
    np.savetxt(path, as_matrix(a), delimiter=",", fmt="%.17g")


def load_matrix_csv(path) -> np.ndarray:
    return as_matrix(np.atleast_2d(np.loadtxt(path, delimiter=",")))
