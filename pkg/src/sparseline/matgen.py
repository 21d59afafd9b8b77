"""Generation and persistence of the shared (Q, A) key pair.

Two constructions are provided.  The orthogonal one splits an exact
orthonormal basis (from the eigendecomposition of a random Gram matrix)
into encoder columns Q and decoder rows A, so A @ Q = 0 to machine
precision.  The "impossible" one runs at redundancy 1 + delta', where
exact orthogonality cannot hold: Q is sampled Gaussian and each decoder
row is grown by maximizing a fresh random objective over the kernel
slice of the [-1, 1] box, giving A @ Q ~ 0 within solver tolerance.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import linalg
from .errors import CorruptKey, DegenerateSample, InvalidParameter, InvariantViolation, LpFailed
from .lp import LpStatus, build_near_orthogonality_lp, solve_lp

ORTHOGONAL = "orthogonal"
IMPOSSIBLE = "impossible"

ORTHO_RESIDUAL_BOUND = 1e-9
IMPOSSIBLE_RESIDUAL_BOUND = 1e-8
GENERATOR_VERSION = 1

_KEY_MAGIC = b"SLKY"
_KEY_VERSION = 1


def _round_half_away(value: float) -> int:
    return int(np.copysign(np.floor(abs(value) + 0.5), value))


def derive_seed(*parts) -> int:
    """Deterministically mix integer parts into a 64-bit child seed."""
    mixed = np.random.SeedSequence(tuple(int(p) for p in parts))
    return int(mixed.generate_state(1, dtype=np.uint64)[0])


def orthogonal_block_length(d: int, redundancy: float) -> int:
    """Encoded length n = round(redundancy * d)."""
    return _round_half_away(redundancy * d)


def impossible_block_length(m: int, delta_prime: float) -> int:
    """Encoded length n = round((1 + delta_prime) * m)."""
    return _round_half_away((1.0 + delta_prime) * m)


@dataclass(frozen=True)
class CodeKey:
    """Encoder matrix Q (n x d), decoder matrix A (m x n), and metadata."""

    Q: np.ndarray
    A: np.ndarray
    regime: str
    ortho_residual: float
    seed: object
    rank_warning: bool = False

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    @property
    def message_bits(self) -> int:
        return self.Q.shape[1]

    def validate(self) -> None:
        """Re-check the regime invariants; raises InvariantViolation."""
        q, a = self.Q, self.A
        if a.shape[1] != q.shape[0]:
            raise InvariantViolation("decoder columns must match encoder rows")
        residual = float(np.max(np.abs(a @ q)))
        if self.regime == ORTHOGONAL:
            n = q.shape[0]
            if a.shape[0] + q.shape[1] != n:
                raise InvariantViolation("orthogonal regime needs m + d = n")
            checks = {
                "A @ Q": residual,
                "Q^T Q - I": float(np.max(np.abs(q.T @ q - np.eye(q.shape[1])))),
                "A @ A^T - I": float(np.max(np.abs(a @ a.T - np.eye(a.shape[0])))),
            }
            for name, value in checks.items():
                if value > ORTHO_RESIDUAL_BOUND:
                    raise InvariantViolation(f"|{name}| = {value:.3e} exceeds 1e-9")
        elif self.regime == IMPOSSIBLE:
            if residual > IMPOSSIBLE_RESIDUAL_BOUND:
                raise InvariantViolation(f"|A @ Q| = {residual:.3e} exceeds 1e-8")
            if linalg.numerical_rank(q) < q.shape[1]:
                raise InvariantViolation("encoder matrix lost full column rank")
        else:
            raise InvariantViolation(f"unknown regime {self.regime!r}")


def generate_orthogonal_key(d: int, redundancy: float, seed=None) -> CodeKey:
    """Exactly orthogonal key: n = round(redundancy * d) basis vectors
    split into d encoder columns and n - d decoder rows."""
    if d < 8:
        raise InvalidParameter("message bit count d must be at least 8")
    if redundancy <= 1.0:
        raise InvalidParameter("redundancy must exceed 1")
    n = orthogonal_block_length(d, redundancy)
    rng = np.random.default_rng(seed)
    last_error = None
    for _attempt in range(3):
        m_sample = rng.uniform(-1.0, 1.0, size=(n, n))
        try:
            _values, vectors = linalg.sym_eigendecomposition(m_sample.T @ m_sample)
        except Exception as exc:  # resample on numerical failure
            last_error = exc
            continue
        q = np.ascontiguousarray(vectors[:, :d])
        a = np.ascontiguousarray(vectors[:, d:].T)
        key = CodeKey(
            Q=q,
            A=a,
            regime=ORTHOGONAL,
            ortho_residual=float(np.max(np.abs(a @ q))),
            seed=seed,
        )
        try:
            key.validate()
        except InvariantViolation as exc:
            last_error = exc
            continue
        return key
    raise DegenerateSample(f"orthogonal key generation failed 3 times: {last_error}")


def generate_impossible_key(m: int, delta_prime: float, seed=None) -> CodeKey:
    """Near-orthogonal key at redundancy 1 + delta_prime.

    Q is n x m standard normal (full column rank almost surely) with
    n = round((1 + delta_prime) * m); each of the m decoder rows solves
    a fresh random-objective LP over {a in [-1,1]^n : a @ Q = 0}.
    """
    if m < 8 or m % 8 != 0:
        raise InvalidParameter("decoder row count m must be a multiple of 8, at least 8")
    if delta_prime <= 0.0:
        raise InvalidParameter("delta_prime must be positive")
    n = impossible_block_length(m, delta_prime)
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(size=(n, m))

    base = seed if seed is not None else int(np.random.SeedSequence().generate_state(1)[0])
    rows = np.empty((m, n))
    for row_index in range(m):
        rows[row_index] = _solve_decoder_row(q, base, row_index)

    a = rows
    residual = float(np.max(np.abs(a @ q)))
    rank_warning = linalg.numerical_rank(a) < m
    key = CodeKey(
        Q=q,
        A=a,
        regime=IMPOSSIBLE,
        ortho_residual=residual,
        seed=seed,
        rank_warning=rank_warning,
    )
    key.validate()
    return key


def _solve_decoder_row(q: np.ndarray, base_seed: int, row_index: int) -> np.ndarray:
    """One near-orthogonal row; retries once with fresh costs if the LP
    lands on the trivial all-zero vertex."""
    for attempt in range(2):
        cost_seed = derive_seed(base_seed, row_index, attempt)
        program = build_near_orthogonality_lp(q.T, cost_seed)
        solution = solve_lp(program, feas_tol=1e-9)
        if solution.status is not LpStatus.OPTIMAL:
            raise LpFailed(
                f"row {row_index}: near-orthogonality LP ended {solution.status.value}"
            )
        if np.max(np.abs(solution.x)) > 1e-12:
            return solution.x
    raise LpFailed(f"row {row_index}: LP optimum is the zero vector twice in a row")


# ------------------------------------------------------------ key files
#
# Container layout, little-endian: magic "SLKY", u32 version, u32 header
# length, JSON header, SLMX block for Q, SLMX block for A, then a
# sha256 digest over everything before it.

_KEY_PREFIX = struct.Struct("<4sII")


def save_key(key: CodeKey, path) -> None:
    header = json.dumps(
        {
            "regime": key.regime,
            "dim": key.message_bits,
            "n": key.n,
            "seed": key.seed,
            "ortho_residual": key.ortho_residual,
            "rank_warning": key.rank_warning,
            "generator_version": GENERATOR_VERSION,
        }
    ).encode("utf-8")
    body = (
        _KEY_PREFIX.pack(_KEY_MAGIC, _KEY_VERSION, len(header))
        + header
        + linalg.pack_matrix(key.Q)
        + linalg.pack_matrix(key.A)
    )
    Path(path).write_bytes(body + hashlib.sha256(body).digest())


def load_key(path) -> CodeKey:
    """Read a key file, verifying the checksum and the regime invariants."""
    data = Path(path).read_bytes()
    if len(data) < _KEY_PREFIX.size + 32:
        raise CorruptKey("key file truncated")
    body, digest = data[:-32], data[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise CorruptKey("key file checksum mismatch")
    magic, version, header_len = _KEY_PREFIX.unpack_from(body, 0)
    if magic != _KEY_MAGIC or version != _KEY_VERSION:
        raise CorruptKey("not a sparseline key file")
    try:
        header = json.loads(body[_KEY_PREFIX.size : _KEY_PREFIX.size + header_len])
        q, offset = linalg.unpack_matrix(body, _KEY_PREFIX.size + header_len)
        a, offset = linalg.unpack_matrix(body, offset)
    except Exception as exc:
        raise CorruptKey(f"malformed key payload: {exc}") from exc
    if offset != len(body):
        raise CorruptKey("trailing bytes in key payload")
    key = CodeKey(
        Q=q,
        A=a,
        regime=header.get("regime", ""),
        ortho_residual=float(header.get("ortho_residual", np.inf)),
        seed=header.get("seed"),
        rank_warning=bool(header.get("rank_warning", False)),
    )
    key.validate()
    return key
