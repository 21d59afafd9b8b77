"""Sender and receiver: encode text, decode a corrupted transmission.

Decoding recovers the sparse channel-error vector by l1 minimization
(optionally after projecting the LP data to a lower dimension), subtracts
it, and maps the cleaned vector back to bits through the encoder's
least-squares left inverse followed by rounding and capping into {0, 1}.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel
from .codec import bits_to_string, char_distance, string_to_bits
from .errors import DimensionMismatch, MessageLengthMismatch
from .linalg import as_vector, pseudoinverse_apply, round_cap
from .lp import (
    LpStatus,
    basis_pursuit_solution,
    build_basis_pursuit,
    solve_lp,
)
from .matgen import CodeKey
from .rproj import (
    DEFAULT_ALPHA,
    DEFAULT_EPSILON,
    DEFAULT_JLL_CONSTANT,
    Projector,
    jll_dimension,
    project_lp_data,
    sample_projector,
)

ORIGINAL = "original"
PROJECTED = "projected"


@dataclass(frozen=True)
class DecodeReport:
    """Outcome of one decode: text, LP diagnostics, and wall-clock times.

    ``char_errors`` is filled by harnesses that know the original
    message; a bare decode leaves it None.
    """

    decoded_text: str
    char_errors: int | None
    variant: str
    lp_status: LpStatus
    solve_seconds: float
    total_seconds: float
    projector_meta: dict | None = None


def encode(key: CodeKey, text: str) -> np.ndarray:
    """z = Q w for the bit vector w of ``text``."""
    bits = string_to_bits(text)
    if bits.shape[0] != key.message_bits:
        raise MessageLengthMismatch(
            f"message is {bits.shape[0]} bits but the key encodes {key.message_bits}"
        )
    return key.Q @ bits


def default_projector_for(
    key: CodeKey,
    epsilon: float = DEFAULT_EPSILON,
    alpha: float = DEFAULT_ALPHA,
    jll_constant: float = DEFAULT_JLL_CONSTANT,
    seed=None,
) -> Projector:
    """Fresh projector sized for the key's decoding LP.

    The projected dimension covers the n columns of A plus the right-hand
    side, i.e. n + 1 points of dimension m.
    """
    k = jll_dimension(key.A.shape[1] + 1, epsilon, jll_constant)
    return sample_projector(
        k,
        key.A.shape[0],
        alpha=alpha,
        seed=seed,
        epsilon=epsilon,
        jll_constant=jll_constant,
    )


def decode(key: CodeKey, z_bar, projector: Projector | None = None) -> DecodeReport:
    """Recover the message text from a corrupted transmission.

    With a projector the l1 program is solved on the projected data
    (T A, T b) instead of (A, b).  A non-optimal LP status is recorded
    in the report and decoding continues with the best point found.
    """
    start = time.perf_counter()
    z_bar = as_vector(z_bar)
    a = key.A
    if z_bar.shape[0] != a.shape[1]:
        raise DimensionMismatch(
            f"transmission has dim {z_bar.shape[0]}, decoder expects {a.shape[1]}"
        )
    b = a @ z_bar
    meta = None
    if projector is not None:
        lhs, rhs = project_lp_data(projector, a, b)
        meta = {
            "k": projector.k,
            "epsilon": projector.epsilon,
            "alpha": projector.density_alpha,
            "jll_constant": projector.jll_constant_C,
            "seed": projector.seed,
        }
    else:
        lhs, rhs = a, b

    program = build_basis_pursuit(lhs, rhs)
    # the right-hand side inherits the gross-error magnitude, so the
    # absolute feasibility tolerance scales with it
    feas_tol = 1e-8 * max(1.0, float(np.max(np.abs(rhs))) if rhs.size else 1.0)
    solve_start = time.perf_counter()
    solution = solve_lp(program, feas_tol=feas_tol)
    solve_seconds = time.perf_counter() - solve_start

    x_prime = basis_pursuit_solution(solution)
    z_prime = z_bar - x_prime
    bits = round_cap(pseudoinverse_apply(key.Q, z_prime), 0.0, 1.0)
    text = bits_to_string(bits)
    return DecodeReport(
        decoded_text=text,
        char_errors=None,
        variant=PROJECTED if projector is not None else ORIGINAL,
        lp_status=solution.status,
        solve_seconds=solve_seconds,
        total_seconds=time.perf_counter() - start,
        projector_meta=meta,
    )


def roundtrip_trial(
    key: CodeKey,
    text: str,
    channel: ChannelModel,
    projector: Projector | None = None,
) -> DecodeReport:
    """Full send -> corrupt -> receive chain, scored against ``text``."""
    z = encode(key, text)
    z_bar, _true_error = channel.corrupt(z)
    report = decode(key, z_bar, projector)
    return DecodeReport(
        decoded_text=report.decoded_text,
        char_errors=char_distance(text, report.decoded_text),
        variant=report.variant,
        lp_status=report.lp_status,
        solve_seconds=report.solve_seconds,
        total_seconds=report.total_seconds,
        projector_meta=report.projector_meta,
    )
