"""Cross-module invariant suite behind the `selftest` CLI subcommand.

Each check is small enough to run in seconds; a failure message names
the violated invariant.
"""

from __future__ import annotations

import tempfile
from pathlib import Path

import numpy as np

from . import linalg, matgen
from .channel import ChannelModel
from .codec import bits_to_string, string_to_bits
from .lp import (
    LpStatus,
    basis_pursuit_solution,
    build_basis_pursuit,
    build_near_orthogonality_lp,
    solve_lp,
)
from .pipeline import decode, encode, roundtrip_trial
from .rproj import jll_dimension, sample_projector


def _check_codec_round_trip(rng):
    for _ in range(200):
        length = int(rng.integers(0, 64))
        text = bytes(rng.integers(0, 256, length).astype(np.uint8)).decode("latin-1")
        assert bits_to_string(string_to_bits(text)) == text, "codec round trip broke"


def _check_round_cap(rng):
    v = rng.normal(scale=2.0, size=64)
    once = linalg.round_cap(v, 0.0, 1.0)
    assert set(np.unique(once)) <= {0.0, 1.0}, "round_cap left non-binary values"
    assert np.array_equal(once, linalg.round_cap(once, 0.0, 1.0)), "round_cap not idempotent"


def _check_lp_basics(rng):
    from .lp import LinearProgram

    sol = solve_lp(LinearProgram([1.0], [[1.0]], [3.0], [0.0], [10.0]))
    assert sol.status is LpStatus.OPTIMAL and abs(sol.x[0] - 3.0) < 1e-7, "pinned LP wrong"
    sol = solve_lp(build_basis_pursuit([[1.0, 2.0]], [2.0]))
    assert abs(sol.objective_value - 1.0) < 1e-6, "basis-pursuit optimum wrong"
    sol = solve_lp(LinearProgram([1.0], [[1.0], [1.0]], [1.0, 2.0], [0.0], [10.0]))
    assert sol.status is LpStatus.INFEASIBLE, "inconsistent system not flagged"
    a = rng.standard_normal((3, 7))
    sol = solve_lp(build_near_orthogonality_lp(a, 0))
    assert sol.status is LpStatus.OPTIMAL, "kernel-box LP must be feasible"
    assert np.max(np.abs(a @ sol.x)) <= 1e-8, "kernel residual too large"


def _check_projector(rng):
    a = sample_projector(16, 40, alpha=0.25, seed=7)
    b = sample_projector(16, 40, alpha=0.25, seed=7)
    assert np.array_equal(a.T, b.T), "projector sampling not deterministic"
    scale = 1.0 / np.sqrt(16 * 0.25)
    assert set(np.unique(a.T)) <= {-scale, 0.0, scale}, "projector entries off-grid"
    assert jll_dimension(321, 0.2, 1.0) == 145, "projection dimension formula broke"


def _check_channel(rng):
    ch = ChannelModel(0.3, seed=5)
    z = rng.normal(size=40)
    snapshot = z.copy()
    z_bar, err = ch.corrupt(z)
    assert np.array_equal(z, snapshot), "corrupt mutated its input"
    assert np.count_nonzero(err) == 12, "support size wrong"
    assert np.allclose(z_bar, z + err), "additive relation broke"


def _check_orthogonal_keys(rng):
    for seed in range(3):
        key = matgen.generate_orthogonal_key(16, 4.0, seed=seed)
        assert np.max(np.abs(key.A @ key.Q)) <= 1e-9, "orthogonality residual too large"
        assert (
            np.max(np.abs(key.Q.T @ key.Q - np.eye(16))) <= 1e-9
        ), "encoder columns not orthonormal"


def _check_impossible_key(rng):
    key = matgen.generate_impossible_key(16, 0.5, seed=11)
    assert key.ortho_residual <= 1e-8, "near-orthogonality residual too large"
    assert linalg.numerical_rank(key.Q) == 16, "encoder lost full column rank"


def _check_pipeline(rng):
    key = matgen.generate_orthogonal_key(16, 4.0, seed=42)
    assert decode(key, encode(key, "ok")).decoded_text == "ok", "clean-channel decode broke"
    report = roundtrip_trial(key, "ok", ChannelModel(0.08, seed=2))
    assert report.char_errors == 0, "noisy roundtrip failed at desk scale"


def _check_persistence(rng):
    key = matgen.generate_orthogonal_key(8, 4.0, seed=1)
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "key.slk"
        matgen.save_key(key, path)
        loaded = matgen.load_key(path)
        assert np.array_equal(loaded.Q, key.Q), "key round trip not bit-exact"
        mpath = Path(tmp) / "m.slmx"
        m = rng.normal(size=(4, 6))
        linalg.save_matrix(mpath, m)
        assert np.array_equal(linalg.load_matrix(mpath), m), "matrix round trip broke"


CHECKS = [
    ("codec round trip", _check_codec_round_trip),
    ("round and cap", _check_round_cap),
    ("lp solver basics", _check_lp_basics),
    ("random projector", _check_projector),
    ("noisy channel", _check_channel),
    ("orthogonal keys", _check_orthogonal_keys),
    ("impossible key", _check_impossible_key),
    ("encode/decode pipeline", _check_pipeline),
    ("persistence", _check_persistence),
]


def run_selftest(seed: int = 0, stream=None) -> int:
    """Run every check, print one PASS/FAIL line each, return failure count."""
    import sys

    out = stream if stream is not None else sys.stdout
    failures = 0
    for name, check in CHECKS:
        rng = np.random.default_rng(seed)
        try:
            check(rng)
        except Exception as exc:
            failures += 1
            print(f"FAIL {name}: {exc}", file=out)
        else:
            print(f"PASS {name}", file=out)
    return failures
