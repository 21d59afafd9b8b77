"""sparseline: send text over a noisy, costly line.

Text is encoded through a tall matrix, corrupted by sparse gross errors
in transit, and decoded by l1 minimization of the error vector, with an
optional random projection that shrinks the decoding LP.
"""

from .channel import ChannelModel
from .codec import bits_to_string, char_distance, string_to_bits
from .lp import (
    LinearProgram,
    LpSolution,
    LpStatus,
    basis_pursuit_solution,
    build_basis_pursuit,
    build_near_orthogonality_lp,
    l0_min_bruteforce,
    solve_lp,
)
from .matgen import CodeKey, generate_impossible_key, generate_orthogonal_key, load_key, save_key
from .pipeline import DecodeReport, decode, default_projector_for, encode, roundtrip_trial
from .rproj import Projector, distortion_report, jll_dimension, project_lp_data, sample_projector

__version__ = "0.1.0"

__all__ = [
    "ChannelModel",
    "CodeKey",
    "DecodeReport",
    "LinearProgram",
    "LpSolution",
    "LpStatus",
    "Projector",
    "basis_pursuit_solution",
    "bits_to_string",
    "build_basis_pursuit",
    "build_near_orthogonality_lp",
    "char_distance",
    "decode",
    "default_projector_for",
    "distortion_report",
    "encode",
    "generate_impossible_key",
    "generate_orthogonal_key",
    "jll_dimension",
    "l0_min_bruteforce",
    "load_key",
    "project_lp_data",
    "roundtrip_trial",
    "sample_projector",
    "save_key",
    "solve_lp",
    "string_to_bits",
]
