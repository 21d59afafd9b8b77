"""Sparse sub-Gaussian random projectors and their application to LP data.

A projector T is a k x m matrix with i.i.d. entries taking the values
+s, 0, -s with probabilities alpha/2, 1-alpha, alpha/2, where
s = 1/sqrt(k*alpha) so that each entry has variance 1/k and projected
squared lengths are unbiased.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist

from .errors import DimensionMismatch, InvalidParameter
from .linalg import as_matrix, as_vector, load_matrix, save_matrix

DEFAULT_EPSILON = 0.2
DEFAULT_ALPHA = 0.02
DEFAULT_JLL_CONSTANT = 1.0


@dataclass(frozen=True)
class Projector:
    """A sampled projection matrix together with its sampling parameters."""

    T: np.ndarray
    epsilon: float
    density_alpha: float
    jll_constant_C: float
    seed: object

    @property
    def k(self) -> int:
        return self.T.shape[0]

    @property
    def cols(self) -> int:
        return self.T.shape[1]


@dataclass(frozen=True)
class DistortionStats:
    """Pairwise distance-ratio statistics for a projected point set."""

    min_ratio: float
    max_ratio: float
    mean_ratio: float
    in_band_fraction: float
    pair_count: int


def jll_dimension(num_points: int, epsilon: float, c: float = DEFAULT_JLL_CONSTANT) -> int:
    """Projected dimension ceil((c / epsilon^2) * ln(num_points))."""
    if num_points < 2:
        raise InvalidParameter("need at least two points")
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameter("epsilon must lie strictly between 0 and 1")
    if c <= 0.0:
        raise InvalidParameter("the dimension constant must be positive")
    return int(math.ceil(c / epsilon**2 * math.log(num_points)))


def sample_projector(
    k: int,
    m: int,
    alpha: float = DEFAULT_ALPHA,
    seed=None,
    epsilon: float = DEFAULT_EPSILON,
    jll_constant: float = DEFAULT_JLL_CONSTANT,
) -> Projector:
    """Sample a k x m sparse projector; deterministic for a given seed."""
    if k < 1 or m < 1:
        raise InvalidParameter("projector dimensions must be positive")
    if not 0.0 < alpha <= 1.0:
        raise InvalidParameter("density alpha must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    scale = 1.0 / math.sqrt(k * alpha)
    draws = rng.random((k, m))
    t = np.zeros((k, m))
    t[draws < alpha / 2.0] = scale
    t[draws >= 1.0 - alpha / 2.0] = -scale
    return Projector(
        T=t,
        epsilon=epsilon,
        density_alpha=alpha,
        jll_constant_C=jll_constant,
        seed=seed,
    )


def project_lp_data(projector: Projector, a, b) -> tuple[np.ndarray, np.ndarray]:
    """Replace the equation block (a, b) by (T a, T b)."""
    a = as_matrix(a)
    b = as_vector(b)
    t = projector.T
    if t.shape[1] != a.shape[0] or a.shape[0] != b.shape[0]:
        raise DimensionMismatch(
            f"projector expects dim {t.shape[1]}, got a with {a.shape[0]} rows "
            f"and b with dim {b.shape[0]}"
        )
    return t @ a, t @ b


def save_projector(projector: Projector, path) -> None:
    """Persist the matrix in SLMX form plus a key-value sidecar with the
    sampling parameters (path + ".meta")."""
    save_matrix(path, projector.T)
    meta = [
        f"epsilon={projector.epsilon!r}",
        f"alpha={projector.density_alpha!r}",
        f"jll_constant={projector.jll_constant_C!r}",
        f"seed={'' if projector.seed is None else projector.seed}",
    ]
    Path(str(path) + ".meta").write_text("\n".join(meta) + "\n", encoding="ascii")


def load_projector(path) -> Projector:
    t = load_matrix(path)
    fields = {}
    for line in Path(str(path) + ".meta").read_text(encoding="ascii").splitlines():
        if line.strip():
            name, _, value = line.partition("=")
            fields[name.strip()] = value.strip()
    return Projector(
        T=t,
        epsilon=float(fields["epsilon"]),
        density_alpha=float(fields["alpha"]),
        jll_constant_C=float(fields["jll_constant"]),
        seed=int(fields["seed"]) if fields.get("seed") else None,
    )


def distortion_report(projector: Projector, points) -> DistortionStats:
    """Distance-ratio statistics over all distinct point pairs.

    ``points`` is a (count, dim) array; pairs at zero distance are
    excluded.  The in-band fraction counts ratios inside
    [1 - epsilon, 1 + epsilon].
    """
    x = as_matrix(points)
    if x.shape[0] < 2:
        raise InvalidParameter("need at least two points")
    if x.shape[1] != projector.T.shape[1]:
        raise DimensionMismatch(
            f"points have dim {x.shape[1]}, projector expects {projector.T.shape[1]}"
        )
    original = pdist(x)
    projected = pdist(x @ projector.T.T)
    nonzero = original > 0.0
    if not nonzero.any():
        raise InvalidParameter("all point pairs coincide; no ratios to report")
    ratios = projected[nonzero] / original[nonzero]
    eps = projector.epsilon
    in_band = np.mean((ratios >= 1.0 - eps) & (ratios <= 1.0 + eps))
    return DistortionStats(
        min_ratio=float(ratios.min()),
        max_ratio=float(ratios.max()),
        mean_ratio=float(ratios.mean()),
        in_band_fraction=float(in_band),
        pair_count=int(ratios.size),
    )
