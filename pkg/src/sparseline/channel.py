"""Noisy-line simulation: sparse gross corruption of a real vector.

Each transmission corrupts a fixed number of components, chosen
uniformly without replacement; corrupted values receive an additive
gross error drawn Uniform(-G, G) with a small dead zone around zero so
an "error" never silently vanishes.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameter
from .linalg import as_vector

DEAD_ZONE_FRACTION = 1e-3


def _round_half_away(value: float) -> int:
    return int(np.copysign(np.floor(abs(value) + 0.5), value))


class ChannelModel:
    """A seeded channel with error rate ``delta``.

    One instance owns one random stream: repeated ``corrupt`` calls draw
    fresh noise, and rebuilding the model with the same seed replays the
    same sequence.  ``support_rule`` selects how the corrupted-component
    count round(delta * n) is taken: "round" (nearest, ties away from
    zero) or "floor".
    """

    def __init__(
        self,
        delta: float,
        gross_magnitude: float = 1000.0,
        seed=None,
        support_rule: str = "round",
    ):
        if not 0.0 <= delta < 1.0:
            raise InvalidParameter("delta must lie in [0, 1)")
        if not np.isfinite(gross_magnitude) or gross_magnitude <= 0.0:
            raise InvalidParameter("gross magnitude must be positive and finite")
        if support_rule not in ("round", "floor"):
            raise InvalidParameter("support_rule must be 'round' or 'floor'")
        self.delta = float(delta)
        self.gross_magnitude = float(gross_magnitude)
        self.seed = seed
        self.support_rule = support_rule
        self._rng = np.random.default_rng(seed)

    def support_size(self, n: int) -> int:
        """Number of corrupted components in a length-n transmission."""
        if n < 1:
            raise InvalidParameter("transmission length must be positive")
        raw = self.delta * n
        return int(np.floor(raw)) if self.support_rule == "floor" else _round_half_away(raw)

    def corrupt(self, z) -> tuple[np.ndarray, np.ndarray]:
        """Return (z_bar, true_error) with z_bar = z + true_error.

        The error vector has exactly ``support_size(len(z))`` nonzero
        components; it is returned for test harnesses only and is never
        shown to a decoder.
        """
        z = as_vector(z)
        n = z.shape[0]
        r = self.support_size(n)
        true_error = np.zeros(n)
        if r > 0:
            positions = self._rng.choice(n, size=r, replace=False)
            g = self.gross_magnitude
            magnitudes = self._rng.uniform(DEAD_ZONE_FRACTION * g, g, size=r)
            signs = self._rng.choice([-1.0, 1.0], size=r)
            true_error[positions] = signs * magnitudes
        return z + true_error, true_error
