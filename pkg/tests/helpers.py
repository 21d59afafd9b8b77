"""Shared test oracles: vertex enumeration and random feasible LPs."""

import itertools

import numpy as np

from sparseline.lp import LinearProgram


def vertex_enum_optimum(lp):
    """Brute-force LP oracle: enumerate basic points of the feasible box slice.

    Every vertex fixes n - m variables at a finite bound and solves the
    equality system for the rest.  Requires all bounds finite.  Returns
    the best objective value, or None if no feasible basic point exists.
    """
    e, f = lp.eq_lhs, lp.eq_rhs
    lo, hi = lp.var_lower, lp.var_upper
    n = lp.num_vars
    m = e.shape[0]
    best = None
    for basic in itertools.combinations(range(n), m):
        nonbasic = [j for j in range(n) if j not in basic]
        for corner in itertools.product(*[(lo[j], hi[j]) for j in nonbasic]):
            x = np.zeros(n)
            x[nonbasic] = corner
            if m:
                sub = e[:, basic]
                rhs = f - e[:, nonbasic] @ x[nonbasic]
                try:
                    x[list(basic)] = np.linalg.solve(sub, rhs)
                except np.linalg.LinAlgError:
                    continue
            if np.any(x < lo - 1e-9) or np.any(x > hi + 1e-9):
                continue
            value = float(lp.objective @ x)
            if best is None or value < best:
                best = value
    return best


def random_feasible_box_lp(rng, n_vars, n_rows):
    """Random LP with finite box bounds and a guaranteed interior point."""
    e = rng.standard_normal((n_rows, n_vars))
    lo = rng.uniform(-3.0, 0.0, n_vars)
    hi = lo + rng.uniform(0.5, 4.0, n_vars)
    interior = lo + (hi - lo) * rng.uniform(0.2, 0.8, n_vars)
    f = e @ interior
    c = rng.standard_normal(n_vars)
    return LinearProgram(c, e, f, lo, hi)
