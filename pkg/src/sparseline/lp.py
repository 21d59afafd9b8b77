"""Linear programming core.

A `LinearProgram` is a minimization over box-bounded variables subject
to equality constraints.  `solve_lp` runs a primal-dual interior-point
method (Mehrotra predictor-corrector on the homogeneous self-dual
embedding) and never crosses over to a vertex solution, so degenerate
optima come back as interior points of the optimal face.

The module also builds the two problem families the rest of the package
needs: the l1-minimization program used for decoding (`build_basis_pursuit`)
and the random-objective kernel program used to grow near-orthogonal rows
(`build_near_orthogonality_lp`), plus an exhaustive l0 oracle for tiny
instances (`l0_min_bruteforce`).
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, InvalidParameter, NoSparseSolution
from .linalg import as_matrix, as_vector

DEFAULT_FEAS_TOL = 1e-8
DEFAULT_GAP_TOL = 1e-8
DEFAULT_MAX_ITER = 200

# Homogeneous-model thresholds: relative measure below which the scaled
# problem counts as solved, and the step-damping factor keeping iterates
# strictly interior.
_DETECT_TOL = 1e-8
_STEP_SCALE = 0.99995


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True)
class LinearProgram:
    """min objective . x  subject to  eq_lhs @ x = eq_rhs,
    var_lower <= x <= var_upper (bounds may be +-inf)."""

    objective: np.ndarray
    eq_lhs: np.ndarray
    eq_rhs: np.ndarray
    var_lower: np.ndarray
    var_upper: np.ndarray

    def __post_init__(self):
        c = as_vector(self.objective)
        lhs = np.ascontiguousarray(self.eq_lhs, dtype=np.float64)
        rhs = as_vector(self.eq_rhs) if np.size(self.eq_rhs) else np.zeros(0)
        if lhs.ndim != 2:
            raise DimensionMismatch("eq_lhs must be 2-D")
        if not np.isfinite(lhs).all():
            raise InvalidParameter("eq_lhs entries must be finite")
        lo = np.asarray(self.var_lower, dtype=np.float64)
        hi = np.asarray(self.var_upper, dtype=np.float64)
        n = c.shape[0]
        if lhs.shape[1] != n or lo.shape != (n,) or hi.shape != (n,):
            raise DimensionMismatch("objective, eq_lhs columns and bounds disagree")
        if lhs.shape[0] != rhs.shape[0]:
            raise DimensionMismatch("eq_lhs rows and eq_rhs length disagree")
        if np.isnan(lo).any() or np.isnan(hi).any():
            raise InvalidParameter("bounds must not be NaN")
        if np.any(lo > hi):
            raise InvalidParameter("var_lower exceeds var_upper somewhere")
        if np.any(np.isposinf(lo)) or np.any(np.isneginf(hi)):
            raise InvalidParameter("bounds leave no feasible value")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "eq_lhs", lhs)
        object.__setattr__(self, "eq_rhs", rhs)
        object.__setattr__(self, "var_lower", lo)
        object.__setattr__(self, "var_upper", hi)

    @property
    def num_vars(self) -> int:
        return self.objective.shape[0]


@dataclass(frozen=True)
class LpSolution:
    """Solver output; ``x`` is the last (scaled) iterate even when the
    status is not optimal. ``duality_gap`` is the signed relative gap,
    +inf when the problem was flagged infeasible or unbounded."""

    x: np.ndarray
    objective_value: float
    status: LpStatus
    iterations: int
    duality_gap: float


# ----------------------------------------------------------- presolve

# Variable treatments in the standard form min c.xh, A xh = b, xh >= 0:
# fixed variables are eliminated, finite lower bounds are shifted out,
# upper-bounded-only variables are negated, two-sided bounds get a slack
# equation, and free variables are split into a positive pair.


class _StandardForm:
    def __init__(self, lp: LinearProgram):
        e, lo, hi = lp.eq_lhs, lp.var_lower, lp.var_upper
        n = lp.num_vars
        offset = np.zeros(n)
        col_var: list[int] = []
        col_sign: list[float] = []
        col_cost: list[float] = []
        box_cols: list[int] = []
        box_range: list[float] = []
        for j in range(n):
            l, u = lo[j], hi[j]
            if l == u:
                offset[j] = l
                continue
            if np.isneginf(l) and np.isposinf(u):
                col_var += [j, j]
                col_sign += [1.0, -1.0]
                col_cost += [lp.objective[j], -lp.objective[j]]
            elif np.isposinf(u):
                offset[j] = l
                col_var.append(j)
                col_sign.append(1.0)
                col_cost.append(lp.objective[j])
            elif np.isneginf(l):
                offset[j] = u
                col_var.append(j)
                col_sign.append(-1.0)
                col_cost.append(-lp.objective[j])
            else:
                offset[j] = l
                box_cols.append(len(col_var))
                box_range.append(u - l)
                col_var.append(j)
                col_sign.append(1.0)
                col_cost.append(lp.objective[j])

        self.n_orig = n
        self.m_eq = e.shape[0]
        self.col_var = np.asarray(col_var, dtype=np.intp)
        self.col_sign = np.asarray(col_sign)
        self.offset = offset
        self.obj_const = float(lp.objective @ offset)
        self.n_struct = len(col_var)
        self.n_box = len(box_cols)
        self.box_cols = np.asarray(box_cols, dtype=np.intp)
        self.b = np.concatenate([lp.eq_rhs - e @ offset, np.asarray(box_range)])
        self.c = np.concatenate([np.asarray(col_cost), np.zeros(self.n_box)])
        self.B = e[:, self.col_var] * self.col_sign if self.n_struct else np.zeros((self.m_eq, 0))
        self.B = np.ascontiguousarray(self.B)
        self.Bbox = np.ascontiguousarray(self.B[:, self.box_cols])
        self.n_std = self.n_struct + self.n_box
        self.m_std = self.m_eq + self.n_box

    def apply(self, xh: np.ndarray) -> np.ndarray:
        x1, x2 = xh[: self.n_struct], xh[self.n_struct :]
        return np.concatenate([self.B @ x1, x1[self.box_cols] + x2])

    def apply_t(self, v: np.ndarray) -> np.ndarray:
        v1, v2 = v[: self.m_eq], v[self.m_eq :]
        top = self.B.T @ v1
        np.add.at(top, self.box_cols, v2)
        return np.concatenate([top, v2])

    def recover(self, xh: np.ndarray) -> np.ndarray:
        x = self.offset.copy()
        np.add.at(x, self.col_var, self.col_sign * xh[: self.n_struct])
        return x

    def factor_normal(self, dinv: np.ndarray):
        """Factor M = A diag(dinv) A^T and return a solver M^-1 r.

        The slack block of the box rows is eliminated analytically, so
        only an m_eq x m_eq system is ever factored.
        """
        d1 = dinv[: self.n_struct]
        d2 = dinv[self.n_struct :]
        d_box = d1[self.box_cols]
        denom = d_box + d2
        d_eff = d1.copy()
        if self.n_box:
            d_eff[self.box_cols] = d_box * d2 / denom

        if self.m_eq:
            s = (self.B * d_eff) @ self.B.T
            try:
                cho = scipy.linalg.cho_factor(s, lower=True, check_finite=False)
                solve_s = lambda r: scipy.linalg.cho_solve(cho, r, check_finite=False)
            except scipy.linalg.LinAlgError:
                # singular normal matrix (redundant or inconsistent rows):
                # fall back to a least-squares pseudo-solve
                pinv = np.linalg.pinv(s, rcond=1e-13)
                solve_s = lambda r: pinv @ r
        else:
            solve_s = lambda r: r

        def solve(r: np.ndarray) -> np.ndarray:
            r1, r2 = r[: self.m_eq], r[self.m_eq :]
            if self.n_box:
                w2 = r2 / denom
                v1 = solve_s(r1 - self.Bbox @ (d_box * w2)) if self.m_eq else np.zeros(0)
                v2 = (r2 - d_box * (self.Bbox.T @ v1)) / denom
                return np.concatenate([v1, v2])
            return solve_s(r1)

        return solve


# ----------------------------------------------------------- HSD core


def _step_length(x, dx, z, dz, tau, dtau, kappa, dkappa, scale):
    """Largest step in (0, 1] keeping (x, z, tau, kappa) strictly positive."""
    alpha = 1.0
    neg = dx < 0
    if neg.any():
        alpha = min(alpha, scale * np.min(x[neg] / -dx[neg]))
    neg = dz < 0
    if neg.any():
        alpha = min(alpha, scale * np.min(z[neg] / -dz[neg]))
    if dtau < 0:
        alpha = min(alpha, scale * tau / -dtau)
    if dkappa < 0:
        alpha = min(alpha, scale * kappa / -dkappa)
    return alpha


def solve_lp(
    lp: LinearProgram,
    feas_tol: float = DEFAULT_FEAS_TOL,
    gap_tol: float = DEFAULT_GAP_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> LpSolution:
    """Minimize the program, reporting a status instead of raising.

    Optimality requires the max-norm equality residual and bound
    violation of the recovered point to be at most ``feas_tol`` and the
    signed relative duality gap at most ``gap_tol``.  Infeasible and
    unbounded problems are detected through the homogeneous embedding.
    """
    if feas_tol <= 0 or gap_tol <= 0:
        raise InvalidParameter("tolerances must be positive")
    if max_iter < 1:
        raise InvalidParameter("max_iter must be at least 1")
    sf = _StandardForm(lp)

    def finish(xh, tau, status, iters, gap):
        x = sf.recover(xh / tau)
        return LpSolution(
            x=x,
            objective_value=float(lp.objective @ x),
            status=status,
            iterations=iters,
            duality_gap=gap,
        )

    def contract_violation(x):
        feas = 0.0
        if sf.m_eq:
            feas = float(np.max(np.abs(lp.eq_lhs @ x - lp.eq_rhs)))
        lo_viol = np.max(lp.var_lower - x, initial=0.0)
        hi_viol = np.max(x - lp.var_upper, initial=0.0)
        return max(feas, lo_viol, hi_viol)

    # all variables fixed by their bounds: nothing to optimize
    if sf.n_std == 0:
        x = sf.offset
        status = (
            LpStatus.OPTIMAL
            if contract_violation(x) <= feas_tol
            else LpStatus.INFEASIBLE
        )
        gap = 0.0 if status is LpStatus.OPTIMAL else math.inf
        return LpSolution(x, float(lp.objective @ x), status, 0, gap)

    b, c = sf.b, sf.c
    n = sf.n_std
    x = np.ones(n)
    y = np.zeros(sf.m_std)
    z = np.ones(n)
    tau, kappa = 1.0, 1.0

    norm_rp0 = max(1.0, float(np.linalg.norm(b - sf.apply(x))))
    norm_rd0 = max(1.0, float(np.linalg.norm(c - z)))
    norm_rg0 = max(1.0, abs(1.0 + float(c @ x)))
    mu0 = (x @ z + tau * kappa) / (n + 1)

    status = LpStatus.ITERATION_LIMIT
    gap_out = math.inf
    iteration = 0
    stalls = 0

    while iteration < max_iter:
        iteration += 1
        r_p = b * tau - sf.apply(x)
        r_d = c * tau - sf.apply_t(y) - z
        r_g = float(c @ x - b @ y) + kappa
        mu = (x @ z + tau * kappa) / (n + 1)

        dinv = x / z
        solve_m = sf.factor_normal(dinv)

        def newton(gamma, dxdz, dtdk):
            eta = 1.0 - gamma
            rhat_p = eta * r_p
            rhat_d = eta * r_d
            rhat_g = eta * r_g
            rhat_xs = gamma * mu - x * z - dxdz
            rhat_tk = gamma * mu - tau * kappa - dtdk

            def sym_solve(r1, r2):
                v = solve_m(r2 + sf.apply(dinv * r1))
                return dinv * (sf.apply_t(v) - r1), v

            p, q = sym_solve(c, b)
            u, v = sym_solve(rhat_d - rhat_xs / x, rhat_p)
            denom = kappa / tau - float(c @ p - b @ q)
            if denom == 0.0 or not np.isfinite(denom):
                return None
            d_tau = (rhat_g + rhat_tk / tau + float(c @ u - b @ v)) / denom
            d_x = u + p * d_tau
            d_y = v + q * d_tau
            d_z = (rhat_xs - z * d_x) / x
            d_kappa = (rhat_tk - kappa * d_tau) / tau
            parts = (d_x, d_y, d_z, d_tau, d_kappa)
            if any(not np.all(np.isfinite(np.atleast_1d(part))) for part in parts):
                return None
            return parts

        # predictor (affine) direction sets the centering weight
        affine = newton(0.0, 0.0, 0.0)
        if affine is None:
            break
        d_x, d_y, d_z, d_tau, d_kappa = affine
        alpha_aff = _step_length(x, d_x, z, d_z, tau, d_tau, kappa, d_kappa, 1.0)
        gamma = (1.0 - alpha_aff) ** 2 * min(0.1, 1.0 - alpha_aff)

        corrected = newton(gamma, d_x * d_z, d_tau * d_kappa)
        if corrected is None:
            break
        d_x, d_y, d_z, d_tau, d_kappa = corrected
        alpha = _step_length(x, d_x, z, d_z, tau, d_tau, kappa, d_kappa, _STEP_SCALE)

        x = x + alpha * d_x
        y = y + alpha * d_y
        z = z + alpha * d_z
        tau = tau + alpha * d_tau
        kappa = kappa + alpha * d_kappa

        rho_p = float(np.linalg.norm(b * tau - sf.apply(x))) / norm_rp0
        rho_d = float(np.linalg.norm(c * tau - sf.apply_t(y) - z)) / norm_rd0
        rho_g = abs(float(c @ x - b @ y) + kappa) / norm_rg0
        mu = (x @ z + tau * kappa) / (n + 1)

        # contract check on the recovered original-space point
        x_cand = sf.recover(x / tau)
        primal = float(lp.objective @ x_cand)
        dual = float(b @ y) / tau + sf.obj_const
        rel_gap = (primal - dual) / (1.0 + abs(primal) + abs(dual))
        if (
            contract_violation(x_cand) <= feas_tol
            and abs(rel_gap) <= gap_tol
            and rho_d <= max(gap_tol, _DETECT_TOL)
        ):
            status = LpStatus.OPTIMAL
            gap_out = rel_gap
            break

        # homogeneous certificates: tau -> 0 with kappa > 0
        converged = rho_p <= _DETECT_TOL and rho_d <= _DETECT_TOL and rho_g <= _DETECT_TOL
        if (converged and tau <= _DETECT_TOL * max(1.0, kappa)) or (
            mu <= _DETECT_TOL * mu0 and tau <= _DETECT_TOL * min(1.0, kappa)
        ):
            status = LpStatus.INFEASIBLE if b @ y > _DETECT_TOL else LpStatus.UNBOUNDED
            break

        stalls = stalls + 1 if (alpha < 1e-8 or mu < 1e-17 * mu0) else 0
        if stalls >= 3:
            break

    if status is LpStatus.ITERATION_LIMIT:
        x_cand = sf.recover(x / tau)
        primal = float(lp.objective @ x_cand)
        dual = float(b @ y) / tau + sf.obj_const
        gap_out = (primal - dual) / (1.0 + abs(primal) + abs(dual))
    return finish(x, tau, status, iteration, gap_out)


# ----------------------------------------------------- problem builders


def build_basis_pursuit(a, b) -> LinearProgram:
    """LP whose optimum is the minimum-l1-norm solution of a @ x = b.

    The magnitude bound -s <= x <= s is realized through the split
    x = u - v with u, v >= 0 and s = u + v, so the program has 2n
    nonnegative variables and the equality block [a, -a] @ (u, v) = b.
    Use :func:`basis_pursuit_solution` to read x off a solution.
    """
    a = as_matrix(a)
    b = as_vector(b)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(
            f"matrix has {a.shape[0]} rows but rhs has dim {b.shape[0]}"
        )
    n = a.shape[1]
    return LinearProgram(
        objective=np.ones(2 * n),
        eq_lhs=np.hstack([a, -a]),
        eq_rhs=b,
        var_lower=np.zeros(2 * n),
        var_upper=np.full(2 * n, np.inf),
    )


def basis_pursuit_solution(solution) -> np.ndarray:
    """Recover x = u - v from a basis-pursuit solution (or raw 2n vector)."""
    xs = solution.x if isinstance(solution, LpSolution) else as_vector(solution)
    n = xs.shape[0] // 2
    return xs[:n] - xs[n:]


def build_near_orthogonality_lp(a, rng_seed=None) -> LinearProgram:
    """Random-objective LP over the kernel slice of the [-1, 1] box.

    Maximizes a Uniform(-1, 1) objective over {q in [-1,1]^n : a @ q = 0};
    the returned program is the negated minimization form.  q = 0 is
    always feasible, so a solver must never report it infeasible.
    """
    a = as_matrix(a)
    m, n = a.shape
    if m >= n:
        raise DimensionMismatch(f"need strictly fewer rows than columns, got {m}x{n}")
    rng = np.random.default_rng(rng_seed)
    costs = rng.uniform(-1.0, 1.0, size=n)
    return LinearProgram(
        objective=-costs,
        eq_lhs=a,
        eq_rhs=np.zeros(m),
        var_lower=np.full(n, -1.0),
        var_upper=np.full(n, 1.0),
    )


def l0_min_bruteforce(a, b, max_support: int) -> np.ndarray:
    """Sparsest solution of a @ x = b by exhaustive support enumeration.

    Supports are tried in order of size then lexicographically; a
    least-squares fit counts as a solution when its residual norm is at
    most 1e-8.  Only meant for tiny instances (at most 20 columns).
    """
    a = as_matrix(a)
    b = as_vector(b)
    m, n = a.shape
    if m != b.shape[0]:
        raise DimensionMismatch(
            f"matrix has {m} rows but rhs has dim {b.shape[0]}"
        )
    if n > 20:
        raise InvalidParameter(f"support enumeration limited to 20 columns, got {n}")
    if not 0 <= max_support <= m:
        raise InvalidParameter("max_support must lie in [0, rows]")
    for size in range(max_support + 1):
        for support in itertools.combinations(range(n), size):
            if size == 0:
                residual = float(np.linalg.norm(b))
                coeffs = np.zeros(0)
            else:
                cols = a[:, support]
                coeffs, *_ = np.linalg.lstsq(cols, b, rcond=None)
                residual = float(np.linalg.norm(cols @ coeffs - b))
            if residual <= 1e-8:
                x = np.zeros(n)
                x[list(support)] = coeffs
                return x
    raise NoSparseSolution(
        f"no solution with support size <= {max_support} fits the system"
    )


def write_lp_text(lp: LinearProgram, path) -> None:
    """Dump the program in the conventional text LP interchange format."""

    def term(coeff, j):
        return f"{coeff:+.17g} x{j + 1}"

    lines = ["Minimize", " obj: " + " ".join(term(v, j) for j, v in enumerate(lp.objective))]
    lines.append("Subject To")
    for i in range(lp.eq_lhs.shape[0]):
        row = " ".join(
            term(lp.eq_lhs[i, j], j) for j in range(lp.num_vars) if lp.eq_lhs[i, j] != 0.0
        )
        lines.append(f" c{i + 1}: {row or '0 x1'} = {lp.eq_rhs[i]:.17g}")
    lines.append("Bounds")
    for j in range(lp.num_vars):
        lo, hi = lp.var_lower[j], lp.var_upper[j]
        if np.isneginf(lo) and np.isposinf(hi):
            lines.append(f" x{j + 1} free")
        elif np.isneginf(lo):
            lines.append(f" -inf <= x{j + 1} <= {hi:.17g}")
        elif np.isposinf(hi):
            lines.append(f" {lo:.17g} <= x{j + 1}")
        else:
            lines.append(f" {lo:.17g} <= x{j + 1} <= {hi:.17g}")
    lines.append("End")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
