"""Box-constrained concave-quadratic maximization and regularized SPD solves.

The duals trained here maximize c'z - z'Qz/2 over 0 <= z <= upper with Q
symmetric positive semidefinite.  There is no equality constraint, so cyclic
coordinate ascent with exact per-coordinate clipping converges monotonically;
a projected-gradient fallback covers degenerate diagonals.  Convergence is
certified by the projected-gradient KKT residual

    max_i | clip(z_i - g_i, 0, upper_i) - z_i |,   g = Qz - c.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ._sweep import DIAG_FLOOR, cyclic_sweep

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 10_000
_POLISH_EVERY = 16  # sweeps between active-set refinement attempts


class NumericalError(RuntimeError):
    """Base class for solver failures."""


class NonConvergenceError(NumericalError):
    """Sweep limit reached before the KKT residual dropped below tolerance."""

    def __init__(self, best: "QPSolution"):
        self.best = best
        super().__init__(
            f"box QP did not converge in {best.iterations} sweeps "
            f"(KKT residual {best.kkt_residual:.3e})"
        )


class FactorizationError(NumericalError):
    """Cholesky factorization hit a non-positive pivot."""


@dataclass(frozen=True)
class BoxQP:
    """maximize c'z - z'Qz/2  subject to  0 <= z <= upper."""

    Q: np.ndarray
    c: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        Q = np.ascontiguousarray(self.Q, dtype=np.float64)
        c = np.ascontiguousarray(self.c, dtype=np.float64)
        upper = np.ascontiguousarray(self.upper, dtype=np.float64)
        k = c.shape[0]
        if Q.shape != (k, k):
            raise ValueError("Q must be square and match the linear term")
        if upper.shape != (k,):
            raise ValueError("upper bounds must match the linear term")
        if k and np.max(np.abs(Q - Q.T)) > 1e-10 * max(1.0, np.max(np.abs(Q))):
            raise ValueError("Q must be symmetric")
        if np.any(upper < 0):
            raise ValueError("upper bounds must be nonnegative")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "upper", upper)

    @property
    def size(self) -> int:
        return self.c.shape[0]


@dataclass(frozen=True)
class QPSolution:
    z: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int


def kkt_residual(problem: BoxQP, z: np.ndarray) -> float:
    """Projected-gradient optimality residual; zero exactly at a solution."""
    g = problem.Q @ z - problem.c
    return float(np.max(np.abs(np.clip(z - g, 0.0, problem.upper) - z), initial=0.0))


def _objective(problem: BoxQP, z: np.ndarray, q: np.ndarray) -> float:
    return float(problem.c @ z - 0.5 * (z @ q))


def _solve_projected_gradient(problem: BoxQP, tol: float, max_iter: int) -> QPSolution:
    # step 1/L with L an upper bound on ||Q||_2; safe, monotone ascent
    Q, c, upper = problem.Q, problem.c, problem.upper
    L = max(float(np.abs(Q).sum(axis=1).max(initial=0.0)), DIAG_FLOOR)
    z = np.zeros(problem.size)
    for it in range(1, max_iter + 1):
        g = Q @ z - c
        z = np.clip(z - g / L, 0.0, upper)
        resid = float(np.max(np.abs(np.clip(z - (Q @ z - c), 0.0, upper) - z), initial=0.0))
        if resid <= tol:
            return QPSolution(z, _objective(problem, z, Q @ z), resid, it)
    resid = kkt_residual(problem, z)
    raise NonConvergenceError(QPSolution(z, _objective(problem, z, Q @ z), resid, max_iter))


def _active_set_polish(problem: BoxQP, z: np.ndarray, q: np.ndarray):
    """Newton step on the currently free coordinates, kept only if it ascends.

    Cyclic sweeps identify the active set quickly but crawl along
    ill-conditioned valleys; solving the free block exactly jumps to its
    optimum.  The step is clipped to the box and accepted only when the
    objective improves, so the monotone-ascent invariant survives.
    """
    Q, c, upper = problem.Q, problem.c, problem.upper
    margin = 1e-10 * (1.0 + upper)
    free = (z > margin) & (z < upper - margin)
    if not np.any(free):
        return z, q
    idx = np.flatnonzero(free)
    rest = np.flatnonzero(~free)
    rhs = c[idx] - (Q[np.ix_(idx, rest)] @ z[rest] if rest.size else 0.0)
    Qff = Q[np.ix_(idx, idx)]
    # min-norm least squares: the duals are often rank-deficient (Q has the
    # rank of the proximal block), so a plain solve would blow up along the
    # null space and always be rejected
    try:
        z_free, *_ = np.linalg.lstsq(Qff, rhs, rcond=None)
    except np.linalg.LinAlgError:
        return z, q
    cand = z.copy()
    cand[idx] = np.clip(z_free, 0.0, upper[idx])
    q_cand = Q @ cand
    if _objective(problem, cand, q_cand) > _objective(problem, z, q):
        return cand, q_cand
    return z, q


def solve_box_qp(problem: BoxQP, tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER) -> QPSolution:
    """Solve a box QP to the requested KKT residual.

    Raises NonConvergenceError (carrying the best iterate) if max_iter sweeps
    are exhausted first.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if problem.size == 0:
        return QPSolution(np.zeros(0), 0.0, 0.0, 0)
    if float(np.min(np.diag(problem.Q))) < DIAG_FLOOR:
        return _solve_projected_gradient(problem, tol, max_iter)

    Q, c, upper = problem.Q, problem.c, problem.upper
    z = np.zeros(problem.size)
    q = np.zeros(problem.size)  # running Q @ z
    for it in range(1, max_iter + 1):
        cyclic_sweep(Q, c, upper, z, q)
        if it % _POLISH_EVERY == 0:
            q = Q @ z  # refresh the incrementally tracked gradient
            z, q = _active_set_polish(problem, z, q)
        g = q - c
        resid = float(np.max(np.abs(np.clip(z - g, 0.0, upper) - z), initial=0.0))
        if resid <= tol:
            # confirm against a freshly computed gradient before reporting
            q = Q @ z
            resid = float(np.max(np.abs(np.clip(z - (q - c), 0.0, upper) - z), initial=0.0))
            if resid <= tol:
                return QPSolution(z, _objective(problem, z, q), resid, it)
    q = Q @ z
    resid = float(np.max(np.abs(np.clip(z - (q - c), 0.0, upper) - z), initial=0.0))
    raise NonConvergenceError(QPSolution(z, _objective(problem, z, q), resid, max_iter))


@dataclass(frozen=True)
class SpdSystem:
    """(M + ridge I) x = rhs with M symmetric and the sum positive definite."""

    M: np.ndarray
    ridge: float
    rhs: np.ndarray

    def __post_init__(self):
        if self.ridge < 0:
            raise ValueError("ridge must be nonnegative")


def spd_factor(M: np.ndarray, ridge: float):
    """Cholesky factor of M + ridge I (never an explicit inverse)."""
    A = np.asarray(M, dtype=np.float64)
    if ridge:
        A = A + ridge * np.eye(A.shape[0])
    try:
        return cho_factor(A, lower=True, check_finite=False)
    except LinAlgError as exc:
        raise FactorizationError(
            f"matrix is not positive definite ({exc}); increase the ridge"
        ) from None


def spd_solve(system: SpdSystem) -> np.ndarray:
    """Solve the regularized SPD system via a symmetric factorization."""
    factor = spd_factor(system.M, system.ridge)
    x = cho_solve(factor, system.rhs, check_finite=False)
    A = system.M + system.ridge * np.eye(system.M.shape[0])
    resid = float(np.linalg.norm(A @ x - system.rhs))
    if resid > 1e-8 * (1.0 + float(np.linalg.norm(system.rhs))):
        raise FactorizationError(
            f"solution residual {resid:.3e} too large; increase the ridge"
        )
    return x
