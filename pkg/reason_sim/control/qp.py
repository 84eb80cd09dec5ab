"""Box-constrained convex QP solver (projected Newton with Armijo line search).

Solves  min 0.5 x'Hx + g'x  s.t.  lower <= x <= upper.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from reason_sim import config

# status codes
CONVERGED = "converged"
MAX_ITER = "max_iter"
NO_DESCENT = "no_descent"
LINESEARCH = "linesearch"
NOT_PD = "not_positive_definite"

STEP_DEC = 0.6      # line-search backtracking factor
MIN_STEP = 1e-22
ARMIJO = 0.1        # fraction of the linear decrease required


@dataclass(frozen=True)
class BoxQp:
    H: np.ndarray
    g: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        n = self.g.shape[0]
        if self.H.shape != (n, n) or self.lower.shape != (n,) or self.upper.shape != (n,):
            raise ValueError("inconsistent QP dimensions")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")

    @property
    def size(self) -> int:
        return self.g.shape[0]

    def objective(self, x: np.ndarray) -> float:
        return float(0.5 * x @ self.H @ x + self.g @ x)

    def kkt_residual(self, x: np.ndarray) -> float:
        """Norm of the projected gradient step; zero exactly at the box-QP optimum."""
        grad = self.H @ x + self.g
        return float(np.linalg.norm(x - np.clip(x - grad, self.lower, self.upper)))


@dataclass(frozen=True)
class BoxQpResult:
    x: np.ndarray
    objective: float
    residual: float
    iterations: int
    status: str

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


def _initial_point(qp: BoxQp, x0: Optional[np.ndarray]) -> np.ndarray:
    if x0 is not None and x0.shape == qp.g.shape:
        return np.clip(np.asarray(x0, dtype=float), qp.lower, qp.upper)
    return np.clip(np.zeros(qp.size), qp.lower, qp.upper)


def solve_box_qp(qp: BoxQp, tol: float = config.QP_TOL, max_iter: int = config.QP_MAX_ITER,
                 x0: Optional[np.ndarray] = None) -> BoxQpResult:
    """Projected Newton iterations on the free subspace.

    Each iteration clamps the variables sitting on a bound whose gradient points
    outward, takes the Newton step on the remaining ones and backtracks along
    the projected path until the Armijo condition holds.
    """
    H, g, lower, upper = qp.H, qp.g, qp.lower, qp.upper
    x = _initial_point(qp, x0)
    value = qp.objective(x)
    clamped = None
    factor = None
    status = MAX_ITER
    iterations = 0

    for iterations in range(1, max_iter + 1):
        grad = g + H @ x
        if qp.kkt_residual(x) <= tol:
            status = CONVERGED
            iterations -= 1
            break

        old_clamped = clamped
        clamped = ((x <= lower) & (grad > 0)) | ((x >= upper) & (grad < 0))
        free = ~clamped
        if not free.any():
            # every coordinate pinned with an outward gradient is already optimal
            status = CONVERGED
            break

        if factor is None or old_clamped is None or np.any(old_clamped != clamped):
            try:
                factor = linalg.cho_factor(H[np.ix_(free, free)])
            except linalg.LinAlgError:
                status = NOT_PD
                break

        search = np.zeros_like(x)
        search[free] = -linalg.cho_solve(factor, grad[free])
        sdotg = float(search @ grad)
        if sdotg >= 0:
            status = NO_DESCENT
            break

        step = 1.0
        xc = np.clip(x + search, lower, upper)
        vc = qp.objective(xc)
        while (vc - value) > ARMIJO * step * sdotg:
            step *= STEP_DEC
            if step < MIN_STEP:
                break
            xc = np.clip(x + step * search, lower, upper)
            vc = qp.objective(xc)
        if step < MIN_STEP:
            status = LINESEARCH
            break

        x, value = xc, vc

    residual = qp.kkt_residual(x)
    if status != CONVERGED and residual <= tol:
        status = CONVERGED
    return BoxQpResult(x=x, objective=value, residual=residual, iterations=iterations, status=status)


__all__ = [
    "BoxQp",
    "BoxQpResult",
    "solve_box_qp",
    "CONVERGED",
    "MAX_ITER",
    "NO_DESCENT",
    "LINESEARCH",
    "NOT_PD",
]
