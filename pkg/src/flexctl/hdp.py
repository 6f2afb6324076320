"""Model-based heuristic dynamic programming: value iteration on a quadratic
state value function ``S(z) = 0.5 z' P z``.

Serves as the model-based stepping stone and as a cross-check for the
model-free learners: its fixed point is the discrete-time LQR solution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .exceptions import ConvergenceError, NumericError
from .plant import CostWeights, PlantModel, saturate
from .validation import as_matrix, as_vector, check_symmetric, symmetrize

__all__ = ["policy_gain", "value_update", "solve", "HDPSolution", "HDPValueIteration"]

_MAX_CONDITION = 1e12


@dataclass(frozen=True)
class HDPSolution:
    value_kernel: np.ndarray  # P, n x n symmetric
    gain: np.ndarray          # K, m x n, policy u = -K z
    iterations: int
    residual: float


def policy_gain(model: PlantModel, cost: CostWeights, value_kernel) -> np.ndarray:
    """Greedy gain K = (R + B'PB)^-1 B'PA for the value kernel P.

    Explicit solution of the stationarity condition
    ``u = -R^-1 B' grad S(Az + Bu)``, unique whenever R > 0.
    """
    p = check_symmetric(as_matrix(value_kernel, "P"), "P")
    lhs = cost.r + model.b.T @ p @ model.b
    condition = np.linalg.cond(lhs)
    if not np.isfinite(condition) or condition > _MAX_CONDITION:
        raise NumericError(
            f"R + B'PB is numerically singular (condition estimate {condition:.3e})")
    return np.linalg.solve(lhs, model.b.T @ p @ model.a)


def value_update(model: PlantModel, cost: CostWeights, value_kernel, gain) -> np.ndarray:
    """One value-iteration sweep under the policy ``u = -K z``:

    P' = Q + K'RK + (A - BK)' P (A - BK), symmetrized.
    """
    p = as_matrix(value_kernel, "P")
    k = as_matrix(gain, "K")
    a_cl = model.a - model.b @ k
    p_next = cost.q + k.T @ cost.r @ k + a_cl.T @ p @ a_cl
    return symmetrize(p_next)


def solve(model: PlantModel, cost: CostWeights, tol: float = 1e-9,
          max_iter: int = 100_000) -> HDPSolution:
    """Alternate greedy-policy and value sweeps from P = 0 to convergence."""
    a, b, q, r = model.a, model.b, cost.q, cost.r
    p = np.zeros((model.n, model.n))
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        try:
            k = np.linalg.solve(r + b.T @ p @ b, b.T @ p @ a)
        except np.linalg.LinAlgError:
            k = policy_gain(model, cost, p)  # re-derive with the diagnostic path
        a_cl = a - b @ k
        p_next = symmetrize(q + k.T @ cost.r @ k + a_cl.T @ p @ a_cl)
        residual = float(np.linalg.norm(p_next - p, "fro"))
        p = p_next
        if residual < tol:
            return HDPSolution(value_kernel=p, gain=policy_gain(model, cost, p),
                               iterations=iteration, residual=residual)
    raise ConvergenceError(
        f"value iteration did not reach tol={tol:g} in {max_iter} sweeps "
        f"(last residual {residual:.3e})",
        residual=residual, iterations=max_iter)


class HDPValueIteration(BaseEstimator):
    """Estimator wrapper around :func:`solve`.

    ``fit(model, cost)`` stores ``value_kernel_``, ``gain_`` and ``n_iter_``;
    ``predict(z)`` returns the regulator control ``-K z`` saturated with the
    plant bound seen at fit time.
    """

    def __init__(self, tol=1e-9, max_iter=100_000):
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, model: PlantModel, cost: CostWeights):
        solution = solve(model, cost, tol=self.tol, max_iter=self.max_iter)
        self.value_kernel_ = solution.value_kernel
        self.gain_ = solution.gain
        self.n_iter_ = solution.iterations
        self.residual_ = solution.residual
        self.control_bound_ = model.control_bound
        return self

    def predict(self, z) -> np.ndarray:
        if not hasattr(self, "gain_"):
            raise NotFittedError("HDPValueIteration is not fitted yet")
        z = as_vector(z, "z", self.gain_.shape[1])
        return saturate(-self.gain_ @ z, self.control_bound_)
