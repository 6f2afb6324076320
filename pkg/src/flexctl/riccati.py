"""Recursive Riccati expressions over the joint kernel and a DARE oracle.

``recursion_step`` assembles the block recursion for the joint kernel in two
variants. With ``gain = uu^-1 uz`` and ``schur`` the effective state kernel
(the Schur complement of the control block):

``paper-literal``::

    [[ A' schur A + gain' R gain + Q ,  A' schur B ],
     [ B' schur A                    ,  B' schur B ]]

``standard`` (classical action-value sweep, dual to the DARE)::

    [[ Q + A' schur A ,  A' schur B     ],
     [ B' schur A     ,  R + B' schur B ]]

``dare_solve`` is a deliberately separate fixed-point loop on the state
Riccati equation, kept independent so it can certify the recursion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .exceptions import ConvergenceError, KernelDegeneracyError
from .plant import CostWeights, PlantModel, saturate
from .qkernel import QKernel, extract_policy
from .validation import as_vector, require, symmetrize

__all__ = [
    "VARIANTS",
    "recursion_step",
    "solve",
    "RiccatiSolution",
    "dare_solve",
    "RiccatiValueIteration",
]

VARIANTS = ("standard", "paper-literal")


@dataclass(frozen=True)
class RiccatiSolution:
    kernel: QKernel
    gain: np.ndarray                 # uu^-1 uz at the fixed point
    effective_state_kernel: np.ndarray  # Schur complement at the fixed point
    iterations: int
    residual: float
    variant: str


def _recursion_raw(a, b, q, r, matrix, n, variant):
    uu = matrix[n:, n:]
    uz = matrix[n:, :n]
    uu_eigs = np.linalg.eigvalsh(symmetrize(uu))
    if abs(uu_eigs).min() <= 1e-14 * (1.0 + abs(uu_eigs).max()):
        raise KernelDegeneracyError("control block of the kernel is singular")
    gain = np.linalg.solve(uu, uz)
    schur = symmetrize(matrix[:n, :n] - matrix[:n, n:] @ gain)
    new_zu = a.T @ schur @ b
    if variant == "paper-literal":
        new_zz = a.T @ schur @ a + gain.T @ r @ gain + q
        new_uu = b.T @ schur @ b
    else:
        new_zz = q + a.T @ schur @ a
        new_uu = r + b.T @ schur @ b
    out = np.empty_like(matrix)
    out[:n, :n] = symmetrize(new_zz)
    out[:n, n:] = new_zu
    out[n:, :n] = new_zu.T
    out[n:, n:] = symmetrize(new_uu)
    return out


def recursion_step(model: PlantModel, cost: CostWeights, kernel: QKernel,
                   variant: str = "standard") -> QKernel:
    """One sweep of the block recursion (see module docstring)."""
    require(variant in VARIANTS, f"unknown variant {variant!r}")
    matrix = _recursion_raw(model.a, model.b, cost.q, cost.r, kernel.matrix,
                            kernel.n_states, variant)
    return QKernel(matrix=matrix, n_states=kernel.n_states)


def solve(model: PlantModel, cost: CostWeights, variant: str = "standard",
          init_scale: float = 1e-3, tol: float = 1e-10,
          max_iter: int = 100_000) -> RiccatiSolution:
    """Iterate :func:`recursion_step` from a scaled identity to a fixed point."""
    require(variant in VARIANTS, f"unknown variant {variant!r}")
    n = model.n
    matrix = init_scale * np.eye(n + model.m)
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        updated = _recursion_raw(model.a, model.b, cost.q, cost.r, matrix, n, variant)
        residual = float(np.linalg.norm(updated - matrix, "fro"))
        matrix = updated
        if residual < tol:
            kernel = QKernel(matrix=matrix, n_states=n)
            return RiccatiSolution(
                kernel=kernel,
                gain=extract_policy(kernel),
                effective_state_kernel=symmetrize(kernel.schur_complement()),
                iterations=iteration,
                residual=residual,
                variant=variant,
            )
    raise ConvergenceError(
        f"Riccati recursion ({variant}) did not reach tol={tol:g} in "
        f"{max_iter} sweeps (last residual {residual:.3e})",
        residual=residual, iterations=max_iter)


def dare_solve(model: PlantModel, cost: CostWeights, tol: float = 1e-12,
               max_iter: int = 500_000) -> np.ndarray:
    """Discrete algebraic Riccati fixed point by direct iteration from P = Q.

    P <- Q + A'PA - A'PB (R + B'PB)^-1 B'PA

    Independent of the block recursion on purpose: different loop, different
    algebra, so modules can be certified against it.
    """
    a, b, q, r = model.a, model.b, cost.q, cost.r
    p = q.copy()
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        bpa = b.T @ p @ a
        p_next = symmetrize(q + a.T @ p @ a - a.T @ p @ b @ np.linalg.solve(r + b.T @ p @ b, bpa))
        residual = float(np.linalg.norm(p_next - p, "fro"))
        p = p_next
        if residual < tol:
            return p
    raise ConvergenceError(
        f"DARE fixed-point iteration did not reach tol={tol:g} in "
        f"{max_iter} sweeps (last residual {residual:.3e})",
        residual=residual, iterations=max_iter)


class RiccatiValueIteration(BaseEstimator):
    """Estimator wrapper around :func:`solve`."""

    def __init__(self, variant="standard", init_scale=1e-3, tol=1e-10,
                 max_iter=100_000):
        self.variant = variant
        self.init_scale = init_scale
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, model: PlantModel, cost: CostWeights):
        solution = solve(model, cost, variant=self.variant,
                         init_scale=self.init_scale, tol=self.tol,
                         max_iter=self.max_iter)
        self.kernel_ = solution.kernel
        self.gain_ = solution.gain
        self.effective_state_kernel_ = solution.effective_state_kernel
        self.n_iter_ = solution.iterations
        self.control_bound_ = model.control_bound
        return self

    def predict(self, z) -> np.ndarray:
        if not hasattr(self, "gain_"):
            raise NotFittedError("RiccatiValueIteration is not fitted yet")
        z = as_vector(z, "z", self.gain_.shape[1])
        return saturate(-self.gain_ @ z, self.control_bound_)
