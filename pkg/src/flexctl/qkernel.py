"""Model-free value iteration on the joint state-control cost kernel.

The action-dependent value is ``S(z, u) = 0.5 chi' M chi`` with
``chi = (z; u)``. Policies come from the kernel blocks alone
(``u = -M_uu^-1 M_uz z``), so the learner never touches A or B. Two
evaluators realize the value sweep: an exact recursion (delegated to the
Riccati module) and a batch least-squares fit over transition samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .exceptions import ConvergenceError, ExcitationError, KernelDegeneracyError
from .plant import CostWeights, PlantModel, saturate, step
from .validation import (
    as_matrix,
    as_vector,
    check_symmetric,
    min_symmetric_eigenvalue,
    require,
)

__all__ = [
    "QKernel",
    "TransitionSample",
    "extract_policy",
    "exact_kernel_update",
    "lsq_kernel_fit",
    "collect_transitions",
    "vi_solve",
    "VIResult",
    "KernelValueIteration",
]


@dataclass(frozen=True)
class QKernel:
    """Symmetric (n+m)x(n+m) kernel partitioned at ``n_states``."""

    matrix: np.ndarray
    n_states: int

    def __post_init__(self):
        matrix = check_symmetric(as_matrix(self.matrix, "kernel"), "kernel")
        require(0 < self.n_states < matrix.shape[0],
                f"n_states={self.n_states} incompatible with kernel of size {matrix.shape[0]}")
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def scaled_identity(cls, n: int, m: int, scale: float) -> "QKernel":
        return cls(matrix=scale * np.eye(n + m), n_states=n)

    @classmethod
    def from_blocks(cls, zz, zu, uu) -> "QKernel":
        zz = as_matrix(zz, "zz")
        zu = as_matrix(zu, "zu")
        uu = as_matrix(uu, "uu")
        top = np.hstack([zz, zu])
        bottom = np.hstack([zu.T, uu])
        return cls(matrix=np.vstack([top, bottom]), n_states=zz.shape[0])

    @classmethod
    def from_state_kernel(cls, model: PlantModel, cost: CostWeights, p) -> "QKernel":
        """Action-dependent kernel induced by a state value kernel P:
        blocks (Q + A'PA, A'PB; B'PA, R + B'PB)."""
        p = check_symmetric(as_matrix(p, "P"), "P")
        return cls.from_blocks(
            cost.q + model.a.T @ p @ model.a,
            model.a.T @ p @ model.b,
            cost.r + model.b.T @ p @ model.b,
        )

    @property
    def n_controls(self) -> int:
        return self.matrix.shape[0] - self.n_states

    @property
    def zz(self) -> np.ndarray:
        return self.matrix[: self.n_states, : self.n_states]

    @property
    def zu(self) -> np.ndarray:
        return self.matrix[: self.n_states, self.n_states:]

    @property
    def uz(self) -> np.ndarray:
        return self.matrix[self.n_states:, : self.n_states]

    @property
    def uu(self) -> np.ndarray:
        return self.matrix[self.n_states:, self.n_states:]

    def value(self, z, u) -> float:
        chi = np.concatenate([as_vector(z, "z", self.n_states),
                              as_vector(u, "u", self.n_controls)])
        return 0.5 * float(chi @ self.matrix @ chi)

    def schur_complement(self) -> np.ndarray:
        """Effective state kernel M_zz - M_zu M_uu^-1 M_uz."""
        return self.zz - self.zu @ np.linalg.solve(self.uu, self.uz)


@dataclass(frozen=True)
class TransitionSample:
    """One Bellman tuple (z, u, utility, z_next, u_next)."""

    z: np.ndarray
    u: np.ndarray
    utility: float
    z_next: np.ndarray
    u_next: np.ndarray


def extract_policy(kernel: QKernel) -> np.ndarray:
    """Model-free gain K = M_uu^-1 M_uz for the policy ``u = -K z``.

    Uses only kernel blocks; raises on a singular or indefinite control block
    (the signature of a bad learning iterate).
    """
    if min_symmetric_eigenvalue(kernel.uu) <= 0:
        raise KernelDegeneracyError(
            "control block of the kernel is not positive definite "
            f"(min eigenvalue {min_symmetric_eigenvalue(kernel.uu):.3e})")
    return np.linalg.solve(kernel.uu, kernel.uz)


def exact_kernel_update(model: PlantModel, cost: CostWeights, kernel: QKernel,
                        variant: str = "standard") -> QKernel:
    """Exact value sweep of the kernel, via the Riccati block recursion."""
    from . import riccati

    return riccati.recursion_step(model, cost, kernel, variant=variant)


def _quadratic_features(chis: np.ndarray) -> np.ndarray:
    # basis such that features @ vech-parameters == 0.5 chi' M chi
    p = chis.shape[1]
    rows, cols = np.triu_indices(p)
    weights = np.where(rows == cols, 0.5, 1.0)
    return chis[:, rows] * chis[:, cols] * weights


def _matrix_from_parameters(theta: np.ndarray, p: int) -> np.ndarray:
    m = np.zeros((p, p))
    rows, cols = np.triu_indices(p)
    m[rows, cols] = theta
    m[cols, rows] = theta
    return m


def lsq_kernel_fit(samples, kernel: QKernel) -> QKernel:
    """Least-squares kernel identification from transition samples.

    Solves ``0.5 chi_k' M' chi_k = U_k + 0.5 chi_{k+1}' M chi_{k+1}`` for the
    symmetric ``M'`` over the monomial basis of its upper triangle. The
    result is exactly symmetric by construction. Raises ``ExcitationError``
    when the regression matrix is rank deficient.
    """
    samples = list(samples)
    p = kernel.matrix.shape[0]
    n_params = p * (p + 1) // 2
    require(len(samples) >= n_params,
            f"need at least {n_params} samples, got {len(samples)}")
    chis = np.array([np.concatenate([s.z, s.u]) for s in samples])
    chis_next = np.array([np.concatenate([s.z_next, s.u_next]) for s in samples])
    targets = (np.array([s.utility for s in samples])
               + 0.5 * np.einsum("ij,jk,ik->i", chis_next, kernel.matrix, chis_next))
    design = _quadratic_features(chis)
    theta, _, rank, _ = np.linalg.lstsq(design, targets, rcond=None)
    if rank < n_params:
        raise ExcitationError(
            f"regression rank {rank} < {n_params} free parameters; "
            "samples are not persistently exciting",
            rank=int(rank), required=n_params)
    return QKernel(matrix=_matrix_from_parameters(theta, p), n_states=kernel.n_states)


def collect_transitions(model: PlantModel, cost: CostWeights, gain,
                        n_samples: int, rng: np.random.Generator,
                        probe: float = 0.2, state_scale: float = 1.0):
    """Gather Bellman tuples by probing the plant around the policy ``-K z``.

    Start states are resampled i.i.d. and the behavior control carries
    zero-mean uniform probing noise; the bootstrap action ``u_next`` follows
    the unprobed policy. The plant enters only as a black-box transition.
    """
    gain = as_matrix(gain, "gain")
    samples = []
    for _ in range(n_samples):
        z = state_scale * rng.standard_normal(model.n)
        u = -gain @ z + rng.uniform(-probe, probe, model.m)
        z_next = step(model, z, u)
        samples.append(TransitionSample(
            z=z, u=u, utility=cost.utility(z, u),
            z_next=z_next, u_next=-gain @ z_next))
    return samples


@dataclass
class VIResult:
    kernel: QKernel
    gain: np.ndarray
    residuals: list = field(default_factory=list)
    iterations: int = 0


def vi_solve(model: PlantModel, cost: CostWeights, evaluator: str = "exact",
             variant: str = "standard", init_scale: float = 1e-3,
             init_kernel: QKernel = None, tol: float = 1e-10,
             max_iter: int = 100_000, rng=None,
             samples_per_iteration: int = None, probe: float = 0.2) -> VIResult:
    """Iterate kernel evaluation and policy extraction to a fixed point.

    ``evaluator='exact'`` sweeps the block recursion directly;
    ``evaluator='lsq'`` realizes each sweep by least-squares identification
    from freshly sampled transitions under the current policy.
    Returns the kernel, its gain and the Frobenius residual history.
    """
    require(evaluator in ("exact", "lsq"), f"unknown evaluator {evaluator!r}")
    kernel = init_kernel if init_kernel is not None else QKernel.scaled_identity(
        model.n, model.m, init_scale)
    require(min_symmetric_eigenvalue(kernel.matrix) > 0,
            "initial kernel must be positive definite (admissible)")
    if evaluator == "lsq":
        rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
        p = model.n + model.m
        if samples_per_iteration is None:
            samples_per_iteration = 4 * (p * (p + 1) // 2)
    residuals = []
    for iteration in range(1, max_iter + 1):
        if evaluator == "exact":
            updated = exact_kernel_update(model, cost, kernel, variant=variant)
        else:
            gain = extract_policy(kernel)
            samples = collect_transitions(
                model, cost, gain, samples_per_iteration, rng, probe=probe)
            updated = lsq_kernel_fit(samples, kernel)
        residual = float(np.linalg.norm(updated.matrix - kernel.matrix, "fro"))
        residuals.append(residual)
        kernel = updated
        if residual < tol:
            return VIResult(kernel=kernel, gain=extract_policy(kernel),
                            residuals=residuals, iterations=iteration)
    raise ConvergenceError(
        f"kernel value iteration ({evaluator}) did not reach tol={tol:g} "
        f"in {max_iter} sweeps (last residual {residuals[-1]:.3e})",
        residual=residuals[-1], iterations=max_iter)


class KernelValueIteration(BaseEstimator):
    """Estimator wrapper around :func:`vi_solve`.

    ``fit(model, cost)`` stores ``kernel_``, ``gain_``, ``residuals_`` and
    ``n_iter_``; ``predict(z)`` applies the extracted policy with the plant's
    saturation bound.
    """

    def __init__(self, evaluator="exact", variant="standard", init_scale=1e-3,
                 tol=1e-10, max_iter=100_000, samples_per_iteration=None,
                 probe=0.2, random_state=None):
        self.evaluator = evaluator
        self.variant = variant
        self.init_scale = init_scale
        self.tol = tol
        self.max_iter = max_iter
        self.samples_per_iteration = samples_per_iteration
        self.probe = probe
        self.random_state = random_state

    def fit(self, model: PlantModel, cost: CostWeights):
        result = vi_solve(
            model, cost, evaluator=self.evaluator, variant=self.variant,
            init_scale=self.init_scale, tol=self.tol, max_iter=self.max_iter,
            rng=self.random_state, samples_per_iteration=self.samples_per_iteration,
            probe=self.probe)
        self.kernel_ = result.kernel
        self.gain_ = result.gain
        self.residuals_ = result.residuals
        self.n_iter_ = result.iterations
        self.control_bound_ = model.control_bound
        return self

    def predict(self, z) -> np.ndarray:
        if not hasattr(self, "gain_"):
            raise NotFittedError("KernelValueIteration is not fitted yet")
        z = as_vector(z, "z", self.gain_.shape[1])
        return saturate(-self.gain_ @ z, self.control_bound_)
