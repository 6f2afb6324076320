"""Discrete-time linear plant: transitions, saturation, disturbances, simulation.

The plant is ``Z' = A Z + B u``. Disturbed transitions follow the composite
equation ``Z' = (A + dA) (Z + dZ) + B u_r + dB u_mf`` with multiplicative,
entrywise Gaussian perturbations drawn per step. Controllers in disturbed
closed loops observe the perturbed state ``Z + dZ``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import SimulationDiverged
from .validation import (
    as_matrix,
    as_vector,
    check_compatible,
    check_square,
    check_symmetric,
    min_symmetric_eigenvalue,
    require,
)

__all__ = [
    "PlantModel",
    "CostWeights",
    "DisturbanceSpec",
    "Disturbance",
    "Trajectory",
    "saturate",
    "step",
    "draw_disturbance",
    "apply_disturbance",
    "disturbed_step",
    "simulate",
]

STATE_GUARD = 1e9  # abort threshold for |state| during simulation


@dataclass(frozen=True)
class PlantModel:
    """Pair (A, B) of a discrete-time linear system plus channel metadata.

    Parameters
    ----------
    a : (n, n) array
        State transition matrix.
    b : (n, m) array
        Control input matrix.
    state_labels, control_labels : tuple of str, optional
        Channel names, for output headers only.
    control_bound : float or (m,) array, optional
        Symmetric per-channel saturation bound, strictly positive.
    """

    a: np.ndarray
    b: np.ndarray
    state_labels: tuple = None
    control_labels: tuple = None
    control_bound: np.ndarray = None

    def __post_init__(self):
        a = check_square(self.a, "A")
        b = as_matrix(self.b, "B")
        check_compatible(a, b, "A", "B")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.state_labels is not None:
            require(len(self.state_labels) == a.shape[0], "state_labels length mismatch")
            object.__setattr__(self, "state_labels", tuple(self.state_labels))
        if self.control_labels is not None:
            require(len(self.control_labels) == b.shape[1], "control_labels length mismatch")
            object.__setattr__(self, "control_labels", tuple(self.control_labels))
        if self.control_bound is not None:
            bound = as_vector(
                np.broadcast_to(np.asarray(self.control_bound, dtype=float), (b.shape[1],)),
                "control_bound",
            )
            require(bool((bound > 0).all()), "control_bound must be strictly positive")
            object.__setattr__(self, "control_bound", bound)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[1]


@dataclass(frozen=True)
class CostWeights:
    """Symmetric weighting pair (Q, R) of the quadratic running cost."""

    q: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        q = check_symmetric(as_matrix(self.q, "Q"), "Q")
        r = check_symmetric(as_matrix(self.r, "R"), "R")
        require(min_symmetric_eigenvalue(r) > 0, "R must be positive definite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)

    @classmethod
    def diagonal(cls, q_diag, r_diag) -> "CostWeights":
        return cls(np.diag(np.atleast_1d(np.asarray(q_diag, dtype=float))),
                   np.diag(np.atleast_1d(np.asarray(r_diag, dtype=float))))

    def utility(self, z, u) -> float:
        """Running cost 0.5 (z'Qz + u'Ru)."""
        z = as_vector(z, "z", self.q.shape[0])
        u = as_vector(u, "u", self.r.shape[0])
        return 0.5 * float(z @ self.q @ z + u @ self.r @ u)


@dataclass(frozen=True)
class DisturbanceSpec:
    """Multiplicative perturbation scales and the seed of their stream.

    ``dynamics_scale`` applies entrywise to A and B, ``state_scale`` to the
    current state. Scale 0 reproduces the nominal system exactly.
    """

    dynamics_scale: float
    state_scale: float
    seed: int = 0
    input_form: str = "literal"  # how dB routes the model-free control

    def __post_init__(self):
        require(0.0 <= self.dynamics_scale <= 1.0, "dynamics_scale must lie in [0, 1]")
        require(0.0 <= self.state_scale <= 1.0, "state_scale must lie in [0, 1]")
        require(self.input_form in ("literal", "additive"),
                f"unknown input_form {self.input_form!r}")


@dataclass(frozen=True)
class Disturbance:
    """One realization (dA, dB, dZ) of the per-step perturbations."""

    da: np.ndarray
    db: np.ndarray
    dz: np.ndarray


@dataclass
class Trajectory:
    """Closed-loop record: states (steps+1) and per-step controls/utilities."""

    dt: float
    states: np.ndarray
    controls: np.ndarray
    utilities: np.ndarray
    disturbances: list = field(default=None)

    @property
    def steps(self) -> int:
        return self.controls.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.steps)

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)

    def total_cost(self) -> float:
        return float(self.utilities.sum())

    def settling_time(self, fraction: float = 0.01) -> float | None:
        """First time the state norm drops below ``fraction`` of its initial
        value and stays there for the remainder; ``None`` if never."""
        norms = self.norms()
        threshold = fraction * norms[0]
        below = norms < threshold
        # loop backwards: find the start of the trailing all-below run
        if not below[-1]:
            return None
        idx = len(below) - 1
        while idx > 0 and below[idx - 1]:
            idx -= 1
        return idx * self.dt


def saturate(u, bound):
    """Clamp each control channel to [-bound, +bound].

    ``bound`` may be a scalar, a per-channel array, or ``None`` (no-op).
    Idempotent and total over valid bounds.
    """
    u = np.asarray(u, dtype=float)
    if bound is None:
        return u.copy()
    bound = np.broadcast_to(np.asarray(bound, dtype=float), u.shape)
    return np.clip(u, -bound, bound)


def step(model: PlantModel, z, u) -> np.ndarray:
    """One nominal transition Z' = A Z + B u."""
    z = as_vector(z, "state", model.n)
    u = as_vector(u, "control", model.m)
    return model.a @ z + model.b @ u


def draw_disturbance(model: PlantModel, z, spec: DisturbanceSpec,
                     rng: np.random.Generator) -> Disturbance:
    """Draw one perturbation realization.

    Each entry is (scale x nominal entry x standard-normal draw), so zero
    entries stay zero. Draw order is fixed: dA row-major, then dB row-major,
    then dZ, which pins the stream layout for reproducible logs.
    """
    z = as_vector(z, "state", model.n)
    da = spec.dynamics_scale * model.a * rng.standard_normal(model.a.shape)
    db = spec.dynamics_scale * model.b * rng.standard_normal(model.b.shape)
    dz = spec.state_scale * z * rng.standard_normal(model.n)
    return Disturbance(da=da, db=db, dz=dz)


def apply_disturbance(model: PlantModel, z, u_riccati, u_modelfree,
                      disturbance: Disturbance, input_form: str = "literal") -> np.ndarray:
    """Composite disturbed transition for a given realization.

    ``literal``  : Z' = (A + dA)(Z + dZ) + B u_r + dB u_mf
    ``additive`` : Z' = (A + dA)(Z + dZ) + B u_r + (B + dB) u_mf
    """
    z = as_vector(z, "state", model.n)
    u_r = as_vector(u_riccati, "u_riccati", model.m)
    u_mf = as_vector(u_modelfree, "u_modelfree", model.m)
    b_mf = disturbance.db if input_form == "literal" else model.b + disturbance.db
    return ((model.a + disturbance.da) @ (z + disturbance.dz)
            + model.b @ u_r + b_mf @ u_mf)


def disturbed_step(model: PlantModel, z, u_riccati, u_modelfree,
                   spec: DisturbanceSpec, rng: np.random.Generator):
    """Draw a realization and apply the composite transition.

    Returns ``(next_state, disturbance)`` so the realization can be logged.
    """
    dist = draw_disturbance(model, z, spec, rng)
    z_next = apply_disturbance(model, z, u_riccati, u_modelfree, dist, spec.input_form)
    return z_next, dist


def simulate(model: PlantModel, controller, cost: CostWeights, z0, steps: int,
             dt: float = 0.01, spec: DisturbanceSpec = None,
             rng: np.random.Generator = None, state_guard: float = STATE_GUARD) -> Trajectory:
    """Roll the closed loop forward and record every sample.

    ``controller(k, z)`` receives the observed state (perturbed when a
    disturbance spec is present) and returns a control vector, or a pair
    ``(u_riccati, u_modelfree)`` in disturbed runs. A single returned control
    is routed through the full physical input matrix (both slots). Controls
    are saturated with the model's bound before application; the recorded
    control is the superposition actually commanded.
    """
    require(steps >= 1, "steps must be at least 1")
    z = as_vector(z0, "z0", model.n)
    if spec is not None and rng is None:
        rng = np.random.default_rng(spec.seed)
    states = np.empty((steps + 1, model.n))
    controls = np.empty((steps, model.m))
    utilities = np.empty(steps)
    disturbances = [] if spec is not None else None
    states[0] = z
    for k in range(steps):
        if spec is None:
            u = saturate(np.asarray(controller(k, z), dtype=float), model.control_bound)
            u_logged = u
            z = step(model, z, u)
        else:
            dist = draw_disturbance(model, z, spec, rng)
            observed = z + dist.dz
            out = controller(k, observed)
            if isinstance(out, tuple):
                u_r = saturate(np.asarray(out[0], dtype=float), model.control_bound)
                u_mf = saturate(np.asarray(out[1], dtype=float), model.control_bound)
                u_logged = u_r + u_mf
            else:
                u_r = u_mf = saturate(np.asarray(out, dtype=float), model.control_bound)
                u_logged = u_r
            z = apply_disturbance(model, z, u_r, u_mf, dist, spec.input_form)
            disturbances.append(dist)
        if not np.isfinite(z).all() or np.abs(z).max() > state_guard:
            raise SimulationDiverged(
                f"state magnitude exceeded {state_guard:g} at step {k}", step=k)
        states[k + 1] = z
        controls[k] = u_logged
        utilities[k] = cost.utility(states[k], u_logged)
    return Trajectory(dt=dt, states=states, controls=controls,
                      utilities=utilities, disturbances=disturbances)
