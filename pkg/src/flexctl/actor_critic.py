"""Online actor-critic realization of the model-free value iteration.

Single-layer actor ``u = W_a' z`` and quadratic critic
``S(z, u) = 0.5 chi' W_c chi`` with gradient-descent weight adaptation on
live plant interaction. Per step, in order: evaluate the actor, update the
actor toward the critic-implied target, step the plant with the saturated
control, then update the critic toward its bootstrap target.

The update laws are exact as written; the training loop adds two numeric
guards around them (it never alters an applied update):

* the actor update is skipped while ``eta * ||z||^2 >= 1``, the regime where
  a gradient step of the pinned rate overshoots its own contraction bound;
* the critic is reset to its initial matrix when the value pipeline exceeds
  ``value_guard`` or turns non-finite, and that step's updates are skipped.

Both guards matter only during violent transients (large states, heavy
disturbances); counted occurrences are reported in the training result.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .exceptions import SimulationDiverged
from .plant import (
    CostWeights,
    Disturbance,
    DisturbanceSpec,
    PlantModel,
    Trajectory,
    apply_disturbance,
    draw_disturbance,
    saturate,
    step,
)
from .validation import as_matrix, as_vector, min_symmetric_eigenvalue, require, symmetrize

__all__ = [
    "ActorCriticWeights",
    "actor_eval",
    "critic_eval",
    "actor_target",
    "actor_update",
    "critic_target",
    "critic_update",
    "train_online",
    "TrainResult",
    "ActorCriticController",
]

VALUE_GUARD = 1e8
STATE_GUARD = 1e9


@dataclass(frozen=True)
class ActorCriticWeights:
    """Actor matrix (n x m), critic matrix (n+m x n+m) and their rates."""

    actor: np.ndarray
    critic: np.ndarray
    eta_actor: float = 0.001
    eta_critic: float = 0.001

    def __post_init__(self):
        actor = as_matrix(self.actor, "actor")
        critic = as_matrix(self.critic, "critic")
        require(critic.shape[0] == critic.shape[1], "critic must be square")
        require(critic.shape[0] == actor.shape[0] + actor.shape[1],
                f"critic size {critic.shape[0]} != n + m = "
                f"{actor.shape[0] + actor.shape[1]}")
        require(0.0 < self.eta_actor < 1.0, "eta_actor must lie in (0, 1)")
        require(0.0 < self.eta_critic < 1.0, "eta_critic must lie in (0, 1)")
        object.__setattr__(self, "actor", actor)
        object.__setattr__(self, "critic", symmetrize(critic))

    @property
    def n(self) -> int:
        return self.actor.shape[0]

    @property
    def m(self) -> int:
        return self.actor.shape[1]


def actor_eval(actor, z) -> np.ndarray:
    """Raw actor output ``u = W_a' z`` (saturation is the caller's job)."""
    actor = as_matrix(actor, "actor")
    z = as_vector(z, "z", actor.shape[0])
    return actor.T @ z


def critic_eval(critic, z, u) -> float:
    """Critic value 0.5 chi' W_c chi with chi = (z; u)."""
    critic = as_matrix(critic, "critic")
    chi = np.concatenate([np.asarray(z, dtype=float).reshape(-1),
                          np.asarray(u, dtype=float).reshape(-1)])
    require(chi.shape[0] == critic.shape[0],
            f"chi length {chi.shape[0]} != critic size {critic.shape[0]}")
    return 0.5 * float(chi @ critic @ chi)


def actor_target(critic, z) -> np.ndarray:
    """Critic-implied policy target ``-(W_c,uu)^-1 W_c,uz z``.

    Model-free: reads only critic blocks. Raises ``KernelDegeneracyError``
    through the kernel machinery when the control block is not positive
    definite.
    """
    from .qkernel import QKernel, extract_policy

    z = as_vector(z, "z")
    kernel = QKernel(matrix=as_matrix(critic, "critic"), n_states=z.shape[0])
    return -extract_policy(kernel) @ z


def actor_update(actor, eta, u_hat, u_target, z) -> np.ndarray:
    """Gradient step ``W_a' <- W_a' - eta (u_hat - u_target) z'``."""
    actor = as_matrix(actor, "actor")
    z = as_vector(z, "z", actor.shape[0])
    err = as_vector(u_hat, "u_hat", actor.shape[1]) - as_vector(
        u_target, "u_target", actor.shape[1])
    return actor - eta * np.outer(z, err)


def critic_target(cost: CostWeights, z, u, critic, z_next, u_next) -> float:
    """Bootstrap target ``0.5 (z'Qz + u'Ru) + S(z_next, u_next)``."""
    return cost.utility(z, u) + critic_eval(critic, z_next, u_next)


def critic_update(critic, eta, s_hat, s_target, chi) -> np.ndarray:
    """Gradient step ``W_c <- W_c - eta (S_hat - S_target) chi chi'``,
    symmetrized."""
    critic = as_matrix(critic, "critic")
    chi = as_vector(chi, "chi", critic.shape[0])
    return symmetrize(critic - eta * (float(s_hat) - float(s_target)) * np.outer(chi, chi))


@dataclass
class TrainResult:
    weights: ActorCriticWeights
    trajectory: Trajectory
    actor_history: np.ndarray   # (steps+1, n, m)
    critic_history: np.ndarray  # (steps+1, n+m, n+m)
    saturation_steps: np.ndarray
    critic_resets: int = 0
    actor_skips: int = 0
    degenerate_skips: int = 0
    stopped_at: int = None      # step index of early convergence, if any
    value_change: np.ndarray = field(default=None)

    def actor_tail_change(self, fraction: float = 0.05) -> float:
        """Largest per-entry actor drift over the trailing fraction of steps."""
        tail = max(1, int(fraction * (self.actor_history.shape[0] - 1)))
        return float(np.abs(self.actor_history[-1] - self.actor_history[-tail - 1]).max())

    def critic_tail_change(self, fraction: float = 0.05) -> float:
        tail = max(1, int(fraction * (self.critic_history.shape[0] - 1)))
        return float(np.abs(self.critic_history[-1] - self.critic_history[-tail - 1]).max())


def train_online(model: PlantModel, cost: CostWeights, weights: ActorCriticWeights,
                 z0, *, steps: int, dt: float = 0.01, probe: float = 0.01,
                 rng=None, disturbance: DisturbanceSpec = None,
                 riccati_gain=None, assist_weight: float = 1.0,
                 input_form: str = None, stop_tol: float = 1e-7,
                 stop_window: int = 100, value_guard: float = VALUE_GUARD,
                 state_guard: float = STATE_GUARD) -> TrainResult:
    """Run the online adaptation loop against the (possibly disturbed) plant.

    With a disturbance spec, controllers observe the perturbed state. With a
    ``riccati_gain`` the loop applies the composite control: the fixed-gain
    component enters through B and the learned component per the configured
    input form; without it, any learned control passes through the full
    physical input matrix. Terminates early when the mean absolute change of
    the critic value over ``stop_window`` steps falls below ``stop_tol``
    (``stop_tol=0`` disables).

    Returns the full weight histories alongside the trajectory; the recorded
    control is the total commanded signal.
    """
    require(steps >= 1, "steps must be at least 1")
    z = as_vector(z0, "z0", model.n)
    n, m = model.n, model.m
    if rng is None:
        rng = np.random.default_rng(disturbance.seed if disturbance is not None else 0)
    elif not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    if riccati_gain is not None:
        riccati_gain = as_matrix(riccati_gain, "riccati_gain")
        require(riccati_gain.shape == (m, n),
                f"riccati_gain shape {riccati_gain.shape} != ({m}, {n})")
    if input_form is None:
        input_form = disturbance.input_form if disturbance is not None else "literal"
    bound = model.control_bound

    actor = weights.actor.copy()
    critic = weights.critic.copy()
    critic_init = weights.critic.copy()
    eta_a, eta_c = weights.eta_actor, weights.eta_critic

    states = np.empty((steps + 1, n))
    controls = np.empty((steps, m))
    utilities = np.empty(steps)
    actor_history = np.empty((steps + 1, n, m))
    critic_history = np.empty((steps + 1, n + m, n + m))
    value_change = np.empty(steps)
    dist_log = [] if disturbance is not None else None
    sat_steps = []
    states[0] = z
    actor_history[0] = actor
    critic_history[0] = critic
    critic_resets = actor_skips = degenerate_skips = 0
    stopped_at = None
    executed = 0

    for k in range(steps):
        if disturbance is not None:
            dist = draw_disturbance(model, z, disturbance, rng)
            observed = z + dist.dz
        else:
            dist = None
            observed = z

        u_hat = actor.T @ observed
        if probe > 0:
            u_mf = saturate(u_hat + rng.uniform(-probe, probe, m), bound)
        else:
            u_mf = saturate(u_hat, bound)
        if bound is not None and bool((np.abs(u_mf) >= bound - 1e-12).any()):
            sat_steps.append(k)

        chi = np.concatenate([observed, u_mf])
        s_hat = 0.5 * float(chi @ critic @ chi)
        critic_sane = np.isfinite(s_hat) and abs(s_hat) <= value_guard
        actor_sane = eta_a * float(observed @ observed) < 1.0

        # actor adaptation toward the critic-implied target, clamped to the
        # actuator bound (targets beyond it are unreachable)
        if critic_sane and actor_sane:
            uu = critic[n:, n:]
            if min_symmetric_eigenvalue(uu) > 0:
                target = saturate(-np.linalg.solve(uu, critic[n:, :n] @ observed), bound)
                actor = actor_update(actor, eta_a, u_hat, target, observed)
            else:
                degenerate_skips += 1
        else:
            actor_skips += 1

        # plant transition
        if disturbance is None:
            z_next = step(model, z, u_mf)
            u_total = u_mf
        elif riccati_gain is not None:
            u_r = saturate(-assist_weight * (riccati_gain @ observed), bound)
            z_next = apply_disturbance(model, z, u_r, u_mf, dist, input_form)
            u_total = u_r + u_mf
        else:
            # standalone learned control passes through the physical B + dB
            z_next = apply_disturbance(model, z, u_mf, u_mf, dist, "literal")
            u_total = u_mf
        if not np.isfinite(z_next).all() or np.abs(z_next).max() > state_guard:
            raise SimulationDiverged(
                f"state magnitude exceeded {state_guard:g} at step {k}", step=k)

        # critic adaptation toward the bootstrap target (updated actor)
        u_next = saturate(actor.T @ z_next, bound)
        chi_next = np.concatenate([z_next, u_next])
        s_target = cost.utility(observed, u_mf) + 0.5 * float(chi_next @ critic @ chi_next)
        if critic_sane and np.isfinite(s_target) and abs(s_target) <= value_guard:
            critic = critic_update(critic, eta_c, s_hat, s_target, chi)
            value_change[k] = abs(0.5 * float(chi @ critic @ chi) - s_hat)
        else:
            critic_resets += 1
            critic = critic_init.copy()
            value_change[k] = 0.0

        controls[k] = u_total
        utilities[k] = cost.utility(states[k], u_total)
        if dist_log is not None:
            dist_log.append(dist)
        z = z_next
        states[k + 1] = z
        actor_history[k + 1] = actor
        critic_history[k + 1] = critic
        executed = k + 1

        if (stop_tol > 0 and k + 1 >= stop_window
                and float(value_change[k + 1 - stop_window:k + 1].mean()) < stop_tol):
            stopped_at = k + 1
            break

    end = executed
    trajectory = Trajectory(dt=dt, states=states[:end + 1], controls=controls[:end],
                            utilities=utilities[:end], disturbances=dist_log)
    final = ActorCriticWeights(actor=actor, critic=critic,
                               eta_actor=eta_a, eta_critic=eta_c)
    return TrainResult(
        weights=final,
        trajectory=trajectory,
        actor_history=actor_history[:end + 1],
        critic_history=critic_history[:end + 1],
        saturation_steps=np.array(sat_steps, dtype=int),
        critic_resets=critic_resets,
        actor_skips=actor_skips,
        degenerate_skips=degenerate_skips,
        stopped_at=stopped_at,
        value_change=value_change[:end],
    )


class ActorCriticController(BaseEstimator):
    """Estimator wrapper around :func:`train_online`.

    ``fit(model, cost, z0, actor0=..., disturbance=..., riccati_gain=...)``
    trains on live interaction and stores ``weights_``, ``result_`` and
    ``actor_weights_``; ``predict(z)`` returns the saturated actor control.
    """

    def __init__(self, eta_actor=0.001, eta_critic=0.001, steps=6000, dt=0.01,
                 probe=0.01, critic_init_scale=10.0, stop_tol=0.0,
                 stop_window=100, random_state=0):
        self.eta_actor = eta_actor
        self.eta_critic = eta_critic
        self.steps = steps
        self.dt = dt
        self.probe = probe
        self.critic_init_scale = critic_init_scale
        self.stop_tol = stop_tol
        self.stop_window = stop_window
        self.random_state = random_state

    def fit(self, model: PlantModel, cost: CostWeights, z0, actor0=None,
            disturbance: DisturbanceSpec = None, riccati_gain=None):
        actor0 = (np.zeros((model.n, model.m)) if actor0 is None
                  else as_matrix(actor0, "actor0"))
        weights0 = ActorCriticWeights(
            actor=actor0,
            critic=self.critic_init_scale * np.eye(model.n + model.m),
            eta_actor=self.eta_actor,
            eta_critic=self.eta_critic,
        )
        result = train_online(
            model, cost, weights0, z0, steps=self.steps, dt=self.dt,
            probe=self.probe, rng=self.random_state, disturbance=disturbance,
            riccati_gain=riccati_gain, stop_tol=self.stop_tol,
            stop_window=self.stop_window)
        self.result_ = result
        self.weights_ = result.weights
        self.actor_weights_ = result.weights.actor
        self.control_bound_ = model.control_bound
        return self

    def predict(self, z) -> np.ndarray:
        if not hasattr(self, "weights_"):
            raise NotFittedError("ActorCriticController is not fitted yet")
        return saturate(actor_eval(self.actor_weights_, z), self.control_bound_)
