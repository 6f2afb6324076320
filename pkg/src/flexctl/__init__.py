"""Model-free value-iteration control for flexible-wing aircraft.

Solvers (model-based value iteration, action-value kernel learning, Riccati
recursions, online actor-critic) share a small estimator API: construct with
hyperparameters, ``fit(model, cost, ...)``, then ``predict(z)`` for the
control. The functional layer underneath exposes every individual operation.
"""

from .actor_critic import (
    ActorCriticController,
    ActorCriticWeights,
    actor_eval,
    actor_target,
    actor_update,
    critic_eval,
    critic_target,
    critic_update,
    train_online,
)
from .config import ExperimentConfig, case1_config, case2_config
from .exceptions import (
    ConfigError,
    ConvergenceError,
    DimensionError,
    ExcitationError,
    FlexctlError,
    KernelDegeneracyError,
    NumericError,
    SimulationDiverged,
)
from .hdp import HDPValueIteration
from .plant import (
    CostWeights,
    Disturbance,
    DisturbanceSpec,
    PlantModel,
    Trajectory,
    disturbed_step,
    saturate,
    simulate,
    step,
)
from .qkernel import (
    KernelValueIteration,
    QKernel,
    TransitionSample,
    extract_policy,
    lsq_kernel_fit,
    vi_solve,
)
from .riccati import RiccatiValueIteration, dare_solve, recursion_step
from .spectral import PoleSet, closed_loop_poles, eigenvalues

__version__ = "0.1.0"

__all__ = [
    "ActorCriticController",
    "ActorCriticWeights",
    "ConfigError",
    "ConvergenceError",
    "CostWeights",
    "DimensionError",
    "Disturbance",
    "DisturbanceSpec",
    "ExcitationError",
    "ExperimentConfig",
    "FlexctlError",
    "HDPValueIteration",
    "KernelDegeneracyError",
    "KernelValueIteration",
    "NumericError",
    "PlantModel",
    "PoleSet",
    "QKernel",
    "RiccatiValueIteration",
    "SimulationDiverged",
    "Trajectory",
    "TransitionSample",
    "actor_eval",
    "actor_target",
    "actor_update",
    "case1_config",
    "case2_config",
    "closed_loop_poles",
    "critic_eval",
    "critic_target",
    "critic_update",
    "dare_solve",
    "disturbed_step",
    "eigenvalues",
    "extract_policy",
    "lsq_kernel_fit",
    "recursion_step",
    "saturate",
    "simulate",
    "step",
    "train_online",
    "vi_solve",
]
