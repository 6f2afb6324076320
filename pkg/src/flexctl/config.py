"""Experiment configuration: a flat key/value text format with bracket-list
matrix literals, chosen for diffability and hand-editing of presets.

One assignment per line, ``key = value``; values are Python literals
(numbers, nested lists) or bare words; blank lines and lines starting with
``#`` are ignored. Unset keys take the defaults below, which reproduce the
published nominal training setup for the selected subsystem.
"""

from __future__ import annotations

import ast
import hashlib
from dataclasses import dataclass, field, fields

import numpy as np

from . import presets
from .exceptions import ConfigError
from .plant import CostWeights, DisturbanceSpec, PlantModel

__all__ = ["ExperimentConfig", "MODES"]

MODES = ("actor-critic", "hdp", "modelfree-exact", "modelfree-lsq",
         "riccati", "combined")


@dataclass
class ExperimentConfig:
    """Validated description of one experiment run."""

    plant: str = "longitudinal"          # longitudinal | lateral | custom
    mode: str = "actor-critic"
    a: list = None                       # custom plant matrices
    b: list = None
    q: list = None                       # diagonal list or nested rows
    r: float = None
    z0: list = None
    wa0: list = None
    wc0_scale: float = presets.CRITIC_INIT_SCALE
    eta_actor: float = presets.LEARNING_RATE
    eta_critic: float = presets.LEARNING_RATE
    dt: float = presets.SAMPLING_PERIOD
    steps: int = 6000
    control_bound: float = presets.CONTROL_BOUND
    probe: float = 0.01
    disturbance_dynamics: float = 0.0
    disturbance_state: float = 0.0
    input_form: str = "literal"
    assist_weight: float = 1.0
    riccati_variant: str = "standard"
    stop_tol: float = 0.0
    stop_window: int = 100
    seeds: tuple = (0,)

    def __post_init__(self):
        self.validate()

    # -- validation -------------------------------------------------------

    def validate(self):
        if self.plant not in ("longitudinal", "lateral", "custom"):
            raise ConfigError(f"unknown plant {self.plant!r}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.riccati_variant not in ("standard", "paper-literal"):
            raise ConfigError(f"unknown riccati_variant {self.riccati_variant!r}")
        if self.input_form not in ("literal", "additive"):
            raise ConfigError(f"unknown input_form {self.input_form!r}")
        if self.plant == "custom" and (self.a is None or self.b is None):
            raise ConfigError("custom plant requires explicit a and b matrices")
        if self.steps < 1:
            raise ConfigError("steps must be at least 1")
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if not 0 < self.eta_actor < 1 or not 0 < self.eta_critic < 1:
            raise ConfigError("learning rates must lie in (0, 1)")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        self.seeds = tuple(int(s) for s in self.seeds)
        # cross-validate every dimension by building the objects once
        try:
            model = self.build_plant()
            cost = self.build_cost()
            z0 = self.initial_state()
            wa0 = self.initial_actor()
        except ConfigError:
            raise
        except Exception as exc:  # dimension or value errors surface as config errors
            raise ConfigError(f"inconsistent configuration: {exc}") from exc
        if cost.q.shape[0] != model.n:
            raise ConfigError(f"Q is {cost.q.shape[0]}x{cost.q.shape[0]}, plant has n={model.n}")
        if cost.r.shape[0] != model.m:
            raise ConfigError(f"R is {cost.r.shape[0]}x{cost.r.shape[0]}, plant has m={model.m}")
        if z0.shape[0] != model.n:
            raise ConfigError(f"z0 has length {z0.shape[0]}, plant has n={model.n}")
        if wa0.shape != (model.n, model.m):
            raise ConfigError(f"wa0 has shape {wa0.shape}, expected ({model.n}, {model.m})")

    # -- builders ---------------------------------------------------------

    def build_plant(self) -> PlantModel:
        if self.plant != "custom":
            base = presets.plant_for(self.plant)
            return PlantModel(a=base.a, b=base.b, state_labels=base.state_labels,
                              control_labels=base.control_labels,
                              control_bound=self.control_bound)
        return PlantModel(a=np.array(self.a, dtype=float),
                          b=np.array(self.b, dtype=float),
                          control_bound=self.control_bound)

    def build_cost(self) -> CostWeights:
        if self.q is None or self.r is None:
            if self.plant == "custom":
                raise ConfigError("custom plant requires explicit q and r")
            return presets.cost_for(self.plant)
        q = np.array(self.q, dtype=float)
        q = np.diag(q) if q.ndim == 1 else q
        r = np.atleast_2d(np.array(self.r, dtype=float))
        return CostWeights(q=q, r=r)

    def initial_state(self) -> np.ndarray:
        if self.z0 is not None:
            return np.array(self.z0, dtype=float).reshape(-1)
        if self.plant == "custom":
            raise ConfigError("custom plant requires explicit z0")
        return presets.initial_state(self.plant)

    def initial_actor(self) -> np.ndarray:
        if self.wa0 is not None:
            arr = np.array(self.wa0, dtype=float)
            return arr.reshape(-1, 1) if arr.ndim == 1 else arr
        if self.plant == "custom":
            model = self.build_plant()
            return np.zeros((model.n, model.m))
        return presets.initial_actor(self.plant)

    def disturbance(self, seed: int) -> DisturbanceSpec | None:
        if self.disturbance_dynamics == 0.0 and self.disturbance_state == 0.0:
            return None
        return DisturbanceSpec(dynamics_scale=self.disturbance_dynamics,
                               state_scale=self.disturbance_state,
                               seed=seed, input_form=self.input_form)

    # -- text round-trip ---------------------------------------------------

    def to_text(self) -> str:
        lines = ["# flexctl experiment configuration"]
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, np.ndarray):
                value = value.tolist()
            if isinstance(value, tuple):
                value = list(value)
            lines.append(f"{f.name} = {value!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, _, rhs = line.partition("=")
            key = key.strip()
            rhs = rhs.strip()
            if key not in known:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            try:
                value = ast.literal_eval(rhs)
            except (ValueError, SyntaxError):
                value = rhs  # bare word, e.g. longitudinal
            values[key] = value
        if "seeds" in values and isinstance(values["seeds"], (int, float)):
            values["seeds"] = (int(values["seeds"]),)
        if "seeds" in values and isinstance(values["seeds"], list):
            values["seeds"] = tuple(values["seeds"])
        try:
            return cls(**values)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as handle:
            return cls.from_text(handle.read())

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()[:16]


def case1_config(subsystem: str, seed: int = 0, steps: int = None) -> ExperimentConfig:
    """Nominal online-training setup for one subsystem."""
    if steps is None:
        steps = 6000 if subsystem == "longitudinal" else 8000
    return ExperimentConfig(plant=subsystem, mode="actor-critic", steps=steps,
                            probe=0.01, seeds=(seed,))


def case2_config(subsystem: str, mode: str = "combined",
                 seeds=tuple(range(20)), steps: int = None) -> ExperimentConfig:
    """Disturbed-robustness setup: combined, riccati or standalone learning.

    The probing noise is disabled here; the multiplicative disturbances
    already provide the excitation that probing exists to supply.
    """
    horizons = {
        ("longitudinal", "combined"): 900,
        ("longitudinal", "riccati"): 900,
        ("longitudinal", "actor-critic"): 2400,
        ("lateral", "combined"): 1600,
        ("lateral", "riccati"): 1600,
        ("lateral", "actor-critic"): 3600,
    }
    if mode == "modelfree":
        mode = "actor-critic"
    if steps is None:
        steps = horizons[(subsystem, mode)]
    return ExperimentConfig(
        plant=subsystem, mode=mode, steps=steps, probe=0.0,
        disturbance_dynamics=presets.DISTURBANCE_DYNAMICS_SCALE,
        disturbance_state=presets.DISTURBANCE_STATE_SCALE,
        seeds=tuple(seeds))
