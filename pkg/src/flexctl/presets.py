"""Built-in numerical presets for the two flexible-wing case studies.

All constants are the published benchmark values for the decoupled
longitudinal and lateral subsystems at the 10.8 m/s trim condition: the
discrete-time state-space pairs, quadratic weights, initial conditions,
actor/critic initializations, learning rates, sampling period, saturation
bound and disturbance scales.
"""

from __future__ import annotations

import numpy as np

from .plant import CostWeights, PlantModel

__all__ = [
    "CONTROL_BOUND",
    "SAMPLING_PERIOD",
    "LEARNING_RATE",
    "CRITIC_INIT_SCALE",
    "DISTURBANCE_DYNAMICS_SCALE",
    "DISTURBANCE_STATE_SCALE",
    "SUBSYSTEMS",
    "A_LON",
    "B_LON",
    "A_LAT",
    "B_LAT",
    "Q_LON_DIAG",
    "Q_LAT_DIAG",
    "R_VALUE",
    "Z0_LON",
    "Z0_LAT",
    "WA0_LON",
    "WA0_LAT",
    "REFERENCE_WA_LON",
    "REFERENCE_WA_LAT",
    "longitudinal_plant",
    "lateral_plant",
    "longitudinal_cost",
    "lateral_cost",
    "plant_for",
    "cost_for",
    "initial_state",
    "initial_actor",
    "reference_actor",
]

CONTROL_BOUND = np.pi / 3        # rad, symmetric control-bar deflection limit
SAMPLING_PERIOD = 0.01           # s
LEARNING_RATE = 0.001            # shared actor/critic gradient rate
CRITIC_INIT_SCALE = 10.0         # critic starts at 10 * identity
DISTURBANCE_DYNAMICS_SCALE = 0.5
DISTURBANCE_STATE_SCALE = 0.2

SUBSYSTEMS = ("longitudinal", "lateral")

A_LON = np.array([
    [0.9982, 0.0065, 0.0012, -0.0971],
    [-0.0139, 0.9774, 0.1055, 0.0136],
    [0.0027, -0.0043, 0.9858, -0.0002],
    [0.0000, -0.0000, 0.0099, 1.0000],
])
B_LON = np.array([[0.0000], [0.0040], [0.0741], [0.0004]])

A_LAT = np.array([
    [0.9977, -0.0028, -0.1069, 0.0971, -0.0131],
    [-0.0131, 0.8092, 0.0677, -0.0007, 0.0001],
    [0.0026, 0.0332, 0.9802, 0.0001, -0.0000],
    [-0.0001, 0.0090, 0.0004, 1.0000, 0.0000],
    [0.0000, 0.0002, 0.0099, 0.0000, 1.0000],
])
B_LAT = np.array([[-0.0003], [0.0327], [0.0049], [0.0002], [0.0000]])

Q_LON_DIAG = np.array([0.0006, 0.0400, 1.0000, 1.0000])
Q_LAT_DIAG = np.array([0.0006, 0.2500, 0.2500, 1.0000, 1.0000])
R_VALUE = 0.9803

Z0_LON = np.array([28.0, -1.0, -0.6, 1.0])
Z0_LAT = np.array([10.0, 0.9, 0.9, 1.0, -0.5])

WA0_LON = np.array([[0.0317], [0.0014], [-2.4171], [-3.0740]])
WA0_LAT = np.array([[0.0404], [-0.6407], [-2.2064], [-1.8473], [-1.8872]])

# published closed-loop actor gains for the nominal training scenario,
# used as reference points for pole tables and gain comparisons
REFERENCE_WA_LON = np.array([[0.5229], [-0.9582], [-2.6512], [-2.5554]])
REFERENCE_WA_LAT = np.array([[0.0120], [-0.9219], [-2.4250], [-0.9458], [-1.1173]])

LON_STATE_LABELS = ("axial_velocity", "normal_velocity", "pitch_rate", "pitch")
LAT_STATE_LABELS = ("lateral_velocity", "roll_rate", "yaw_rate", "roll", "yaw")
LON_CONTROL_LABELS = ("alpha",)
LAT_CONTROL_LABELS = ("beta",)


def longitudinal_plant() -> PlantModel:
    return PlantModel(a=A_LON, b=B_LON, state_labels=LON_STATE_LABELS,
                      control_labels=LON_CONTROL_LABELS, control_bound=CONTROL_BOUND)


def lateral_plant() -> PlantModel:
    return PlantModel(a=A_LAT, b=B_LAT, state_labels=LAT_STATE_LABELS,
                      control_labels=LAT_CONTROL_LABELS, control_bound=CONTROL_BOUND)


def longitudinal_cost() -> CostWeights:
    return CostWeights.diagonal(Q_LON_DIAG, [R_VALUE])


def lateral_cost() -> CostWeights:
    return CostWeights.diagonal(Q_LAT_DIAG, [R_VALUE])


def _lookup(subsystem: str, lon, lat):
    if subsystem == "longitudinal":
        return lon
    if subsystem == "lateral":
        return lat
    raise ValueError(f"unknown subsystem {subsystem!r}; expected one of {SUBSYSTEMS}")


def plant_for(subsystem: str) -> PlantModel:
    return _lookup(subsystem, longitudinal_plant, lateral_plant)()


def cost_for(subsystem: str) -> CostWeights:
    return _lookup(subsystem, longitudinal_cost, lateral_cost)()


def initial_state(subsystem: str) -> np.ndarray:
    return _lookup(subsystem, Z0_LON, Z0_LAT).copy()


def initial_actor(subsystem: str) -> np.ndarray:
    return _lookup(subsystem, WA0_LON, WA0_LAT).copy()


def reference_actor(subsystem: str) -> np.ndarray:
    return _lookup(subsystem, REFERENCE_WA_LON, REFERENCE_WA_LAT).copy()
