"""High-altitude balloon flight simulator with an episodic control environment."""

from .atmosphere import AtmosphereModel, AtmosphereSample
from .control import Command, ControlConfig, MassDelta
from .dynamics import BalloonParams, MassState
from .env import BalloonEnv, EnvConfig, StepResult, load_config
from .integrate import StateVector
from .wind import WindField, WindVector, load_windfield, synthesize

__version__ = "0.1.0"

__all__ = [
    "AtmosphereModel", "AtmosphereSample",
    "Command", "ControlConfig", "MassDelta",
    "BalloonParams", "MassState",
    "BalloonEnv", "EnvConfig", "StepResult", "load_config",
    "StateVector",
    "WindField", "WindVector", "load_windfield", "synthesize",
    "__version__",
]
