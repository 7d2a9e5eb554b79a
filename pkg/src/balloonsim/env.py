"""Episodic balloon environment: reset/step with discrete commands.

Each control step runs, in order: command application (vent/ballast),
vertical update (steady-state closed form or RK4 substeps), horizontal
advection by the wind, then reward and termination checks. Everything is
deterministic in (config, seed, action sequence).

Config files are flat ``key = value`` text with ``schema = 1``; see
``CONFIG_KEYS`` for the full key set. Unknown keys are hard errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import wind as windmod
from .atmosphere import AtmosphereModel
from .control import Command, ControlConfig, MassDelta, apply_command, \
    required_moles_for_rate
from .dynamics import BalloonParams, MassState, cross_section_area, \
    envelope_volume, steady_ascent_rate, total_mass, vertical_acceleration
from .integrate import StateVector, rk4_step

UNCONTROLLABLE_STEPS = 10  # consecutive empty-resource steps before giving up
OBSERVATION_SIZE = 6
ACTION_COUNT = 3


class ConfigError(ValueError):
    """Invalid or unknown environment configuration."""


class EpisodeFinishedError(RuntimeError):
    """step() called after the episode terminated or truncated."""


@dataclass(frozen=True)
class EnvConfig:
    target_x: float = 0.0
    target_y: float = 0.0
    station_radius: float = 50_000.0   # m
    dt_control: float = 60.0           # s per step
    max_steps: int = 1440              # one simulated day at 60 s
    altitude_min: float = 2_000.0      # m, terminal below
    altitude_max: float = 30_000.0     # m, terminal above
    initial_x: float = 0.0
    initial_y: float = 0.0
    initial_altitude: float = 5_000.0
    initial_ascent_rate: float = 0.0
    initial_n_helium: Optional[float] = None   # None: solve for neutral lift
    initial_m_sand: float = 0.5        # kg
    mode: str = "kinematic"            # 'kinematic' | 'dynamic'
    integrator_dt: float = 0.5         # s, dynamic-mode substep
    seed: int = 0
    obs_position_scale: float = 100_000.0  # m per unit observation
    obs_ascent_scale: float = 5.0          # m/s per unit observation
    reward_coeff: float = 0.4
    reward_decay: Optional[float] = None   # m; None: station_radius
    balloon: BalloonParams = field(
        default_factory=lambda: BalloonParams(m_envelope=1.2, m_payload=0.8))
    control: ControlConfig = field(default_factory=ControlConfig)
    wind_file: Optional[str] = None
    wind_synth: str = "constant:u=0,v=0:0"

    def __post_init__(self):
        if self.station_radius <= 0 or self.dt_control <= 0 or self.max_steps < 1:
            raise ConfigError("station_radius, dt_control, max_steps must be positive")
        if not self.altitude_min < self.initial_altitude < self.altitude_max:
            raise ConfigError(
                f"initial altitude {self.initial_altitude} must lie strictly inside "
                f"bounds ({self.altitude_min}, {self.altitude_max})")
        if self.mode not in ("kinematic", "dynamic"):
            raise ConfigError(f"mode must be kinematic or dynamic, got {self.mode!r}")
        if self.integrator_dt <= 0 or self.obs_position_scale <= 0 \
                or self.obs_ascent_scale <= 0:
            raise ConfigError("scales and integrator_dt must be positive")
        if self.initial_m_sand < 0 or (
                self.initial_n_helium is not None and self.initial_n_helium < 0):
            raise ConfigError("initial resources must be non-negative")

    @property
    def decay_length(self) -> float:
        return self.station_radius if self.reward_decay is None else self.reward_decay


# config-file key -> (target, attribute, converter); targets: env/balloon/control
def _opt_float(s: str):
    return None if s.lower() in ("auto", "none") else float(s)


CONFIG_KEYS = {
    "schema": ("meta", None, str),
    "target_x": ("env", "target_x", float),
    "target_y": ("env", "target_y", float),
    "station_radius": ("env", "station_radius", float),
    "dt_control": ("env", "dt_control", float),
    "max_steps": ("env", "max_steps", int),
    "altitude_min": ("env", "altitude_min", float),
    "altitude_max": ("env", "altitude_max", float),
    "initial_x": ("env", "initial_x", float),
    "initial_y": ("env", "initial_y", float),
    "initial_altitude": ("env", "initial_altitude", float),
    "initial_ascent_rate": ("env", "initial_ascent_rate", float),
    "initial_n_helium": ("env", "initial_n_helium", _opt_float),
    "initial_m_sand": ("env", "initial_m_sand", float),
    "mode": ("env", "mode", str),
    "integrator_dt": ("env", "integrator_dt", float),
    "seed": ("env", "seed", int),
    "obs_position_scale": ("env", "obs_position_scale", float),
    "obs_ascent_scale": ("env", "obs_ascent_scale", float),
    "reward_coeff": ("env", "reward_coeff", float),
    "reward_decay": ("env", "reward_decay", _opt_float),
    "wind_file": ("env", "wind_file", str),
    "wind_synth": ("env", "wind_synth", str),
    "m_envelope": ("balloon", "m_envelope", float),
    "m_payload": ("balloon", "m_payload", float),
    "molar_mass_helium": ("balloon", "molar_mass_helium", float),
    "c_drag": ("balloon", "c_drag", float),
    "g": ("balloon", "g", float),
    "gas_constant": ("balloon", "gas_constant", float),
    "v_up": ("control", "v_up", float),
    "v_down": ("control", "v_down", float),
    "float_band": ("control", "float_band", float),
    "max_vent_rate": ("control", "max_vent_rate", float),
    "max_ballast_rate": ("control", "max_ballast_rate", float),
}


def load_config(path: str) -> EnvConfig:
    """Read a flat key-value config file (schema 1)."""
    values: dict[str, dict] = {"env": {}, "balloon": {}, "control": {}}
    schema = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = (s.strip() for s in line.partition("="))
            if key not in CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            target, attr, conv = CONFIG_KEYS[key]
            try:
                parsed = conv(value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}")
            if target == "meta":
                schema = parsed
            else:
                values[target][attr] = parsed
    if schema is None:
        raise ConfigError(f"{path}: missing required 'schema = 1' entry")
    if schema != "1":
        raise ConfigError(f"{path}: unsupported schema version {schema!r}")
    try:
        balloon = BalloonParams(m_envelope=1.2, m_payload=0.8)
        if values["balloon"]:
            balloon = replace(balloon, **values["balloon"])
        control = ControlConfig(**values["control"])
        return EnvConfig(balloon=balloon, control=control, **values["env"])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def parse_wind_synth_spec(spec: str) -> tuple[str, dict, int]:
    """Parse 'kind:key=val,...:seed' into synthesize() arguments."""
    parts = spec.split(":")
    if len(parts) not in (2, 3):
        raise ConfigError(f"bad wind synth spec {spec!r}; want kind:params[:seed]")
    kind = parts[0]
    seed = int(parts[-1]) if len(parts) == 3 else 0
    params: dict = {}
    if parts[1]:
        for item in parts[1].split(","):
            if "=" not in item:
                raise ConfigError(f"bad wind synth parameter {item!r}")
            key, _, value = item.partition("=")
            if key == "bands":
                bands = []
                for chunk in value.split("|"):
                    fields = chunk.split("_")
                    if len(fields) != 3:
                        raise ConfigError(
                            f"bad band {chunk!r}; want base_u_v (underscores)")
                    bands.append(tuple(float(f) for f in fields))
                params["bands"] = bands
            elif key == "interp":
                params["interp"] = value
            else:
                params[key] = float(value)
    return kind, params, seed


def build_wind(config: EnvConfig) -> windmod.WindField:
    if config.wind_file:
        return windmod.load_windfield(config.wind_file)
    kind, params, seed = parse_wind_synth_spec(config.wind_synth)
    return windmod.synthesize(kind, params, seed)


@dataclass
class EnvState:
    x: float
    y: float
    vertical: StateVector
    mass: MassState
    step_count: int
    rng: np.random.Generator
    terminated: bool = False
    truncated: bool = False
    empty_streak: int = 0


@dataclass
class StepResult:
    observation: np.ndarray
    reward: float
    terminated: bool
    truncated: bool
    diagnostics: dict


class BalloonEnv:
    """Single episode at a time; not safe for concurrent step/reset on one
    instance. Separate instances are fully independent; a WindField may be
    shared read-only."""

    def __init__(self, config: EnvConfig, wind_field: windmod.WindField | None = None):
        self.config = config
        self.atmosphere = AtmosphereModel()
        self.wind_field = wind_field if wind_field is not None else build_wind(config)
        self.state: EnvState | None = None
        self._n_helium_initial = self._initial_helium()
        if config.initial_m_sand > 0:
            self._m_sand_initial = config.initial_m_sand
        else:
            self._m_sand_initial = 1.0  # avoid division by zero in the observation

    def _initial_helium(self) -> float:
        cfg = self.config
        if cfg.initial_n_helium is not None:
            return cfg.initial_n_helium
        # neutral lift at the initial altitude, given the full sand load
        atm = self.atmosphere.sample(cfg.initial_altitude)
        m_fixed = cfg.balloon.m_envelope + cfg.balloon.m_payload + cfg.initial_m_sand
        return required_moles_for_rate(
            cfg.balloon, m_fixed, atm.temperature, atm.pressure, atm.density, 0.0)

    # --- episodic protocol -------------------------------------------------

    def reset(self, seed: int | None = None) -> np.ndarray:
        cfg = self.config
        effective_seed = cfg.seed if seed is None else seed
        self.state = EnvState(
            x=cfg.initial_x,
            y=cfg.initial_y,
            vertical=StateVector(cfg.initial_altitude, cfg.initial_ascent_rate),
            mass=MassState(self._n_helium_initial,
                           cfg.initial_m_sand if cfg.initial_m_sand > 0 else 0.0),
            step_count=0,
            rng=np.random.default_rng(effective_seed),
        )
        return self.observe()

    def step(self, action: Command | int) -> StepResult:
        if self.state is None:
            raise EpisodeFinishedError("call reset() before step()")
        state = self.state
        if state.terminated or state.truncated:
            raise EpisodeFinishedError("episode already finished; call reset()")
        command = Command(action)
        cfg = self.config
        params = cfg.balloon

        # 1. control
        atm = self.atmosphere.sample(state.vertical.altitude)
        delta = apply_command(state.mass, command, atm,
                              state.vertical.ascent_rate, params,
                              cfg.control, cfg.dt_control)
        state.mass = MassState(
            max(state.mass.n_helium + delta.d_n_helium, 0.0),
            max(state.mass.m_sand + delta.d_m_sand, 0.0),
        )

        # 2. vertical update
        if cfg.mode == "kinematic":
            state.vertical = self._kinematic_update(state, atm)
        else:
            state.vertical = self._dynamic_update(state)

        # 3. horizontal advection at the new altitude
        t_now = state.step_count * cfg.dt_control
        wind_h = min(max(state.vertical.altitude, 0.0), 86_000.0)
        w = self.wind_field.wind_at(state.x, state.y, wind_h, t_now)
        state.x, state.y = windmod.advect(state.x, state.y, w, cfg.dt_control)

        # 4. bookkeeping, reward, termination
        state.step_count += 1
        if state.mass.n_helium <= 0.0 and state.mass.m_sand <= 0.0:
            state.empty_streak += 1
        else:
            state.empty_streak = 0

        h = state.vertical.altitude
        if not cfg.altitude_min <= h <= cfg.altitude_max:
            state.terminated = True
        elif state.empty_streak >= UNCONTROLLABLE_STEPS:
            state.terminated = True
        elif state.step_count >= cfg.max_steps:
            state.truncated = True

        distance = math.hypot(state.x - cfg.target_x, state.y - cfg.target_y)
        raw_obs = self._raw_observation()
        diagnostics = {
            "x": state.x, "y": state.y,
            "altitude": h, "ascent_rate": state.vertical.ascent_rate,
            "n_helium": state.mass.n_helium, "m_sand": state.mass.m_sand,
            "d_n_helium": delta.d_n_helium, "d_m_sand": delta.d_m_sand,
            "saturated": delta.saturated,
            "distance": distance,
            "observation_preclip": raw_obs.tolist(),
        }
        return StepResult(
            observation=np.clip(raw_obs, -1.0, 1.0),
            reward=self.reward(),
            terminated=state.terminated,
            truncated=state.truncated,
            diagnostics=diagnostics,
        )

    # --- internals ---------------------------------------------------------

    def _kinematic_update(self, state: EnvState, atm) -> StateVector:
        cfg = self.config
        params = cfg.balloon
        volume = envelope_volume(state.mass.n_helium, atm.temperature,
                                 atm.pressure, params.gas_constant)
        area = cross_section_area(volume)
        mass = total_mass(params, state.mass)
        if volume == 0.0:
            # no envelope left: pure free fall has no steady rate; fall at the
            # down command's magnitude as a bounded stand-in until termination
            rate = cfg.control.v_down
        else:
            rate = steady_ascent_rate(atm.density, volume, mass,
                                      params.c_drag, area, params.g)
        return StateVector(state.vertical.altitude + rate * cfg.dt_control, rate)

    def _dynamic_update(self, state: EnvState) -> StateVector:
        cfg = self.config
        params = cfg.balloon
        mass = total_mass(params, state.mass)
        n = state.mass.n_helium

        def deriv(t, z):
            h = min(max(z[0], 0.0), 86_000.0)
            atm = self.atmosphere.sample(h)
            volume = envelope_volume(n, atm.temperature, atm.pressure,
                                     params.gas_constant)
            area = cross_section_area(volume)
            accel = vertical_acceleration(z[1], atm.density, volume, mass,
                                          params.c_drag, area, params.g)
            return np.array([z[1], accel])

        y = state.vertical.as_array()
        t = 0.0
        remaining = cfg.dt_control
        while remaining > 1e-12:
            dt = min(cfg.integrator_dt, remaining)
            y = rk4_step(deriv, t, y, dt)
            t += dt
            remaining -= dt
        return StateVector.from_array(y)

    def _raw_observation(self) -> np.ndarray:
        cfg = self.config
        state = self.state
        h_mid = 0.5 * (cfg.altitude_min + cfg.altitude_max)
        h_half = 0.5 * (cfg.altitude_max - cfg.altitude_min)
        return np.array([
            (state.x - cfg.target_x) / cfg.obs_position_scale,
            (state.y - cfg.target_y) / cfg.obs_position_scale,
            (state.vertical.altitude - h_mid) / h_half,
            state.vertical.ascent_rate / cfg.obs_ascent_scale,
            state.mass.m_sand / self._m_sand_initial,
            state.mass.n_helium / self._n_helium_initial,
        ])

    def observe(self) -> np.ndarray:
        """Current normalized observation, channels clipped to [-1, 1]."""
        if self.state is None:
            raise EpisodeFinishedError("call reset() first")
        return np.clip(self._raw_observation(), -1.0, 1.0)

    def reward(self) -> float:
        """1.0 inside the station circle, exponential falloff outside."""
        cfg = self.config
        state = self.state
        d = math.hypot(state.x - cfg.target_x, state.y - cfg.target_y)
        if d <= cfg.station_radius:
            return 1.0
        return cfg.reward_coeff * 2.0 ** (-(d - cfg.station_radius) / cfg.decay_length)
