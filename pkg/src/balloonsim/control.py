"""Altitude control: turn a discrete command into helium to vent or sand to drop.

Each command targets an ascent rate; the controller inverts the steady-state
force balance to find the mass (ballast case) or moles (vent case) that
would hold that rate, then moves toward it subject to actuator rate limits
and remaining resources. Helium can only leave the envelope and sand can
only be dropped, so both deltas are non-positive and each command touches
exactly one resource.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .atmosphere import AtmosphereSample
from .dynamics import (
    BalloonParams,
    MassState,
    cross_section_area,
    envelope_volume,
    total_mass,
)

MOLE_SOLVE_TOL = 1e-9   # mol
MOLE_SOLVE_MAX_ITER = 50


class Command(enum.Enum):
    DOWN = 0
    FLOAT = 1
    UP = 2


class InfeasibleCommandError(ValueError):
    """No non-negative helium amount achieves the requested rate."""


class MoleSolveError(ArithmeticError):
    """Fixed-point iteration for the vent amount failed to converge."""

    def __init__(self, residual: float):
        super().__init__(f"mole solve did not converge (residual {residual} mol)")
        self.residual = residual


@dataclass(frozen=True)
class ControlConfig:
    v_up: float = 2.0              # m/s, target rate for Up
    v_down: float = -2.0           # m/s, target rate for Down
    float_band: float = 0.2        # m/s, dead-band around zero for Float
    max_vent_rate: float = 0.05    # mol/s
    max_ballast_rate: float = 0.01  # kg/s

    def __post_init__(self):
        if not (self.v_up > self.float_band >= 0.0 > -self.float_band > self.v_down):
            raise ValueError(
                f"need v_up > float_band >= 0 > -float_band > v_down, got "
                f"v_up={self.v_up}, float_band={self.float_band}, v_down={self.v_down}"
            )
        if self.max_vent_rate <= 0 or self.max_ballast_rate <= 0:
            raise ValueError("actuator rate limits must be positive")


@dataclass(frozen=True)
class MassDelta:
    """Resource change from one command application; at most one is nonzero."""

    d_n_helium: float = 0.0  # mol, <= 0
    d_m_sand: float = 0.0    # kg, <= 0
    saturated: bool = False  # hit a rate limit or an empty reservoir

    def __post_init__(self):
        if self.d_n_helium > 0 or self.d_m_sand > 0:
            raise ValueError("deltas must be non-positive (vent/drop only)")
        if self.d_n_helium != 0.0 and self.d_m_sand != 0.0:
            raise ValueError("a command may touch only one resource")


def required_mass_for_rate(rho_air: float, volume: float, v_desired: float,
                           c_drag: float, area: float, g: float) -> float:
    """Total mass [kg] at which the steady ascent rate equals v_desired,
    holding the envelope volume fixed."""
    drag = 0.5 * rho_air * v_desired * abs(v_desired) * c_drag * area
    return (rho_air * volume * g - drag) / g


def required_moles_for_rate(params: BalloonParams, m_fixed: float,
                            temperature: float, pressure: float, rho_air: float,
                            v_desired: float) -> float:
    """Helium moles at which the steady ascent rate equals v_desired.

    m_fixed is the non-helium mass (envelope + payload + sand). The balance
    is linear in n for fixed area, but area itself grows as n^(2/3); iterate
    the linear solve with the area frozen at the previous iterate. The map
    is a strong contraction at balloon scales.
    """
    if m_fixed < 0:
        raise ValueError("m_fixed must be non-negative")
    # kg of net lift per mole: displaced air minus the helium itself
    lift_per_mole = rho_air * params.gas_constant * temperature / pressure \
        - params.molar_mass_helium
    if lift_per_mole <= 0:
        raise InfeasibleCommandError(
            f"air lighter per mole than helium (lift/mole = {lift_per_mole} kg/mol)"
        )
    g = params.g
    drag_coeff = 0.5 * rho_air * v_desired * abs(v_desired) * params.c_drag

    n = m_fixed / lift_per_mole if m_fixed > 0 else 0.0
    for _ in range(MOLE_SOLVE_MAX_ITER):
        volume = envelope_volume(n, temperature, pressure, params.gas_constant)
        area = cross_section_area(volume)
        n_next = (m_fixed * g + drag_coeff * area) / (g * lift_per_mole)
        if n_next < 0:
            raise InfeasibleCommandError(
                f"no non-negative helium amount reaches {v_desired} m/s"
            )
        if abs(n_next - n) <= MOLE_SOLVE_TOL:
            return n_next
        n = n_next
    raise MoleSolveError(abs(n_next - n))


def _vent_toward(state: MassState, params: BalloonParams, atm: AtmosphereSample,
                 v_target: float, limit: float) -> MassDelta:
    m_fixed = params.m_envelope + params.m_payload + state.m_sand
    n_target = required_moles_for_rate(
        params, m_fixed, atm.temperature, atm.pressure, atm.density, v_target)
    wanted = n_target - state.n_helium
    if wanted >= 0.0:
        return MassDelta()  # would need to add helium; nothing to do
    applied = max(wanted, -limit, -state.n_helium)
    return MassDelta(d_n_helium=applied, saturated=applied > wanted + 1e-15)


def _ballast_toward(state: MassState, params: BalloonParams, atm: AtmosphereSample,
                    v_target: float, limit: float) -> MassDelta:
    volume = envelope_volume(state.n_helium, atm.temperature, atm.pressure,
                             params.gas_constant)
    area = cross_section_area(volume)
    m_target = required_mass_for_rate(atm.density, volume, v_target,
                                      params.c_drag, area, params.g)
    wanted = m_target - total_mass(params, state)
    if wanted >= 0.0:
        return MassDelta()  # already light enough
    applied = max(wanted, -limit, -state.m_sand)
    return MassDelta(d_m_sand=applied, saturated=applied > wanted + 1e-15)


def apply_command(state: MassState, command: Command, atm: AtmosphereSample,
                  current_rate: float, params: BalloonParams,
                  config: ControlConfig, dt: float) -> MassDelta:
    """One control interval's resource change for the given command.

    Never raises on resource exhaustion; the delta saturates (possibly to
    zero) and the saturated flag is set.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    vent_limit = config.max_vent_rate * dt
    ballast_limit = config.max_ballast_rate * dt

    if command is Command.UP:
        return _ballast_toward(state, params, atm, config.v_up, ballast_limit)
    if command is Command.DOWN:
        return _vent_toward(state, params, atm, config.v_down, vent_limit)
    # Float: regulate toward zero rate outside the dead-band, else coast
    if current_rate > config.float_band:
        return _vent_toward(state, params, atm, 0.0, vent_limit)
    if current_rate < -config.float_band:
        return _ballast_toward(state, params, atm, 0.0, ballast_limit)
    return MassDelta()
