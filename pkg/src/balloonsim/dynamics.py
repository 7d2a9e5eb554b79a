"""Vertical force model for a latex helium balloon.

Envelope geometry from the ideal gas law (internal pressure assumed equal
to ambient), plus buoyancy, quadratic drag, weight, the steady-state
ascent rate, and the second-order vertical acceleration. All functions are
pure; everything is SI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

MOLAR_MASS_HELIUM = 0.004      # kg/mol
GAS_CONSTANT = 8.31432         # J/(mol K)
DEFAULT_GRAVITY = 9.81         # m/s^2
DEFAULT_DRAG_COEFF = 0.2       # sphere in turbulent flow; literature uses 0.2-0.25

# Hard sanity bounds on the drag coefficient; values outside are almost
# certainly a config typo for a sphere-like envelope.
DRAG_COEFF_BOUNDS = (0.05, 1.0)


class DragCoefficientError(ValueError):
    """Drag coefficient outside the plausible sphere-flow range."""


class SingularityError(ZeroDivisionError):
    """Force balance has no finite solution (zero area with net force)."""


@dataclass(frozen=True)
class BalloonParams:
    """Fixed physical parameters of the flight system."""

    m_envelope: float                      # kg
    m_payload: float                       # kg
    molar_mass_helium: float = MOLAR_MASS_HELIUM
    c_drag: float = DEFAULT_DRAG_COEFF
    g: float = DEFAULT_GRAVITY
    gas_constant: float = GAS_CONSTANT

    def __post_init__(self):
        if self.m_envelope < 0 or self.m_payload < 0:
            raise ValueError("masses must be non-negative")
        if self.molar_mass_helium <= 0 or self.g <= 0 or self.gas_constant <= 0:
            raise ValueError("molar mass, g, and gas constant must be positive")
        lo, hi = DRAG_COEFF_BOUNDS
        if not lo <= self.c_drag <= hi:
            raise DragCoefficientError(
                f"c_drag={self.c_drag} outside plausible range [{lo}, {hi}]"
            )


@dataclass
class MassState:
    """Expendable resources on board: lift gas and ballast."""

    n_helium: float  # mol
    m_sand: float    # kg

    def __post_init__(self):
        if self.n_helium < 0 or self.m_sand < 0:
            raise ValueError("helium moles and sand mass must be non-negative")


def total_mass(params: BalloonParams, mass_state: MassState) -> float:
    """Total system mass [kg]: envelope + payload + helium + sand."""
    return (
        params.m_envelope
        + params.m_payload
        + mass_state.n_helium * params.molar_mass_helium
        + mass_state.m_sand
    )


def envelope_volume(n_helium: float, temperature: float, pressure: float,
                    gas_constant: float = GAS_CONSTANT) -> float:
    """Envelope volume V = nRT/P [m^3], internal pressure = ambient."""
    if temperature <= 0 or pressure <= 0:
        raise ValueError(f"need positive T and P, got T={temperature}, P={pressure}")
    if n_helium < 0:
        raise ValueError("n_helium must be non-negative")
    return n_helium * gas_constant * temperature / pressure


def cross_section_area(volume: float) -> float:
    """Cross-sectional area of a sphere of the given volume [m^2]."""
    if volume < 0:
        raise ValueError(f"volume must be non-negative, got {volume}")
    return math.pi * (3.0 * volume / (4.0 * math.pi)) ** (2.0 / 3.0)


def buoyancy_force(rho_air: float, volume: float, g: float = DEFAULT_GRAVITY) -> float:
    """Upthrust of the displaced air, rho*V*g [N], non-negative."""
    return rho_air * volume * g


def drag_force(rho_air: float, velocity: float, c_drag: float, area: float) -> float:
    """Signed quadratic drag [N]; always opposes the velocity."""
    return -0.5 * rho_air * c_drag * area * velocity * abs(velocity)


def steady_ascent_rate(rho_air: float, volume: float, mass: float,
                       c_drag: float, area: float, g: float = DEFAULT_GRAVITY) -> float:
    """Ascent rate [m/s] at which buoyancy, weight, and drag balance.

    Sign is negative when weight exceeds buoyancy (descent).
    """
    net = rho_air * volume * g - mass * g
    if net == 0.0:
        return 0.0
    if area <= 0.0 or rho_air <= 0.0 or c_drag <= 0.0:
        raise SingularityError(
            "nonzero net force with zero drag denominator "
            f"(rho={rho_air}, c_drag={c_drag}, A={area})"
        )
    direction = -1.0 if net < 0.0 else 1.0
    return direction * math.sqrt(abs(net) / (0.5 * rho_air * c_drag * area))


def vertical_acceleration(ascent_rate: float, rho_air: float, volume: float,
                          mass: float, c_drag: float, area: float,
                          g: float = DEFAULT_GRAVITY) -> float:
    """d2h/dt2 [m/s^2] from buoyancy, drag, and weight at the given rate."""
    if mass <= 0:
        raise ValueError(f"mass must be positive, got {mass}")
    f_net = (
        buoyancy_force(rho_air, volume, g)
        + drag_force(rho_air, ascent_rate, c_drag, area)
        - mass * g
    )
    return f_net / mass
