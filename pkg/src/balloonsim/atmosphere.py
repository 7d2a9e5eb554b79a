"""US Standard Atmosphere 1976 (0 to 86 km geometric).

Supplies temperature [K], pressure [Pa], and air density [kg/m^3] as a
function of altitude using the standard's 7-layer piecewise-linear
temperature profile in geopotential altitude. Density always comes from
the ideal gas law applied to the returned T and P.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Constants fixed by the 1976 standard
G0 = 9.80665            # m/s^2, standard gravity used in the pressure formulas
R_STAR = 8.31432        # J/(mol K), universal gas constant (standard's value)
M_AIR = 0.0289644       # kg/mol, mean molar mass of dry air
EARTH_RADIUS = 6_356_766.0   # m, effective earth radius for geopotential conversion

MAX_GEOMETRIC_ALTITUDE = 86_000.0  # m

# (base geopotential altitude m, base temperature K, lapse rate K/m)
_LAYERS = (
    (0.0, 288.15, -0.0065),
    (11_000.0, 216.65, 0.0),
    (20_000.0, 216.65, 0.001),
    (32_000.0, 228.65, 0.0028),
    (47_000.0, 270.65, 0.0),
    (51_000.0, 270.65, -0.0028),
    (71_000.0, 214.65, -0.002),
)

SEA_LEVEL_PRESSURE = 101_325.0  # Pa


class AltitudeRangeError(ValueError):
    """Altitude outside the modeled 0-86 km band."""


def geometric_to_geopotential(z: float) -> float:
    """Convert geometric altitude z [m] to geopotential altitude H [m]."""
    if not 0.0 <= z <= MAX_GEOMETRIC_ALTITUDE:
        raise AltitudeRangeError(
            f"geometric altitude {z} m outside valid range "
            f"[0, {MAX_GEOMETRIC_ALTITUDE:.0f}] m"
        )
    return EARTH_RADIUS * z / (EARTH_RADIUS + z)


def geopotential_to_geometric(h: float) -> float:
    """Inverse of geometric_to_geopotential."""
    if h < 0.0 or h >= EARTH_RADIUS:
        raise AltitudeRangeError(f"geopotential altitude {h} m out of range")
    return EARTH_RADIUS * h / (EARTH_RADIUS - h)


MAX_GEOPOTENTIAL_ALTITUDE = geometric_to_geopotential(MAX_GEOMETRIC_ALTITUDE)


@dataclass(frozen=True)
class AtmosphereSample:
    """Ambient conditions at one altitude."""

    temperature: float  # K
    pressure: float     # Pa
    density: float      # kg/m^3

    def __post_init__(self):
        if not (self.temperature > 0 and self.pressure > 0 and self.density > 0):
            raise ValueError("atmosphere sample must have positive T, P, rho")


class AtmosphereModel:
    """Immutable 7-layer model; layer base pressures are chained at construction.

    Safe to share across threads once built.
    """

    def __init__(self):
        layers = []
        pressure = SEA_LEVEL_PRESSURE
        for i, (base_h, base_t, lapse) in enumerate(_LAYERS):
            layers.append((base_h, base_t, lapse, pressure))
            top = _LAYERS[i + 1][0] if i + 1 < len(_LAYERS) else MAX_GEOPOTENTIAL_ALTITUDE
            pressure = self._pressure_in_layer(base_t, lapse, pressure, top - base_h)
        self._layers = tuple(layers)

    @staticmethod
    def _pressure_in_layer(base_t: float, lapse: float, base_p: float, dh: float) -> float:
        if lapse == 0.0:
            return base_p * math.exp(-G0 * M_AIR * dh / (R_STAR * base_t))
        return base_p * (base_t / (base_t + lapse * dh)) ** (G0 * M_AIR / (R_STAR * lapse))

    @property
    def layer_base_pressures(self) -> tuple[float, ...]:
        return tuple(p for _, _, _, p in self._layers)

    def sample_geopotential(self, h: float) -> AtmosphereSample:
        """Sample at geopotential altitude h [m]."""
        if not 0.0 <= h <= MAX_GEOPOTENTIAL_ALTITUDE:
            raise AltitudeRangeError(
                f"geopotential altitude {h} m outside valid range "
                f"[0, {MAX_GEOPOTENTIAL_ALTITUDE:.1f}] m"
            )
        # highest layer whose base is at or below h
        layer = self._layers[0]
        for candidate in self._layers:
            if candidate[0] <= h:
                layer = candidate
            else:
                break
        base_h, base_t, lapse, base_p = layer
        temperature = base_t + lapse * (h - base_h)
        pressure = self._pressure_in_layer(base_t, lapse, base_p, h - base_h)
        density = pressure * M_AIR / (R_STAR * temperature)
        return AtmosphereSample(temperature, pressure, density)

    def sample(self, z: float) -> AtmosphereSample:
        """Sample at geometric altitude z [m]."""
        return self.sample_geopotential(geometric_to_geopotential(z))
