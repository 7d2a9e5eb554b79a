"""Fixed-step initial value problem steppers (explicit Euler and classical RK4).

State is a plain numpy array; the balloon's [altitude, ascent rate] pair
gets a small named wrapper. Steppers reject non-finite states rather than
letting NaN propagate silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

DerivativeFn = Callable[[float, np.ndarray], np.ndarray]


class IntegrationBlowupError(FloatingPointError):
    """Integration produced a non-finite state."""

    def __init__(self, t: float):
        super().__init__(f"non-finite state at t={t}")
        self.t = t


@dataclass(frozen=True)
class StateVector:
    """Vertical state z = [altitude, ascent rate]."""

    altitude: float     # m
    ascent_rate: float  # m/s

    def __post_init__(self):
        if not (np.isfinite(self.altitude) and np.isfinite(self.ascent_rate)):
            raise ValueError("state components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.altitude, self.ascent_rate], dtype=float)

    @classmethod
    def from_array(cls, y: np.ndarray) -> "StateVector":
        return cls(float(y[0]), float(y[1]))


def _check_finite(y: np.ndarray, t: float) -> np.ndarray:
    if not np.all(np.isfinite(y)):
        raise IntegrationBlowupError(t)
    return y


def euler_step(f: DerivativeFn, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    """One explicit Euler step."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return _check_finite(y + dt * np.asarray(f(t, y), dtype=float), t + dt)


def rk4_step(f: DerivativeFn, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    """One classical 4th-order Runge-Kutta step."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    k1 = np.asarray(f(t, y), dtype=float)
    k2 = np.asarray(f(t + dt / 2.0, y + dt / 2.0 * k1), dtype=float)
    k3 = np.asarray(f(t + dt / 2.0, y + dt / 2.0 * k2), dtype=float)
    k4 = np.asarray(f(t + dt, y + dt * k3), dtype=float)
    return _check_finite(y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), t + dt)


_STEPPERS = {"euler": euler_step, "rk4": rk4_step}


def integrate(f: DerivativeFn, y0: np.ndarray, t0: float, t1: float, dt: float,
              scheme: str = "rk4") -> list[tuple[float, np.ndarray]]:
    """March from t0 to t1 with fixed steps; the last step is shortened to
    land exactly on t1. Returns [(t, y), ...] including both endpoints.
    """
    if t1 <= t0:
        raise ValueError(f"need t1 > t0, got [{t0}, {t1}]")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    try:
        step = _STEPPERS[scheme]
    except KeyError:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {sorted(_STEPPERS)}")

    y = np.asarray(y0, dtype=float)
    _check_finite(y, t0)
    t = t0
    trajectory = [(t, y.copy())]
    while t < t1:
        h = min(dt, t1 - t)
        y = step(f, t, y, h)
        t = t1 if t + h >= t1 else t + h
        trajectory.append((t, y.copy()))
    return trajectory
