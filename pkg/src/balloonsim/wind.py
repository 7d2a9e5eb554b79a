"""Gridded horizontal wind fields: storage, interpolation, synthesis, advection.

Axis convention: u is the x-axis (eastward) component, v the y-axis
(northward) component, the usual meteorological pairing. Grids are regular
over (x, y, altitude) with an optional time axis.

File format (UTF-8 CSV):

    # windfield v1 axes=x,y,h[,t] origin=0,0,0 spacing=1000,1000,500 counts=2,2,2 interp=trilinear
    xi,yi,hi[,ti],u,v

Data rows run in row-major axis order (last axis fastest).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class WindFileError(ValueError):
    """Malformed wind file; message carries the offending line number."""


class OutOfDomainError(ValueError):
    """Query outside grid extents on an axis with boundary mode 'error'."""


class WindSynthesisError(ValueError):
    """Invalid synthesis kind or parameters."""


@dataclass(frozen=True)
class WindVector:
    u: float  # m/s along x
    v: float  # m/s along y

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError("wind components must be finite")


@dataclass(frozen=True)
class WindField:
    """Regular wind grid; immutable and shareable across episodes.

    data has shape (nx, ny, nh[, nt], 2); origin/spacing/counts are per-axis
    in the order x, y, h[, t]. boundary maps axis name -> 'hold' | 'error'.
    """

    origin: tuple[float, ...]
    spacing: tuple[float, ...]
    counts: tuple[int, ...]
    data: np.ndarray
    interp: str = "trilinear"          # 'nearest' | 'trilinear'
    boundary: dict = field(default_factory=lambda: {"x": "error", "y": "error",
                                                    "h": "hold", "t": "hold"})

    @property
    def has_time(self) -> bool:
        return len(self.counts) == 4

    @property
    def axes(self) -> tuple[str, ...]:
        return ("x", "y", "h", "t") if self.has_time else ("x", "y", "h")

    def __post_init__(self):
        n = len(self.counts)
        if n not in (3, 4) or len(self.origin) != n or len(self.spacing) != n:
            raise ValueError("origin/spacing/counts must all cover 3 or 4 axes")
        if any(s <= 0 for s in self.spacing):
            raise ValueError("grid spacing must be positive on every axis")
        if any(c < 2 for c in self.counts[:3]) or (self.has_time and self.counts[3] < 1):
            raise ValueError("need at least 2 nodes per spatial axis")
        if self.data.shape != tuple(self.counts) + (2,):
            raise ValueError(
                f"data shape {self.data.shape} inconsistent with counts {self.counts}"
            )
        if not np.all(np.isfinite(self.data)):
            raise ValueError("wind field contains non-finite components")
        if self.interp not in ("nearest", "trilinear"):
            raise ValueError(f"unknown interpolation mode {self.interp!r}")

    def _axis_coord(self, axis: int, value: float) -> float:
        """Fractional node index along one axis, boundary-handled."""
        idx = (value - self.origin[axis]) / self.spacing[axis]
        top = self.counts[axis] - 1
        if idx < 0.0 or idx > top:
            name = self.axes[axis]
            if self.boundary.get(name, "hold") == "error":
                raise OutOfDomainError(
                    f"{name}={value} outside grid extent "
                    f"[{self.origin[axis]}, {self.origin[axis] + top * self.spacing[axis]}]"
                )
            idx = min(max(idx, 0.0), float(top))
        return idx

    def wind_at(self, x: float, y: float, h: float, t: float | None = None) -> WindVector:
        """Interpolated wind vector at a position (and time, if gridded)."""
        coords = [x, y, h]
        if self.has_time:
            coords.append(0.0 if t is None else t)
        idx = [self._axis_coord(i, c) for i, c in enumerate(coords)]

        if self.interp == "nearest":
            node = tuple(int(round(i)) for i in idx)
            uv = self.data[node]
            return WindVector(float(uv[0]), float(uv[1]))

        # multilinear over the enclosing cell
        lo = [min(int(math.floor(i)), self.counts[a] - 2) if self.counts[a] > 1 else 0
              for a, i in enumerate(idx)]
        frac = [i - l for i, l in zip(idx, lo)]
        uv = np.zeros(2)
        for corner in range(2 ** len(idx)):
            weight = 1.0
            node = []
            for a in range(len(idx)):
                bit = (corner >> a) & 1
                weight *= frac[a] if bit else 1.0 - frac[a]
                node.append(min(lo[a] + bit, self.counts[a] - 1))
            if weight != 0.0:
                uv += weight * self.data[tuple(node)]
        return WindVector(float(uv[0]), float(uv[1]))


def advect(x: float, y: float, wind: WindVector, dt: float) -> tuple[float, float]:
    """Kinematic position update: carry the balloon with the wind for dt [s]."""
    if dt < 0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    return x + wind.u * dt, y + wind.v * dt


def _node_coords(field: WindField) -> list[np.ndarray]:
    return [field.origin[a] + field.spacing[a] * np.arange(field.counts[a])
            for a in range(len(field.counts))]


def save_windfield(field: WindField, path: str) -> None:
    """Write a wind field in the v1 CSV format."""
    fmt = lambda vals: ",".join(repr(float(v)) for v in vals)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f"# windfield v1 axes={','.join(field.axes)}"
            f" origin={fmt(field.origin)}"
            f" spacing={fmt(field.spacing)}"
            f" counts={','.join(str(c) for c in field.counts)}"
            f" interp={field.interp}\n"
        )
        coords = _node_coords(field)
        for flat_index in np.ndindex(*field.counts):
            row = [coords[a][i] for a, i in enumerate(flat_index)]
            u, v = field.data[flat_index]
            fh.write(fmt(row) + "," + fmt((u, v)) + "\n")


def load_windfield(path: str) -> WindField:
    """Parse a v1 wind file; raises WindFileError with a line number on bad input."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("# windfield v1 "):
        raise WindFileError("line 1: missing '# windfield v1' header")

    header: dict[str, str] = {}
    for token in lines[0].removeprefix("# windfield v1 ").split():
        if "=" not in token:
            raise WindFileError(f"line 1: bad header token {token!r}")
        key, _, value = token.partition("=")
        header[key] = value
    try:
        axes = tuple(header["axes"].split(","))
        origin = tuple(float(s) for s in header["origin"].split(","))
        spacing = tuple(float(s) for s in header["spacing"].split(","))
        counts = tuple(int(s) for s in header["counts"].split(","))
        interp = header.get("interp", "trilinear")
    except (KeyError, ValueError) as exc:
        raise WindFileError(f"line 1: bad header ({exc})") from exc
    if axes not in (("x", "y", "h"), ("x", "y", "h", "t")):
        raise WindFileError(f"line 1: unsupported axes {axes}")

    n_axes = len(counts)
    expected_rows = int(np.prod(counts))
    data = np.empty(tuple(counts) + (2,), dtype=float)
    row_index = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != n_axes + 2:
            raise WindFileError(
                f"line {lineno}: expected {n_axes + 2} fields, got {len(parts)}"
            )
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise WindFileError(f"line {lineno}: non-numeric field")
        if not all(math.isfinite(v) for v in values):
            raise WindFileError(f"line {lineno}: non-finite value")
        if row_index >= expected_rows:
            raise WindFileError(f"line {lineno}: more rows than counts imply")
        node = np.unravel_index(row_index, counts)
        # cross-check stated coordinates against the grid definition
        for a in range(n_axes):
            expected = origin[a] + spacing[a] * node[a]
            if abs(values[a] - expected) > 1e-6 * max(1.0, abs(expected)):
                raise WindFileError(
                    f"line {lineno}: coordinate {values[a]} on axis {axes[a]} "
                    f"does not match grid node {expected} (non-rectangular grid?)"
                )
        data[node] = values[n_axes:]
        row_index += 1
    if row_index != expected_rows:
        raise WindFileError(
            f"line {len(lines)}: expected {expected_rows} data rows, got {row_index}"
        )
    try:
        return WindField(origin, spacing, counts, data, interp)
    except ValueError as exc:
        raise WindFileError(str(exc)) from exc


# --- synthesis -------------------------------------------------------------

_DEFAULT_GRID = dict(x0=-500_000.0, x1=500_000.0, nx=3,
                     y0=-500_000.0, y1=500_000.0, ny=3,
                     h0=0.0, h1=30_000.0, nh=31)


def _grid_from_params(params: dict):
    p = dict(_DEFAULT_GRID)
    for key in _DEFAULT_GRID:
        if key in params:
            p[key] = params[key]
    nx, ny, nh = int(p["nx"]), int(p["ny"]), int(p["nh"])
    if min(nx, ny, nh) < 2:
        raise WindSynthesisError("need at least 2 nodes per axis")
    origin = (float(p["x0"]), float(p["y0"]), float(p["h0"]))
    spacing = ((p["x1"] - p["x0"]) / (nx - 1),
               (p["y1"] - p["y0"]) / (ny - 1),
               (p["h1"] - p["h0"]) / (nh - 1))
    if any(s <= 0 for s in spacing):
        raise WindSynthesisError("grid extents must be increasing")
    return origin, spacing, (nx, ny, nh)


def synthesize(kind: str, params: dict, seed: int = 0) -> WindField:
    """Build a deterministic synthetic wind field.

    Kinds: constant, layered-shear, sinusoidal, random-columns. All are
    horizontally uniform; altitude structure depends on the kind.
    """
    origin, spacing, counts = _grid_from_params(params)
    heights = origin[2] + spacing[2] * np.arange(counts[2])

    if kind == "constant":
        u = np.full(counts[2], float(params.get("u", 0.0)))
        v = np.full(counts[2], float(params.get("v", 0.0)))
    elif kind == "layered-shear":
        bands = params.get("bands")
        if not bands:
            raise WindSynthesisError("layered-shear needs a 'bands' parameter")
        # bands: list of (base altitude, u, v), bases strictly increasing
        bases = [b[0] for b in bands]
        if sorted(bases) != bases or len(set(bases)) != len(bases):
            raise WindSynthesisError("band base altitudes must be strictly increasing")
        u = np.empty(counts[2])
        v = np.empty(counts[2])
        for i, h in enumerate(heights):
            chosen = bands[0]
            for band in bands:
                if band[0] <= h:
                    chosen = band
            u[i], v[i] = chosen[1], chosen[2]
    elif kind == "sinusoidal":
        amp = float(params.get("amplitude", 5.0))
        period = float(params.get("period", 10_000.0))
        phase = float(params.get("phase", 0.0))
        if period <= 0:
            raise WindSynthesisError("period must be positive")
        u = amp * np.sin(2.0 * np.pi * heights / period + phase)
        v = amp * np.cos(2.0 * np.pi * heights / period + phase)
    elif kind == "random-columns":
        sigma = float(params.get("sigma", 5.0))
        rng = np.random.default_rng(seed)
        u = rng.normal(0.0, sigma, counts[2])
        v = rng.normal(0.0, sigma, counts[2])
    else:
        raise WindSynthesisError(f"unknown synthesis kind {kind!r}")

    data = np.empty(counts + (2,), dtype=float)
    data[..., 0] = u[np.newaxis, np.newaxis, :]
    data[..., 1] = v[np.newaxis, np.newaxis, :]
    return WindField(origin, spacing, counts, data,
                     interp=str(params.get("interp", "trilinear")))
