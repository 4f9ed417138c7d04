"""GPS log ingestion: geodesic distances and derived kinematics.

Raw logs are 1 Hz latitude/longitude fixes. Positions become cumulative
arc length in feet; speed, acceleration, and jerk follow by successive
backward differences. Everything downstream works in feet and seconds.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import numpy as np

from .errors import DomainError, InsufficientDataError, OrderingError

# Mean Earth radius (m); spherical error is far below GPS noise at
# per-second step lengths.
EARTH_RADIUS_M = 6_371_008.8
FT_PER_M = 1.0 / 0.3048


@dataclass(frozen=True)
class GpsFix:
    """A single GPS fix: time (s), WGS-84 latitude/longitude (degrees)."""

    t: float
    lat: float
    lon: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0):
            raise DomainError(f"latitude {self.lat} outside [-90, 90]")
        if not (-180.0 <= self.lon <= 180.0):
            raise DomainError(f"longitude {self.lon} outside [-180, 180]")


@dataclass(frozen=True)
class TrajectoryPoint:
    """One sample: time (s), position (ft), speed (ft/s), accel (ft/s^2), jerk (ft/s^3)."""

    t: float
    pos: float
    speed: float
    accel: float
    jerk: float


@dataclass
class Trajectory:
    """Ordered kinematic samples for one vehicle at a nominal cadence."""

    vehicle_id: str
    points: list[TrajectoryPoint]
    dt: float = 1.0

    def __len__(self) -> int:
        return len(self.points)

    def arrays(self) -> dict[str, np.ndarray]:
        """Column view of the points as float arrays."""
        return {
            name: np.array([getattr(p, name) for p in self.points], dtype=float)
            for name in ("t", "pos", "speed", "accel", "jerk")
        }

    def time_gaps(self, rel_tol: float = 0.1) -> list[int]:
        """Indices i where t[i] - t[i-1] deviates from dt by more than rel_tol."""
        out = []
        for i in range(1, len(self.points)):
            step = self.points[i].t - self.points[i - 1].t
            if abs(step - self.dt) > rel_tol * self.dt:
                out.append(i)
        return out


def geodesic_distance(a: GpsFix, b: GpsFix) -> float:
    """Great-circle distance between two fixes, in feet (haversine)."""
    lat1 = math.radians(a.lat)
    lat2 = math.radians(b.lat)
    dlat = math.radians(b.lat - a.lat)
    dlon = math.radians(b.lon - a.lon)
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    c = 2.0 * math.asin(min(1.0, math.sqrt(h)))
    return EARTH_RADIUS_M * c * FT_PER_M


def kinematics_from_positions(
    t: np.ndarray, pos: np.ndarray, vehicle_id: str = "", dt: float = 1.0
) -> Trajectory:
    """Derive speed/accel/jerk from a position series by backward differences.

    Each derivative level k is valid from index k onward; the leading
    entries are filled by replicating the first valid value, so constant
    acceleration reproduces its ground truth at every index.
    """
    t = np.asarray(t, dtype=float)
    pos = np.asarray(pos, dtype=float)
    n = len(t)
    if n < 4:
        raise InsufficientDataError(f"need at least 4 samples for jerk, got {n}")
    steps = np.diff(t)
    if np.any(steps <= 0):
        raise OrderingError("timestamps must be strictly increasing")

    speed = np.empty(n)
    speed[1:] = np.diff(pos) / steps
    speed[0] = speed[1]

    accel = np.empty(n)
    accel[2:] = np.diff(speed[1:]) / steps[1:]
    accel[:2] = accel[2]

    jerk = np.empty(n)
    jerk[3:] = np.diff(accel[2:]) / steps[2:]
    jerk[:3] = jerk[3]

    points = [
        TrajectoryPoint(float(t[i]), float(pos[i]), float(speed[i]), float(accel[i]), float(jerk[i]))
        for i in range(n)
    ]
    return Trajectory(vehicle_id=vehicle_id, points=points, dt=dt)


def derive_kinematics(fixes: list[GpsFix], vehicle_id: str = "", dt: float = 1.0) -> Trajectory:
    """Convert a GPS log into a trajectory: cumulative arc length plus derivatives."""
    if len(fixes) < 4:
        raise InsufficientDataError(f"need at least 4 fixes for jerk, got {len(fixes)}")
    t = np.array([f.t for f in fixes], dtype=float)
    if np.any(np.diff(t) <= 0):
        raise OrderingError("fix timestamps must be strictly increasing")
    pos = np.zeros(len(fixes))
    for i in range(1, len(fixes)):
        pos[i] = pos[i - 1] + geodesic_distance(fixes[i - 1], fixes[i])
    return kinematics_from_positions(t, pos, vehicle_id=vehicle_id, dt=dt)


# ---------------------------------------------------------------------------
# unit conversion

# unit -> (dimension, numerator, denominator); value * num / den gives the
# canonical unit (ft, ft/s, ft/s^2). Rational factors keep mi/h -> ft/s exact.
_UNIT_TABLE = {
    "ft": ("length", 1.0, 1.0),
    "m": ("length", 1.0, 0.3048),
    "ft/s": ("speed", 1.0, 1.0),
    "mi/h": ("speed", 5280.0, 3600.0),
    "m/s": ("speed", 1.0, 0.3048),
    "ft/s^2": ("accel", 1.0, 1.0),
    "m/s^2": ("accel", 1.0, 0.3048),
}

_UNIT_ALIASES = {
    "ft/s2": "ft/s^2",
    "m/s2": "m/s^2",
    "mph": "mi/h",
    "fps": "ft/s",
}


def _lookup_unit(unit: str):
    key = _UNIT_ALIASES.get(unit, unit)
    if key not in _UNIT_TABLE:
        raise DomainError(f"unknown unit {unit!r}")
    return _UNIT_TABLE[key]


def convert_units(value: float, from_unit: str, to_unit: str) -> float:
    """Convert between ft/m length, ft/s / mi/h / m/s speed, and ft/m accel units."""
    dim_a, num_a, den_a = _lookup_unit(from_unit)
    dim_b, num_b, den_b = _lookup_unit(to_unit)
    if dim_a != dim_b:
        raise DomainError(f"cannot convert {from_unit!r} to {to_unit!r}")
    return value * num_a / den_a * den_b / num_b


# ---------------------------------------------------------------------------
# file I/O

def _parse_time(text: str) -> float:
    """Accept epoch seconds or ISO-8601; return seconds as float."""
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return datetime.fromisoformat(text).timestamp()
    except ValueError as exc:
        raise DomainError(f"unparseable timestamp {text!r}") from exc


def _read_gps_rows(path: str | Path) -> list[tuple[float, float, float]]:
    path = Path(path)
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise InsufficientDataError(f"{path}: empty file") from None
        if [h.strip().lower() for h in header] != ["t", "lat", "lon"]:
            raise DomainError(f"{path}: header must be exactly 't,lat,lon', got {header}")
        raw = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise DomainError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            raw.append((_parse_time(row[0]), float(row[1]), float(row[2])))
    if not raw:
        raise InsufficientDataError(f"{path}: no data rows")
    return raw


def read_gps_csv(path: str | Path, t0: float | None = None) -> list[GpsFix]:
    """Read a `t,lat,lon` CSV (header required) into GPS fixes.

    Timestamps may be epoch seconds or ISO-8601; they are normalized to
    elapsed seconds from the first fix (or from an explicit t0 so two
    logs can share a clock).
    """
    raw = _read_gps_rows(path)
    base = raw[0][0] if t0 is None else t0
    return [GpsFix(t - base, lat, lon) for t, lat, lon in raw]


def read_gps_pair(
    leader_path: str | Path, follower_path: str | Path
) -> tuple[list[GpsFix], list[GpsFix]]:
    """Read two logs on a shared clock: both normalized to the earlier first fix."""
    leader_raw = _read_gps_rows(leader_path)
    follower_raw = _read_gps_rows(follower_path)
    t0 = min(leader_raw[0][0], follower_raw[0][0])
    leader = [GpsFix(t - t0, lat, lon) for t, lat, lon in leader_raw]
    follower = [GpsFix(t - t0, lat, lon) for t, lat, lon in follower_raw]
    return leader, follower


def trajectory_to_dict(traj: Trajectory) -> dict:
    return {
        "vehicle_id": traj.vehicle_id,
        "dt": traj.dt,
        "points": [
            {"t": p.t, "pos": p.pos, "speed": p.speed, "accel": p.accel, "jerk": p.jerk}
            for p in traj.points
        ],
    }


def trajectory_from_dict(data: dict) -> Trajectory:
    points = [
        TrajectoryPoint(p["t"], p["pos"], p["speed"], p["accel"], p["jerk"])
        for p in data["points"]
    ]
    return Trajectory(vehicle_id=data["vehicle_id"], points=points, dt=data.get("dt", 1.0))


def write_trajectory_json(traj: Trajectory, path: str | Path) -> None:
    Path(path).write_text(json.dumps(trajectory_to_dict(traj), indent=2, sort_keys=True))


def read_trajectory_json(path: str | Path) -> Trajectory:
    return trajectory_from_dict(json.loads(Path(path).read_text()))
