"""Pairing, outlier removal, and calibration/validation splitting.

A paired series aligns leader and follower samples on a common clock.
Cleaning keeps only car-following samples (moving follower, leader in
front and inside sensor range, plausible accelerations) and groups the
survivors into contiguous segments; outliers split runs rather than
being interpolated over.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, NoCarFollowingError, PairingError, SplitError
from .ingest import Trajectory

PAIR_TOLERANCE_S = 0.1


@dataclass
class PairedSeries:
    """Leader/follower samples matched on a shared time grid."""

    t: np.ndarray
    leader_pos: np.ndarray
    leader_speed: np.ndarray
    leader_accel: np.ndarray
    follower_pos: np.ndarray
    follower_speed: np.ndarray
    follower_accel: np.ndarray
    dt: float = 1.0

    def __post_init__(self):
        arrays = [
            self.t, self.leader_pos, self.leader_speed, self.leader_accel,
            self.follower_pos, self.follower_speed, self.follower_accel,
        ]
        n = len(self.t)
        if any(len(a) != n for a in arrays):
            raise DomainError("paired series arrays must have equal length")

    def __len__(self) -> int:
        return len(self.t)

    @property
    def spacing(self) -> np.ndarray:
        return self.leader_pos - self.follower_pos


@dataclass
class CleaningRules:
    """Outlier thresholds; defaults follow the shuttle deployment setup."""

    max_accel: float = 18.0             # ft/s^2, either vehicle
    max_follower_speed: float = 22.0    # ft/s (15 mi/h cap)
    min_follower_speed_exclusive: float = 0.0   # drop samples at or below
    max_spacing: float = 656.0          # ft, sensor range
    min_segment_len: int = 10           # samples

    def __post_init__(self):
        if self.max_accel <= 0 or self.max_follower_speed <= 0 or self.max_spacing <= 0:
            raise DomainError("cleaning thresholds must be positive")
        if self.min_segment_len <= 0:
            raise DomainError("min_segment_len must be positive")

    def keeps(self, leader_accel, follower_speed, follower_accel, spacing) -> bool:
        """True when a sample is a valid car-following observation."""
        return (
            follower_speed > self.min_follower_speed_exclusive
            and follower_speed <= self.max_follower_speed
            and spacing > 0.0
            and spacing <= self.max_spacing
            and abs(leader_accel) <= self.max_accel
            and abs(follower_accel) <= self.max_accel
        )


@dataclass
class FollowingSegment:
    """One contiguous car-following interval; the unit of calibration."""

    id: str
    t: np.ndarray
    leader_pos: np.ndarray
    leader_speed: np.ndarray
    leader_accel: np.ndarray
    follower_pos: np.ndarray
    follower_speed: np.ndarray
    follower_accel: np.ndarray

    def __post_init__(self):
        names = ("t", "leader_pos", "leader_speed", "leader_accel",
                 "follower_pos", "follower_speed", "follower_accel")
        for name in names:
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        n = len(self.t)
        if any(len(getattr(self, name)) != n for name in names):
            raise DomainError(f"segment {self.id}: arrays must have equal length")
        if n < 10:
            raise DomainError(f"segment {self.id}: need at least 10 samples, got {n}")
        if np.any(self.leader_pos - self.follower_pos <= 0):
            raise DomainError(f"segment {self.id}: spacing must stay positive")

    def __len__(self) -> int:
        return len(self.t)

    @property
    def spacing(self) -> np.ndarray:
        return self.leader_pos - self.follower_pos

    def step_lists(self):
        """Cached plain-float views for the simulation step loop.

        Segments are treated as immutable once built; the cache assumes
        the arrays are not modified afterwards.
        """
        cached = getattr(self, "_step_lists", None)
        if cached is None:
            cached = (
                self.t.tolist(), self.leader_pos.tolist(),
                self.leader_speed.tolist(), self.leader_accel.tolist(),
                float(self.follower_pos[0]), float(self.follower_speed[0]),
            )
            self._step_lists = cached
        return cached


def pair_trajectories(
    leader: Trajectory,
    follower: Trajectory,
    tolerance: float = PAIR_TOLERANCE_S,
    leader_offset: float = 0.0,
) -> PairedSeries:
    """Match leader/follower samples whose timestamps agree within `tolerance`.

    The paired grid uses the follower's timestamps; unmatched ends are
    dropped. Each trajectory's positions start at its own first fix, so
    `leader_offset` (ft) places the leader's origin ahead of the
    follower's; the along-route distance between the two logs' first
    fixes is the natural value. Raises PairingError when the logs never
    overlap.
    """
    la = leader.arrays()
    fa = follower.arrays()
    lt, ft = la["t"], fa["t"]
    li = fi = 0
    l_idx, f_idx = [], []
    while li < len(lt) and fi < len(ft):
        d = lt[li] - ft[fi]
        if d < -tolerance:
            li += 1
        elif d > tolerance:
            fi += 1
        else:
            # prefer the closer of this and the next leader sample
            if li + 1 < len(lt) and abs(lt[li + 1] - ft[fi]) < abs(d):
                li += 1
                continue
            l_idx.append(li)
            f_idx.append(fi)
            li += 1
            fi += 1
    if not l_idx:
        raise PairingError("leader and follower logs have no overlapping timestamps")
    l_sel = np.array(l_idx)
    f_sel = np.array(f_idx)
    return PairedSeries(
        t=fa["t"][f_sel],
        leader_pos=la["pos"][l_sel] + leader_offset,
        leader_speed=la["speed"][l_sel],
        leader_accel=la["accel"][l_sel],
        follower_pos=fa["pos"][f_sel],
        follower_speed=fa["speed"][f_sel],
        follower_accel=fa["accel"][f_sel],
        dt=follower.dt,
    )


def clean_segments(paired: PairedSeries, rules: CleaningRules | None = None) -> list[FollowingSegment]:
    """Filter outliers and return maximal contiguous car-following segments.

    A run breaks where a sample was dropped or where the time step exceeds
    1.5x the nominal cadence; runs shorter than rules.min_segment_len are
    discarded. Raises NoCarFollowingError when nothing survives.
    """
    if rules is None:
        rules = CleaningRules()
    n = len(paired)
    if n == 0:
        raise DomainError("paired series is empty")
    spacing = paired.spacing
    keep = np.array([
        rules.keeps(paired.leader_accel[i], paired.follower_speed[i],
                    paired.follower_accel[i], spacing[i])
        for i in range(n)
    ])

    segments: list[FollowingSegment] = []
    runs: list[tuple[int, int]] = []
    start = None
    for i in range(n):
        if keep[i]:
            if start is None:
                start = i
            elif paired.t[i] - paired.t[i - 1] > 1.5 * paired.dt:
                runs.append((start, i))
                start = i
        elif start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, n))

    for lo, hi in runs:
        if hi - lo < rules.min_segment_len:
            continue
        sel = slice(lo, hi)
        segments.append(FollowingSegment(
            id=f"seg-{len(segments):04d}",
            t=paired.t[sel].copy(),
            leader_pos=paired.leader_pos[sel].copy(),
            leader_speed=paired.leader_speed[sel].copy(),
            leader_accel=paired.leader_accel[sel].copy(),
            follower_pos=paired.follower_pos[sel].copy(),
            follower_speed=paired.follower_speed[sel].copy(),
            follower_accel=paired.follower_accel[sel].copy(),
        ))
    if not segments:
        raise NoCarFollowingError("no car-following interval survived cleaning")
    return segments


def retained_samples(segments: list[FollowingSegment]) -> int:
    return sum(len(s) for s in segments)


def split_segments(
    segments: list[FollowingSegment], fraction: float, seed: int
) -> tuple[list[FollowingSegment], list[FollowingSegment]]:
    """Deterministic segment-level split targeting `fraction` of total samples.

    Never splits inside a segment; both sides are guaranteed nonempty.
    """
    if len(segments) < 2:
        raise SplitError(f"need at least 2 segments to split, got {len(segments)}")
    if not 0.0 < fraction < 1.0:
        raise SplitError(f"fraction must be in (0, 1), got {fraction}")
    total = retained_samples(segments)
    target = fraction * total
    order = np.random.default_rng(seed).permutation(len(segments))
    in_calib = np.zeros(len(segments), dtype=bool)
    acc = 0
    for idx in order:
        if acc < target:
            in_calib[idx] = True
            acc += len(segments[idx])
    if in_calib.all():
        in_calib[order[-1]] = False
    if not in_calib.any():
        in_calib[order[0]] = True
    calibration = [s for i, s in enumerate(segments) if in_calib[i]]
    validation = [s for i, s in enumerate(segments) if not in_calib[i]]
    return calibration, validation


# ---------------------------------------------------------------------------
# segments JSON

def segments_to_dict(segments: list[FollowingSegment]) -> dict:
    return {
        "segments": [
            {
                "id": s.id,
                "t": s.t.tolist(),
                "leader": {
                    "pos": s.leader_pos.tolist(),
                    "speed": s.leader_speed.tolist(),
                    "accel": s.leader_accel.tolist(),
                },
                "follower": {
                    "pos": s.follower_pos.tolist(),
                    "speed": s.follower_speed.tolist(),
                    "accel": s.follower_accel.tolist(),
                },
                "spacing": s.spacing.tolist(),
            }
            for s in segments
        ]
    }


def segments_from_dict(data: dict) -> list[FollowingSegment]:
    out = []
    for entry in data["segments"]:
        out.append(FollowingSegment(
            id=entry["id"],
            t=np.array(entry["t"], dtype=float),
            leader_pos=np.array(entry["leader"]["pos"], dtype=float),
            leader_speed=np.array(entry["leader"]["speed"], dtype=float),
            leader_accel=np.array(entry["leader"]["accel"], dtype=float),
            follower_pos=np.array(entry["follower"]["pos"], dtype=float),
            follower_speed=np.array(entry["follower"]["speed"], dtype=float),
            follower_accel=np.array(entry["follower"]["accel"], dtype=float),
        ))
    return out


def write_segments_json(segments: list[FollowingSegment], path: str | Path) -> None:
    Path(path).write_text(json.dumps(segments_to_dict(segments), sort_keys=True))


def read_segments_json(path: str | Path) -> list[FollowingSegment]:
    return segments_from_dict(json.loads(Path(path).read_text()))
