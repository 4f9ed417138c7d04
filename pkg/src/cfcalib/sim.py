"""Forward simulation of a follower along a recorded leader trajectory.

The follower starts from the segment's first observed sample and is
integrated ballistically (constant acceleration per step) with zero
reaction time. Commanded acceleration is clamped first, then speed; the
effective acceleration is recomputed after clamping so positions stay
consistent. Collisions never abort a run: the spacing fed to the model
and recorded for error accounting is floored at 0.01 ft and each
colliding output sample counts as one event.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cleaning import FollowingSegment
from .errors import ConfigError, DomainError
from .models import (
    AccParams,
    BlendParams,
    IdmParams,
    ModelParams,
    blend_accel_raw,
    idm_accel_raw,
    linear_acc_accel_raw,
)

SPACING_FLOOR_FT = 0.01


@dataclass(frozen=True)
class SimLimits:
    """Actuation envelope applied to every simulated step (ft/s units)."""

    a_min: float = -26.0
    a_max: float = 10.0
    v_max: float = 19.5
    v_min: float = 0.0

    def __post_init__(self):
        if not self.a_min < 0.0 < self.a_max:
            raise DomainError("need a_min < 0 < a_max")
        if not 0.0 <= self.v_min < self.v_max:
            raise DomainError("need 0 <= v_min < v_max")


@dataclass
class SimResult:
    """Simulated follower series on the segment's observation timestamps."""

    t: np.ndarray
    follower_pos: np.ndarray
    follower_speed: np.ndarray
    follower_accel: np.ndarray
    spacing: np.ndarray
    collisions: int = 0

    def __len__(self) -> int:
        return len(self.t)


def _accel_fn(model):
    """Map a parameter set (or a bare callable) to a scalar accel function.

    The callable signature is f(s, v, v_l, a_l, x_l, x_f) -> ft/s^2 with
    s pre-floored to stay positive.
    """
    if isinstance(model, IdmParams):
        def fn(s, v, v_l, a_l, x_l, x_f,
               a=model.a, delta=model.delta, v0=model.v0, s0=model.s0,
               T=model.T, two=2.0 * math.sqrt(model.a * model.b)):
            return idm_accel_raw(a, delta, v0, s0, T, two, s, v, v - v_l)
        return fn
    if isinstance(model, BlendParams):
        i = model.idm
        def fn(s, v, v_l, a_l, x_l, x_f,
               a=i.a, delta=i.delta, v0=i.v0, s0=i.s0, T=i.T, b=i.b,
               two=2.0 * math.sqrt(i.a * i.b), c=model.c, imp=model.improved_idm):
            return blend_accel_raw(a, delta, v0, s0, T, b, two, c, imp, s, v, v_l, a_l)
        return fn
    if isinstance(model, AccParams):
        def fn(s, v, v_l, a_l, x_l, x_f,
               k1=model.k1, k2=model.k2, t_des=model.t_des, d0=model.d0):
            return linear_acc_accel_raw(k1, k2, t_des, d0, x_l, x_f, v, v_l)
        return fn
    if callable(model):
        return model
    raise DomainError(f"unsupported model type {type(model).__name__}")


def simulate_follower(
    model: ModelParams,
    seg: FollowingSegment,
    limits: SimLimits | None = None,
    dt: float = 1.0,
) -> SimResult:
    """Simulate the follower over one segment, sampled at the observation times.

    dt must divide every observation interval; sub-steps interpolate the
    leader linearly. Returns the simulated series plus a collision count.
    """
    return _simulate_with_fn(_accel_fn(model), seg, limits or SimLimits(), dt)


def _step_loop(accel_fn, seg: FollowingSegment, limits: SimLimits, dt: float):
    """Run the integration; returns (pos, speed, spacing, collisions) as lists."""
    if dt <= 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    n = len(seg.t)
    # plain float lists keep the step loop off numpy scalar arithmetic
    t, lx, lv, la, x, v = seg.step_lists()
    a_min, a_max = limits.a_min, limits.a_max
    v_min, v_max = limits.v_min, limits.v_max
    v = min(max(v, v_min), v_max)

    pos = [x]
    speed = [v]
    spacing = [lx[0] - x]
    collisions = 0

    for i in range(1, n):
        interval = t[i] - t[i - 1]
        if interval == dt:
            m = 1
        else:
            m = int(round(interval / dt))
            if m < 1 or abs(interval - m * dt) > 1e-6 * max(1.0, interval):
                raise ConfigError(
                    f"dt={dt} does not divide the {interval:.6g} s observation interval")
        if m == 1:
            xl = lx[i - 1]
            s = xl - x
            if s <= 0.0:
                s = SPACING_FLOOR_FT
            a_cmd = accel_fn(s, v, lv[i - 1], la[i - 1], xl, x)
            if a_cmd < a_min:
                a_cmd = a_min
            elif a_cmd > a_max:
                a_cmd = a_max
            v_new = v + a_cmd * interval
            if v_new < v_min:
                v_new = v_min
            elif v_new > v_max:
                v_new = v_max
            x += 0.5 * (v + v_new) * interval
            v = v_new
        else:
            h = interval / m
            x0l, v0l, a0l = lx[i - 1], lv[i - 1], la[i - 1]
            dxl, dvl, dal = lx[i] - x0l, lv[i] - v0l, la[i] - a0l
            for k in range(m):
                frac = k / m
                xl = x0l + dxl * frac
                s = xl - x
                if s <= 0.0:
                    s = SPACING_FLOOR_FT
                a_cmd = accel_fn(s, v, v0l + dvl * frac, a0l + dal * frac, xl, x)
                if a_cmd < a_min:
                    a_cmd = a_min
                elif a_cmd > a_max:
                    a_cmd = a_max
                v_new = v + a_cmd * h
                if v_new < v_min:
                    v_new = v_min
                elif v_new > v_max:
                    v_new = v_max
                x += 0.5 * (v + v_new) * h
                v = v_new
        pos.append(x)
        speed.append(v)
        raw = lx[i] - x
        if raw <= 0.0:
            collisions += 1
            raw = SPACING_FLOOR_FT
        spacing.append(raw)

    return pos, speed, spacing, collisions


def _simulate_with_fn(accel_fn, seg: FollowingSegment, limits: SimLimits, dt: float) -> SimResult:
    pos, speed, spacing, collisions = _step_loop(accel_fn, seg, limits, dt)
    speed_arr = np.array(speed)
    accel = np.empty(len(speed_arr))
    accel[1:] = np.diff(speed_arr) / np.diff(seg.t)
    accel[0] = accel[1]
    return SimResult(
        t=seg.t.copy(), follower_pos=np.array(pos), follower_speed=speed_arr,
        follower_accel=accel, spacing=np.array(spacing), collisions=collisions,
    )


def simulate_all(
    model: ModelParams,
    segments: list[FollowingSegment],
    limits: SimLimits | None = None,
    dt: float = 1.0,
) -> list[SimResult]:
    """Simulate each segment independently, re-initialized from its first sample."""
    accel_fn = _accel_fn(model)
    limits = limits or SimLimits()
    return [_simulate_with_fn(accel_fn, seg, limits, dt) for seg in segments]


def limits_from_dict(data: dict) -> SimLimits:
    return SimLimits(
        a_min=data.get("a_min", -26.0),
        a_max=data.get("a_max", 10.0),
        v_max=data.get("v_max", 19.5),
        v_min=data.get("v_min", 0.0),
    )


def load_limits(path: str | Path) -> SimLimits:
    return limits_from_dict(json.loads(Path(path).read_text()))


def result_to_dict(result: SimResult, segment_id: str = "") -> dict:
    return {
        "id": segment_id,
        "t": result.t.tolist(),
        "follower_pos": result.follower_pos.tolist(),
        "follower_speed": result.follower_speed.tolist(),
        "follower_accel": result.follower_accel.tolist(),
        "spacing": result.spacing.tolist(),
        "collisions": result.collisions,
    }
