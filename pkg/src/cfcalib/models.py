"""Car-following acceleration kernels.

Three calibrated model families:

* ``idm`` -- the Intelligent Driver Model: acceleration from the speed
  ratio to the desired speed and the ratio of desired to actual gap.
* ``blend`` -- IDM blended with the constant-acceleration heuristic (CAH)
  through a tanh coolness blend; the CAH bound keeps decelerations
  realistic when the gap is far below the desired gap. An optional flag
  swaps the plain IDM term for the two-regime improved-IDM form.
* ``linear_acc`` -- a linear gap-and-speed-error cruise controller.

Kernels are stateless and return raw (unclamped) accelerations in ft/s^2;
clamping is the simulator's job. The raw ``*_raw`` functions take scalars
only and are shared with the simulation hot loop.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import DomainError


@dataclass(frozen=True)
class IdmParams:
    """IDM parameter set (ft/s units).

    a: maximum acceleration (ft/s^2); delta: acceleration exponent;
    v0: desired speed (ft/s); s0: jam (standstill) distance (ft);
    T: desired time gap (s); b: desired deceleration magnitude (ft/s^2).
    """

    a: float
    delta: int
    v0: float
    s0: float
    T: float
    b: float

    def __post_init__(self):
        if min(self.a, self.v0, self.s0, self.T, self.b) <= 0:
            raise DomainError("IDM parameters a, v0, s0, T, b must be positive")
        if self.delta < 1 or int(self.delta) != self.delta:
            raise DomainError(f"delta must be an integer >= 1, got {self.delta}")


@dataclass(frozen=True)
class BlendParams:
    """IDM+CAH blend; c is the coolness factor in [0, 1].

    c = 0 reproduces plain IDM; c near 1 trusts the CAH bound under
    small gaps. When improved_idm is set, the IDM term uses the
    two-regime free-flow/interaction form instead of the plain model.
    """

    idm: IdmParams
    c: float
    improved_idm: bool = False

    def __post_init__(self):
        if not 0.0 <= self.c <= 1.0:
            raise DomainError(f"coolness factor must be in [0, 1], got {self.c}")


@dataclass(frozen=True)
class AccParams:
    """Linear cruise-control gains: a = k1 * gap_error + k2 * (v_l - v).

    k1 (1/s^2) weighs the gap error, k2 (1/s) the speed difference,
    t_des (s) is the desired time gap, d0 (ft) the vehicle-length offset
    inside the gap error.
    """

    k1: float
    k2: float
    t_des: float
    d0: float = 15.0

    def __post_init__(self):
        if min(self.k1, self.k2, self.t_des) <= 0:
            raise DomainError("k1, k2, t_des must be positive")
        if self.d0 < 0:
            raise DomainError(f"d0 must be nonnegative, got {self.d0}")


ModelParams = IdmParams | BlendParams | AccParams


@dataclass(frozen=True)
class CfState:
    """Instantaneous car-following state.

    s: spacing (ft); v: follower speed; v_l: leader speed (ft/s);
    a_l: leader acceleration (ft/s^2); x_l/x_f: absolute positions (ft),
    required by position-based controllers.
    """

    s: float
    v: float
    v_l: float
    a_l: float = 0.0
    x_l: float | None = None
    x_f: float | None = None

    def __post_init__(self):
        if self.s <= 0:
            raise DomainError(f"spacing must be positive, got {self.s}")
        if self.v < 0 or self.v_l < 0:
            raise DomainError("speeds must be nonnegative")
        if self.x_l is not None and self.x_f is not None:
            if abs((self.x_l - self.x_f) - self.s) > 1e-9:
                raise DomainError("positions inconsistent with spacing")


# ---------------------------------------------------------------------------
# raw scalar kernels (shared with the simulator)

def idm_accel_raw(a, delta, v0, s0, T, two_sqrt_ab, s, v, dv):
    s_star = s0 + max(0.0, v * T + v * dv / two_sqrt_ab)
    ratio = s_star / s
    return a * (1.0 - (v / v0) ** delta - ratio * ratio)


def cah_accel_raw(a, s, v, v_l, a_l):
    a_tilde = min(a_l, a)
    denom = v_l * v_l - 2.0 * s * a_tilde
    if v_l * (v - v_l) <= -2.0 * s * a_tilde and denom > 0.0:
        return v * v * a_tilde / denom
    dv = v - v_l
    if dv >= 0.0:
        return a_tilde - dv * dv / (2.0 * s)
    return a_tilde


def improved_idm_accel_raw(a, delta, v0, s0, T, b, two_sqrt_ab, s, v, dv):
    # free-flow acceleration, then the interaction regime on either side
    # of z = s*/s = 1
    if v <= v0:
        a_free = a * (1.0 - (v / v0) ** delta)
    else:
        a_free = -b * (1.0 - (v0 / v) ** (a * delta / b))
    s_star = s0 + max(0.0, v * T + v * dv / two_sqrt_ab)
    z = s_star / s
    if v <= v0:
        if z >= 1.0:
            return a * (1.0 - z * z)
        if a_free <= 0.0:
            return a_free
        return a_free * (1.0 - z ** (2.0 * a / a_free))
    if z >= 1.0:
        return a_free + a * (1.0 - z * z)
    return a_free


def blend_accel_raw(a, delta, v0, s0, T, b, two_sqrt_ab, c, improved, s, v, v_l, a_l):
    dv = v - v_l
    if improved:
        a_i = improved_idm_accel_raw(a, delta, v0, s0, T, b, two_sqrt_ab, s, v, dv)
    else:
        a_i = idm_accel_raw(a, delta, v0, s0, T, two_sqrt_ab, s, v, dv)
    a_c = cah_accel_raw(a, s, v, v_l, a_l)
    if a_i >= a_c:
        return a_i
    return (1.0 - c) * a_i + c * (a_c + b * math.tanh((a_i - a_c) / b))


def linear_acc_accel_raw(k1, k2, t_des, d0, x_l, x_f, v, v_l):
    gap_error = x_l - x_f - d0 - t_des * v
    return k1 * gap_error + k2 * (v_l - v)


# ---------------------------------------------------------------------------
# public kernels

def _check_spacing(s: float) -> None:
    if s <= 0:
        raise DomainError(f"spacing must be positive, got {s}")


def idm_accel(p: IdmParams, s: float, v: float, dv: float) -> float:
    """IDM acceleration for spacing s, speed v, and closing speed dv = v - v_l."""
    _check_spacing(s)
    return idm_accel_raw(p.a, p.delta, p.v0, p.s0, p.T, 2.0 * math.sqrt(p.a * p.b), s, v, dv)


def cah_accel(p: IdmParams, s: float, v: float, v_l: float, a_l: float) -> float:
    """Largest crash-avoiding acceleration if the leader holds its acceleration.

    The leader's assumed acceleration is capped at the follower's own
    maximum; negative approach rates are dropped by the Heaviside factor.
    """
    _check_spacing(s)
    return cah_accel_raw(p.a, s, v, v_l, a_l)


def blend_accel(p: BlendParams, state: CfState) -> float:
    """IDM response, softened toward the CAH bound when IDM over-brakes."""
    _check_spacing(state.s)
    i = p.idm
    return blend_accel_raw(
        i.a, i.delta, i.v0, i.s0, i.T, i.b, 2.0 * math.sqrt(i.a * i.b),
        p.c, p.improved_idm, state.s, state.v, state.v_l, state.a_l,
    )


def linear_acc_accel(p: AccParams, state: CfState) -> float:
    """Linear controller on gap error and speed difference; needs positions."""
    if state.x_l is None or state.x_f is None:
        raise DomainError("linear ACC controller requires absolute positions")
    return linear_acc_accel_raw(p.k1, p.k2, p.t_des, p.d0,
                                state.x_l, state.x_f, state.v, state.v_l)


def equilibrium_spacing(p: IdmParams, v: float) -> float:
    """Spacing at which IDM acceleration vanishes for matched speeds."""
    if v < 0:
        raise DomainError(f"speed must be nonnegative, got {v}")
    if v >= p.v0:
        raise DomainError(f"no finite equilibrium at or above desired speed ({v} >= {p.v0})")
    return (p.s0 + v * p.T) / math.sqrt(1.0 - (v / p.v0) ** p.delta)


# ---------------------------------------------------------------------------
# parameter files and gene bounds

MODEL_KINDS = ("idm", "blend", "linear_acc")

# Gene order per model kind: (name, low, high, integer-valued). Ranges
# cover the spread of published calibrations for low-speed operation.
GENE_BOUNDS: dict[str, list[tuple[str, float, float, bool]]] = {
    "idm": [
        ("a", 0.33, 17.4, False),
        ("delta", 1.0, 10.0, True),
        ("v0", 1.0, 137.0, False),
        ("s0", 0.5, 33.0, False),
        ("T", 0.1, 5.0, False),
        ("b", 0.33, 26.0, False),
    ],
    "blend": [
        ("a", 0.33, 17.4, False),
        ("delta", 1.0, 10.0, True),
        ("v0", 1.0, 137.0, False),
        ("s0", 0.5, 33.0, False),
        ("T", 0.1, 5.0, False),
        ("b", 0.33, 26.0, False),
        ("c", 0.0, 1.0, False),
    ],
    "linear_acc": [
        ("t_des", 0.1, 9.0, False),
        ("k1", 0.001, 1.0, False),
        ("k2", 0.001, 1.0, False),
    ],
}

DEFAULT_D0 = 15.0


def model_kind(params: ModelParams) -> str:
    if isinstance(params, IdmParams):
        return "idm"
    if isinstance(params, BlendParams):
        return "blend"
    if isinstance(params, AccParams):
        return "linear_acc"
    raise DomainError(f"unknown model parameter type {type(params).__name__}")


def genes_to_params(kind: str, genes, d0: float = DEFAULT_D0) -> ModelParams:
    """Build a parameter set from a flat gene vector (GENE_BOUNDS order).

    Integer-valued genes (the IDM exponent) are rounded at evaluation.
    """
    if kind not in GENE_BOUNDS:
        raise DomainError(f"unknown model kind {kind!r}")
    layout = GENE_BOUNDS[kind]
    if len(genes) != len(layout):
        raise DomainError(f"{kind} expects {len(layout)} genes, got {len(genes)}")
    values = {}
    for (name, _, _, integer), g in zip(layout, genes):
        values[name] = int(round(float(g))) if integer else float(g)
    if kind == "idm":
        return IdmParams(**values)
    if kind == "blend":
        c = values.pop("c")
        return BlendParams(idm=IdmParams(**values), c=c)
    return AccParams(t_des=values["t_des"], k1=values["k1"], k2=values["k2"], d0=d0)


def params_to_genes(params: ModelParams) -> list[float]:
    kind = model_kind(params)
    source = params.idm if kind == "blend" else params
    out = []
    for name, _, _, _ in GENE_BOUNDS[kind]:
        holder = params if (kind == "blend" and name == "c") else source
        out.append(float(getattr(holder, name)))
    return out


def params_to_dict(params: ModelParams) -> dict:
    kind = model_kind(params)
    if kind == "idm":
        return {"model": "idm", "a": params.a, "delta": params.delta, "v0": params.v0,
                "s0": params.s0, "T": params.T, "b": params.b}
    if kind == "blend":
        i = params.idm
        return {"model": "blend", "a": i.a, "delta": i.delta, "v0": i.v0,
                "s0": i.s0, "T": i.T, "b": i.b, "c": params.c,
                "improved_idm": params.improved_idm}
    return {"model": "linear_acc", "t_des": params.t_des, "k1": params.k1,
            "k2": params.k2, "d0": params.d0}


def params_from_dict(data: dict) -> ModelParams:
    kind = data.get("model")
    if kind == "idm":
        return IdmParams(a=data["a"], delta=data["delta"], v0=data["v0"],
                         s0=data["s0"], T=data["T"], b=data["b"])
    if kind == "blend":
        return BlendParams(
            idm=IdmParams(a=data["a"], delta=data["delta"], v0=data["v0"],
                          s0=data["s0"], T=data["T"], b=data["b"]),
            c=data["c"],
            improved_idm=bool(data.get("improved_idm", False)),
        )
    if kind == "linear_acc":
        return AccParams(t_des=data["t_des"], k1=data["k1"], k2=data["k2"],
                         d0=data.get("d0", DEFAULT_D0))
    raise DomainError(f"unknown model kind {kind!r}")


def load_params(path: str | Path) -> ModelParams:
    return params_from_dict(json.loads(Path(path).read_text()))


def write_params(params: ModelParams, path: str | Path) -> None:
    Path(path).write_text(json.dumps(params_to_dict(params), indent=2, sort_keys=True))


def default_params(kind: str) -> ModelParams:
    """Bundled parameter sets calibrated for a low-speed autonomous shuttle."""
    if kind not in MODEL_KINDS:
        raise DomainError(f"unknown model kind {kind!r}")
    text = resources.files("cfcalib.data").joinpath(f"default_{kind}.json").read_text()
    return params_from_dict(json.loads(text))
