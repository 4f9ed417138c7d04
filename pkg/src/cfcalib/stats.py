"""Exploratory trajectory statistics.

Descriptive summaries, Shapiro-Wilk normality, Spearman rank correlation,
coefficient of variation, Tukey-fence outlier shares, and jerk comfort
classification. Quartiles use inclusive linear interpolation throughout
so every consumer sees the same fences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as _sps

from .cleaning import FollowingSegment
from .errors import DomainError, InsufficientDataError, UndefinedStatisticError

# Jerk magnitudes above these to degrade ride comfort (ft/s^3): limit of
# excellent comfort, upper bound for excellent, and the expected maximum.
COMFORT_EXCELLENT = 0.92
COMFORT_UPPER_EXCELLENT = 4.03
COMFORT_EXPECTED = 4.82

# Acceleration comfort threshold (ft/s^2); reported as an annotation only.
ACCEL_COMFORT_THRESHOLD = 2.96


@dataclass(frozen=True)
class DescriptiveStats:
    mean: float
    std: float
    min: float
    q25: float
    q50: float
    q75: float
    max: float

    def as_dict(self) -> dict[str, float]:
        return {
            "mean": self.mean, "std": self.std, "min": self.min,
            "q25": self.q25, "q50": self.q50, "q75": self.q75, "max": self.max,
        }


@dataclass(frozen=True)
class ComfortThresholds:
    excellent: float = COMFORT_EXCELLENT
    upper_excellent: float = COMFORT_UPPER_EXCELLENT
    expected: float = COMFORT_EXPECTED

    def __post_init__(self):
        if not (0 < self.excellent < self.upper_excellent < self.expected):
            raise DomainError("comfort thresholds must be strictly increasing and positive")


def describe(series) -> DescriptiveStats:
    """Sample mean/std (n-1) and inclusive-interpolation quartiles."""
    x = np.asarray(series, dtype=float)
    if x.size < 2:
        raise InsufficientDataError(f"describe needs n >= 2, got {x.size}")
    q25, q50, q75 = np.percentile(x, [25, 50, 75])
    return DescriptiveStats(
        mean=float(np.mean(x)),
        std=float(np.std(x, ddof=1)),
        min=float(np.min(x)),
        q25=float(q25),
        q50=float(q50),
        q75=float(q75),
        max=float(np.max(x)),
    )


def shapiro_wilk(series) -> tuple[float, float]:
    """Shapiro-Wilk W and p-value (Royston's approximation, 3 <= n <= 5000)."""
    x = np.asarray(series, dtype=float)
    if not 3 <= x.size <= 5000:
        raise DomainError(f"Shapiro-Wilk needs 3 <= n <= 5000, got {x.size}")
    if np.min(x) == np.max(x):
        raise UndefinedStatisticError("W undefined for a zero-range series")
    w, p = _sps.shapiro(x)
    return float(w), float(p)


def spearman(x, y) -> float:
    """Spearman's rho: Pearson correlation of mid-ranks, ties averaged."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size:
        raise DomainError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 3:
        raise InsufficientDataError(f"spearman needs n >= 3, got {x.size}")
    rx = _sps.rankdata(x, method="average")
    ry = _sps.rankdata(y, method="average")
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    den = np.sqrt(np.sum(dx * dx) * np.sum(dy * dy))
    if den == 0.0:
        raise UndefinedStatisticError("rank variance is zero; correlation undefined")
    return float(np.sum(dx * dy) / den)


def coefficient_of_variation(series) -> float:
    """Sample std over |mean|; undefined for mean-zero series."""
    x = np.asarray(series, dtype=float)
    if x.size < 2:
        raise InsufficientDataError(f"CV needs n >= 2, got {x.size}")
    mean = float(np.mean(x))
    if mean == 0.0:
        raise UndefinedStatisticError("CV undefined for zero-mean series")
    return float(np.std(x, ddof=1)) / abs(mean)


def iqr_outlier_share(series) -> float:
    """Share of points strictly outside the Tukey fences Q1/Q3 -/+ 1.5 IQR."""
    x = np.asarray(series, dtype=float)
    if x.size < 4:
        raise InsufficientDataError(f"IQR outlier share needs n >= 4, got {x.size}")
    q1, q3 = np.percentile(x, [25, 75])
    iqr = q3 - q1
    lo = q1 - 1.5 * iqr
    hi = q3 + 1.5 * iqr
    return float(np.count_nonzero((x < lo) | (x > hi)) / x.size)


def jerk_comfort_shares(jerk, thresholds: ComfortThresholds | None = None) -> tuple[float, float, float]:
    """Fractions of samples whose |jerk| strictly exceeds each comfort threshold."""
    if thresholds is None:
        thresholds = ComfortThresholds()
    x = np.abs(np.asarray(jerk, dtype=float))
    if x.size == 0:
        raise InsufficientDataError("jerk series is empty")
    n = x.size
    return (
        float(np.count_nonzero(x > thresholds.excellent) / n),
        float(np.count_nonzero(x > thresholds.upper_excellent) / n),
        float(np.count_nonzero(x > thresholds.expected) / n),
    )


# ---------------------------------------------------------------------------
# segment-level report

def follower_jerk(segment: FollowingSegment) -> np.ndarray:
    """Jerk of the follower, by backward differences of its acceleration."""
    steps = np.diff(segment.t)
    jerk = np.empty(len(segment))
    jerk[1:] = np.diff(segment.follower_accel) / steps
    jerk[0] = jerk[1]
    return jerk


def _pooled(segments: list[FollowingSegment], getter) -> np.ndarray:
    return np.concatenate([np.asarray(getter(s), dtype=float) for s in segments])


def _safe_cv(x) -> float | None:
    try:
        return coefficient_of_variation(x)
    except (UndefinedStatisticError, InsufficientDataError):
        return None


def _mean_outlier_share(segments, getter) -> float | None:
    shares = []
    for seg in segments:
        x = np.asarray(getter(seg), dtype=float)
        if x.size >= 4:
            shares.append(iqr_outlier_share(x))
    return float(np.mean(shares)) if shares else None


def analyze_segments(
    segments: list[FollowingSegment], thresholds: ComfortThresholds | None = None
) -> dict:
    """Full exploratory report over cleaned segments.

    Covers descriptive statistics per variable, normality, the Spearman
    matrix over speed/accel/jerk/spacing/delta-speed, variability (CV and
    mean per-trip outlier share, acceleration and jerk split by sign), and
    jerk comfort shares.
    """
    if not segments:
        raise InsufficientDataError("no segments to analyze")
    thresholds = thresholds or ComfortThresholds()

    speed = _pooled(segments, lambda s: s.follower_speed)
    accel = _pooled(segments, lambda s: s.follower_accel)
    jerk = _pooled(segments, follower_jerk)
    spacing = _pooled(segments, lambda s: s.spacing)
    delta_speed = _pooled(segments, lambda s: s.follower_speed - s.leader_speed)
    leader_speed = _pooled(segments, lambda s: s.leader_speed)
    leader_accel = _pooled(segments, lambda s: s.leader_accel)

    variables = {"speed": speed, "accel": accel, "jerk": jerk, "spacing": spacing}
    descriptive = {name: describe(x).as_dict() for name, x in variables.items()}

    normality = {}
    for name, x in variables.items():
        try:
            w, p = shapiro_wilk(x)
            normality[name] = {"W": w, "p": p, "normal": p >= 0.05}
        except (DomainError, UndefinedStatisticError):
            normality[name] = None

    corr_names = ["speed", "accel", "jerk", "spacing", "delta_speed"]
    corr_series = [speed, accel, jerk, spacing, delta_speed]
    matrix = [[1.0] * 5 for _ in range(5)]
    for i in range(5):
        for j in range(i + 1, 5):
            try:
                rho = spearman(corr_series[i], corr_series[j])
            except UndefinedStatisticError:
                rho = None
            matrix[i][j] = matrix[j][i] = rho

    variability = {
        "speed": {
            "leader": {"cv": _safe_cv(leader_speed),
                       "mean_outlier_share": _mean_outlier_share(segments, lambda s: s.leader_speed)},
            "follower": {"cv": _safe_cv(speed),
                         "mean_outlier_share": _mean_outlier_share(segments, lambda s: s.follower_speed)},
        },
        "accel": _signed_variability(accel, leader_accel),
        "jerk": {
            "follower_plus": {"cv": _safe_cv(jerk[jerk > 0])},
            "follower_minus": {"cv": _safe_cv(jerk[jerk < 0])},
            "follower_outlier_share": _mean_outlier_share(segments, follower_jerk),
        },
    }

    shares = jerk_comfort_shares(jerk, thresholds)
    return {
        "n_segments": len(segments),
        "n_samples": int(speed.size),
        "descriptive": descriptive,
        "normality": normality,
        "spearman": {"variables": corr_names, "matrix": matrix},
        "variability": variability,
        "jerk_comfort": {
            "thresholds": [thresholds.excellent, thresholds.upper_excellent, thresholds.expected],
            "shares": list(shares),
        },
        "annotations": {"accel_comfort_threshold": ACCEL_COMFORT_THRESHOLD},
    }


def _signed_variability(segments, follower_accel, leader_accel) -> dict:
    out = {}
    for label, x in (("follower_plus", follower_accel[follower_accel > 0]),
                     ("follower_minus", follower_accel[follower_accel < 0]),
                     ("leader_plus", leader_accel[leader_accel > 0]),
                     ("leader_minus", leader_accel[leader_accel < 0])):
        out[label] = {"cv": _safe_cv(x)}
    return out
