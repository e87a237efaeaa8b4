"""Reset-value sequences, periodicity classification and histograms."""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DataError

DEFAULT_MAX_PERIOD = 8
# tolerance default, as a fraction of the sequence's value range
DEFAULT_RELATIVE_TOL = 0.05
# keeps a converged sequence with round-off jitter from reading as a cycle
_ROUNDOFF_TOL = 1e-9


@dataclass(frozen=True)
class ResetSequence:
    """Adaptation values at successive spikes, after dropping a transient."""

    values: np.ndarray
    transient_skip: int = 0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise DataError("reset values must form a 1-D sequence")
        if not np.all(np.isfinite(values)):
            raise DataError("reset values must be finite")
        if self.transient_skip < 0:
            raise DataError("transient_skip must be non-negative")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class PatternClass:
    label: str
    period: int = None
    residual: float = 0.0
    tol: float = 0.0
    max_period: int = DEFAULT_MAX_PERIOD

    def __post_init__(self):
        if self.label == "tonic":
            ok = self.period == 1
        elif self.label == "irregular":
            ok = self.period is None
        else:
            ok = self.period is not None and self.period >= 2 and self.label == f"burst({self.period})"
        if not ok:
            raise ValueError(f"inconsistent pattern label {self.label!r} and period {self.period!r}")

    @classmethod
    def from_period(cls, period, residual, tol, max_period):
        if period is None:
            return cls("irregular", None, residual, tol, max_period)
        label = "tonic" if period == 1 else f"burst({period})"
        return cls(label, period, residual, tol, max_period)


def default_transient_skip(n_events):
    return max(10, math.ceil(0.2 * n_events))


def reset_sequence(train, transient_skip=None):
    """Reset values of ``train`` (a :class:`SpikeTrain` or sequence of ``w``) minus a transient.

    ``transient_skip=None`` drops ``max(10, 20%)`` of the events.
    """
    if hasattr(train, "w_values"):
        values = train.w_values
    else:
        values = np.asarray(train, dtype=float).reshape(-1)
    if transient_skip is None:
        transient_skip = default_transient_skip(len(values))
    if transient_skip < 0:
        raise DataError("transient_skip must be non-negative")
    if transient_skip >= len(values):
        raise DataError(f"no events left after skipping {transient_skip} of {len(values)}")
    return ResetSequence(values[transient_skip:], transient_skip)


def default_tol(values):
    values = np.asarray(values, dtype=float)
    if len(values) == 0:
        return 0.0
    spread = float(np.ptp(values))
    return max(DEFAULT_RELATIVE_TOL * spread, _ROUNDOFF_TOL * max(1.0, float(np.max(np.abs(values)))))


def _max_lag_deviation(values, k):
    return float(np.max(np.abs(values[k:] - values[:-k])))


def classify_pattern(seq, tol=None, max_period=DEFAULT_MAX_PERIOD):
    """Smallest period ``k <= max_period`` for which ``values[i]`` and ``values[i+k]`` agree within ``tol``.

    ``tol=None`` uses 5% of the value range. Periods are only tried while
    every candidate cycle repeats at least three times, so short sequences
    search fewer periods.
    """
    values = seq.values if isinstance(seq, ResetSequence) else np.asarray(seq, dtype=float)
    if max_period < 1:
        raise ValueError("max_period must be at least 1")
    if tol is None:
        tol = default_tol(values)
    if tol < 0:
        raise ValueError("tol must be non-negative")
    if len(values) < 2:
        return PatternClass.from_period(1, 0.0, tol, max_period)
    usable = max(1, min(max_period, len(values) // 3))
    best = math.inf
    for k in range(1, usable + 1):
        dev = _max_lag_deviation(values, k)
        if dev <= tol:
            return PatternClass.from_period(k, dev, tol, max_period)
        best = min(best, dev)
    return PatternClass.from_period(None, best, tol, max_period)


def reset_histogram(seq, bins=20):
    """Equal-width histogram over ``[min, max]`` as a list of ``(bin_center, count)``."""
    if bins < 1:
        raise ValueError("bins must be at least 1")
    values = seq.values if isinstance(seq, ResetSequence) else np.asarray(seq, dtype=float)
    if len(values) == 0:
        return []
    counts, edges = np.histogram(values, bins=bins)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return [(float(c), int(n)) for c, n in zip(centers, counts)]


def occupied_clusters(histogram):
    """Number of runs of consecutive non-empty bins."""
    clusters = 0
    previous = 0
    for _, count in histogram:
        if count and not previous:
            clusters += 1
        previous = count
    return clusters


__all__ = [
    "DEFAULT_MAX_PERIOD",
    "DEFAULT_RELATIVE_TOL",
    "PatternClass",
    "ResetSequence",
    "classify_pattern",
    "default_tol",
    "default_transient_skip",
    "occupied_clusters",
    "reset_histogram",
    "reset_sequence",
]
