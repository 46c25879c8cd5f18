"""Point-wise variation predicates and per-segment satisfaction indices.

Four variation kinds are evaluated per data dimension of a class segment:
``i`` (increase), ``a`` (absence of signal), ``s`` (stationarity) and ``v``
(variability).  Kinds ``i``/``s``/``v`` compare a timestamp with its successor
and are therefore defined on ``1..len-1``; kind ``a`` covers the whole segment.

The indexing step turns each predicate's boolean profile into two sorted lists
of maximal constant runs — one per polarity — which the trend miner then walks
and queries in logarithmic time.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .timeseries import ClassSegment, Interval, MultivariateSeries, class_segments, maximal_runs, project

__all__ = [
    "DEFAULT_EPSILON",
    "VariationKind",
    "SatisfactionIndex",
    "variation_domain",
    "variation_value",
    "variation_predicate",
    "variation_profile",
    "build_indices",
    "index_contains",
]

DEFAULT_EPSILON = 1e-4


class VariationKind(str, Enum):
    INCREASE = "i"
    ABSENCE = "a"
    STATIONARITY = "s"
    VARIABILITY = "v"

    def __str__(self) -> str:  # label suffixes render as dim_2^i etc.
        return self.value


def variation_domain(kind: VariationKind, length: int) -> Interval | None:
    """Predicate domain for a segment of ``length`` points; None when empty."""
    if kind is VariationKind.ABSENCE:
        return Interval(1, length)
    return Interval(1, length - 1) if length >= 2 else None


def variation_profile(
    values: np.ndarray, kind: VariationKind, epsilon: float
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized values and predicate booleans over the whole domain.

    ``values`` is one dimension of a class segment.  Output arrays are indexed
    0-based from timestamp 1 of the domain.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    x = np.asarray(values, dtype=np.float64)
    diff = x[1:] - x[:-1]
    if kind is VariationKind.INCREASE:
        return diff, diff > 0
    if kind is VariationKind.ABSENCE:
        absval = np.abs(x)
        return absval, absval <= epsilon
    if kind is VariationKind.STATIONARITY:
        absdiff = np.abs(diff)
        return absdiff, absdiff <= epsilon
    # variability: 0 under stationarity, +inf under absence, else relative change.
    stat = np.abs(diff) <= epsilon
    absent = np.abs(x[:-1]) <= epsilon
    denom = x[:-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(denom != 0, diff / np.where(denom != 0, denom, 1.0), 0.0)
    # zero denominator escaping both guards is impossible for epsilon > 0, but the
    # contract documents a signed infinity for it rather than an error.
    zero_den = denom == 0
    if np.any(zero_den & ~stat & ~absent):  # pragma: no cover - unreachable for eps > 0
        ratio = np.where(zero_den, np.copysign(np.inf, diff), ratio)
    vals = np.where(stat, 0.0, np.where(absent, np.inf, ratio))
    return vals, stat


def _check_domain(kind: VariationKind, length: int, t: int) -> None:
    dom = variation_domain(kind, length)
    if dom is None or t not in dom:
        hi = "∅" if dom is None else f"[1, {dom.end}]"
        raise IndexError(f"t={t} outside the kind-{kind.value} domain {hi} of a length-{length} segment")


def variation_value(
    segment: MultivariateSeries, dim: int, kind: VariationKind, t: int, epsilon: float = DEFAULT_EPSILON
) -> float:
    """Scalar variation value at ``t`` (1-based, segment-local)."""
    _check_domain(kind, segment.length, t)
    vals, _ = variation_profile(segment.dim_values(dim), kind, epsilon)
    return float(vals[t - 1])


def variation_predicate(
    segment: MultivariateSeries, dim: int, kind: VariationKind, t: int, epsilon: float = DEFAULT_EPSILON
) -> bool:
    """Predicate polarity at ``t`` (1-based, segment-local)."""
    _check_domain(kind, segment.length, t)
    _, preds = variation_profile(segment.dim_values(dim), kind, epsilon)
    return bool(preds[t - 1])


@dataclass(frozen=True)
class SatisfactionIndex:
    """Sorted disjoint maximal runs of one predicate polarity.

    ``source`` identifies (series id, segment interval, dim, kind, polarity);
    ``intervals`` use segment-local 1-based timestamps.
    """

    source: tuple[str, Interval, int, VariationKind, bool]
    intervals: tuple[Interval, ...]

    def __post_init__(self) -> None:
        begins = [iv.begin for iv in self.intervals]
        if begins != sorted(begins):
            raise ValueError("index intervals must be sorted by begin")
        for left, right in zip(self.intervals, self.intervals[1:]):
            if left.end >= right.begin:
                raise ValueError(f"index intervals overlap: {left} / {right}")
        object.__setattr__(self, "_begins", begins)
        object.__setattr__(self, "_ends", [iv.end for iv in self.intervals])

    @property
    def polarity(self) -> bool:
        return self.source[4]


def index_contains(idx: SatisfactionIndex, t: int) -> bool:
    """Membership by binary search over run starts; False outside the domain."""
    begins: list[int] = idx._begins  # type: ignore[attr-defined]
    pos = bisect_right(begins, t) - 1
    if pos < 0:
        return False
    return t <= idx._ends[pos]  # type: ignore[attr-defined]


IndexKey = tuple[ClassSegment, int, VariationKind]
IndexPair = tuple[SatisfactionIndex, SatisfactionIndex]


def build_indices(series: MultivariateSeries, epsilon: float = DEFAULT_EPSILON) -> dict[IndexKey, IndexPair]:
    """Build (true, false) satisfaction indices per (class segment, dim, kind).

    One linear pass per dimension: the predicate profile is computed vectorized
    and run-length encoded; each run lands in the index of its polarity.
    """
    out: dict[IndexKey, IndexPair] = {}
    for segment in class_segments(series):
        view = project(series, segment.interval)
        for dim in range(1, series.n_dims + 1):
            column = view.dim_values(dim)
            for kind in VariationKind:
                dom = variation_domain(kind, view.length)
                by_polarity: dict[bool, list[Interval]] = {True: [], False: []}
                if dom is not None:
                    _, preds = variation_profile(column, kind, epsilon)
                    for iv, value in maximal_runs(preds.tolist()):
                        by_polarity[bool(value)].append(iv)
                out[(segment, dim, kind)] = tuple(
                    SatisfactionIndex(
                        source=(series.id, segment.interval, dim, kind, polarity),
                        intervals=tuple(by_polarity[polarity]),
                    )
                    for polarity in (True, False)
                )  # type: ignore[assignment]
    return out
