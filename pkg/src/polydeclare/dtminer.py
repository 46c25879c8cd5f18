"""Indexed mining of data-trend constituents from satisfaction indices.

Each maximal predicate run yields its rapid-trend constituent plus, depending
on the polarity of the neighbouring timestamps, the slow-trend and volatility
shapes whose pointwise silhouettes fit around the run.  Payloads pair summary
features of the whole segment dimension (``seg_`` keys) with features of the
covered slice (``loc_`` keys) and the local boundary timestamps.
"""

from __future__ import annotations

from concurrent.futures import Executor
from enum import Enum

import numpy as np

from .discretizer import SatisfactionIndex, VariationKind, index_contains
from .features import FEATURE_NAMES, feature_vector
from .polylog import RAW_LABEL, DtConstituent, PolyadicEvent, PolyadicTrace
from .timeseries import ClassSegment, Interval, MultivariateSeries, class_segments

__all__ = ["DtPatternClass", "dt_label", "feature_payload_pair", "dt_mine_step", "dt_mine"]

IndexPair = tuple[SatisfactionIndex, SatisfactionIndex]


class DtPatternClass(str, Enum):
    S = "S"
    HV43 = "HV43"
    ONE_H = "1H"
    TWO_H = "2H"
    E1 = "E1"
    E2 = "E2"


_DL_NAMES: dict[DtPatternClass, tuple[str, str]] = {
    DtPatternClass.S: ("IncreaseRapidly", "DecreaseRapidly"),
    DtPatternClass.HV43: ("HighVolatility3", "HighVolatility4"),
    DtPatternClass.ONE_H: ("IncreaseSlowly1", "DecreaseSlowly4"),
    DtPatternClass.TWO_H: ("IncreaseSlowly2", "DecreaseSlowly3"),
    DtPatternClass.E1: ("IncreaseSlowly3", "DecreaseSlowly2"),
    DtPatternClass.E2: ("IncreaseSlowly4", "DecreaseSlowly1"),
}


def dt_label(pattern: DtPatternClass, nu: bool, kind: VariationKind, dim: int) -> str:
    """Constituent label for a pattern class and polarity, e.g. ``"IncreaseRapidly(dim_3^i)"``."""
    name = _DL_NAMES[pattern][0 if nu else 1]
    return f"{name}(dim_{dim}^{kind.value})"


class _SegmentFeatures:
    """Payload assembly for one (segment, dimension) with slice-level caching."""

    __slots__ = ("_values", "_seg", "_loc")

    def __init__(self, values: np.ndarray):
        self._values = values
        self._seg: np.ndarray | None = None
        self._loc: dict[tuple[int, int], np.ndarray] = {}

    def seg_vector(self) -> np.ndarray:
        if self._seg is None:
            self._seg = feature_vector(self._values)
        return self._seg

    def loc_vector(self, start: int, span: int) -> np.ndarray:
        key = (start, span)
        vec = self._loc.get(key)
        if vec is None:
            vec = feature_vector(self._values[start - 1 : start - 1 + span])
            self._loc[key] = vec
        return vec

    def payload(self, start: int, span: int) -> dict[str, float]:
        out = {f"seg_{name}": float(v) for name, v in zip(FEATURE_NAMES, self.seg_vector())}
        out.update(
            {f"loc_{name}": float(v) for name, v in zip(FEATURE_NAMES, self.loc_vector(start, span))}
        )
        out["t_begin"] = float(start)
        out["t_end"] = float(start + span - 1)
        return out


def feature_payload_pair(segment_values: np.ndarray, start: int, span: int) -> dict[str, float]:
    """The full 54-key constituent payload for a slice of one segment dimension."""
    return _SegmentFeatures(np.asarray(segment_values, dtype=np.float64)).payload(start, span)


def _shape_emissions(
    run: Interval, in_nu, in_opp
) -> list[tuple[DtPatternClass, int, int]]:
    """(pattern, start, span) triples mined around one maximal polarity run.

    ``in_nu``/``in_opp`` test membership of a timestamp in the mined polarity's
    index and the opposite one.  Every triple's pointwise silhouette matches
    its pattern by construction of the guards.
    """
    b, e = run.begin, run.end
    n = e - b + 1
    out: list[tuple[DtPatternClass, int, int]] = [(DtPatternClass.S, b, n)]
    if in_opp(b - 1):
        for s in range(1, n + 1):
            out.append((DtPatternClass.ONE_H, b - 1, s + 1))
            if in_nu(b - 2):
                out.append((DtPatternClass.TWO_H, b - 2, s + 2))
        if n == 1 and in_opp(b + 1):
            out.append((DtPatternClass.HV43, b - 1, 3))
    if in_opp(e + 1):
        if in_nu(e + 2):
            out.append((DtPatternClass.E1, e, 3))
        else:
            out.append((DtPatternClass.E2, e, 2))
    return out


def dt_mine_step(
    segment: MultivariateSeries,
    dim: int,
    kind: VariationKind,
    nu: bool,
    iv: Interval,
    indices: IndexPair,
    features: _SegmentFeatures | None = None,
) -> set[DtConstituent]:
    """All constituents mined from one maximal run of the (dim, kind, nu)-index.

    Starts are segment-local 1-based timestamps.
    """
    idx_nu, idx_opp = (indices[0], indices[1]) if nu else (indices[1], indices[0])
    if features is None:
        features = _SegmentFeatures(segment.dim_values(dim))
    out: set[DtConstituent] = set()
    in_nu = lambda t: t >= 1 and index_contains(idx_nu, t)
    in_opp = lambda t: t >= 1 and index_contains(idx_opp, t)
    for pattern, start, span in _shape_emissions(iv, in_nu, in_opp):
        label = dt_label(pattern, nu, kind, dim)
        out.add(DtConstituent(label, start, span, features.payload(start, span)))
    return out


def dt_mine(
    series: MultivariateSeries,
    indices: dict[tuple[ClassSegment, int, VariationKind], IndexPair],
    pool: Executor | None = None,
) -> PolyadicTrace:
    """One polyadic trace over the whole series.

    Every timestamp becomes an event carrying a span-1 raw-data constituent
    (payload ``dim_i`` → value) plus all trend constituents starting there,
    mined per class segment in both polarities.  Passing an executor farms the
    feature computations out; assembly order is canonical either way, so
    parallel output is byte-identical to sequential.
    """
    segments = class_segments(series)
    feats: dict[tuple[Interval, int], _SegmentFeatures] = {}
    shaped: dict[tuple[str, int, int], tuple[Interval, int, int, int]] = {}
    for seg in segments:
        seg_begin = seg.interval.begin
        for dim in range(1, series.n_dims + 1):
            fkey = (seg.interval, dim)
            if fkey not in feats:
                values = series.data[seg_begin - 1 : seg.interval.end, dim - 1]
                feats[fkey] = _SegmentFeatures(np.ascontiguousarray(values))
            for kind in VariationKind:
                pair = indices.get((seg, dim, kind))
                if pair is None:
                    continue
                for nu in (True, False):
                    idx_nu, idx_opp = (pair[0], pair[1]) if nu else (pair[1], pair[0])
                    in_nu = lambda t: t >= 1 and index_contains(idx_nu, t)
                    in_opp = lambda t: t >= 1 and index_contains(idx_opp, t)
                    for run in idx_nu.intervals:
                        for pattern, start, span in _shape_emissions(run, in_nu, in_opp):
                            label = dt_label(pattern, nu, kind, dim)
                            key = (label, seg_begin + start - 1, span)
                            shaped.setdefault(key, (seg.interval, dim, start, span))

    if pool is not None:
        _prime_feature_caches(feats, shaped, pool)

    per_start: dict[int, list[DtConstituent]] = {}
    for (label, g_start, span), (seg_iv, dim, l_start, _) in sorted(shaped.items()):
        payload = feats[(seg_iv, dim)].payload(l_start, span)
        per_start.setdefault(g_start, []).append(DtConstituent(label, g_start, span, payload))

    events = []
    for t in range(1, series.length + 1):
        raw_payload = {f"dim_{d}": float(series.data[t - 1, d - 1]) for d in range(1, series.n_dims + 1)}
        constituents = [DtConstituent(RAW_LABEL, t, 1, raw_payload)]
        constituents.extend(per_start.get(t, ()))
        constituents.sort(key=lambda c: (c.label, c.span))
        events.append(PolyadicEvent(tuple(constituents), series.class_at(t)))
    return PolyadicTrace(series.id, tuple(events))


def _prime_feature_caches(
    feats: dict[tuple[Interval, int], _SegmentFeatures],
    shaped: dict[tuple[str, int, int], tuple[Interval, int, int, int]],
    pool: Executor,
) -> None:
    """Compute every needed feature vector through the executor, in task order."""
    tasks: dict[tuple[Interval, int, int, int], np.ndarray] = {}
    for _, (seg_iv, dim, start, span) in sorted(shaped.items()):
        sf = feats[(seg_iv, dim)]
        tasks.setdefault((seg_iv, dim, 0, 0), sf._values)
        tasks.setdefault((seg_iv, dim, start, span), sf._values[start - 1 : start - 1 + span])
    keys = list(tasks)
    for key, vec in zip(keys, pool.map(feature_vector, (tasks[k] for k in keys))):
        seg_iv, dim, start, span = key
        sf = feats[(seg_iv, dim)]
        if span == 0:
            sf._seg = vec
        else:
            sf._loc[(start, span)] = vec
