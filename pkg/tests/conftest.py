"""Shared builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from polydeclare.polylog import DtConstituent, PolyadicEvent, PolyadicTrace
from polydeclare.timeseries import MultivariateSeries


def mk_series(values, classes=None, sid: str = "s", dim_names=()) -> MultivariateSeries:
    """Series from a 1-D list (single dim) or T×k array; classes default to 0."""
    data = np.asarray(values, dtype=np.float64)
    if data.ndim == 1:
        data = data[:, None]
    if classes is None:
        classes = [0] * data.shape[0]
    return MultivariateSeries(sid, data, np.asarray(classes, dtype=np.int64), tuple(dim_names))


def mk_trace(events, tid: str = "t", class_label: int = 0) -> PolyadicTrace:
    """Trace from a list of events, each a list of (label, span[, payload]) tuples.

    Event positions define the start timestamps, as in the serialized form.
    """
    built = []
    for pos, specs in enumerate(events, start=1):
        constituents = []
        for spec in specs:
            label, span = spec[0], spec[1]
            payload = spec[2] if len(spec) > 2 else {}
            constituents.append(DtConstituent(label, pos, span, payload))
        built.append(PolyadicEvent(tuple(constituents), class_label))
    return PolyadicTrace(tid, tuple(built))


@pytest.fixture
def toy_csv(tmp_path):
    """Separable 2-class dataset: rising ramps vs falling ramps, 2 dims."""
    rng = np.random.default_rng(7)
    rows = ["series_id,t,d1,d2,class"]
    for sid in range(6):
        up = sid % 2 == 0
        noise = rng.normal(0.0, 0.05, size=20)
        for t in range(1, 21):
            v = (t * 0.5 if up else -t * 0.5) + noise[t - 1]
            w = np.sin(t / 3.0) + (0.2 if up else -0.2)
            rows.append(f"s{sid},{t},{v:.6f},{w:.6f},{0 if up else 1}")
    path = tmp_path / "toy.csv"
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return path
