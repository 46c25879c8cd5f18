"""Multivariate series data model: projections, maximal runs, class segments, ingestion.

Timestamps are abstract 1-based positions.  Whatever ordering column the input
files carry is used once, to order rows, and then discarded.  Class labels are
remapped to dense integers ``0..n-1`` in order of first appearance; the original
labels are kept on the :class:`Dataset` for round-tripping.
"""

from __future__ import annotations

import csv
import json
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DatasetError, SchemaError

__all__ = [
    "Interval",
    "ClassSegment",
    "MultivariateSeries",
    "Dataset",
    "load_dataset",
    "project",
    "maximal_intervals",
    "maximal_runs",
    "class_segments",
]


@dataclass(frozen=True, slots=True, order=True)
class Interval:
    """Closed 1-based interval ``[begin, end]``."""

    begin: int
    end: int

    def __post_init__(self) -> None:
        if not (1 <= self.begin <= self.end):
            raise ValueError(f"invalid interval [{self.begin}, {self.end}]")

    @property
    def length(self) -> int:
        return self.end - self.begin + 1

    def __contains__(self, t: int) -> bool:
        return self.begin <= t <= self.end

    def contains_interval(self, other: "Interval") -> bool:
        return self.begin <= other.begin and other.end <= self.end

    def strictly_contains(self, other: "Interval") -> bool:
        return self.contains_interval(other) and self != other


@dataclass(frozen=True, slots=True)
class ClassSegment:
    """A maximal constant-class run of one series."""

    interval: Interval
    class_label: int
    source_id: str


@dataclass(frozen=True)
class MultivariateSeries:
    """A timestamped real matrix plus a per-timestamp class column.

    ``data`` has shape ``(length, n_dims)`` over the *data* dimensions only; the
    class dimension is held separately in ``classes``.  Arrays are made read-only
    so instances can be shared across workers.
    """

    id: str
    data: np.ndarray
    classes: np.ndarray
    dim_names: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        data = np.ascontiguousarray(np.asarray(self.data, dtype=np.float64))
        classes = np.ascontiguousarray(np.asarray(self.classes, dtype=np.int64))
        if data.ndim != 2:
            raise ValueError(f"series {self.id!r}: data must be 2-D, got shape {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError(f"series {self.id!r}: need at least 1 row and 1 data dimension")
        if classes.shape != (data.shape[0],):
            raise ValueError(
                f"series {self.id!r}: class column length {classes.shape} "
                f"does not match {data.shape[0]} rows"
            )
        names = tuple(self.dim_names) or tuple(f"dim_{i}" for i in range(1, data.shape[1] + 1))
        if len(names) != data.shape[1]:
            raise ValueError(f"series {self.id!r}: {len(names)} dim names for {data.shape[1]} dims")
        data.setflags(write=False)
        classes.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "dim_names", names)

    @property
    def length(self) -> int:
        return self.data.shape[0]

    @property
    def n_dims(self) -> int:
        """Number of data dimensions (class column excluded)."""
        return self.data.shape[1]

    def value(self, t: int, dim: int) -> float:
        """1-based accessor: value of data dimension ``dim`` at timestamp ``t``."""
        if not 1 <= t <= self.length:
            raise IndexError(f"timestamp {t} outside [1, {self.length}]")
        if not 1 <= dim <= self.n_dims:
            raise IndexError(f"dimension {dim} outside [1, {self.n_dims}]")
        return float(self.data[t - 1, dim - 1])

    def dim_values(self, dim: int) -> np.ndarray:
        if not 1 <= dim <= self.n_dims:
            raise IndexError(f"dimension {dim} outside [1, {self.n_dims}]")
        return self.data[:, dim - 1]

    def class_at(self, t: int) -> int:
        if not 1 <= t <= self.length:
            raise IndexError(f"timestamp {t} outside [1, {self.length}]")
        return int(self.classes[t - 1])


@dataclass(frozen=True)
class Dataset:
    """Loaded series (sorted by id) plus the dense-label ↔ original-label map."""

    series: tuple[MultivariateSeries, ...]
    class_names: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.series)


def project(series: MultivariateSeries, iv: Interval) -> MultivariateSeries:
    """Subsequence view: result(x) = series(x + iv.begin - 1)."""
    if iv.end > series.length:
        raise IndexError(
            f"interval [{iv.begin}, {iv.end}] exceeds series {series.id!r} length {series.length}"
        )
    sl = slice(iv.begin - 1, iv.end)
    return MultivariateSeries(
        id=series.id,
        data=series.data[sl],
        classes=series.classes[sl],
        dim_names=series.dim_names,
    )


def maximal_runs(values: Sequence | np.ndarray, start: int = 1) -> list[tuple[Interval, object]]:
    """Partition ``values`` into maximal constant runs.

    Returns ``(interval, value)`` pairs with 1-based timestamps offset by
    ``start``; adjacent runs carry different values.
    """
    vals = list(values)
    if not vals:
        return []
    runs: list[tuple[Interval, object]] = []
    run_begin = 0
    for i in range(1, len(vals)):
        if vals[i] != vals[run_begin]:
            runs.append((Interval(start + run_begin, start + i - 1), vals[run_begin]))
            run_begin = i
    runs.append((Interval(start + run_begin, start + len(vals) - 1), vals[run_begin]))
    return runs


def maximal_intervals(f: Callable[[int], object] | Sequence, domain: Interval) -> list[Interval]:
    """Largest non-overlapping intervals of ``domain`` over which ``f`` is constant.

    ``f`` may be a callable over timestamps or a sequence indexed 0-based from
    ``domain.begin``.  The result partitions the domain, is sorted by begin, and
    adjacent intervals have distinct values.
    """
    if callable(f):
        vals = [f(t) for t in range(domain.begin, domain.end + 1)]
    else:
        vals = list(f)
        if len(vals) != domain.length:
            raise ValueError(f"{len(vals)} values for domain of length {domain.length}")
    return [iv for iv, _ in maximal_runs(vals, start=domain.begin)]


def class_segments(series: MultivariateSeries) -> list[ClassSegment]:
    """Maximal constant runs of the class column, tagged with their class."""
    return [
        ClassSegment(interval=iv, class_label=int(value), source_id=series.id)
        for iv, value in maximal_runs(series.classes.tolist())
    ]


# --------------------------------------------------------------------------- #
# ingestion

_FORMATS = ("long_csv", "json_dir")


def load_dataset(path: str | Path, format: str = "long_csv") -> Dataset:
    """Load a dataset in one of the supported formats.

    ``long_csv``: a single CSV with header ``series_id,t,<dim_1>,...,<dim_k>,class``;
    ``t`` must be contiguous positive integers per series (any row order).
    ``json_dir``: a directory of per-series JSON documents with fields
    ``id``, ``dims``, ``rows``, ``class``.
    """
    if format not in _FORMATS:
        raise DatasetError(f"unknown format {format!r}; expected one of {_FORMATS}")
    path = Path(path)
    if format == "long_csv":
        return _load_long_csv(path)
    return _load_json_dir(path)


class _LabelMap:
    """Dense remapping of class labels in order of first appearance."""

    def __init__(self) -> None:
        self._index: dict[str, int] = {}

    def dense(self, label: object) -> int:
        key = str(label)
        if key not in self._index:
            self._index[key] = len(self._index)
        return self._index[key]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._index)


def _load_long_csv(path: Path) -> Dataset:
    if not path.is_file():
        raise DatasetError("no such file", source=str(path))
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError("empty file (missing header)", source=str(path)) from None
        header = [h.strip() for h in header]
        if len(header) < 4 or header[0] != "series_id" or header[1] != "t" or header[-1] != "class":
            raise DatasetError(
                "header must be series_id,t,<dim_1>,...,<dim_k>,class",
                source=str(path),
                line=1,
            )
        dim_names = tuple(header[2:-1])
        n_cols = len(header)
        # per series id: list of (t, values, class-token)
        rows: dict[str, list[tuple[int, list[float], str]]] = {}
        labels = _LabelMap()
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != n_cols:
                missing = header[len(row)] if len(row) < n_cols else None
                what = f"missing column {missing!r}" if missing else f"{len(row)} fields, expected {n_cols}"
                raise DatasetError(what, source=str(path), line=lineno)
            sid = row[0].strip()
            try:
                t = int(row[1])
            except ValueError:
                raise DatasetError(f"bad timestamp {row[1]!r}", source=str(path), line=lineno) from None
            if t < 1:
                raise DatasetError(f"timestamp {t} is not positive", source=str(path), line=lineno)
            values = []
            for name, tok in zip(dim_names, row[2:-1]):
                try:
                    values.append(float(tok))
                except ValueError:
                    raise DatasetError(
                        f"bad value {tok!r} in column {name!r}", source=str(path), line=lineno
                    ) from None
            rows.setdefault(sid, []).append((t, values, row[-1].strip()))
        series = []
        for sid in sorted(rows):
            entries = sorted(rows[sid], key=lambda item: item[0])
            ts = [t for t, _, _ in entries]
            first, last = ts[0], ts[-1]
            if ts != list(range(first, last + 1)):
                raise DatasetError(
                    f"series {sid!r}: timestamps are not contiguous ({len(ts)} rows spanning "
                    f"[{first}, {last}])",
                    source=str(path),
                )
            series.append(
                MultivariateSeries(
                    id=sid,
                    data=np.array([vals for _, vals, _ in entries], dtype=np.float64),
                    classes=np.array([labels.dense(tok) for _, _, tok in entries], dtype=np.int64),
                    dim_names=dim_names,
                )
            )
        return Dataset(series=tuple(series), class_names=labels.names)


def _load_json_dir(path: Path) -> Dataset:
    if not path.is_dir():
        raise DatasetError("no such directory", source=str(path))
    labels = _LabelMap()
    series = []
    for fp in sorted(path.glob("*.json")):
        where = str(fp)
        try:
            doc = json.loads(fp.read_text())
        except json.JSONDecodeError as exc:
            raise DatasetError(f"invalid JSON: {exc.msg}", source=where, line=exc.lineno) from None
        for key in ("id", "dims", "rows", "class"):
            if key not in doc:
                raise SchemaError(f"missing required field {key!r}", path=f"{where}:$")
        dims = doc["dims"]
        if not isinstance(dims, list) or not all(isinstance(d, str) for d in dims) or not dims:
            raise SchemaError("dims must be a non-empty array of strings", path=f"{where}:$.dims")
        raw_rows = doc["rows"]
        raw_class = doc["class"]
        if not isinstance(raw_rows, list) or not raw_rows:
            raise SchemaError("rows must be a non-empty array", path=f"{where}:$.rows")
        if not isinstance(raw_class, list) or len(raw_class) != len(raw_rows):
            raise SchemaError(
                f"class array length must match rows ({len(raw_rows)})", path=f"{where}:$.class"
            )
        for i, row in enumerate(raw_rows):
            if not isinstance(row, list) or len(row) != len(dims):
                raise SchemaError(
                    f"row must have {len(dims)} values", path=f"{where}:$.rows[{i}]"
                )
        try:
            data = np.array(raw_rows, dtype=np.float64)
        except (TypeError, ValueError):
            raise SchemaError("rows must contain numbers", path=f"{where}:$.rows") from None
        series.append(
            MultivariateSeries(
                id=str(doc["id"]),
                data=data,
                classes=np.array([labels.dense(c) for c in raw_class], dtype=np.int64),
                dim_names=tuple(dims),
            )
        )
    ids = [s.id for s in series]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})[0]
        raise DatasetError(f"duplicate series id {dup!r}", source=str(path))
    series.sort(key=lambda s: s.id)
    return Dataset(series=tuple(series), class_names=labels.names)
