"""Polyadic event-log model: constituents, traces, taxonomies, JSON I/O.

A polyadic event is a set of durative constituents that all begin at the same
timestamp; a trace is a run of such events at consecutive timestamps starting
at 1.  Every constituent label except the raw-data marker belongs to exactly
one depth-1 taxonomy rooted at its ``dim_i^kind`` source.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import SchemaError
from .timeseries import Interval

__all__ = [
    "RAW_LABEL",
    "RESERVED_KEYS",
    "SCHEMA_VERSION",
    "DtConstituent",
    "PolyadicEvent",
    "PolyadicTrace",
    "Taxonomy",
    "PolyadicLog",
    "label_root",
    "kappa",
    "prune_redundant",
    "build_taxonomies",
    "log_from_traces",
    "segment_by_class",
    "serialize",
    "deserialize",
]

RAW_LABEL = "__raw_data"
RESERVED_KEYS = ("__label", "__span")
SCHEMA_VERSION = 1


def label_root(label: str) -> str | None:
    """Taxonomy root for a constituent label, ``None`` for the raw marker.

    Labels look like ``"IncreaseRapidly(dim_2^i)"``; the root is the
    parenthesised part.
    """
    if label == RAW_LABEL:
        return None
    open_at = label.find("(")
    if open_at <= 0 or not label.endswith(")"):
        raise ValueError(f"malformed constituent label: {label!r}")
    return label[open_at + 1 : -1]


@dataclass(frozen=True, slots=True)
class DtConstituent:
    """A durative constituent ⟨label, start, span⟩ with a numeric payload.

    Identity (equality, hashing, pruning) is the triple only; the payload is
    carried data.
    """

    label: str
    start: int
    span: int
    payload: Mapping[str, float] = field(compare=False)

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("constituent label must be non-empty")
        if self.start < 1:
            raise ValueError(f"constituent start must be >= 1, got {self.start}")
        if self.span < 1:
            raise ValueError(f"constituent span must be >= 1, got {self.span}")

    @property
    def interval(self) -> Interval:
        return Interval(self.start, self.start + self.span - 1)

    def shifted(self, offset: int) -> "DtConstituent":
        """Copy with the start moved by ``offset`` (payload shared)."""
        return DtConstituent(self.label, self.start + offset, self.span, self.payload)


@dataclass(frozen=True, slots=True)
class PolyadicEvent:
    """All constituents beginning at one timestamp, tagged with a class."""

    constituents: tuple[DtConstituent, ...]
    class_label: int

    def __post_init__(self) -> None:
        if not self.constituents:
            raise ValueError("polyadic event must contain at least one constituent")
        starts = {c.start for c in self.constituents}
        if len(starts) != 1:
            raise ValueError(f"event constituents must share one start, got {sorted(starts)}")

    @property
    def start(self) -> int:
        return self.constituents[0].start


@dataclass(frozen=True, slots=True)
class PolyadicTrace:
    """Consecutive polyadic events; event ``i`` (1-based) starts at time ``i``."""

    id: str
    events: tuple[PolyadicEvent, ...]

    def __post_init__(self) -> None:
        for pos, event in enumerate(self.events, start=1):
            if event.start != pos:
                raise ValueError(
                    f"trace {self.id!r}: event at position {pos} starts at {event.start}"
                )

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True, slots=True)
class Taxonomy:
    """Depth-1 is-a hierarchy: one ``dim_i^kind`` root over its DT labels."""

    root: str
    leaves: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.root:
            raise ValueError("taxonomy root must be non-empty")
        if tuple(sorted(set(self.leaves))) != self.leaves:
            raise ValueError(f"taxonomy {self.root!r}: leaves must be sorted and distinct")
        for leaf in self.leaves:
            if label_root(leaf) != self.root:
                raise ValueError(f"taxonomy {self.root!r}: leaf {leaf!r} names another root")


@dataclass(frozen=True, slots=True)
class PolyadicLog:
    """A pair of taxonomies and traces; every non-raw label resolves uniquely."""

    taxonomies: tuple[Taxonomy, ...]
    traces: tuple[PolyadicTrace, ...]

    def __post_init__(self) -> None:
        owner: dict[str, str] = {}
        for tax in self.taxonomies:
            for leaf in tax.leaves:
                if leaf in owner:
                    raise ValueError(f"label {leaf!r} appears in taxonomies {owner[leaf]!r} and {tax.root!r}")
                owner[leaf] = tax.root
        for trace in self.traces:
            for event in trace.events:
                for c in event.constituents:
                    if c.label != RAW_LABEL and c.label not in owner:
                        raise ValueError(f"trace {trace.id!r}: label {c.label!r} not covered by any taxonomy")

    def leaves_of(self, root: str) -> tuple[str, ...]:
        for tax in self.taxonomies:
            if tax.root == root:
                return tax.leaves
        return ()


def kappa(constituent: DtConstituent) -> dict[str, object]:
    """Payload extended with the reserved ``__label`` and ``__span`` keys."""
    for key in RESERVED_KEYS:
        if key in constituent.payload:
            raise ValueError(f"payload already contains reserved key {key!r}")
    merged: dict[str, object] = dict(constituent.payload)
    merged["__label"] = constituent.label
    merged["__span"] = constituent.span
    return merged


def prune_redundant(trace: PolyadicTrace) -> PolyadicTrace:
    """Drop constituents strictly contained in a same-label one in the trace.

    Raw-data constituents are never dropped.  Idempotent: survivors are the
    containment-maximal intervals per label.
    """
    by_label: dict[str, list[DtConstituent]] = {}
    for event in trace.events:
        for c in event.constituents:
            if c.label != RAW_LABEL:
                by_label.setdefault(c.label, []).append(c)
    doomed: set[tuple[str, int, int]] = set()
    for label, group in by_label.items():
        for c in group:
            for other in group:
                if other is not c and other.interval.strictly_contains(c.interval):
                    doomed.add((label, c.start, c.span))
                    break
    if not doomed:
        return trace
    events = tuple(
        PolyadicEvent(
            tuple(c for c in event.constituents if (c.label, c.start, c.span) not in doomed),
            event.class_label,
        )
        for event in trace.events
    )
    return PolyadicTrace(trace.id, events)


def build_taxonomies(traces: Iterable[PolyadicTrace]) -> tuple[Taxonomy, ...]:
    """One taxonomy per observed root, leaves = observed labels under it."""
    grouped: dict[str, set[str]] = {}
    for trace in traces:
        for event in trace.events:
            for c in event.constituents:
                root = label_root(c.label)
                if root is not None:
                    grouped.setdefault(root, set()).add(c.label)
    return tuple(
        Taxonomy(root, tuple(sorted(leaves))) for root, leaves in sorted(grouped.items())
    )


def log_from_traces(traces: Iterable[PolyadicTrace]) -> PolyadicLog:
    traces = tuple(traces)
    return PolyadicLog(build_taxonomies(traces), traces)


def segment_by_class(log: PolyadicLog) -> dict[int, PolyadicLog]:
    """Split every trace at class changes into per-class logs.

    Each maximal same-class run of consecutive events becomes one trace named
    ``"{source_id}#{k}"`` where ``k`` is the 1-based run counter within the
    source trace; events are re-based to start at 1.  All taxonomies are
    copied into every per-class log.
    """
    per_class: dict[int, list[PolyadicTrace]] = {}
    for trace in log.traces:
        run_start = 0
        run_no = 0
        n = len(trace.events)
        for pos in range(1, n + 1):
            at_break = pos == n or trace.events[pos].class_label != trace.events[run_start].class_label
            if not at_break:
                continue
            run_no += 1
            offset = -run_start  # event at position run_start+1 moves to start 1
            events = tuple(
                PolyadicEvent(
                    tuple(c.shifted(offset) for c in ev.constituents),
                    ev.class_label,
                )
                for ev in trace.events[run_start:pos]
            )
            label = trace.events[run_start].class_label
            per_class.setdefault(label, []).append(PolyadicTrace(f"{trace.id}#{run_no}", events))
            run_start = pos
    return {
        y: PolyadicLog(log.taxonomies, tuple(traces))
        for y, traces in sorted(per_class.items())
    }


def _log_to_obj(log: PolyadicLog) -> dict:
    pruned = tuple(prune_redundant(t) for t in log.traces)
    PolyadicLog(log.taxonomies, pruned)  # re-check label coverage on write
    return {
        "schema_version": SCHEMA_VERSION,
        "taxonomies": [
            {"root": tax.root, "leaves": list(tax.leaves)} for tax in log.taxonomies
        ],
        "traces": [
            {
                "id": trace.id,
                "events": [
                    {
                        "class": event.class_label,
                        "constituents": [
                            {"label": c.label, "span": c.span, "payload": dict(c.payload)}
                            for c in sorted(event.constituents, key=lambda c: (c.label, c.span))
                        ],
                    }
                    for event in trace.events
                ],
            }
            for trace in pruned
        ],
    }


def serialize(log: PolyadicLog) -> bytes:
    """Render as schema-version-1 JSON; redundant constituents are pruned."""
    return json.dumps(_log_to_obj(log), sort_keys=True, separators=(",", ":")).encode()


def _need(obj: dict, key: str, kind: type, path: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"expected object, got {type(obj).__name__}", path=path)
    if key not in obj:
        raise SchemaError(f"missing required key {key!r}", path=path)
    value = obj[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise SchemaError(
            f"key {key!r} must be {kind.__name__}, got {type(obj[key]).__name__}",
            path=path,
        )
    return value


def deserialize(data: bytes) -> PolyadicLog:
    """Parse schema-version-1 JSON; violations raise with a JSON path."""
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    version = _need(obj, "schema_version", int, "$")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version}", path="$.schema_version")
    taxonomies = []
    for i, entry in enumerate(_need(obj, "taxonomies", list, "$")):
        path = f"$.taxonomies[{i}]"
        root = _need(entry, "root", str, path)
        leaves = _need(entry, "leaves", list, path)
        if not all(isinstance(leaf, str) for leaf in leaves):
            raise SchemaError("leaves must be strings", path=f"{path}.leaves")
        try:
            taxonomies.append(Taxonomy(root, tuple(sorted(set(leaves)))))
        except ValueError as exc:
            raise SchemaError(str(exc), path=path) from exc
    traces = []
    for i, entry in enumerate(_need(obj, "traces", list, "$")):
        tpath = f"$.traces[{i}]"
        trace_id = _need(entry, "id", str, tpath)
        events = []
        for j, ev in enumerate(_need(entry, "events", list, tpath)):
            epath = f"{tpath}.events[{j}]"
            class_label = _need(ev, "class", int, epath)
            constituents = []
            for k, cobj in enumerate(_need(ev, "constituents", list, epath)):
                cpath = f"{epath}.constituents[{k}]"
                label = _need(cobj, "label", str, cpath)
                span = _need(cobj, "span", int, cpath)
                payload_obj = _need(cobj, "payload", dict, cpath)
                payload = {}
                for key, value in payload_obj.items():
                    if not isinstance(key, str) or isinstance(value, bool) or not isinstance(value, (int, float)):
                        raise SchemaError("payload must map strings to numbers", path=f"{cpath}.payload")
                    payload[key] = float(value)
                try:
                    constituents.append(DtConstituent(label, j + 1, span, payload))
                except ValueError as exc:
                    raise SchemaError(str(exc), path=cpath) from exc
            try:
                events.append(PolyadicEvent(tuple(constituents), class_label))
            except ValueError as exc:
                raise SchemaError(str(exc), path=epath) from exc
        traces.append(PolyadicTrace(trace_id, tuple(events)))
    try:
        return PolyadicLog(tuple(taxonomies), tuple(traces))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
