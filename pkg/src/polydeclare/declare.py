"""Dataful clause templates over polyadic traces and their evaluation.

A clause pairs a template with labelled, predicate-guarded activation and
target slots.  Labels may be concrete constituent labels, taxonomy roots
(matching every leaf), or the wildcard ``⋆`` (matching every constituent,
raw data included).  ``evaluate`` is the production evaluator;
``oracle_evaluate`` re-derives every outcome by brute-force quantifier
expansion and exists purely to cross-check it.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from enum import Enum, IntEnum

from .polylog import RAW_LABEL, DtConstituent, PolyadicTrace, kappa

__all__ = [
    "STAR",
    "Outcome",
    "Template",
    "UNARY_TEMPLATES",
    "BINARY_TEMPLATES",
    "DataPredicate",
    "TRUE",
    "Clause",
    "TraceIndex",
    "evaluate",
    "oracle_evaluate",
    "render_predicate",
    "render_clause",
]

STAR = "⋆"

_OPS = ("<=", ">", "=", "!=")
_OP_SYMBOLS = {"<=": "≤", ">": ">", "=": "=", "!=": "≠"}


class Outcome(IntEnum):
    VIOLATED = -1
    VACUOUS = 0
    SATISFIED = 1


class Template(str, Enum):
    INIT = "Init"
    END = "End"
    EXISTS = "Exists"
    ABSENCE = "Absence"
    CHOICE = "Choice"
    EXCL_CHOICE = "ExclChoice"
    RESP_EXISTENCE = "RespExistence"
    CO_EXISTENCE = "CoExistence"
    PRECEDENCE = "Precedence"
    RESPONSE = "Response"
    SUCCESSION = "Succession"
    CHAIN_PRECEDENCE = "ChainPrecedence"
    CHAIN_RESPONSE = "ChainResponse"
    CHAIN_SUCCESSION = "ChainSuccession"


UNARY_TEMPLATES = frozenset(
    {Template.INIT, Template.END, Template.EXISTS, Template.ABSENCE}
)
BINARY_TEMPLATES = frozenset(Template) - UNARY_TEMPLATES

Atom = tuple[str, str, "float | str"]


@dataclass(frozen=True, slots=True)
class DataPredicate:
    """Disjunction of conjunctions of atomic comparisons; ``()`` is TRUE.

    Atoms are (key, op, constant) with op ∈ {≤, >, =, ≠}.  A missing payload
    key makes the atom false; ordering atoms require a numeric value.
    """

    disjuncts: tuple[tuple[Atom, ...], ...] = ()

    def __post_init__(self) -> None:
        for conj in self.disjuncts:
            for key, op, const in conj:
                if not isinstance(key, str) or not key:
                    raise ValueError(f"atom key must be a non-empty string, got {key!r}")
                if op not in _OPS:
                    raise ValueError(f"unknown comparison operator {op!r}")
                if op in ("<=", ">") and (isinstance(const, bool) or not isinstance(const, (int, float))):
                    raise ValueError(f"ordering atom on {key!r} needs a numeric constant, got {const!r}")

    @property
    def is_trivial(self) -> bool:
        return not self.disjuncts

    def holds(self, payload) -> bool:
        if not self.disjuncts:
            return True
        return any(all(_atom_holds(payload, *atom) for atom in conj) for conj in self.disjuncts)


TRUE = DataPredicate()


def _atom_holds(payload, key: str, op: str, const) -> bool:
    if key not in payload:
        return False
    value = payload[key]
    if op in ("<=", ">"):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return False
        return value <= const if op == "<=" else value > const
    if op == "=":
        return value == const
    return value != const


@dataclass(frozen=True, slots=True)
class Clause:
    """One template instance; hashable so it can key embedding columns.

    ``poly`` selects span-aware spacing for the ordered binary templates
    (activation span / target span counts as the distance unit); with it off,
    every constituent behaves as span 1.
    """

    template: Template
    activation: tuple[str, DataPredicate]
    target: tuple[str, DataPredicate] | None = None
    all_variant: bool = False
    poly: bool = True

    def __post_init__(self) -> None:
        if self.template in UNARY_TEMPLATES:
            if self.target is not None:
                raise ValueError(f"{self.template.value} takes no target")
        else:
            if self.target is None:
                raise ValueError(f"{self.template.value} needs a target")
            if self.all_variant:
                raise ValueError("all-variants exist only for unary templates")

    def labels(self) -> tuple[str, ...]:
        out = [self.activation[0]]
        if self.target is not None:
            out.append(self.target[0])
        return tuple(out)


def _root_of(label: str) -> str | None:
    """Taxonomy root embedded in a label, tolerant of bare test labels."""
    if label == RAW_LABEL:
        return None
    open_at = label.find("(")
    if open_at > 0 and label.endswith(")"):
        return label[open_at + 1 : -1]
    return None


class TraceIndex:
    """Per-trace occurrence maps so repeated clause evaluation stays cheap.

    Occurrences are (event index, constituent, κ-payload) triples in event
    order; lookups resolve exact labels, roots, and the wildcard.
    """

    __slots__ = ("trace", "all_occurrences", "_by_label", "_by_root")

    def __init__(self, trace: PolyadicTrace):
        self.trace = trace
        self.all_occurrences: list[tuple[int, DtConstituent, dict]] = []
        self._by_label: dict[str, list[tuple[int, DtConstituent, dict]]] = {}
        self._by_root: dict[str, list[tuple[int, DtConstituent, dict]]] = {}
        for j, event in enumerate(trace.events, start=1):
            for c in event.constituents:
                entry = (j, c, kappa(c))
                self.all_occurrences.append(entry)
                self._by_label.setdefault(c.label, []).append(entry)
                root = _root_of(c.label)
                if root is not None:
                    self._by_root.setdefault(root, []).append(entry)

    def occurrences(self, label: str) -> list[tuple[int, DtConstituent, dict]]:
        if label == STAR:
            return self.all_occurrences
        exact = self._by_label.get(label)
        if exact is not None:
            return exact
        return self._by_root.get(label, [])


def _matching(index: TraceIndex, slot: tuple[str, DataPredicate]):
    label, pred = slot
    return [entry for entry in index.occurrences(label) if pred.holds(entry[2])]


def _event_match(index: TraceIndex, j: int, slot: tuple[str, DataPredicate], all_variant: bool) -> bool:
    present = [entry for entry in index.occurrences(slot[0]) if entry[0] == j]
    if not present:
        return False
    hits = [entry for entry in present if slot[1].holds(entry[2])]
    return len(hits) == len(present) if all_variant else bool(hits)


def _combine(*outcomes: Outcome) -> Outcome:
    """Composite rule: any violation wins; vacuous only when all are vacuous."""
    if Outcome.VIOLATED in outcomes:
        return Outcome.VIOLATED
    if all(o is Outcome.VACUOUS for o in outcomes):
        return Outcome.VACUOUS
    return Outcome.SATISFIED


def _exists(index: TraceIndex, slot: tuple[str, DataPredicate], all_variant: bool) -> Outcome:
    occurrences = index.occurrences(slot[0])
    hits = [entry for entry in occurrences if slot[1].holds(entry[2])]
    if not occurrences:
        # Dataful clauses de-activate when the label is absent altogether.
        return Outcome.VACUOUS if not slot[1].is_trivial else Outcome.VIOLATED
    if all_variant:
        return Outcome.SATISFIED if len(hits) == len(occurrences) else Outcome.VIOLATED
    return Outcome.SATISFIED if hits else Outcome.VIOLATED


def _spans(entries, poly: bool) -> list[tuple[int, int]]:
    return [(j, c.span if poly else 1) for j, c, _ in entries]


def evaluate(
    clause: Clause,
    trace: PolyadicTrace | TraceIndex,
    alphabet: frozenset[str] | set[str] | None = None,
    chain_adjacency_leq: bool = False,
) -> Outcome:
    """Outcome of one clause on one trace.

    ``alphabet``, when given, is the label universe (labels ∪ roots); clause
    labels outside it raise.  ``chain_adjacency_leq`` switches
    ChainPrecedence adjacency from ``h+span = j`` to ``h+span ≤ j``.
    """
    index = trace if isinstance(trace, TraceIndex) else TraceIndex(trace)
    if alphabet is not None:
        for label in clause.labels():
            if label != STAR and label not in alphabet:
                raise ValueError(f"clause label {label!r} not in the log alphabet")
    return _evaluate(clause, index, chain_adjacency_leq)


def _evaluate(clause: Clause, index: TraceIndex, leq: bool) -> Outcome:
    t = clause.template
    act = clause.activation
    events = index.trace.events

    if t is Template.INIT or t is Template.END:
        if not events:
            return Outcome.VIOLATED
        j = 1 if t is Template.INIT else len(events)
        return (
            Outcome.SATISFIED
            if _event_match(index, j, act, clause.all_variant)
            else Outcome.VIOLATED
        )
    if t is Template.EXISTS:
        return _exists(index, act, clause.all_variant)
    if t is Template.ABSENCE:
        matched = (
            any(_event_match(index, j, act, True) for j in range(1, len(events) + 1))
            if clause.all_variant
            else bool(_matching(index, act))
        )
        return Outcome.VIOLATED if matched else Outcome.SATISFIED

    tgt = clause.target
    assert tgt is not None
    if t is Template.CHOICE:
        return Outcome(max(_exists(index, act, False), _exists(index, tgt, False)))
    if t is Template.EXCL_CHOICE:
        left, right = _exists(index, act, False), _exists(index, tgt, False)
        sats = (left is Outcome.SATISFIED) + (right is Outcome.SATISFIED)
        if sats == 1:
            return Outcome.SATISFIED
        if sats == 2:
            return Outcome.VIOLATED
        if left is Outcome.VACUOUS and right is Outcome.VACUOUS:
            return Outcome.VACUOUS
        return Outcome.VIOLATED
    if t is Template.CO_EXISTENCE:
        return _combine(_resp_existence(index, act, tgt), _resp_existence(index, tgt, act))
    if t is Template.RESP_EXISTENCE:
        return _resp_existence(index, act, tgt)
    if t is Template.RESPONSE:
        return _response(index, act, tgt, clause.poly, chain=False, leq=False)
    if t is Template.CHAIN_RESPONSE:
        return _response(index, act, tgt, clause.poly, chain=True, leq=False)
    if t is Template.PRECEDENCE:
        return _precedence(index, act, tgt)
    if t is Template.CHAIN_PRECEDENCE:
        return _chain_precedence(index, act, tgt, clause.poly, leq)
    if t is Template.SUCCESSION:
        return _combine(
            _precedence(index, act, tgt),
            _response(index, act, tgt, clause.poly, chain=False, leq=False),
        )
    assert t is Template.CHAIN_SUCCESSION
    return _combine(
        _chain_precedence(index, tgt, act, clause.poly, leq),
        _response(index, act, tgt, clause.poly, chain=True, leq=False),
    )


def _resp_existence(index: TraceIndex, act, tgt) -> Outcome:
    if not _matching(index, act):
        return Outcome.VACUOUS
    return Outcome.SATISFIED if _matching(index, tgt) else Outcome.VIOLATED


def _response(index: TraceIndex, act, tgt, poly: bool, chain: bool, leq: bool) -> Outcome:
    activations = _spans(_matching(index, act), poly)
    if not activations:
        return Outcome.VACUOUS
    target_events = sorted({j for j, _, _ in _matching(index, tgt)})
    for j, span in activations:
        want = j + span
        if chain:
            at = bisect_left(target_events, want)
            if at == len(target_events) or target_events[at] != want:
                return Outcome.VIOLATED
        else:
            if bisect_left(target_events, want) == len(target_events):
                return Outcome.VIOLATED
    return Outcome.SATISFIED


def _precedence(index: TraceIndex, act, tgt) -> Outcome:
    targets = _matching(index, tgt)
    activations = _matching(index, act)
    if not activations:
        # A target with no activation anywhere is a vacuous violation.
        return Outcome.VIOLATED if targets else Outcome.VACUOUS
    if not targets:
        return Outcome.SATISFIED
    first_target = min(j for j, _, _ in targets)
    for j, _, _ in activations:
        if first_target <= j:
            return Outcome.VIOLATED
    return Outcome.SATISFIED


def _chain_precedence(index: TraceIndex, act, tgt, poly: bool, leq: bool) -> Outcome:
    activations = [(j, s) for j, s in _spans(_matching(index, act), poly) if j > 1]
    if not activations:
        return Outcome.VACUOUS
    ends = [j + (b.span if poly else 1) for j, b, _ in _matching(index, tgt)]
    for j, _ in activations:
        if leq:
            if not any(end <= j for end in ends):
                return Outcome.VIOLATED
        else:
            if j not in ends:
                return Outcome.VIOLATED
    return Outcome.SATISFIED


# --- Brute-force oracle -----------------------------------------------------
#
# Deliberately naive re-derivation: no occurrence maps, no sorting, no early
# exits; every quantifier is expanded over all (event, constituent) pairs.


def _o_pairs(trace: PolyadicTrace):
    return [
        (j, c)
        for j, event in enumerate(trace.events, start=1)
        for c in event.constituents
    ]


def _o_label_fits(c: DtConstituent, label: str) -> bool:
    return label == STAR or c.label == label or _root_of(c.label) == label


def _o_sat(c: DtConstituent, slot) -> bool:
    return _o_label_fits(c, slot[0]) and slot[1].holds(kappa(c))


def _o_span(c: DtConstituent, poly: bool) -> int:
    return c.span if poly else 1


def oracle_evaluate(
    clause: Clause,
    trace: PolyadicTrace,
    alphabet: frozenset[str] | set[str] | None = None,
    chain_adjacency_leq: bool = False,
) -> Outcome:
    """Same contract as ``evaluate``; exhaustive expansion, for testing."""
    if alphabet is not None:
        for label in clause.labels():
            if label != STAR and label not in alphabet:
                raise ValueError(f"clause label {label!r} not in the log alphabet")
    return _o_eval(clause, trace, chain_adjacency_leq)


def _o_eval(clause: Clause, trace: PolyadicTrace, leq: bool) -> Outcome:
    t = clause.template
    act = clause.activation
    tgt = clause.target
    pairs = _o_pairs(trace)
    n = len(trace.events)

    def event_matches(j: int, slot, all_variant: bool) -> bool:
        labelled = [c for (h, c) in pairs if h == j and _o_label_fits(c, slot[0])]
        if all_variant:
            return bool(labelled) and all(slot[1].holds(kappa(c)) for c in labelled)
        return any(slot[1].holds(kappa(c)) for c in labelled)

    def exists_outcome(slot, all_variant: bool) -> Outcome:
        labelled = [c for (_, c) in pairs if _o_label_fits(c, slot[0])]
        if not labelled:
            return Outcome.VIOLATED if slot[1].is_trivial else Outcome.VACUOUS
        if all_variant:
            ok = all(slot[1].holds(kappa(c)) for c in labelled)
        else:
            ok = any(slot[1].holds(kappa(c)) for c in labelled)
        return Outcome.SATISFIED if ok else Outcome.VIOLATED

    def resp_existence(a_slot, b_slot) -> Outcome:
        if not any(_o_sat(c, a_slot) for (_, c) in pairs):
            return Outcome.VACUOUS
        if any(_o_sat(c, b_slot) for (_, c) in pairs):
            return Outcome.SATISFIED
        return Outcome.VIOLATED

    def response(a_slot, b_slot, chain: bool) -> Outcome:
        acts = [(j, _o_span(c, clause.poly)) for (j, c) in pairs if _o_sat(c, a_slot)]
        if not acts:
            return Outcome.VACUOUS
        ok = all(
            any(
                _o_sat(c, b_slot) and (h == j + s if chain else h >= j + s)
                for (h, c) in pairs
            )
            for (j, s) in acts
        )
        return Outcome.SATISFIED if ok else Outcome.VIOLATED

    def precedence(a_slot, b_slot) -> Outcome:
        acts = [j for (j, c) in pairs if _o_sat(c, a_slot)]
        tgts = [h for (h, c) in pairs if _o_sat(c, b_slot)]
        if not acts:
            return Outcome.VIOLATED if tgts else Outcome.VACUOUS
        if any(h <= j for j in acts for h in tgts):
            return Outcome.VIOLATED
        return Outcome.SATISFIED

    def chain_precedence(a_slot, b_slot) -> Outcome:
        acts = [j for (j, c) in pairs if _o_sat(c, a_slot) and j > 1]
        if not acts:
            return Outcome.VACUOUS
        ok = all(
            any(
                _o_sat(c, b_slot)
                and (
                    h + _o_span(c, clause.poly) <= j
                    if leq
                    else h + _o_span(c, clause.poly) == j
                )
                for (h, c) in pairs
            )
            for j in acts
        )
        return Outcome.SATISFIED if ok else Outcome.VIOLATED

    def combine(*outcomes: Outcome) -> Outcome:
        if any(o is Outcome.VIOLATED for o in outcomes):
            return Outcome.VIOLATED
        if all(o is Outcome.VACUOUS for o in outcomes):
            return Outcome.VACUOUS
        return Outcome.SATISFIED

    if t is Template.INIT:
        return Outcome.SATISFIED if n and event_matches(1, act, clause.all_variant) else Outcome.VIOLATED
    if t is Template.END:
        return Outcome.SATISFIED if n and event_matches(n, act, clause.all_variant) else Outcome.VIOLATED
    if t is Template.EXISTS:
        return exists_outcome(act, clause.all_variant)
    if t is Template.ABSENCE:
        if clause.all_variant:
            matched = any(event_matches(j, act, True) for j in range(1, n + 1))
        else:
            matched = any(_o_sat(c, act) for (_, c) in pairs)
        return Outcome.VIOLATED if matched else Outcome.SATISFIED
    if t is Template.CHOICE:
        return Outcome(max(exists_outcome(act, False), exists_outcome(tgt, False)))
    if t is Template.EXCL_CHOICE:
        left, right = exists_outcome(act, False), exists_outcome(tgt, False)
        if (left is Outcome.SATISFIED) != (right is Outcome.SATISFIED):
            return Outcome.SATISFIED
        if left is Outcome.SATISFIED and right is Outcome.SATISFIED:
            return Outcome.VIOLATED
        if left is Outcome.VACUOUS and right is Outcome.VACUOUS:
            return Outcome.VACUOUS
        return Outcome.VIOLATED
    if t is Template.RESP_EXISTENCE:
        return resp_existence(act, tgt)
    if t is Template.CO_EXISTENCE:
        return combine(resp_existence(act, tgt), resp_existence(tgt, act))
    if t is Template.RESPONSE:
        return response(act, tgt, chain=False)
    if t is Template.CHAIN_RESPONSE:
        return response(act, tgt, chain=True)
    if t is Template.PRECEDENCE:
        return precedence(act, tgt)
    if t is Template.CHAIN_PRECEDENCE:
        return chain_precedence(act, tgt)
    if t is Template.SUCCESSION:
        return combine(precedence(act, tgt), response(act, tgt, chain=False))
    assert t is Template.CHAIN_SUCCESSION
    return combine(chain_precedence(tgt, act), response(act, tgt, chain=True))


# --- Rendering --------------------------------------------------------------


def _render_const(const) -> str:
    if isinstance(const, str):
        return repr(const)
    return repr(float(const))


def render_predicate(pred: DataPredicate) -> str:
    if pred.is_trivial:
        return "true"
    parts = [
        " ∧ ".join(f"{key} {_OP_SYMBOLS[op]} {_render_const(const)}" for key, op, const in conj)
        if conj
        else "true"
        for conj in pred.disjuncts
    ]
    if len(parts) == 1:
        return parts[0]
    return " ∨ ".join(f"({part})" for part in parts)


def render_clause(clause: Clause) -> str:
    name = ("All" if clause.all_variant else "") + clause.template.value
    args = [clause.activation[0]]
    if not clause.activation[1].is_trivial:
        args.append(render_predicate(clause.activation[1]))
    if clause.target is not None:
        args.append(clause.target[0])
        if not clause.target[1].is_trivial:
            args.append(render_predicate(clause.target[1]))
    return f"{name}({', '.join(args)})"
