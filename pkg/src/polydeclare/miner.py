"""Specification mining over class-segmented polyadic logs.

The miner probes every frequent label and label pair with the clause
templates, refines clauses with payload predicates where a decision tree
can separate the classes, and assembles the ternary trace × clause
embedding frame that the final classifier consumes.

Evidence for the four ordered binary templates is gathered per label pair
into an :class:`EvidenceStore`; activation payload trees are cached per
label because the activation set of a pair does not depend on its target
side (chain/response/precedence activations are all occurrences, chain
precedence only those after the first event).
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import cart
from .declare import (
    STAR,
    TRUE,
    Clause,
    DataPredicate,
    Outcome,
    Template,
    TraceIndex,
    evaluate,
    render_clause,
)
from .polylog import DtConstituent, PolyadicLog, kappa

__all__ = [
    "Record",
    "EvidenceStore",
    "EmbeddingFrame",
    "MinedSpecification",
    "SHORTHANDS",
    "frequent_itemsets",
    "generate_unary_clauses",
    "collect_chains",
    "collect_respprec",
    "reconstruct_outcome",
    "fill_in_dataframe",
    "refine_attempt",
    "unary_refine",
    "binary_refine",
    "mine_embedding",
    "learn_tree",
    "mine_specification",
]

# (trace id, activation constituent, target constituent); either constituent
# slot may be None: bare activations carry no target, the vacuous-violation
# records of Precedence carry no activation.
Record = tuple[str, DtConstituent | None, DtConstituent | None]

SHORTHANDS = ("cr", "cp", "r", "p")
_SHORT_TEMPLATE = {
    "cr": Template.CHAIN_RESPONSE,
    "cp": Template.CHAIN_PRECEDENCE,
    "r": Template.RESPONSE,
    "p": Template.PRECEDENCE,
}
_SYMMETRIC = frozenset(
    {Template.CHOICE, Template.EXCL_CHOICE, Template.CO_EXISTENCE}
)
_BINARY_ORDER = (
    Template.CHOICE,
    Template.EXCL_CHOICE,
    Template.RESP_EXISTENCE,
    Template.CO_EXISTENCE,
    Template.PRECEDENCE,
    Template.RESPONSE,
    Template.SUCCESSION,
    Template.CHAIN_PRECEDENCE,
    Template.CHAIN_RESPONSE,
    Template.CHAIN_SUCCESSION,
)


class EvidenceStore:
    """act/viol record sets per (class, template shorthand, ordered pair)."""

    def __init__(self) -> None:
        self._act: dict[tuple, set[Record]] = {}
        self._viol: dict[tuple, set[Record]] = {}

    def act(self, y: int, short: str, a: str, b: str) -> set[Record]:
        return self._act.get((y, short, a, b), set())

    def viol(self, y: int, short: str, a: str, b: str) -> set[Record]:
        return self._viol.get((y, short, a, b), set())

    def add_act(self, y: int, short: str, a: str, b: str, record: Record) -> None:
        self._act.setdefault((y, short, a, b), set()).add(record)

    def add_viol(self, y: int, short: str, a: str, b: str, record: Record) -> None:
        self._viol.setdefault((y, short, a, b), set()).add(record)

    def is_empty(self) -> bool:
        return not self._act and not self._viol


def reconstruct_outcome(
    store: EvidenceStore, y: int, short: str, a: str, b: str, trace_id: str
) -> Outcome:
    """Outcome implied by the records of one trace (the soundness reading)."""
    if any(rec[0] == trace_id for rec in store.viol(y, short, a, b)):
        return Outcome.VIOLATED
    if any(rec[0] == trace_id for rec in store.act(y, short, a, b)):
        return Outcome.SATISFIED
    return Outcome.VACUOUS


def _indexed(log: PolyadicLog | Sequence[TraceIndex]) -> list[TraceIndex]:
    if isinstance(log, PolyadicLog):
        return [TraceIndex(trace) for trace in log.traces]
    return list(log)


def collect_chains(
    store: EvidenceStore,
    y: int,
    a: str,
    b: str,
    poly: bool,
    log: PolyadicLog | Sequence[TraceIndex],
) -> None:
    """Record chain-response and chain-precedence evidence for (a, b)."""
    for index in _indexed(log):
        t = index.trace.id
        occ_b = index.occurrences(b)
        for j, act, _ in index.occurrences(a):
            span = act.span if poly else 1
            partners = [c for h, c, _ in occ_b if h == j + span]
            if partners:
                for c in partners:
                    store.add_act(y, "cr", a, b, (t, act, c))
            else:
                store.add_act(y, "cr", a, b, (t, act, None))
                store.add_viol(y, "cr", a, b, (t, act, None))
            if j > 1:
                store.add_act(y, "cp", a, b, (t, act, None))
                witnesses = [
                    c for h, c, _ in occ_b if h + (c.span if poly else 1) == j
                ]
                if witnesses:
                    for c in witnesses:
                        store.add_act(y, "cp", a, b, (t, act, c))
                else:
                    store.add_viol(y, "cp", a, b, (t, act, None))


def collect_respprec(
    store: EvidenceStore,
    y: int,
    a: str,
    b: str,
    poly: bool,
    log: PolyadicLog | Sequence[TraceIndex],
) -> None:
    """Record response and precedence evidence for (a, b).

    Logs without a single a-occurrence yield no records at all (vacuous
    satisfaction is not reported explicitly).
    """
    indexed = _indexed(log)
    if not any(index.occurrences(a) for index in indexed):
        return
    for index in indexed:
        t = index.trace.id
        occ_a = index.occurrences(a)
        occ_b = index.occurrences(b)
        if occ_a and not occ_b:
            for _, act, _ in occ_a:
                store.add_act(y, "r", a, b, (t, act, None))
                store.add_viol(y, "r", a, b, (t, act, None))
                store.add_act(y, "p", a, b, (t, act, None))
        elif occ_b and not occ_a:
            for _, tgt, _ in occ_b:
                store.add_viol(y, "p", a, b, (t, None, tgt))
        elif occ_a and occ_b:
            b_events = [h for h, _, _ in occ_b]  # ascending: events are scanned in order
            first_b = b_events[0]
            for j, act, _ in occ_a:
                span = act.span if poly else 1
                at = bisect_left(b_events, j + span)
                if at < len(b_events):
                    store.add_act(y, "r", a, b, (t, act, occ_b[at][1]))
                else:
                    store.add_act(y, "r", a, b, (t, act, None))
                    store.add_viol(y, "r", a, b, (t, act, None))
                store.add_act(y, "p", a, b, (t, act, None))
                if first_b <= j:
                    store.add_viol(y, "p", a, b, (t, act, None))


def fill_in_dataframe(marks: Iterable[Outcome]) -> int:
    """Collapse one trace's activation marks into a ternary cell."""
    marks = set(marks)
    if not marks or marks == {Outcome.VACUOUS}:
        return 0
    if Outcome.VIOLATED in marks:
        return -1
    return 1


class EmbeddingFrame:
    """Trace × clause matrix over {−1, 0, +1} plus the class column."""

    def __init__(self, rows: Sequence[tuple[int, str]]):
        self.rows: list[tuple[int, str]] = list(rows)
        if len(set(self.rows)) != len(self.rows):
            raise ValueError("frame rows must be unique (class, trace id) pairs")
        self._pos = {row: i for i, row in enumerate(self.rows)}
        self.clazz = np.array([y for y, _ in self.rows], dtype=np.int64)
        self.columns: dict[Clause, np.ndarray] = {}

    def add_column(self, clause: Clause, cells: Mapping[tuple[int, str], int]) -> None:
        if clause in self.columns:
            raise ValueError(f"duplicate frame column: {render_clause(clause)}")
        column = np.zeros(len(self.rows), dtype=np.int8)
        for row, value in cells.items():
            column[self._pos[row]] = value
        self.columns[clause] = column

    def cell(self, clause: Clause, row: tuple[int, str]) -> int:
        return int(self.columns[clause][self._pos[row]])

    def matrix(self, order: Sequence[Clause]) -> np.ndarray:
        if not order:
            return np.zeros((len(self.rows), 0), dtype=np.int8)
        return np.stack([self.columns[c] for c in order], axis=1)


@dataclass(frozen=True, slots=True)
class MinedSpecification:
    clauses: tuple[Clause, ...]
    frame: EmbeddingFrame
    tree: cart.TrainedTree


def _present_labels(index: TraceIndex) -> set[str]:
    """Labels and roots observable in one trace (raw marker excluded)."""
    out: set[str] = set()
    for label in index._by_label:
        if label != "__raw_data":
            out.add(label)
    out.update(index._by_root)
    return out


def frequent_itemsets(log: PolyadicLog, theta: float) -> dict[frozenset, float]:
    """Supports of all 1- and 2-itemsets meeting the threshold.

    Support of an itemset is the fraction of traces whose events contain all
    its labels, taxonomy matching included.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"support threshold must lie in [0, 1], got {theta}")
    presents = [_present_labels(TraceIndex(trace)) for trace in log.traces]
    n = len(presents)
    if n == 0:
        return {}
    counts: dict[frozenset, int] = {}
    for present in presents:
        ordered = sorted(present)
        for i, a in enumerate(ordered):
            counts[frozenset((a,))] = counts.get(frozenset((a,)), 0) + 1
            for b in ordered[i + 1 :]:
                key = frozenset((a, b))
                counts[key] = counts.get(key, 0) + 1
    return {
        itemset: count / n for itemset, count in counts.items() if count / n >= theta
    }


def generate_unary_clauses(
    log: PolyadicLog | Sequence[TraceIndex],
    itemsets: Mapping[frozenset, float],
    alphabet: Sequence[str],
) -> tuple[list[tuple[str, str]], list[Clause]]:
    """Dataless unary candidates of one log plus its frequent ordered pairs.

    Init/End/Exists require the universal check to hold on every trace;
    Absence is emitted for alphabet labels the log never exhibits.
    """
    indexed = _indexed(log)
    presents = [_present_labels(index) for index in indexed]
    singles = sorted(next(iter(s)) for s in itemsets if len(s) == 1)
    clauses: list[Clause] = []
    for label in singles:
        slot = (label, TRUE)
        if indexed and all(
            _has_label_at(index, label, 1) for index in indexed
        ):
            clauses.append(Clause(Template.INIT, slot))
        if indexed and all(
            _has_label_at(index, label, len(index.trace.events)) for index in indexed
        ):
            clauses.append(Clause(Template.END, slot))
        if indexed and all(label in present for present in presents):
            clauses.append(Clause(Template.EXISTS, slot))
    observed = set().union(*presents) if presents else set()
    for label in sorted(alphabet):
        if label not in observed:
            clauses.append(Clause(Template.ABSENCE, (label, TRUE)))
    pairs: list[tuple[str, str]] = []
    for itemset in sorted(
        (tuple(sorted(s)) for s in itemsets if len(s) == 2)
    ):
        a, b = itemset
        pairs.append((a, b))
        pairs.append((b, a))
    return pairs, clauses


def _has_label_at(index: TraceIndex, label: str, j: int) -> bool:
    return any(h == j for h, _, _ in index.occurrences(label))


# --- Refinement -------------------------------------------------------------


def _stratified_split(
    labels: Sequence[int], fraction: float, seed: int
) -> tuple[list[int], list[int]]:
    """Seeded per-class index split; every class keeps at least one train row."""
    rng = np.random.default_rng(seed)
    by_class: dict[int, list[int]] = {}
    for i, y in enumerate(labels):
        by_class.setdefault(y, []).append(i)
    train: list[int] = []
    test: list[int] = []
    for y in sorted(by_class):
        indices = np.array(by_class[y])
        rng.shuffle(indices)
        n = len(indices)
        k = int(np.floor(fraction * n + 0.5))
        k = min(max(k, 1), n - 1) if n >= 2 else 1
        train.extend(int(i) for i in indices[:k])
        test.extend(int(i) for i in indices[k:])
    return train, test


def _tree_predicates(tree: cart.TrainedTree, formula_mode: str) -> list[DataPredicate]:
    """Path conjunctions followed by per-class formulas, deduplicated."""
    preds: list[DataPredicate] = [p.predicate for p in cart.paths(tree)]
    for klass in tree.classes:
        formula = cart.class_formula(tree, klass)
        if formula == cart.FALSE_PREDICATE:
            continue
        if formula_mode == "conjunction":
            # Literal pseudocode reading: conjoin the per-class paths.
            merged = tuple(atom for conj in formula.disjuncts for atom in conj)
            formula = DataPredicate((merged,))
        preds.append(formula)
    unique: list[DataPredicate] = []
    for pred in preds:
        if pred not in unique:
            unique.append(pred)
    return unique


def refine_attempt(
    rows: Sequence[tuple[Mapping[str, object], int]],
    collections: Sequence[tuple[int, str, Sequence[Mapping[str, object]]]],
    template: Template,
    n_classes: int,
    theta: float = 0.7,
    seed: int = 0,
    max_depth: int = 5,
    formula_mode: str = "disjunction",
) -> tuple[bool, dict[Clause, dict[tuple[int, str], int]]]:
    """Try to separate classes on payload rows; emit ±1 columns on success.

    ``collections`` holds, per (class, trace id), the κ-payload collection the
    template scopes (first event, last event, or whole trace).  For every
    extracted predicate π two columns appear: the all-variant is +1 when every
    payload in the collection satisfies π, the some-variant when at least one
    does.
    """
    if not rows:
        raise ValueError("refinement needs at least one payload row")
    if n_classes < 2:
        raise ValueError("refinement requires at least two classes")
    train_idx, test_idx = _stratified_split([y for _, y in rows], theta, seed)
    if not test_idx:
        return False, {}
    tree = cart.fit([rows[i] for i in train_idx], max_depth, seed)
    if cart.accuracy(tree, [rows[i] for i in test_idx]) <= 0.5:
        return False, {}
    columns: dict[Clause, dict[tuple[int, str], int]] = {}
    for pred in _tree_predicates(tree, formula_mode):
        for all_variant in (True, False):
            clause = Clause(template, (STAR, pred), all_variant=all_variant)
            cells = {}
            for y, trace_id, payloads in collections:
                if all_variant:
                    hit = all(pred.holds(p) for p in payloads)
                else:
                    hit = any(pred.holds(p) for p in payloads)
                cells[(y, trace_id)] = 1 if hit else -1
            columns[clause] = cells
    return True, columns


def _unary_collection(index: TraceIndex, template: Template) -> list[dict]:
    if template is Template.INIT:
        return [k for j, _, k in index.all_occurrences if j == 1]
    if template is Template.END:
        last = len(index.trace.events)
        return [k for j, _, k in index.all_occurrences if j == last]
    return [k for _, _, k in index.all_occurrences]


def unary_refine(
    per_log_clauses: Mapping[int, Sequence[Clause]],
    indexed_logs: Mapping[int, Sequence[TraceIndex]],
    max_depth: int = 5,
    seed: int = 0,
    formula_mode: str = "disjunction",
) -> dict[Clause, dict[tuple[int, str], int] | None]:
    """Resolve unary candidates into refined columns or dataless clauses.

    A template whose label family recurs in at least two logs triggers one
    global refinement attempt over the wildcard; failure falls back to the
    union of the dataless candidates.  Absence is never refined.
    """
    out: dict[Clause, dict[tuple[int, str], int] | None] = {}
    ys = sorted(per_log_clauses)
    for template in (Template.INIT, Template.END, Template.EXISTS):
        labels_by_log = {
            y: {c.activation[0] for c in per_log_clauses[y] if c.template is template}
            for y in ys
        }
        seen: dict[str, int] = {}
        shared = False
        for y in ys:
            for label in labels_by_log[y]:
                seen[label] = seen.get(label, 0) + 1
                if seen[label] >= 2:
                    shared = True
        dataless = [
            c
            for y in ys
            for c in per_log_clauses[y]
            if c.template is template
        ]
        if shared:
            rows: list[tuple[dict, int]] = []
            collections: list[tuple[int, str, list[dict]]] = []
            for y in ys:
                for index in indexed_logs[y]:
                    payloads = _unary_collection(index, template)
                    collections.append((y, index.trace.id, payloads))
                    rows.extend((payload, y) for payload in payloads)
            ok, columns = refine_attempt(
                rows,
                collections,
                template,
                n_classes=len(ys),
                seed=seed,
                max_depth=max_depth,
                formula_mode=formula_mode,
            )
            if ok:
                out.update(columns)
                continue
        for clause in dataless:
            out.setdefault(clause, None)
    for y in ys:
        for clause in per_log_clauses[y]:
            if clause.template is Template.ABSENCE:
                out.setdefault(clause, None)
    return out


class _ActivationTrees:
    """Cache of activation-payload trees, keyed (label, activation subset)."""

    def __init__(self, indexed_logs: Mapping[int, Sequence[TraceIndex]], max_depth: int, seed: int):
        self._logs = indexed_logs
        self._max_depth = max_depth
        self._seed = seed
        self._cache: dict[tuple[str, str], cart.TrainedTree | None] = {}

    def tree(self, label: str, kind: str) -> cart.TrainedTree | None:
        key = (label, kind)
        if key not in self._cache:
            rows: list[tuple[dict, int]] = []
            for y in sorted(self._logs):
                for index in self._logs[y]:
                    for j, _, payload in index.occurrences(label):
                        if kind == "gt1" and j <= 1:
                            continue
                        rows.append((payload, y))
            self._cache[key] = (
                cart.fit(rows, self._max_depth, self._seed) if rows else None
            )
        return self._cache[key]


def binary_refine(
    a: str,
    b: str,
    indexed_logs: Mapping[int, Sequence[TraceIndex]],
    poly: bool,
    act_trees: _ActivationTrees | None = None,
    max_depth: int = 5,
    seed: int = 0,
) -> dict[Clause, dict[tuple[int, str], int] | None]:
    """Refine the four ordered templates for both orders of a frequent pair.

    Per template: no activation evidence → the dataless clause; an activation
    tree pure enough → one refined clause per path with cells from the
    re-marked activations; otherwise the same with the paired targets; if
    both trees stay impure, back to the dataless clause.
    """
    if act_trees is None:
        act_trees = _ActivationTrees(indexed_logs, max_depth, seed)
    store = EvidenceStore()
    for y in sorted(indexed_logs):
        for first, second in ((a, b), (b, a)):
            collect_chains(store, y, first, second, poly, indexed_logs[y])
            collect_respprec(store, y, first, second, poly, indexed_logs[y])
    out: dict[Clause, dict[tuple[int, str], int] | None] = {}
    for first, second in ((a, b), (b, a)):
        for short in SHORTHANDS:
            template = _SHORT_TEMPLATE[short]
            dataless = Clause(template, (first, TRUE), (second, TRUE), poly=poly)
            acts_by_y = {
                y: store.act(y, short, first, second) for y in sorted(indexed_logs)
            }
            if not any(acts_by_y.values()):
                out[dataless] = None
                continue
            tree = act_trees.tree(first, "gt1" if short == "cp" else "all")
            if tree is not None and cart.purity(tree) > 0.5:
                out.update(
                    _refine_by_activations(
                        store, short, first, second, poly, indexed_logs, tree
                    )
                )
                continue
            target_rows = [
                (kappa(rec[2]), y)
                for y in sorted(indexed_logs)
                for rec in sorted(acts_by_y[y], key=_record_key)
                if rec[1] is not None and rec[2] is not None
            ]
            if not target_rows:
                out[dataless] = None
                continue
            tgt_tree = cart.fit(target_rows, max_depth, seed)
            if cart.purity(tgt_tree) > 0.5:
                out.update(
                    _refine_by_targets(
                        store, short, first, second, poly, indexed_logs, tgt_tree
                    )
                )
            else:
                out[dataless] = None
    return out


def _record_key(record: Record):
    t, act, tgt = record
    return (
        t,
        ("", 0, 0) if act is None else (act.label, act.start, act.span),
        ("", 0, 0) if tgt is None else (tgt.label, tgt.start, tgt.span),
    )


def _refine_by_activations(
    store: EvidenceStore,
    short: str,
    a: str,
    b: str,
    poly: bool,
    indexed_logs: Mapping[int, Sequence[TraceIndex]],
    tree: cart.TrainedTree,
) -> dict[Clause, dict[tuple[int, str], int]]:
    template = _SHORT_TEMPLATE[short]
    out: dict[Clause, dict[tuple[int, str], int]] = {}
    for path in cart.paths(tree):
        pred = path.predicate
        clause = Clause(template, (a, pred), (b, TRUE), poly=poly)
        cells: dict[tuple[int, str], int] = {}
        for y in sorted(indexed_logs):
            act_records = store.act(y, short, a, b)
            viol_records = store.viol(y, short, a, b)
            violated = {
                (rec[0], rec[1]) for rec in viol_records if rec[1] is not None
            }
            marks: dict[str, set[Outcome]] = {}
            for rec in act_records:
                t, activation, _ = rec
                bucket = marks.setdefault(t, set())
                if activation is None:
                    continue
                if not pred.holds(kappa(activation)):
                    bucket.add(Outcome.VACUOUS)
                elif (t, activation) in violated:
                    bucket.add(Outcome.VIOLATED)
                else:
                    bucket.add(Outcome.SATISFIED)
            for rec in viol_records:
                if rec[1] is None:  # targets with no activation violate regardless of π
                    marks.setdefault(rec[0], set()).add(Outcome.VIOLATED)
            for t, bucket in marks.items():
                cells[(y, t)] = fill_in_dataframe(bucket)
        out[clause] = cells
    return out


def _refine_by_targets(
    store: EvidenceStore,
    short: str,
    a: str,
    b: str,
    poly: bool,
    indexed_logs: Mapping[int, Sequence[TraceIndex]],
    tree: cart.TrainedTree,
) -> dict[Clause, dict[tuple[int, str], int]]:
    template = _SHORT_TEMPLATE[short]
    out: dict[Clause, dict[tuple[int, str], int]] = {}
    for path in cart.paths(tree):
        pred = path.predicate
        clause = Clause(template, (a, TRUE), (b, pred), poly=poly)
        cells: dict[tuple[int, str], int] = {}
        for y in sorted(indexed_logs):
            act_records = store.act(y, short, a, b)
            viol_records = store.viol(y, short, a, b)
            witnesses: dict[tuple[str, DtConstituent], list[DtConstituent]] = {}
            bare: set[tuple[str, DtConstituent]] = set()
            for t, activation, target in act_records:
                if activation is None:
                    continue
                if target is None:
                    bare.add((t, activation))
                else:
                    witnesses.setdefault((t, activation), []).append(target)
            marks: dict[str, set[Outcome]] = {}
            for (t, activation), targets in witnesses.items():
                ok = any(pred.holds(kappa(target)) for target in targets)
                marks.setdefault(t, set()).add(
                    Outcome.SATISFIED if ok else Outcome.VIOLATED
                )
            for t, activation in bare:
                if (t, activation) not in witnesses:
                    marks.setdefault(t, set()).add(Outcome.VIOLATED)
            for rec in viol_records:
                if rec[1] is None:
                    marks.setdefault(rec[0], set()).add(Outcome.VIOLATED)
            for t, bucket in marks.items():
                cells[(y, t)] = fill_in_dataframe(bucket)
        out[clause] = cells
    return out


# --- End-to-end mining ------------------------------------------------------


def _alphabet(segmented: Mapping[int, PolyadicLog]) -> tuple[list[str], dict[str, str]]:
    """Global label universe (roots ∪ leaves) and label → root resolution."""
    labels: set[str] = set()
    home: dict[str, str] = {}
    for log in segmented.values():
        for tax in log.taxonomies:
            labels.add(tax.root)
            home[tax.root] = tax.root
            for leaf in tax.leaves:
                labels.add(leaf)
                home[leaf] = tax.root
    return sorted(labels), home


def mine_embedding(
    segmented: Mapping[int, PolyadicLog],
    theta: float = 0.0,
    max_depth: int = 5,
    seed: int = 0,
    chain_adjacency_leq: bool = False,
    formula_mode: str = "disjunction",
) -> tuple[tuple[Clause, ...], EmbeddingFrame]:
    """Run clause generation, refinement, and frame filling (Φ and cells)."""
    if not segmented:
        raise ValueError("mining needs at least one class log")
    ys = sorted(segmented)
    indexed_logs = {
        y: [TraceIndex(trace) for trace in segmented[y].traces] for y in ys
    }
    rows = [(y, index.trace.id) for y in ys for index in indexed_logs[y]]
    frame = EmbeddingFrame(rows)
    alphabet, home = _alphabet(segmented)

    per_log_clauses: dict[int, list[Clause]] = {}
    pair_logs: dict[tuple[str, str], set[int]] = {}
    for y in ys:
        itemsets = frequent_itemsets(segmented[y], theta)
        pairs, clauses = generate_unary_clauses(indexed_logs[y], itemsets, alphabet)
        per_log_clauses[y] = clauses
        for pair in pairs:
            a, b = pair
            if a <= b:
                pair_logs.setdefault((a, b), set()).add(y)

    columns = unary_refine(
        per_log_clauses,
        indexed_logs,
        max_depth=max_depth,
        seed=seed,
        formula_mode=formula_mode,
    )

    act_trees = _ActivationTrees(indexed_logs, max_depth, seed)
    for (a, b), logs_with in sorted(pair_logs.items()):
        poly = home.get(a) is not None and home.get(a) == home.get(b)
        if len(logs_with) == 1:
            for template in _BINARY_ORDER:
                orders = [(a, b)] if template in _SYMMETRIC else [(a, b), (b, a)]
                for first, second in orders:
                    clause = Clause(
                        template, (first, TRUE), (second, TRUE), poly=poly
                    )
                    columns.setdefault(clause, None)
        else:
            for clause, cells in binary_refine(
                a,
                b,
                indexed_logs,
                poly,
                act_trees=act_trees,
                max_depth=max_depth,
                seed=seed,
            ).items():
                columns.setdefault(clause, cells)

    ordered = sorted(columns, key=render_clause)
    renders = [render_clause(c) for c in ordered]
    if len(set(renders)) != len(renders):
        raise ValueError("clause renderings collide; frame keys would be ambiguous")

    for clause in ordered:
        cells = columns[clause]
        if cells is None:
            cells = {}
            for y in ys:
                for index in indexed_logs[y]:
                    outcome = evaluate(
                        clause, index, chain_adjacency_leq=chain_adjacency_leq
                    )
                    cells[(y, index.trace.id)] = int(outcome)
        frame.add_column(clause, cells)
    return tuple(ordered), frame


def learn_tree(
    clauses: Sequence[Clause], frame: EmbeddingFrame, max_depth: int, seed: int = 0
) -> cart.TrainedTree:
    keys = [render_clause(c) for c in clauses]
    order = np.argsort(keys)  # fit_ternary wants ascending column keys
    ordered_clauses = [clauses[i] for i in order]
    matrix = frame.matrix(ordered_clauses)
    return cart.fit_ternary(
        matrix, [keys[i] for i in order], [int(y) for y in frame.clazz], max_depth, seed
    )


def mine_specification(
    segmented: Mapping[int, PolyadicLog],
    theta: float = 0.0,
    max_depth: int = 5,
    seed: int = 0,
    chain_adjacency_leq: bool = False,
    formula_mode: str = "disjunction",
) -> MinedSpecification:
    """Full mining pass: clauses, embedding frame, and the class tree."""
    clauses, frame = mine_embedding(
        segmented,
        theta=theta,
        max_depth=max_depth,
        seed=seed,
        chain_adjacency_leq=chain_adjacency_leq,
        formula_mode=formula_mode,
    )
    tree = learn_tree(clauses, frame, max_depth, seed)
    return MinedSpecification(clauses, frame, tree)
