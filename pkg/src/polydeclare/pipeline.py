"""End-to-end orchestration: dataset → polyadic log → model bundle → metrics.

The train path runs six timed phases (load_index, dt_mine, serialize,
segment, mine_embed, learn).  Timings are reported separately and never
enter the model bundle, so two runs with identical inputs and seeds produce
byte-identical bundles regardless of wall-clock noise or worker count.

The model bundle is a single JSON document: the mined clause list, the
trained decision tree, and the configuration that shaped them.  Classes are
carried as the dense indices used throughout the pipeline; evaluation maps
them back to the dataset's original names for reporting.
"""

from __future__ import annotations

import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass
from time import perf_counter
from typing import Mapping, Sequence

import numpy as np

from . import cart
from .declare import (
    Clause,
    DataPredicate,
    Template,
    TraceIndex,
    evaluate,
    render_clause,
)
from .discretizer import build_indices
from .errors import ConfigError, DatasetError, SchemaError
from .dtminer import dt_mine
from .miner import EmbeddingFrame, MinedSpecification, learn_tree, mine_embedding
from .polylog import PolyadicLog, log_from_traces, prune_redundant, segment_by_class, serialize, deserialize
from .timeseries import Dataset, load_dataset

__all__ = [
    "PHASES",
    "BUNDLE_VERSION",
    "PipelineConfig",
    "split_segment_ids",
    "discretize_to_log",
    "predicate_to_obj",
    "predicate_from_obj",
    "clause_to_obj",
    "clause_from_obj",
    "make_bundle",
    "bundle_bytes",
    "run_train",
    "run_discretize",
    "run_mine",
    "run_eval",
    "run_explain",
    "compute_metrics",
]

PHASES = ("load_index", "dt_mine", "serialize", "segment", "mine_embed", "learn")
BUNDLE_VERSION = 1
FORMATS = ("long_csv", "json_dir")


@dataclass(frozen=True, slots=True)
class PipelineConfig:
    """Knobs shared by every pipeline entry point."""

    epsilon: float = 1e-4
    theta: float = 0.0
    max_depth: int = 5
    train_fraction: float = 0.7
    seed: int = 0
    jobs: int = 1
    format: str = "long_csv"

    def __post_init__(self) -> None:
        if not self.epsilon > 0.0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 <= self.theta <= 1.0:
            raise ConfigError(f"theta must lie in [0, 1], got {self.theta}")
        if self.max_depth < 0:
            raise ConfigError(f"max-depth must be >= 0, got {self.max_depth}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(
                f"split fraction must lie in (0, 1), got {self.train_fraction}"
            )
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if self.format not in FORMATS:
            raise ConfigError(
                f"format must be one of {', '.join(FORMATS)}; got {self.format!r}"
            )


def _pool(config: PipelineConfig):
    if config.jobs > 1:
        return ThreadPoolExecutor(max_workers=config.jobs)
    return nullcontext(None)


def split_segment_ids(
    segmented: Mapping[int, PolyadicLog], fraction: float, seed: int
) -> tuple[set[str], set[str]]:
    """Stratified train/test segment ids, derived only from (log, seed, fraction).

    Evaluation recomputes this split on the full segmented log, so train and
    eval agree on held-out segments without the bundle having to carry them.
    Every class keeps at least one training segment.
    """
    rng = np.random.default_rng(seed)
    train: set[str] = set()
    test: set[str] = set()
    for y in sorted(segmented):
        ids = [trace.id for trace in segmented[y].traces]
        order = rng.permutation(len(ids))
        n = len(ids)
        k = min(max(int(np.floor(fraction * n + 0.5)), 1), n - 1) if n >= 2 else 1
        chosen = {ids[i] for i in order[:k]}
        train |= chosen
        test |= set(ids) - chosen
    return train, test


def discretize_to_log(dataset: Dataset, config: PipelineConfig, timings: dict) -> PolyadicLog:
    """Index, mine DT constituents, and assemble the pruned full-dataset log."""
    started = perf_counter()
    indices = {s.id: build_indices(s, config.epsilon) for s in dataset.series}
    timings["load_index"] = timings.get("load_index", 0.0) + perf_counter() - started
    started = perf_counter()
    with _pool(config) as pool:
        traces = [
            prune_redundant(dt_mine(series, indices[series.id], pool))
            for series in dataset.series
        ]
    log = log_from_traces(traces)
    timings["dt_mine"] = perf_counter() - started
    return log


def _load(dataset_path, config: PipelineConfig, timings: dict) -> Dataset:
    started = perf_counter()
    dataset = load_dataset(dataset_path, config.format)
    if not dataset.series:
        raise DatasetError("dataset contains no series", source=str(dataset_path))
    timings["load_index"] = perf_counter() - started
    return dataset


def _segment_split(
    log: PolyadicLog, config: PipelineConfig, timings: dict
) -> tuple[dict[int, PolyadicLog], set[str], set[str]]:
    started = perf_counter()
    segmented = segment_by_class(log)
    train_ids, test_ids = split_segment_ids(
        segmented, config.train_fraction, config.seed
    )
    timings["segment"] = perf_counter() - started
    return segmented, train_ids, test_ids


def _restrict(
    segmented: Mapping[int, PolyadicLog], keep: set[str]
) -> dict[int, PolyadicLog]:
    """Per-class logs filtered to the given segment ids; taxonomies untouched."""
    return {
        y: PolyadicLog(
            log.taxonomies,
            tuple(trace for trace in log.traces if trace.id in keep),
        )
        for y, log in segmented.items()
    }


def _mine_and_learn(
    segmented: Mapping[int, PolyadicLog],
    train_ids: set[str],
    config: PipelineConfig,
    timings: dict,
) -> MinedSpecification:
    train_logs = _restrict(segmented, train_ids)
    started = perf_counter()
    clauses, frame = mine_embedding(
        train_logs,
        theta=config.theta,
        max_depth=config.max_depth,
        seed=config.seed,
    )
    timings["mine_embed"] = perf_counter() - started
    if not clauses:
        warnings.warn(
            "mined an empty clause set; the model degenerates to the majority class",
            RuntimeWarning,
            stacklevel=2,
        )
    started = perf_counter()
    tree = learn_tree(clauses, frame, config.max_depth, config.seed)
    timings["learn"] = perf_counter() - started
    return MinedSpecification(clauses, frame, tree)


# --- Model bundle (de)serialization ----------------------------------------


def predicate_to_obj(pred: DataPredicate) -> list:
    return [[list(atom) for atom in conj] for conj in pred.disjuncts]


def predicate_from_obj(obj, path: str) -> DataPredicate:
    if not isinstance(obj, list):
        raise SchemaError("predicate must be a list of conjunctions", path=path)
    disjuncts = []
    for i, conj in enumerate(obj):
        if not isinstance(conj, list):
            raise SchemaError("conjunction must be a list", path=f"{path}[{i}]")
        atoms = []
        for j, atom in enumerate(conj):
            if not (isinstance(atom, list) and len(atom) == 3):
                raise SchemaError(
                    "atom must be a [key, op, constant] triple", path=f"{path}[{i}][{j}]"
                )
            key, op, const = atom
            atoms.append((key, op, const))
        disjuncts.append(tuple(atoms))
    try:
        return DataPredicate(tuple(disjuncts))
    except ValueError as exc:
        raise SchemaError(str(exc), path=path) from exc


def clause_to_obj(clause: Clause) -> dict:
    obj = {
        "template": clause.template.value,
        "activation": {
            "label": clause.activation[0],
            "predicate": predicate_to_obj(clause.activation[1]),
        },
        "target": None,
        "all_variant": clause.all_variant,
        "poly": clause.poly,
    }
    if clause.target is not None:
        obj["target"] = {
            "label": clause.target[0],
            "predicate": predicate_to_obj(clause.target[1]),
        }
    return obj


def clause_from_obj(obj, path: str) -> Clause:
    if not isinstance(obj, dict):
        raise SchemaError("clause must be an object", path=path)
    try:
        template = Template(obj.get("template"))
    except ValueError as exc:
        raise SchemaError(
            f"unknown template {obj.get('template')!r}", path=f"{path}.template"
        ) from exc

    def slot(part, part_path):
        if not (isinstance(part, dict) and isinstance(part.get("label"), str)):
            raise SchemaError("slot needs a string label", path=part_path)
        return (
            part["label"],
            predicate_from_obj(part.get("predicate", []), f"{part_path}.predicate"),
        )

    activation = slot(obj.get("activation"), f"{path}.activation")
    target = None
    if obj.get("target") is not None:
        target = slot(obj["target"], f"{path}.target")
    try:
        return Clause(
            template,
            activation,
            target,
            all_variant=bool(obj.get("all_variant", False)),
            poly=bool(obj.get("poly", True)),
        )
    except ValueError as exc:
        raise SchemaError(str(exc), path=path) from exc


def make_bundle(config: PipelineConfig, spec: MinedSpecification) -> dict:
    """The hashable model artifact; no timings, worker counts, or file paths."""
    return {
        "bundle_version": BUNDLE_VERSION,
        "config": {
            "epsilon": config.epsilon,
            "theta": config.theta,
            "max_depth": config.max_depth,
            "train_fraction": config.train_fraction,
            "seed": config.seed,
        },
        "clauses": [clause_to_obj(c) for c in spec.clauses],
        "tree": cart.to_json(spec.tree),
    }


def bundle_bytes(bundle: dict) -> bytes:
    return json.dumps(
        bundle, sort_keys=True, ensure_ascii=False, separators=(",", ":")
    ).encode("utf-8")


def _bundle_config(bundle: dict) -> PipelineConfig:
    if not isinstance(bundle, dict) or "config" not in bundle:
        raise SchemaError("model bundle must carry a config object", path="$.config")
    cfg = bundle["config"]
    try:
        return PipelineConfig(
            epsilon=cfg["epsilon"],
            theta=cfg["theta"],
            max_depth=cfg["max_depth"],
            train_fraction=cfg["train_fraction"],
            seed=cfg["seed"],
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad bundle config: {exc}", path="$.config") from exc


def load_bundle(data: bytes) -> dict:
    try:
        bundle = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"model bundle is not valid JSON: {exc}") from exc
    if not isinstance(bundle, dict):
        raise SchemaError("model bundle must be a JSON object")
    if bundle.get("bundle_version") != BUNDLE_VERSION:
        raise SchemaError(
            f"unsupported bundle version {bundle.get('bundle_version')!r}",
            path="$.bundle_version",
        )
    return bundle


# --- Entry points -----------------------------------------------------------


def run_train(dataset_path, config: PipelineConfig) -> tuple[dict, dict]:
    """Full training pass; returns (model bundle, per-phase seconds)."""
    timings: dict[str, float] = {}
    dataset = _load(dataset_path, config, timings)
    log = discretize_to_log(dataset, config, timings)
    started = perf_counter()
    serialize(log)  # measured for phase parity; cmd_discretize emits these bytes
    timings["serialize"] = perf_counter() - started
    segmented, train_ids, _ = _segment_split(log, config, timings)
    spec = _mine_and_learn(segmented, train_ids, config, timings)
    return make_bundle(config, spec), timings


def run_discretize(dataset_path, config: PipelineConfig) -> tuple[bytes, dict]:
    """Dataset → serialized full-dataset polyadic log."""
    timings: dict[str, float] = {}
    dataset = _load(dataset_path, config, timings)
    log = discretize_to_log(dataset, config, timings)
    started = perf_counter()
    payload = serialize(log)
    timings["serialize"] = perf_counter() - started
    return payload, timings


def run_mine(log_data: bytes, config: PipelineConfig) -> tuple[dict, dict]:
    """Serialized polyadic log → model bundle (the back half of training)."""
    timings: dict[str, float] = {}
    log = deserialize(log_data)
    segmented, train_ids, _ = _segment_split(log, config, timings)
    spec = _mine_and_learn(segmented, train_ids, config, timings)
    return make_bundle(config, spec), timings


def run_eval(bundle: dict, dataset_path, data_format: str, jobs: int = 1) -> dict:
    """Score the bundle's held-out split of a dataset; returns the metrics dict.

    Discretization, segmentation, and the stratified split all reuse the
    bundle's stored configuration, so the held-out segments are exactly those
    the training run never saw.
    """
    config = _bundle_config(bundle)
    config = PipelineConfig(
        epsilon=config.epsilon,
        theta=config.theta,
        max_depth=config.max_depth,
        train_fraction=config.train_fraction,
        seed=config.seed,
        jobs=jobs,
        format=data_format,
    )
    timings: dict[str, float] = {}
    dataset = _load(dataset_path, config, timings)
    log = discretize_to_log(dataset, config, timings)
    segmented, _, test_ids = _segment_split(log, config, timings)
    clauses = [
        clause_from_obj(obj, f"$.clauses[{i}]")
        for i, obj in enumerate(bundle.get("clauses", []))
    ]
    tree = cart.from_json(bundle["tree"])
    truth: list[int] = []
    predicted: list[int] = []
    for y in sorted(segmented):
        for trace in segmented[y].traces:
            if trace.id not in test_ids:
                continue
            index = TraceIndex(trace)
            row = {
                render_clause(c): float(int(evaluate(c, index))) for c in clauses
            }
            truth.append(y)
            predicted.append(cart.predict(tree, row))
    return compute_metrics(
        truth, predicted, class_names=dataset.class_names, model_classes=tree.classes
    )


def compute_metrics(
    truth: Sequence[int],
    predicted: Sequence[int],
    class_names: Sequence[str] = (),
    model_classes: Sequence[int] = (),
) -> dict:
    """Micro accuracy, macro precision/recall/F1, confusion, unseen classes.

    Macro averages stay macro for two classes as well; a class never produced
    by the model can only contribute errors and is flagged.
    """
    if len(truth) != len(predicted):
        raise ValueError("truth and prediction lengths differ")
    classes = sorted(set(truth) | set(predicted))

    def name(y: int) -> str:
        return class_names[y] if 0 <= y < len(class_names) else str(y)

    n = len(truth)
    pos = {y: i for i, y in enumerate(classes)}
    matrix = [[0] * len(classes) for _ in classes]
    for t, p in zip(truth, predicted):
        matrix[pos[t]][pos[p]] += 1
    correct = sum(matrix[i][i] for i in range(len(classes)))
    per_class = {}
    precisions, recalls, f1s = [], [], []
    for i, y in enumerate(classes):
        tp = matrix[i][i]
        fp = sum(matrix[r][i] for r in range(len(classes))) - tp
        fn = sum(matrix[i]) - tp
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        precisions.append(precision)
        recalls.append(recall)
        f1s.append(f1)
        per_class[name(y)] = {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "support": sum(matrix[i]),
        }
    known = set(model_classes) if model_classes else set(classes)
    unseen = sorted(set(truth) - known)
    return {
        "n_segments": n,
        "accuracy": correct / n if n else 0.0,
        "precision_macro": float(np.mean(precisions)) if precisions else 0.0,
        "recall_macro": float(np.mean(recalls)) if recalls else 0.0,
        "f1_macro": float(np.mean(f1s)) if f1s else 0.0,
        "per_class": per_class,
        "confusion": {"labels": [name(y) for y in classes], "matrix": matrix},
        "unseen_classes": [name(y) for y in unseen],
    }


# --- Explanations -----------------------------------------------------------

_ATOM_WORDING = {
    ("<=", -0.5): "violated",
    (">", -0.5): "not violated",
    ("<=", 0.0): "violated",
    (">", 0.0): "satisfied",
    ("<=", 0.5): "not satisfied",
    (">", 0.5): "satisfied",
}


def _atom_text(atom) -> str:
    key, op, const = atom
    wording = None
    if isinstance(const, (int, float)):
        wording = _ATOM_WORDING.get((op, float(const)))
    if wording is None:
        return f"{key} {op} {const}"
    return f"{key} = {wording}"


def run_explain(bundle: dict) -> str:
    """Per-class propositional reading of the trained tree's paths."""
    tree = cart.from_json(bundle["tree"])
    lines: list[str] = []
    if isinstance(tree.root, cart.Leaf):
        only = tree.root.klass
        lines.append(
            f"model always predicts class {only}: "
            "no clause separated the classes on the training split"
        )
        return "\n".join(lines)
    for y in tree.classes:
        lines.append(f"class {y}:")
        formula = cart.class_formula(tree, y)
        if formula == cart.FALSE_PREDICATE:
            lines.append("  (never predicted)")
            continue
        for conj in formula.disjuncts:
            if not conj:
                lines.append("  - always")
            else:
                lines.append("  - " + " ∧ ".join(_atom_text(a) for a in conj))
    return "\n".join(lines)
