"""polydeclare: trend-constituent specification mining for time-series classification.

Numeric multivariate series are discretized into polyadic event logs of
data-trend constituents; class-segmented logs are mined for dataful clause
specifications; a decision tree over the ternary clause-satisfaction
embedding classifies segments and reads back out as per-class formulas.
"""

from __future__ import annotations

from .errors import ConfigError, DatasetError, PolyDeclareError, SchemaError
from .timeseries import (
    ClassSegment,
    Dataset,
    Interval,
    MultivariateSeries,
    class_segments,
    load_dataset,
    maximal_intervals,
    maximal_runs,
    project,
)
from .discretizer import (
    DEFAULT_EPSILON,
    SatisfactionIndex,
    VariationKind,
    build_indices,
    index_contains,
    variation_domain,
    variation_predicate,
    variation_profile,
    variation_value,
)
from .features import (
    CATCH22_NAMES,
    FEATURE_NAMES,
    active_backend,
    feature_payload,
    feature_vector,
)
from .polylog import (
    RAW_LABEL,
    DtConstituent,
    PolyadicEvent,
    PolyadicLog,
    PolyadicTrace,
    Taxonomy,
    deserialize,
    kappa,
    log_from_traces,
    prune_redundant,
    segment_by_class,
    serialize,
)
from .dtminer import DtPatternClass, dt_label, dt_mine
from .declare import (
    STAR,
    TRUE,
    Clause,
    DataPredicate,
    Outcome,
    Template,
    TraceIndex,
    evaluate,
    oracle_evaluate,
    render_clause,
    render_predicate,
)
from .miner import (
    EmbeddingFrame,
    EvidenceStore,
    MinedSpecification,
    mine_specification,
)
from .pipeline import PipelineConfig, compute_metrics, run_eval, run_explain, run_train

__version__ = "1.0.0"

__all__ = [
    "__version__",
    # errors
    "PolyDeclareError", "DatasetError", "SchemaError", "ConfigError",
    # time series
    "Interval", "MultivariateSeries", "ClassSegment", "Dataset",
    "load_dataset", "project", "class_segments", "maximal_runs", "maximal_intervals",
    # discretization
    "VariationKind", "DEFAULT_EPSILON", "SatisfactionIndex",
    "variation_value", "variation_predicate", "variation_profile",
    "variation_domain", "build_indices", "index_contains",
    # features
    "CATCH22_NAMES", "FEATURE_NAMES", "active_backend", "feature_vector", "feature_payload",
    # polyadic logs
    "RAW_LABEL", "DtConstituent", "PolyadicEvent", "PolyadicTrace",
    "Taxonomy", "PolyadicLog", "kappa", "prune_redundant",
    "log_from_traces", "segment_by_class", "serialize", "deserialize",
    # DT mining
    "DtPatternClass", "dt_label", "dt_mine",
    # clauses
    "STAR", "TRUE", "Outcome", "Template", "DataPredicate", "Clause",
    "TraceIndex", "evaluate", "oracle_evaluate", "render_clause", "render_predicate",
    # specification mining
    "EvidenceStore", "EmbeddingFrame", "MinedSpecification", "mine_specification",
    # pipeline
    "PipelineConfig", "run_train", "run_eval", "run_explain", "compute_metrics",
]
