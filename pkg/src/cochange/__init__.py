"""Mine version-control history into co-change graphs, change/co-change
entropy, process metrics, and defect-prediction datasets."""

from .config import ProjectConfig, load_config
from .datasets import DefectLabelRecord, emit_experiment, join_and_label, load_labels
from .entropy import (
    EntropyReport,
    attribute_entropy,
    change_probabilities,
    entropy_report,
    shannon_entropy,
)
from .errors import (
    CochangeError,
    ConfigError,
    DegenerateInputError,
    ParseError,
    ValidationError,
)
from .graph import CoChangeGraph, build_graph
from .history import (
    ChangeHistory,
    Commit,
    FileChange,
    ReleaseSpec,
    assign_release_windows,
    filter_fatty,
    filter_merges,
    filter_source_files,
    load_releases,
    parse_change_log,
    write_change_log,
)
from .metrics import FileMetricsRow, MetricTable, build_metric_set, compute_row, compute_rows
from .stats import (
    NemenyiResult,
    StatResult,
    correlate_metric_vs_defects,
    friedman,
    nemenyi,
    pearson,
    spearman,
)

__version__ = "0.1.0"

__all__ = [
    "ChangeHistory", "CoChangeGraph", "CochangeError", "Commit", "ConfigError",
    "DefectLabelRecord", "DegenerateInputError", "EntropyReport", "FileChange",
    "FileMetricsRow", "MetricTable", "NemenyiResult", "ParseError", "ProjectConfig",
    "ReleaseSpec", "StatResult", "ValidationError", "assign_release_windows",
    "attribute_entropy", "build_graph", "build_metric_set", "change_probabilities",
    "compute_row", "compute_rows", "correlate_metric_vs_defects", "emit_experiment",
    "entropy_report", "filter_fatty", "filter_merges", "filter_source_files",
    "friedman", "join_and_label", "load_config", "load_labels", "load_releases",
    "nemenyi", "parse_change_log", "pearson", "shannon_entropy", "spearman",
    "write_change_log",
]
