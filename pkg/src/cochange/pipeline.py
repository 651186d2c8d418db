"""Stage orchestration shared by the CLI subcommands.

Each run_* function reads the raw inputs named by the config, computes one
stage, and writes its CSV outputs under `<outdir>/<project>/`. Stages
recompute from the raw inputs rather than from intermediate files, so any
stage can run standalone and reruns are byte-identical.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, IO

from .config import ProjectConfig
from .datasets import join_and_label, load_labels
from .entropy import MEASURES, EntropyReport, entropy_report, write_entropy_csv, zero_report
from .errors import ConfigError, DegenerateInputError, ValidationError
from .graph import CoChangeGraph, build_graph, write_edge_list
from .history import (
    ChangeHistory,
    Commit,
    assign_release_windows,
    filter_fatty,
    filter_merges,
    filter_source_files,
    load_releases,
    parse_change_log,
    write_change_log,
)
from .metrics import FileMetricsRow, METRIC_SETS, compute_rows, write_metrics_csv
from .stats import correlate_metric_vs_defects, friedman, nemenyi
from .datasets import emit_experiment

logger = logging.getLogger("cochange")

RESULT_COLUMNS = ["project", "classifier", "set_id", "auroc", "f1", "mcc", "precision", "recall"]
EVALUATION_METRICS = ["auroc", "f1", "mcc", "precision", "recall"]


def load_history(cfg: ProjectConfig) -> ChangeHistory:
    """Parse and filter the change log: merges out (unless configured in),
    fatty commits out by raw size, then the source-file patterns."""
    with open(cfg.log_path, encoding="utf-8") as fh:
        commits = parse_change_log(fh)
    with open(cfg.releases_path, encoding="utf-8", newline="") as fh:
        releases = load_releases(fh)
    if not cfg.include_merges:
        commits = filter_merges(commits)
    commits = filter_fatty(commits, cfg.fatty_threshold)
    commits = filter_source_files(commits, cfg.include_patterns)
    return ChangeHistory(commits, releases)


@dataclass
class ReleaseArtifacts:
    release: str
    commits: list[Commit]
    graph: CoChangeGraph
    change_report: EntropyReport | None
    cochange_report: EntropyReport | None
    rows: list[FileMetricsRow]
    cochange_degenerate: bool = False


def _release_artifacts(args: tuple[str, list[Commit], ChangeHistory]) -> ReleaseArtifacts:
    release, commits, history = args
    graph = build_graph(commits)
    if not commits:
        return ReleaseArtifacts(release, commits, graph, None, None, [])
    change = entropy_report(commits, graph, "change")
    degenerate = graph.edge_count == 0
    cochange = (
        zero_report(graph.nodes, "cochange") if degenerate
        else entropy_report(commits, graph, "cochange")
    )
    rows = compute_rows(release, commits, graph, change, cochange, history)
    return ReleaseArtifacts(release, commits, graph, change, cochange, rows, degenerate)


def build_artifacts(history: ChangeHistory, jobs: int = 1) -> list[ReleaseArtifacts]:
    """Per-release graphs, entropy reports, and metric rows, in release order."""
    windows = assign_release_windows(history)
    payloads = [(name, commits, history) for name, commits in windows.items()]
    if jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            artifacts = list(pool.map(_release_artifacts, payloads))
    else:
        artifacts = [_release_artifacts(p) for p in payloads]
    for art in artifacts:
        if not art.commits:
            logger.warning("release %s: empty window, no metrics computed", art.release)
        elif art.cochange_degenerate:
            logger.warning(
                "release %s: co-change graph has no edges; co-change entropy set to 0",
                art.release,
            )
    return artifacts


def _write(path: Path, writer: Callable[[IO[str]], None]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer(fh)
    return path


def _project_dir(cfg: ProjectConfig, outdir: Path | None) -> Path:
    return (outdir or cfg.output_dir) / cfg.project_name


def run_ingest(cfg: ProjectConfig, outdir: Path | None = None) -> list[Path]:
    history = load_history(cfg)
    windows = assign_release_windows(history)
    base = _project_dir(cfg, outdir)
    written = []

    def summary(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["release", "role", "start_time", "end_time", "commits"])
        for spec in history.releases:
            writer.writerow(
                [spec.name, spec.role, spec.start_time, spec.end_time, len(windows[spec.name])]
            )

    written.append(_write(base / "windows.csv", summary))
    for spec in history.releases:
        written.append(
            _write(
                base / "windows" / f"{spec.name}.log",
                lambda fh, name=spec.name: write_change_log(windows[name], fh),
            )
        )
    return written


def run_graph(cfg: ProjectConfig, outdir: Path | None = None, jobs: int = 1) -> list[Path]:
    history = load_history(cfg)
    base = _project_dir(cfg, outdir)
    written = []
    for art in build_artifacts(history, jobs):
        written.append(
            _write(base / "graph" / f"{art.release}.csv",
                   lambda fh, g=art.graph: write_edge_list(g, fh))
        )
    return written


def run_entropy(
    cfg: ProjectConfig,
    outdir: Path | None = None,
    measures: tuple[str, ...] = MEASURES,
    jobs: int = 1,
) -> list[Path]:
    history = load_history(cfg)
    base = _project_dir(cfg, outdir)
    written = []
    for art in build_artifacts(history, jobs):
        reports = {"change": art.change_report, "cochange": art.cochange_report}
        for measure in measures:
            report = reports[measure]
            if report is None:
                continue
            written.append(
                _write(base / "entropy" / f"{art.release}.{measure}.csv",
                       lambda fh, r=report: write_entropy_csv(r, fh))
            )
    return written


def _labeled_rows(cfg: ProjectConfig, history: ChangeHistory, jobs: int) -> list[FileMetricsRow]:
    rows = [row for art in build_artifacts(history, jobs) for row in art.rows]
    if cfg.labels_path is None:
        return rows
    with open(cfg.labels_path, encoding="utf-8", newline="") as fh:
        labels = load_labels(fh)
    rows, orphans = join_and_label(rows, labels)
    if orphans:
        logger.warning(
            "%d label records match no metric row (first: %s/%s)",
            len(orphans), orphans[0].release, orphans[0].file,
        )
    return rows


def run_metrics(cfg: ProjectConfig, outdir: Path | None = None, jobs: int = 1) -> list[Path]:
    history = load_history(cfg)
    rows = _labeled_rows(cfg, history, jobs)
    base = _project_dir(cfg, outdir)
    return [_write(base / "metrics.csv", lambda fh: write_metrics_csv(rows, fh))]


def run_correlate(cfg: ProjectConfig, outdir: Path | None = None, jobs: int = 1) -> list[Path]:
    if cfg.labels_path is None:
        raise ConfigError("correlate needs labels_path in the project config")
    history = load_history(cfg)
    rows = _labeled_rows(cfg, history, jobs)
    base = _project_dir(cfg, outdir)

    def write_correlations(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["project", "metric", "pearson_r", "pearson_p", "spearman_rho", "spearman_p"]
        )
        for metric in ("sctr", "cce"):
            pear, spear = correlate_metric_vs_defects(rows, metric)
            writer.writerow(
                [cfg.project_name, metric, repr(pear.statistic), repr(pear.p_value),
                 repr(spear.statistic), repr(spear.p_value)]
            )

    return [_write(base / "correlation.csv", write_correlations)]


def run_dataset(
    cfg: ProjectConfig,
    outdir: Path | None = None,
    set_ids: tuple[str, ...] = METRIC_SETS,
    jobs: int = 1,
) -> list[Path]:
    if cfg.labels_path is None:
        raise ConfigError("dataset needs labels_path in the project config")
    history = load_history(cfg)
    rows = _labeled_rows(cfg, history, jobs)
    base = _project_dir(cfg, outdir)
    written = []
    for set_id in set_ids:
        train, test = emit_experiment(rows, history.releases, set_id)
        written.append(_write(base / set_id / "train.csv", train.write))
        written.append(_write(base / set_id / "test.csv", test.write))
    return written


def run_pipeline(cfg: ProjectConfig, outdir: Path | None = None, jobs: int = 1) -> list[Path]:
    """Chain ingest, graph, entropy, metrics, and (when labels exist)
    correlate + dataset. The stats stage is separate: it consumes
    classifier results produced outside this pipeline."""
    written = run_ingest(cfg, outdir)
    written += run_graph(cfg, outdir, jobs)
    written += run_entropy(cfg, outdir, jobs=jobs)
    written += run_metrics(cfg, outdir, jobs)
    if cfg.labels_path is not None:
        written += run_correlate(cfg, outdir, jobs)
        written += run_dataset(cfg, outdir, jobs=jobs)
    else:
        logger.warning("no labels_path configured: skipping correlate and dataset stages")
    return written


def _results_matrix(path: Path) -> dict[str, list[list[float]]]:
    """Pivot a classifier-results CSV into per-evaluation-metric matrices of
    (project, classifier) blocks x metric-set treatments."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(RESULT_COLUMNS) - set(reader.fieldnames):
            raise ValidationError(
                f"results file must have columns {RESULT_COLUMNS}, got {reader.fieldnames}"
            )
        records = list(reader)
    cells: dict[tuple[str, str], dict[str, dict[str, float]]] = {}
    for rec in records:
        if rec["set_id"] not in METRIC_SETS:
            raise ValidationError(f"unknown set_id {rec['set_id']!r} in results file")
        block = cells.setdefault((rec["project"], rec["classifier"]), {})
        try:
            block[rec["set_id"]] = {m: float(rec[m]) for m in EVALUATION_METRICS}
        except (TypeError, ValueError):
            raise ValidationError(
                f"non-numeric score in results row {rec['project']}/"
                f"{rec['classifier']}/{rec['set_id']}"
            ) from None
    matrices: dict[str, list[list[float]]] = {m: [] for m in EVALUATION_METRICS}
    for key in sorted(cells):
        block = cells[key]
        missing = [s for s in METRIC_SETS if s not in block]
        if missing:
            raise ValidationError(f"results for {key} lack metric sets {missing}")
        for m in EVALUATION_METRICS:
            matrices[m].append([block[s][m] for s in METRIC_SETS])
    if not next(iter(matrices.values())):
        raise ValidationError(f"results file {path} has no data rows")
    return matrices


def run_stats(results_path: Path, outdir: Path, alpha: float = 0.05) -> list[Path]:
    """Friedman across the three metric sets plus Nemenyi pairs, per
    evaluation metric."""
    matrices = _results_matrix(results_path)
    pairs = [(0, 1, "P+C vs P+Co"), (0, 2, "P+C vs P+C+Co")]

    def write_significance(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["metric", "test", "comparison", "statistic", "p_value",
             "critical_difference", "significant"]
        )
        for metric in EVALUATION_METRICS:
            result = friedman(matrices[metric])
            writer.writerow(
                [metric, "friedman", "|".join(METRIC_SETS), repr(result.statistic),
                 repr(result.p_value), "", int(result.p_value < alpha)]
            )
            post = nemenyi(result.extras["mean_ranks"], result.n, alpha)
            for i, j, name in pairs:
                gap = abs(post.mean_ranks[i] - post.mean_ranks[j])
                writer.writerow(
                    [metric, "nemenyi", name, repr(gap), "", repr(post.cd),
                     int(post.significant[i][j])]
                )

    return [_write(outdir / "significance.csv", write_significance)]
