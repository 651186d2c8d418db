"""Per-(release, file) process metrics and the three experiment projections.

Metric definitions (computed over one release window unless noted):

    comm   commits touching the file
    adev   distinct authors touching the file
    ddev   distinct authors touching the file in the whole history up to
           the release end (cumulative)
    add    lines added, as a fraction of the file's window churn
    del    lines deleted, same normalization
    own    highest single-author share of the file's commits
    minor  authors whose share of the file's commits is < 0.05
    sctr   the file's attributed change entropy (bits)
    cce    the file's attributed co-change entropy (bits)
    nadev, nddev, ncomm, nsctr
           mean of the base metric over the file's co-change neighbors
           (0 for isolated files)
    oexp   owner's share of all project commits up to the release end
    exp    geometric mean of the file's authors' project-commit shares

Touch fractions count commits, not lines. The P+C set drops cce, P+Co
drops sctr and bases nsctr on cce instead, P+C+Co keeps both.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import IO

from .entropy import EntropyReport
from .errors import ConfigError, ValidationError
from .graph import CoChangeGraph
from .history import ChangeHistory, Commit

METRIC_SETS = ("P+C", "P+Co", "P+C+Co")
MINOR_FRACTION = 0.05

FULL_COLUMNS = [
    "release", "file", "comm", "adev", "ddev", "add", "del", "own", "minor",
    "sctr", "cce", "nadev", "nddev", "ncomm", "nsctr", "oexp", "exp",
    "defect_count", "label",
]


@dataclass
class FileMetricsRow:
    release: str
    file: str
    comm: int = 0
    adev: int = 0
    ddev: int = 0
    add: float = 0.0
    del_: float = 0.0
    own: float = 0.0
    minor: int = 0
    sctr: float = 0.0
    cce: float = 0.0
    nadev: float = 0.0
    nddev: float = 0.0
    ncomm: float = 0.0
    nsctr: float = 0.0
    oexp: float = 0.0
    exp: float = 0.0
    # cce-based neighbor aggregate, used when P+Co substitutes nsctr.
    ncce: float = 0.0
    defect_count: int | None = None
    label: bool | None = None


@dataclass
class MetricTable:
    """A column projection of metric rows, pre-formatted for stable CSV output."""

    columns: list[str]
    rows: list[list[str]] = field(default_factory=list)

    def write(self, stream: IO[str]) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows(self.rows)


class _WindowStats:
    """One pass over the window plus the cumulative history cutoff."""

    def __init__(self, window_commits: list[Commit], history: ChangeHistory, end_time: int):
        self.commits_per_file: dict[str, int] = {}
        self.author_commits_per_file: dict[str, dict[str, int]] = {}
        self.added: dict[str, int] = {}
        self.deleted: dict[str, int] = {}
        for commit in window_commits:
            for change in commit.changes:
                path = change.path
                self.commits_per_file[path] = self.commits_per_file.get(path, 0) + 1
                per_author = self.author_commits_per_file.setdefault(path, {})
                per_author[commit.author] = per_author.get(commit.author, 0) + 1
                self.added[path] = self.added.get(path, 0) + change.lines_added
                self.deleted[path] = self.deleted.get(path, 0) + change.lines_deleted

        self.cumulative_authors: dict[str, set[str]] = {}
        self.project_commits_per_author: dict[str, int] = {}
        self.project_commit_total = 0
        for commit in history.commits:
            if commit.timestamp > end_time:
                break
            self.project_commit_total += 1
            self.project_commits_per_author[commit.author] = (
                self.project_commits_per_author.get(commit.author, 0) + 1
            )
            for path in commit.paths:
                self.cumulative_authors.setdefault(path, set()).add(commit.author)

    def experience(self, author: str) -> float:
        if self.project_commit_total == 0:
            return 0.0
        return self.project_commits_per_author.get(author, 0) / self.project_commit_total


def _release_end(history: ChangeHistory, release: str) -> int:
    for spec in history.releases:
        if spec.name == release:
            return spec.end_time
    raise ConfigError(f"release {release!r} not found in history releases")


def _base_row(
    release: str,
    path: str,
    stats: _WindowStats,
    change_report: EntropyReport,
    cochange_report: EntropyReport,
) -> FileMetricsRow:
    comm = stats.commits_per_file[path]
    per_author = stats.author_commits_per_file[path]
    fractions = {author: count / comm for author, count in per_author.items()}
    own = max(fractions.values())
    # Deterministic owner pick: smallest author name among the maxima.
    owner = min(a for a, f in fractions.items() if f == own)
    churn = stats.added.get(path, 0) + stats.deleted.get(path, 0)
    experiences = [e for e in (stats.experience(a) for a in sorted(per_author)) if e > 0]
    exp = math.exp(sum(math.log(e) for e in experiences) / len(experiences)) if experiences else 0.0
    return FileMetricsRow(
        release=release,
        file=path,
        comm=comm,
        adev=len(per_author),
        ddev=len(stats.cumulative_authors.get(path, ())),
        add=stats.added.get(path, 0) / churn if churn else 0.0,
        del_=stats.deleted.get(path, 0) / churn if churn else 0.0,
        own=own,
        minor=sum(1 for f in fractions.values() if f < MINOR_FRACTION),
        sctr=change_report.per_file.get(path, 0.0),
        cce=cochange_report.per_file.get(path, 0.0),
        oexp=stats.experience(owner),
        exp=exp,
    )


def _neighbor_averages(rows: dict[str, FileMetricsRow], graph: CoChangeGraph) -> None:
    for path, row in rows.items():
        neighbors = graph.neighbors(path) if path in graph.nodes else []
        if not neighbors:
            continue
        n = len(neighbors)
        row.nadev = sum(rows[nb].adev for nb in neighbors) / n
        row.nddev = sum(rows[nb].ddev for nb in neighbors) / n
        row.ncomm = sum(rows[nb].comm for nb in neighbors) / n
        row.nsctr = sum(rows[nb].sctr for nb in neighbors) / n
        row.ncce = sum(rows[nb].cce for nb in neighbors) / n


def compute_rows(
    release: str,
    window_commits: list[Commit],
    graph: CoChangeGraph,
    change_report: EntropyReport,
    cochange_report: EntropyReport,
    history: ChangeHistory,
) -> list[FileMetricsRow]:
    """Metric rows for every file changed in the window, sorted by path."""
    end_time = _release_end(history, release)
    stats = _WindowStats(window_commits, history, end_time)
    rows = {
        path: _base_row(release, path, stats, change_report, cochange_report)
        for path in sorted(stats.commits_per_file)
    }
    _neighbor_averages(rows, graph)
    return [rows[path] for path in sorted(rows)]


def compute_row(
    release: str,
    file: str,
    window_commits: list[Commit],
    graph: CoChangeGraph,
    change_report: EntropyReport,
    cochange_report: EntropyReport,
    history: ChangeHistory,
) -> FileMetricsRow:
    """Single-file variant; raises KeyError if the file is not in the window."""
    rows = compute_rows(release, window_commits, graph, change_report, cochange_report, history)
    for row in rows:
        if row.file == file:
            return row
    raise KeyError(file)


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row_values(row: FileMetricsRow, columns: list[str], nsctr_from_cce: bool) -> list[str]:
    values = []
    for column in columns:
        if column == "del":
            values.append(_format(row.del_))
        elif column == "nsctr" and nsctr_from_cce:
            values.append(_format(row.ncce))
        else:
            values.append(_format(getattr(row, column)))
    return values


def build_metric_set(rows: list[FileMetricsRow], set_id: str) -> MetricTable:
    """Project rows onto one of the P+C / P+Co / P+C+Co column sets."""
    if set_id not in METRIC_SETS:
        raise ConfigError(f"unknown metric set {set_id!r}; expected one of {METRIC_SETS}")
    dropped = {"P+C": {"cce"}, "P+Co": {"sctr"}, "P+C+Co": set()}[set_id]
    columns = [c for c in FULL_COLUMNS if c not in dropped]
    nsctr_from_cce = set_id == "P+Co"
    return MetricTable(
        columns=columns,
        rows=[_row_values(row, columns, nsctr_from_cce) for row in rows],
    )


def write_metrics_csv(rows: list[FileMetricsRow], stream: IO[str]) -> None:
    """Full dataset export with the canonical header (equals the P+C+Co set)."""
    build_metric_set(rows, "P+C+Co").write(stream)


def with_labels(row: FileMetricsRow, defect_count: int) -> FileMetricsRow:
    if defect_count < 0:
        raise ValidationError(f"negative defect count for {row.release}/{row.file}")
    return replace(row, defect_count=defect_count, label=defect_count > 0)
