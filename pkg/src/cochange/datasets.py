"""Defect-label ingestion and train/test dataset assembly."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable

from .errors import ConfigError, ValidationError
from .history import ReleaseSpec
from .metrics import FileMetricsRow, MetricTable, build_metric_set, with_labels


@dataclass
class DefectLabelRecord:
    release: str
    file: str
    defect_count: int

    def __post_init__(self):
        if self.defect_count < 0:
            raise ValidationError(
                f"negative defect count for ({self.release}, {self.file})"
            )


def load_labels(stream: Iterable[str]) -> list[DefectLabelRecord]:
    """Read the label CSV (header: release,file,defect_count).

    Duplicate (release, file) keys and negative counts are rejected.
    """
    reader = csv.DictReader(stream)
    required = {"release", "file", "defect_count"}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        raise ValidationError(
            f"label file must have columns {sorted(required)}, got {reader.fieldnames}"
        )
    records = []
    seen = set()
    for row in reader:
        key = (row["release"], row["file"])
        if key in seen:
            raise ValidationError(f"duplicate label key {key}")
        seen.add(key)
        try:
            count = int(row["defect_count"])
        except ValueError:
            raise ValidationError(
                f"label {key}: defect_count {row['defect_count']!r} is not an integer"
            ) from None
        records.append(DefectLabelRecord(row["release"], row["file"], count))
    return records


def join_and_label(
    rows: list[FileMetricsRow], labels: list[DefectLabelRecord]
) -> tuple[list[FileMetricsRow], list[DefectLabelRecord]]:
    """Attach defect counts to metric rows.

    Rows without a matching label get defect_count 0 / label False. Label
    records with no metric row (files unchanged in the window) come back
    in the orphan list; they are reported, not an error, because metrics
    are undefined for unchanged files.
    """
    by_key = {(lab.release, lab.file): lab for lab in labels}
    labeled = []
    matched = set()
    for row in rows:
        key = (row.release, row.file)
        record = by_key.get(key)
        if record is not None:
            matched.add(key)
            labeled.append(with_labels(row, record.defect_count))
        else:
            labeled.append(with_labels(row, 0))
    orphans = [lab for lab in labels if (lab.release, lab.file) not in matched]
    return labeled, orphans


def emit_experiment(
    rows: list[FileMetricsRow], releases: list[ReleaseSpec], set_id: str
) -> tuple[MetricTable, MetricTable]:
    """Split labeled rows into (train, test) tables projected onto a metric set.

    Train is the concatenation of all train-release rows in release order;
    test is the single test release. Role layout and an empty test release
    are configuration errors.
    """
    train_releases = [r for r in releases if r.role == "train"]
    test_releases = [r for r in releases if r.role == "test"]
    if not train_releases:
        raise ConfigError("experiment needs at least one train release")
    if len(test_releases) != 1:
        raise ConfigError(
            f"experiment needs exactly one test release, got {len(test_releases)}"
        )
    by_release: dict[str, list[FileMetricsRow]] = {r.name: [] for r in releases}
    for row in rows:
        if row.release in by_release:
            by_release[row.release].append(row)
    train_rows = [row for spec in train_releases for row in by_release[spec.name]]
    test_rows = by_release[test_releases[0].name]
    if not test_rows:
        raise ConfigError(f"test release {test_releases[0].name!r} has no metric rows")
    return build_metric_set(train_rows, set_id), build_metric_set(test_rows, set_id)
