from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
import pytest

from cochange_harness.runner import run_experiments

FULL_COLUMNS = [
    "release", "file", "comm", "adev", "ddev", "add", "del", "own", "minor",
    "sctr", "cce", "nadev", "nddev", "ncomm", "nsctr", "oexp", "exp",
    "defect_count", "label",
]
SET_COLUMNS = {
    "P+C": [c for c in FULL_COLUMNS if c != "cce"],
    "P+Co": [c for c in FULL_COLUMNS if c != "sctr"],
    "P+C+Co": FULL_COLUMNS,
}


def _full_rows(rng: np.random.Generator, release: str, n: int) -> list[dict]:
    rows = []
    for i in range(n):
        comm = int(rng.integers(1, 20))
        adev = int(rng.integers(1, min(comm, 5) + 1))
        add = float(rng.uniform())
        rows.append({
            "release": release,
            "file": f"src/{release}_f{i:03d}.java",
            "comm": comm,
            "adev": adev,
            "ddev": int(adev + rng.integers(0, 4)),
            "add": add,
            "del": 1.0 - add,
            "own": float(rng.uniform(0.3, 1.0)),
            "minor": int(rng.integers(0, 3)),
            "sctr": float(rng.uniform()),
            "cce": float(rng.uniform()),
            "nadev": float(rng.uniform(0, 4)),
            "nddev": float(rng.uniform(0, 6)),
            "ncomm": float(rng.uniform(0, 12)),
            "nsctr": float(rng.uniform()),
            "oexp": float(rng.uniform()),
            "exp": float(rng.uniform()),
        })
    return rows


def write_synthetic_project(
    root: Path, name: str, seed: int, shuffle_labels: bool,
    sizes: tuple[int, int, int] = (80, 80, 60),
) -> Path:
    """A project in the cochange dataset layout. Labels are exactly
    (cce > median); `shuffle_labels` permutes them to kill the signal."""
    rng = np.random.default_rng(seed)
    train = _full_rows(rng, "r1", sizes[0]) + _full_rows(rng, "r2", sizes[1])
    test = _full_rows(rng, "r3", sizes[2])
    everything = train + test
    median = float(np.median([row["cce"] for row in everything]))
    labels = np.array([int(row["cce"] > median) for row in everything])
    if shuffle_labels:
        labels = rng.permutation(labels)
    for row, label in zip(everything, labels):
        row["defect_count"] = int(label)
        row["label"] = int(label)

    project_dir = root / name
    for set_id, columns in SET_COLUMNS.items():
        set_dir = project_dir / set_id
        set_dir.mkdir(parents=True, exist_ok=True)
        for filename, rows in (("train.csv", train), ("test.csv", test)):
            with open(set_dir / filename, "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(columns)
                for row in rows:
                    writer.writerow([row[c] for c in columns])
    return project_dir


@pytest.fixture(scope="session")
def dataset_root(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("datasets")
    write_synthetic_project(root, "planted", seed=101, shuffle_labels=False)
    write_synthetic_project(root, "shuffled", seed=202, shuffle_labels=True)
    return root


@pytest.fixture(scope="session")
def records(dataset_root):
    return run_experiments(dataset_root, seed=7)
