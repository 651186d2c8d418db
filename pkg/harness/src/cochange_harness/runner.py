"""Train the five classifiers on each metric set of each project and collect
evaluation records.

Dataset layout (produced by the cochange `dataset` stage):

    <data>/<project>/<set_id>/{train,test}.csv   set_id in {P+C, P+Co, P+C+Co}

Feature columns are everything except release/file (identifiers),
defect_count (the label source), and label (the target). Per-task seeds are
derived from the run seed so every (project, set, classifier) cell is
independently reproducible.
"""

from __future__ import annotations

import csv
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np
import pandas as pd
from sklearn.ensemble import (
    GradientBoostingClassifier,
    HistGradientBoostingClassifier,
    RandomForestClassifier,
)
from sklearn.linear_model import LogisticRegression
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler
from sklearn.svm import SVC

from .balance import smote_balance
from .evaluate import score_predictions

METRIC_SETS = ("P+C", "P+Co", "P+C+Co")
NON_FEATURE_COLUMNS = ("release", "file", "defect_count", "label")
RESULT_COLUMNS = ["project", "classifier", "set_id", "auroc", "f1", "mcc",
                  "precision", "recall"]


class HarnessError(RuntimeError):
    pass


def classifier_factories():
    """The five classifiers, ecosystem defaults, linear models behind a
    scaler. HistGradientBoosting fills the xgboost-style slot."""
    return {
        "logistic-regression": lambda seed: make_pipeline(
            StandardScaler(), LogisticRegression(max_iter=1000, random_state=seed)
        ),
        "support-vector-machine": lambda seed: make_pipeline(
            StandardScaler(), SVC(probability=True, random_state=seed)
        ),
        "random-forest": lambda seed: RandomForestClassifier(random_state=seed),
        "xgboost-style-gradient-boosting": lambda seed: HistGradientBoostingClassifier(
            random_state=seed
        ),
        "gradient-boosting": lambda seed: GradientBoostingClassifier(random_state=seed),
    }


@dataclass
class EvaluationRecord:
    project: str
    classifier: str
    set_id: str
    auroc: float
    f1: float
    mcc: float
    precision: float
    recall: float


def _task_seed(*parts) -> int:
    return zlib.crc32(":".join(str(p) for p in parts).encode())


def _check_no_leakage(train_path: Path, test_path: Path) -> None:
    train_rows = set(train_path.read_text().splitlines()[1:])
    test_rows = test_path.read_text().splitlines()[1:]
    leaked = [row for row in test_rows if row in train_rows]
    if leaked:
        raise HarnessError(
            f"{len(leaked)} test row(s) of {test_path} appear in the training data; "
            "aborting (leakage)"
        )


def load_split(set_dir: Path, set_id: str):
    """Read one metric set's train/test tables into feature matrices."""
    train_path, test_path = set_dir / "train.csv", set_dir / "test.csv"
    for path in (train_path, test_path):
        if not path.exists():
            raise HarnessError(f"missing dataset file {path}")
    _check_no_leakage(train_path, test_path)
    train = pd.read_csv(train_path)
    test = pd.read_csv(test_path)
    for frame, path in ((train, train_path), (test, test_path)):
        if set_id == "P+Co" and "sctr" in frame.columns:
            raise HarnessError(f"{path} carries an sctr column inside the P+Co set")
        if "label" not in frame.columns:
            raise HarnessError(f"{path} has no label column")
    features = [c for c in train.columns if c not in NON_FEATURE_COLUMNS]
    x_train = train[features].to_numpy(dtype=float)
    y_train = train["label"].to_numpy(dtype=int)
    x_test = test[features].to_numpy(dtype=float)
    y_test = test["label"].to_numpy(dtype=int)
    return x_train, y_train, x_test, y_test


def run_experiments(data_root: Path, seed: int) -> list[EvaluationRecord]:
    data_root = Path(data_root)
    projects = sorted(p.name for p in data_root.iterdir() if p.is_dir())
    if not projects:
        raise HarnessError(f"no project directories under {data_root}")
    factories = classifier_factories()
    records = []
    for project in projects:
        for set_id in METRIC_SETS:
            set_dir = data_root / project / set_id
            if not set_dir.is_dir():
                raise HarnessError(f"missing metric-set directory {set_dir}")
            x_train, y_train, x_test, y_test = load_split(set_dir, set_id)
            rng = np.random.default_rng(_task_seed(seed, project, set_id))
            x_bal, y_bal = smote_balance(x_train, y_train, rng=rng)
            for name, factory in factories.items():
                model = factory(_task_seed(seed, project, set_id, name))
                model.fit(x_bal, y_bal)
                scores = model.predict_proba(x_test)[:, 1]
                measured = score_predictions(y_test, scores)
                records.append(EvaluationRecord(project, name, set_id, **measured))
    return records


def write_results(records: list[EvaluationRecord], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for rec in records:
        writer.writerow(
            [rec.project, rec.classifier, rec.set_id, repr(rec.auroc), repr(rec.f1),
             repr(rec.mcc), repr(rec.precision), repr(rec.recall)]
        )
