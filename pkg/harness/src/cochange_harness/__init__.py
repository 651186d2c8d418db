"""Classifier benchmark harness over cochange train/test datasets."""

from .balance import BalanceError, smote_balance
from .evaluate import score_predictions
from .runner import (
    EvaluationRecord,
    HarnessError,
    classifier_factories,
    run_experiments,
    write_results,
)

__version__ = "0.1.0"

__all__ = [
    "BalanceError", "EvaluationRecord", "HarnessError", "classifier_factories",
    "run_experiments", "score_predictions", "smote_balance", "write_results",
]
