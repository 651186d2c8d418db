"""Shannon entropy of change and co-change distributions, attributed per file.

System entropy is H = -sum(p_k * log2(p_k)) with the 0*log0 = 0 convention.
The change measure uses per-file change probabilities (touches over total
file changes); the co-change measure uses the degree distribution of the
co-change graph. A file's share of either measure is p_k * H.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Iterable

from .errors import DegenerateInputError, ValidationError
from .graph import CoChangeGraph
from .history import Commit

MEASURES = ("change", "cochange")
_SUM_TOLERANCE = 1e-9


@dataclass
class EntropyReport:
    """System entropy plus per-file attribution for one window and measure."""

    measure: str
    system_entropy: float
    probabilities: dict[str, float]
    per_file: dict[str, float]


def shannon_entropy(probs: Iterable[float]) -> float:
    """Base-2 Shannon entropy of a probability distribution."""
    values = list(probs)
    if any(p < 0 for p in values):
        raise ValidationError("probabilities must be non-negative")
    total = sum(values)
    if not math.isclose(total, 1.0, rel_tol=0.0, abs_tol=_SUM_TOLERANCE):
        raise ValidationError(f"probabilities must sum to 1, got {total!r}")
    return -sum(p * math.log2(p) for p in values if p > 0.0)


def change_probabilities(commits: Iterable[Commit]) -> dict[str, float]:
    """p_f = commits touching f / total file changes in the window."""
    touches: dict[str, int] = {}
    for commit in commits:
        for path in commit.paths:
            touches[path] = touches.get(path, 0) + 1
    total = sum(touches.values())
    if total == 0:
        raise DegenerateInputError("window contains no file changes")
    return {path: touches[path] / total for path in sorted(touches)}


def attribute_entropy(system_entropy: float, probs: dict[str, float]) -> dict[str, float]:
    """Assign each file its share p_f * H of the system entropy."""
    return {path: p * system_entropy for path, p in probs.items()}


def entropy_report(
    commits: list[Commit], graph: CoChangeGraph, measure: str
) -> EntropyReport:
    """Compute system + per-file entropy for one window under one measure."""
    if measure not in MEASURES:
        raise ValidationError(f"unknown entropy measure {measure!r}")
    try:
        if measure == "change":
            probs = change_probabilities(commits)
        else:
            probs = graph.cochange_probabilities()
    except DegenerateInputError as exc:
        raise DegenerateInputError(f"{measure} measure: {exc}") from exc
    system = shannon_entropy(probs.values())
    return EntropyReport(
        measure=measure,
        system_entropy=system,
        probabilities=probs,
        per_file=attribute_entropy(system, probs),
    )


def zero_report(files: Iterable[str], measure: str) -> EntropyReport:
    """All-zero fallback for windows where the measure is degenerate
    (e.g. an edgeless co-change graph): entropy 0 for the system and
    every file."""
    files = sorted(files)
    return EntropyReport(
        measure=measure,
        system_entropy=0.0,
        probabilities={f: 0.0 for f in files},
        per_file={f: 0.0 for f in files},
    )


def write_entropy_csv(report: EntropyReport, stream: IO[str]) -> None:
    """Export `file,measure,probability,entropy_bits` with a leading
    comment row carrying the system entropy."""
    stream.write(
        f"# measure={report.measure} system_entropy_bits={report.system_entropy!r}\n"
    )
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["file", "measure", "probability", "entropy_bits"])
    for path in sorted(report.per_file):
        writer.writerow(
            [path, report.measure, repr(report.probabilities[path]), repr(report.per_file[path])]
        )
