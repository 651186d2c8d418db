"""Correlation and rank-based significance tests for the analysis protocol.

Pearson/Spearman p-values use the two-sided t transform
t = r * sqrt((n-2) / (1-r^2)) with n-2 degrees of freedom; Spearman is
Pearson on average ranks. The Friedman statistic is the tie-corrected
chi-square over within-block ranks, and the Nemenyi critical difference
is CD = q_alpha(k) * sqrt(k(k+1) / (6n)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np
from scipy import stats as _dist

from .errors import ConfigError, DegenerateInputError, ValidationError
from .metrics import FileMetricsRow

# Two-tailed Nemenyi critical values: q_alpha(k) is the alpha upper
# quantile of the studentized range with infinite df, divided by sqrt(2).
NEMENYI_Q = {
    0.05: {2: 1.960, 3: 2.343, 4: 2.569, 5: 2.728, 6: 2.850,
           7: 2.949, 8: 3.031, 9: 3.102, 10: 3.164},
    0.10: {2: 1.645, 3: 2.052, 4: 2.291, 5: 2.459, 6: 2.589,
           7: 2.693, 8: 2.780, 9: 2.855, 10: 2.920},
}

CORRELATION_METRICS = ("sctr", "cce")
_EXACT_SPEARMAN_MAX_N = 10


@dataclass
class StatResult:
    statistic: float
    p_value: float
    n: int
    method: str
    extras: dict = field(default_factory=dict)


@dataclass
class NemenyiResult:
    """Pairwise decisions at the critical difference. significant[i][j] is
    True when treatments i and j differ by more than cd (diagonal False)."""

    cd: float
    alpha: float
    q_alpha: float
    n: int
    mean_ranks: list[float]
    significant: list[list[bool]]
    method: str = "nemenyi"


def _as_vector(values: Iterable[float], name: str) -> np.ndarray:
    arr = np.asarray(list(values), dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def _checked_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    xv, yv = _as_vector(x, "x"), _as_vector(y, "y")
    if len(xv) != len(yv):
        raise ValidationError(f"length mismatch: {len(xv)} vs {len(yv)}")
    if len(xv) < 3:
        raise ValidationError(f"need at least 3 observations, got {len(xv)}")
    return xv, yv


def _product_moment(x: np.ndarray, y: np.ndarray) -> float:
    dx, dy = x - x.mean(), y - y.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateInputError("zero variance in correlation input")
    r = float(dx @ dy) / (sx * sy)
    return max(-1.0, min(1.0, r))


def _t_pvalue(r: float, n: int) -> float:
    if 1.0 - r * r <= 0.0:
        return 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return 2.0 * float(_dist.t.sf(abs(t), n - 2))


def pearson(x, y) -> StatResult:
    """Product-moment correlation with the two-sided t-test p-value."""
    xv, yv = _checked_pair(x, y)
    r = _product_moment(xv, yv)
    return StatResult(statistic=r, p_value=_t_pvalue(r, len(xv)), n=len(xv), method="pearson")


def spearman(x, y, exact: bool = False) -> StatResult:
    """Rank correlation (mean ranks on ties). `exact` enables the
    permutation p-value for n <= 10 instead of the t approximation."""
    xv, yv = _checked_pair(x, y)
    xr = _dist.rankdata(xv)
    yr = _dist.rankdata(yv)
    rho = _product_moment(xr, yr)
    if not exact:
        return StatResult(statistic=rho, p_value=_t_pvalue(rho, len(xv)), n=len(xv),
                          method="spearman")
    n = len(xv)
    if n > _EXACT_SPEARMAN_MAX_N:
        raise ValidationError(f"exact spearman p-value limited to n <= {_EXACT_SPEARMAN_MAX_N}")
    hits = total = 0
    for perm in permutations(yr):
        total += 1
        if abs(_product_moment(xr, np.asarray(perm))) >= abs(rho) - 1e-12:
            hits += 1
    return StatResult(statistic=rho, p_value=hits / total, n=n, method="spearman",
                      extras={"exact": True})


def friedman(scores) -> StatResult:
    """Tie-corrected Friedman chi-square over an n-blocks x k-treatments matrix."""
    matrix = np.asarray(scores, dtype=float)
    if matrix.ndim != 2:
        raise ValidationError("scores must be a 2-d matrix (blocks x treatments)")
    n, k = matrix.shape
    if k < 3:
        raise ValidationError(f"need at least 3 treatments, got {k}")
    if n < 2:
        raise ValidationError(f"need at least 2 blocks, got {n}")
    if not np.all(np.isfinite(matrix)):
        raise ValidationError("scores contain non-finite values")

    ranks = np.apply_along_axis(_dist.rankdata, 1, matrix)
    rank_sums = ranks.sum(axis=0)
    chi = 12.0 / (n * k * (k + 1)) * float(rank_sums @ rank_sums) - 3.0 * n * (k + 1)

    ties = 0.0
    for row in matrix:
        _, counts = np.unique(row, return_counts=True)
        ties += float((counts**3 - counts).sum())
    correction = 1.0 - ties / (n * k * (k * k - 1))
    if correction <= 0.0:
        raise DegenerateInputError("every block is constant; ranks carry no information")
    statistic = chi / correction
    return StatResult(
        statistic=statistic,
        p_value=float(_dist.chi2.sf(statistic, k - 1)),
        n=n,
        method="friedman",
        extras={
            "df": k - 1,
            "mean_ranks": [float(r) for r in rank_sums / n],
            "tie_correction": correction,
        },
    )


def nemenyi(mean_ranks: Sequence[float], n: int, alpha: float = 0.05) -> NemenyiResult:
    """Pairwise post-hoc comparison of mean ranks from a Friedman test."""
    k = len(mean_ranks)
    if alpha not in NEMENYI_Q:
        raise ConfigError(f"alpha {alpha!r} not tabulated; choose from {sorted(NEMENYI_Q)}")
    table = NEMENYI_Q[alpha]
    if k not in table:
        raise ConfigError(f"k={k} outside tabulated range {min(table)}..{max(table)}")
    if n < 1:
        raise ValidationError(f"block count must be >= 1, got {n}")
    q = table[k]
    cd = q * math.sqrt(k * (k + 1) / (6.0 * n))
    ranks = [float(r) for r in mean_ranks]
    significant = [
        [i != j and abs(ranks[i] - ranks[j]) > cd for j in range(k)] for i in range(k)
    ]
    return NemenyiResult(cd=cd, alpha=alpha, q_alpha=q, n=n, mean_ranks=ranks,
                         significant=significant)


def correlate_metric_vs_defects(
    rows: list[FileMetricsRow], metric: str
) -> tuple[StatResult, StatResult]:
    """Pool (metric, defect_count) pairs across a project's releases and
    return the (pearson, spearman) results."""
    if metric not in CORRELATION_METRICS:
        raise ConfigError(f"unknown metric {metric!r}; expected one of {CORRELATION_METRICS}")
    if len(rows) < 3:
        raise ValidationError(f"need at least 3 rows, got {len(rows)}")
    missing = [r for r in rows if r.defect_count is None]
    if missing:
        raise ValidationError(
            f"{len(missing)} rows lack defect counts (first: "
            f"{missing[0].release}/{missing[0].file})"
        )
    x = [getattr(row, metric) for row in rows]
    y = [float(row.defect_count) for row in rows]
    return pearson(x, y), spearman(x, y)
