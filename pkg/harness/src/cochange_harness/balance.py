"""SMOTE class balancing: synthesize minority samples by interpolating
between a minority point and one of its k nearest minority neighbors,
until both classes are the same size. Training data only; never applied
to test data."""

from __future__ import annotations

import numpy as np
from sklearn.neighbors import NearestNeighbors

DEFAULT_K = 5


class BalanceError(ValueError):
    pass


def smote_balance(
    features: np.ndarray,
    labels: np.ndarray,
    k: int = DEFAULT_K,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Oversample the minority class to a 1:1 ratio.

    k is capped at (minority size - 1); a minority class of fewer than
    2 samples has no neighbors to interpolate with and is an error.
    """
    rng = rng or np.random.default_rng(0)
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels)
    classes, counts = np.unique(labels, return_counts=True)
    if len(classes) != 2:
        raise BalanceError(f"need exactly 2 classes to balance, got {list(classes)}")
    minority = classes[np.argmin(counts)]
    n_minority, n_majority = counts.min(), counts.max()
    if n_minority == n_majority:
        return features, labels
    if n_minority < 2:
        raise BalanceError(
            f"minority class has {n_minority} sample(s); need at least 2 for interpolation"
        )

    minority_rows = features[labels == minority]
    k_eff = min(k, n_minority - 1)
    neighbor_idx = (
        NearestNeighbors(n_neighbors=k_eff + 1)
        .fit(minority_rows)
        .kneighbors(minority_rows, return_distance=False)[:, 1:]  # drop self
    )

    needed = n_majority - n_minority
    base = rng.integers(0, n_minority, size=needed)
    picked = neighbor_idx[base, rng.integers(0, k_eff, size=needed)]
    gaps = rng.uniform(size=(needed, 1))
    synthetic = minority_rows[base] + gaps * (minority_rows[picked] - minority_rows[base])

    return (
        np.vstack([features, synthetic]),
        np.concatenate([labels, np.full(needed, minority, dtype=labels.dtype)]),
    )
