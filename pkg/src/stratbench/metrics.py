"""Cross-classification matrices and the three accuracy summaries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MetricTriple:
    mcr_total: float
    mcr_class: float
    kappa: float


def confusion_matrix(truth, predicted, n_classes: int) -> np.ndarray:
    """(K, K) count matrix, truth on rows, prediction on columns."""
    t = np.asarray(truth, dtype=np.int64)
    p = np.asarray(predicted, dtype=np.int64)
    if t.ndim != 1 or t.shape != p.shape:
        raise ValueError("truth and prediction must be aligned 1-D arrays")
    if n_classes < 1:
        raise ValueError("need at least one class")
    if t.size and not (0 <= t.min() and t.max() < n_classes
                       and 0 <= p.min() and p.max() < n_classes):
        raise ValueError("label code outside the class universe")
    m = np.bincount(t * n_classes + p, minlength=n_classes * n_classes)
    return m.reshape(n_classes, n_classes)


def _check_matrix(m) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("confusion matrix must be square")
    if np.any(m < 0):
        raise ValueError("confusion matrix counts must be nonnegative")
    return m.astype(np.int64)


def mcr_total(matrix) -> float:
    """Overall misclassification rate: 1 - trace / total."""
    m = _check_matrix(matrix)
    total = int(m.sum())
    if total == 0:
        raise ValueError("empty confusion matrix")
    return float(1.0 - np.trace(m) / total)


def mcr_class(matrix) -> float:
    """Mean per-class misclassification rate.

    Averages 1 - m[j, j] / row_j over classes that actually occur (nonzero
    truth rows), weighting every occurring class equally no matter how rare.
    """
    m = _check_matrix(matrix)
    rows = m.sum(axis=1)
    occ = rows > 0
    if not occ.any():
        raise ValueError("no class occurs in the truth column")
    rates = 1.0 - np.diag(m)[occ] / rows[occ]
    return float(rates.mean())


def kappa(matrix) -> float:
    """Cohen's kappa: agreement corrected for marginal chance.

    Chance agreement is the sum over classes of the product of row and
    column shares. Degenerate matrices with chance agreement exactly 1
    (all mass in one diagonal cell) leave kappa undefined.
    """
    m = _check_matrix(matrix)
    total = int(m.sum())
    if total == 0:
        raise ValueError("empty confusion matrix")
    rows = m.sum(axis=1)
    cols = m.sum(axis=0)
    chance_mass = int(np.dot(rows, cols))
    if chance_mass == total * total:
        raise ValueError("kappa undefined: chance agreement is exactly 1")
    p_agree = np.trace(m) / total
    p_chance = chance_mass / (total * total)
    return float((p_agree - p_chance) / (1.0 - p_chance))


def metric_triple(matrix) -> MetricTriple:
    """All three metrics of one confusion matrix."""
    return MetricTriple(mcr_total=mcr_total(matrix),
                        mcr_class=mcr_class(matrix),
                        kappa=kappa(matrix))
