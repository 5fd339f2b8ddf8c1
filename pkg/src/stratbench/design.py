"""Corrections for samples whose class mix does not match the population.

Two routes are provided: post-stratification weights, which rescale each
sampled record so weighted class masses match population counts, and prior
vectors, which leave the records alone and instead tell the tree grower the
true class shares.
"""

from __future__ import annotations

import logging

import numpy as np

from .corpus import ClassHistogram
from .sampling import Sample

logger = logging.getLogger(__name__)


def post_stratification_weights(sample: Sample, labels: np.ndarray,
                                population: ClassHistogram) -> np.ndarray:
    """Weight N_h / n_h for every sampled record of class h.

    ``labels`` are the source dataset's class codes (aligned to the indices
    in ``sample``); ``population`` gives the N_h over the same universe.
    The weighted class mass n_h * (N_h / n_h) then reproduces N_h exactly
    for every sampled class. Unsampled classes simply get no weight mass.
    """
    labels = np.asarray(labels)
    if sample.size == 0:
        raise ValueError("cannot weight an empty sample")
    lab = labels[sample.indices]
    pop = population.counts_array()
    n_h = np.bincount(lab, minlength=len(population.classes))
    bad = (n_h > 0) & (pop == 0)
    if np.any(bad):
        names = [population.classes[i] for i in np.flatnonzero(bad)]
        raise ValueError(f"sampled classes absent from population: {names}")
    absent = np.flatnonzero((n_h == 0) & (pop > 0))
    if absent.size:
        logger.info("post-stratification: %d class(es) not in the sample "
                    "receive no weight mass", absent.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(n_h > 0, pop / np.maximum(n_h, 1), 0.0)
    return ratio[lab]


def population_priors(hist: ClassHistogram) -> np.ndarray:
    """Class shares N_h / N of a population histogram, in class order."""
    total = hist.total
    if total == 0:
        raise ValueError("population histogram is empty")
    return hist.counts_array() / float(total)


def empirical_priors(sample: Sample, labels: np.ndarray,
                     weights: np.ndarray | None = None,
                     n_classes: int | None = None) -> np.ndarray:
    """Weighted class shares realized by a sample.

    Defaults to the sample's own base weights. Invariant to rescaling all
    weights by a common positive factor.
    """
    if sample.size == 0:
        raise ValueError("cannot take priors of an empty sample")
    labels = np.asarray(labels)
    w = sample.weights if weights is None else np.asarray(weights, dtype=np.float64)
    if w.shape != sample.indices.shape:
        raise ValueError("weights must align with the sample")
    if not (np.all(np.isfinite(w)) and np.all(w > 0)):
        raise ValueError("weights must be positive and finite")
    lab = labels[sample.indices]
    k = n_classes if n_classes is not None else int(lab.max()) + 1
    mass = np.bincount(lab, weights=w, minlength=k)
    return mass / mass.sum()
