"""Sample designs over a labeled corpus.

Three designs are implemented: head-of-file truncation (the degenerate
baseline), simple random sampling without replacement, and per-class
stratified sampling with a half-the-class fallback for small classes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .corpus import ClassHistogram, Dataset, class_histogram
from .seeds import substream

logger = logging.getLogger(__name__)

HEAD = "head"
SRS = "srs"
STRATIFIED = "stratified"
_DESIGNS = (HEAD, SRS, STRATIFIED)


@dataclass(frozen=True)
class Sample:
    """A drawn sample: distinct record indices plus one base weight each.

    Base weights are all 1.0 at draw time; survey-style corrections are
    applied downstream and never mutate the sample itself.
    """

    indices: np.ndarray
    weights: np.ndarray
    design: str
    seed: int | None = None
    per_class: int | None = None

    def __post_init__(self):
        idx = np.ascontiguousarray(self.indices, dtype=np.int64)
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        if idx.ndim != 1 or w.shape != idx.shape:
            raise ValueError("indices and weights must be aligned 1-D arrays")
        if idx.size and idx.min() < 0:
            raise ValueError("indices must be nonnegative")
        if np.unique(idx).size != idx.size:
            raise ValueError("indices must be distinct")
        if w.size and not (np.all(np.isfinite(w)) and np.all(w > 0)):
            raise ValueError("weights must be positive and finite")
        if self.design not in _DESIGNS:
            raise ValueError(f"unknown design {self.design!r}")
        idx.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.indices.size


@dataclass(frozen=True)
class Allocation:
    """Per-class sample sizes for a stratified draw at one target."""

    classes: tuple[str, ...]
    counts: tuple[int, ...]
    requested: int

    def __post_init__(self):
        if len(self.classes) != len(self.counts):
            raise ValueError("classes and counts must align")
        if any(c < 0 for c in self.counts):
            raise ValueError("allocation counts must be nonnegative")
        if self.requested < 1:
            raise ValueError("requested per-class size must be at least 1")

    @property
    def total(self) -> int:
        return sum(self.counts)

    def __getitem__(self, name: str) -> int:
        try:
            return self.counts[self.classes.index(name)]
        except ValueError:
            raise KeyError(name) from None

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.classes, self.counts))


def draw_without_replacement(pool: np.ndarray, k: int,
                             rng: np.random.Generator) -> np.ndarray:
    """First k entries of a partial Fisher-Yates shuffle of ``pool``.

    Every k-subset of the pool is equally likely, and k equal to the pool
    size returns a full random permutation. Runs in O(k) swaps after one
    vectorized draw of swap targets.
    """
    pool = np.asarray(pool)
    n = pool.size
    if not 0 <= k <= n:
        raise ValueError(f"cannot draw {k} from a pool of {n}")
    if k == 0:
        return pool[:0].copy()
    arr = pool.copy()
    targets = rng.integers(low=np.arange(k), high=n)
    for i in range(k):
        j = targets[i]
        arr[i], arr[j] = arr[j], arr[i]
    return arr[:k].copy()


def sample_head(data: Dataset, n: int) -> Sample:
    """The first n records in file order. Deterministic, no seed involved."""
    if not 0 <= n <= data.n_records:
        raise ValueError(f"head size {n} outside [0, {data.n_records}]")
    return Sample(indices=np.arange(n, dtype=np.int64),
                  weights=np.ones(n), design=HEAD)


def sample_srs(data: Dataset, n: int, seed: int) -> Sample:
    """Simple random sample of n records without replacement."""
    if not 0 <= n <= data.n_records:
        raise ValueError(f"sample size {n} outside [0, {data.n_records}]")
    idx = draw_without_replacement(np.arange(data.n_records, dtype=np.int64),
                                   n, substream(seed))
    return Sample(indices=idx, weights=np.ones(n), design=SRS, seed=seed)


def stratified_allocation(hist: ClassHistogram, per_class: int) -> Allocation:
    """Per-class sizes under the half-the-class rule.

    A class with at least twice the target contributes exactly ``per_class``
    records; a smaller class contributes floor(half its size). The floor
    means a one-record class contributes nothing.
    """
    if per_class < 1:
        raise ValueError("per-class target must be at least 1")
    counts = hist.counts_array()
    alloc = np.where(counts >= 2 * per_class, per_class, counts // 2)
    return Allocation(classes=hist.classes,
                      counts=tuple(int(a) for a in alloc),
                      requested=per_class)


def sample_stratified(data: Dataset, per_class: int, seed: int) -> Sample:
    """Independent per-class draws at the half-the-class allocation.

    Each class draws from its own substream keyed by (seed, class code), so
    the records one class picks do not depend on any other class's size.
    """
    hist = class_histogram(data)
    alloc = stratified_allocation(hist, per_class)
    chunks = []
    for code, name in enumerate(data.class_names):
        n_h = hist.counts[code]
        take = alloc.counts[code]
        if n_h > 0 and take == 0:
            logger.info("class %r has %d record(s); the half rule leaves it "
                        "unsampled at target %d", name, n_h, per_class)
        if take == 0:
            continue
        pool = np.flatnonzero(data.labels == code)
        chunks.append(draw_without_replacement(pool, take,
                                               substream(seed, code)))
    idx = (np.concatenate(chunks) if chunks
           else np.empty(0, dtype=np.int64))
    return Sample(indices=idx, weights=np.ones(idx.size), design=STRATIFIED,
                  seed=seed, per_class=per_class)
