"""Labeled point corpora: containers, CSV round-trip, synthetic generation.

A corpus is a flat table of d-dimensional feature rows with one string class
label each. Class labels are interned into a fixed ordered universe so the
rest of the package can work on dense integer codes.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass

import numpy as np

from .seeds import substream

logger = logging.getLogger(__name__)

# Exact float64 round-trip through text.
FLOAT_FORMAT = "%.17g"


class PointFileError(ValueError):
    """Base class for problems in a point CSV file."""


class EmptyPointFileError(PointFileError):
    """File has no header row at all."""


class MalformedRowError(PointFileError):
    """Row has the wrong number of fields, or the header is unusable."""


class FeatureValueError(PointFileError):
    """A feature field is not a finite number."""


class UnknownLabelError(PointFileError):
    """A label falls outside an explicitly supplied class universe."""


@dataclass(frozen=True)
class PointRecord:
    """One labeled point, as plain Python values."""

    features: tuple[float, ...]
    label: str

    def __post_init__(self):
        if len(self.features) < 1:
            raise ValueError("a point needs at least one feature")
        if not all(math.isfinite(v) for v in self.features):
            raise ValueError("point features must be finite")


class Dataset:
    """Immutable labeled point set.

    ``features`` is an (N, d) float64 matrix, ``labels`` an (N,) array of
    integer codes into ``class_names``. Arrays are marked read-only, so a
    Dataset can be shared freely across threads and worker processes.
    """

    __slots__ = ("features", "labels", "class_names")

    def __init__(self, features, labels, class_names):
        features = np.ascontiguousarray(features, dtype=np.float64)
        labels = np.ascontiguousarray(labels, dtype=np.int64)
        if features.ndim != 2:
            raise ValueError("features must be a 2-D array")
        if features.shape[1] < 1:
            raise ValueError("need at least one feature column")
        if labels.shape != (features.shape[0],):
            raise ValueError("labels must be one code per feature row")
        names = tuple(str(n) for n in class_names)
        if len(set(names)) != len(names):
            raise ValueError("duplicate class names in universe")
        if features.size and not np.all(np.isfinite(features)):
            raise ValueError("features must be finite")
        if labels.size and (labels.min() < 0 or labels.max() >= len(names)):
            raise ValueError("label code outside the class universe")
        features.setflags(write=False)
        labels.setflags(write=False)
        self.features = features
        self.labels = labels
        self.class_names = names

    @property
    def n_records(self) -> int:
        return self.features.shape[0]

    @property
    def dimensionality(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def record(self, i: int) -> PointRecord:
        return PointRecord(tuple(float(v) for v in self.features[i]),
                           self.class_names[self.labels[i]])

    def label_names(self) -> list[str]:
        """Per-record label strings, in record order."""
        return [self.class_names[c] for c in self.labels]

    def __len__(self) -> int:
        return self.n_records

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.class_names == other.class_names
                and np.array_equal(self.features, other.features)
                and np.array_equal(self.labels, other.labels))

    __hash__ = None  # defining __eq__ without hashing; Datasets are not dict keys

    def __repr__(self) -> str:
        return (f"Dataset(n_records={self.n_records}, "
                f"dimensionality={self.dimensionality}, "
                f"n_classes={self.n_classes})")


@dataclass(frozen=True)
class ClassHistogram:
    """Per-class record counts over an ordered class universe."""

    classes: tuple[str, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.classes) != len(self.counts):
            raise ValueError("classes and counts must align")
        if len(set(self.classes)) != len(self.classes):
            raise ValueError("duplicate class names")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")

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

    def counts_array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.int64)


def class_histogram(data: Dataset) -> ClassHistogram:
    """Count records per class over the dataset's full universe.

    Classes with no records appear with count 0, so the histogram total
    always equals the record count.
    """
    counts = np.bincount(data.labels, minlength=data.n_classes)
    return ClassHistogram(data.class_names, tuple(int(c) for c in counts))


@dataclass(frozen=True)
class PointSchema:
    """Column layout for a point CSV file.

    With the defaults, every non-label column in the header is taken as a
    feature (in header order) and the class universe is the sorted set of
    labels seen in the file.
    """

    feature_columns: tuple[str, ...] | None = None
    label_column: str = "class"
    class_universe: tuple[str, ...] | None = None


def load_points(path, schema: PointSchema | None = None) -> Dataset:
    """Read a labeled point CSV into a Dataset.

    The file must have a header naming the feature columns and one label
    column. Errors carry the 1-based line number of the offending row.
    """
    schema = schema or PointSchema()
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyPointFileError(f"{path}: file is empty")
        if schema.label_column not in header:
            raise MalformedRowError(
                f"{path}: header has no {schema.label_column!r} column")
        label_pos = header.index(schema.label_column)
        if schema.feature_columns is None:
            feature_cols = [c for c in header if c != schema.label_column]
        else:
            feature_cols = list(schema.feature_columns)
            missing = [c for c in feature_cols if c not in header]
            if missing:
                raise MalformedRowError(
                    f"{path}: header lacks feature columns {missing}")
        if not feature_cols:
            raise MalformedRowError(f"{path}: no feature columns in header")
        feat_pos = [header.index(c) for c in feature_cols]

        universe_set = (set(schema.class_universe)
                        if schema.class_universe is not None else None)
        rows: list[list[float]] = []
        label_strings: list[str] = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise MalformedRowError(
                    f"{path}: line {lineno}: expected {len(header)} fields, "
                    f"got {len(row)}")
            values = []
            for col, pos in zip(feature_cols, feat_pos):
                text = row[pos]
                try:
                    v = float(text)
                except ValueError:
                    raise FeatureValueError(
                        f"{path}: line {lineno}: column {col!r}: "
                        f"not a number: {text!r}") from None
                if not math.isfinite(v):
                    raise FeatureValueError(
                        f"{path}: line {lineno}: column {col!r}: "
                        f"non-finite value {text!r}")
                values.append(v)
            label = row[label_pos]
            if universe_set is not None and label not in universe_set:
                raise UnknownLabelError(
                    f"{path}: line {lineno}: unknown class {label!r}")
            rows.append(values)
            label_strings.append(label)

    if schema.class_universe is not None:
        names = tuple(schema.class_universe)
    else:
        names = tuple(sorted(set(label_strings)))
    code = {n: i for i, n in enumerate(names)}
    features = np.asarray(rows, dtype=np.float64)
    if features.size == 0:
        features = features.reshape(0, len(feature_cols))
    labels = np.asarray([code[s] for s in label_strings], dtype=np.int64)
    return Dataset(features, labels, names)


def save_points(data: Dataset, path) -> None:
    """Write a Dataset as CSV with canonical header f1..fd,class.

    Features are printed with 17 significant digits so a reload reproduces
    the exact float64 values.
    """
    d = data.dimensionality
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"f{i + 1}" for i in range(d)] + ["class"])
        names = data.class_names
        for i in range(data.n_records):
            row = [FLOAT_FORMAT % v for v in data.features[i]]
            row.append(names[data.labels[i]])
            writer.writerow(row)


def split_complement(data: Dataset, sample) -> Dataset:
    """Records of ``data`` not picked by ``sample``, in original order."""
    idx = np.asarray(sample.indices, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= data.n_records):
        raise ValueError("sample index out of range")
    if np.unique(idx).size != idx.size:
        raise ValueError("sample indices must be distinct")
    mask = np.ones(data.n_records, dtype=bool)
    mask[idx] = False
    return Dataset(data.features[mask], data.labels[mask], data.class_names)


# ---------------------------------------------------------------------------
# Synthetic corpora


@dataclass(frozen=True)
class ClassSpec:
    """Generator parameters for one synthetic class."""

    name: str
    count: int
    center: tuple[float, ...]
    spread: float = 1.0

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("class count must be nonnegative")
        if not (self.spread > 0 and math.isfinite(self.spread)):
            raise ValueError("spread must be a positive finite number")
        if not all(math.isfinite(v) for v in self.center):
            raise ValueError("center must be finite")


@dataclass(frozen=True)
class SynthSpec:
    """Full description of a synthetic corpus.

    ``overlap`` in [0, 1] pulls every class center toward the common mean of
    all centers: 0 leaves the configured geometry untouched, 1 collapses all
    classes onto one point.
    """

    classes: tuple[ClassSpec, ...]
    dimensionality: int
    overlap: float = 0.0

    def __post_init__(self):
        if self.dimensionality < 1:
            raise ValueError("dimensionality must be at least 1")
        if not self.classes:
            raise ValueError("need at least one class")
        names = [c.name for c in self.classes]
        if len(set(names)) != len(names):
            raise ValueError("duplicate class names")
        for c in self.classes:
            if len(c.center) != self.dimensionality:
                raise ValueError(
                    f"class {c.name!r}: center has {len(c.center)} "
                    f"coordinates, expected {self.dimensionality}")
        if not (0.0 <= self.overlap <= 1.0):
            raise ValueError("overlap must lie in [0, 1]")

    @property
    def class_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.classes)

    @property
    def total(self) -> int:
        return sum(c.count for c in self.classes)

    def pulled_centers(self) -> np.ndarray:
        """(K, d) effective centers after the overlap pull."""
        centers = np.asarray([c.center for c in self.classes], dtype=np.float64)
        common = centers.mean(axis=0)
        return (1.0 - self.overlap) * centers + self.overlap * common


def synthesize(spec: SynthSpec, seed: int) -> Dataset:
    """Draw a corpus with exactly the per-class counts of ``spec``.

    Each class is an isotropic Gaussian blob around its pulled center, drawn
    from its own substream keyed by (seed, class name) so one class's data is
    unaffected by edits to the others. Records come out in class blocks, in
    spec order.
    """
    if spec.total == 0:
        raise ValueError("synthetic spec has zero total count")
    centers = spec.pulled_centers()
    blocks = []
    labels = []
    for code, cs in enumerate(spec.classes):
        if cs.count == 0:
            continue
        rng = substream(seed, "class", cs.name)
        pts = centers[code] + cs.spread * rng.standard_normal(
            (cs.count, spec.dimensionality))
        blocks.append(pts)
        labels.append(np.full(cs.count, code, dtype=np.int64))
    features = np.vstack(blocks)
    return Dataset(features, np.concatenate(labels), spec.class_names)


def scale_counts(counts: dict[str, int], total: int) -> dict[str, int]:
    """Rescale an integer histogram to a new total, preserving proportions.

    Largest-remainder rounding in exact integer arithmetic: every class gets
    the floor of its proportional share, and the leftover units go to the
    classes with the largest remainders (ties broken by name). The result
    sums to ``total`` exactly.
    """
    if total < 0:
        raise ValueError("total must be nonnegative")
    if any(c < 0 for c in counts.values()):
        raise ValueError("counts must be nonnegative")
    grand = sum(counts.values())
    if grand == 0:
        raise ValueError("cannot rescale an all-zero histogram")
    scaled = {name: c * total // grand for name, c in counts.items()}
    leftover = total - sum(scaled.values())
    by_remainder = sorted(counts,
                          key=lambda n: (-(counts[n] * total % grand), n))
    for name in by_remainder[:leftover]:
        scaled[name] += 1
    return scaled


# Headline class mix of the bundled synthetic fixture: a 2.87M-point airborne
# laser survey's ground-cover composition, heavily skewed toward ground.
GROUND_COVER_CLASS_COUNTS: dict[str, int] = {
    "asphalt": 20301,
    "bridge cables": 16240,
    "bridges": 173774,
    "bridges construction": 1819,
    "building roofs": 1383,
    "cars and other moving objects": 3912,
    "cement/concrete": 936,
    "decideous forest": 175103,
    "error class": 58,
    "gravel": 1903,
    "ground": 2401914,
    "power poles": 231,
    "road protection fence": 11169,
    "temporary objects": 1411,
    "undefined": 959,
    "walls/buildings": 13,
    "water": 61362,
}

# Per-class spread overrides for the default fixture. Ground is deliberately
# wide: it borders everything, which is what makes uninformed stratified
# training overreach into it.
DEFAULT_SPREADS: dict[str, float] = {
    "ground": 1.5,
}


def derived_center(name: str, dimensionality: int, scale: float) -> tuple[float, ...]:
    """Deterministic class center: a seeded direction of norm ``scale``.

    Keyed by class name only, so a class keeps its center when others are
    added or removed and regardless of any dataset seed.
    """
    g = substream("synth-center", name).standard_normal(dimensionality)
    g = scale * g / np.linalg.norm(g)
    return tuple(float(v) for v in g)


def default_synth_spec(total: int = 100_000,
                       dimensionality: int = 6,
                       overlap: float = 0.3,
                       class_sep: float = 3.0) -> SynthSpec:
    """The default fixture: the survey class mix rescaled to ``total`` points.

    Classes sit on a sphere of radius ``class_sep`` in seeded directions with
    unit spread (apart from DEFAULT_SPREADS overrides), then get pulled
    together by ``overlap``. Class order is sorted by name so that a CSV
    round-trip with an inferred universe preserves label codes.
    """
    counts = scale_counts(GROUND_COVER_CLASS_COUNTS, total)
    classes = tuple(
        ClassSpec(name=name,
                  count=counts[name],
                  center=derived_center(name, dimensionality, class_sep),
                  spread=DEFAULT_SPREADS.get(name, 1.0))
        for name in sorted(counts))
    return SynthSpec(classes=classes, dimensionality=dimensionality,
                     overlap=overlap)
