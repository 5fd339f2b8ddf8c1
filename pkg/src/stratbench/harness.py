"""Experiment grid runner: methods x sizes x replicates, with CSV output.

Four training methods are compared at matched cost. For a per-class target
the harness first computes the stratified allocation, then gives simple
random sampling the same total budget, so every method in a size column
trains on the same number of records.

Every cell derives its own 64-bit seed from (master seed, method, size
label, replicate), which makes results independent of execution order and
byte-identical across serial and parallel runs.
"""

from __future__ import annotations

import csv
import logging
import statistics
from dataclasses import dataclass, field, replace

import joblib
import numpy as np

from .cart import TreeParams, grow_tree
from .corpus import (Dataset, SynthSpec, class_histogram, default_synth_spec,
                     load_points, split_complement, synthesize)
from .design import population_priors, post_stratification_weights
from .metrics import MetricTriple, confusion_matrix, metric_triple
from .sampling import sample_srs, sample_stratified, stratified_allocation
from .seeds import derive_seed

logger = logging.getLogger(__name__)

METHOD_SRS = "srs"
METHOD_STRAT_UNINFORMED = "strat_uninformed"
METHOD_STRAT_POSTSTRAT = "strat_poststrat"
METHOD_STRAT_PRIORS = "strat_priors"
METHODS = (METHOD_SRS, METHOD_STRAT_UNINFORMED, METHOD_STRAT_POSTSTRAT,
           METHOD_STRAT_PRIORS)

RESULT_HEADER = ("method", "size_label", "replicate", "seed", "n_sample",
                 "n_eval", "mcr_total", "mcr_class", "kappa", "status")
SUMMARY_HEADER = ("method", "size_label", "metric", "mean", "sd", "min",
                  "max", "replicates")
_METRIC_NAMES = ("mcr_total", "mcr_class", "kappa")


@dataclass(frozen=True)
class SizeSpec:
    """One size column: a label and the stratified per-class target."""

    label: str
    per_class: int

    def __post_init__(self):
        if not self.label:
            raise ValueError("size label must be nonempty")
        if self.per_class < 1:
            raise ValueError("per-class target must be at least 1")


@dataclass(frozen=True)
class DataSource:
    """Where the corpus comes from: a CSV path or a synthetic spec."""

    path: str | None = None
    synth: SynthSpec | None = None
    synth_seed: int | None = None

    def __post_init__(self):
        if (self.path is None) == (self.synth is None):
            raise ValueError("exactly one of path or synth must be given")
        if self.path is not None and self.synth_seed is not None:
            raise ValueError("synth_seed only applies to synthetic sources")


@dataclass(frozen=True)
class ExperimentConfig:
    source: DataSource
    sizes: tuple[SizeSpec, ...]
    methods: tuple[str, ...] = METHODS
    replicates: int = 50
    master_seed: int = 20240101
    tree: TreeParams = field(default_factory=TreeParams)

    def __post_init__(self):
        if not self.sizes:
            raise ValueError("need at least one size")
        labels = [s.label for s in self.sizes]
        if len(set(labels)) != len(labels):
            raise ValueError("size labels must be distinct")
        if not self.methods:
            raise ValueError("need at least one method")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods: {unknown}")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("methods must be distinct")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if self.tree.priors is not None:
            raise ValueError("config tree params must not carry priors; "
                             "priors are derived per method")


@dataclass(frozen=True)
class CellResult:
    """One replicate's outcome. Metric fields are None when status != ok."""

    method: str
    size_label: str
    replicate: int
    seed: int
    n_sample: int
    n_eval: int
    mcr_total: float | None
    mcr_class: float | None
    kappa: float | None
    status: str


@dataclass(frozen=True)
class SummaryRow:
    method: str
    size_label: str
    metric: str
    mean: float
    sd: float
    min: float
    max: float
    replicates: int


def default_experiment_config() -> ExperimentConfig:
    """The stock benchmark: default fixture, three sizes, all four methods."""
    return ExperimentConfig(
        source=DataSource(synth=default_synth_spec()),
        sizes=(SizeSpec("S6", 64), SizeSpec("S7", 32), SizeSpec("S8", 16)),
        methods=METHODS,
        replicates=50,
        master_seed=20240101,
        tree=TreeParams(),
    )


def resolve_dataset(config: ExperimentConfig) -> Dataset:
    """Load or synthesize the corpus a config points at."""
    src = config.source
    if src.path is not None:
        return load_points(src.path)
    seed = src.synth_seed
    if seed is None:
        seed = derive_seed(config.master_seed, "data")
    return synthesize(src.synth, seed)


def cell_seed(master_seed: int, method: str, size_label: str,
              replicate: int) -> int:
    return derive_seed(master_seed, method, size_label, replicate)


def run_cell(data: Dataset, method: str, size_param: int, seed: int,
             tree_params: TreeParams) -> tuple[MetricTriple | None, int, int, str]:
    """One replicate: draw, correct, train, score the complement.

    ``size_param`` is the total budget n for srs and the per-class target
    for the stratified methods. Domain failures (empty sample, degenerate
    metrics) are reported in the status string rather than raised, so one
    bad cell cannot sink a whole grid.

    Returns (metrics or None, realized sample size, evaluation size, status).
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    sample = None
    try:
        if method == METHOD_SRS:
            sample = sample_srs(data, size_param, seed)
        else:
            sample = sample_stratified(data, size_param, seed)
        weights = sample.weights
        priors = None
        hist = class_histogram(data)
        if method == METHOD_STRAT_POSTSTRAT:
            weights = post_stratification_weights(sample, data.labels, hist)
        elif method == METHOD_STRAT_PRIORS:
            priors = population_priors(hist)
        params = replace(tree_params, priors=priors)
        tree = grow_tree(data.features[sample.indices],
                         data.labels[sample.indices],
                         weights, params, class_names=data.class_names)
        holdout = split_complement(data, sample)
        predicted = tree.predict_batch(holdout.features)
        matrix = confusion_matrix(holdout.labels, predicted, data.n_classes)
        triple = metric_triple(matrix)
        return triple, sample.size, holdout.n_records, "ok"
    except ValueError as exc:
        n_sample = 0 if sample is None else sample.size
        return None, n_sample, data.n_records - n_sample, f"failed: {exc}"


def _run_task(data, method, size_label, size_param, rep, seed,
              tree_params) -> CellResult:
    triple, n_sample, n_eval, status = run_cell(data, method, size_param,
                                                seed, tree_params)
    return CellResult(
        method=method, size_label=size_label, replicate=rep, seed=seed,
        n_sample=n_sample, n_eval=n_eval,
        mcr_total=None if triple is None else triple.mcr_total,
        mcr_class=None if triple is None else triple.mcr_class,
        kappa=None if triple is None else triple.kappa,
        status=status)


def run_experiment(config: ExperimentConfig, data: Dataset | None = None,
                   jobs: int = 1) -> list[CellResult]:
    """Run the whole grid and return one row per (method, size, replicate).

    Rows come back ordered by method, then size, then replicate, following
    config order. Output is identical for any ``jobs`` value because each
    cell is seeded independently of scheduling.
    """
    if data is None:
        data = resolve_dataset(config)
    hist = class_histogram(data)
    srs_budget = {sz.label: stratified_allocation(hist, sz.per_class).total
                  for sz in config.sizes}
    tasks = []
    for method in config.methods:
        for sz in config.sizes:
            size_param = (srs_budget[sz.label] if method == METHOD_SRS
                          else sz.per_class)
            for rep in range(config.replicates):
                seed = cell_seed(config.master_seed, method, sz.label, rep)
                tasks.append((method, sz.label, size_param, rep, seed))
    if jobs == 1:
        rows = [_run_task(data, m, lbl, sp, rep, seed, config.tree)
                for m, lbl, sp, rep, seed in tasks]
    else:
        rows = joblib.Parallel(n_jobs=jobs)(
            joblib.delayed(_run_task)(data, m, lbl, sp, rep, seed, config.tree)
            for m, lbl, sp, rep, seed in tasks)
    failed = [r for r in rows if r.status != "ok"]
    for r in failed:
        logger.warning("cell failed: method=%s size=%s replicate=%d: %s",
                       r.method, r.size_label, r.replicate, r.status)
    if failed:
        logger.warning("%d of %d cells failed", len(failed), len(rows))
    return rows


def summarize(rows: list[CellResult]) -> list[SummaryRow]:
    """Per (method, size, metric) moments over successful replicates.

    The spread is the population standard deviation, so one replicate gives
    sd 0 rather than an undefined value.
    """
    ok = [r for r in rows if r.status == "ok"]
    if not ok:
        raise ValueError("all cells failed; nothing to summarize")
    groups: dict[tuple[str, str], list[CellResult]] = {}
    for r in ok:
        groups.setdefault((r.method, r.size_label), []).append(r)
    out = []
    for (method, label), cells in groups.items():
        for metric in _METRIC_NAMES:
            vals = [getattr(c, metric) for c in cells]
            out.append(SummaryRow(
                method=method, size_label=label, metric=metric,
                mean=statistics.fmean(vals),
                sd=float(np.std(vals)),
                min=min(vals), max=max(vals), replicates=len(vals)))
    return out


def method_means(rows: list[CellResult]) -> dict[tuple[str, str, str], float]:
    """Mean of each metric keyed by (method, size_label, metric)."""
    return {(s.method, s.size_label, s.metric): s.mean
            for s in summarize(rows)}


def trend_report(rows: list[CellResult]) -> str:
    """Readable comparison of srs against the stratified variants.

    For every size: srs should have the lowest mean total error and the
    highest mean kappa, while uninformed stratification should have the
    lowest mean per-class error. Each line states one comparison and whether
    it holds on this result set.
    """
    means = method_means(rows)
    methods = list(dict.fromkeys(r.method for r in rows))
    sizes = list(dict.fromkeys(r.size_label for r in rows))
    strats = [m for m in methods if m != METHOD_SRS]
    lines = []
    if METHOD_SRS not in methods or not strats:
        return "trend report: needs srs plus at least one stratified method\n"

    def fetch(method, size, metric):
        return means.get((method, size, metric))

    for size in sizes:
        for metric, better_low in (("mcr_total", True), ("kappa", False)):
            a = fetch(METHOD_SRS, size, metric)
            if a is None:
                continue
            for m in strats:
                b = fetch(m, size, metric)
                if b is None:
                    continue
                holds = a < b if better_low else a > b
                rel = "<" if better_low else ">"
                lines.append(f"{metric} {size}: srs {a:.6f} {rel} "
                             f"{m} {b:.6f} {'ok' if holds else 'VIOLATED'}")
        if METHOD_STRAT_UNINFORMED in methods:
            a = fetch(METHOD_STRAT_UNINFORMED, size, "mcr_class")
            b = fetch(METHOD_SRS, size, "mcr_class")
            if a is not None and b is not None:
                holds = a < b
                lines.append(f"mcr_class {size}: strat_uninformed {a:.6f} < "
                             f"srs {b:.6f} {'ok' if holds else 'VIOLATED'}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# CSV round-trip


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def emit_results(rows: list[CellResult], path) -> None:
    """Write the result grid as CSV. Byte-deterministic for equal rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_HEADER)
        for r in rows:
            writer.writerow([r.method, r.size_label, r.replicate, r.seed,
                             r.n_sample, r.n_eval, _fmt(r.mcr_total),
                             _fmt(r.mcr_class), _fmt(r.kappa), r.status])


def read_results(path) -> list[CellResult]:
    """Parse a result CSV back into rows; inverse of emit_results."""
    rows = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(RESULT_HEADER):
            raise ValueError(f"{path}: unexpected result header {header}")
        for rec in reader:
            if len(rec) != len(RESULT_HEADER):
                raise ValueError(f"{path}: bad result row {rec}")
            rows.append(CellResult(
                method=rec[0], size_label=rec[1], replicate=int(rec[2]),
                seed=int(rec[3]), n_sample=int(rec[4]), n_eval=int(rec[5]),
                mcr_total=float(rec[6]) if rec[6] else None,
                mcr_class=float(rec[7]) if rec[7] else None,
                kappa=float(rec[8]) if rec[8] else None,
                status=rec[9]))
    return rows


def emit_summary(summary: list[SummaryRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        for s in summary:
            writer.writerow([s.method, s.size_label, s.metric, repr(s.mean),
                             repr(s.sd), repr(s.min), repr(s.max),
                             s.replicates])
