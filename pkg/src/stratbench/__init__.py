"""Sampling-design experiments for ground-cover classification trees.

The package measures how the choice of training sample design (head of
file, simple random, stratified with and without corrections) changes the
accuracy of Gini-grown classification trees on heavily class-skewed point
data.
"""

from .cart import (SplitCandidate, Tree, TreeParams, best_split,
                   gini_impurity, grow_tree, load_tree, node_class_probs,
                   parse_tree, save_tree, serialize_tree)
from .config import (load_experiment_config, load_synth_spec,
                     write_experiment_config, write_synth_spec)
from .corpus import (GROUND_COVER_CLASS_COUNTS, ClassHistogram, ClassSpec,
                     Dataset, PointRecord, PointSchema, SynthSpec,
                     class_histogram, default_synth_spec, load_points,
                     save_points, scale_counts, split_complement, synthesize)
from .design import (empirical_priors, population_priors,
                     post_stratification_weights)
from .harness import (METHODS, CellResult, DataSource, ExperimentConfig,
                      SizeSpec, SummaryRow, cell_seed,
                      default_experiment_config, emit_results, emit_summary,
                      method_means, read_results, resolve_dataset, run_cell,
                      run_experiment, summarize, trend_report)
from .metrics import (MetricTriple, confusion_matrix, kappa, mcr_class,
                      mcr_total, metric_triple)
from .sampling import (Allocation, Sample, draw_without_replacement,
                       sample_head, sample_srs, sample_stratified,
                       stratified_allocation)
from .seeds import derive_seed, substream

__version__ = "0.1.0"

__all__ = [
    "GROUND_COVER_CLASS_COUNTS", "METHODS", "Allocation", "CellResult",
    "ClassHistogram", "ClassSpec", "DataSource", "Dataset",
    "ExperimentConfig", "MetricTriple", "PointRecord", "PointSchema",
    "Sample", "SizeSpec", "SplitCandidate", "SummaryRow", "SynthSpec",
    "Tree", "TreeParams", "best_split", "cell_seed", "class_histogram",
    "confusion_matrix", "default_experiment_config", "default_synth_spec",
    "derive_seed", "draw_without_replacement", "emit_results",
    "emit_summary", "empirical_priors", "gini_impurity", "grow_tree",
    "kappa", "load_experiment_config", "load_points", "load_synth_spec",
    "load_tree", "mcr_class", "mcr_total", "method_means", "metric_triple",
    "node_class_probs", "parse_tree", "population_priors",
    "post_stratification_weights", "read_results", "resolve_dataset",
    "run_cell", "run_experiment", "sample_head", "sample_srs",
    "sample_stratified", "save_points", "save_tree", "scale_counts",
    "serialize_tree", "split_complement", "stratified_allocation",
    "substream", "summarize", "synthesize", "trend_report",
    "write_experiment_config", "write_synth_spec",
]
