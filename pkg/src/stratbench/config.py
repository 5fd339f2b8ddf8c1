"""YAML files for synthetic specs and experiment configs.

Both formats are plain mappings. A synthetic spec file looks like:

    dimensionality: 6
    overlap: 0.3
    class_sep: 3.0          # radius for classes without explicit centers
    classes:
      - name: ground
        count: 83618
        spread: 1.5
      - name: water
        count: 2136
        center: [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]

and an experiment config like:

    data:
      synth: default        # or {path: points.csv} or an inline spec
    sizes:
      - {label: S6, per_class: 64}
    methods: [srs, strat_uninformed, strat_poststrat, strat_priors]
    replicates: 50
    master_seed: 20240101
    tree: {cp: 0.01, min_split: 20, min_bucket: 7, max_depth: 30}
"""

from __future__ import annotations

import yaml

from .cart import TreeParams
from .corpus import (ClassSpec, SynthSpec, default_synth_spec, derived_center)
from .harness import (METHODS, DataSource, ExperimentConfig, SizeSpec,
                      default_experiment_config)


def synth_spec_from_dict(doc: dict) -> SynthSpec:
    if not isinstance(doc, dict):
        raise ValueError("synthetic spec must be a mapping")
    known = {"dimensionality", "overlap", "class_sep", "classes"}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"synthetic spec: unknown keys {sorted(unknown)}")
    try:
        d = int(doc["dimensionality"])
        raw_classes = doc["classes"]
    except KeyError as exc:
        raise ValueError(f"synthetic spec: missing key {exc}") from None
    overlap = float(doc.get("overlap", 0.0))
    class_sep = float(doc.get("class_sep", 3.0))
    if not isinstance(raw_classes, list) or not raw_classes:
        raise ValueError("synthetic spec: classes must be a nonempty list")
    classes = []
    for entry in raw_classes:
        if not isinstance(entry, dict) or "name" not in entry or "count" not in entry:
            raise ValueError(f"synthetic spec: bad class entry {entry!r}")
        extra = set(entry) - {"name", "count", "center", "spread"}
        if extra:
            raise ValueError(f"synthetic spec: class {entry['name']!r} has "
                             f"unknown keys {sorted(extra)}")
        name = str(entry["name"])
        center = entry.get("center")
        if center is None:
            center = derived_center(name, d, class_sep)
        else:
            center = tuple(float(v) for v in center)
        classes.append(ClassSpec(name=name, count=int(entry["count"]),
                                 center=center,
                                 spread=float(entry.get("spread", 1.0))))
    return SynthSpec(classes=tuple(classes), dimensionality=d, overlap=overlap)


def synth_spec_to_dict(spec: SynthSpec) -> dict:
    """Fully resolved form: centers always explicit."""
    return {
        "dimensionality": spec.dimensionality,
        "overlap": spec.overlap,
        "classes": [
            {"name": c.name, "count": c.count,
             "center": [float(v) for v in c.center], "spread": c.spread}
            for c in spec.classes
        ],
    }


def load_synth_spec(path) -> SynthSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return synth_spec_from_dict(yaml.safe_load(fh))


def write_synth_spec(spec: SynthSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(synth_spec_to_dict(spec), fh, sort_keys=False)


def _source_from_dict(doc) -> DataSource:
    if not isinstance(doc, dict):
        raise ValueError("experiment config: data must be a mapping")
    if "path" in doc and "synth" in doc:
        raise ValueError("experiment config: data takes path or synth, not both")
    if "path" in doc:
        return DataSource(path=str(doc["path"]))
    if "synth" in doc:
        raw = doc["synth"]
        spec = default_synth_spec() if raw == "default" else synth_spec_from_dict(raw)
        seed = doc.get("seed")
        return DataSource(synth=spec,
                          synth_seed=None if seed is None else int(seed))
    raise ValueError("experiment config: data needs a path or synth entry")


def experiment_config_from_dict(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ValueError("experiment config must be a mapping")
    known = {"data", "sizes", "methods", "replicates", "master_seed", "tree"}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"experiment config: unknown keys {sorted(unknown)}")
    if "data" not in doc or "sizes" not in doc:
        raise ValueError("experiment config: data and sizes are required")
    sizes = []
    for entry in doc["sizes"]:
        if not isinstance(entry, dict) or "label" not in entry or "per_class" not in entry:
            raise ValueError(f"experiment config: bad size entry {entry!r}")
        sizes.append(SizeSpec(label=str(entry["label"]),
                              per_class=int(entry["per_class"])))
    methods = tuple(str(m) for m in doc.get("methods", METHODS))
    tree_doc = doc.get("tree", {})
    if not isinstance(tree_doc, dict):
        raise ValueError("experiment config: tree must be a mapping")
    extra = set(tree_doc) - {"cp", "min_split", "min_bucket", "max_depth"}
    if extra:
        raise ValueError(f"experiment config: tree has unknown keys {sorted(extra)}")
    defaults = TreeParams()
    tree = TreeParams(
        cp=float(tree_doc.get("cp", defaults.cp)),
        min_split=int(tree_doc.get("min_split", defaults.min_split)),
        min_bucket=int(tree_doc.get("min_bucket", defaults.min_bucket)),
        max_depth=int(tree_doc.get("max_depth", defaults.max_depth)))
    return ExperimentConfig(
        source=_source_from_dict(doc["data"]),
        sizes=tuple(sizes),
        methods=methods,
        replicates=int(doc.get("replicates", 50)),
        master_seed=int(doc.get("master_seed", 20240101)),
        tree=tree)


def experiment_config_to_dict(config: ExperimentConfig) -> dict:
    if config.source.path is not None:
        data: dict = {"path": config.source.path}
    else:
        data = {"synth": synth_spec_to_dict(config.source.synth)}
        if config.source.synth_seed is not None:
            data["seed"] = config.source.synth_seed
    return {
        "data": data,
        "sizes": [{"label": s.label, "per_class": s.per_class}
                  for s in config.sizes],
        "methods": list(config.methods),
        "replicates": config.replicates,
        "master_seed": config.master_seed,
        "tree": {"cp": config.tree.cp, "min_split": config.tree.min_split,
                 "min_bucket": config.tree.min_bucket,
                 "max_depth": config.tree.max_depth},
    }


def load_experiment_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return experiment_config_from_dict(yaml.safe_load(fh))


def write_experiment_config(config: ExperimentConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(experiment_config_to_dict(config), fh, sort_keys=False)


def write_default_files(config_path, spec_path) -> None:
    """Materialize the stock benchmark as editable YAML files."""
    write_experiment_config(default_experiment_config(), config_path)
    write_synth_spec(default_synth_spec(), spec_path)
