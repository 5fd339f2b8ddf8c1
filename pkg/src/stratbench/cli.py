"""Command line interface.

Subcommands: synth, sample, train, eval, experiment, init. Run
``stratbench <cmd> --help`` for flags.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from .cart import TreeParams, grow_tree, load_tree, save_tree
from .config import (load_experiment_config, load_synth_spec,
                     write_default_files)
from .corpus import (FLOAT_FORMAT, PointSchema, class_histogram, load_points,
                     save_points, synthesize, default_synth_spec)
from .design import population_priors
from .harness import (emit_results, emit_summary, run_experiment, summarize,
                      trend_report)
from .metrics import confusion_matrix, metric_triple
from .sampling import Sample, sample_head, sample_srs, sample_stratified


def _cmd_synth(args) -> int:
    spec = default_synth_spec() if args.spec is None else load_synth_spec(args.spec)
    data = synthesize(spec, args.seed)
    save_points(data, args.out)
    print(f"wrote {data.n_records} points, {data.n_classes} classes to {args.out}")
    return 0


def _cmd_sample(args) -> int:
    data = load_points(args.data)
    if args.design == "head":
        sample = sample_head(data, args.n)
    elif args.design == "srs":
        if args.seed is None:
            raise SystemExit("srs requires --seed")
        sample = sample_srs(data, args.n, args.seed)
    else:
        if args.seed is None or args.per_class is None:
            raise SystemExit("stratified requires --seed and --per-class")
        sample = sample_stratified(data, args.per_class, args.seed)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "weight"])
        for i, w in zip(sample.indices, sample.weights):
            writer.writerow([int(i), FLOAT_FORMAT % w])
    print(f"wrote {sample.size} sampled indices to {args.out}")
    return 0


def _read_sample_file(path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["index", "weight"]:
            raise SystemExit(f"{path}: expected header index,weight")
        idx, w = [], []
        for row in reader:
            idx.append(int(row[0]))
            w.append(float(row[1]))
    return np.asarray(idx, dtype=np.int64), np.asarray(w)


def _cmd_train(args) -> int:
    data = load_points(args.data)
    if args.sample is not None:
        idx, weights = _read_sample_file(args.sample)
        if idx.size and (idx.min() < 0 or idx.max() >= data.n_records):
            raise SystemExit(f"{args.sample}: index out of range")
        X, y = data.features[idx], data.labels[idx]
    else:
        X, y = data.features, data.labels
        weights = np.ones(data.n_records)
    priors = None
    if args.priors == "population":
        priors = population_priors(class_histogram(data))
    params = TreeParams(cp=args.cp, min_split=args.min_split,
                        min_bucket=args.min_bucket, max_depth=args.max_depth,
                        priors=priors)
    tree = grow_tree(X, y, weights, params, class_names=data.class_names)
    save_tree(tree, args.out)
    print(f"trained on {tree.n_train} records: {tree.n_nodes} nodes, "
          f"{tree.n_leaves} leaves, depth {tree.depth}; wrote {args.out}")
    return 0


def _cmd_eval(args) -> int:
    tree = load_tree(args.tree)
    schema = PointSchema(class_universe=tree.classes)
    data = load_points(args.data, schema)
    predicted = tree.predict_batch(data.features)
    matrix = confusion_matrix(data.labels, predicted, len(tree.classes))
    triple = metric_triple(matrix)
    lines = [",".join(["class"] + list(tree.classes))]
    for i, name in enumerate(tree.classes):
        lines.append(",".join([name] + [str(int(v)) for v in matrix[i]]))
    lines.append("metric,value")
    lines.append(f"mcr_total,{triple.mcr_total!r}")
    lines.append(f"mcr_class,{triple.mcr_class!r}")
    lines.append(f"kappa,{triple.kappa!r}")
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report)
    return 0


def _cmd_experiment(args) -> int:
    config = load_experiment_config(args.config)
    rows = run_experiment(config, jobs=args.jobs)
    emit_results(rows, args.out)
    print(f"wrote {len(rows)} result rows to {args.out}")
    ok = sum(r.status == "ok" for r in rows)
    if ok:
        if args.summary:
            emit_summary(summarize(rows), args.summary)
            print(f"wrote summary to {args.summary}")
        sys.stdout.write(trend_report(rows))
    failed = len(rows) - ok
    if failed:
        print(f"{failed} of {len(rows)} cells failed", file=sys.stderr)
        return 1
    return 0


def _cmd_init(args) -> int:
    write_default_files(args.config, args.spec)
    print(f"wrote {args.config} and {args.spec}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stratbench",
        description="Sampling-design experiments for classification trees "
                    "on skewed point data.")
    parser.add_argument("--verbose", action="store_true",
                        help="log progress details")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic corpus CSV")
    p.add_argument("--spec", help="synthetic spec YAML (default: bundled fixture)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("sample", help="draw a sample, write index,weight CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--design", choices=["head", "srs", "stratified"],
                   required=True)
    p.add_argument("--n", type=int, help="sample size for head/srs")
    p.add_argument("--per-class", type=int, help="stratified per-class target")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("train", help="grow a tree, write it as text")
    p.add_argument("--data", required=True)
    p.add_argument("--sample", help="index,weight CSV restricting training")
    p.add_argument("--priors", choices=["none", "population"], default="none")
    defaults = TreeParams()
    p.add_argument("--cp", type=float, default=defaults.cp)
    p.add_argument("--min-split", type=int, default=defaults.min_split)
    p.add_argument("--min-bucket", type=int, default=defaults.min_bucket)
    p.add_argument("--max-depth", type=int, default=defaults.max_depth)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="score a tree file against labeled points")
    p.add_argument("--tree", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", help="also write the report to this file")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("experiment", help="run a methods x sizes x replicates grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--summary", help="also write per-cell summary CSV")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers (output is identical for any value)")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("init", help="write the default config and spec YAML")
    p.add_argument("--config", default="experiment.yaml")
    p.add_argument("--spec", default="synth.yaml")
    p.set_defaults(func=_cmd_init)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "sample" and args.design in ("head", "srs") and args.n is None:
        raise SystemExit(f"{args.design} requires --n")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
