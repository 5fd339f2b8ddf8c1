"""Weighted, prior-aware binary classification trees with Gini splitting.

Class priors enter through per-class mass scaling: a record of class j with
weight w contributes w * priors[j] / total_j to every node it falls in, where
total_j is the weighted count of class j over the whole training set. With no
priors given, the priors default to the weighted empirical class shares and
the scaling collapses to plain weighted proportions. All impurity bookkeeping
runs on these scaled masses, so priors reshape both split selection and leaf
probabilities.

Node-size controls (min_split, min_bucket) act on raw record counts, not
weighted mass; together with the mass normalization this makes the grown tree
invariant to rescaling all weights by a common positive factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FLOAT_FORMAT = "%.17g"

# Decreases live on the probability-mass scale (at most 1). Candidates whose
# decreases differ by no more than this are treated as exact ties, which keeps
# split selection stable when equivalent partitions on different features
# round differently; genuine decreases sit many orders of magnitude higher.
SPLIT_TOL = 1e-12


def _as_priors(value) -> tuple[float, ...] | None:
    """Normalize priors to a plain tuple so params stay hashable/comparable."""
    if value is None:
        return None
    p = np.asarray(value, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError("priors must be a 1-D vector")
    if p.size and (not np.all(np.isfinite(p)) or np.any(p < 0)):
        raise ValueError("priors must be finite and nonnegative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("priors must sum to 1")
    return tuple(float(v) for v in p)


@dataclass(frozen=True)
class TreeParams:
    """Growth controls. Defaults mirror the usual CART tooling defaults.

    cp: minimum impurity decrease for a split, as a fraction of the root's
        prior-weighted Gini. min_split: smallest node (record count) worth
        attempting to split. min_bucket: smallest allowed child. max_depth:
        root sits at depth 0; a node at max_depth is always a leaf.
    """

    cp: float = 0.01
    min_split: int = 20
    min_bucket: int = 7
    max_depth: int = 30
    priors: tuple[float, ...] | None = None

    def __post_init__(self):
        if not (0.0 <= self.cp <= 1.0):
            raise ValueError("cp must lie in [0, 1]")
        if self.min_bucket < 1:
            raise ValueError("min_bucket must be at least 1")
        if self.min_split < 2 * self.min_bucket:
            raise ValueError("min_split must be at least twice min_bucket")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        object.__setattr__(self, "priors", _as_priors(self.priors))


@dataclass(frozen=True)
class SplitCandidate:
    """A scored axis-parallel split: value < threshold goes left."""

    feature: int
    threshold: float
    decrease: float
    left_counts: np.ndarray
    right_counts: np.ndarray


def gini_impurity(probs) -> float:
    """Gini impurity 1 - sum(p^2) of a probability vector."""
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("probs must be a nonempty 1-D vector")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValueError("probs must be finite and nonnegative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("probs must sum to 1")
    return float(1.0 - np.dot(p, p))


def _prior_scale(class_totals: np.ndarray,
                 priors: np.ndarray | None) -> np.ndarray:
    """Per-class factor turning weighted counts into prior-adjusted mass.

    scale[j] = priors[j] / total_j for represented classes, 0 for classes
    with no training mass. The default priors are the weighted class shares,
    for which the factor is the constant 1 / (total weighted count).
    """
    totals = np.asarray(class_totals, dtype=np.float64)
    if totals.ndim != 1:
        raise ValueError("class totals must be a 1-D vector")
    if np.any(totals < 0):
        raise ValueError("class totals must be nonnegative")
    if priors is None:
        grand = totals.sum()
        if grand <= 0:
            raise ValueError("no training mass")
        return np.where(totals > 0, 1.0 / grand, 0.0)
    p = np.asarray(priors, dtype=np.float64)
    if p.shape != totals.shape:
        raise ValueError("priors must align with class totals")
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(totals > 0, p / np.maximum(totals, 1e-300), 0.0)


def node_class_probs(node_counts, class_totals, priors=None) -> np.ndarray:
    """Prior-adjusted class probabilities of a node.

    node_counts are the node's weighted per-class counts; class_totals the
    training set's. Classes with zero training total get probability 0.
    """
    counts = np.asarray(node_counts, dtype=np.float64)
    scale = _prior_scale(class_totals, _as_priors(priors))
    if counts.shape != scale.shape:
        raise ValueError("node counts must align with class totals")
    if np.any(counts < 0):
        raise ValueError("node counts must be nonnegative")
    q = counts * scale
    mass = q.sum()
    if mass <= 0:
        raise ValueError("node has no probability mass")
    return q / mass


def _node_cost(q: np.ndarray) -> float:
    """Probability-share-weighted Gini p(t) * i(t), from scaled masses.

    Computed from normalized shares so a pure node costs exactly 0.0,
    not a rounding residue that could masquerade as a usable split.
    """
    p = q.sum()
    if p <= 0.0:
        return 0.0
    r = q / p
    return float(p * (1.0 - np.dot(r, r)))


def _scan_feature(x, y, w, scale, min_bucket, parent_cost, total_mass):
    """Best admissible cut on one feature.

    Cuts sit at midpoints between consecutive distinct sorted values. Returns
    (decrease, threshold, left_counts) of the best cut, or None. Within the
    feature, exact ties go to the smallest threshold.
    """
    order = np.argsort(x, kind="stable")
    xs = x[order]
    n = xs.size
    if n < 2 or xs[0] == xs[-1]:
        return None
    k = scale.size
    mass = np.zeros((n, k))
    mass[np.arange(n), y[order]] = w[order]
    cum = np.cumsum(mass, axis=0)
    left_counts = cum[:-1]
    left = left_counts * scale
    right = total_mass - left
    pl = left.sum(axis=1)
    pr = right.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        rl = left / np.maximum(pl, 1e-300)[:, None]
        rr = right / np.maximum(pr, 1e-300)[:, None]
        cost_l = np.where(pl > 0, pl * (1.0 - (rl * rl).sum(axis=1)), 0.0)
        cost_r = np.where(pr > 0, pr * (1.0 - (rr * rr).sum(axis=1)), 0.0)
    decrease = parent_cost - cost_l - cost_r
    sizes = np.arange(1, n)
    ok = ((xs[1:] > xs[:-1])
          & (sizes >= min_bucket)
          & (n - sizes >= min_bucket))
    if not ok.any():
        return None
    decrease = np.where(ok, decrease, -np.inf)
    best = float(decrease.max())
    if best <= SPLIT_TOL:
        return None
    # smallest threshold among tied-within-tolerance maxima
    i = int(np.flatnonzero(decrease >= best - SPLIT_TOL)[0])
    best = float(decrease[i])
    lo, hi = float(xs[i]), float(xs[i + 1])
    threshold = 0.5 * (lo + hi)
    if threshold <= lo:
        # lo and hi are adjacent floats; snap to hi so value < threshold
        # still reproduces the scanned partition (equality routes right).
        threshold = hi
    return best, threshold, left_counts[i].copy()


def best_split(features, labels, weights, class_totals,
               params: TreeParams) -> SplitCandidate | None:
    """Exhaustive search for the impurity-optimal split of one node.

    ``class_totals`` are the weighted per-class totals of the whole training
    set; they fix the prior scaling and must not be recomputed per node.
    Ties across features go to the smallest feature index. Returns None when
    no admissible cut strictly decreases impurity.
    """
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    w = np.asarray(weights, dtype=np.float64)
    if X.ndim != 2 or y.shape != (X.shape[0],) or w.shape != y.shape:
        raise ValueError("features, labels and weights must align")
    scale = _prior_scale(class_totals, params.priors)
    counts = np.bincount(y, weights=w, minlength=scale.size)
    if counts.size > scale.size:
        raise ValueError("label code outside class totals")
    total_mass = counts * scale
    parent_cost = _node_cost(total_mass)
    best = None
    for f in range(X.shape[1]):
        hit = _scan_feature(X[:, f], y, w, scale, params.min_bucket,
                            parent_cost, total_mass)
        if hit is None:
            continue
        decrease, threshold, left_counts = hit
        if best is None or decrease > best.decrease + SPLIT_TOL:
            best = SplitCandidate(feature=f, threshold=threshold,
                                  decrease=decrease,
                                  left_counts=left_counts,
                                  right_counts=counts - left_counts)
    return best


class Tree:
    """A grown tree in flat-array form.

    Nodes are numbered in depth-first preorder (left subtree before right),
    root first. ``feature`` is -1 at leaves; ``probs`` rows are populated at
    leaves and zero at internal nodes. All arrays are read-only.
    """

    __slots__ = ("feature", "threshold", "left", "right", "parent",
                 "node_depth", "probs", "prediction", "classes", "params",
                 "n_train", "n_features")

    def __init__(self, feature, threshold, left, right, parent, node_depth,
                 probs, classes, params: TreeParams, n_train: int,
                 n_features: int):
        self.feature = np.ascontiguousarray(feature, dtype=np.int64)
        self.threshold = np.ascontiguousarray(threshold, dtype=np.float64)
        self.left = np.ascontiguousarray(left, dtype=np.int64)
        self.right = np.ascontiguousarray(right, dtype=np.int64)
        self.parent = np.ascontiguousarray(parent, dtype=np.int64)
        self.node_depth = np.ascontiguousarray(node_depth, dtype=np.int64)
        self.probs = np.ascontiguousarray(probs, dtype=np.float64)
        self.classes = tuple(classes)
        self.params = params
        self.n_train = int(n_train)
        self.n_features = int(n_features)
        is_leaf = self.feature < 0
        pred = np.where(is_leaf, np.argmax(self.probs, axis=1), -1)
        self.prediction = np.ascontiguousarray(pred, dtype=np.int64)
        for name in ("feature", "threshold", "left", "right", "parent",
                     "node_depth", "probs", "prediction"):
            getattr(self, name).setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    @property
    def depth(self) -> int:
        return int(self.node_depth.max())

    def predict_batch(self, features) -> np.ndarray:
        """Class codes for every row of an (N, d) feature matrix."""
        X = np.asarray(features, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(f"expected (N, {self.n_features}) features")
        nodes = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            rows = np.flatnonzero(self.feature[nodes] >= 0)
            if rows.size == 0:
                break
            cur = nodes[rows]
            vals = X[rows, self.feature[cur]]
            go_left = vals < self.threshold[cur]
            nodes[rows] = np.where(go_left, self.left[cur], self.right[cur])
        return self.prediction[nodes]

    def predict(self, point) -> int:
        """Class code for a single point."""
        x = np.asarray(point, dtype=np.float64)
        if x.shape != (self.n_features,):
            raise ValueError(f"expected a point of dimension {self.n_features}")
        return int(self.predict_batch(x[None, :])[0])

    def leaf_probs(self, point) -> np.ndarray:
        """Class probability vector at the leaf a point lands in."""
        x = np.asarray(point, dtype=np.float64)
        if x.shape != (self.n_features,):
            raise ValueError(f"expected a point of dimension {self.n_features}")
        node = 0
        while self.feature[node] >= 0:
            if x[self.feature[node]] < self.threshold[node]:
                node = self.left[node]
            else:
                node = self.right[node]
        return self.probs[node]


def grow_tree(features, labels, weights=None, params: TreeParams | None = None,
              class_names=None) -> Tree:
    """Grow a tree by greedy recursive partitioning.

    A node is split when it is shallower than max_depth, holds at least
    min_split records, and the best admissible split's impurity decrease is
    at least cp times the root's prior-weighted Gini. Everything else becomes
    a leaf carrying prior-adjusted class probabilities.
    """
    params = params or TreeParams()
    X = np.ascontiguousarray(features, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("features must be a 2-D array")
    n, d = X.shape
    if n == 0:
        raise ValueError("empty training set")
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    y = np.ascontiguousarray(labels, dtype=np.int64)
    if y.shape != (n,):
        raise ValueError("labels must align with features")
    w = np.ones(n) if weights is None else np.ascontiguousarray(weights,
                                                                dtype=np.float64)
    if w.shape != (n,):
        raise ValueError("weights must align with features")
    if not (np.all(np.isfinite(w)) and np.all(w > 0)):
        raise ValueError("weights must be positive and finite")
    if class_names is not None:
        classes = tuple(str(c) for c in class_names)
    else:
        classes = tuple(str(j) for j in range(int(y.max()) + 1))
    k = len(classes)
    if y.min() < 0 or y.max() >= k:
        raise ValueError("label code outside the class universe")

    totals = np.bincount(y, weights=w, minlength=k)
    if params.priors is not None:
        pri = np.asarray(params.priors)
        if pri.shape != (k,):
            raise ValueError("priors must cover the class universe")
        if np.any((totals > 0) & (pri <= 0)):
            raise ValueError("priors must be positive for every class "
                             "present in the training data")
    scale = _prior_scale(totals, params.priors)
    root_cost = _node_cost(totals * scale)
    gate = params.cp * root_cost

    feature_l: list[int] = []
    threshold_l: list[float] = []
    left_l: list[int] = []
    right_l: list[int] = []
    parent_l: list[int] = []
    depth_l: list[int] = []
    probs_l: list[np.ndarray] = []

    # Depth-first, left child before right, via an explicit stack: preorder
    # node ids without recursion-limit worries on deep degenerate trees.
    stack: list[tuple[np.ndarray, int, int, bool]] = [
        (np.arange(n, dtype=np.int64), 0, -1, False)]
    while stack:
        idx, depth, parent, is_left = stack.pop()
        nid = len(feature_l)
        if parent >= 0:
            if is_left:
                left_l[parent] = nid
            else:
                right_l[parent] = nid
        counts = np.bincount(y[idx], weights=w[idx], minlength=k)

        cand = None
        if depth < params.max_depth and idx.size >= params.min_split:
            cand = best_split(X[idx], y[idx], w[idx], totals, params)
            if cand is not None and cand.decrease < gate:
                cand = None

        parent_l.append(parent)
        depth_l.append(depth)
        if cand is None:
            q = counts * scale
            feature_l.append(-1)
            threshold_l.append(math.nan)
            left_l.append(-1)
            right_l.append(-1)
            probs_l.append(q / q.sum())
        else:
            feature_l.append(cand.feature)
            threshold_l.append(cand.threshold)
            left_l.append(-1)
            right_l.append(-1)
            probs_l.append(np.zeros(k))
            go_left = X[idx, cand.feature] < cand.threshold
            stack.append((idx[~go_left], depth + 1, nid, False))
            stack.append((idx[go_left], depth + 1, nid, True))

    return Tree(feature=feature_l, threshold=threshold_l, left=left_l,
                right=right_l, parent=parent_l, node_depth=depth_l,
                probs=np.vstack(probs_l), classes=classes, params=params,
                n_train=n, n_features=d)


# ---------------------------------------------------------------------------
# Serialization: line-oriented text, floats at 17 significant digits.


def serialize_tree(tree: Tree) -> str:
    """Render a tree as deterministic plain text.

    Equal trees serialize to identical bytes. Nodes carry parent links and a
    side letter; children always appear after their parent in preorder.
    """
    out = ["cart-tree 1",
           f"features {tree.n_features}",
           f"classes {len(tree.classes)}"]
    for name in tree.classes:
        out.append(f"class {name}")
    out.append(f"trained {tree.n_train}")
    p = tree.params
    out.append("cp " + FLOAT_FORMAT % p.cp)
    out.append(f"min_split {p.min_split}")
    out.append(f"min_bucket {p.min_bucket}")
    out.append(f"max_depth {p.max_depth}")
    if p.priors is not None:
        out.append("priors " + " ".join(FLOAT_FORMAT % v for v in p.priors))
    out.append(f"nodes {tree.n_nodes}")
    for i in range(tree.n_nodes):
        par = tree.parent[i]
        side = "-" if par < 0 else ("L" if tree.left[par] == i else "R")
        if tree.feature[i] >= 0:
            out.append(f"node {i} {par} {side} split {tree.feature[i]} "
                       + FLOAT_FORMAT % tree.threshold[i])
        else:
            probs = " ".join(FLOAT_FORMAT % v for v in tree.probs[i])
            out.append(f"node {i} {par} {side} leaf {probs}")
    return "\n".join(out) + "\n"


def _expect(line: str, key: str) -> str:
    if not line.startswith(key + " "):
        raise ValueError(f"tree file: expected {key!r} line, got {line!r}")
    return line[len(key) + 1:]


def parse_tree(text: str) -> Tree:
    """Inverse of serialize_tree, with structural validation."""
    lines = [ln for ln in text.splitlines()]
    if not lines or lines[0] != "cart-tree 1":
        raise ValueError("tree file: bad or missing format line")
    pos = 1

    def take(key):
        nonlocal pos
        if pos >= len(lines):
            raise ValueError(f"tree file: truncated before {key!r}")
        val = _expect(lines[pos], key)
        pos += 1
        return val

    n_features = int(take("features"))
    n_classes = int(take("classes"))
    classes = tuple(take("class") for _ in range(n_classes))
    n_train = int(take("trained"))
    cp = float(take("cp"))
    min_split = int(take("min_split"))
    min_bucket = int(take("min_bucket"))
    max_depth = int(take("max_depth"))
    priors = None
    if pos < len(lines) and lines[pos].startswith("priors "):
        priors = np.array([float(v) for v in take("priors").split()])
    params = TreeParams(cp=cp, min_split=min_split, min_bucket=min_bucket,
                        max_depth=max_depth, priors=priors)
    n_nodes = int(take("nodes"))
    if n_nodes < 1:
        raise ValueError("tree file: must have at least one node")

    feature = np.full(n_nodes, -1, dtype=np.int64)
    threshold = np.full(n_nodes, math.nan)
    left = np.full(n_nodes, -1, dtype=np.int64)
    right = np.full(n_nodes, -1, dtype=np.int64)
    parent = np.full(n_nodes, -1, dtype=np.int64)
    depth = np.zeros(n_nodes, dtype=np.int64)
    probs = np.zeros((n_nodes, n_classes))

    for i in range(n_nodes):
        fields = take("node").split()
        if len(fields) < 4 or int(fields[0]) != i:
            raise ValueError(f"tree file: bad node line for node {i}")
        par = int(fields[1])
        side = fields[2]
        kind = fields[3]
        parent[i] = par
        if par >= 0:
            if par >= i:
                raise ValueError("tree file: parent must precede child")
            depth[i] = depth[par] + 1
            if side == "L":
                if left[par] != -1:
                    raise ValueError("tree file: duplicate left child")
                left[par] = i
            elif side == "R":
                if right[par] != -1:
                    raise ValueError("tree file: duplicate right child")
                right[par] = i
            else:
                raise ValueError(f"tree file: bad side {side!r}")
        if kind == "split":
            feature[i] = int(fields[4])
            threshold[i] = float(fields[5])
            if not 0 <= feature[i] < n_features:
                raise ValueError("tree file: split feature out of range")
        elif kind == "leaf":
            vec = [float(v) for v in fields[4:]]
            if len(vec) != n_classes:
                raise ValueError("tree file: leaf probability length mismatch")
            probs[i] = vec
        else:
            raise ValueError(f"tree file: bad node kind {kind!r}")

    internal = feature >= 0
    if np.any(internal & ((left < 0) | (right < 0))):
        raise ValueError("tree file: internal node missing a child")
    return Tree(feature=feature, threshold=threshold, left=left, right=right,
                parent=parent, node_depth=depth, probs=probs, classes=classes,
                params=params, n_train=n_train, n_features=n_features)


def save_tree(tree: Tree, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_tree(tree))


def load_tree(path) -> Tree:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_tree(fh.read())
