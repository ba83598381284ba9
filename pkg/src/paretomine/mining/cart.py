"""Weighted CART classification trees (Gini impurity) for labelled solutions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Hashable, Sequence

import numpy as np


@dataclass(frozen=True)
class LabeledSample:
    features: tuple[float, ...]
    label: Hashable
    weight: int = 1

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(float(v) for v in self.features))
        if int(self.weight) != self.weight or self.weight < 1:
            raise ValueError("weight must be a positive integer")


def balance_by_replication(samples: Sequence[LabeledSample], factor: int,
                           target_class: Hashable) -> list[LabeledSample]:
    """Multiply the weight of every ``target_class`` sample by ``factor``."""
    if int(factor) != factor or factor < 1:
        raise ValueError("factor must be a positive integer")
    return [replace(s, weight=s.weight * int(factor)) if s.label == target_class else s
            for s in samples]


def class_weights(samples: Sequence[LabeledSample]) -> dict:
    out: dict = {}
    for s in samples:
        out[s.label] = out.get(s.label, 0) + s.weight
    return out


@dataclass(frozen=True)
class CartConfig:
    max_depth: int = 5
    min_samples_leaf: int = 5
    min_impurity_decrease: float = 1e-4


@dataclass
class Node:
    counts: dict
    label: Hashable
    depth: int
    feature: int | None = None
    threshold: float | None = None
    left: "Node | None" = None
    right: "Node | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


@dataclass
class DecisionTree:
    root: Node
    classes: tuple
    n_features: int
    feature_names: tuple[str, ...]
    training_accuracy: float
    depth: int = field(default=0)

    def leaves(self):
        stack = [(self.root, ())]
        while stack:
            node, path = stack.pop()
            if node.is_leaf:
                yield node, path
                continue
            # right pushed first so leaves come out left-to-right
            stack.append((node.right, path + ((node.feature, ">", node.threshold),)))
            stack.append((node.left, path + ((node.feature, "<=", node.threshold),)))


def gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - (p * p).sum())


def _majority(counts: np.ndarray, classes: tuple):
    # ties resolved toward the class listed first
    return classes[int(np.argmax(counts))]


def _best_split(x: np.ndarray, y: np.ndarray, w: np.ndarray, n_classes: int, config: CartConfig):
    total_w = w.sum()
    parent = np.bincount(y, weights=w, minlength=n_classes)
    parent_gini = gini(parent)
    best = None
    for j in range(x.shape[1]):
        order = np.argsort(x[:, j], kind="stable")
        xs, ys, ws = x[order, j], y[order], w[order]
        onehot = np.zeros((len(xs), n_classes))
        onehot[np.arange(len(xs)), ys] = ws
        left = np.cumsum(onehot, axis=0)
        # candidate cuts sit between consecutive distinct values
        cut = np.flatnonzero(xs[1:] > xs[:-1])
        if cut.size == 0:
            continue
        lc = left[cut]
        rc = parent[None, :] - lc
        lw, rw = lc.sum(axis=1), rc.sum(axis=1)
        ok = (lw >= config.min_samples_leaf) & (rw >= config.min_samples_leaf)
        if not ok.any():
            continue
        lg = 1.0 - ((lc / lw[:, None]) ** 2).sum(axis=1)
        rg = 1.0 - ((rc / rw[:, None]) ** 2).sum(axis=1)
        child = (lw * lg + rw * rg) / total_w
        child[~ok] = np.inf
        i = int(np.argmin(child))
        decrease = parent_gini - child[i]
        if best is None or decrease > best[0] + 1e-15:
            thr = 0.5 * (xs[cut[i]] + xs[cut[i] + 1])
            best = (decrease, j, thr)
    return best, parent


def cart_train(samples: Sequence[LabeledSample], config: CartConfig = CartConfig(),
               feature_names: Sequence[str] | None = None) -> DecisionTree:
    """Grow a binary classification tree by greedy weighted-Gini splits.

    Thresholds are midpoints between consecutive distinct feature values and
    a value equal to the threshold goes left. A split is accepted only if it
    lowers the weighted impurity by more than zero and by at least
    ``config.min_impurity_decrease``; each child must hold at least
    ``config.min_samples_leaf`` of weight.
    """
    if not samples:
        raise ValueError("no samples")
    m = len(samples[0].features)
    if any(len(s.features) != m for s in samples):
        raise ValueError("samples disagree on the number of features")
    x = np.array([s.features for s in samples], dtype=float).reshape(len(samples), m)
    if not np.isfinite(x).all():
        raise ValueError("features must be finite")
    classes = tuple(sorted({s.label for s in samples}, key=str))
    index = {c: i for i, c in enumerate(classes)}
    y = np.array([index[s.label] for s in samples])
    w = np.array([s.weight for s in samples], dtype=float)
    names = tuple(feature_names) if feature_names else tuple(f"x{i}" for i in range(m))
    if len(names) != m:
        raise ValueError("one feature name per feature is required")
    max_depth = 0

    def grow(idx: np.ndarray, depth: int) -> Node:
        nonlocal max_depth
        max_depth = max(max_depth, depth)
        counts = np.bincount(y[idx], weights=w[idx], minlength=len(classes))
        node = Node({c: int(v) for c, v in zip(classes, counts)}, _majority(counts, classes), depth)
        if depth >= config.max_depth or np.count_nonzero(counts) < 2:
            return node
        best, _ = _best_split(x[idx], y[idx], w[idx], len(classes), config)
        if best is None:
            return node
        decrease, j, thr = best
        if decrease <= 0 or decrease < config.min_impurity_decrease:
            return node
        go_left = x[idx, j] <= thr
        node.feature, node.threshold = j, float(thr)
        node.left = grow(idx[go_left], depth + 1)
        node.right = grow(idx[~go_left], depth + 1)
        return node

    root = grow(np.arange(len(samples)), 0)
    tree = DecisionTree(root, classes, m, names, 0.0, max_depth)
    correct = sum(s.weight for s in samples if cart_classify(tree, s.features) == s.label)
    tree.training_accuracy = correct / float(w.sum())
    return tree


def cart_classify(tree: DecisionTree, features) -> Hashable:
    f = [float(v) for v in features]
    if len(f) != tree.n_features:
        raise ValueError(f"expected {tree.n_features} features, got {len(f)}")
    if not all(math.isfinite(v) for v in f):
        raise ValueError("features must be finite")
    node = tree.root
    while not node.is_leaf:
        node = node.left if f[node.feature] <= node.threshold else node.right
    return node.label


def accuracy(tree: DecisionTree, samples: Sequence[LabeledSample]) -> float:
    total = sum(s.weight for s in samples)
    correct = sum(s.weight for s in samples if cart_classify(tree, s.features) == s.label)
    return correct / total


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def leaf_rules(tree: DecisionTree) -> list[dict]:
    """One conjunctive rule per leaf.

    Conditions on the same feature are merged into a single interval, and
    features appear in the order they are first tested from the root.
    """
    rules = []
    for leaf, path in tree.leaves():
        bounds: dict[int, list] = {}
        for feat, op, thr in path:
            lo, hi = bounds.setdefault(feat, [None, None])
            if op == "<=":
                bounds[feat][1] = thr if hi is None else min(hi, thr)
            else:
                bounds[feat][0] = thr if lo is None else max(lo, thr)
        parts = []
        for feat, (lo, hi) in bounds.items():
            name = tree.feature_names[feat]
            if lo is not None and hi is not None:
                parts.append(f"{_fmt(lo)} < {name} <= {_fmt(hi)}")
            elif lo is not None:
                parts.append(f"{_fmt(lo)} < {name}")
            else:
                parts.append(f"{name} <= {_fmt(hi)}")
        total = sum(leaf.counts.values())
        purity = leaf.counts[leaf.label] / total if total else 0.0
        rules.append({
            "label": leaf.label,
            "condition": " and ".join(parts) if parts else "always",
            "counts": dict(leaf.counts),
            "purity": purity,
        })
    return rules


def rules_text(tree: DecisionTree) -> str:
    lines = [f"# training accuracy: {tree.training_accuracy:.1%} (weighted, on training data)"]
    for r in leaf_rules(tree):
        counts = ", ".join(f"{k}={v}" for k, v in r["counts"].items())
        lines.append(f"{r['label']}: {r['condition']}  [{counts}; {r['purity']:.0%} pure]")
    return "\n".join(lines) + "\n"


def to_dot(tree: DecisionTree) -> str:
    lines = ["digraph tree {", '  node [shape=box];']
    edges = []
    counter = 0

    def visit(node: Node) -> int:
        nonlocal counter
        me = counter
        counter += 1
        counts = ", ".join(f"{k}={v}" for k, v in node.counts.items())
        if node.is_leaf:
            lines.append(f'  n{me} [label="{node.label}\\n{counts}"];')
            return me
        name = tree.feature_names[node.feature]
        lines.append(f'  n{me} [label="{name}\\n{counts}"];')
        left = visit(node.left)
        right = visit(node.right)
        edges.append(f'  n{me} -> n{left} [label="≤ {_fmt(node.threshold)}"];')
        edges.append(f'  n{me} -> n{right} [label="> {_fmt(node.threshold)}"];')
        return me

    visit(tree.root)
    return "\n".join(lines + edges + ["}"]) + "\n"
