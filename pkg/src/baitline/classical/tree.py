"""CART-style decision tree with entropy criterion and class weighting.

Splits maximize weighted information gain over midpoints of sorted distinct
feature values; ties break toward the lowest feature index, then the lowest
threshold, so training is fully deterministic given the candidate features.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def entropy(class_counts) -> float:
    """Shannon entropy in bits of a (possibly weighted) count vector."""
    counts = np.asarray(class_counts, dtype=np.float64)
    if np.any(counts < 0):
        raise ValueError("negative class counts")
    total = counts.sum()
    if total <= 0:
        raise ValueError("entropy of an empty count vector")
    probs = counts[counts > 0] / total
    return float(-(probs * np.log2(probs)).sum())


def _weighted_counts(labels: np.ndarray, weights: np.ndarray) -> np.ndarray:
    counts = np.zeros(2)
    np.add.at(counts, labels, weights)
    return counts


def best_split(
    rows: np.ndarray,
    labels: np.ndarray,
    feature_indices,
    class_weights: np.ndarray,
) -> tuple[int, float, float] | None:
    """Best (feature, threshold, gain) among the candidate features.

    Samples with feature value <= threshold go left.  Returns None when no
    candidate feature admits a split (all rows identical on them), which
    signals a leaf.

    Weighted class masses are always formed as integer count * class weight,
    so mathematically equal gains are bit-equal no matter how the counts were
    obtained; ties then deterministically keep the lowest feature index and
    lowest threshold (candidates are visited in that order).
    """
    rows = np.asarray(rows, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if rows.shape[0] < 2:
        return None
    w0 = float(class_weights[0])
    w1 = float(class_weights[1])
    n0_total = int((labels == 0).sum())
    n1_total = int((labels == 1).sum())
    total_weight = n0_total * w0 + n1_total * w1
    parent_entropy = entropy([n0_total * w0, n1_total * w1])

    best: tuple[float, int, float] | None = None  # (gain, feature, threshold)
    for f in sorted(int(f) for f in feature_indices):
        order = np.argsort(rows[:, f], kind="stable")
        values = rows[order, f]
        cum0 = np.cumsum(labels[order] == 0)
        for i in range(len(values) - 1):
            if values[i] == values[i + 1]:
                continue
            threshold = (values[i] + values[i + 1]) / 2.0
            if threshold <= values[i] or threshold >= values[i + 1]:
                continue  # midpoint collapsed onto a data value
            l0 = int(cum0[i])
            l1 = (i + 1) - l0
            wl = l0 * w0 + l1 * w1
            wr = (n0_total - l0) * w0 + (n1_total - l1) * w1
            h_left = entropy([l0 * w0, l1 * w1])
            h_right = entropy([(n0_total - l0) * w0, (n1_total - l1) * w1])
            gain = parent_entropy - (wl * h_left + wr * h_right) / total_weight
            if best is None or gain > best[0]:
                best = (gain, f, threshold)
            # equal gain keeps the earlier (lower feature, lower threshold) split
    if best is None:
        return None
    gain, feature, threshold = best
    return feature, threshold, gain


@dataclass
class TreeNode:
    """Internal node (feature/threshold/children) or leaf (class probabilities)."""

    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    probs: np.ndarray | None = None

    @property
    def is_leaf(self) -> bool:
        return self.probs is not None


class DecisionTree:
    """Single entropy tree grown to purity (or until no split is possible)."""

    def __init__(self, root: TreeNode):
        self.root = root

    @classmethod
    def fit(
        cls,
        X: np.ndarray,
        y: np.ndarray,
        class_weights: np.ndarray,
        rng: np.random.Generator,
        max_features: int | None = None,
    ) -> "DecisionTree":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        n_features = X.shape[1]
        if max_features is None:
            max_features = n_features

        def grow(indices: np.ndarray) -> TreeNode:
            labels = y[indices]
            weights = class_weights[labels]
            counts = _weighted_counts(labels, weights)
            if counts[0] == 0.0 or counts[1] == 0.0:
                return _leaf(counts)
            if max_features < n_features:
                subset = rng.choice(n_features, size=max_features, replace=False)
            else:
                subset = np.arange(n_features)
            split = best_split(X[indices], labels, subset, class_weights)
            if split is None and max_features < n_features:
                # sampled features were all constant here; retry with every feature
                split = best_split(X[indices], labels, np.arange(n_features), class_weights)
            if split is None:
                return _leaf(counts)
            feature, threshold, _ = split
            go_left = X[indices, feature] <= threshold
            node = TreeNode(feature=feature, threshold=threshold)
            node.left = grow(indices[go_left])
            node.right = grow(indices[~go_left])
            return node

        return cls(grow(np.arange(X.shape[0])))

    def predict_proba_one(self, x: np.ndarray) -> np.ndarray:
        node = self.root
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.probs

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return np.stack([self.predict_proba_one(row) for row in X])

    def to_preorder(self) -> list[dict]:
        """Serialize nodes in preorder (parent, left subtree, right subtree)."""
        out: list[dict] = []

        def walk(node: TreeNode) -> None:
            if node.is_leaf:
                out.append({"p": [float(v) for v in node.probs]})
                return
            out.append({"f": node.feature, "t": node.threshold})
            walk(node.left)
            walk(node.right)

        walk(self.root)
        return out

    @classmethod
    def from_preorder(cls, nodes: list[dict]) -> "DecisionTree":
        cursor = iter(nodes)

        def build() -> TreeNode:
            entry = next(cursor)
            if "p" in entry:
                return TreeNode(probs=np.array(entry["p"], dtype=np.float64))
            node = TreeNode(feature=int(entry["f"]), threshold=float(entry["t"]))
            node.left = build()
            node.right = build()
            return node

        return cls(build())


def _leaf(weighted_counts: np.ndarray) -> TreeNode:
    total = weighted_counts.sum()
    return TreeNode(probs=weighted_counts / total)
