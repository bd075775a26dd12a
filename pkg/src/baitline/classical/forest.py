"""Random forest over handcrafted feature vectors with out-of-bag scoring."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .tree import DecisionTree


@dataclass
class RandomForestConfig:
    n_estimators: int = 150
    criterion: str = "entropy"
    class_weight: str = "balanced"
    oob: bool = True
    seed: int = 0
    max_features: str = "sqrt"


@dataclass
class RandomForestModel:
    trees: list[DecisionTree]
    oob_indices: list[np.ndarray]  # per tree, the sample indices it never saw
    class_weights: np.ndarray
    oob_score: float
    config: RandomForestConfig = field(default_factory=RandomForestConfig)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Mean of per-tree leaf class-probability vectors, shape (n, 2)."""
        X = np.asarray(X, dtype=np.float64)
        acc = np.zeros((X.shape[0], 2))
        for tree in self.trees:
            acc += tree.predict_proba(X)
        return acc / len(self.trees)

    def predict_clickbait_proba(self, X: np.ndarray) -> np.ndarray:
        return self.predict_proba(X)[:, 0]


def balanced_class_weights(y: np.ndarray) -> np.ndarray:
    """n / (2 * n_class) per class; requires both classes present."""
    y = np.asarray(y, dtype=np.int64)
    counts = np.bincount(y, minlength=2)
    if counts[0] == 0 or counts[1] == 0:
        raise ValueError("class weighting needs both classes present")
    n = len(y)
    return np.array([n / (2.0 * counts[0]), n / (2.0 * counts[1])])


def train_random_forest(
    X: np.ndarray, y: np.ndarray, config: RandomForestConfig | None = None
) -> RandomForestModel:
    """Bootstrap-aggregated entropy trees with sqrt(d) feature subsampling.

    Per-tree RNGs are spawned deterministically from the run seed, so a fixed
    seed reproduces the forest exactly.
    """
    if config is None:
        config = RandomForestConfig()
    if config.criterion != "entropy":
        raise ValueError(f"unsupported criterion {config.criterion!r}")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = X.shape[0]
    if n < 2 or len(y) != n:
        raise ValueError("need at least 2 aligned samples")
    if config.class_weight == "balanced":
        class_weights = balanced_class_weights(y)
    elif config.class_weight == "none":
        counts = np.bincount(y, minlength=2)
        if counts[0] == 0 or counts[1] == 0:
            raise ValueError("training needs both classes present")
        class_weights = np.ones(2)
    else:
        raise ValueError(f"unsupported class_weight {config.class_weight!r}")

    if config.max_features == "sqrt":
        max_features = max(1, int(math.isqrt(X.shape[1])))
    elif config.max_features == "all":
        max_features = X.shape[1]
    else:
        raise ValueError(f"unsupported max_features {config.max_features!r}")

    seeds = np.random.SeedSequence(config.seed).spawn(config.n_estimators)
    trees: list[DecisionTree] = []
    oob_indices: list[np.ndarray] = []
    for tree_seed in seeds:
        rng = np.random.default_rng(tree_seed)
        bootstrap = rng.integers(0, n, size=n)
        in_bag = np.zeros(n, dtype=bool)
        in_bag[bootstrap] = True
        oob_indices.append(np.flatnonzero(~in_bag))
        trees.append(
            DecisionTree.fit(X[bootstrap], y[bootstrap], class_weights, rng, max_features)
        )

    oob_score = compute_oob_score(trees, oob_indices, X, y) if config.oob else float("nan")
    return RandomForestModel(
        trees=trees,
        oob_indices=oob_indices,
        class_weights=class_weights,
        oob_score=oob_score,
        config=config,
    )


def compute_oob_score(
    trees: list[DecisionTree],
    oob_indices: list[np.ndarray],
    X: np.ndarray,
    y: np.ndarray,
) -> float:
    """Accuracy of out-of-bag votes over samples left out by at least one tree.

    Votes are mean leaf probabilities across the trees that never saw the
    sample; exact probability ties resolve to non-clickbait.
    """
    n = X.shape[0]
    vote_sums = np.zeros((n, 2))
    vote_counts = np.zeros(n, dtype=np.int64)
    for tree, oob in zip(trees, oob_indices):
        if len(oob) == 0:
            continue
        vote_sums[oob] += tree.predict_proba(X[oob])
        vote_counts[oob] += 1
    covered = vote_counts > 0
    if not covered.any():
        return float("nan")
    mean_probs = vote_sums[covered] / vote_counts[covered, None]
    preds = np.where(mean_probs[:, 0] > mean_probs[:, 1], 0, 1)
    return float((preds == y[covered]).sum() / covered.sum())


def rf_predict_proba(model: RandomForestModel, x: np.ndarray) -> float:
    """Clickbait probability for a single feature vector."""
    return float(model.predict_clickbait_proba(np.asarray(x)[None, :])[0])


def rf_to_dict(model: RandomForestModel) -> dict:
    return {
        "format": "baitline-model",
        "version": 1,
        "family": "rf",
        "config": {
            "n_estimators": model.config.n_estimators,
            "criterion": model.config.criterion,
            "class_weight": model.config.class_weight,
            "oob": model.config.oob,
            "seed": model.config.seed,
            "max_features": model.config.max_features,
        },
        "class_weights": model.class_weights.tolist(),
        "oob_score": model.oob_score,
        "oob_indices": [idx.tolist() for idx in model.oob_indices],
        "trees": [tree.to_preorder() for tree in model.trees],
    }


def rf_from_dict(payload: dict) -> RandomForestModel:
    _check_model_header(payload, "rf")
    config = RandomForestConfig(**payload["config"])
    return RandomForestModel(
        trees=[DecisionTree.from_preorder(nodes) for nodes in payload["trees"]],
        oob_indices=[np.array(idx, dtype=np.int64) for idx in payload["oob_indices"]],
        class_weights=np.array(payload["class_weights"]),
        oob_score=float(payload["oob_score"]),
        config=config,
    )


def _check_model_header(payload: dict, family: str) -> None:
    from ..tensor.checkpoint import CheckpointVersionError

    if payload.get("format") != "baitline-model" or payload.get("version") != 1:
        raise CheckpointVersionError(
            f"unsupported model container: format={payload.get('format')!r} "
            f"version={payload.get('version')!r}"
        )
    if payload.get("family") != family:
        raise ValueError(f"expected a {family!r} model, got {payload.get('family')!r}")


def save_rf(model: RandomForestModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(rf_to_dict(model), fh)


def load_rf(path) -> RandomForestModel:
    with open(path, encoding="utf-8") as fh:
        return rf_from_dict(json.load(fh))
