"""Weighted soft voting over the base models' clickbait scores."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .corpus import Label


@dataclass(frozen=True)
class EnsembleConfig:
    model_ids: tuple[str, ...]
    weights: tuple[float, ...]
    threshold: float = 0.5

    def __post_init__(self):
        if len(self.model_ids) != len(self.weights):
            raise ValueError(
                f"{len(self.model_ids)} models but {len(self.weights)} weights"
            )
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be non-negative")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {sum(self.weights)}")

    def save(self, path) -> None:
        payload = {
            "threshold": self.threshold,
            "weights": dict(zip(self.model_ids, self.weights)),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "EnsembleConfig":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        items = list(payload["weights"].items())
        return cls(
            model_ids=tuple(k for k, _ in items),
            weights=tuple(float(v) for _, v in items),
            threshold=float(payload.get("threshold", 0.5)),
        )


def fit_weights(
    model_ids: Sequence[str],
    validation_preds: Sequence[Sequence[Label]],
    golds: Sequence[Label],
    threshold: float = 0.5,
) -> EnsembleConfig:
    """Weights are per-model validation accuracies normalized to sum 1."""
    if len(golds) == 0:
        raise ValueError("cannot fit ensemble weights on an empty validation set")
    if len(model_ids) != len(validation_preds):
        raise ValueError("one prediction list per model id is required")
    accuracies = []
    for preds in validation_preds:
        if len(preds) != len(golds):
            raise ValueError("prediction/gold length mismatch")
        accuracies.append(sum(1 for p, g in zip(preds, golds) if p == g) / len(golds))
    total = sum(accuracies)
    if total == 0:
        raise ValueError("every model scored zero accuracy; weights undefined")
    weights = tuple(a / total for a in accuracies)
    return EnsembleConfig(model_ids=tuple(model_ids), weights=weights, threshold=threshold)


def ensemble_predict(
    scores: Sequence[float], config: EnsembleConfig
) -> tuple[Label, float]:
    """Convex combination of per-model clickbait scores, thresholded.

    The combined score at exactly the threshold classifies as clickbait
    (boundary inclusive).  Summation runs in model order so recomputation is
    bit-stable.
    """
    if len(scores) != len(config.weights):
        raise ValueError(
            f"{len(scores)} scores for {len(config.weights)} ensemble weights"
        )
    combined = 0.0
    for w, s in zip(config.weights, scores):
        s = float(s)
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"clickbait score {s} outside [0, 1]")
        combined += w * s
    label = Label.CLICKBAIT if combined >= config.threshold else Label.NON_CLICKBAIT
    return label, combined
