"""Linear SVM trained by epoch-shuffled subgradient descent, Platt-calibrated.

The primal objective is 0.5*||w||^2 + C * sum(hinge).  Updates follow the
schedule lr_t = 1/(lambda*t) with lambda = 1/(C*n), which makes the descent
equivalent to minimizing the per-sample scaled objective.  Class convention:
clickbait maps to +1, non-clickbait to -1, so positive decision values lean
clickbait.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class SvmConfig:
    kernel: str = "linear"
    C: float = 1.0
    epochs: int = 200
    seed: int = 0


@dataclass(frozen=True)
class PlattScaler:
    """Sigmoid calibration p = 1/(1 + exp(A*decision + B)) for the +1 class."""

    A: float
    B: float

    def proba(self, decision: float | np.ndarray) -> np.ndarray:
        z = self.A * np.asarray(decision, dtype=np.float64) + self.B
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = np.exp(-z[pos]) / (1.0 + np.exp(-z[pos]))
        out[~pos] = 1.0 / (1.0 + np.exp(z[~pos]))
        return out


@dataclass
class SvmModel:
    w: np.ndarray
    b: float
    C: float
    calibrator: PlattScaler
    objective_by_epoch: list[float] = field(default_factory=list)  # at epoch ends

    def decision(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.w + self.b

    def predict_clickbait_proba(self, X: np.ndarray) -> np.ndarray:
        return self.calibrator.proba(self.decision(X))


def svm_objective(w: np.ndarray, b: float, X: np.ndarray, y_signed: np.ndarray, C: float) -> float:
    margins = y_signed * (X @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins).sum()
    return float(0.5 * (w @ w) + C * hinge)


def _to_signed(y: np.ndarray) -> np.ndarray:
    """Label 0 (clickbait) -> +1, label 1 (non-clickbait) -> -1."""
    y = np.asarray(y, dtype=np.int64)
    return np.where(y == 0, 1.0, -1.0)


def train_svm(X: np.ndarray, y: np.ndarray, config: SvmConfig | None = None) -> SvmModel:
    """Deterministic subgradient training plus Platt fitting on train decisions."""
    if config is None:
        config = SvmConfig()
    if config.kernel != "linear":
        raise ValueError(f"unsupported kernel {config.kernel!r}")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n, d = X.shape
    if len(y) != n:
        raise ValueError("X and y are misaligned")
    counts = np.bincount(y, minlength=2)
    if counts[0] == 0 or counts[1] == 0:
        raise ValueError("SVM training needs both classes present")
    y_signed = _to_signed(y)
    lam = 1.0 / (config.C * n)

    # The bias rides in the weight vector as a constant-1 feature, so it is
    # regularized along with w; on standardized inputs the bias is small and
    # the reported objective uses the plain w either way.
    Xa = np.hstack([X, np.ones((n, 1))])
    rng = np.random.default_rng(config.seed)
    wa = np.zeros(d + 1)
    t = 0
    objective_by_epoch: list[float] = []
    tail_sum = np.zeros(d + 1)
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        last_epoch = epoch == config.epochs - 1
        for i in order:
            t += 1
            lr = 1.0 / (lam * t)
            margin = y_signed[i] * (Xa[i] @ wa)
            wa *= 1.0 - lr * lam
            if margin < 1.0:
                wa += lr * y_signed[i] * Xa[i]
            if last_epoch:
                tail_sum += wa
        objective_by_epoch.append(_augmented_objective(wa, Xa, y_signed, config.C))

    # suffix averaging over the final epoch removes the O(lr) oscillation
    # band of the last raw iterate
    wa = tail_sum / n
    w, b = wa[:-1], float(wa[-1])
    decisions = X @ w + b
    calibrator = platt_fit(decisions, y_signed)
    return SvmModel(
        w=w, b=b, C=config.C, calibrator=calibrator,
        objective_by_epoch=objective_by_epoch,
    )


def _augmented_objective(wa: np.ndarray, Xa: np.ndarray, y_signed: np.ndarray, C: float) -> float:
    margins = y_signed * (Xa @ wa)
    return float(0.5 * (wa @ wa) + C * np.maximum(0.0, 1.0 - margins).sum())


def platt_fit(decisions: np.ndarray, y_signed: np.ndarray, max_iter: int = 100) -> PlattScaler:
    """Newton fit of the Platt sigmoid on (decision value, label) pairs.

    Standard regularized-target formulation with a backtracking line search.
    """
    decisions = np.asarray(decisions, dtype=np.float64)
    y_signed = np.asarray(y_signed, dtype=np.float64)
    prior1 = float((y_signed > 0).sum())
    prior0 = float(len(y_signed) - prior1)
    hi = (prior1 + 1.0) / (prior1 + 2.0)
    lo = 1.0 / (prior0 + 2.0)
    targets = np.where(y_signed > 0, hi, lo)

    min_step = 1e-10
    sigma = 1e-12

    def nll(a: float, b: float) -> float:
        z = decisions * a + b
        # stable log(1 + exp(z)) split by sign
        out = np.where(z >= 0, targets * z + np.log1p(np.exp(-z)),
                       (targets - 1.0) * z + np.log1p(np.exp(z)))
        return float(out.sum())

    A = 0.0
    B = math.log((prior0 + 1.0) / (prior1 + 1.0))
    fval = nll(A, B)
    for _ in range(max_iter):
        z = decisions * A + B
        p = np.empty_like(z)
        pos = z >= 0
        p[pos] = np.exp(-z[pos]) / (1.0 + np.exp(-z[pos]))
        p[~pos] = 1.0 / (1.0 + np.exp(z[~pos]))
        d2 = p * (1.0 - p)
        h11 = float((decisions * decisions * d2).sum()) + sigma
        h22 = float(d2.sum()) + sigma
        h21 = float((decisions * d2).sum())
        d1 = targets - p
        g1 = float((decisions * d1).sum())
        g2 = float(d1.sum())
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * dA + g2 * dB
        stepsize = 1.0
        while stepsize >= min_step:
            new_a = A + stepsize * dA
            new_b = B + stepsize * dB
            new_f = nll(new_a, new_b)
            if new_f < fval + 1e-4 * stepsize * gd:
                A, B, fval = new_a, new_b, new_f
                break
            stepsize /= 2.0
        else:
            break
    return PlattScaler(A=A, B=B)


def svm_predict_proba(model: SvmModel, x: np.ndarray) -> float:
    """Calibrated clickbait probability for one feature vector."""
    return float(model.predict_clickbait_proba(np.asarray(x)[None, :])[0])


def svm_to_dict(model: SvmModel) -> dict:
    return {
        "format": "baitline-model",
        "version": 1,
        "family": "svm",
        "w": model.w.tolist(),
        "b": model.b,
        "C": model.C,
        "platt": {"A": model.calibrator.A, "B": model.calibrator.B},
        "objective_by_epoch": model.objective_by_epoch,
    }


def svm_from_dict(payload: dict) -> SvmModel:
    from .forest import _check_model_header

    _check_model_header(payload, "svm")
    return SvmModel(
        w=np.array(payload["w"], dtype=np.float64),
        b=float(payload["b"]),
        C=float(payload["C"]),
        calibrator=PlattScaler(A=float(payload["platt"]["A"]), B=float(payload["platt"]["B"])),
        objective_by_epoch=list(payload.get("objective_by_epoch", [])),
    )


def save_svm(model: SvmModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(svm_to_dict(model), fh)


def load_svm(path) -> SvmModel:
    with open(path, encoding="utf-8") as fh:
        return svm_from_dict(json.load(fh))
