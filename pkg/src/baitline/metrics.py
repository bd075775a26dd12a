"""Evaluation machinery: per-class P/R/F1, PR curves with AP, McNemar's test.

The chi-square tail probability needed by McNemar's test is computed from the
regularized incomplete gamma function implemented here, keeping the toolkit
free of a stats dependency.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import Label


# ---------------------------------------------------------------------------
# regularized incomplete gamma / chi-square tail
# ---------------------------------------------------------------------------

_MAX_ITER = 500
_TINY = 1e-300
_EPS = 3e-16


def _lower_gamma_series(a: float, x: float) -> float:
    """P(a, x) by series expansion; valid for x < a + 1."""
    ap = a
    total = 1.0 / a
    delta = total
    for _ in range(_MAX_ITER):
        ap += 1.0
        delta *= x / ap
        total += delta
        if abs(delta) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_gamma_cf(a: float, x: float) -> float:
    """Q(a, x) by Lentz continued fraction; valid for x >= a + 1."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gammainc_upper(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x)."""
    if a <= 0:
        raise ValueError("shape parameter must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _lower_gamma_series(a, x)
    return _upper_gamma_cf(a, x)


def chi2_sf(x: float, dof: int = 1) -> float:
    """Chi-square survival function P(X >= x) with ``dof`` degrees of freedom."""
    if dof < 1:
        raise ValueError("degrees of freedom must be >= 1")
    return gammainc_upper(dof / 2.0, x / 2.0)


# ---------------------------------------------------------------------------
# classification scores
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion_counts(preds: Sequence, golds: Sequence, target) -> ConfusionCounts:
    if len(preds) != len(golds):
        raise ValueError(f"length mismatch: {len(preds)} preds vs {len(golds)} golds")
    tp = fp = fn = tn = 0
    for p, g in zip(preds, golds):
        if p == target:
            if g == target:
                tp += 1
            else:
                fp += 1
        else:
            if g == target:
                fn += 1
            else:
                tn += 1
    return ConfusionCounts(tp, fp, fn, tn)


def prf1(preds: Sequence, golds: Sequence, target) -> tuple[float, float, float]:
    """(precision, recall, f1) for the target class.

    Zero-denominator conventions: precision 0 without positive predictions,
    recall 0 without gold positives, f1 0 when p + r = 0.
    """
    if len(preds) == 0:
        raise ValueError("cannot score empty prediction lists")
    c = confusion_counts(preds, golds, target)
    precision = c.tp / (c.tp + c.fp) if (c.tp + c.fp) > 0 else 0.0
    recall = c.tp / (c.tp + c.fn) if (c.tp + c.fn) > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) > 0 else 0.0
    return precision, recall, f1


def macro_f1(preds: Sequence, golds: Sequence) -> float:
    """Unweighted mean of the two per-class F1 scores."""
    _, _, f1_cb = prf1(preds, golds, Label.CLICKBAIT)
    _, _, f1_ncb = prf1(preds, golds, Label.NON_CLICKBAIT)
    return (f1_cb + f1_ncb) / 2.0


# ---------------------------------------------------------------------------
# precision-recall curve and average precision
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrCurve:
    """(recall, precision) points at descending score thresholds, plus AP."""

    points: tuple[tuple[float, float], ...]
    ap: float


def pr_curve(scores: Sequence[float], golds: Sequence) -> PrCurve:
    """Precision-recall curve for the clickbait class from clickbait scores.

    Ties share one threshold; AP is the non-interpolated rank sum
    sum_k P(k) * (R(k) - R(k-1)) over the distinct thresholds.
    """
    if len(scores) != len(golds):
        raise ValueError(f"length mismatch: {len(scores)} scores vs {len(golds)} golds")
    positives = [g == Label.CLICKBAIT for g in golds]
    n_pos = sum(positives)
    if n_pos == 0:
        raise ValueError("PR curve needs at least one positive (clickbait) gold label")
    order = sorted(range(len(scores)), key=lambda i: -float(scores[i]))
    points: list[tuple[float, float]] = []
    ap = 0.0
    tp = 0
    seen = 0
    prev_recall = 0.0
    i = 0
    while i < len(order):
        j = i
        threshold = float(scores[order[i]])
        while j < len(order) and float(scores[order[j]]) == threshold:
            tp += positives[order[j]]
            seen += 1
            j += 1
        precision = tp / seen
        recall = tp / n_pos
        points.append((recall, precision))
        ap += precision * (recall - prev_recall)
        prev_recall = recall
        i = j
    return PrCurve(points=tuple(points), ap=ap)


def average_precision(scores: Sequence[float], golds: Sequence) -> float:
    return pr_curve(scores, golds).ap


# ---------------------------------------------------------------------------
# McNemar's paired test
# ---------------------------------------------------------------------------

def mcnemar(preds_a: Sequence, preds_b: Sequence, golds: Sequence) -> tuple[float, float]:
    """Continuity-corrected McNemar statistic and chi-square p-value (1 dof).

    b counts items model A gets right and model B wrong, c the converse; with
    no discordant items the statistic is 0 and p is 1.
    """
    if not (len(preds_a) == len(preds_b) == len(golds)):
        raise ValueError(
            f"length mismatch: {len(preds_a)}, {len(preds_b)}, {len(golds)}"
        )
    b = c = 0
    for pa, pb, g in zip(preds_a, preds_b, golds):
        a_ok = pa == g
        b_ok = pb == g
        if a_ok and not b_ok:
            b += 1
        elif b_ok and not a_ok:
            c += 1
    if b + c == 0:
        return 0.0, 1.0
    statistic = (abs(b - c) - 1) ** 2 / (b + c)
    return statistic, chi2_sf(statistic, dof=1)


# ---------------------------------------------------------------------------
# aggregate report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    confusion: ConfusionCounts


@dataclass(frozen=True)
class EvalReport:
    n: int
    per_class: dict[Label, ClassScores]
    macro_f1: float
    accuracy: float
    ap: float | None = None
    curve: PrCurve | None = None
    mcnemar_vs: dict[str, tuple[float, float]] = field(default_factory=dict)


def evaluate(
    preds: Sequence, golds: Sequence, scores: Sequence[float] | None = None
) -> EvalReport:
    """Full per-class report; adds the PR curve and AP when scores are given."""
    if len(golds) == 0:
        raise ValueError("cannot evaluate an empty gold list")
    if len(preds) != len(golds):
        raise ValueError(f"length mismatch: {len(preds)} preds vs {len(golds)} golds")
    per_class = {}
    for target in (Label.CLICKBAIT, Label.NON_CLICKBAIT):
        p, r, f1 = prf1(preds, golds, target)
        per_class[target] = ClassScores(
            precision=p, recall=r, f1=f1,
            confusion=confusion_counts(preds, golds, target),
        )
    accuracy = sum(1 for p, g in zip(preds, golds) if p == g) / len(golds)
    curve = pr_curve(scores, golds) if scores is not None else None
    return EvalReport(
        n=len(golds),
        per_class=per_class,
        macro_f1=(per_class[Label.CLICKBAIT].f1 + per_class[Label.NON_CLICKBAIT].f1) / 2.0,
        accuracy=accuracy,
        ap=curve.ap if curve is not None else None,
        curve=curve,
    )


def render_report(report: EvalReport) -> str:
    """Aligned text table: one row per class plus macro F1 and accuracy."""
    lines = [
        f"{'class':<15} {'precision':>9} {'recall':>9} {'f1':>9}",
    ]
    for label in (Label.CLICKBAIT, Label.NON_CLICKBAIT):
        s = report.per_class[label]
        lines.append(
            f"{label.to_string():<15} {s.precision:>9.4f} {s.recall:>9.4f} {s.f1:>9.4f}"
        )
    lines.append(f"{'macro f1':<15} {'':>9} {'':>9} {report.macro_f1:>9.4f}")
    lines.append(f"{'accuracy':<15} {'':>9} {'':>9} {report.accuracy:>9.4f}")
    if report.ap is not None:
        lines.append(f"{'ap':<15} {'':>9} {'':>9} {report.ap:>9.4f}")
    for other, (stat, p) in report.mcnemar_vs.items():
        lines.append(f"mcnemar vs {other}: statistic={stat:.4f} p={p:.6f}")
    return "\n".join(lines) + "\n"


def report_to_dict(report: EvalReport) -> dict:
    """Flat machine-readable key-value form of the report."""
    out: dict[str, float | int] = {"n": report.n, "accuracy": report.accuracy,
                                   "macro_f1": report.macro_f1}
    for label in (Label.CLICKBAIT, Label.NON_CLICKBAIT):
        s = report.per_class[label]
        key = label.to_string().replace("-", "_")
        out[f"{key}_precision"] = s.precision
        out[f"{key}_recall"] = s.recall
        out[f"{key}_f1"] = s.f1
        out[f"{key}_tp"] = s.confusion.tp
        out[f"{key}_fp"] = s.confusion.fp
        out[f"{key}_fn"] = s.confusion.fn
        out[f"{key}_tn"] = s.confusion.tn
    if report.ap is not None:
        out["ap"] = report.ap
    for other, (stat, p) in report.mcnemar_vs.items():
        out[f"mcnemar_{other}_statistic"] = stat
        out[f"mcnemar_{other}_p"] = p
    return out


# ---------------------------------------------------------------------------
# prediction files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PredictionRow:
    id: str
    gold: Label | None  # None for predictions over unlabeled corpora
    pred: Label
    score: float  # clickbait score in [0, 1]


_NO_GOLD = "-"


def save_predictions(rows: Sequence[PredictionRow], path) -> None:
    """One tab-separated line per article: id, gold, pred, clickbait score."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            gold = row.gold.to_string() if row.gold is not None else _NO_GOLD
            fh.write(f"{row.id}\t{gold}\t{row.pred.to_string()}\t{row.score!r}\n")


def load_predictions(path) -> list[PredictionRow]:
    rows: list[PredictionRow] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(f"{path}:{line_no}: expected 4 fields, got {len(parts)}")
            rows.append(
                PredictionRow(
                    id=parts[0],
                    gold=None if parts[1] == _NO_GOLD else Label.from_string(parts[1]),
                    pred=Label.from_string(parts[2]),
                    score=float(parts[3]),
                )
            )
    return rows


def export_pr_curve(curve: PrCurve, path) -> None:
    """(recall, precision) pairs as tab-separated text for external plotting."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("recall\tprecision\n")
        for recall, precision in curve.points:
            fh.write(f"{recall!r}\t{precision!r}\n")


def save_report(report: EvalReport, text_path, json_path) -> None:
    with open(text_path, "w", encoding="utf-8") as fh:
        fh.write(render_report(report))
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report), fh, indent=2)
        fh.write("\n")
