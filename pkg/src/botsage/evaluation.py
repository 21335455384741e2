"""Classification metrics, PR/ROC curves, threshold sweep, and ablations.

Bots (label 1) are the positive class throughout.  Zero-denominator
metrics report 0 together with a degenerate flag instead of raising, so
sweeps and ablations never abort on a pathological split.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DataError,
    DegenerateLabelsError,
    DimensionError,
    EmptyInputError,
    EmptyMaskError,
    MissingMetadataError,
    ModelMismatchError,
)
from .features import AUX_NAMES
from .graph import GraphStats, build_graph
from .ingest import Dataset, EmbeddingStore
from .sage import Model, TrainConfig, _fused_for_model, predict, train


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion(preds, truth) -> ConfusionMatrix:
    """Count outcomes with bot=1 as the positive class."""
    preds = np.asarray(preds, dtype=np.int64).ravel()
    truth = np.asarray(truth, dtype=np.int64).ravel()
    if preds.size == 0:
        raise EmptyInputError("cannot build a confusion matrix from empty inputs")
    if preds.shape != truth.shape:
        raise DimensionError(f"length mismatch: {preds.size} predictions vs {truth.size} labels")
    for name, arr in (("predictions", preds), ("labels", truth)):
        if not np.isin(arr, (0, 1)).all():
            raise DataError(f"{name} must be 0 or 1")
    return ConfusionMatrix(
        tp=int(((preds == 1) & (truth == 1)).sum()),
        fp=int(((preds == 1) & (truth == 0)).sum()),
        fn=int(((preds == 0) & (truth == 1)).sum()),
        tn=int(((preds == 0) & (truth == 0)).sum()),
    )


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    degenerate: tuple[str, ...] = ()


def metrics(cm: ConfusionMatrix) -> Metrics:
    """Accuracy/precision/recall/F1; zero denominators give 0 plus a flag."""
    if cm.total == 0:
        raise EmptyInputError("confusion matrix is empty")
    degenerate = []
    accuracy = (cm.tp + cm.tn) / cm.total
    if cm.tp + cm.fp > 0:
        precision = cm.tp / (cm.tp + cm.fp)
    else:
        precision = 0.0
        degenerate.append("precision")
    if cm.tp + cm.fn > 0:
        recall = cm.tp / (cm.tp + cm.fn)
    else:
        recall = 0.0
        degenerate.append("recall")
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
        degenerate.append("f1")
    return Metrics(
        accuracy=float(accuracy),
        precision=float(precision),
        recall=float(recall),
        f1=float(f1),
        degenerate=tuple(degenerate),
    )


@dataclass(frozen=True)
class CurvePoint:
    threshold: float
    x: float
    y: float


def _ranked_counts(scores, truth):
    scores = np.asarray(scores, dtype=np.float64).ravel()
    truth = np.asarray(truth, dtype=np.int64).ravel()
    if scores.shape != truth.shape:
        raise DimensionError(f"length mismatch: {scores.size} scores vs {truth.size} labels")
    if scores.size == 0:
        raise EmptyInputError("need at least one score")
    if not np.isfinite(scores).all():
        raise DataError("scores must be finite")
    n_pos = int((truth == 1).sum())
    n_neg = int((truth == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabelsError("curves need at least one positive and one negative label")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    cum_tp = np.cumsum(truth[order] == 1)
    cum_fp = np.cumsum(truth[order] == 0)
    # one point per distinct score value: the last index of each tied run
    boundary = np.nonzero(np.diff(sorted_scores) != 0.0)[0]
    boundary = np.append(boundary, scores.size - 1)
    return sorted_scores[boundary], cum_tp[boundary], cum_fp[boundary], n_pos, n_neg


def pr_curve(scores, truth) -> list[CurvePoint]:
    """Precision-recall points at every distinct score threshold, descending."""
    thresholds, tp, fp, n_pos, _ = _ranked_counts(scores, truth)
    return [
        CurvePoint(threshold=float(t), x=float(tpi / n_pos), y=float(tpi / (tpi + fpi)))
        for t, tpi, fpi in zip(thresholds, tp, fp)
    ]


def roc_auc(scores, truth) -> tuple[list[CurvePoint], float]:
    """ROC points (x=FPR, y=TPR) and the trapezoidal AUC; ties step diagonally."""
    thresholds, tp, fp, n_pos, n_neg = _ranked_counts(scores, truth)
    points = [
        CurvePoint(threshold=float(t), x=float(fpi / n_neg), y=float(tpi / n_pos))
        for t, tpi, fpi in zip(thresholds, tp, fp)
    ]
    auc = 0.0
    prev_x = prev_y = 0.0
    for p in points:
        auc += (p.x - prev_x) * (p.y + prev_y) / 2.0
        prev_x, prev_y = p.x, p.y
    return points, float(auc)


# ---------------------------------------------------------------------------
# model evaluation on a dataset
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EvalResult:
    subset: str
    indices: np.ndarray
    scores: np.ndarray
    truth: np.ndarray
    preds: np.ndarray
    cm: ConfusionMatrix
    scores_metrics: Metrics

    @property
    def accuracy(self) -> float:
        return self.scores_metrics.accuracy


def evaluate_model(
    model: Model, dataset: Dataset, store: EmbeddingStore, subset: str = "test"
) -> EvalResult:
    """Metrics for the model on a node subset: test/val/train split or all labeled."""
    labels = dataset.labels()
    if subset == "all":
        indices = np.nonzero(labels >= 0)[0]
    elif subset in ("train", "val", "test"):
        sizes = sum(arr.size for arr in model.split.values())
        if sizes != len(dataset):
            raise ModelMismatchError(
                f"model split covers {sizes} users but dataset has {len(dataset)}"
            )
        indices = model.split[subset]
    else:
        raise ValueError(f"subset must be train/val/test/all, got {subset!r}")
    if indices.size == 0:
        raise EmptyMaskError(f"subset {subset!r} selects no users")
    if (labels[indices] < 0).any():
        raise DataError(f"subset {subset!r} contains unlabeled users")

    scores, preds = predict(model, dataset, store)
    cm = confusion(preds[indices], labels[indices])
    return EvalResult(
        subset=subset,
        indices=indices,
        scores=scores[indices],
        truth=labels[indices],
        preds=preds[indices],
        cm=cm,
        scores_metrics=metrics(cm),
    )


@dataclass(frozen=True)
class SweepPoint:
    tau: float
    accuracy: float
    stats: GraphStats


def sweep_accuracy(
    dataset: Dataset, store: EmbeddingStore, config: TrainConfig, taus
) -> list[SweepPoint]:
    """Retrain at each threshold with the same seed and report test accuracy."""
    taus = list(taus)
    if not taus:
        raise ValueError("taus must be non-empty")
    out = []
    for tau in taus:
        model = train(dataset, store, replace(config, tau=float(tau)))
        result = evaluate_model(model, dataset, store, subset="test")
        out.append(SweepPoint(tau=float(tau), accuracy=result.accuracy, stats=model.graph_summary))
    return out


@dataclass(frozen=True)
class AblationRow:
    name: str
    result: Metrics


def ablate(dataset: Dataset, store: EmbeddingStore, config: TrainConfig) -> list[AblationRow]:
    """Leave-one-out rows: drop each metadata count, then the aggregation layer."""
    if not dataset.has_aux:
        raise MissingMetadataError("ablation needs the four metadata counts")
    variants: list[tuple[str, TrainConfig]] = [("full", config)]
    for i, name in enumerate(AUX_NAMES):
        variants.append((f"without_{name}", replace(config, aux_drop=i)))
    variants.append(("without_graphsage", replace(config, use_sage=False)))

    rows = []
    for name, cfg in variants:
        model = train(dataset, store, cfg)
        result = evaluate_model(model, dataset, store, subset="test")
        rows.append(AblationRow(name=name, result=result.scores_metrics))
    return rows


def export_node_embeddings(model: Model, dataset: Dataset, store: EmbeddingStore, path) -> None:
    """Write each user's final-hidden-layer vector with id and label as CSV."""
    fused = _fused_for_model(model, dataset, store)
    graph = build_graph(fused, model.config.tau) if model.config.use_sage else None
    hidden = model.network().hidden_representation(fused.data, graph)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user_id", "label"] + [f"e{i}" for i in range(hidden.shape[1])])
        for user, row in zip(dataset.users, hidden):
            label = -1 if user.label is None else user.label
            writer.writerow([user.user_id, label] + [repr(float(v)) for v in row])


# ---------------------------------------------------------------------------
# CSV artifacts
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    return repr(float(x))


def write_pr_csv(points: list[CurvePoint], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["threshold", "recall", "precision"])
        for p in points:
            writer.writerow([_fmt(p.threshold), _fmt(p.x), _fmt(p.y)])


def write_roc_csv(points: list[CurvePoint], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["threshold", "fpr", "tpr"])
        for p in points:
            writer.writerow([_fmt(p.threshold), _fmt(p.x), _fmt(p.y)])


def write_sweep_csv(points: list[SweepPoint], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["tau", "edges", "density", "accuracy"])
        for p in points:
            stats = p.stats
            writer.writerow(
                [
                    _fmt(p.tau),
                    0 if stats is None else stats.edge_count,
                    _fmt(0.0 if stats is None else stats.density),
                    _fmt(p.accuracy),
                ]
            )


def write_ablation_csv(rows: list[AblationRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row", "accuracy", "precision", "recall", "f1"])
        for row in rows:
            m = row.result
            writer.writerow(
                [row.name, _fmt(m.accuracy), _fmt(m.precision), _fmt(m.recall), _fmt(m.f1)]
            )


def write_history_csv(history: dict[str, np.ndarray], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["epoch", "train_loss", "val_accuracy"])
        for e, l, v in zip(history["epoch"], history["train_loss"], history["val_accuracy"]):
            writer.writerow([int(e), _fmt(l), _fmt(v)])
