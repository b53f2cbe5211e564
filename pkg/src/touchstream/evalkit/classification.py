"""Window-level classification metrics: confusion matrix and AUCs.

AUCs integrate the threshold sweep with the trapezoid rule; tie groups are
collapsed so AUC-ROC equals the pairwise (Mann-Whitney) count exactly.
"""

from dataclasses import dataclass

import numpy as np

from touchstream.errors import ValidationError


def _roc_points(scores, labels):
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(np.int64)
    pos = int(labels.sum())
    neg = len(labels) - pos
    if pos == 0 or neg == 0:
        raise ValidationError("AUC undefined: labels contain a single class")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    tp = np.cumsum(y)
    fp = np.cumsum(1 - y)
    last_of_group = np.nonzero(np.r_[s[1:] != s[:-1], True])[0]
    tpr = np.r_[0.0, tp[last_of_group] / pos]
    fpr = np.r_[0.0, fp[last_of_group] / neg]
    return fpr, tpr, tp[last_of_group], fp[last_of_group], pos


def auc_roc(scores, labels):
    fpr, tpr, *_ = _roc_points(scores, labels)
    return float(np.trapezoid(tpr, fpr))


def auc_pr(scores, labels):
    _, _, tp, fp, pos = _roc_points(scores, labels)
    recall = tp / pos
    precision = tp / np.maximum(tp + fp, 1)
    recall = np.r_[0.0, recall]
    precision = np.r_[precision[0], precision]
    return float(np.trapezoid(precision, recall))


def auc_roc_pairwise(scores, labels):
    """Brute-force pair enumeration oracle (ties credit 1/2)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    pos = scores[labels]
    neg = scores[~labels]
    if len(pos) == 0 or len(neg) == 0:
        raise ValidationError("AUC undefined: labels contain a single class")
    wins = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return float((wins + 0.5 * ties) / (len(pos) * len(neg)))


@dataclass
class ClassificationReport:
    confusion: np.ndarray  # [C, C], rows = true class
    auc_roc: float  # macro one-vs-rest
    auc_pr: float
    per_class_auc_roc: dict
    per_class_auc_pr: dict


def classification_report(scores, labels):
    """Multi-class report from [N, C] scores (or [N] binary scores)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(np.int64)
    if scores.ndim == 1:
        scores = np.stack([1.0 - scores, scores], axis=1)
    n_classes = scores.shape[1]
    pred = scores.argmax(axis=1)
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(confusion, (labels, pred), 1)
    rocs, prs = {}, {}
    for c in range(n_classes):
        mask = (labels == c).astype(np.int64)
        if mask.sum() in (0, len(mask)):
            continue
        rocs[c] = auc_roc(scores[:, c], mask)
        prs[c] = auc_pr(scores[:, c], mask)
    if not rocs:
        raise ValidationError("AUC undefined: labels contain a single class")
    return ClassificationReport(
        confusion=confusion,
        auc_roc=float(np.mean(list(rocs.values()))),
        auc_pr=float(np.mean(list(prs.values()))),
        per_class_auc_roc=rocs,
        per_class_auc_pr=prs,
    )
