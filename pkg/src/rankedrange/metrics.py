"""Evaluation metrics for binary, multi-class, and multi-label prediction.

Score ties are always broken by lowest label index; a zero binary margin
counts as the positive class.
"""

from __future__ import annotations

import numpy as np


def _topk_sets(scores: np.ndarray, k: int):
    order = np.argsort(-scores, axis=1, kind="stable")
    return order[:, :k]


def error_rate(predictions, truth) -> float:
    """Fraction misclassified.

    Binary: ``predictions`` are signed margins, decision by sign.
    Multi-class: ``predictions`` is an n x l score matrix, decision by
    argmax.
    """
    predictions = np.asarray(predictions, dtype=np.float64)
    truth = np.asarray(truth)
    if predictions.shape[0] != truth.shape[0]:
        raise ValueError(
            f"length mismatch: {predictions.shape[0]} predictions, {truth.shape[0]} labels")
    if predictions.ndim == 1:
        decided = np.where(predictions >= 0, 1, -1)
        return float(np.mean(decided != truth))
    decided = np.argmax(predictions, axis=1) + 1
    return float(np.mean(decided != truth))


def topk_accuracy(scores, labels, k: int) -> float:
    """Fraction of samples whose true class scores among the top k."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    l = scores.shape[1]
    if not 1 <= k <= l:
        raise ValueError(f"k={k} outside 1..{l}")
    top = _topk_sets(scores, k)
    hits = np.any(top == (labels - 1)[:, None], axis=1)
    return float(np.mean(hits))


def topk_multilabel_accuracy(scores, labelsets, k: int) -> float:
    """Fraction of samples where the top-k prediction set Z and the truth Y
    satisfy Z subset-of Y or Y subset-of Z."""
    scores = np.asarray(scores, dtype=np.float64)
    l = scores.shape[1]
    if not 1 <= k < l:
        raise ValueError(f"k={k} outside 1..{l - 1}")
    top = _topk_sets(scores, k)
    hits = 0
    for i, Y in enumerate(labelsets):
        Z = {int(j) + 1 for j in top[i]}
        Y = set(Y)
        if Z <= Y or Y <= Z:
            hits += 1
    return hits / len(labelsets)


def average_precision(scores, labelsets) -> float:
    """Label-ranking average precision with the <=-rank convention:

    AP = (1/n) sum_i (1/|Y_i|) sum_{j in Y_i}
         |{tau in Y_i : rank(tau) <= rank(j)}| / rank(j)
    """
    scores = np.asarray(scores, dtype=np.float64)
    total = 0.0
    for i, Y in enumerate(labelsets):
        order = np.argsort(-scores[i], kind="stable")
        rank = np.empty(scores.shape[1], dtype=np.int64)
        rank[order] = np.arange(1, scores.shape[1] + 1)
        true_ranks = sorted(rank[y - 1] for y in Y)
        sample = sum((pos + 1) / r for pos, r in enumerate(true_ranks))
        total += sample / len(Y)
    return total / len(labelsets)
