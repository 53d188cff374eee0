"""
Alignment quality metrics: FOSCTTM, cross-embedding classification (CE) and
the combined CE - FOSCTTM score
"""
import logging
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from .config import settings
from .exceptions import MetricsError
from .models import AlignmentResult, DomainPair, Embedding
from .schemas import MetricsReport

logger = logging.getLogger(__name__)


def _distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] == 0:
        return np.zeros((len(a), len(b)))
    return cdist(a, b)


# ====================================
# FOSCTTM
# ====================================
def foscttm_from_distances(cross: np.ndarray, true_pairs) -> float:
    """
    FOSCTTM on a cross-domain distance block

    For a true pair (i, j): the fraction of Y points strictly closer to x_i than
    y_j is, and the fraction of X points strictly closer to y_j than x_i is,
    each over the co-domain size minus one. Averaged over pairs and directions.

    Args:
        cross: (n_x, n_y) distances between X and Y points
        true_pairs: (m, 2) array of (x index, y index)

    Returns:
        Score in [0, 1]; 0 is perfect
    """
    cross = np.asarray(cross, dtype=float)
    pairs = np.asarray(true_pairs, dtype=np.int64).reshape(-1, 2)
    if len(pairs) == 0:
        raise MetricsError("FOSCTTM needs at least one true pair")
    n_x, n_y = cross.shape
    if n_x < 2 or n_y < 2:
        raise MetricsError("FOSCTTM needs at least two points per domain")

    xi, yj = pairs[:, 0], pairs[:, 1]
    match = cross[xi, yj]
    x_to_y = np.sum(cross[xi, :] < match[:, None], axis=1) / (n_y - 1)
    y_to_x = np.sum(cross[:, yj] < match[None, :], axis=0) / (n_x - 1)
    return float(np.mean(np.concatenate([x_to_y, y_to_x])))


def foscttm(embedding: Embedding, true_pairs) -> float:
    """
    FOSCTTM of a two-domain embedding

    Args:
        embedding: Joint embedding with two domain ranges (X first)
        true_pairs: (m, 2) array of (x index, y index) within each domain

    Returns:
        Score in [0, 1]
    """
    if len(embedding.domain_ranges) != 2:
        raise MetricsError("FOSCTTM needs an embedding with exactly two domains")
    cross = _distances(embedding.domain(0), embedding.domain(1))
    return foscttm_from_distances(cross, true_pairs)


# ====================================
# Cross-embedding classification
# ====================================
def knn_vote(
    train: np.ndarray,
    train_labels: np.ndarray,
    query: np.ndarray,
    k: int,
) -> np.ndarray:
    """
    k-NN majority vote; ties go to the smallest cumulative distance, then the
    lowest label id

    Args:
        train: (n, d) labeled points
        train_labels: (n,) integer labels
        query: (m, d) points to label
        k: Neighbor count

    Returns:
        (m,) predicted labels
    """
    train_labels = np.asarray(train_labels, dtype=np.int64)
    if k < 1 or k > len(train):
        raise MetricsError(f"k={k} must lie in [1, {len(train)}]")

    dists = _distances(np.asarray(query, dtype=float), np.asarray(train, dtype=float))
    nearest = np.argsort(dists, axis=1, kind="stable")[:, :k]
    predictions = np.empty(len(query), dtype=np.int64)
    for row, neighbors in enumerate(nearest):
        votes = train_labels[neighbors]
        candidates = np.unique(votes)
        counts = np.array([np.sum(votes == c) for c in candidates])
        spent = np.array([dists[row, neighbors[votes == c]].sum() for c in candidates])
        # lexsort: last key is primary
        best = np.lexsort((candidates, spent, -counts))[0]
        predictions[row] = candidates[best]
    return predictions


def cross_embedding_accuracy(
    embedding: Embedding,
    labels_x,
    labels_y,
    k: Optional[int] = None,
) -> float:
    """
    Accuracy of a k-NN classifier trained on embedded X and applied to embedded Y

    Args:
        embedding: Joint embedding (X range first)
        labels_x: Labels of the X points
        labels_y: Ground-truth labels of the Y points
        k: Neighbor count (settings.ce_k by default)

    Returns:
        Accuracy in [0, 1]
    """
    k = settings.ce_k if k is None else k
    if labels_x is None or labels_y is None:
        raise MetricsError("cross-embedding classification needs labels for both domains")
    x, y = embedding.domain(0), embedding.domain(1)
    labels_x, labels_y = np.asarray(labels_x), np.asarray(labels_y)
    if len(labels_x) != len(x) or len(labels_y) != len(y):
        raise MetricsError("label vectors do not match the embedded domains")
    predicted = knn_vote(x, labels_x, y, k)
    return float(np.mean(predicted == labels_y))


def combined_score(ce_accuracy: float, foscttm_score: float) -> float:
    """CE - FOSCTTM; closer to 1 is better"""
    return ce_accuracy - foscttm_score


def evaluate(result: AlignmentResult, pair: DomainPair, k: Optional[int] = None) -> MetricsReport:
    """
    Build a MetricsReport for an alignment

    FOSCTTM uses the pair's ground-truth correspondence (anchors when none is
    known); CE runs only when both domains carry labels.

    Args:
        result: Alignment to score
        pair: The DomainPair it was computed from
        k: CE neighbor count

    Returns:
        MetricsReport
    """
    k = settings.ce_k if k is None else k
    embedding = result.embedding
    pairs = pair.evaluation_pairs()

    fos = foscttm(embedding, pairs) if len(pairs) else None

    ce = None
    if pair.x.labels is not None and pair.y.labels is not None:
        ce = cross_embedding_accuracy(embedding, pair.x.labels, pair.y.labels, min(k, pair.n_x))

    report = MetricsReport(
        foscttm=fos,
        ce_accuracy=ce,
        n_eval_pairs=len(pairs),
        ce_k=k,
        dim=embedding.dim,
        method=result.method,
    )
    logger.info(f"Metrics for {result.method}: FOSCTTM={fos}, CE={ce}, combined={report.combined}")
    return report
