"""
Information distances between probability rows and classical MDS
"""
import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .config import settings
from .exceptions import EmbeddingError
from .models import Embedding

logger = logging.getLogger(__name__)

PROBABILITY_TOLERANCE = 1e-6


def _check_probability(*vectors: np.ndarray) -> None:
    for v in vectors:
        if v.ndim != 1:
            raise EmbeddingError("probability vectors must be one-dimensional")
        if np.any(v < 0) or abs(v.sum() - 1.0) > PROBABILITY_TOLERANCE:
            raise EmbeddingError("input is not a probability vector")
    if len({v.shape for v in vectors}) > 1:
        raise EmbeddingError("probability vectors differ in length")


def hellinger(p, q) -> float:
    """(1/sqrt 2) * ||sqrt p - sqrt q||, bounded by 1"""
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    _check_probability(p, q)
    return float(np.linalg.norm(np.sqrt(p) - np.sqrt(q)) / np.sqrt(2.0))


def kl_divergence_distance(p, q, epsilon: Optional[float] = None) -> float:
    """Symmetrized KL(p||q) + KL(q||p), epsilon added inside the logarithms"""
    epsilon = settings.info_epsilon if epsilon is None else epsilon
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    _check_probability(p, q)
    value = np.sum((p - q) * (np.log(p + epsilon) - np.log(q + epsilon)))
    return float(max(value, 0.0))


def potential_distance(p, q, epsilon: Optional[float] = None) -> float:
    """Euclidean distance between log-potentials log(p + epsilon)"""
    epsilon = settings.info_epsilon if epsilon is None else epsilon
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    _check_probability(p, q)
    return float(np.linalg.norm(np.log(p + epsilon) - np.log(q + epsilon)))


def pairwise_information_distance(
    rows: np.ndarray,
    kind: str,
    epsilon: Optional[float] = None,
) -> np.ndarray:
    """
    Information distance between every pair of probability rows

    Same values as the per-vector functions, computed for all pairs at once.

    Args:
        rows: (n, m) row-stochastic matrix
        kind: "hellinger", "kl" or "potential"
        epsilon: Smoothing constant for the logarithms

    Returns:
        (n, n) symmetric matrix with zero diagonal
    """
    epsilon = settings.info_epsilon if epsilon is None else epsilon
    rows = np.asarray(rows, dtype=float)
    if np.any(rows < 0):
        raise EmbeddingError("probability rows must be nonnegative")
    if np.any(np.abs(rows.sum(axis=1) - 1.0) > PROBABILITY_TOLERANCE):
        raise EmbeddingError("rows do not sum to 1")

    if kind == "hellinger":
        return squareform(pdist(np.sqrt(rows), metric="euclidean")) / np.sqrt(2.0)
    if kind == "potential":
        return squareform(pdist(np.log(rows + epsilon), metric="euclidean"))
    if kind == "kl":
        logs = np.log(rows + epsilon)
        self_terms = np.sum(rows * logs, axis=1)
        cross = rows @ logs.T
        out = self_terms[:, None] + self_terms[None, :] - cross - cross.T
        out = np.maximum(out, 0.0)
        np.fill_diagonal(out, 0.0)
        return 0.5 * (out + out.T)
    raise EmbeddingError(f"Unknown information distance: {kind}")


def classical_mds(
    d: np.ndarray,
    dim: int,
    domain_ranges: Optional[List[Tuple[int, int]]] = None,
) -> Embedding:
    """
    Classical (Torgerson) MDS of a precomputed distance matrix

    B = -1/2 J D^2 J is eigendecomposed; coordinates are the top eigenvectors
    scaled by sqrt(eigenvalue), positive eigenvalues only. Each column is
    flipped so its largest-magnitude entry is positive.

    Args:
        d: (n, n) symmetric distances with zero diagonal
        dim: Requested dimension
        domain_ranges: Row ranges per domain (default: one range over all rows)

    Returns:
        Embedding; truncated=True when fewer than dim positive eigenvalues exist
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if d.ndim != 2 or d.shape[1] != n:
        raise EmbeddingError("distance matrix must be square")
    if dim < 1:
        raise EmbeddingError("dim must be positive")
    if not np.all(np.isfinite(d)):
        raise EmbeddingError("distance matrix must be finite")
    if not np.allclose(d, d.T, atol=1e-10):
        raise EmbeddingError("distance matrix must be symmetric")

    centering = np.eye(n) - np.ones((n, n)) / n
    gram = -0.5 * centering @ (d ** 2) @ centering
    gram = 0.5 * (gram + gram.T)

    evals, evecs = np.linalg.eigh(gram)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]

    tolerance = max(np.abs(evals).max(initial=0.0), 1.0) * n * np.finfo(float).eps
    keep = np.flatnonzero(evals > tolerance)[:dim]
    truncated = len(keep) < dim
    if truncated:
        logger.warning(f"MDS: only {len(keep)} positive eigenvalues, requested dim={dim}")

    coords = evecs[:, keep] * np.sqrt(evals[keep])
    for c in range(coords.shape[1]):
        pivot = np.argmax(np.abs(coords[:, c]))
        if coords[pivot, c] < 0:
            coords[:, c] = -coords[:, c]

    return Embedding(
        coords=coords,
        eigenvalues=evals[keep],
        domain_ranges=domain_ranges or [(0, n)],
        truncated=truncated,
    )
