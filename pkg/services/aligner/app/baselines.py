"""
Reference baselines for comparison runs
JLMA (Laplacian eigenmaps on the anchor-linked joint graph) and MAPA
(per-domain Laplacian eigenmaps aligned by Procrustes on the anchors)
"""
import logging
from typing import NamedTuple

import numpy as np

from .exceptions import BaselineError
from .graph import build_domain_similarity, build_joint_similarity
from .models import AlignmentResult, DomainPair, Embedding
from .schemas import BaselineConfig

logger = logging.getLogger(__name__)

ZERO_EIGENVALUE = 1e-9


class SpectralEmbedding(NamedTuple):
    coords: np.ndarray
    eigenvalues: np.ndarray


class ProcrustesFit(NamedTuple):
    """Y_aligned = scale * Y @ rotation + translation"""
    rotation: np.ndarray
    scale: float
    translation: np.ndarray
    residual_before: float
    residual_after: float
    rank: int

    @property
    def transform(self) -> np.ndarray:
        return self.scale * self.rotation

    def apply(self, points: np.ndarray) -> np.ndarray:
        return self.scale * points @ self.rotation + self.translation


def symmetric_normalized_laplacian(w: np.ndarray) -> np.ndarray:
    """L = I - D^{-1/2} W D^{-1/2}"""
    w = np.asarray(w, dtype=float)
    degree = w.sum(axis=1)
    if np.any(degree <= 0):
        raise BaselineError("graph has isolated nodes with zero degree")
    inv_sqrt = 1.0 / np.sqrt(degree)
    laplacian = np.eye(len(w)) - inv_sqrt[:, None] * w * inv_sqrt[None, :]
    return 0.5 * (laplacian + laplacian.T)


def laplacian_eigenmaps(w: np.ndarray, dim: int) -> SpectralEmbedding:
    """
    Eigenvectors of the smallest nonzero eigenvalues of the normalized Laplacian,
    mapped back by D^{-1/2} so the columns are D-orthonormal

    Args:
        w: Symmetric similarity matrix
        dim: Number of components

    Returns:
        SpectralEmbedding
    """
    w = np.asarray(w, dtype=float)
    laplacian = symmetric_normalized_laplacian(w)
    try:
        evals, evecs = np.linalg.eigh(laplacian)
    except np.linalg.LinAlgError as e:
        raise BaselineError(f"eigensolver failed: {e}") from e

    nonzero = np.flatnonzero(evals > ZERO_EIGENVALUE)
    if len(nonzero) < dim:
        raise BaselineError(f"only {len(nonzero)} nonzero Laplacian eigenvalues, need {dim}")
    keep = nonzero[:dim]
    coords = evecs[:, keep] / np.sqrt(w.sum(axis=1))[:, None]
    for c in range(coords.shape[1]):
        pivot = np.argmax(np.abs(coords[:, c]))
        if coords[pivot, c] < 0:
            coords[:, c] = -coords[:, c]
    return SpectralEmbedding(coords=coords, eigenvalues=evals[keep])


def procrustes(source: np.ndarray, target: np.ndarray) -> ProcrustesFit:
    """
    Orthogonal Procrustes with scaling and translation mapping source onto target

    Args:
        source: (m, d) points to move (Y anchors)
        target: (m, d) reference points (X anchors)

    Returns:
        ProcrustesFit
    """
    source = np.asarray(source, dtype=float)
    target = np.asarray(target, dtype=float)
    if source.shape != target.shape:
        raise BaselineError("Procrustes needs matching point sets")

    mu_s, mu_t = source.mean(axis=0), target.mean(axis=0)
    src, tgt = source - mu_s, target - mu_t
    cross_cov = src.T @ tgt
    u, s, vt = np.linalg.svd(cross_cov)
    rotation = u @ vt
    norm = np.sum(src ** 2)
    scale = float(s.sum() / norm) if norm > 0 else 1.0
    translation = mu_t - scale * mu_s @ rotation

    rank = int(np.sum(s > ZERO_EIGENVALUE * max(s.max(initial=0.0), 1.0)))
    before = float(np.linalg.norm(source - target))
    after = float(np.linalg.norm(scale * source @ rotation + translation - target))
    return ProcrustesFit(rotation, scale, translation, before, after, rank)


def jlma_align(pair: DomainPair, cfg: BaselineConfig) -> AlignmentResult:
    """
    Joint Laplacian manifold alignment: W with direct anchor links only
    (nu = 1, gamma = 0), embedded by Laplacian eigenmaps

    Args:
        pair: Domains and anchors
        cfg: Baseline options

    Returns:
        AlignmentResult
    """
    if len(pair.anchors) == 0:
        raise BaselineError("JLMA needs anchors")
    wx = build_domain_similarity(pair.x, cfg.kparams)
    wy = build_domain_similarity(pair.y, cfg.kparams)
    joint = build_joint_similarity(pair, wx, wy, nu=1.0, gamma=0.0)
    spectral = laplacian_eigenmaps(joint.w, cfg.dim)

    embedding = Embedding(
        coords=spectral.coords,
        eigenvalues=spectral.eigenvalues,
        domain_ranges=[(0, pair.n_x), (pair.n_x, pair.n_total)],
    )
    logger.info(f"JLMA aligned {pair.n_x}+{pair.n_y} points (dim={cfg.dim})")
    return AlignmentResult(method="jlma", embedding=embedding, n_x=pair.n_x, n_y=pair.n_y, anchors=pair.anchors)


def mapa_align(pair: DomainPair, cfg: BaselineConfig) -> AlignmentResult:
    """
    Manifold alignment by Procrustes: separate Laplacian eigenmaps, then the Y
    embedding is mapped onto X through the anchors

    Args:
        pair: Domains and anchors (at least dim + 1)
        cfg: Baseline options

    Returns:
        AlignmentResult; flagged "degenerate_anchors" when the anchor
        cross-covariance is rank deficient
    """
    anchors = pair.anchors
    if len(anchors) < cfg.dim + 1:
        raise BaselineError(f"MAPA needs at least dim + 1 = {cfg.dim + 1} anchors, got {len(anchors)}")

    wx = build_domain_similarity(pair.x, cfg.kparams)
    wy = build_domain_similarity(pair.y, cfg.kparams)
    ex = laplacian_eigenmaps(wx.weights.toarray(), cfg.dim)
    ey = laplacian_eigenmaps(wy.weights.toarray(), cfg.dim)

    fit = procrustes(ey.coords[anchors[:, 1]], ex.coords[anchors[:, 0]])
    flags = []
    if fit.rank < cfg.dim:
        logger.warning(f"MAPA: anchor cross-covariance has rank {fit.rank} < dim {cfg.dim}")
        flags.append("degenerate_anchors")

    coords = np.vstack([ex.coords, fit.apply(ey.coords)])
    embedding = Embedding(
        coords=coords,
        eigenvalues=ex.eigenvalues,
        domain_ranges=[(0, pair.n_x), (pair.n_x, pair.n_total)],
    )
    logger.info(
        f"MAPA aligned {pair.n_x}+{pair.n_y} points: anchor residual "
        f"{fit.residual_before:.4g} -> {fit.residual_after:.4g}"
    )
    return AlignmentResult(
        method="mapa", embedding=embedding, n_x=pair.n_x, n_y=pair.n_y, anchors=anchors, flags=flags
    )
