"""
Local geometry: exact k-NN search, the alpha-decaying kernel, per-domain
similarity matrices and the joint block matrix W
"""
import logging
from pathlib import Path
from typing import NamedTuple, Union

import numpy as np
from scipy import sparse
from scipy.spatial.distance import cdist

from .data import normalize_01
from .exceptions import GraphError
from .models import DataMatrix, DomainPair, DomainSimilarity, JointSimilarity
from .schemas import KernelParams

logger = logging.getLogger(__name__)

MIN_BANDWIDTH = 1e-12


class KnnResult(NamedTuple):
    """Neighbor lists, row i holding the k nearest points to i (self excluded)"""
    indices: np.ndarray
    distances: np.ndarray


def pairwise_distances(data: DataMatrix, metric: str = "euclidean") -> np.ndarray:
    """All-pairs distances of one domain, 0-1 normalized over the whole matrix"""
    return normalize_01(cdist(data.values, data.values, metric=metric), mode="matrix")


def knn_distances(data: DataMatrix, params: KernelParams) -> KnnResult:
    """
    Exact k nearest neighbors of every point

    Distances are the domain's 0-1 normalized pairwise distances. Ties are broken
    by lower index (stable sort).

    Args:
        data: Domain observations
        params: Kernel parameters (k, metric)

    Returns:
        KnnResult with (n, k) index and distance arrays
    """
    n = data.n_obs
    if params.k >= n:
        raise GraphError(f"k={params.k} must be smaller than the number of points ({n})")

    dists = pairwise_distances(data, params.metric)
    masked = dists.copy()
    np.fill_diagonal(masked, np.inf)
    order = np.argsort(masked, axis=1, kind="stable")[:, : params.k]
    return KnnResult(indices=order, distances=np.take_along_axis(dists, order, axis=1))


def alpha_decay_kernel(d, sigma_i, sigma_j, alpha: float):
    """
    Two-sided adaptive-bandwidth kernel
    K = 1/2 exp(-(d/sigma_i)^alpha) + 1/2 exp(-(d/sigma_j)^alpha)

    Works elementwise on scalars or arrays.
    """
    d = np.asarray(d, dtype=float)
    sigma_i = np.asarray(sigma_i, dtype=float)
    sigma_j = np.asarray(sigma_j, dtype=float)
    if alpha <= 0:
        raise GraphError("alpha must be positive")
    if np.any(sigma_i <= 0) or np.any(sigma_j <= 0):
        raise GraphError("kernel bandwidth must be positive")
    if np.any(d < 0):
        raise GraphError("distances must be nonnegative")

    out = 0.5 * np.exp(-((d / sigma_i) ** alpha)) + 0.5 * np.exp(-((d / sigma_j) ** alpha))
    return float(out) if out.ndim == 0 else out


def _bandwidths(knn: KnnResult) -> np.ndarray:
    """sigma_k per point, with the zero-bandwidth fallback for duplicates"""
    sigma = knn.distances[:, -1].copy()
    if np.any(sigma <= 0):
        positive = knn.distances[knn.distances > 0]
        fallback = positive.min() if positive.size else MIN_BANDWIDTH
        logger.debug(f"Replacing {int(np.sum(sigma <= 0))} zero bandwidths with {fallback:g}")
        sigma[sigma <= 0] = fallback
    return sigma


def build_domain_similarity(data: DataMatrix, params: KernelParams) -> DomainSimilarity:
    """
    Sparse symmetric kernel matrix on the union of k-NN edges, diagonal = 1

    Args:
        data: Domain observations
        params: Kernel parameters

    Returns:
        DomainSimilarity
    """
    knn = knn_distances(data, params)
    n = data.n_obs
    sigma = _bandwidths(knn)

    rows = np.repeat(np.arange(n), params.k)
    cols = knn.indices.ravel()
    vals = alpha_decay_kernel(knn.distances.ravel(), sigma[rows], sigma[cols], params.alpha)

    directed = sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    # kernel is symmetric in (i, j), so the max keeps every edge listed by either endpoint
    weights = directed.maximum(directed.T).tolil()
    weights.setdiag(1.0)
    weights = sparse.csr_matrix(weights)

    logger.debug(f"Domain similarity: n={n}, nnz={weights.nnz}, k={params.k}, alpha={params.alpha}")
    return DomainSimilarity(weights=weights, neighbors=knn.indices, params=params)


def build_joint_similarity(
    pair: DomainPair,
    wx: DomainSimilarity,
    wy: DomainSimilarity,
    nu: float,
    gamma: float,
) -> JointSimilarity:
    """
    Assemble W = [[W_X, W_XY], [W_YX, W_Y]]

    Anchor entries get nu. For an anchor (i, j), every k-NN y_l of y_j whose own
    correspondence is unknown gets W_XY(i, l) = gamma * W_Y(l, j); symmetrically
    W_XY(m, j) = gamma * W_X(m, i) for unanchored k-NN x_m of x_i. Colliding
    extension entries keep the maximum and never overwrite an anchor entry.

    Args:
        pair: Domains and anchors
        wx: Similarity of domain X
        wy: Similarity of domain Y
        nu: Anchor similarity in (0, 1]
        gamma: Neighbor extension weight in [0, 1]

    Returns:
        JointSimilarity
    """
    if not 0 < nu <= 1:
        raise GraphError(f"nu must lie in (0, 1], got {nu}")
    if not 0 <= gamma <= 1:
        raise GraphError(f"gamma must lie in [0, 1], got {gamma}")
    if wx.n != pair.n_x or wy.n != pair.n_y:
        raise GraphError("similarity sizes do not match the domain pair")

    n_x, n_y = pair.n_x, pair.n_y
    anchors = pair.anchors
    cross = np.zeros((n_x, n_y))

    if len(anchors) and gamma > 0:
        anchored_x = np.zeros(n_x, dtype=bool)
        anchored_y = np.zeros(n_y, dtype=bool)
        anchored_x[anchors[:, 0]] = True
        anchored_y[anchors[:, 1]] = True
        wx_csr, wy_csr = wx.weights, wy.weights

        for i, j in anchors:
            for l in wy.neighbors[j]:
                if not anchored_y[l]:
                    cross[i, l] = max(cross[i, l], gamma * wy_csr[l, j])
            for m in wx.neighbors[i]:
                if not anchored_x[m]:
                    cross[m, j] = max(cross[m, j], gamma * wx_csr[m, i])

    if len(anchors):
        cross[anchors[:, 0], anchors[:, 1]] = nu

    w = np.zeros((n_x + n_y, n_x + n_y))
    w[:n_x, :n_x] = wx.weights.toarray()
    w[n_x:, n_x:] = wy.weights.toarray()
    w[:n_x, n_x:] = cross
    w[n_x:, :n_x] = cross.T

    logger.debug(
        f"Joint similarity: n_x={n_x}, n_y={n_y}, anchors={len(anchors)}, "
        f"cross nnz={int(np.count_nonzero(cross))}"
    )
    return JointSimilarity(w=w, n_x=n_x, n_y=n_y, nu=nu, gamma=gamma, anchors=anchors)


def export_coo(w: Union[JointSimilarity, DomainSimilarity], path: Union[str, Path]) -> Path:
    """
    Write nonzero entries as "row,col,value" lines

    Args:
        w: Joint or per-domain similarity
        path: Destination file

    Returns:
        The written path
    """
    path = Path(path)
    matrix = sparse.coo_matrix(w.w if isinstance(w, JointSimilarity) else w.weights)
    order = np.lexsort((matrix.col, matrix.row))
    with path.open("w", encoding="utf-8") as fh:
        fh.write("row,col,value\n")
        for r, c, v in zip(matrix.row[order], matrix.col[order], matrix.data[order]):
            fh.write(f"{r},{c},{v:.17g}\n")
    return path
