"""
Shortest Paths on the Union of Domains (SPUD)
Within-domain geodesics, anchored cross-domain geodesic estimation and the
NAMA all-pairs variant, embedded with classical MDS
"""
import logging
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components, dijkstra

from .config import settings
from .data import normalize_01
from .embed import classical_mds, pairwise_information_distance
from .exceptions import GeodesicError
from .graph import build_domain_similarity, pairwise_distances
from .models import AlignmentResult, CrossGeodesic, DataMatrix, DomainPair, DomainSimilarity, Geodesics
from .schemas import GeodesicConfig, KernelParams

logger = logging.getLogger(__name__)

# zero-length edges would vanish from a sparse graph; this keeps them while
# leaving every nonzero path sum unchanged
_ZERO_EDGE = np.finfo(float).tiny


class NearestAnchors(NamedTuple):
    """Per point: position in the anchor array of its nearest anchor (-1 if none) and the distance"""
    position: np.ndarray
    distance: np.ndarray


# ====================================
# Within-domain geodesics
# ====================================
def shortest_paths(lengths: sparse.spmatrix) -> Geodesics:
    """
    All-pairs shortest paths over a nonnegative sparse undirected graph,
    one priority-queue search per source

    Args:
        lengths: Edge-length matrix (absent entries are non-edges)

    Returns:
        Geodesics with inf for unreachable pairs
    """
    graph = sparse.csr_matrix(lengths, dtype=float)
    if graph.nnz and graph.data.min() < 0:
        raise GeodesicError("edge lengths must be nonnegative")
    graph.data = np.maximum(graph.data, _ZERO_EDGE)
    dists = dijkstra(graph, directed=False)
    return Geodesics(dists=dists)


def edge_lengths(w: DomainSimilarity) -> sparse.csr_matrix:
    """1 - similarity on the off-diagonal k-NN edges, 0-1 normalized within the domain"""
    coo = sparse.coo_matrix(w.weights)
    off = coo.row != coo.col
    rows, cols = coo.row[off], coo.col[off]
    lengths = 1.0 - coo.data[off]
    if lengths.size:
        lengths = np.maximum(normalize_01(lengths, mode="matrix"), _ZERO_EDGE)
    return sparse.csr_matrix((lengths, (rows, cols)), shape=w.weights.shape)


def domain_geodesics(w: DomainSimilarity) -> Geodesics:
    """
    Shortest-path distances over one domain's k-NN graph

    Args:
        w: Domain similarity

    Returns:
        Geodesics; disconnected pairs are inf (flagged, not an error)
    """
    geo = shortest_paths(edge_lengths(w))
    unreachable = int(np.sum(~geo.reachable))
    if unreachable:
        logger.warning(f"Domain graph is disconnected: {unreachable} unreachable ordered pairs")
    return geo


def bridge_components(w: DomainSimilarity, data: DataMatrix) -> Tuple[sparse.csr_matrix, int]:
    """
    Edge lengths of a domain graph with every pair of components linked

    Each pair of components gets one edge between its two closest points. The
    edge length is their feature distance divided by the longest k-NN distance
    of the domain.

    Args:
        w: Domain similarity
        data: The observations w was built from

    Returns:
        (edge lengths, number of components before bridging)
    """
    lengths = edge_lengths(w)
    n_components, labels = connected_components(w.weights, directed=False)
    if n_components == 1:
        return lengths, 1

    dists = pairwise_distances(data, w.params.metric)
    reference = dists[np.arange(w.n)[:, None], w.neighbors].max()
    scale = reference if reference > 0 else 1.0
    members = [np.flatnonzero(labels == c) for c in range(n_components)]

    rows: List[int] = []
    cols: List[int] = []
    vals: List[float] = []
    for a in range(n_components):
        for b in range(a + 1, n_components):
            block = dists[np.ix_(members[a], members[b])]
            i, j = np.unravel_index(np.argmin(block), block.shape)
            p, q = members[a][i], members[b][j]
            length = max(block[i, j] / scale, _ZERO_EDGE)
            rows += [p, q]
            cols += [q, p]
            vals += [length, length]

    bridges = sparse.csr_matrix((vals, (rows, cols)), shape=lengths.shape)
    logger.warning(f"Domain graph has {n_components} components; added {len(vals) // 2} bridge edges")
    return sparse.csr_matrix(lengths + bridges), n_components


def nearest_anchor(dists: np.ndarray, anchors: np.ndarray) -> NearestAnchors:
    """
    Nearest anchor of every point by within-domain geodesic distance

    Args:
        dists: (n, n) within-domain distances (inf = unreachable)
        anchors: Anchor point indices in this domain

    Returns:
        NearestAnchors; ties go to the lower anchor index
    """
    anchors = np.asarray(anchors, dtype=np.int64)
    if anchors.size == 0:
        raise GeodesicError("nearest_anchor needs at least one anchor")

    order = np.argsort(anchors, kind="stable")
    to_anchor = np.asarray(dists)[:, anchors[order]]
    best = np.argmin(to_anchor, axis=1)
    distance = to_anchor[np.arange(len(best)), best]
    position = np.where(np.isfinite(distance), order[best], -1)
    return NearestAnchors(position=position, distance=distance)


# ====================================
# Cross-domain geodesics
# ====================================
def _aggregate(c1: np.ndarray, c2: np.ndarray, aggregation: str) -> np.ndarray:
    if aggregation == "min":
        return np.minimum(c1, c2)
    if aggregation == "max":
        return np.maximum(c1, c2)
    if aggregation == "mean":
        return 0.5 * (c1 + c2)
    if aggregation == "abs_diff":
        with np.errstate(invalid="ignore"):
            out = np.abs(c1 - c2)
        return np.where(np.isfinite(c1) & np.isfinite(c2), out, np.inf)
    raise GeodesicError(f"Unknown aggregation: {aggregation}")


def _min_plus(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """(left ⊗ right)[i, j] = min_r left[i, r] + right[r, j]"""
    out = np.full((left.shape[0], right.shape[1]), np.inf)
    for r in range(left.shape[1]):
        np.minimum(out, left[:, r : r + 1] + right[r : r + 1, :], out=out)
    return out


def _through_anchors(gx: np.ndarray, gy: np.ndarray, ax: np.ndarray, ay: np.ndarray, hop: float) -> np.ndarray:
    """
    Exact union-graph distances from X to Y

    Any union path splits at its anchor hops into single-domain legs, so the
    shortest one is found on the graph contracted to the 2m anchor endpoints.
    """
    m = len(ax)
    contracted = np.full((2 * m, 2 * m), np.inf)
    contracted[:m, :m] = gx[np.ix_(ax, ax)]
    contracted[m:, m:] = gy[np.ix_(ay, ay)]
    idx = np.arange(m)
    contracted[idx, m + idx] = np.minimum(contracted[idx, m + idx], hop)
    contracted[m + idx, idx] = np.minimum(contracted[m + idx, idx], hop)
    finite = np.where(np.isfinite(contracted), np.maximum(contracted, _ZERO_EDGE), 0.0)
    np.fill_diagonal(finite, 0.0)
    anchor_dists = dijkstra(sparse.csr_matrix(finite), directed=False)

    # x_i -> some X anchor -> (contracted path) -> some Y anchor -> y_j
    x_to_yanchor = _min_plus(gx[:, ax], anchor_dists[:m, m:])
    return _min_plus(x_to_yanchor, gy[ay, :])


def cross_geodesics(
    pair: DomainPair,
    gx: np.ndarray,
    gy: np.ndarray,
    cfg: GeodesicConfig,
) -> CrossGeodesic:
    """
    Estimate d_G between every x_i and y_j through the known anchors

    Args:
        pair: Domains and anchors
        gx: (n_x, n_x) within-domain distances of X
        gy: (n_y, n_y) within-domain distances of Y
        cfg: Aggregation / mode options

    Returns:
        CrossGeodesic over all n_x + n_y points
    """
    anchors = pair.anchors
    if len(anchors) == 0:
        raise GeodesicError("cross-domain geodesics need at least one anchor")
    gx = np.asarray(gx, dtype=float)
    gy = np.asarray(gy, dtype=float)
    ax, ay = anchors[:, 0], anchors[:, 1]
    hop = 1.0 - cfg.nu

    if cfg.mode == "nearest_anchor":
        near_x = nearest_anchor(gx, ax)
        near_y = nearest_anchor(gy, ay)
        # c1: x_i -> a_{x_i}, hop, ã_{x_i} -> y_j
        partner_y = np.where(near_x.position >= 0, ay[near_x.position.clip(0)], 0)
        c1 = near_x.distance[:, None] + hop + gy[partner_y, :]
        c1[near_x.position < 0, :] = np.inf
        # c2: y_j -> a_{y_j}, hop, ã_{y_j} -> x_i
        partner_x = np.where(near_y.position >= 0, ax[near_y.position.clip(0)], 0)
        c2 = (near_y.distance[:, None] + hop + gx[partner_x, :]).T
        c2[:, near_y.position < 0] = np.inf
        cross = _aggregate(c1, c2, cfg.aggregation)
    elif cfg.mode in ("all_anchors", "dense_nama"):
        cross = _through_anchors(gx, gy, ax, ay, hop)
    else:
        raise GeodesicError(f"Unknown geodesic mode: {cfg.mode}")

    n_x, n_y = pair.n_x, pair.n_y
    dists = np.zeros((n_x + n_y, n_x + n_y))
    dists[:n_x, :n_x] = gx
    dists[n_x:, n_x:] = gy
    dists[:n_x, n_x:] = cross
    dists[n_x:, :n_x] = cross.T
    return CrossGeodesic(dists=dists, reachable=np.isfinite(dists), n_x=n_x, n_y=n_y)


def impute_unreachable(dists: np.ndarray, multiplier: Optional[float] = None) -> np.ndarray:
    """Replace inf by (max finite distance) x multiplier"""
    multiplier = settings.unreachable_multiplier if multiplier is None else multiplier
    dists = np.array(dists, dtype=float)
    finite = np.isfinite(dists)
    if finite.all():
        return dists
    top = dists[finite].max() if finite.any() else 1.0
    logger.warning(f"Imputing {int(np.sum(~finite))} unreachable distances as {top * multiplier:g}")
    dists[~finite] = top * multiplier
    return dists


# ====================================
# Alignment
# ====================================
def _geodesics_of(data: DataMatrix, kparams: KernelParams, bridge: bool) -> Tuple[np.ndarray, bool]:
    """Within-domain geodesics, optionally over the bridged graph; second item is True if bridges were added"""
    w = build_domain_similarity(data, kparams)
    if not bridge:
        return domain_geodesics(w).dists, False
    lengths, n_components = bridge_components(w, data)
    return shortest_paths(lengths).dists, n_components > 1


def spud_align(
    pair: DomainPair,
    kparams: KernelParams,
    cfg: GeodesicConfig,
    dim: int,
) -> AlignmentResult:
    """
    Full SPUD pipeline: graphs -> geodesics -> joint distances -> MDS

    In dense_nama mode the within-domain distances are the 0-1 normalized
    all-pairs distances and the aggregation is the exact minimum through anchors.
    Otherwise a disconnected k-NN graph is bridged before the shortest paths
    when cfg.bridge_components is set, and any pair still unreachable is imputed.

    Args:
        pair: Domains and anchors
        kparams: Kernel parameters
        cfg: Geodesic options
        dim: Embedding dimension

    Returns:
        AlignmentResult
    """
    if dim > pair.n_total - 1:
        raise GeodesicError(f"dim={dim} exceeds total points - 1 ({pair.n_total - 1})")

    if cfg.mode == "dense_nama":
        cfg = cfg.model_copy(update={"aggregation": "min"})
        gx = pairwise_distances(pair.x, kparams.metric)
        gy = pairwise_distances(pair.y, kparams.metric)
        bridged_x = bridged_y = False
        method = "nama"
    else:
        gx, bridged_x = _geodesics_of(pair.x, kparams, cfg.bridge_components)
        gy, bridged_y = _geodesics_of(pair.y, kparams, cfg.bridge_components)
        method = "spud"

    joint = cross_geodesics(pair, gx, gy, cfg)
    dists = impute_unreachable(joint.dists)
    flags = [] if joint.reachable.all() else ["unreachable_imputed"]
    if bridged_x or bridged_y:
        flags.append("components_bridged")

    if cfg.use_info_distance:
        sums = dists.sum(axis=1, keepdims=True)
        rows = dists / np.where(sums > 0, sums, 1.0)
        rows[sums.ravel() == 0] = 1.0 / dists.shape[1]
        dists = pairwise_information_distance(rows, "potential")

    embedding = classical_mds(dists, dim, domain_ranges=[(0, pair.n_x), (pair.n_x, pair.n_total)])
    if embedding.truncated:
        flags.append("embedding_truncated")

    logger.info(
        f"{method.upper()} aligned {pair.n_x}+{pair.n_y} points with {len(pair.anchors)} anchors "
        f"(mode={cfg.mode}, aggregation={cfg.aggregation}, dim={embedding.dim})"
    )
    return AlignmentResult(
        method=method,
        embedding=embedding,
        n_x=pair.n_x,
        n_y=pair.n_y,
        anchors=pair.anchors,
        flags=flags,
    )
