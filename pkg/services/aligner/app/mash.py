"""
Manifold Alignment via Stochastic Hopping (MASH)
Joint diffusion operator, Von Neumann entropy time-scale selection, integrated
diffusion distance, pseudo-connection refinement and label transfer
"""
import logging
import math
from typing import List, NamedTuple, Optional, Set, Tuple

import numpy as np

from .data import normalize_01
from .embed import classical_mds, pairwise_information_distance
from .exceptions import DiffusionError
from .graph import build_domain_similarity, build_joint_similarity
from .metrics import foscttm_from_distances, knn_vote
from .models import AlignmentResult, DiffusionOperator, DomainPair, JointSimilarity
from .schemas import KernelParams, MashConfig, MashDiagnostics, PseudoConnection, RandomSource

logger = logging.getLogger(__name__)

ROW_SUM_TOLERANCE = 1e-9


class TimeScale(NamedTuple):
    t: int
    vne_curve: List[float]


class DiffusionState(NamedTuple):
    """Everything one pass over W produces"""
    w: JointSimilarity
    operator: DiffusionOperator
    powered: np.ndarray
    distances: np.ndarray
    vne_curve: List[float]


# ====================================
# Diffusion operator
# ====================================
def row_normalize(w: JointSimilarity) -> DiffusionOperator:
    """
    P(i, j) = W(i, j) / sum_j W(i, j)

    Args:
        w: Joint similarity (diagonal = 1 keeps every row sum positive)

    Returns:
        DiffusionOperator with t unset
    """
    sums = w.w.sum(axis=1)
    if np.any(sums <= 0):
        raise DiffusionError("every row of W needs a positive sum")
    p = w.w / sums[:, None]
    return DiffusionOperator(p=p, t=None, source=w)


def von_neumann_entropy(p: DiffusionOperator, t_max: int) -> np.ndarray:
    """
    H(t) for t = 1..t_max from the spectrum of the symmetric conjugate
    D^{-1/2} W D^{-1/2}, which shares the eigenvalues of P

    Returns:
        Array of t_max entropies
    """
    w = p.source.w
    degree = w.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(degree)
    conjugate = inv_sqrt[:, None] * w * inv_sqrt[None, :]
    try:
        eigenvalues = np.linalg.eigvalsh(0.5 * (conjugate + conjugate.T))
    except np.linalg.LinAlgError as e:
        raise DiffusionError(f"eigendecomposition failed: {e}") from e

    eigenvalues = eigenvalues[eigenvalues > 0]
    eigenvalues = np.minimum(eigenvalues, 1.0)
    entropy = np.empty(t_max)
    for t in range(1, t_max + 1):
        powered = eigenvalues ** t
        eta = powered / powered.sum()
        eta = eta[eta > 0]
        entropy[t - 1] = -np.sum(eta * np.log(eta))
    return entropy


def knee_point(curve: np.ndarray, flat_tolerance: float = 1e-12) -> int:
    """1-based index of the largest discrete second difference; 1 for flat curves"""
    curve = np.asarray(curve, dtype=float)
    if len(curve) < 3:
        return 1
    second = curve[:-2] - 2.0 * curve[1:-1] + curve[2:]
    if np.all(np.abs(second) <= flat_tolerance):
        return 1
    # second[k] is centred on t = k + 2
    return int(np.argmax(second)) + 2


def select_t(p: DiffusionOperator, t_max: int = 100) -> TimeScale:
    """
    Pick the diffusion time at the knee of the Von Neumann entropy curve

    Args:
        p: Diffusion operator
        t_max: Largest time scale considered (>= 2)

    Returns:
        TimeScale(t, vne_curve)
    """
    if t_max < 2:
        raise DiffusionError("t_max must be at least 2")
    curve = von_neumann_entropy(p, t_max)
    t = knee_point(curve)
    logger.debug(f"VNE knee at t={t} (H(1)={curve[0]:.4f}, H({t_max})={curve[-1]:.4f})")
    if t == 2:
        # entropy curves with shrinking second differences always peak here
        logger.warning("VNE knee is at the smallest interior time t=2; set t_override to choose another scale")
    return TimeScale(t=t, vne_curve=[float(h) for h in curve])


def power_operator(p: DiffusionOperator) -> np.ndarray:
    """P^t by repeated multiplication, renormalizing rows after each step"""
    if p.t is None:
        raise DiffusionError("diffusion time t is not set")
    powered = np.array(p.p, copy=True)
    for _ in range(p.t - 1):
        powered = powered @ p.p
        powered /= powered.sum(axis=1, keepdims=True)
    return powered


def integrated_diffusion_distance(
    p: DiffusionOperator,
    info_distance: str,
    powered: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Information distance between all rows of P^t, 0-1 normalized over the matrix

    Args:
        p: Diffusion operator with t set
        info_distance: "potential", "hellinger" or "kl"
        powered: Precomputed P^t (computed here when omitted)

    Returns:
        (n, n) normalized distance matrix
    """
    powered = power_operator(p) if powered is None else powered
    return normalize_01(pairwise_information_distance(powered, info_distance), mode="matrix")


# ====================================
# Pseudo-connections
# ====================================
def add_pseudo_connections(
    w: JointSimilarity,
    d: np.ndarray,
    cfg: MashConfig,
    excluded: Set[Tuple[int, int]],
) -> Tuple[JointSimilarity, List[PseudoConnection]]:
    """
    Connect unlinked cross-domain pairs whose integrated diffusion distance is
    below eta: W_XY(i, j) = nu - D(i, j)

    At most cfg.max_new_per_iter pairs are added, smallest distance first with
    ties in lexicographic (i, j) order. Pairs with D >= nu are skipped so the
    new weight stays positive.

    Args:
        w: Current joint similarity
        d: Normalized integrated diffusion distance over all points
        cfg: MASH options
        excluded: (x, y) pairs barred from consideration

    Returns:
        (updated JointSimilarity, list of added connections)
    """
    n_x = w.n_x
    cross_d = np.asarray(d)[:n_x, n_x:]
    candidate = (cross_d < cfg.eta) & (cross_d < w.nu) & (w.w_xy == 0)
    for i, j in excluded:
        candidate[i, j] = False

    ii, jj = np.nonzero(candidate)
    if ii.size == 0:
        return w, []
    values = cross_d[ii, jj]
    order = np.lexsort((jj, ii, values))[: cfg.max_new_per_iter]

    updated = np.array(w.w, copy=True)
    added = []
    for idx in order:
        i, j = int(ii[idx]), int(jj[idx])
        weight = w.nu - float(values[idx])
        updated[i, n_x + j] = weight
        updated[n_x + j, i] = weight
        added.append(PseudoConnection(x=i, y=j, weight=weight))

    new_w = JointSimilarity(w=updated, n_x=w.n_x, n_y=w.n_y, nu=w.nu, gamma=w.gamma, anchors=w.anchors)
    return new_w, added


# ====================================
# Alignment
# ====================================
def _diffuse(w: JointSimilarity, cfg: MashConfig) -> DiffusionState:
    operator = row_normalize(w)
    if cfg.t_override is not None:
        t, curve = cfg.t_override, []
    else:
        t, curve = select_t(operator, cfg.t_max)
    operator = operator.model_copy(update={"t": t})
    powered = power_operator(operator)
    distances = integrated_diffusion_distance(operator, cfg.info_distance, powered=powered)
    return DiffusionState(w=w, operator=operator, powered=powered, distances=distances, vne_curve=curve)


def split_holdout(anchors: np.ndarray, fraction: float, seed: RandomSource) -> Tuple[np.ndarray, np.ndarray]:
    """Seeded shuffle of the anchors into (training, held-out)"""
    n_hold = int(math.floor(fraction * len(anchors) + 1e-9))
    order = seed.generator("holdout").permutation(len(anchors))
    held = np.sort(order[:n_hold])
    train = np.sort(order[n_hold:])
    return anchors[train], anchors[held]


def mash_align(
    pair: DomainPair,
    kparams: KernelParams,
    cfg: MashConfig,
    dim: int,
    seed: Optional[RandomSource] = None,
) -> AlignmentResult:
    """
    Full MASH pipeline with held-out-gated pseudo-connection refinement

    With cfg.max_iterations = 0 this is MASH-: one diffusion pass over W built
    from every anchor, no holdout.

    Args:
        pair: Domains and anchors
        kparams: Kernel parameters
        cfg: MASH options
        dim: Embedding dimension
        seed: Random source for the holdout split

    Returns:
        AlignmentResult with coupling block of P^t and MashDiagnostics
    """
    seed = seed or RandomSource()
    anchors = pair.anchors
    if len(anchors) == 0:
        raise DiffusionError("MASH needs at least one anchor")

    held = np.empty((0, 2), dtype=np.int64)
    train = anchors
    if cfg.max_iterations > 0:
        train, held = split_holdout(anchors, cfg.holdout_fraction, seed)
        if len(held) == 0:
            raise DiffusionError(
                f"holdout_fraction={cfg.holdout_fraction} of {len(anchors)} anchors holds out none; "
                "use more anchors or max_iterations=0"
            )
        if len(train) == 0:
            raise DiffusionError("no training anchors left after the holdout split")

    wx = build_domain_similarity(pair.x, kparams)
    wy = build_domain_similarity(pair.y, kparams)
    w = build_joint_similarity(pair.with_anchors(train), wx, wy, cfg.nu, cfg.gamma)

    best = _diffuse(w, cfg)
    n_x = pair.n_x
    diagnostics = MashDiagnostics(
        t_selected=best.operator.t,
        vne_curve=best.vne_curve,
        holdout_anchors=[(int(i), int(j)) for i, j in held],
    )

    if cfg.max_iterations > 0:
        best_score = foscttm_from_distances(best.distances[:n_x, n_x:], held)
        diagnostics.holdout_foscttm_trace.append(best_score)
        excluded: Set[Tuple[int, int]] = set()

        for iteration in range(1, cfg.max_iterations + 1):
            new_w, added = add_pseudo_connections(best.w, best.distances, cfg, excluded)
            if not added:
                logger.info(f"MASH: no candidate connections at iteration {iteration}, stopping")
                break

            candidate = _diffuse(new_w, cfg)
            score = foscttm_from_distances(candidate.distances[:n_x, n_x:], held)
            diagnostics.iterations_run = iteration
            diagnostics.connections_added.append(added)
            diagnostics.holdout_foscttm_trace.append(score)

            if score < best_score:
                best, best_score = candidate, score
                diagnostics.accepted.append(True)
                logger.info(
                    f"MASH iteration {iteration}: +{len(added)} connections accepted (holdout FOSCTTM {score:.4f})"
                )
            else:
                excluded.update((c.x, c.y) for c in added)
                diagnostics.accepted.append(False)
                diagnostics.reverted_iterations += 1
                logger.info(f"MASH iteration {iteration}: reverted (holdout FOSCTTM {score:.4f} >= {best_score:.4f})")

        diagnostics.t_selected = best.operator.t
        diagnostics.vne_curve = best.vne_curve

    embedding = classical_mds(best.distances, dim, domain_ranges=[(0, n_x), (n_x, pair.n_total)])
    flags = ["embedding_truncated"] if embedding.truncated else []
    method = "mash" if cfg.max_iterations > 0 else "mash_minus"
    logger.info(
        f"{method} aligned {pair.n_x}+{pair.n_y} points: t={best.operator.t}, "
        f"iterations={diagnostics.iterations_run}, reverted={diagnostics.reverted_iterations}"
    )
    return AlignmentResult(
        method=method,
        embedding=embedding,
        n_x=pair.n_x,
        n_y=pair.n_y,
        anchors=anchors,
        coupling=best.powered[:n_x, n_x:],
        diagnostics=diagnostics,
        flags=flags,
    )


# ====================================
# Label transfer
# ====================================
def transfer_labels(result: AlignmentResult, labels_x, k: int) -> np.ndarray:
    """
    Predict Y labels by k-NN vote among embedded X points

    Args:
        result: Alignment with an embedding
        labels_x: Labels of every X point
        k: Neighbor count (<= n_x)

    Returns:
        (n_y,) predicted label ids
    """
    labels_x = np.asarray(labels_x)
    if len(labels_x) != result.n_x:
        raise DiffusionError("labels_x must cover every embedded X point")
    if k > result.n_x:
        raise DiffusionError(f"k={k} exceeds the number of X points ({result.n_x})")
    return knn_vote(result.x_coords, labels_x, result.y_coords, k)


def transfer_labels_by_coupling(result: AlignmentResult, labels_x) -> np.ndarray:
    """
    Predict each Y label as the class receiving the most transition probability
    from X points in the coupling block (ties go to the lowest label id)

    Args:
        result: MASH alignment carrying a coupling block
        labels_x: Labels of every X point

    Returns:
        (n_y,) predicted label ids
    """
    if result.coupling is None:
        raise DiffusionError("alignment has no coupling block")
    labels_x = np.asarray(labels_x, dtype=np.int64)
    if len(labels_x) != result.n_x:
        raise DiffusionError("labels_x must cover every embedded X point")
    classes = np.unique(labels_x)
    onehot = (labels_x[:, None] == classes[None, :]).astype(float)
    mass = result.coupling.T @ onehot
    return classes[np.argmax(mass, axis=1)]
