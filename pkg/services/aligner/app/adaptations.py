"""
Domain adaptations: turn one dataset into a co-domain pair
Feature-level splits (random, skewed, even), distortions (Gaussian noise,
random rotation), anchor sampling and the label-transfer row-subset recipe
"""
import logging
import math
from pathlib import Path
from typing import Callable, Literal, Optional, Union

import numpy as np
from scipy import linalg
from sklearn.inspection import permutation_importance
from sklearn.neighbors import KNeighborsClassifier

from .config import settings
from .exceptions import AdaptationError
from .models import DataMatrix, DomainPair
from .schemas import AdaptationSpec, ImportanceOracle, RandomSource

logger = logging.getLogger(__name__)


# ====================================
# Anchors
# ====================================
def anchor_count(fraction: float, n: int) -> int:
    """ceil(fraction * n), guarded against float round-up (0.05 * 200 -> 10)"""
    if not 0 < fraction <= 1:
        raise AdaptationError(f"anchor fraction must lie in (0, 1], got {fraction}")
    return max(1, int(math.ceil(fraction * n - 1e-9)))


def sample_anchors(pair: DomainPair, fraction: float, seed: RandomSource) -> DomainPair:
    """
    Sample ceil(fraction * n) shared rows without replacement as anchors

    Args:
        pair: Pair whose domains share row identity
        fraction: Anchor fraction in (0, 1]
        seed: Random source

    Returns:
        The pair with anchors (i, i), sorted by row
    """
    if pair.n_x != pair.n_y:
        raise AdaptationError("anchor sampling needs domains with shared row identity")
    n = pair.n_x
    m = anchor_count(fraction, n)
    rows = np.sort(seed.generator("anchors").choice(n, size=m, replace=False))
    return pair.with_anchors(np.column_stack([rows, rows]))


def _identity_pair(x: DataMatrix, y: DataMatrix, spec: AdaptationSpec) -> DomainPair:
    n = x.n_obs
    identity = np.column_stack([np.arange(n), np.arange(n)])
    pair = DomainPair(x=x, y=y, anchors=np.empty((0, 2), dtype=np.int64), true_pairs=identity)
    return sample_anchors(pair, spec.anchor_fraction, spec.seed)


# ====================================
# Feature importance
# ====================================
def knn_permutation_importance(
    values: np.ndarray,
    labels: np.ndarray,
    rng: np.random.Generator,
    n_repeats: Optional[int] = None,
) -> np.ndarray:
    """
    Default importance oracle: mean accuracy drop of a k-NN classifier when one
    feature is shuffled

    Returns:
        One score per feature (higher = more important)
    """
    n_repeats = settings.importance_repeats if n_repeats is None else n_repeats
    k = max(1, min(settings.kernel_k, len(values) - 1))
    model = KNeighborsClassifier(n_neighbors=k).fit(values, labels)
    result = permutation_importance(
        model,
        values,
        labels,
        n_repeats=n_repeats,
        random_state=int(rng.integers(0, 2**31 - 1)),
    )
    return result.importances_mean


def ranking_oracle_from_file(path: Union[str, Path], feature_names) -> ImportanceOracle:
    """
    Oracle reading a ranking file: one feature name per line, most important first

    Features missing from the file rank after the listed ones, in column order.
    """
    path = Path(path)
    try:
        ranked = [line.strip() for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    except OSError as e:
        raise AdaptationError(f"Could not read importance ranking {path}: {e}", path=str(path)) from e
    names = list(feature_names)
    unknown = [name for name in ranked if name not in names]
    if unknown:
        raise AdaptationError(f"Unknown features in {path}: {unknown}", path=str(path))

    scores = np.zeros(len(names))
    for position, name in enumerate(ranked):
        scores[names.index(name)] = len(ranked) - position

    def oracle(values, labels, rng):
        return scores.copy()

    return oracle


def feature_ranking(data: DataMatrix, spec: AdaptationSpec) -> np.ndarray:
    """Feature indices, most important first (stable on equal scores)"""
    if data.labels is None:
        raise AdaptationError("importance-based splits need labels")
    oracle: Optional[Callable] = spec.importance_oracle
    if oracle is None and spec.importance_file is not None:
        names = data.feature_names or [f"f{i}" for i in range(data.n_features)]
        oracle = ranking_oracle_from_file(spec.importance_file, names)
    if oracle is None:
        oracle = knn_permutation_importance
    scores = np.asarray(oracle(data.values, data.labels, spec.seed.generator("importance")), dtype=float)
    if scores.shape != (data.n_features,):
        raise AdaptationError("importance oracle must return one score per feature")
    return np.argsort(-scores, kind="stable")


# ====================================
# Feature-level splits
# ====================================
def _split_pair(data: DataMatrix, fx: np.ndarray, fy: np.ndarray, spec: AdaptationSpec) -> DomainPair:
    fx, fy = np.sort(fx), np.sort(fy)
    logger.debug(f"{spec.kind} split: X features {fx.tolist()}, Y features {fy.tolist()}")
    return _identity_pair(data.subset_features(fx), data.subset_features(fy), spec)


def split_random(data: DataMatrix, spec: AdaptationSpec) -> DomainPair:
    """
    Random disjoint feature halves (X gets ceil(p/2))

    Args:
        data: Source dataset
        spec: Adaptation options

    Returns:
        DomainPair with identity ground truth and sampled anchors
    """
    p = data.n_features
    if p < 2:
        raise AdaptationError("feature splits need at least two features")
    order = spec.seed.generator("split").permutation(p)
    half = math.ceil(p / 2)
    return _split_pair(data, order[:half], order[half:], spec)


def split_by_importance(
    data: DataMatrix,
    spec: AdaptationSpec,
    mode: Literal["skewed", "even"],
) -> DomainPair:
    """
    Importance-driven feature split

    skewed: the top ceil(p/2) features form X, the rest Y.
    even: the h = ceil(p/2) important features are shuffled and dealt
    ceil(h/2) to X and the rest to Y; the remaining features are shuffled and
    dealt so that X ends up with ceil(p/2) features.

    Args:
        data: Labeled source dataset
        spec: Adaptation options (importance oracle / file)
        mode: "skewed" or "even"

    Returns:
        DomainPair
    """
    p = data.n_features
    if p < 2:
        raise AdaptationError("feature splits need at least two features")
    ranking = feature_ranking(data, spec)
    half = math.ceil(p / 2)

    if mode == "skewed":
        return _split_pair(data, ranking[:half], ranking[half:], spec)
    if mode != "even":
        raise AdaptationError(f"Unknown importance split mode: {mode}")

    rng = spec.seed.generator("split")
    important = rng.permutation(ranking[:half])
    rest = rng.permutation(ranking[half:])
    take_important = math.ceil(len(important) / 2)
    take_rest = half - take_important
    fx = np.concatenate([important[:take_important], rest[:take_rest]])
    fy = np.concatenate([important[take_important:], rest[take_rest:]])
    if len(fy) == 0:
        raise AdaptationError("even split left domain Y without features")
    return _split_pair(data, fx, fy, spec)


# ====================================
# Distortions
# ====================================
def distort_gaussian(data: DataMatrix, spec: AdaptationSpec) -> DomainPair:
    """Y = X + N(0, noise_scale^2) per cell"""
    noise = spec.seed.generator("noise").normal(0.0, 1.0, size=data.values.shape) * spec.noise_scale
    return _identity_pair(data, data.with_values(data.values + noise), spec)


def random_rotation(p: int, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal factor of a Gaussian p x p matrix, sign-fixed to det = +1"""
    q, r = linalg.qr(rng.standard_normal((p, p)))
    q = q * np.where(np.diag(r) < 0, -1.0, 1.0)[None, :]
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def distort_rotation(data: DataMatrix, spec: AdaptationSpec) -> DomainPair:
    """Y = X Q for a seeded proper rotation Q"""
    p = data.n_features
    if p < 2:
        raise AdaptationError("rotation needs at least two features")
    q = random_rotation(p, spec.seed.generator("rotation"))
    return _identity_pair(data, data.with_values(data.values @ q), spec)


def generate_pair(data: DataMatrix, spec: AdaptationSpec) -> DomainPair:
    """Dispatch on spec.kind"""
    if not spec.standard_fraction:
        logger.debug(f"Anchor fraction {spec.anchor_fraction} is not one of the standard benchmark levels")
    if spec.kind == "random":
        return split_random(data, spec)
    if spec.kind in ("skewed", "even"):
        return split_by_importance(data, spec, spec.kind)
    if spec.kind == "distort":
        return distort_gaussian(data, spec)
    if spec.kind == "rotation":
        return distort_rotation(data, spec)
    raise AdaptationError(f"Unknown adaptation: {spec.kind}")


# ====================================
# Label-transfer recipe
# ====================================
def split_for_transfer(
    data: DataMatrix,
    spec: AdaptationSpec,
    n_important: int,
    row_fraction: float,
) -> DomainPair:
    """
    Domain A = the n_important top features on a seeded row subset; domain B =
    the remaining features on every row. Every A row is anchored to its B row.

    Args:
        data: Labeled source dataset
        spec: Carries the seed and importance oracle / file
        n_important: Feature count of domain A
        row_fraction: Fraction of rows kept in domain A

    Returns:
        DomainPair with n_x = ceil(row_fraction * n), n_y = n
    """
    p, n = data.n_features, data.n_obs
    if not 1 <= n_important < p:
        raise AdaptationError(f"n_important must lie in [1, {p - 1}]")
    ranking = feature_ranking(data, spec)
    fa, fb = np.sort(ranking[:n_important]), np.sort(ranking[n_important:])

    m = anchor_count(row_fraction, n)
    rows = np.sort(spec.seed.generator("rows").choice(n, size=m, replace=False))
    domain_a = data.subset_features(fa).subset_rows(rows)
    domain_b = data.subset_features(fb)
    pairs = np.column_stack([np.arange(m), rows])
    logger.info(f"Transfer split: A has {m} rows x {len(fa)} features, B has {n} rows x {len(fb)} features")
    return DomainPair(x=domain_a, y=domain_b, anchors=pairs, true_pairs=pairs)
