"""
Run assembly shared by the CLI verbs
dataset -> domain pair -> alignment method -> metrics
"""
import logging
from pathlib import Path
from typing import NamedTuple, Optional, Union

import numpy as np
import pandas as pd

from .adaptations import generate_pair
from .baselines import jlma_align, mapa_align
from .datasets import resolve_dataset
from .exceptions import ConfigError, DataError
from .mash import mash_align
from .metrics import evaluate
from .models import AlignmentResult, DomainPair
from .schemas import (
    BaselineConfig,
    GeodesicConfig,
    KernelParams,
    MashConfig,
    MetricsReport,
    RandomSource,
    RunConfig,
)
from .spud import spud_align

logger = logging.getLogger(__name__)


class RunOutcome(NamedTuple):
    pair: DomainPair
    result: AlignmentResult
    report: MetricsReport
    seed: int


def load_anchor_file(path: Union[str, Path]) -> np.ndarray:
    """
    Read a CSV of (x index, y index) pairs; an optional non-numeric header row is skipped

    Returns:
        (m, 2) int array
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, header=None, dtype=str, skipinitialspace=True)
    except FileNotFoundError as e:
        raise DataError(f"Anchor file not found: {path}", path=str(path)) from e
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"Could not read anchor file {path}: {e}", path=str(path)) from e

    if frame.shape[1] != 2:
        raise DataError(f"Anchor file {path} must have exactly two columns", path=str(path))
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    if len(numeric) and numeric.iloc[0].isna().any():
        numeric = numeric.iloc[1:]
    if numeric.isna().any().any():
        raise DataError(f"Anchor file {path} has non-integer entries", path=str(path))
    return numeric.to_numpy(dtype=np.int64).reshape(-1, 2)


def build_pair(config: RunConfig, seed: int) -> DomainPair:
    """
    Materialize the DomainPair of a run

    A single dataset goes through its adaptation with the run seed. Explicit
    two-dataset input reads the anchor file; when both files have the same row
    count, rows are taken to correspond one-to-one for evaluation.
    """
    if config.dataset is not None:
        data = resolve_dataset(config.dataset)
        spec = config.adaptation.model_copy(update={"seed": RandomSource(seed=seed)})
        return generate_pair(data, spec)

    x = resolve_dataset(config.paired.x)
    y = resolve_dataset(config.paired.y)
    anchors = load_anchor_file(config.paired.anchors_file)
    true_pairs = None
    if x.n_obs == y.n_obs:
        true_pairs = np.column_stack([np.arange(x.n_obs), np.arange(x.n_obs)])
    try:
        return DomainPair(x=x, y=y, anchors=anchors, true_pairs=true_pairs)
    except ValueError as e:
        raise DataError(f"Invalid anchors in {config.paired.anchors_file}: {e}", path=config.paired.anchors_file) from e


def default_dim(pair: DomainPair) -> int:
    """Feature count of the smaller split, capped at total points - 1"""
    return max(1, min(pair.x.n_features, pair.y.n_features, pair.n_total - 1))


def run_method(
    pair: DomainPair,
    method: str,
    dim: int,
    kernel: Optional[KernelParams] = None,
    geodesic: Optional[GeodesicConfig] = None,
    mash: Optional[MashConfig] = None,
    seed: int = 0,
) -> AlignmentResult:
    """
    Dispatch one alignment method

    Args:
        pair: Domains and anchors
        method: spud, nama, mash, mash_minus, jlma or mapa
        dim: Embedding dimension
        kernel: Kernel parameters (settings defaults when omitted)
        geodesic: SPUD options
        mash: MASH options
        seed: Seed for the MASH holdout split

    Returns:
        AlignmentResult
    """
    kernel = kernel or KernelParams()
    if method in ("spud", "nama"):
        geodesic = geodesic or GeodesicConfig()
        if method == "nama":
            geodesic = geodesic.model_copy(update={"mode": "dense_nama"})
        elif geodesic.mode == "dense_nama":
            raise ConfigError("method 'spud' cannot use geodesic mode 'dense_nama'; use method 'nama'")
        return spud_align(pair, kernel, geodesic, dim)
    if method in ("mash", "mash_minus"):
        mash = mash or MashConfig()
        if method == "mash_minus":
            mash = mash.model_copy(update={"max_iterations": 0})
        return mash_align(pair, kernel, mash, dim, seed=RandomSource(seed=seed))
    if method in ("jlma", "mapa"):
        cfg = BaselineConfig(method=method, dim=dim, kparams=kernel)
        return jlma_align(pair, cfg) if method == "jlma" else mapa_align(pair, cfg)
    raise ConfigError(f"Unknown method: {method}")


def run_once(config: RunConfig, seed: int) -> RunOutcome:
    """Build the pair, align and evaluate for one seed"""
    pair = build_pair(config, seed)
    dim = config.dim or default_dim(pair)
    logger.info(
        f"Run seed={seed}: method={config.method}, {pair.n_x}+{pair.n_y} points, "
        f"{len(pair.anchors)} anchors, dim={dim}"
    )
    result = run_method(
        pair,
        config.method,
        dim,
        kernel=config.kernel,
        geodesic=config.geodesic,
        mash=config.mash,
        seed=seed,
    )
    report = evaluate(result, pair, config.ce_k)
    return RunOutcome(pair=pair, result=result, report=report, seed=seed)
