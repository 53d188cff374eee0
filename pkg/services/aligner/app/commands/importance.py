"""
importance verb: rank features with the default k-NN permutation oracle and
write a ranking file usable as an importance override
"""
import argparse
import logging

import numpy as np
import pandas as pd

from . import load_config, prepare_output
from ..adaptations import knn_permutation_importance
from ..datasets import resolve_dataset
from ..exceptions import ConfigError
from ..schemas import ImportanceConfig, RandomSource

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        "importance", parents=parents, help="Write a feature ranking file (most important first)"
    )
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace) -> int:
    config = load_config(args.config, ImportanceConfig, {"seed": args.seed, "output_dir": args.out})
    args.resolved_output = config.output_dir

    data = resolve_dataset(config.dataset)
    if data.labels is None:
        raise ConfigError("feature importance needs a labeled dataset (set label_column)")
    names = data.feature_names or [f"f{i}" for i in range(data.n_features)]

    # same stream as the importance-based splits, so the ranking file reproduces them
    rng = RandomSource(seed=config.seed).generator("importance")
    scores = knn_permutation_importance(data.values, data.labels, rng, n_repeats=config.n_repeats)
    order = np.argsort(-scores, kind="stable")

    out_dir = prepare_output(config.output_dir)
    ranking = out_dir / "ranking.txt"
    ranking.write_text("".join(f"{names[i]}\n" for i in order), encoding="utf-8")
    pd.DataFrame({"feature": [names[i] for i in order], "importance": scores[order]}).to_csv(
        out_dir / "importance.csv", index=False, float_format="%.17g"
    )
    logger.info(f"Wrote feature ranking of {len(names)} features to {ranking}")
    return 0
