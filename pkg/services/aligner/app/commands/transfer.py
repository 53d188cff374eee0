"""
transfer verb: align important features on a row subset with the remaining
features on every row, then predict labels across the larger domain
"""
import argparse
import logging

import numpy as np

from . import load_config, prepare_output
from ..adaptations import split_for_transfer
from ..artifacts import write_embedding, write_json, write_predictions
from ..datasets import resolve_dataset
from ..exceptions import ConfigError
from ..mash import mash_align, transfer_labels, transfer_labels_by_coupling
from ..plotting import plot_alignment
from ..schemas import AdaptationSpec, RandomSource, TransferConfig, TransferReport

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        "transfer", parents=parents, help="Transfer labels from a small domain to a large one"
    )
    parser.add_argument("--dim", type=int, help="Embedding dimension (default: n_important)")
    parser.set_defaults(handler=run)
    return parser


def run_transfer(config: TransferConfig):
    """
    Returns:
        (pair, result, predicted labels, TransferReport)
    """
    data = resolve_dataset(config.dataset)
    if data.labels is None:
        raise ConfigError("label transfer needs a labeled dataset (set label_column)")

    spec = AdaptationSpec(kind="skewed", seed=config.seed, importance_file=config.importance_file)
    pair = split_for_transfer(data, spec, config.n_important, config.row_fraction)
    dim = config.dim or min(config.n_important, pair.n_total - 1)
    result = mash_align(pair, config.kernel, config.mash, dim, seed=RandomSource(seed=config.seed))

    k = min(config.k, pair.n_x)
    predicted = transfer_labels(result, pair.x.labels, k)
    by_coupling = transfer_labels_by_coupling(result, pair.x.labels)
    truth = pair.y.labels
    report = TransferReport(
        n_predicted=len(predicted),
        accuracy=float(np.mean(predicted == truth)),
        coupling_accuracy=float(np.mean(by_coupling == truth)),
        k=k,
        dim=result.embedding.dim,
        seed=config.seed,
        n_anchors=len(pair.anchors),
    )
    logger.info(f"Label transfer: accuracy={report.accuracy:.4f} (coupling {report.coupling_accuracy:.4f})")
    return pair, result, predicted, report


def run(args: argparse.Namespace) -> int:
    overrides = {"dim": args.dim, "seed": args.seed, "output_dir": args.out}
    config = load_config(args.config, TransferConfig, overrides)
    args.resolved_output = config.output_dir

    pair, result, predicted, report = run_transfer(config)
    out_dir = prepare_output(config.output_dir)
    write_predictions(predicted, out_dir / "predictions.csv", truth=pair.y.labels, label_names=pair.y.label_names)
    write_json(report, out_dir / "accuracy.json")
    write_embedding(result, out_dir / "embedding.csv")
    write_json(result.diagnostics, out_dir / "diagnostics.json")
    plot_alignment(result, out_dir / "scatter.svg", labels_x=pair.x.labels, labels_y=pair.y.labels)
    return 0
