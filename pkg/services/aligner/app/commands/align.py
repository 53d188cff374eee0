"""
align verb: one method on one domain pair, repeated over seeds
"""
import argparse
import logging
from pathlib import Path
from typing import List, Tuple

from . import load_config, parse_anchor_flag, prepare_output
from ..artifacts import write_embedding, write_json
from ..config import settings
from ..exceptions import ConfigError
from ..graph import build_domain_similarity, build_joint_similarity, export_coo
from ..pipeline import RunOutcome, run_once
from ..plotting import plot_alignment
from ..schemas import GeodesicConfig, MashConfig, RunConfig

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("align", parents=parents, help="Align one domain pair and write artifacts")
    parser.add_argument("--method", choices=["spud", "mash", "mash_minus", "nama", "jlma", "mapa"])
    parser.add_argument("--anchors", help="Anchor fraction in (0, 1] or a CSV of (x, y) index pairs")
    parser.add_argument("--dim", type=int, help="Embedding dimension")
    parser.set_defaults(handler=run)
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    overrides = {"method": args.method, "dim": args.dim, "output_dir": args.out}
    if args.seed is not None:
        overrides["seeds"] = [args.seed]
    return overrides


def _apply_anchor_flag(config: RunConfig, value) -> RunConfig:
    fraction, anchors_file = parse_anchor_flag(value)
    if fraction is not None:
        if config.adaptation is None:
            raise ConfigError("an anchor fraction applies only to single-dataset runs")
        adaptation = config.adaptation.model_copy(update={"anchor_fraction": fraction})
        return RunConfig.model_validate({**config.model_dump(), "adaptation": adaptation.model_dump()})
    if anchors_file is not None:
        if config.paired is None:
            raise ConfigError("an anchor file applies only to paired-input runs", path=anchors_file)
        paired = config.paired.model_copy(update={"anchors_file": anchors_file})
        return config.model_copy(update={"paired": paired})
    return config


def graph_weights(config: RunConfig) -> Tuple[float, float]:
    """(nu, gamma) of the joint graph the configured method builds"""
    if config.method in ("spud", "nama"):
        return (config.geodesic or GeodesicConfig()).nu, settings.extension_gamma
    mash = config.mash or MashConfig()
    return mash.nu, mash.gamma


def write_outcome(outcome: RunOutcome, config: RunConfig, out_dir: Path) -> List[Path]:
    """embedding.csv, metrics.json, scatter.svg, diagnostics.json (MASH) and graph.csv (on request)"""
    out_dir = prepare_output(out_dir)
    result, pair = outcome.result, outcome.pair
    written = [
        write_embedding(result, out_dir / "embedding.csv"),
        write_json(outcome.report, out_dir / "metrics.json"),
        plot_alignment(
            result,
            out_dir / "scatter.svg",
            labels_x=pair.x.labels,
            labels_y=pair.y.labels,
            title=f"{result.method} (seed {outcome.seed})",
        ),
    ]
    if result.diagnostics is not None:
        written.append(write_json(result.diagnostics, out_dir / "diagnostics.json"))
    if config.export_graph:
        nu, gamma = graph_weights(config)
        wx = build_domain_similarity(pair.x, config.kernel)
        wy = build_domain_similarity(pair.y, config.kernel)
        written.append(export_coo(build_joint_similarity(pair, wx, wy, nu, gamma), out_dir / "graph.csv"))
    return written


def run(args: argparse.Namespace) -> int:
    config = load_config(args.config, RunConfig, _overrides(args))
    config = _apply_anchor_flag(config, args.anchors)
    args.resolved_output = config.output_dir

    seeds = config.run_seeds()
    root = Path(config.output_dir)
    for seed in seeds:
        outcome = run_once(config, seed)
        out_dir = root if len(seeds) == 1 else root / f"seed_{seed}"
        written = write_outcome(outcome, config, out_dir)
        logger.info(f"Seed {seed}: wrote {', '.join(p.name for p in written)} to {out_dir}")
    return 0
