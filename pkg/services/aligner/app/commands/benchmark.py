"""
benchmark verb: datasets x adaptations x anchor fractions x methods x seeds
Cells run in a process pool; each failure becomes an error row
"""
import argparse
import itertools
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import List, NamedTuple

from . import load_config, prepare_output
from ..adaptations import generate_pair
from ..artifacts import write_benchmark
from ..datasets import resolve_dataset
from ..metrics import evaluate
from ..models import DataMatrix
from ..pipeline import default_dim, run_method
from ..schemas import AdaptationSpec, BenchmarkConfig, BenchmarkRow, DatasetSpec

logger = logging.getLogger(__name__)


class BenchmarkCell(NamedTuple):
    dataset: DatasetSpec
    adaptation: str
    anchor_fraction: float
    method: str
    seed: int


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("benchmark", parents=parents, help="Run a benchmark grid and write benchmark.csv")
    parser.add_argument("--jobs", type=int, help="Worker processes")
    parser.set_defaults(handler=run)
    return parser


def expand_grid(config: BenchmarkConfig) -> List[BenchmarkCell]:
    """Cells in a fixed order: dataset, adaptation, fraction, method, seed"""
    return [
        BenchmarkCell(*cell)
        for cell in itertools.product(
            config.datasets, config.adaptations, config.anchor_fractions, config.methods, config.seeds
        )
    ]


@lru_cache(maxsize=16)
def _load(spec_json: str) -> DataMatrix:
    return resolve_dataset(DatasetSpec.model_validate_json(spec_json))


def run_cell(cell: BenchmarkCell, config: BenchmarkConfig) -> BenchmarkRow:
    """Align and score one cell; never raises"""
    row = dict(
        dataset=cell.dataset.display_name,
        adaptation=cell.adaptation,
        anchor_fraction=cell.anchor_fraction,
        method=cell.method,
        seed=cell.seed,
    )
    start = time.perf_counter()
    try:
        data = _load(cell.dataset.model_dump_json())
        spec = AdaptationSpec(
            kind=cell.adaptation,
            anchor_fraction=cell.anchor_fraction,
            seed=cell.seed,
            noise_scale=config.noise_scale,
        )
        pair = generate_pair(data, spec)
        result = run_method(
            pair,
            cell.method,
            default_dim(pair),
            kernel=config.kernel,
            geodesic=config.geodesic,
            mash=config.mash,
            seed=cell.seed,
        )
        report = evaluate(result, pair, config.ce_k)
    except Exception as e:
        logger.error(f"Benchmark cell {row} failed: {e}", exc_info=True)
        return BenchmarkRow(**row, wall_time=time.perf_counter() - start, status="error", error=str(e))

    return BenchmarkRow(
        **row,
        foscttm=report.foscttm,
        ce_accuracy=report.ce_accuracy,
        combined=report.combined,
        wall_time=time.perf_counter() - start,
    )


def run_benchmark(config: BenchmarkConfig) -> List[BenchmarkRow]:
    cells = expand_grid(config)
    logger.info(f"Benchmark: {len(cells)} cells on {config.jobs} worker(s)")
    if config.jobs == 1:
        return [run_cell(cell, config) for cell in cells]
    with ProcessPoolExecutor(max_workers=config.jobs) as pool:
        return list(pool.map(run_cell, cells, itertools.repeat(config)))


def run(args: argparse.Namespace) -> int:
    overrides = {"jobs": args.jobs, "output_dir": args.out}
    if args.seed is not None:
        overrides["seeds"] = [args.seed]
    config = load_config(args.config, BenchmarkConfig, overrides)
    args.resolved_output = config.output_dir

    rows = run_benchmark(config)
    write_benchmark(rows, prepare_output(config.output_dir))
    failed = sum(row.status == "error" for row in rows)
    if failed:
        logger.warning(f"{failed} of {len(rows)} benchmark cells failed")
    return 0
