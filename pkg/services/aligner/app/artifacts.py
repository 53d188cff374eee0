"""
Artifact writers for CLI runs
All outputs are deterministic given the config and seeds
"""
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from .exceptions import AlignerError
from .models import AlignmentResult
from .schemas import BenchmarkRow, ErrorResponse

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
DOMAIN_NAMES = ("X", "Y")
SUMMARY_KEYS = ["dataset", "adaptation", "anchor_fraction", "method"]
SUMMARY_VALUES = ["foscttm", "ce_accuracy", "combined", "wall_time"]


def write_json(model: BaseModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(model.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def embedding_frame(result: AlignmentResult) -> pd.DataFrame:
    """id (row within its domain), domain (X/Y), c0..c{d-1}"""
    coords = result.embedding.coords
    frame = pd.DataFrame(coords, columns=[f"c{i}" for i in range(coords.shape[1])])
    frame.insert(0, "domain", [DOMAIN_NAMES[0]] * result.n_x + [DOMAIN_NAMES[1]] * result.n_y)
    frame.insert(0, "id", np.concatenate([np.arange(result.n_x), np.arange(result.n_y)]))
    return frame


def write_embedding(result: AlignmentResult, path: Union[str, Path]) -> Path:
    path = Path(path)
    embedding_frame(result).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def write_predictions(
    predicted: np.ndarray,
    path: Union[str, Path],
    truth: Optional[np.ndarray] = None,
    label_names: Optional[Sequence[str]] = None,
) -> Path:
    """One row per Y point: id, predicted (and true when known)"""
    path = Path(path)

    def named(ids):
        if label_names is None:
            return np.asarray(ids)
        return [label_names[int(i)] for i in ids]

    frame = pd.DataFrame({"id": np.arange(len(predicted)), "predicted": named(predicted)})
    if truth is not None:
        frame["true"] = named(truth)
    frame.to_csv(path, index=False)
    return path


def benchmark_frame(rows: Iterable[BenchmarkRow]) -> pd.DataFrame:
    columns = list(BenchmarkRow.model_fields)
    return pd.DataFrame([row.model_dump() for row in rows], columns=columns)


def summarize_benchmark(frame: pd.DataFrame) -> pd.DataFrame:
    """
    Mean of each score per dataset x adaptation x fraction x method over the
    successful cells, with cell counts
    """
    scores = frame[SUMMARY_KEYS].copy()
    ok = frame["status"] == "ok"
    for column in SUMMARY_VALUES:
        scores[column] = pd.to_numeric(frame[column], errors="coerce").where(ok)
    scores["n_ok"] = ok.astype(int)
    scores["n_error"] = (~ok).astype(int)
    grouped = scores.groupby(SUMMARY_KEYS, sort=True)
    summary = grouped[SUMMARY_VALUES].mean()
    summary[["n_ok", "n_error"]] = grouped[["n_ok", "n_error"]].sum()
    return summary.reset_index()


def write_benchmark(rows: List[BenchmarkRow], out_dir: Union[str, Path]) -> List[Path]:
    """benchmark.csv (one row per cell) and benchmark_summary.csv"""
    out_dir = Path(out_dir)
    frame = benchmark_frame(rows)
    cells = out_dir / "benchmark.csv"
    summary = out_dir / "benchmark_summary.csv"
    frame.to_csv(cells, index=False, float_format=FLOAT_FORMAT)
    summarize_benchmark(frame).to_csv(summary, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"Wrote {len(frame)} benchmark rows to {cells}")
    return [cells, summary]


def error_response(exc: BaseException) -> ErrorResponse:
    if isinstance(exc, AlignerError):
        return ErrorResponse(detail=exc.detail, code=exc.code, path=exc.path)
    return ErrorResponse(detail=str(exc) or type(exc).__name__, code=type(exc).__name__)


def write_error(exc: BaseException, out_dir: Union[str, Path]) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return write_json(error_response(exc), out_dir / "error.json")
