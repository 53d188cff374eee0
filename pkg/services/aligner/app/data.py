"""
Dataset ingestion and normalization
Loads headed CSV files into DataMatrix objects with 0-1 scaled features
"""
import logging
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
import pandas as pd

from .exceptions import DataError
from .models import DataMatrix

logger = logging.getLogger(__name__)


def normalize_01(values: np.ndarray, mode: Literal["column", "matrix"] = "column") -> np.ndarray:
    """
    Min-max scale to [0, 1]

    Args:
        values: Finite real matrix
        mode: "column" scales each feature separately, "matrix" scales the whole
            matrix with one range (used for distance matrices)

    Returns:
        New matrix; a zero range maps to all zeros
    """
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise DataError("normalize_01 requires finite input")
    if values.size == 0:
        return values.copy()

    if mode == "column":
        low = values.min(axis=0)
        span = values.max(axis=0) - low
    elif mode == "matrix":
        low = values.min()
        span = values.max() - low
    else:
        raise DataError(f"Unknown normalization mode: {mode}")

    safe_span = np.where(span > 0, span, 1.0)
    scaled = (values - low) / safe_span
    return np.where(span > 0, scaled, 0.0)


def load_csv(path: Union[str, Path], label_column: Optional[str] = None) -> DataMatrix:
    """
    Load a headed, comma-delimited CSV file

    Rows with any missing cell are dropped, non-label columns are parsed as reals
    and scaled per column to [0, 1]. Labels become dense integer ids ordered by
    their sorted original values; the originals are kept in label_names.

    Args:
        path: CSV file path
        label_column: Optional name of the class-label column

    Returns:
        DataMatrix
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, encoding="utf-8", dtype=str, keep_default_na=False, na_values=[""])
    except FileNotFoundError as e:
        raise DataError(f"Dataset not found: {path}", path=str(path)) from e
    except (OSError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise DataError(f"Could not read {path}: {e}", path=str(path)) from e

    if label_column is not None and label_column not in frame.columns:
        raise DataError(f"Label column '{label_column}' not in header of {path}", path=str(path))

    before = len(frame)
    frame = frame.dropna(axis=0, how="any").reset_index(drop=True)
    if len(frame) < before:
        logger.info(f"Dropped {before - len(frame)} rows with missing values from {path.name}")
    if frame.empty:
        raise DataError(f"No complete rows left in {path}", path=str(path))

    feature_columns = [c for c in frame.columns if c != label_column]
    try:
        # astype rounds correctly; pd.to_numeric can be off by one ulp
        features = frame[feature_columns].astype(float)
    except ValueError as e:
        raise DataError(f"Non-numeric feature cell in {path}: {e}", path=str(path)) from e

    labels = None
    label_names = None
    if label_column is not None:
        codes, uniques = pd.factorize(frame[label_column], sort=True)
        labels = codes
        label_names = [str(u) for u in uniques]

    values = features.to_numpy(dtype=float)
    if not np.all(np.isfinite(values)):
        raise DataError(f"Non-finite feature value in {path}", path=str(path))

    logger.debug(f"Loaded {path.name}: {values.shape[0]} rows x {values.shape[1]} features")
    return DataMatrix(
        values=normalize_01(values, mode="column"),
        labels=labels,
        feature_names=[str(c) for c in feature_columns],
        label_names=label_names,
    )


def write_csv(data: DataMatrix, path: Union[str, Path], label_column: str = "label") -> Path:
    """
    Write a DataMatrix back to CSV (features, then the label column if present)

    Args:
        data: Matrix to write
        path: Destination
        label_column: Header used for the label column

    Returns:
        The written path
    """
    path = Path(path)
    names = data.feature_names or [f"f{i}" for i in range(data.n_features)]
    frame = pd.DataFrame(data.values, columns=names)
    if data.labels is not None:
        if data.label_names is not None:
            frame[label_column] = [data.label_names[i] for i in data.labels]
        else:
            frame[label_column] = data.labels
    frame.to_csv(path, index=False, float_format="%.17g")
    return path
