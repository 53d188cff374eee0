"""
Dataset resolution: a CSV path or one of the bundled scikit-learn tables
"""
import logging
from pathlib import Path

from sklearn import datasets as sk_datasets

from .data import load_csv, normalize_01
from .exceptions import DataError
from .models import DataMatrix
from .schemas import DatasetSpec

logger = logging.getLogger(__name__)

BUILTIN_LOADERS = {
    "iris": sk_datasets.load_iris,
    "wine": sk_datasets.load_wine,
    "breast_cancer": sk_datasets.load_breast_cancer,
}


def load_builtin(name: str) -> DataMatrix:
    """Load a bundled dataset with features scaled per column to [0, 1]"""
    loader = BUILTIN_LOADERS.get(name)
    if loader is None:
        raise DataError(f"Unknown bundled dataset: {name}")
    bunch = loader()
    logger.debug(f"Loaded bundled dataset {name}: {bunch.data.shape}")
    return DataMatrix(
        values=normalize_01(bunch.data, mode="column"),
        labels=bunch.target,
        feature_names=[str(f) for f in bunch.feature_names],
        label_names=[str(t) for t in bunch.target_names],
    )


def resolve_dataset(spec: DatasetSpec) -> DataMatrix:
    """Load the dataset a DatasetSpec points at (relative paths resolve against the working directory)"""
    if spec.builtin is not None:
        return load_builtin(spec.builtin)
    return load_csv(Path(spec.path), spec.label_column)
