"""
Shared fixtures; puts the aligner service on sys.path so tests import `app`
"""
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "services" / "aligner"))

from app.models import DataMatrix, DomainPair  # noqa: E402
from app.schemas import KernelParams  # noqa: E402


def make_pair(x_values, y_values, anchors, true_pairs=None, labels=None) -> DomainPair:
    """DomainPair from raw arrays (labels shared by both domains when given)"""
    return DomainPair(
        x=DataMatrix(values=x_values, labels=labels),
        y=DataMatrix(values=y_values, labels=labels),
        anchors=np.asarray(anchors, dtype=np.int64).reshape(-1, 2),
        true_pairs=true_pairs,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def kparams():
    return KernelParams(k=3, alpha=2.0)


@pytest.fixture
def blobs(rng):
    """Two well separated labeled clusters in 4-D, 20 points each"""
    centers = np.array([[0.0, 0.0, 0.0, 0.0], [3.0, 3.0, 3.0, 3.0]])
    labels = np.repeat([0, 1], 20)
    values = centers[labels] + rng.normal(scale=0.3, size=(40, 4))
    return DataMatrix(values=values, labels=labels, feature_names=[f"f{i}" for i in range(4)])


@pytest.fixture
def rotated_pair(blobs, rng):
    """blobs against a rotated copy of itself, every fourth row anchored"""
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    rows = np.arange(0, blobs.n_obs, 4)
    identity = np.column_stack([np.arange(blobs.n_obs)] * 2)
    return DomainPair(
        x=blobs,
        y=blobs.with_values(blobs.values @ q),
        anchors=np.column_stack([rows, rows]),
        true_pairs=identity,
    )


@pytest.fixture
def pair_factory():
    return make_pair
