"""
Array-carrying domain models
Immutable after construction: every array is copied and marked read-only
"""
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy import sparse

from .schemas import KernelParams, MashDiagnostics


def _frozen(array, dtype=float) -> np.ndarray:
    """Copy into a read-only array of the given dtype"""
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def _pairs(array) -> np.ndarray:
    out = np.asarray(array, dtype=np.int64)
    if out.size == 0:
        out = out.reshape(0, 2)
    if out.ndim != 2 or out.shape[1] != 2:
        raise ValueError("index pairs must have shape (m, 2)")
    return _frozen(out, dtype=np.int64)


class _ArrayModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


# ====================================
# Data
# ====================================
class DataMatrix(_ArrayModel):
    """Observations x features with optional dense-id labels"""
    values: np.ndarray
    labels: Optional[np.ndarray] = None
    feature_names: Optional[List[str]] = None
    label_names: Optional[List[str]] = None

    @field_validator("values", mode="before")
    @classmethod
    def _check_values(cls, value):
        out = np.asarray(value, dtype=float)
        if out.ndim != 2:
            raise ValueError("values must be a 2-D matrix")
        return _frozen(out)

    @field_validator("labels", mode="before")
    @classmethod
    def _check_labels(cls, value):
        if value is None:
            return None
        return _frozen(np.asarray(value).ravel(), dtype=np.int64)

    @model_validator(mode="after")
    def _check_shapes(self):
        if self.labels is not None and len(self.labels) != self.n_obs:
            raise ValueError("labels must have one entry per observation")
        if self.feature_names is not None and len(self.feature_names) != self.n_features:
            raise ValueError("feature_names must have one entry per feature")
        return self

    @property
    def n_obs(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def subset_features(self, columns) -> "DataMatrix":
        """Keep the given feature columns, in the given order"""
        columns = np.asarray(columns, dtype=np.int64)
        names = None
        if self.feature_names is not None:
            names = [self.feature_names[c] for c in columns]
        return DataMatrix(
            values=self.values[:, columns],
            labels=self.labels,
            feature_names=names,
            label_names=self.label_names,
        )

    def subset_rows(self, rows) -> "DataMatrix":
        """Keep the given observations, in the given order"""
        rows = np.asarray(rows, dtype=np.int64)
        return DataMatrix(
            values=self.values[rows],
            labels=None if self.labels is None else self.labels[rows],
            feature_names=self.feature_names,
            label_names=self.label_names,
        )

    def with_values(self, values: np.ndarray) -> "DataMatrix":
        """Same labels and names, new values of identical shape"""
        return DataMatrix(
            values=values,
            labels=self.labels,
            feature_names=self.feature_names,
            label_names=self.label_names,
        )


class DomainPair(_ArrayModel):
    """Two domains plus known (anchors) and evaluation (true_pairs) correspondences"""
    x: DataMatrix
    y: DataMatrix
    anchors: np.ndarray
    true_pairs: Optional[np.ndarray] = None

    @field_validator("anchors", "true_pairs", mode="before")
    @classmethod
    def _check_pairs(cls, value):
        if value is None:
            return None
        return _pairs(value)

    @model_validator(mode="after")
    def _check_anchors(self):
        for name in ("anchors", "true_pairs"):
            pairs = getattr(self, name)
            if pairs is None:
                continue
            if len(pairs) > min(self.n_x, self.n_y):
                raise ValueError(f"{name}: more pairs than points in the smaller domain")
            if len(pairs) and (
                pairs[:, 0].min() < 0 or pairs[:, 0].max() >= self.n_x
                or pairs[:, 1].min() < 0 or pairs[:, 1].max() >= self.n_y
            ):
                raise ValueError(f"{name}: index out of range")
            if len(np.unique(pairs[:, 0])) != len(pairs) or len(np.unique(pairs[:, 1])) != len(pairs):
                raise ValueError(f"{name}: each index may appear at most once per side")
        return self

    @property
    def n_x(self) -> int:
        return self.x.n_obs

    @property
    def n_y(self) -> int:
        return self.y.n_obs

    @property
    def n_total(self) -> int:
        return self.n_x + self.n_y

    def with_anchors(self, anchors) -> "DomainPair":
        return DomainPair(x=self.x, y=self.y, anchors=anchors, true_pairs=self.true_pairs)

    def evaluation_pairs(self) -> np.ndarray:
        """Pairs used for FOSCTTM: ground truth when known, else the anchors"""
        return self.true_pairs if self.true_pairs is not None else self.anchors


# ====================================
# Graphs
# ====================================
class DomainSimilarity(_ArrayModel):
    """Symmetric k-NN alpha-decaying kernel matrix of one domain"""
    weights: sparse.csr_matrix
    neighbors: np.ndarray
    params: KernelParams

    @property
    def n(self) -> int:
        return self.weights.shape[0]


class JointSimilarity(_ArrayModel):
    """Block matrix W = [[W_X, W_XY], [W_YX, W_Y]]"""
    w: np.ndarray
    n_x: int
    n_y: int
    nu: float
    gamma: float
    anchors: np.ndarray

    @field_validator("w", mode="before")
    @classmethod
    def _freeze_w(cls, value):
        return _frozen(value)

    @field_validator("anchors", mode="before")
    @classmethod
    def _freeze_anchors(cls, value):
        return _pairs(value)

    @property
    def n_total(self) -> int:
        return self.n_x + self.n_y

    @property
    def w_xy(self) -> np.ndarray:
        return self.w[: self.n_x, self.n_x:]


class DiffusionOperator(_ArrayModel):
    """Row-stochastic P derived from a JointSimilarity, with its time scale"""
    p: np.ndarray
    t: Optional[int] = None
    source: JointSimilarity

    @field_validator("p", mode="before")
    @classmethod
    def _freeze_p(cls, value):
        return _frozen(value)


# ====================================
# Geodesics & Embeddings
# ====================================
class Geodesics(_ArrayModel):
    """All-pairs shortest-path distances; unreachable pairs hold inf"""
    dists: np.ndarray

    @field_validator("dists", mode="before")
    @classmethod
    def _freeze(cls, value):
        return _frozen(value)

    @property
    def reachable(self) -> np.ndarray:
        return np.isfinite(self.dists)


class CrossGeodesic(_ArrayModel):
    """Joint geodesic estimate d_G over both domains"""
    dists: np.ndarray
    reachable: np.ndarray
    n_x: int
    n_y: int

    @field_validator("dists", mode="before")
    @classmethod
    def _freeze_dists(cls, value):
        return _frozen(value)

    @field_validator("reachable", mode="before")
    @classmethod
    def _freeze_mask(cls, value):
        return _frozen(value, dtype=bool)

    @property
    def cross(self) -> np.ndarray:
        return self.dists[: self.n_x, self.n_x:]


class Embedding(_ArrayModel):
    """MDS (or spectral) coordinates with per-domain row ranges"""
    coords: np.ndarray
    eigenvalues: np.ndarray
    domain_ranges: List[Tuple[int, int]]
    truncated: bool = False

    @field_validator("coords", "eigenvalues", mode="before")
    @classmethod
    def _freeze(cls, value):
        return _frozen(value)

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def domain(self, index: int) -> np.ndarray:
        start, stop = self.domain_ranges[index]
        return self.coords[start:stop]


class AlignmentResult(_ArrayModel):
    """Output of every alignment method"""
    method: str
    embedding: Embedding
    n_x: int
    n_y: int
    anchors: np.ndarray
    coupling: Optional[np.ndarray] = None
    diagnostics: Optional[MashDiagnostics] = None
    flags: List[str] = []

    @field_validator("anchors", mode="before")
    @classmethod
    def _freeze_anchors(cls, value):
        return _pairs(value)

    @property
    def x_coords(self) -> np.ndarray:
        return self.embedding.coords[: self.n_x]

    @property
    def y_coords(self) -> np.ndarray:
        return self.embedding.coords[self.n_x:]
