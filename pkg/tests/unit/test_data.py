"""
Data ingestion tests
CSV loading, 0-1 normalization, immutable models and seeded random streams
"""
import numpy as np
import pytest
from pydantic import ValidationError

from app.data import load_csv, normalize_01, write_csv
from app.datasets import load_builtin, resolve_dataset
from app.exceptions import DataError
from app.models import DataMatrix, DomainPair
from app.schemas import DatasetSpec, RandomSource


# ====================================
# normalize_01
# ====================================
def test_normalize_column_mode():
    out = normalize_01(np.array([[0.0], [2.0], [4.0]]))
    np.testing.assert_array_equal(out, [[0.0], [0.5], [1.0]])


def test_normalize_constant_matrix_is_zero():
    out = normalize_01(np.full((3, 2), 7.5), mode="matrix")
    np.testing.assert_array_equal(out, np.zeros((3, 2)))


def test_normalize_matrix_mode():
    out = normalize_01(np.array([[1.0, 3.0], [5.0, 7.0]]), mode="matrix")
    np.testing.assert_allclose(out, [[0.0, 1 / 3], [2 / 3, 1.0]], atol=1e-15)


def test_normalize_range_properties(rng):
    values = rng.normal(size=(30, 5)) * 10
    out = normalize_01(values)
    assert out.min() >= 0 and out.max() <= 1
    np.testing.assert_allclose(out.min(axis=0), 0.0)
    np.testing.assert_allclose(out.max(axis=0), 1.0)


def test_normalize_rejects_non_finite():
    with pytest.raises(DataError):
        normalize_01(np.array([[1.0], [np.nan]]))
    with pytest.raises(DataError):
        normalize_01(np.array([[1.0], [2.0]]), mode="rows")


# ====================================
# load_csv / write_csv
# ====================================
def test_load_csv_drops_missing_rows(tmp_path):
    path = tmp_path / "small.csv"
    path.write_text("a,b\n2,1\n4,\n6,3\n", encoding="utf-8")
    data = load_csv(path)
    assert data.n_obs == 2
    np.testing.assert_array_equal(data.values, [[0.0, 0.0], [1.0, 1.0]])


def test_load_csv_normalizes_and_encodes_labels(tmp_path):
    path = tmp_path / "labeled.csv"
    path.write_text("a,b,kind\n2,5,beta\n4,5,alpha\n6,5,beta\n", encoding="utf-8")
    data = load_csv(path, label_column="kind")
    np.testing.assert_array_equal(data.values[:, 0], [0.0, 0.5, 1.0])
    np.testing.assert_array_equal(data.values[:, 1], [0.0, 0.0, 0.0])
    np.testing.assert_array_equal(data.labels, [1, 0, 1])
    assert data.label_names == ["alpha", "beta"]
    assert data.feature_names == ["a", "b"]


def test_load_csv_errors(tmp_path):
    with pytest.raises(DataError) as excinfo:
        load_csv(tmp_path / "missing.csv")
    assert excinfo.value.path.endswith("missing.csv")

    path = tmp_path / "nolabel.csv"
    path.write_text("a,b\n1,2\n", encoding="utf-8")
    with pytest.raises(DataError):
        load_csv(path, label_column="class")

    empty = tmp_path / "empty_rows.csv"
    empty.write_text("a,b\n1,\n,2\n", encoding="utf-8")
    with pytest.raises(DataError):
        load_csv(empty)

    text = tmp_path / "text.csv"
    text.write_text("a,b\n1,x\n2,3\n", encoding="utf-8")
    with pytest.raises(DataError):
        load_csv(text)


def test_load_write_reload_is_idempotent(tmp_path, rng):
    path = tmp_path / "orig.csv"
    values = rng.uniform(size=(12, 3))
    names = np.where(rng.uniform(size=12) > 0.5, "yes", "no")
    lines = ["x,y,z,label"] + [f"{a!r},{b!r},{c!r},{n}" for (a, b, c), n in zip(values.tolist(), names)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    first = load_csv(path, label_column="label")
    second = load_csv(write_csv(first, tmp_path / "copy.csv"), label_column="label")
    np.testing.assert_array_equal(first.values, second.values)
    np.testing.assert_array_equal(first.labels, second.labels)
    assert first.label_names == second.label_names
    assert first.feature_names == second.feature_names


def test_load_csv_parses_shortest_repr_exactly(tmp_path, rng):
    # first two rows pin each column to [0, 1] so normalization is the identity
    values = np.vstack([np.zeros(3), np.ones(3), rng.uniform(size=(50, 3))])
    lines = ["a,b,c"] + [",".join(repr(v) for v in row) for row in values.tolist()]
    path = tmp_path / "exact.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    loaded = load_csv(path)
    np.testing.assert_array_equal(loaded.values, values)
    again = load_csv(write_csv(loaded, tmp_path / "copy.csv"))
    np.testing.assert_array_equal(again.values, values)


# ====================================
# Models
# ====================================
def test_data_matrix_is_read_only():
    data = DataMatrix(values=[[1.0, 2.0], [3.0, 4.0]], labels=[0, 1])
    with pytest.raises(ValueError):
        data.values[0, 0] = 9.0
    sub = data.subset_rows([1])
    np.testing.assert_array_equal(sub.values, [[3.0, 4.0]])
    np.testing.assert_array_equal(sub.labels, [1])
    assert data.subset_features([1]).n_features == 1


def test_domain_pair_validates_anchors():
    x = DataMatrix(values=np.zeros((3, 1)))
    y = DataMatrix(values=np.zeros((2, 1)))
    DomainPair(x=x, y=y, anchors=[[0, 1], [2, 0]])
    with pytest.raises(ValidationError):
        DomainPair(x=x, y=y, anchors=[[0, 2]])
    with pytest.raises(ValidationError):
        DomainPair(x=x, y=y, anchors=[[0, 0], [1, 0]])
    with pytest.raises(ValidationError):
        DomainPair(x=x, y=y, anchors=[[0, 0], [1, 1], [2, 0]])


def test_random_source_streams_are_reproducible():
    a = RandomSource(seed=7).generator("anchors").uniform(size=5)
    b = RandomSource(seed=7).generator("anchors").uniform(size=5)
    c = RandomSource(seed=7).generator("noise").uniform(size=5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


# ====================================
# Bundled datasets
# ====================================
def test_builtin_iris_is_normalized():
    data = load_builtin("iris")
    assert data.values.shape == (150, 4)
    assert data.values.min() == 0.0 and data.values.max() == 1.0
    assert data.label_names == ["setosa", "versicolor", "virginica"]


def test_resolve_dataset_reads_csv(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("a,b,c\n1,2,u\n3,4,v\n", encoding="utf-8")
    data = resolve_dataset(DatasetSpec(path=str(path), label_column="c"))
    assert data.n_obs == 2
    with pytest.raises(ValidationError):
        DatasetSpec(path=str(path), builtin="iris")
