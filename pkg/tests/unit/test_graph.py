"""
Graph construction tests
k-NN search, alpha-decaying kernel, per-domain and joint similarity matrices
"""
import math

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from app.exceptions import GraphError
from app.graph import (
    alpha_decay_kernel,
    build_domain_similarity,
    build_joint_similarity,
    export_coo,
    knn_distances,
)
from app.models import DataMatrix
from app.schemas import KernelParams


# ====================================
# k-NN
# ====================================
def test_knn_on_a_line():
    data = DataMatrix(values=[[0.0], [1.0], [10.0]])
    knn = knn_distances(data, KernelParams(k=1))
    np.testing.assert_array_equal(knn.indices[:, 0], [1, 0, 1])
    np.testing.assert_allclose(knn.distances[:, 0], [0.1, 0.1, 0.9])


def test_knn_allows_duplicates():
    data = DataMatrix(values=[[0.0], [0.0], [1.0]])
    knn = knn_distances(data, KernelParams(k=1))
    assert knn.indices[0, 0] == 1
    assert knn.distances[0, 0] == 0.0


def test_knn_matches_exhaustive_sort(rng):
    values = rng.uniform(size=(20, 3))
    knn = knn_distances(DataMatrix(values=values), KernelParams(k=5))
    dists = cdist(values, values)
    for i in range(20):
        others = [j for j in range(20) if j != i]
        expected = sorted(others, key=lambda j: (dists[i, j], j))[:5]
        assert knn.indices[i].tolist() == expected


def test_knn_rejects_large_k():
    with pytest.raises(GraphError):
        knn_distances(DataMatrix(values=np.zeros((3, 1))), KernelParams(k=3))


# ====================================
# Kernel
# ====================================
def test_kernel_values():
    assert alpha_decay_kernel(0.0, 1.0, 1.0, 2.0) == 1.0
    assert alpha_decay_kernel(0.7, 0.7, 0.7, 2.0) == pytest.approx(math.exp(-1))
    expected = 0.5 * math.exp(-4) + 0.5 * math.exp(-1)
    assert alpha_decay_kernel(2.0, 1.0, 2.0, 2.0) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(0.193095, abs=1e-5)


def test_kernel_is_strictly_decreasing():
    d = np.linspace(0.0, 3.0, 50)
    values = alpha_decay_kernel(d, np.full(50, 0.5), np.full(50, 1.5), 2.0)
    assert np.all(np.diff(values) < 0)


def test_kernel_rejects_bad_bandwidth():
    with pytest.raises(GraphError):
        alpha_decay_kernel(1.0, 0.0, 1.0, 2.0)
    with pytest.raises(GraphError):
        alpha_decay_kernel(-1.0, 1.0, 1.0, 2.0)


# ====================================
# Domain similarity
# ====================================
def test_domain_similarity_properties(rng):
    params = KernelParams(k=4)
    data = DataMatrix(values=rng.uniform(size=(25, 3)))
    sim = build_domain_similarity(data, params)
    w = sim.weights.toarray()
    np.testing.assert_array_equal(w, w.T)
    np.testing.assert_array_equal(np.diag(w), np.ones(25))
    assert w.min() >= 0 and w.max() <= 1

    listed = np.zeros((25, 25), dtype=bool)
    for i, neighbors in enumerate(sim.neighbors):
        listed[i, neighbors] = True
    allowed = listed | listed.T | np.eye(25, dtype=bool)
    assert not np.any(w[~allowed])


def test_domain_similarity_two_points():
    sim = build_domain_similarity(DataMatrix(values=[[0.0], [3.0]]), KernelParams(k=1, alpha=2.0))
    np.testing.assert_allclose(sim.weights.toarray(), [[1.0, math.exp(-1)], [math.exp(-1), 1.0]])


def test_domain_similarity_collinear_hand_values():
    sim = build_domain_similarity(DataMatrix(values=[[0.0], [1.0], [2.0]]), KernelParams(k=2, alpha=2.0))
    near = 0.5 * math.exp(-0.25) + 0.5 * math.exp(-1.0)
    expected = [[1.0, near, math.exp(-1.0)], [near, 1.0, near], [math.exp(-1.0), near, 1.0]]
    np.testing.assert_allclose(sim.weights.toarray(), expected, rtol=1e-12)


# ====================================
# Joint similarity
# ====================================
def _joint(pair_factory, rng, anchors, nu=1.0, gamma=1.0, k=3, n=8):
    x = rng.uniform(size=(n, 2))
    y = rng.uniform(size=(n, 3))
    pair = pair_factory(x, y, anchors)
    params = KernelParams(k=k)
    wx = build_domain_similarity(pair.x, params)
    wy = build_domain_similarity(pair.y, params)
    return pair, wx, wy, build_joint_similarity(pair, wx, wy, nu, gamma)


def test_joint_without_anchors_has_empty_cross_block(pair_factory, rng):
    _, _, _, joint = _joint(pair_factory, rng, np.empty((0, 2)))
    assert not np.any(joint.w_xy)


def test_joint_single_anchor_without_extension(pair_factory, rng):
    _, _, _, joint = _joint(pair_factory, rng, [[0, 0]], nu=0.8, gamma=0.0)
    assert np.count_nonzero(joint.w_xy) == 1
    assert joint.w_xy[0, 0] == 0.8


def test_joint_neighbor_extension(pair_factory, rng):
    pair, wx, wy, joint = _joint(pair_factory, rng, [[0, 0]], gamma=1.0)
    wx_dense, wy_dense = wx.weights.toarray(), wy.weights.toarray()
    expected = np.zeros((pair.n_x, pair.n_y))
    for l in wy.neighbors[0]:
        expected[0, l] = wy_dense[l, 0]
    for m in wx.neighbors[0]:
        expected[m, 0] = wx_dense[m, 0]
    expected[0, 0] = 1.0
    np.testing.assert_array_equal(joint.w_xy, expected)


def test_joint_invariants(pair_factory, rng):
    anchors = [[0, 1], [3, 3], [5, 0]]
    _, _, _, joint = _joint(pair_factory, rng, anchors, k=3)
    np.testing.assert_array_equal(joint.w, joint.w.T)
    assert joint.w.min() >= 0 and joint.w.max() <= 1
    assert np.count_nonzero(joint.w_xy) <= len(anchors) * (2 * 3 + 1)
    for i, j in anchors:
        assert joint.w_xy[i, j] == 1.0
        assert joint.w_xy[i, j] == joint.w_xy[i].max()

    _, _, _, plain = _joint(pair_factory, rng, anchors, gamma=0.0)
    assert np.count_nonzero(plain.w_xy) == len(anchors)


def test_joint_rejects_bad_weights(pair_factory, rng):
    with pytest.raises(GraphError):
        _joint(pair_factory, rng, [[0, 0]], nu=0.0)
    with pytest.raises(GraphError):
        _joint(pair_factory, rng, [[0, 0]], gamma=1.5)


def test_export_coo(pair_factory, rng, tmp_path):
    _, _, _, joint = _joint(pair_factory, rng, [[0, 0]])
    path = export_coo(joint, tmp_path / "w.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "row,col,value"
    assert len(lines) - 1 == np.count_nonzero(joint.w)
