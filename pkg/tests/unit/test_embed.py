"""
Information distance and classical MDS tests
"""
import math

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from app.embed import (
    classical_mds,
    hellinger,
    kl_divergence_distance,
    pairwise_information_distance,
    potential_distance,
)
from app.exceptions import EmbeddingError


def random_simplex(rng, n, m):
    rows = rng.uniform(size=(n, m)) ** 2
    return rows / rows.sum(axis=1, keepdims=True)


# ====================================
# Information distances
# ====================================
def test_hellinger_values():
    assert hellinger([0.3, 0.7], [0.3, 0.7]) == 0.0
    assert hellinger([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0)
    # Bhattacharyya identity: H^2 = 1 - sum sqrt(p q)
    expected = math.sqrt(1.0 - (math.sqrt(0.5 * 0.9) + math.sqrt(0.5 * 0.1)))
    assert hellinger([0.5, 0.5], [0.9, 0.1]) == pytest.approx(expected, rel=1e-12)


def test_hellinger_is_a_bounded_pseudometric(rng):
    rows = random_simplex(rng, 300, 6)
    for p, q, r in rows.reshape(100, 3, 6):
        d_pq, d_qr, d_pr = hellinger(p, q), hellinger(q, r), hellinger(p, r)
        assert 0.0 <= d_pq <= 1.0
        assert d_pq == pytest.approx(hellinger(q, p))
        assert d_pr <= d_pq + d_qr + 1e-12


def test_kl_values():
    assert kl_divergence_distance([0.5, 0.5], [0.5, 0.5]) == 0.0
    expected = (0.5 - 0.75) * math.log(0.5 / 0.75) + (0.5 - 0.25) * math.log(0.5 / 0.25)
    assert kl_divergence_distance([0.5, 0.5], [0.75, 0.25]) == pytest.approx(expected, rel=1e-6)


def test_kl_is_symmetric(rng):
    for p, q in random_simplex(rng, 20, 5).reshape(10, 2, 5):
        assert kl_divergence_distance(p, q) == pytest.approx(kl_divergence_distance(q, p), rel=1e-12)


def test_potential_values():
    assert potential_distance([0.2, 0.8], [0.2, 0.8]) == 0.0
    expected = math.sqrt(2.0) * abs(math.log(0.6) - math.log(0.4))
    assert potential_distance([0.6, 0.4], [0.4, 0.6], epsilon=1e-7) == pytest.approx(expected, rel=1e-6)


def test_potential_is_permutation_equivariant(rng):
    p, q = random_simplex(rng, 2, 7)
    perm = rng.permutation(7)
    assert potential_distance(p[perm], q[perm]) == pytest.approx(potential_distance(p, q), rel=1e-12)


def test_rejects_non_probability_vectors():
    with pytest.raises(EmbeddingError):
        hellinger([0.5, 0.6], [0.5, 0.5])
    with pytest.raises(EmbeddingError):
        potential_distance([1.2, -0.2], [0.5, 0.5])
    with pytest.raises(EmbeddingError):
        kl_divergence_distance([1.0, 0.0], [0.5, 0.25, 0.25])


@pytest.mark.parametrize(
    "kind, single",
    [("hellinger", hellinger), ("potential", potential_distance), ("kl", kl_divergence_distance)],
)
def test_pairwise_matches_single_pair(rng, kind, single):
    rows = random_simplex(rng, 6, 4)
    matrix = pairwise_information_distance(rows, kind)
    for i in range(6):
        for j in range(6):
            assert matrix[i, j] == pytest.approx(single(rows[i], rows[j]), rel=1e-9, abs=1e-12)


# ====================================
# Classical MDS
# ====================================
def test_mds_collinear_points():
    d = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]])
    emb = classical_mds(d, 1)
    coords = emb.coords[:, 0]
    np.testing.assert_allclose(np.abs(coords), [1.0, 0.0, 1.0], atol=1e-12)
    assert coords[0] == pytest.approx(-coords[2])


def test_mds_recovers_planar_distances(rng):
    points = rng.uniform(size=(12, 2))
    d = cdist(points, points)
    emb = classical_mds(d, 2)
    assert not emb.truncated
    np.testing.assert_allclose(cdist(emb.coords, emb.coords), d, atol=1e-8)


def test_mds_full_dimension_is_exact_and_flags_truncation(rng):
    points = rng.uniform(size=(6, 3))
    d = cdist(points, points)
    emb = classical_mds(d, 5)
    assert emb.truncated and emb.dim == 3
    np.testing.assert_allclose(cdist(emb.coords, emb.coords), d, atol=1e-6)


def test_mds_of_zero_distances():
    emb = classical_mds(np.zeros((4, 4)), 2)
    assert np.all(emb.coords == 0)
    assert emb.truncated


def test_mds_sign_convention(rng):
    points = rng.uniform(size=(10, 3))
    emb = classical_mds(cdist(points, points), 3)
    for c in range(emb.dim):
        column = emb.coords[:, c]
        assert column[np.argmax(np.abs(column))] > 0


def test_mds_rejects_bad_input():
    with pytest.raises(EmbeddingError):
        classical_mds(np.array([[0.0, 1.0], [2.0, 0.0]]), 1)
    with pytest.raises(EmbeddingError):
        classical_mds(np.array([[0.0, np.inf], [np.inf, 0.0]]), 1)
    with pytest.raises(EmbeddingError):
        classical_mds(np.zeros((3, 3)), 0)
