import numpy as np
import pytest

from lbpseg.clustering import ClusterResult, _lloyd, kmeans2, lesion_cluster_select
from lbpseg.errors import DegenerateDataError, ParameterError, SizeError


def brute_force_sse(points):
    """Minimum SSE over every split of the points into two non-empty groups."""
    n = len(points)
    best = np.inf
    # point 0 always in group 0 removes the label-swap symmetry
    for bits in range(1, 2 ** (n - 1)):
        labels = np.array([0] + [(bits >> i) & 1 for i in range(n - 1)], dtype=bool)
        a, b = points[~labels], points[labels]
        sse = ((a - a.mean(axis=0)) ** 2).sum() + ((b - b.mean(axis=0)) ** 2).sum()
        best = min(best, sse)
    return best


def check_result_consistent(points, res: ClusterResult):
    d = ((points[:, None, :] - res.centroids[None, :, :]) ** 2).sum(axis=2)
    nearest = (d[:, 1] < d[:, 0]).astype(int)
    assert np.array_equal(res.labels, nearest)
    assert res.sse == pytest.approx(d[np.arange(len(points)), res.labels].sum(), rel=1e-12, abs=1e-12)
    hist = np.array(res.sse_history)
    assert np.all(np.diff(hist) <= 1e-9 * max(1.0, hist[0]))


def test_four_point_example():
    pts = np.array([[0, 0], [0, 1], [10, 0], [10, 1]], dtype=float)
    res = kmeans2(pts)
    assert sorted(map(tuple, res.centroids.tolist())) == [(0.0, 0.5), (10.0, 0.5)]
    assert res.sse == pytest.approx(1.0)
    assert brute_force_sse(pts) == pytest.approx(1.0)
    check_result_consistent(pts, res)


def test_identical_points_rejected():
    with pytest.raises(DegenerateDataError):
        kmeans2(np.ones((10, 2)))
    with pytest.raises(DegenerateDataError):
        kmeans2(np.ones((1, 2)))


def test_bad_arguments():
    pts = np.arange(8.0).reshape(4, 2)
    with pytest.raises(SizeError):
        kmeans2(np.arange(9.0).reshape(3, 3))
    with pytest.raises(ParameterError):
        kmeans2(pts, restarts=0)
    with pytest.raises(ParameterError):
        kmeans2(np.array([[0.0, np.nan], [1.0, 1.0]]))


def test_two_blobs(rng):
    a = rng.normal([0, 0], 1.0, size=(500, 2))
    b = rng.normal([20, 5], 1.0, size=(300, 2))
    pts = np.vstack([a, b])
    truth = np.r_[np.zeros(500, int), np.ones(300, int)]
    res = kmeans2(pts, seed=3)
    agree = max((res.labels == truth).mean(), (res.labels != truth).mean())
    assert agree >= 0.99
    check_result_consistent(pts, res)


def test_small_instances_near_optimal():
    # Lloyd can settle in a poor fixed point even from 10 k-means++ starts
    # (about 1 uniform instance in 150), so this checks the rate
    gen = np.random.default_rng(2024)
    ratios = []
    for _ in range(200):
        n = int(gen.integers(3, 13))
        pts = gen.uniform(-5, 5, size=(n, 2))
        res = kmeans2(pts, seed=int(gen.integers(1000)), restarts=10)
        check_result_consistent(pts, res)
        ratios.append(res.sse / brute_force_sse(pts))
    ratios = np.array(ratios)
    assert np.all(ratios >= 1 - 1e-9)
    assert np.mean(ratios <= 1.05) >= 0.97
    assert ratios.max() < 1.25


def test_well_separated_instances_exact():
    gen = np.random.default_rng(99)
    for i in range(50):
        n = int(gen.integers(4, 13))
        centers = np.array([[0.0, 0.0], [gen.uniform(10, 30), gen.uniform(-10, 10)]])
        k = np.r_[0, 1, gen.integers(0, 2, n - 2)]
        pts = centers[k] + gen.uniform(-1, 1, size=(n, 2))
        res = kmeans2(pts, seed=i, restarts=10)
        assert res.sse == pytest.approx(brute_force_sse(pts), rel=1e-12)


def test_deterministic(rng):
    pts = rng.normal(size=(2000, 2))
    a = kmeans2(pts, seed=11)
    b = kmeans2(pts.copy(), seed=11)
    assert np.array_equal(a.labels, b.labels)
    assert np.array_equal(a.centroids, b.centroids)
    assert a.sse == b.sse and a.iterations == b.iterations


def test_max_iter_caps_updates(rng):
    pts = rng.normal(size=(500, 2))
    res = kmeans2(pts, max_iter=1, tol=0.0, restarts=1)
    assert res.iterations == 1
    check_result_consistent(pts, res)


def test_empty_cluster_is_reseeded_at_farthest_point():
    pts = np.array([[0, 0], [1, 0], [2, 0], [9, 0]], dtype=float)
    labels, centroids, sse, _, hist = _lloyd(pts, (pts[:, 0].copy(), pts[:, 1].copy()), np.zeros((2, 2)), 10, 0.0)
    # both centroids start at the origin: cluster 1 is empty and gets the point at x=9
    assert set(labels.tolist()) == {False, True}
    assert sse == pytest.approx(brute_force_sse(pts))
    assert hist[0] == pytest.approx(0 + 1 + 4)


# --- lesion selection ----------------------------------------------------------

def _result(labels):
    labels = np.asarray(labels, dtype=np.int8)
    return ClusterResult(labels=labels, centroids=np.zeros((2, 2)), sse=0.0, iterations=0)


def test_darker_cluster_is_lesion():
    y = np.array([[60.0, 60.0, 180.0, 180.0]])
    mask = lesion_cluster_select(_result([0, 0, 1, 1]), y)
    assert mask.tolist() == [[True, True, False, False]]


def test_tie_goes_to_higher_flatness():
    y = np.full((1, 4), 100.0)
    l = np.array([[10.0, 10.0, 200.0, 200.0]])
    mask = lesion_cluster_select(_result([0, 0, 1, 1]), y, l)
    assert mask.tolist() == [[False, False, True, True]]


def test_selection_ignores_label_permutation(rng):
    y = rng.uniform(0, 255, size=(8, 8))
    labels = (rng.random(64) > 0.4).astype(np.int8)
    a = lesion_cluster_select(_result(labels), y)
    b = lesion_cluster_select(_result(1 - labels), y)
    assert np.array_equal(a, b)


def test_selection_requires_full_cover():
    with pytest.raises(SizeError):
        lesion_cluster_select(_result([0, 1, 0]), np.zeros((2, 2)))
