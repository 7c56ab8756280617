import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mstae.evaluation import (cluster_accuracy, clustering_metrics, detection_metrics, kmeans, nmi, trustworthiness,
                              within_cluster_ss)

bool_pairs = st.integers(1, 60).flatmap(lambda n: st.tuples(arrays(bool, n), arrays(bool, n)))


def test_perfect_detection():
    y = np.array([0, 1, 0, 1, 1], bool)
    met = detection_metrics(y, y)
    assert met.precision == met.recall == met.f1 == 1.0


def test_f1_six_of_ten():
    truth = np.zeros(100, bool)
    truth[:10] = True
    pred = np.zeros(100, bool)
    pred[4:14] = True  # 6 hits, 4 false alarms
    met = detection_metrics(pred, truth)
    assert met.f1 == pytest.approx(0.6)
    assert (met.true_positives, met.false_positives, met.false_negatives) == (6, 4, 4)


def test_no_flags_gives_zero():
    met = detection_metrics(np.zeros(5, bool), np.array([1, 0, 0, 0, 0], bool))
    assert met.precision == 0 and met.f1 == 0


def test_length_mismatch():
    with pytest.raises(ValueError):
        detection_metrics(np.zeros(3, bool), np.zeros(4, bool))


@given(bool_pairs)
def test_detection_matches_confusion_arithmetic(pair):
    pred, truth = pair
    tp = sum(p and t for p, t in zip(pred, truth))
    fp = sum(p and not t for p, t in zip(pred, truth))
    fn = sum(t and not p for p, t in zip(pred, truth))
    met = detection_metrics(pred, truth)
    assert met.precision == (tp / (tp + fp) if tp + fp else 0.0)
    assert met.recall == (tp / (tp + fn) if tp + fn else 0.0)
    expect_f1 = 2 * tp / (2 * tp + fp + fn) if tp else 0.0
    assert met.f1 == pytest.approx(expect_f1, abs=1e-15)


@given(st.integers(2, 60), st.integers(0, 2**32 - 1))
def test_equal_counts_give_equal_prf(m, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, m))
    truth = np.zeros(m, bool)
    truth[rng.choice(m, n, replace=False)] = True
    pred = np.zeros(m, bool)
    pred[rng.choice(m, n, replace=False)] = True
    met = detection_metrics(pred, truth)
    assert met.precision == met.recall == met.f1


def test_kmeans_separates_blobs():
    rng = np.random.default_rng(0)
    z = np.vstack([rng.normal(0, 1, (30, 2)), rng.normal(10, 1, (30, 2))])
    lab = kmeans(z, 2, seed=3)
    assert len(set(lab[:30])) == 1 and len(set(lab[30:])) == 1 and lab[0] != lab[30]


def test_kmeans_every_point_own_cluster():
    z = np.random.default_rng(0).normal(size=(6, 2))
    lab = kmeans(z, 6)
    assert len(set(lab)) == 6
    assert within_cluster_ss(z, lab) == 0


def test_kmeans_deterministic():
    z = np.random.default_rng(0).normal(size=(80, 3))
    np.testing.assert_array_equal(kmeans(z, 4, seed=1), kmeans(z, 4, seed=1))


def test_kmeans_bad_k():
    with pytest.raises(ValueError):
        kmeans(np.zeros((5, 2)), 6)


def test_relabeling_is_perfect():
    truth = np.array([0, 0, 1, 1, 2, 2, 2])
    perm = np.array([2, 0, 1])[truth]
    met = clustering_metrics(perm, truth)
    assert met.nmi == pytest.approx(1.0) and met.acc == 1.0


def test_even_split_accuracy():
    assignment = np.array([0, 0, 1, 1])
    truth = np.array([0, 1, 0, 1])
    assert cluster_accuracy(assignment, truth) == 0.5


def test_random_assignment_nmi_near_zero():
    rng = np.random.default_rng(0)
    truth = np.repeat(np.arange(4), 500)
    assert nmi(rng.integers(0, 4, 2000), truth) < 0.05


@given(arrays(np.int64, 40, elements=st.integers(0, 4)), arrays(np.int64, 40, elements=st.integers(0, 3)))
def test_metrics_invariant_under_relabeling(a, b):
    perm = np.array([3, 0, 4, 1, 2])
    assert nmi(perm[a], b) == pytest.approx(nmi(a, b), abs=1e-12)
    assert cluster_accuracy(perm[a], b) == pytest.approx(cluster_accuracy(a, b))


@given(arrays(np.int64, 50, elements=st.integers(0, 5)), arrays(np.int64, 50, elements=st.integers(0, 5)))
def test_nmi_matches_sklearn(a, b):
    sk = pytest.importorskip("sklearn.metrics")
    for avg in ("arithmetic", "geometric", "min", "max"):
        assert nmi(a, b, avg) == pytest.approx(sk.normalized_mutual_info_score(b, a, average_method=avg), abs=1e-10)


def test_trustworthiness_isometry():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(100, 3))
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    assert trustworthiness(x, x @ q + 5.0, k=10) == pytest.approx(1.0)


def test_trustworthiness_random_embedding_low():
    rng = np.random.default_rng(0)
    assert trustworthiness(rng.normal(size=(500, 5)), rng.normal(size=(500, 2)), k=10) < 0.6


def test_trustworthiness_bad_k():
    with pytest.raises(ValueError):
        trustworthiness(np.zeros((10, 2)), np.zeros((10, 2)), k=5)


@pytest.mark.parametrize("seed", range(3))
def test_trustworthiness_matches_sklearn(seed):
    man = pytest.importorskip("sklearn.manifold")
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(120, 6))
    z = x[:, :2] + 0.3 * rng.normal(size=(120, 2))
    assert trustworthiness(x, z, k=7) == pytest.approx(man.trustworthiness(x, z, n_neighbors=7), abs=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_trustworthiness_orthogonal_invariance(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(40, 4))
    z = rng.normal(size=(40, 2))
    q, _ = np.linalg.qr(rng.normal(size=(2, 2)))
    assert trustworthiness(x, z @ q - 3.0, 5) == pytest.approx(trustworthiness(x, z, 5), abs=1e-12)
