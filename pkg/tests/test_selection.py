import numpy as np
import pytest

from structnet.admm import SolverConfig
from structnet.data import FeatureMatrix, Target, TargetKind, standardize
from structnet.errors import ClassTooSmall, EmptySubset, InvalidKList, StructNetError
from structnet.selection import (
    Method,
    accuracy_curve,
    correlated_groups,
    knn_cross_validate,
    knn_predict,
    rank_features,
    select_features,
    stratified_folds,
    synthetic_benchmark,
)


def test_rank_examples():
    r = rank_features([0.5, -0.9, 0.0])
    assert r.ranking == (1, 0, 2)
    assert r.selected == {0, 1}
    r = rank_features(np.zeros(4))
    assert r.ranking == (0, 1, 2, 3) and r.selected == frozenset()
    assert rank_features([0.3, 0.3]).ranking == (0, 1)
    assert rank_features([1e-9, 2e-8], zero_tol=1e-8).selected == {1}


def test_rank_permutation_equivariant(rng):
    b = rng.standard_normal(20)
    b[[3, 7]] = 0.0
    perm = rng.permutation(20)
    r0 = rank_features(b)
    r1 = rank_features(b[perm])
    # map permuted ranking back to original indices
    assert [int(perm[i]) for i in r1.ranking if b[perm[i]] != 0] == [i for i in r0.ranking if b[i] != 0]
    assert {int(perm[i]) for i in r1.selected} == r0.selected


def test_rank_report_dict():
    d = rank_features([0.0, 2.0], feature_names=("a", "b"), method="lasso").to_dict()
    assert d["ranking_names"] == ["b", "a"] and d["selected_names"] == ["b"]
    assert d["method"] == "lasso"


def test_method_parse():
    assert Method.parse("InElasticNet") is Method.INELASTICNET
    with pytest.raises(StructNetError):
        Method.parse("svm")


def test_stratified_folds_balanced(rng):
    labels = np.repeat([0, 1, 2], [30, 20, 13])
    f = stratified_folds(labels, 5, seed=3)
    for c in range(3):
        counts = np.bincount(f[labels == c], minlength=5)
        assert counts.max() - counts.min() <= 1
    assert np.array_equal(f, stratified_folds(labels, 5, seed=3))
    assert not np.array_equal(f, stratified_folds(labels, 5, seed=4))


def test_knn_vote_tie_goes_to_smallest_class():
    train = np.array([[-1.0], [1.0]])
    pred = knn_predict(train, np.array([1, 0]), np.array([[0.0]]), 2, 2)
    assert pred.tolist() == [0]


def _clusters(rng):
    x = np.concatenate([-10 + rng.uniform(-0.1, 0.1, 20), 10 + rng.uniform(-0.1, 0.1, 20)])
    return FeatureMatrix.from_array(x[:, None]), Target(TargetKind.DISCRETE, labels=np.repeat([0, 1], 20))


def test_knn_separable(rng):
    data, t = _clusters(rng)
    for seed in range(5):
        assert knn_cross_validate(data, t, [0], folds=5, k_neighbors=3, seed=seed) == (1.0, 0.0)


def test_knn_random_labels_near_chance():
    # simulation oracle: 3 sigma of Binomial(200, 1/2) / 200 is 0.106
    rng = np.random.default_rng(99)
    accs = []
    for seed in range(30):
        X = rng.standard_normal((200, 3))
        labels = rng.permutation(np.repeat([0, 1], 100))
        m, _ = knn_cross_validate(FeatureMatrix.from_array(X), Target(TargetKind.DISCRETE, labels=labels),
                                  [0, 1, 2], folds=10, k_neighbors=5, seed=seed)
        accs.append(m)
        assert abs(m - 0.5) <= 0.15
    assert abs(np.mean(accs) - 0.5) <= 0.05


def test_knn_errors(rng):
    data, t = _clusters(rng)
    with pytest.raises(EmptySubset):
        knn_cross_validate(data, t, [], folds=5)
    with pytest.raises(ClassTooSmall):
        knn_cross_validate(data, t, [0], folds=25)
    with pytest.raises(StructNetError):
        knn_cross_validate(data, Target.continuous(np.arange(40.0)), [0])


def test_accuracy_curve_full_set_consistency():
    b = synthetic_benchmark(3, 5, 0, 0.0, M=80, seed=1)
    rep = accuracy_curve(b.data, b.target, "lasso", [1, 4, 8], SolverConfig(lambda1=1.0), folds=5, seed=2)
    assert [r[0] for r in rep.rows] == [1, 4, 8]
    full = knn_cross_validate(standardize(b.data)[0], b.target, range(8), folds=5, k_neighbors=5, seed=2)
    assert rep.rows[-1][1:] == full
    assert all(0 <= r[1] <= 1 for r in rep.rows)


@pytest.mark.parametrize("ks", [[3, 1], [1, 1], [0, 2], [1, 99], []])
def test_accuracy_curve_invalid_k(ks):
    b = synthetic_benchmark(2, 3, 0, 0.0, M=40, seed=0)
    with pytest.raises(InvalidKList):
        accuracy_curve(b.data, b.target, "lasso", ks)


def test_accuracy_curve_reduces_folds(caplog):
    data = FeatureMatrix.from_array(np.arange(12.0)[:, None])
    t = Target(TargetKind.DISCRETE, labels=[0] * 8 + [1] * 4)
    rep = accuracy_curve(data, t, "ridge", [1], folds=10, ranking=[0])
    assert rep.folds == 4
    assert "reducing folds" in caplog.text


def test_accuracy_more_features_help_on_average():
    gains = []
    for seed in range(20):
        b = synthetic_benchmark(5, 15, 0, 0.0, M=120, seed=seed)
        rep = accuracy_curve(b.data, b.target, "inelasticnet", [1, 5], folds=5, seed=seed)
        gains.append(rep.rows[1][1] - rep.rows[0][1])
    assert np.mean(gains) >= 0


def test_eval_report_exports(tmp_path):
    b = synthetic_benchmark(2, 2, 0, 0.0, M=30, seed=0)
    rep = accuracy_curve(b.data, b.target, "lasso", [1, 2], folds=3)
    rep.write_csv(tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "k,mean_accuracy,std" and len(lines) == 3
    assert rep.to_dict()["curve"][0]["k"] == 1


def test_benchmark_layout():
    b = synthetic_benchmark(2, 3, 2, 0.9, M=50, seed=5)
    assert b.data.N == 2 + 4 + 3
    assert b.relevant == {0, 1}
    assert correlated_groups(2, 2) == [(0, 2, 3), (1, 4, 5)]
    corr = np.corrcoef(b.data.values, rowvar=False)
    assert corr[0, 2] > 0.7 and corr[1, 5] > 0.7
    lab = b.target.labels
    assert np.array_equal(lab, (b.data.values[:, :2].sum(axis=1) > 0).astype(int))
    again = synthetic_benchmark(2, 3, 2, 0.9, M=50, seed=5)
    assert np.array_equal(again.data.values, b.data.values)


def test_benchmark_null_and_zero_correlation():
    b = synthetic_benchmark(0, 6, 0, 0.0, M=60, seed=0)
    assert b.relevant == frozenset() and b.target.C == 2
    b = synthetic_benchmark(3, 0, 1, 0.0, M=2000, seed=0)
    corr = np.corrcoef(b.data.values, rowvar=False)
    assert abs(corr[0, 3]) < 0.1
    with pytest.raises(StructNetError):
        synthetic_benchmark(1, 1, 0, 1.0)
    with pytest.raises(StructNetError):
        synthetic_benchmark(1, 1, 0, 0.0, M=5)


def test_end_to_end_smoke():
    b = synthetic_benchmark(5, 45, 0, 0.0, M=200, seed=0)
    for m in ("lasso", "inelasticnet"):
        out = select_features(b.data, b.target, m)
        assert out.result.converged
        assert sorted(out.report.ranking) == list(range(50))
        assert (out.interaction is None) == (m == "lasso")
