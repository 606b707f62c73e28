import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from structnet.data import (
    FeatureMatrix,
    Target,
    TargetKind,
    class_means,
    class_means_matrix,
    load_csv,
    standardize,
    write_csv,
)
from structnet.errors import (
    DuplicateFeatureName,
    MissingValue,
    StructNetError,
    TargetNotFound,
    TooFewSamples,
)


def _write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_discrete_first_appearance(tmp_path):
    p = _write(tmp_path, "a,b,label\n1,2,x\n3,4,y\n5,6,x\n")
    data, target = load_csv(p, "label", "discrete")
    assert data.values.shape == (3, 2)
    assert data.feature_names == ("a", "b")
    assert target.kind is TargetKind.DISCRETE
    assert target.labels.tolist() == [0, 1, 0]
    assert target.C == 2
    assert target.class_names == ("x", "y")


def test_load_continuous(tmp_path):
    p = _write(tmp_path, "rate,u,v\n0.5,1,2\n1.5,3,4\n-2,5,6\n3e2,7,8\n")
    data, target = load_csv(p, "rate", TargetKind.CONTINUOUS)
    assert target.kind is TargetKind.CONTINUOUS
    np.testing.assert_array_equal(target.continuous_values, [0.5, 1.5, -2.0, 300.0])
    assert data.feature_names == ("u", "v")


def test_load_target_by_index(tmp_path):
    p = _write(tmp_path, "label,a,b\nx,1,2\ny,3,4\n")
    data, target = load_csv(p, 0, "discrete")
    assert data.feature_names == ("a", "b")
    assert target.labels.tolist() == [0, 1]
    p2 = _write(tmp_path, "a,b\n1,2\n3,4\n", "e.csv")
    data, target = load_csv(p2, "-1", "continuous")
    assert data.feature_names == ("a",)
    assert target.continuous_values.tolist() == [2.0, 4.0]


@pytest.mark.parametrize(
    "text,err",
    [
        ("a,b,label\n1,,x\n3,4,y\n", MissingValue),
        ("a,b,label\n1,abc,x\n3,4,y\n", MissingValue),
        ("a,b,label\n1,2,\n3,4,y\n", MissingValue),
        ("a,b,label\n1,nan,x\n3,4,y\n", MissingValue),
        ("a,a,label\n1,2,x\n3,4,y\n", DuplicateFeatureName),
        ("a,b,label\n1,2,x\n", TooFewSamples),
        ("a,b,cls\n1,2,x\n3,4,y\n", TargetNotFound),
    ],
)
def test_load_errors(tmp_path, text, err):
    with pytest.raises(err):
        load_csv(_write(tmp_path, text), "label", "discrete")


def test_round_trip_bit_exact(tmp_path, rng):
    vals = rng.standard_normal((7, 3)) * 10.0 ** rng.integers(-200, 200, (7, 3))
    data = FeatureMatrix(vals, ("a", "b", "c"))
    y = Target.continuous(rng.standard_normal(7) / 3)
    p = tmp_path / "rt.csv"
    write_csv(p, data, y, "y")
    data2, y2 = load_csv(p, "y", "continuous")
    assert np.array_equal(data2.values, data.values)
    assert np.array_equal(y2.continuous_values, y.continuous_values)


def test_round_trip_discrete(tmp_path):
    data = FeatureMatrix.from_array([[1.0], [2.0], [3.0]])
    t = Target.discrete(["b", "a", "b"])
    p = tmp_path / "rt.csv"
    write_csv(p, data, t, "label")
    _, t2 = load_csv(p, "label", "discrete")
    assert t2.labels.tolist() == [0, 1, 0]
    assert t2.class_names == ("b", "a")


def test_feature_matrix_invariants():
    with pytest.raises(MissingValue):
        FeatureMatrix.from_array([[1.0], [np.inf]])
    with pytest.raises(TooFewSamples):
        FeatureMatrix.from_array([[1.0]])
    with pytest.raises(DuplicateFeatureName):
        FeatureMatrix(np.ones((2, 2)), ("x", "x"))
    m = FeatureMatrix.from_array(np.arange(6.0).reshape(3, 2))
    assert (m.M, m.N) == (3, 2)
    assert m.design.shape == (2, 3)


def test_target_invariants():
    with pytest.raises(StructNetError):
        Target(TargetKind.DISCRETE, labels=[0, 0, 0])
    with pytest.raises(StructNetError):
        Target(TargetKind.DISCRETE, labels=[0, 2, 2])
    with pytest.raises(MissingValue):
        Target.continuous([1.0, np.nan])


def test_standardize_example():
    m = FeatureMatrix.from_array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
    s, rec = standardize(m)
    # mu = 2, sigma^2 = (1 + 0 + 1) / 3
    sigma = np.sqrt(2.0 / 3.0)
    np.testing.assert_allclose(s.values[:, 0], [-1 / sigma, 0.0, 1 / sigma], rtol=1e-15)
    np.testing.assert_allclose(np.round(s.values[:, 0], 4), [-1.2247, 0.0, 1.2247])
    assert s.values[:, 1].tolist() == [0.0, 0.0, 0.0]
    assert rec.std_devs[1] == 0.0
    assert rec.applied
    np.testing.assert_allclose(rec.means, [2.0, 5.0])


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (8, 3), elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_standardize_idempotent(values):
    s1, rec = standardize(FeatureMatrix.from_array(values))
    s2, _ = standardize(s1)
    live = rec.std_devs > 0
    np.testing.assert_allclose(s2.values[:, live], s1.values[:, live], atol=1e-12, rtol=0)
    assert np.all(s1.values[:, ~live] == 0.0)


@pytest.mark.parametrize(
    "feature,labels,expected",
    [
        ([1, 3, 10, 14], [0, 0, 1, 1], [2, 2, 12, 12]),
        ([1, 2], [0, 1], [1, 2]),
        ([1, 1, 1, 1], [0, 1, 0, 1], [1, 1, 1, 1]),
    ],
)
def test_class_means(feature, labels, expected):
    t = Target(TargetKind.DISCRETE, labels=labels)
    assert class_means(feature, t).tolist() == expected


def test_class_means_constant_within_class(rng):
    labels = rng.integers(0, 4, 50)
    labels[:4] = [0, 1, 2, 3]
    t = Target(TargetKind.DISCRETE, labels=labels)
    out = class_means(rng.standard_normal(50), t)
    for c in range(4):
        assert np.unique(out[labels == c]).size == 1


def test_class_means_requires_discrete():
    with pytest.raises(StructNetError):
        class_means([1.0, 2.0], Target.continuous([1.0, 2.0]))


def test_class_means_matrix_matches_columns(rng):
    X = rng.standard_normal((30, 4))
    labels = np.arange(30) % 3
    t = Target(TargetKind.DISCRETE, labels=labels)
    cm = class_means_matrix(X, t)
    for j in range(4):
        np.testing.assert_allclose(cm[:, j], class_means(X[:, j], t), rtol=1e-14)
