import csv

import numpy as np
import pytest

from softq.data.synthetic import Dataset, circles_dataset, moons_dataset, xor_dataset


def best_linear_accuracy(ds: Dataset, n_angles: int = 180, n_offsets: int = 201) -> float:
    """Exhaustive search over lines w.x = b on a grid of directions and offsets."""
    x, y = ds.features, ds.labels
    best = 0.0
    for a in np.linspace(0, np.pi, n_angles, endpoint=False):
        proj = x @ np.array([np.cos(a), np.sin(a)])
        for b in np.linspace(proj.min(), proj.max(), n_offsets):
            acc = np.mean((proj > b) == y)
            best = max(best, acc, 1 - acc)
    return best


class TestXor:
    @pytest.mark.parametrize("point,label", [((0, 0), 0), ((0, 1), 1), ((1, 0), 1), ((1, 1), 0)])
    def test_truth_table(self, point, label):
        tr, _ = xor_dataset()
        k = [tuple(r) for r in tr.features].index(point)
        assert tr.labels[k] == label

    def test_train_equals_test(self):
        tr, te = xor_dataset()
        assert np.array_equal(tr.features, te.features)
        assert np.array_equal(tr.labels, te.labels)
        assert (tr.split, te.split) == ("train", "test")


@pytest.mark.parametrize("maker", [circles_dataset, moons_dataset])
class TestGenerators:
    def test_balanced(self, maker):
        tr, te = maker()
        assert list(tr.class_counts()) == [100, 100]
        assert list(te.class_counts()) == [50, 50]

    def test_unit_interval_scaling(self, maker):
        for ds in maker(feature_range=(0.0, 1.0)):
            assert ds.features.min() >= 0 and ds.features.max() <= 1
        tr, te = maker(feature_range=(0.0, 1.0))
        both = np.vstack([tr.features, te.features])
        assert np.allclose(both.min(axis=0), 0) and np.allclose(both.max(axis=0), 1)

    def test_default_range_is_recorded(self, maker):
        tr, _ = maker()
        lo, hi = tr.provenance["feature_range"]
        assert tr.features.min() >= lo and tr.features.max() <= hi

    def test_deterministic(self, maker):
        a, b = maker(seed=7), maker(seed=7)
        for x, y in zip(a, b):
            assert x.features.tobytes() == y.features.tobytes()
            assert np.array_equal(x.labels, y.labels)
        assert maker(seed=8)[0].digest() != a[0].digest()

    def test_splits_are_distinct_draws(self, maker):
        tr, te = maker(20, 20, seed=1)
        assert not np.array_equal(tr.features, te.features)

    def test_bad_sizes(self, maker):
        with pytest.raises(ValueError):
            maker(0, 10)


def test_circles_not_linearly_separable():
    tr, _ = circles_dataset(seed=0)
    assert best_linear_accuracy(tr) < 0.70


def test_moons_not_linearly_separable():
    tr, _ = moons_dataset(seed=0)
    acc = best_linear_accuracy(tr)
    assert 0.75 < acc < 0.90


def test_csv_export(tmp_path):
    tr, _ = moons_dataset(10, 4, seed=2)
    rows = list(csv.reader(tr.to_csv(tmp_path / "moons.csv").open()))
    assert rows[0] == ["x1", "x2", "label"]
    got = np.array([[float(v) for v in r[:2]] for r in rows[1:]])
    assert np.array_equal(got, tr.features)
    assert [int(r[2]) for r in rows[1:]] == list(tr.labels)


class TestDatasetValidation:
    def test_out_of_range_features(self):
        with pytest.raises(ValueError):
            Dataset(np.array([[1.5]]), np.array([0]))

    def test_label_count(self):
        with pytest.raises(ValueError):
            Dataset(np.zeros((2, 1)), np.array([0]))

    def test_empty(self):
        with pytest.raises(ValueError):
            Dataset(np.zeros((0, 2)), np.zeros(0, int))

    def test_immutable(self):
        tr, _ = xor_dataset()
        with pytest.raises(ValueError):
            tr.features[0, 0] = 0.5

    def test_targets(self):
        ds = Dataset(np.zeros((3, 1)), np.array([0, 2, 1]), n_classes=3)
        assert np.array_equal(ds.targets(3), np.eye(3)[[0, 2, 1]])
        with pytest.raises(ValueError):
            ds.targets(1)
