import os

import numpy as np
import pytest

from saddlesvm.data_model import (Dataset, load_libsvm, parse_libsvm,
                                  serialize_libsvm, split_classes)
from saddlesvm.errors import DataError

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def test_parse_sparse_line_semantics():
    # "+1 1:0.5 3:-2.0" denotes the point [0.5, 0, -2.0] with label +1, d=3.
    data = parse_libsvm("+1 1:0.5 3:-2.0\n-1 1:1")
    assert data.n == 2 and data.d == 3
    assert np.allclose(data.X[0], [0.5, 0.0, -2.0])
    assert data.labels[0] == 1


def test_parse_two_classes():
    data = parse_libsvm("+1 1:1\n-1 1:-1")
    assert (data.n1, data.n2, data.d) == (1, 1, 1)


def test_parse_label_variants():
    data = parse_libsvm("1 1:1\n+1.0 1:1\n-1 1:1\n-1.0 1:1")
    assert list(data.labels) == [1, 1, -1, -1]


def test_parse_rejects_other_labels_by_default():
    with pytest.raises(DataError):
        parse_libsvm("2 1:1\n1 1:1")


def test_parse_maps_other_labels_behind_flag():
    data = parse_libsvm("2 1:1\n1 1:2", map_other_labels=True)
    assert list(data.labels) == [-1, 1]


def test_parse_rejects_non_increasing_indices():
    with pytest.raises(DataError) as exc:
        parse_libsvm("+1 2:1 2:2\n-1 1:1")
    assert "line 1" in str(exc.value)


def test_parse_rejects_garbage_with_line_number():
    with pytest.raises(DataError) as exc:
        parse_libsvm("+1 1:1\n-1 one:two")
    assert "line 2" in str(exc.value)


def test_parse_requires_both_classes():
    with pytest.raises(DataError):
        parse_libsvm("+1 1:1\n+1 1:2")


def test_min_dim_pads_features():
    data = parse_libsvm("+1 1:1\n-1 1:-1", min_dim=5)
    assert data.d == 5


def test_round_trip():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(7, 5))
    X[rng.random(size=X.shape) < 0.4] = 0.0
    y = np.array([1, 1, -1, 1, -1, -1, 1])
    data = Dataset(X, y)
    again = parse_libsvm(serialize_libsvm(data))
    assert data == again


def test_split_classes_columns():
    data = parse_libsvm("+1 1:1 2:0\n-1 1:-1 2:0")
    mats = split_classes(data)
    assert mats.A.shape == (2, 1) and mats.B.shape == (2, 1)
    assert np.allclose(mats.A[:, 0], [1, 0])
    assert np.allclose(mats.B[:, 0], [-1, 0])


def test_iris_fixture_shapes():
    data = load_libsvm(os.path.join(DATA_DIR, "iris.libsvm"))
    assert (data.n, data.d) == (150, 4)
    assert (data.n1, data.n2) == (100, 50)
    mats = split_classes(data)
    assert mats.A.shape == (4, 100) and mats.B.shape == (4, 50)


def test_dataset_validation():
    with pytest.raises(DataError):
        Dataset(np.array([[np.nan]]), np.array([1]))
    with pytest.raises(DataError):
        Dataset(np.array([[1.0], [2.0]]), np.array([1, 3]))
