"""Regenerate tests/data/iris.libsvm from scikit-learn's bundled iris data.

Setosa is the negative class (50 points); versicolor and virginica are
pooled as the positive class (100 points).  Features are min-max scaled
to [-1, 1] per dimension, matching the common "iris.scale" convention.
"""
import os
import sys

import numpy as np
from sklearn.datasets import load_iris

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))
from saddlesvm.data_model import Dataset, serialize_libsvm  # noqa: E402


def main() -> None:
    iris = load_iris()
    X = iris.data.astype(np.float64)
    lo, hi = X.min(axis=0), X.max(axis=0)
    X = -1.0 + 2.0 * (X - lo) / (hi - lo)
    y = np.where(iris.target == 0, -1, 1)
    out = os.path.join(os.path.dirname(__file__), "..", "tests", "data", "iris.libsvm")
    with open(out, "w") as fh:
        fh.write(serialize_libsvm(Dataset(X, y)))
    print(f"wrote {out}: n={len(y)}, d={X.shape[1]}")


if __name__ == "__main__":
    main()
