"""Labeled point clouds, LIBSVM text parsing, and per-class matrices.

Points are stored densely: one row per point, one column per feature.
Sparse LIBSVM input is densified at parse time since the downstream
Hadamard transform densifies everything anyway.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class LabeledPoint:
    """A single point with a binary label in {+1, -1}."""

    features: np.ndarray
    label: int


class Dataset:
    """An ordered collection of labeled points with both classes present.

    Attributes
    ----------
    X : (n, d) float64 array, one point per row.
    labels : (n,) int array with entries in {+1, -1}.
    """

    def __init__(self, X, labels):
        X = np.ascontiguousarray(X, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.int64)
        if X.ndim != 2:
            raise DataError("feature matrix must be 2-d (points x features)")
        if labels.shape != (X.shape[0],):
            raise DataError("label count does not match point count")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain NaN or Inf")
        if not np.all(np.isin(labels, (-1, 1))):
            raise DataError("labels must be +1 or -1")
        self.X = X
        self.labels = labels
        self.n1 = int(np.count_nonzero(labels == 1))
        self.n2 = int(np.count_nonzero(labels == -1))
        if self.n1 == 0 or self.n2 == 0:
            raise DataError("both classes must be present (n1 >= 1 and n2 >= 1)")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def points(self) -> list[LabeledPoint]:
        return [LabeledPoint(self.X[i], int(self.labels[i])) for i in range(self.n)]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self.X, other.X) and np.array_equal(
            self.labels, other.labels
        )

    def __repr__(self):
        return f"Dataset(n={self.n}, d={self.d}, n1={self.n1}, n2={self.n2})"


@dataclass(frozen=True)
class ClassMatrices:
    """Column-per-point matrices A (+1 points) and B (-1 points)."""

    A: np.ndarray  # d x n1
    B: np.ndarray  # d x n2


_CANONICAL_LABELS = {"+1": 1, "1": 1, "-1": -1}
# Some LIBSVM files use {0, 1} or {1, 2}; mapping them is opt-in.
_OTHER_LABELS = {"0": -1, "2": -1, "0.0": -1, "2.0": -1}


def parse_libsvm(text: str, *, map_other_labels: bool = False,
                 min_dim: int | None = None) -> Dataset:
    """Parse LIBSVM-format text into a Dataset.

    Each nonempty line is ``<label> <idx>:<val> ...`` with 1-based,
    strictly increasing indices.  The dimension is the maximum index seen,
    or ``min_dim`` if that is larger (zero-padded).  Labels other than
    +1/-1 are rejected unless ``map_other_labels`` is set, in which case
    "0" and "2" map to -1.
    """
    rows = []
    labels = []
    max_idx = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tok = parts[0]
        label = _CANONICAL_LABELS.get(tok)
        if label is None and tok in ("+1.0", "1.0", "-1.0"):
            label = 1 if tok.lstrip("+").startswith("1") else -1
        if label is None and map_other_labels:
            label = _OTHER_LABELS.get(tok)
        if label is None:
            raise DataError(f"line {lineno}: unrecognized label {tok!r}")
        entries = []
        prev_idx = 0
        for item in parts[1:]:
            try:
                idx_s, val_s = item.split(":", 1)
                idx = int(idx_s)
                val = float(val_s)
            except ValueError as exc:
                raise DataError(f"line {lineno}: malformed entry {item!r}") from exc
            if idx <= prev_idx:
                raise DataError(
                    f"line {lineno}: indices must be 1-based and strictly increasing"
                )
            prev_idx = idx
            entries.append((idx, val))
        max_idx = max(max_idx, prev_idx)
        rows.append(entries)
        labels.append(label)
    if not rows:
        raise DataError("no data lines found")
    d = max(max_idx, min_dim or 0)
    if d == 0:
        raise DataError("no feature indices found")
    X = np.zeros((len(rows), d))
    for i, entries in enumerate(rows):
        for idx, val in entries:
            X[i, idx - 1] = val
    return Dataset(X, labels)


def load_libsvm(path, **kwargs) -> Dataset:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_libsvm(fh.read(), **kwargs)


def serialize_libsvm(data: Dataset) -> str:
    """Render a Dataset back to LIBSVM text.

    Zero entries are omitted, except that the last dimension is pinned on
    the first line if no point uses it, so re-parsing recovers the same d.
    """
    lines = []
    seen_last_dim = bool(np.any(data.X[:, -1] != 0.0))
    for i in range(data.n):
        label = "+1" if data.labels[i] == 1 else "-1"
        feats = [
            f"{j + 1}:{float(data.X[i, j])!r}"
            for j in range(data.d)
            if data.X[i, j] != 0.0
        ]
        if i == 0 and not seen_last_dim:
            feats.append(f"{data.d}:0.0")
        lines.append(" ".join([label] + feats))
    return "\n".join(lines) + "\n"


def split_classes(data: Dataset) -> ClassMatrices:
    """Split into column-per-point matrices, preserving input order."""
    A = np.ascontiguousarray(data.X[data.labels == 1].T)
    B = np.ascontiguousarray(data.X[data.labels == -1].T)
    return ClassMatrices(A=A, B=B)
