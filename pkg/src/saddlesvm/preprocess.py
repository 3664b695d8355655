"""Data conditioning: norm scaling, random signs, and the normalized
fast Walsh-Hadamard transform.

The combined transform (scale, zero-pad to a power of two, flip signs,
orthonormal Hadamard) is an isometry on the scaled data, so polytope
distances and margins are unchanged; it only spreads mass evenly across
coordinates so that uniform coordinate sampling works well.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .data_model import Dataset, split_classes
from .errors import NumericalError
from .rng import TRANSFORM, substream


def next_pow2(d: int) -> int:
    p = 1
    while p < d:
        p *= 2
    return p


@dataclass(frozen=True)
class TransformSpec:
    """Everything needed to apply the same transform to new points."""

    seed: int
    d_pad: int
    scale: float
    signs: np.ndarray  # length d_pad, entries +-1


@dataclass(frozen=True)
class TransformedData:
    Xp: np.ndarray  # d_pad x n1, C-order (rows contiguous)
    Xm: np.ndarray  # d_pad x n2
    spec: TransformSpec


def compute_scale(data: Dataset) -> float:
    """1 / max point norm, so every scaled point has norm <= 1."""
    max_norm = float(np.linalg.norm(data.X, axis=1).max())
    if max_norm == 0.0:
        raise NumericalError("all points are zero; geometry is degenerate")
    return 1.0 / max_norm


def fwht_normalized(v: np.ndarray) -> np.ndarray:
    """(1/sqrt(n)) H v for the Sylvester Hadamard matrix H; an involution."""
    n = v.shape[0]
    if n & (n - 1) or n == 0:
        raise ValueError("length must be a power of two")
    out = np.ascontiguousarray(v, dtype=np.float64).copy()
    kernels.fwht_inplace(out)
    out *= 1.0 / np.sqrt(n)
    return out


def _transform_columns(cols: np.ndarray, spec: TransformSpec) -> np.ndarray:
    """Scale, pad, sign-flip, and Hadamard-transform a d x m column block."""
    d, m = cols.shape
    padded = np.zeros((spec.d_pad, m))
    padded[:d, :] = cols * spec.scale
    padded *= spec.signs[:, None]
    inv_sqrt = 1.0 / np.sqrt(spec.d_pad)
    for j in range(m):
        col = np.ascontiguousarray(padded[:, j])
        kernels.fwht_inplace(col)
        padded[:, j] = col
    padded *= inv_sqrt
    return np.ascontiguousarray(padded)


def apply_transform(data: Dataset, seed: int) -> TransformedData:
    """Algorithm-1 conditioning of a dataset, deterministic given the seed."""
    scale = compute_scale(data)
    d_pad = next_pow2(data.d)
    rng = substream(seed, TRANSFORM)
    signs = (rng.integers(0, 2, size=d_pad) * 2 - 1).astype(np.float64)
    spec = TransformSpec(seed=seed, d_pad=d_pad, scale=scale, signs=signs)
    mats = split_classes(data)
    return TransformedData(
        Xp=_transform_columns(mats.A, spec),
        Xm=_transform_columns(mats.B, spec),
        spec=spec,
    )


def transform_points(spec: TransformSpec, X: np.ndarray) -> np.ndarray:
    """Apply a fitted transform to new points (rows); returns n x d_pad."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] > spec.d_pad:
        raise ValueError("points have more features than the fitted transform")
    return _transform_columns(X.T, spec).T
