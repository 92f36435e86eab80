"""Exact vector primitives underlying every similarity metric.

All functions accept any sequence of floats (lists, tuples, numpy arrays)
and are pure; they never mutate their inputs.
"""

import numpy as np

from .errors import DimensionMismatch, EmptyInput, ZeroVector


def as_vector(v) -> np.ndarray:
    """Coerce to a float64 1-D array without copying when possible."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionMismatch(f"expected a nonempty 1-D vector, got shape {arr.shape}")
    return arr


def l2_norm(u) -> float:
    """Euclidean norm; 0.0 only for the all-zero vector."""
    return float(np.linalg.norm(as_vector(u)))


def cosine(u, v) -> float:
    """Cosine similarity in [-1, 1].

    Raises DimensionMismatch when lengths differ and ZeroVector when either
    input has zero norm (a zero embedding indicates corrupt input; callers
    that tolerate it convert the error to a missing value). The quotient is
    clamped to [-1, 1] because rounding can push it past the bound by ~1e-16
    and downstream code assumes the closed interval.
    """
    a = as_vector(u)
    b = as_vector(v)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"cosine: dims differ ({a.shape[0]} vs {b.shape[0]})")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine: zero-norm input")
    c = float(np.dot(a, b) / (na * nb))
    return min(1.0, max(-1.0, c))


def mean_vector(vs) -> np.ndarray:
    """Elementwise arithmetic mean of a nonempty sequence of same-dim vectors."""
    vs = list(vs)
    if not vs:
        raise EmptyInput("mean_vector: empty sequence")
    arrs = [as_vector(v) for v in vs]
    dim = arrs[0].shape[0]
    for a in arrs[1:]:
        if a.shape[0] != dim:
            raise DimensionMismatch(f"mean_vector: dims differ ({dim} vs {a.shape[0]})")
    return np.mean(arrs, axis=0)
