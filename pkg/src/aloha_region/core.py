"""Contention/rate maps, simplex predicates and shared constants.

Vectors are float64 numpy arrays. Most maps also accept a stack of vectors
with shape ``(k, n)`` and operate along the last axis.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-12


def as_vector(v) -> np.ndarray:
    return np.asarray(v, dtype=np.float64)


def m_of_n(n: int) -> float:
    """Component value of the all-rates-equal boundary point."""
    if n < 1:
        raise ValueError("n must be positive")
    return (1.0 / n) * (1.0 - 1.0 / n) ** (n - 1)


@dataclass(frozen=True)
class ModelConstants:
    n: int
    m: float = field(init=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        object.__setattr__(self, "m", m_of_n(self.n))


def pi_of_p(p) -> float | np.ndarray:
    """Product of complements, prod(1 - p_i)."""
    return np.prod(1.0 - as_vector(p), axis=-1)


def x_of_p(p) -> np.ndarray:
    """Service rates x_i = p_i * prod_{j != i} (1 - p_j).

    Computed with leave-one-out products so that p_i = 1 is handled exactly.
    """
    p = as_vector(p)
    q = 1.0 - p
    n = p.shape[-1]
    # prefix/suffix products avoid dividing by (1 - p_i)
    left = np.ones_like(p)
    right = np.ones_like(p)
    for i in range(1, n):
        left[..., i] = left[..., i - 1] * q[..., i - 1]
        right[..., n - 1 - i] = right[..., n - i] * q[..., n - i]
    return p * left * right


def p_of_delta(delta: float, x) -> np.ndarray:
    """Contention vector delta*x_i / (1 + delta*x_i)."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    dx = float(delta) * as_vector(x)
    return dx / (1.0 + dx)


def in_simplex(x) -> bool | np.ndarray:
    """Closed standard simplex test: x >= 0 and sum(x) <= 1."""
    x = as_vector(x)
    out = np.all(x >= 0.0, axis=-1) & (np.sum(x, axis=-1) <= 1.0)
    return bool(out) if np.ndim(out) == 0 else out


def on_simplex_facet(p, tol: float = DEFAULT_TOL) -> bool | np.ndarray:
    """True when the entries of p sum to one within ``tol``."""
    out = np.abs(np.sum(as_vector(p), axis=-1) - 1.0) <= tol
    return bool(out) if np.ndim(out) == 0 else out


def unit_vector(n: int, i: int) -> np.ndarray:
    e = np.zeros(n)
    e[i] = 1.0
    return e
