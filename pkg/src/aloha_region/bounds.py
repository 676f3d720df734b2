"""Explicit inner and outer bounds on the stability region.

Every membership predicate works on a single vector or on a stack of
vectors (last axis = coordinates) and uses closed sets, so points on a
bounding surface count as members.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, as_vector, m_of_n, on_simplex_facet, pi_of_p
from .errors import InvalidCenter, NotOnFacet, OutOfExtent


class Kind(enum.Enum):
    INNER = "Inner"
    OUTER = "Outer"


def _ret(out):
    return bool(out) if np.ndim(out) == 0 else out


def _in_s(x: np.ndarray) -> np.ndarray:
    return np.all(x >= 0.0, axis=-1) & (np.sum(x, axis=-1) <= 1.0)


# -- square-root sum and tangent planes -------------------------------------

def in_srs(x):
    x = as_vector(x)
    return _ret(np.all(x >= 0.0, axis=-1) & (np.sum(np.sqrt(np.abs(x)), axis=-1) <= 1.0 + DEFAULT_TOL))


def tangent_hyperplane(p, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """Supporting plane of the region at the boundary point generated by ``p``."""
    p = as_vector(p)
    if not on_simplex_facet(p, tol):
        raise NotOnFacet(f"sum(p) = {p.sum()!r}")
    return 1.0 - p, float(pi_of_p(p))


def in_pi(x, p, tol: float = DEFAULT_TOL):
    normal, disp = tangent_hyperplane(p, tol)
    x = as_vector(x)
    return _ret(np.all(x >= 0.0, axis=-1) & (x @ normal <= disp + tol))


def pi_star_level(n: int) -> float:
    return (1.0 - 1.0 / n) ** (n - 1)


def in_pi_star(x, tol: float = DEFAULT_TOL):
    x = as_vector(x)
    n = x.shape[-1]
    return _ret(np.all(x >= 0.0, axis=-1) & (np.sum(x, axis=-1) <= pi_star_level(n) + tol))


# -- polytope ---------------------------------------------------------------

@dataclass(frozen=True)
class PolytopeP:
    n: int

    @property
    def alpha(self) -> float:
        return alpha_of_n(self.n)


def alpha_of_n(n: int) -> float:
    return (n - 1) / (1.0 / m_of_n(n) - 1.0)


def polytope_vertices(P: PolytopeP | int, permutations: bool = True) -> list[np.ndarray]:
    """Vertices of the polytope enclosed by the region's complement.

    With ``permutations=False`` only the sorted-descending representatives
    ``(1 + (k-1)/alpha)^-1 * (e_1 + ... + e_k)`` for k = 1..n are returned.
    """
    if isinstance(P, int):
        P = PolytopeP(P)
    n, a = P.n, P.alpha
    reps = []
    for k in range(1, n + 1):
        v = np.zeros(n)
        v[:k] = 1.0 / (1.0 + (k - 1) / a)
        reps.append(v)
    if not permutations:
        return reps
    out = []
    for k, v in enumerate(reps, start=1):
        for support in itertools.combinations(range(n), k):
            w = np.zeros(n)
            w[list(support)] = v[0]
            out.append(w)
    return out


def in_po(x, tol: float = DEFAULT_TOL):
    """Simplex minus the open polytope.

    A point is strictly inside the polytope when all of its halfspace
    inequalities hold with slack larger than ``tol`` and all coordinates are
    positive; everything else in the simplex is a member.
    """
    x = as_vector(x)
    n = x.shape[-1]
    a = alpha_of_n(n)
    s = np.sum(x, axis=-1, keepdims=True)
    h = x + (s - x) / a
    inside = np.all(h > 1.0 + tol, axis=-1) & (s[..., 0] < 1.0 - tol) & np.all(x > 0.0, axis=-1)
    return _ret(_in_s(x) & ~inside)


# -- spheres ----------------------------------------------------------------

@dataclass(frozen=True)
class SphereParams:
    n: int
    c: float
    r: float
    kind: Kind


def c_in_star(n: int) -> float:
    m = m_of_n(n)
    return (1.0 - n * m * m) / (2.0 * (1.0 - n * m))


def sphere_params(n: int, c: float | None = None, kind: Kind | str = Kind.INNER,
                  tol: float = DEFAULT_TOL) -> SphereParams:
    """Sphere centred at c*1; the default centre is the family optimum."""
    kind = Kind(kind) if isinstance(kind, str) else kind
    if kind is Kind.INNER:
        lo = c_in_star(n)
        c = lo if c is None else float(c)
        if c < lo - tol:
            raise InvalidCenter(f"inner sphere needs c >= {lo!r}, got {c!r}")
        r = math.sqrt(n) * (c - m_of_n(n))
    else:
        c = 1.0 if c is None else float(c)
        if c < 1.0 - tol:
            raise InvalidCenter(f"outer sphere needs c >= 1, got {c!r}")
        r = math.sqrt((c - 1.0) ** 2 + (n - 1) * c * c)
    return SphereParams(n, c, r, kind)


def in_sphere_bound(x, params: SphereParams, tol: float = DEFAULT_TOL):
    x = as_vector(x)
    d = np.sqrt(np.sum((x - params.c) ** 2, axis=-1))
    return _ret(_in_s(x) & (d >= params.r - tol))


def in_si_star(x, tol: float = DEFAULT_TOL):
    x = as_vector(x)
    return in_sphere_bound(x, sphere_params(x.shape[-1], None, Kind.INNER), tol)


def in_so_star(x, tol: float = DEFAULT_TOL):
    x = as_vector(x)
    return in_sphere_bound(x, sphere_params(x.shape[-1], None, Kind.OUTER), tol)


# -- invariant ellipsoids ---------------------------------------------------

@dataclass(frozen=True)
class EllipsoidParams:
    n: int
    c: float
    a1: float
    a2: float
    kind: Kind


def ellipsoid_params(n: int, c: float, kind: Kind | str) -> EllipsoidParams:
    kind = Kind(kind) if isinstance(kind, str) else kind
    c = float(c)
    if not c > 1.0 / n:
        raise InvalidCenter(f"ellipsoid centre must exceed 1/n = {1.0 / n!r}, got {c!r}")
    if kind is Kind.OUTER:
        a1 = math.sqrt((n * c - 1.0) * c)
        a2 = math.sqrt((n - 1) * c)
    else:
        a1 = math.sqrt(n) * (c - m_of_n(n))
        den = n * a1 * a1 - (n * c - 1.0) ** 2
        if not den > 0.0:
            raise InvalidCenter(f"inner ellipsoid undefined at c={c!r}")
        a2 = math.sqrt((n - 1) * a1 * a1 / den)
    return EllipsoidParams(n, c, a1, a2, kind)


def quad_form(x, E: EllipsoidParams):
    """Ellipsoid quadratic form; values below one lie inside the open ellipsoid."""
    x = as_vector(x)
    n = x.shape[-1]
    s1 = np.sum(x, axis=-1)
    s2 = np.sum(x * x, axis=-1)
    val = (s1 - n * E.c) ** 2 / (n * E.a1 ** 2) + (s2 - s1 * s1 / n) / E.a2 ** 2
    return float(val) if np.ndim(val) == 0 else val


def _in_ellipsoid_bound(x, c, kind, tol):
    x = as_vector(x)
    E = ellipsoid_params(x.shape[-1], c, kind)
    return _ret(_in_s(x) & (quad_form(x, E) >= 1.0 - tol))


def in_ei(x, c: float = 2.0, tol: float = DEFAULT_TOL):
    return _in_ellipsoid_bound(x, c, Kind.INNER, tol)


def in_eo(x, c: float = 2.0, tol: float = DEFAULT_TOL):
    return _in_ellipsoid_bound(x, c, Kind.OUTER, tol)


def rotation_matrix_q(n: int) -> np.ndarray:
    """Orthogonal matrix whose first column is 1/sqrt(n) * ones."""
    if n < 2:
        raise ValueError("n must be at least 2")
    rn = math.sqrt(n)
    Q = np.full((n, n), -1.0 / rn + 1.0 / (1.0 + rn))
    Q[:, 0] = 1.0 / rn
    Q[0, 1:] = -1.0 / rn
    idx = np.arange(1, n)
    Q[idx, idx] = 1.0 - 1.0 / rn + 1.0 / (1.0 + rn)
    return Q


def cross_section_radius_sq(E: EllipsoidParams, x1: float, tol: float = DEFAULT_TOL) -> float:
    """Squared radius of the ellipsoid slice at height ``x1`` along the 1-axis."""
    u = (x1 - math.sqrt(E.n) * (E.c - 1.0 / E.n)) / E.a1
    val = 1.0 - u * u
    if val < -tol:
        raise OutOfExtent(f"height {x1!r} lies outside the ellipsoid")
    return E.a2 ** 2 * max(val, 0.0)


# -- Schur test function ----------------------------------------------------

def _tilde_f(p: np.ndarray, E: EllipsoidParams) -> float:
    n = p.shape[-1]
    g = (n - 1) ** 2 / n * E.a1 ** 2 + (-1.0 / n + float(np.sum(p * p))) * E.a2 ** 2
    return math.sqrt(max(g, 0.0)) + float(pi_of_p(p))


def schur_tilde_f(p, E: EllipsoidParams, tol: float = DEFAULT_TOL) -> float:
    p = as_vector(p)
    if not on_simplex_facet(p, tol):
        raise NotOnFacet(f"sum(p) = {p.sum()!r}")
    return _tilde_f(p, E)


def schur_condition(p, E: EllipsoidParams, k: int, l: int, h: float = 1e-6,
                    tol: float = DEFAULT_TOL) -> float:
    """(p_k - p_l) times the directional derivative of f~ along e_k - e_l.

    The derivative is a central difference; the direction keeps the sum of
    ``p`` fixed. The step shrinks if it would leave [0, 1].
    """
    p = as_vector(p).copy()
    if not on_simplex_facet(p, tol):
        raise NotOnFacet(f"sum(p) = {p.sum()!r}")
    step = min(h, p[k], p[l], 1.0 - p[k], 1.0 - p[l])
    if step <= 0.0:
        return 0.0
    d = np.zeros_like(p)
    d[k], d[l] = 1.0, -1.0
    deriv = (_tilde_f(p + step * d, E) - _tilde_f(p - step * d, E)) / (2.0 * step)
    return float((p[k] - p[l]) * deriv)
