"""Root test for membership in the stability region and critical controls.

A rate vector ``x`` belongs to the region exactly when

    f(delta, x) = prod_i (1 + x_i * delta) - delta

has a positive root. ``f`` is convex on ``[0, inf)`` with ``f(0) = 1``, so it
has zero, one (tangent) or two positive roots. Each root maps to a critical
control through ``p_i = delta*x_i / (1 + delta*x_i)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import DEFAULT_TOL, as_vector, on_simplex_facet, pi_of_p, x_of_p
from .errors import NonConvergence, NotOnFacet

BOUNDARY_TOL = 1e-10
ZERO_RATE = 1e-15
UNIT_MATCH = 1e-12
MAX_NEWTON = 200
MAX_BISECT = 200


class MembershipClass(enum.Enum):
    EXTERIOR = "Exterior"
    BOUNDARY = "Boundary"
    INTERIOR = "Interior"


@dataclass(frozen=True)
class MembershipReport:
    cls: MembershipClass
    roots: tuple[float, ...] = ()
    controls: tuple[np.ndarray, ...] = ()
    reduced_dims: tuple[int, ...] = ()
    special_unit_vector: int | None = None
    tol: float = BOUNDARY_TOL

    @property
    def is_member(self) -> bool:
        return self.cls is not MembershipClass.EXTERIOR

    @property
    def p_s(self) -> np.ndarray | None:
        if self.cls is MembershipClass.INTERIOR and self.controls:
            return self.controls[0]
        return None

    @property
    def p_l(self) -> np.ndarray | None:
        if self.cls is MembershipClass.INTERIOR and len(self.controls) == 2:
            return self.controls[1]
        return None

    @property
    def p_u(self) -> np.ndarray | None:
        if self.cls is MembershipClass.BOUNDARY:
            return self.controls[0]
        return None


def eval_f(delta: float, x) -> float:
    return math.prod(1.0 + xi * delta for xi in as_vector(x).tolist()) - delta


def eval_g(t_pi: float, p) -> float:
    return math.prod(1.0 + pi * t_pi for pi in as_vector(p).tolist()) - (1.0 + t_pi)


# -- scalar helpers over plain float lists ---------------------------------

def _prod_family(v: list[float], t: float):
    """Value, first and second derivative of prod(1 + v_i t) in t."""
    terms = [1.0 + vi * t for vi in v]
    prod = math.prod(terms)
    ratios = [vi / ti for vi, ti in zip(v, terms)]
    s1 = sum(ratios)
    s2 = sum(r * r for r in ratios)
    return prod, prod * s1, prod * (s1 * s1 - s2)


def _newton_min(d1: Callable[[float], float], d2: Callable[[float], float],
                lo: float, hi: float, start: float) -> float:
    """Zero of an increasing derivative ``d1`` inside ``(lo, hi)``.

    Newton steps are kept inside the current bracket; a step that leaves it is
    replaced by the midpoint.
    """
    t = start if lo < start < hi else 0.5 * (lo + hi)
    for _ in range(MAX_NEWTON):
        g = d1(t)
        if g == 0.0:
            return t
        if g < 0.0:
            lo = t
        else:
            hi = t
        h = d2(t)
        nxt = t - g / h if h > 0.0 else 0.5 * (lo + hi)
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - t) <= 1e-15 * max(1.0, abs(t)) or hi - lo <= 4e-16 * max(1.0, abs(t)):
            return nxt
        t = nxt
    raise NonConvergence("minimizer search exceeded the Newton budget")


def _bisect(fun: Callable[[float], float], lo: float, hi: float) -> float:
    """Root of ``fun`` in ``[lo, hi]`` assuming a sign change."""
    flo = fun(lo)
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            return mid
        fm = fun(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    raise NonConvergence("bisection exceeded its budget")


def _grow(fun: Callable[[float], float], start: float) -> float:
    """Double ``start`` until ``fun`` turns positive."""
    t = start
    for _ in range(MAX_NEWTON):
        if fun(t) > 0.0:
            return t
        t *= 2.0
    raise NonConvergence("could not bracket a sign change")


def _polish(fun, dfun, t: float, steps: int = 3) -> float:
    best, fbest = t, abs(fun(t))
    for _ in range(steps):
        d = dfun(best)
        if d == 0.0 or fbest == 0.0:
            break
        cand = best - fun(best) / d
        fc = abs(fun(cand))
        if not fc < fbest:
            break
        best, fbest = cand, fc
    return best


def _f_minimizer(x: list[float]) -> float:
    """Location of the minimum of f(., x) on [0, inf)."""
    if sum(x) >= 1.0:
        return 0.0

    def d1(d):
        return _prod_family(x, d)[1] - 1.0

    def d2(d):
        return _prod_family(x, d)[2]

    lo, hi = 0.0, 1.0
    for _ in range(MAX_NEWTON):
        if d1(hi) > 0.0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NonConvergence("could not bracket the minimizer of f")
    return _newton_min(d1, d2, lo, hi, 1.0)


def find_positive_roots(x, tol: float = BOUNDARY_TOL) -> list[float]:
    """Positive roots of f(., x), ascending.

    ``x`` must have at least two entries, all strictly positive, and must not
    be a unit vector; :func:`classify` takes care of those cases.
    """
    xs = [float(v) for v in as_vector(x)]
    if len(xs) < 2 or min(xs) <= 0.0:
        raise ValueError("find_positive_roots needs >= 2 strictly positive rates")

    def f(d):
        return math.prod(1.0 + v * d for v in xs) - d

    def df(d):
        return _prod_family(xs, d)[1] - 1.0

    d_star = _f_minimizer(xs)
    f_min = f(d_star)
    if f_min > tol:
        return []
    if f_min >= -tol:
        return [d_star]
    left = _polish(f, df, _bisect(f, 0.0, d_star))
    hi = _grow(f, 2.0 * d_star)
    right = _polish(f, df, _bisect(f, d_star, hi))
    return [left, right]


def _embed(p_red: np.ndarray, keep: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n)
    out[keep] = p_red
    return out


def classify(x, tol: float = BOUNDARY_TOL) -> MembershipReport:
    """Classify ``x`` as exterior, boundary or interior point of the region.

    Zero entries (below 1e-15) are dropped before the root test and the
    returned controls carry zeros there. A unit vector ``e_i`` is a boundary
    point with control ``e_i`` and no finite root. A vector with a single
    positive entry ``a < 1`` is interior with the single control ``a*e_i``.
    """
    x = as_vector(x)
    if x.ndim != 1:
        raise ValueError("classify expects a single rate vector")
    if np.any(x < 0.0) or not np.all(np.isfinite(x)):
        raise ValueError("rates must be finite and non-negative")
    n = x.size
    keep = x >= ZERO_RATE
    reduced = tuple(int(i) for i in np.flatnonzero(~keep))

    for i in range(n):
        if abs(x[i] - 1.0) <= UNIT_MATCH and np.all(np.abs(np.delete(x, i)) <= UNIT_MATCH):
            e = np.zeros(n)
            e[i] = 1.0
            return MembershipReport(MembershipClass.BOUNDARY, (), (e,), reduced, i, tol)

    xr = x[keep]
    if xr.size == 0:
        return MembershipReport(MembershipClass.INTERIOR, (), (np.zeros(n),), reduced, None, tol)
    if np.any(xr >= 1.0):
        return MembershipReport(MembershipClass.EXTERIOR, (), (), reduced, None, tol)
    if xr.size == 1:
        a = float(xr[0])
        return MembershipReport(MembershipClass.INTERIOR, (1.0 / (1.0 - a),),
                                (_embed(xr.copy(), keep, n),), reduced, None, tol)

    roots = find_positive_roots(xr, tol)
    controls = tuple(_embed(_p_of(d, xr), keep, n) for d in roots)
    cls = (MembershipClass.EXTERIOR, MembershipClass.BOUNDARY, MembershipClass.INTERIOR)[len(roots)]
    return MembershipReport(cls, tuple(roots), controls, reduced, None, tol)


def _p_of(delta: float, x: np.ndarray) -> np.ndarray:
    dx = delta * x
    return dx / (1.0 + dx)


def transfer_root(p, tol: float = DEFAULT_TOL) -> float | None:
    """Second positive root of f reached from the critical control ``p``.

    Solves g(t, p) = 0 for its nonzero root t' and returns (1 + t') / pi(p).
    Returns ``None`` when sum(p) = 1 within ``tol`` (tangent case) or when
    fewer than two entries of ``p`` are positive (no second root exists).
    """
    p = as_vector(p)
    if np.any(p < 0.0) or np.any(p >= 1.0):
        raise ValueError("p must lie in [0, 1)^n")
    s = float(p.sum())
    if abs(s - 1.0) <= tol:
        return None
    pv = [float(v) for v in p if v > 0.0]
    if len(pv) < 2:
        return None
    pi = float(pi_of_p(p))

    def g(t):
        return math.prod(1.0 + v * t for v in pv) - (1.0 + t)

    def d1(t):
        return _prod_family(pv, t)[1] - 1.0

    def d2(t):
        return _prod_family(pv, t)[2]

    if s < 1.0:
        hi = 1.0
        for _ in range(MAX_NEWTON):
            if d1(hi) > 0.0:
                break
            hi *= 2.0
        else:
            raise NonConvergence("could not bracket the minimizer of g")
        t_star = _newton_min(d1, d2, 0.0, hi, 0.5 * hi)
        t_root = _bisect(g, t_star, _grow(g, 2.0 * t_star))
    else:
        t_star = _newton_min(d1, d2, -1.0, 0.0, -0.5)
        t_root = _bisect(g, -1.0, t_star)
    t_root = _polish(g, d1, t_root)
    return (1.0 + t_root) / pi


def boundary_point(p, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Map a point of the probability facet onto the region boundary."""
    p = as_vector(p)
    if not on_simplex_facet(p, tol):
        raise NotOnFacet(f"sum(p) = {p.sum()!r} is not 1 within {tol}")
    return x_of_p(p)


def in_lambda(x, tol: float = BOUNDARY_TOL) -> np.ndarray | bool:
    """Vectorised membership test for many rate vectors at once.

    Equivalent to ``classify(x).is_member`` but evaluated along the last
    axis. The minimiser of f sits where sum_i p_i(delta, x) = 1, which is
    located by bisection in log(delta) for all rows simultaneously.
    """
    x = as_vector(x)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    n = X.shape[1]
    s = X.sum(axis=1)
    nonneg = np.all(X >= 0.0, axis=1)
    out = np.zeros(X.shape[0], dtype=bool)
    if n == 1:
        out = nonneg & (s <= 1.0)
        return bool(out[0]) if single else out

    top2 = -np.partition(-X, 1, axis=1)[:, :2]
    x2 = top2[:, 1]
    # at most one positive entry: member iff that entry is at most one
    sparse = nonneg & (x2 < ZERO_RATE)
    out[sparse] = top2[sparse, 0] <= 1.0 + UNIT_MATCH
    work = nonneg & ~sparse & (s < 1.0)
    idx = np.flatnonzero(work)
    if idx.size:
        Xw = X[idx]
        lo = -np.log(s[idx])
        hi = -np.log(x2[idx])
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            dx = np.exp(mid)[:, None] * Xw
            up = (dx / (1.0 + dx)).sum(axis=1) > 1.0
            hi = np.where(up, mid, hi)
            lo = np.where(up, lo, mid)
        u = 0.5 * (lo + hi)
        d = np.exp(u)
        h = np.log1p(d[:, None] * Xw).sum(axis=1) - u
        out[idx] = d * np.expm1(h) <= tol
    return bool(out[0]) if single else out
