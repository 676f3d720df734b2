"""Excess-rate functions, the stabilizing control set and numeric probes.

For fixed rates ``x`` the excess rate of user ``i`` under contention ``p`` is
``f_i(p) = x_i - p_i * prod_{j != i} (1 - p_j)``. The control set ``P(x)``
collects all ``p`` with every excess rate non-positive. The probes below
gather statistical evidence about convexity properties; they report counts
and extremes rather than a verdict.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import as_vector, x_of_p
from .errors import SamplingExhausted
from .membership import MembershipClass, classify

EPS = 1e-3
JITTER = 0.05
JITTER_LEVELS = 5
BUDGET = 100_000
SLACK_TOL = 1e-12
THETAS = tuple(k / 10 for k in range(1, 10))


@dataclass(frozen=True)
class ExcessRateContext:
    x: np.ndarray

    def __post_init__(self):
        x = as_vector(self.x)
        if x.ndim != 1 or np.any(x < 0.0):
            raise ValueError("x must be a non-negative vector")
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.x.size


@dataclass
class ProbeReport:
    kind: str
    trials: int
    violations: int
    checks: int
    attempts: int = 0
    extremes: dict = field(default_factory=dict)


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(index),))))


def excess_rate(ctx: ExcessRateContext, p, i: int) -> float:
    return float(ctx.x[i] - x_of_p(as_vector(p))[i])


def excess_rates(ctx: ExcessRateContext, p) -> np.ndarray:
    """All excess rates; ``p`` may be a stack of controls."""
    return ctx.x - x_of_p(as_vector(p))


def _prod_except(q: np.ndarray, skip: set[int]) -> float:
    return float(np.prod([q[j] for j in range(q.size) if j not in skip]))


def excess_grad(ctx: ExcessRateContext, p, i: int) -> np.ndarray:
    p = as_vector(p)
    q = 1.0 - p
    g = np.empty(p.size)
    for k in range(p.size):
        g[k] = -_prod_except(q, {i}) if k == i else p[i] * _prod_except(q, {i, k})
    return g


def excess_hessian(ctx: ExcessRateContext, p, i: int) -> np.ndarray:
    p = as_vector(p)
    q = 1.0 - p
    n = p.size
    H = np.zeros((n, n))
    for k in range(n):
        for l in range(k + 1, n):
            if i in (k, l):
                other = l if k == i else k
                v = _prod_except(q, {i, other})
            else:
                v = -p[i] * _prod_except(q, {i, k, l})
            H[k, l] = H[l, k] = v
    return H


def in_stabilizing_set(ctx: ExcessRateContext, p, tol: float = SLACK_TOL):
    p = as_vector(p)
    ok = np.all(excess_rates(ctx, p) <= tol, axis=-1) & np.all((p >= 0.0) & (p <= 1.0), axis=-1)
    return bool(ok) if np.ndim(ok) == 0 else ok


def _anchors(ctx: ExcessRateContext) -> list[np.ndarray]:
    rep = classify(ctx.x)
    if rep.cls is not MembershipClass.INTERIOR:
        raise ValueError(f"probe needs an interior rate vector, got {rep.cls.value}")
    return list(rep.controls)


def _draw(rng, n, anchors, accept, batch=256):
    """Rejection sampler: jittered points on the anchor segment, else uniform.

    Each jittered candidate uses a scale JITTER / 4**k with k drawn uniformly
    from 0..JITTER_LEVELS-1, so thin control sets near the boundary still get
    hits without giving up the wider exploration.
    """
    attempts = 0
    while attempts < BUDGET:
        size = min(batch, BUDGET - attempts)
        cand = rng.uniform(EPS, 1.0 - EPS, size=(size, n))
        if anchors:
            near = rng.random(size) < 0.9
            u = rng.random((size, 1))
            base = anchors[0] + u * (anchors[-1] - anchors[0])
            scale = JITTER / 4.0 ** rng.integers(0, JITTER_LEVELS, size=(size, 1))
            jit = base + scale * rng.standard_normal((size, n))
            cand = np.where(near[:, None], np.clip(jit, EPS, 1.0 - EPS), cand)
        ok = np.flatnonzero(accept(cand))
        if ok.size:
            return cand[ok[0]], attempts + int(ok[0]) + 1
        attempts += size
    raise SamplingExhausted(f"no member found in {BUDGET} attempts")


def _segment_probe(kind, ctx, trials, seed, anchors, accept, slack):
    n = ctx.n
    violations = checks = attempts = 0
    worst = -np.inf
    for t in range(trials):
        rng = _rng(seed, t)
        a, k1 = _draw(rng, n, anchors, accept)
        b, k2 = _draw(rng, n, anchors, accept)
        attempts += k1 + k2
        for th in THETAS:
            s = slack(th * a + (1.0 - th) * b)
            worst = max(worst, s)
            checks += 1
            violations += s > SLACK_TOL
    return ProbeReport(kind, trials, violations, checks, attempts, {"max_slack": float(worst)})


def convexity_probe(ctx: ExcessRateContext, trials: int = 1000, seed: int = 0) -> ProbeReport:
    """Convex combinations of random members of P(x) stay in P(x)?"""
    anchors = _anchors(ctx)

    def slack(p):
        return float(np.max(excess_rates(ctx, p)))

    return _segment_probe("convexity", ctx, trials, seed, anchors,
                          lambda c: in_stabilizing_set(ctx, c), slack)


def sublevel_probe(ctx: ExcessRateContext, i: int, alpha_level: float,
                   trials: int = 1000, seed: int = 0) -> ProbeReport:
    """Convex combinations inside the sublevel set {p : f_i(p) <= alpha_level}."""
    try:
        anchors = _anchors(ctx)
    except ValueError:
        anchors = []

    def accept(c):
        return excess_rates(ctx, c)[:, i] <= alpha_level

    def slack(p):
        return float(excess_rates(ctx, p)[i] - alpha_level)

    return _segment_probe("sublevel", ctx, trials, seed, anchors, accept, slack)


def pseudoconvexity_probe(ctx: ExcessRateContext, i: int, trials: int = 1000,
                          seed: int = 0, tol: float = 1e-10) -> ProbeReport:
    """Curvature of f_i along directions orthogonal to its gradient.

    The quadratic form is divided by the Frobenius norm of the Hessian so
    the ``tol`` threshold does not depend on the overall scale of f_i, which
    collapses when several p_j approach one.
    """
    n = ctx.n
    violations = 0
    lo_raw = lo_rel = np.inf
    for t in range(trials):
        rng = _rng(seed, t)
        p = rng.uniform(EPS, 1.0 - EPS, n)
        g = excess_grad(ctx, p, i)
        H = excess_hessian(ctx, p, i)
        q = rng.standard_normal(n)
        q -= (q @ g) / (g @ g) * g
        q /= np.linalg.norm(q)
        val = float(q @ H @ q)
        rel = val / float(np.linalg.norm(H))
        lo_raw, lo_rel = min(lo_raw, val), min(lo_rel, rel)
        violations += not rel > tol
    return ProbeReport("pseudoconvexity", trials, violations, trials, trials,
                       {"min_curvature": float(lo_raw), "min_relative_curvature": float(lo_rel)})


def nonconvexity_witness(n: int = 2, eps_grid=None, i: int = 0) -> list[tuple[float, float]]:
    """Midpoint convexity gaps of f_i between a near-vertex control and the centre.

    Returns ``(eps, gap)`` pairs with ``gap = f(mid) - (f(p1) + f(p2)) / 2 > 0``,
    each one a witness that f_i is not convex. The rates ``x`` drop out of
    the gap because they enter f_i additively.
    """
    if eps_grid is None:
        eps_grid = np.linspace(0.01, 0.99, 99)
    ctx = ExcessRateContext(np.zeros(n))
    p2 = np.full(n, 1.0 / n)
    found = []
    for eps in eps_grid:
        p1 = np.full(n, eps / (n - 1))
        p1[i] = 1.0 - eps
        mid = 0.5 * (p1 + p2)
        gap = excess_rate(ctx, mid, i) - 0.5 * (excess_rate(ctx, p1, i) + excess_rate(ctx, p2, i))
        if gap > 0.0:
            found.append((float(eps), float(gap)))
    return found
