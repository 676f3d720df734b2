"""Exact volumes in rational arithmetic and a seeded Monte-Carlo estimator."""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from . import bounds
from .errors import DegenerateEstimate, DimensionTooLarge
from .membership import in_lambda

N_MAX_EXACT = 6
CHUNK = 1 << 16


@dataclass(frozen=True)
class ExactVolume:
    value: Fraction
    terms: int | None = None

    @property
    def float_value(self) -> float:
        return float(self.value)


@lru_cache(maxsize=None)
def _fact(k: int) -> int:
    return math.factorial(k)


def lambda_term_count(n: int) -> int:
    """Number of weak compositions of n-2 into 2**n parts."""
    return math.comb(n - 2 + 2 ** n - 1, n - 2)


def vol_lambda_exact(n: int, n_max: int = N_MAX_EXACT, force: bool = False) -> ExactVolume:
    """Volume of the stability region as an exact rational.

    Sums over multisets of n-2 columns of the n x 2**n binary matrix; a
    multiset with column multiplicities k contributes

        multinomial(n-2; k) * (-1)^|a| * prod_i a_i! / (n+1+|a|)!

    where a = V k collects how often each coordinate is hit.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if n > n_max and not force:
        raise DimensionTooLarge(f"n={n} exceeds n_max={n_max}; pass force=True to override")
    r = n - 2
    cols = [tuple(i for i in range(n) if (t >> i) & 1) for t in range(2 ** n)]
    top = n + 1 + n * r
    denom = _fact(top)
    scale = [denom // _fact(n + 1 + s) for s in range(n * r + 1)]
    facts = [_fact(k) for k in range(r + 1)]
    total = 0
    count = 0
    for combo in itertools.combinations_with_replacement(range(2 ** n), r):
        count += 1
        a = [0] * n
        for t in combo:
            for i in cols[t]:
                a[i] += 1
        mult = facts[r]
        run = 1
        for j in range(1, r):
            if combo[j] == combo[j - 1]:
                run += 1
            else:
                mult //= facts[run]
                run = 1
        if r:
            mult //= facts[run]
        s = sum(a)
        term = mult * math.prod(facts[ai] for ai in a) * scale[s]
        total += -term if s & 1 else term
    return ExactVolume(Fraction(total, denom), count)


def vol_lambda_oracle(n: int) -> ExactVolume:
    """Same volume from a direct binomial expansion of prod(1-p_i)^(n-2).

    Each monomial p^a is integrated against (1 - sum p) over the simplex with
    the Dirichlet moment formula prod a_i! * 1! / (n + 1 + |a|)!.
    """
    if not 2 <= n <= 8:
        raise ValueError("oracle supports 2 <= n <= 8")
    r = n - 2
    top = n + 1 + n * r
    denom = _fact(top)
    binom = [math.comb(r, k) * _fact(k) for k in range(r + 1)]
    total = 0
    for a in itertools.product(range(r + 1), repeat=n):
        s = sum(a)
        term = math.prod(binom[k] for k in a) * (denom // _fact(n + 1 + s))
        total += -term if s & 1 else term
    return ExactVolume(Fraction(total, denom), (r + 1) ** n)


def vol_srs_exact(n: int) -> ExactVolume:
    return ExactVolume(Fraction(2 ** n, _fact(2 * n)))


def vol_pi_star_exact(n: int) -> ExactVolume:
    return ExactVolume(Fraction(n - 1, n) ** (n * (n - 1)) / _fact(n))


EXACT = {
    "lambda": vol_lambda_exact,
    "srs": vol_srs_exact,
    "pi_star": vol_pi_star_exact,
}


# -- normal quantile --------------------------------------------------------

def norm_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)


def norm_ppf(q: float) -> float:
    """Standard normal quantile.

    Acklam's rational approximation (relative error about 1e-9) followed by
    one Newton step on the erfc-based CDF.
    """
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    lo = 0.02425
    if q < lo:
        t = math.sqrt(-2.0 * math.log(q))
        z = (((((_C[0] * t + _C[1]) * t + _C[2]) * t + _C[3]) * t + _C[4]) * t + _C[5]) / \
            ((((_D[0] * t + _D[1]) * t + _D[2]) * t + _D[3]) * t + 1.0)
    elif q <= 1.0 - lo:
        u = q - 0.5
        t = u * u
        z = (((((_A[0] * t + _A[1]) * t + _A[2]) * t + _A[3]) * t + _A[4]) * t + _A[5]) * u / \
            (((((_B[0] * t + _B[1]) * t + _B[2]) * t + _B[3]) * t + _B[4]) * t + 1.0)
    else:
        t = math.sqrt(-2.0 * math.log1p(-q))
        z = -(((((_C[0] * t + _C[1]) * t + _C[2]) * t + _C[3]) * t + _C[4]) * t + _C[5]) / \
            ((((_D[0] * t + _D[1]) * t + _D[2]) * t + _D[3]) * t + 1.0)
    err = norm_cdf(z) - q
    dens = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    step = err / dens
    return z - step


def ci_half_width(v_hat: float, k: int, alpha: float = 0.05) -> float:
    """Relative half-width of the normal-approximation CI for a hit fraction."""
    if k < 2:
        raise ValueError("need at least two samples")
    if v_hat <= 0.0:
        raise DegenerateEstimate("zero hits: relative CI is undefined")
    if v_hat > 1.0:
        raise ValueError("v_hat must not exceed 1")
    return math.sqrt((1.0 - v_hat) / ((k - 1) * v_hat)) * norm_ppf(1.0 - alpha / 2.0)


# -- Monte Carlo ------------------------------------------------------------

@dataclass(frozen=True)
class MCEstimate:
    v_hat: float
    samples: int
    seed: int
    alpha: float
    delta_rel: float
    hits: int

    @property
    def degenerate(self) -> bool:
        return self.hits == 0

    @property
    def half_width(self) -> float:
        return self.delta_rel * self.v_hat if self.hits else math.inf


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    """Independent PCG64 stream for sample block ``chunk`` under ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2 ** 64 - 1), spawn_key=(int(chunk),))
    return np.random.Generator(np.random.PCG64(ss))


def _count_block(predicate, n, seed, chunk, size):
    pts = chunk_generator(seed, chunk).random((size, n))
    return int(np.count_nonzero(predicate(pts)))


def mc_volume(predicate: Callable[[np.ndarray], np.ndarray], n: int, samples: int,
              seed: int = 0, alpha: float = 0.05, workers: int = 1,
              chunk_size: int = CHUNK) -> MCEstimate:
    """Hit-fraction estimate of a volume inside the unit cube.

    Samples are split into fixed blocks of ``chunk_size`` points; block ``j``
    always draws from the stream derived from ``(seed, j)``, so the result
    does not depend on ``workers``.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    sizes = [min(chunk_size, samples - s) for s in range(0, samples, chunk_size)]
    jobs = [(predicate, n, seed, j, sz) for j, sz in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda a: _count_block(*a), jobs))
    else:
        counts = [_count_block(*a) for a in jobs]
    hits = sum(counts)
    v_hat = hits / samples
    delta = ci_half_width(v_hat, samples, alpha) if hits else math.inf
    return MCEstimate(v_hat, samples, int(seed), alpha, delta, hits)


FAMILIES = ("lambda", "srs", "pi_star", "po", "si_star", "so_star", "ei", "eo", "po_and_so")
DEFAULT_ELLIPSOID_C = 2.0


def family_predicate(name: str, c: float | None = None) -> Callable[[np.ndarray], np.ndarray]:
    """Batch membership predicate for a named family.

    ``c`` is the centre for the sphere and ellipsoid families; it defaults to
    the optimal sphere centre and to 2 for ellipsoids.
    """
    if name == "lambda":
        return in_lambda
    if name == "srs":
        return bounds.in_srs
    if name == "pi_star":
        return bounds.in_pi_star
    if name == "po":
        return bounds.in_po
    if name in ("si_star", "so_star"):
        kind = bounds.Kind.INNER if name == "si_star" else bounds.Kind.OUTER

        def pred(x):
            return bounds.in_sphere_bound(x, bounds.sphere_params(x.shape[-1], c, kind))
        return pred
    if name in ("ei", "eo"):
        cc = DEFAULT_ELLIPSOID_C if c is None else c
        fn = bounds.in_ei if name == "ei" else bounds.in_eo
        return lambda x: fn(x, cc)
    if name == "po_and_so":
        return lambda x: bounds.in_po(x) & bounds.in_so_star(x)
    raise KeyError(f"unknown family {name!r}")
