"""Batch property suites shared by the command line and the test-suite."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import bounds
from .bounds import Kind
from .membership import in_lambda

INNER = ("srs", "pi_star", "si_star", "ei")
OUTER = ("po", "so_star", "eo", "po_and_so")


@dataclass
class SuiteReport:
    kind: str
    samples: int
    violations: dict = field(default_factory=dict)
    members: dict = field(default_factory=dict)

    @property
    def total_violations(self) -> int:
        return int(sum(self.violations.values()))


def sample_cube(rng: np.random.Generator, k: int, n: int) -> np.ndarray:
    return rng.random((k, n))


def sample_simplex(rng: np.random.Generator, k: int, n: int) -> np.ndarray:
    """Uniform points of the closed simplex {x >= 0, sum x <= 1}."""
    return rng.dirichlet(np.ones(n + 1), size=k)[:, :n]


def bound_memberships(X: np.ndarray, c_ellipsoid: float = 2.0) -> dict[str, np.ndarray]:
    n = X.shape[-1]
    si = bounds.sphere_params(n, None, Kind.INNER)
    so = bounds.sphere_params(n, None, Kind.OUTER)
    po = bounds.in_po(X)
    so_in = bounds.in_sphere_bound(X, so)
    return {
        "srs": bounds.in_srs(X),
        "pi_star": bounds.in_pi_star(X),
        "si_star": bounds.in_sphere_bound(X, si),
        "ei": bounds.in_ei(X, c_ellipsoid),
        "po": po,
        "so_star": so_in,
        "eo": bounds.in_eo(X, c_ellipsoid),
        "po_and_so": po & so_in,
    }


def sandwich_suite(X: np.ndarray, c_ellipsoid: float = 2.0) -> SuiteReport:
    """Inner bounds imply membership, membership implies outer bounds."""
    lam = in_lambda(X)
    mem = bound_memberships(X, c_ellipsoid)
    rep = SuiteReport("sandwich", X.shape[0], members={"lambda": int(lam.sum())})
    for name in INNER:
        rep.violations[name] = int(np.count_nonzero(mem[name] & ~lam))
        rep.members[name] = int(mem[name].sum())
    for name in OUTER:
        rep.violations[name] = int(np.count_nonzero(lam & ~mem[name]))
        rep.members[name] = int(mem[name].sum())
    return rep


def monotonicity_suite(X: np.ndarray, family: str, centers) -> SuiteReport:
    """Nesting of bound families along increasing centres.

    ``ei``: membership at a smaller centre implies membership at a larger one.
    ``eo`` and ``si``: the reverse implication.
    """
    cs = sorted(float(c) for c in centers)
    n = X.shape[-1]
    if family == "ei":
        sets = [bounds.in_ei(X, c) for c in cs]
    elif family == "eo":
        sets = [bounds.in_eo(X, c) for c in cs]
    elif family == "si":
        sets = [bounds.in_sphere_bound(X, bounds.sphere_params(n, c, Kind.INNER)) for c in cs]
    else:
        raise ValueError(f"unknown family {family!r}")
    rep = SuiteReport(f"monotonicity:{family}", X.shape[0])
    for (c1, s1), (c2, s2) in zip(zip(cs, sets), zip(cs[1:], sets[1:])):
        bad = s1 & ~s2 if family == "ei" else s2 & ~s1
        rep.violations[f"{c1:g}->{c2:g}"] = int(np.count_nonzero(bad))
    for c, s in zip(cs, sets):
        rep.members[f"{c:g}"] = int(s.sum())
    return rep
