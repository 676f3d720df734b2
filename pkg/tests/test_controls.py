import numpy as np
import pytest

from aloha_region.controls import (ExcessRateContext, convexity_probe, excess_grad,
                                   excess_hessian, excess_rate, excess_rates, in_stabilizing_set,
                                   nonconvexity_witness, pseudoconvexity_probe, sublevel_probe)
from aloha_region.core import x_of_p
from aloha_region.errors import SamplingExhausted
from aloha_region.membership import boundary_point, classify


def fd_grad(ctx, p, i, h=1e-6):
    return np.array([(excess_rate(ctx, p + h * e, i) - excess_rate(ctx, p - h * e, i)) / (2 * h)
                     for e in np.eye(p.size)])


def fd_hess(ctx, p, i, h=1e-4):
    n = p.size
    H = np.zeros((n, n))
    E = np.eye(n)
    for k in range(n):
        for l in range(n):
            H[k, l] = (excess_rate(ctx, p + h * E[k] + h * E[l], i) - excess_rate(ctx, p + h * E[k] - h * E[l], i)
                       - excess_rate(ctx, p - h * E[k] + h * E[l], i) + excess_rate(ctx, p - h * E[k] - h * E[l], i)) / (4 * h * h)
    return H


def test_excess_rate_examples():
    p = np.array([0.3, 0.5, 0.1])
    ctx = ExcessRateContext(x_of_p(p))
    assert np.allclose(excess_rates(ctx, p), 0.0)
    zero = ExcessRateContext(np.zeros(3))
    assert all(excess_rate(zero, p, i) <= 0 for i in range(3))
    r = classify([0.25, 0.2])
    ctx = ExcessRateContext([0.25, 0.2])
    assert np.max(np.abs(excess_rates(ctx, r.p_s))) <= 1e-9


def test_grad_and_hessian_n2():
    a, b = 0.3, 0.6
    ctx = ExcessRateContext([0.1, 0.1])
    np.testing.assert_allclose(excess_grad(ctx, [a, b], 0), [-(1 - b), a])
    np.testing.assert_array_equal(excess_hessian(ctx, [a, b], 0), [[0, 1], [1, 0]])


@pytest.mark.parametrize("n", range(2, 7))
def test_derivatives_match_finite_differences(n):
    rng = np.random.default_rng(n)
    ctx = ExcessRateContext(rng.random(n) * 0.1)
    for _ in range(100):
        p = rng.uniform(0.05, 0.95, n)
        i = int(rng.integers(n))
        g = excess_grad(ctx, p, i)
        assert g[i] < 0
        np.testing.assert_allclose(g, fd_grad(ctx, p, i), rtol=1e-6, atol=1e-9)
        H = excess_hessian(ctx, p, i)
        assert np.all(np.diag(H) == 0.0)
        np.testing.assert_allclose(H, H.T)
        np.testing.assert_allclose(H, fd_hess(ctx, p, i), rtol=1e-5, atol=1e-7)


def test_stabilizing_set_examples():
    r = classify([0.25, 0.2])
    ctx = ExcessRateContext([0.25, 0.2])
    assert in_stabilizing_set(ctx, r.p_s) and in_stabilizing_set(ctx, r.p_l)
    zero = ExcessRateContext([0.0, 0.0])
    assert in_stabilizing_set(zero, [0.9, 0.9])


@pytest.mark.parametrize("n", [2, 3])
def test_control_set_nonempty_iff_member(n):
    g = 100 if n == 2 else 40
    ax = np.linspace(0, 1, g)
    P = np.stack(np.meshgrid(*([ax] * n), indexing="ij"), -1).reshape(-1, n)
    rng = np.random.default_rng(n)
    for x in rng.random((60, n)) * (1.2 / n):
        ctx = ExcessRateContext(x)
        found = bool(np.any(in_stabilizing_set(ctx, P)))
        r = classify(x)
        if found:
            assert r.is_member
        elif r.is_member:
            # grid too coarse only when x is close to the boundary
            assert not classify(x / 0.97).is_member


def test_convexity_probe_examples():
    ctx = ExcessRateContext([0.25, 0.2])
    rep = convexity_probe(ctx, 1000, seed=1)
    assert rep.violations == 0 and rep.checks == 9000
    r = classify(ctx.x)
    for th in np.linspace(0, 1, 21):
        assert in_stabilizing_set(ctx, th * r.p_s + (1 - th) * r.p_l)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_convexity_probe_near_boundary(n):
    p = np.random.default_rng(n).dirichlet(np.ones(n))
    ctx = ExcessRateContext(0.99 * boundary_point(p))
    assert convexity_probe(ctx, 100, seed=n).violations == 0


def test_convexity_probe_requires_interior():
    with pytest.raises(ValueError):
        convexity_probe(ExcessRateContext([0.25, 1 / 3]), 10)


def test_sampling_budget(monkeypatch):
    import aloha_region.controls as c
    monkeypatch.setattr(c, "BUDGET", 50)
    with pytest.raises(SamplingExhausted):
        c._draw(np.random.default_rng(0), 2, [], lambda X: np.zeros(X.shape[0], bool))


@pytest.mark.parametrize("n", range(2, 6))
def test_pseudoconvexity_probe(n):
    rep = pseudoconvexity_probe(ExcessRateContext(np.zeros(n)), 0, 1000, seed=n)
    assert rep.violations == 0
    assert rep.extremes["min_curvature"] > 0


def test_pseudoconvexity_closed_form_n2():
    rng = np.random.default_rng(0)
    ctx = ExcessRateContext([0.0, 0.0])
    for a, b in rng.uniform(0.01, 0.99, (50, 2)):
        q = np.array([a, 1 - b])
        assert q @ excess_grad(ctx, [a, b], 0) == pytest.approx(0.0, abs=1e-15)
        assert q @ excess_hessian(ctx, [a, b], 0) @ q == pytest.approx(2 * a * (1 - b))


def test_sublevel_probe_examples():
    x = np.array([0.2, 0.15, 0.1])
    ctx = ExcessRateContext(x)
    assert sublevel_probe(ctx, 0, x[0], 200, seed=1).violations == 0
    assert sublevel_probe(ctx, 1, 0.0, 200, seed=2).violations == 0
    assert sublevel_probe(ctx, 2, x[2] / 2, 200, seed=3).violations == 0


def test_nonconvexity_witness():
    hits = nonconvexity_witness(2)
    assert hits and all(g > 0 for _, g in hits)
    # closed form of the gap at n = 2 for eps -> 0 is 1/16
    assert nonconvexity_witness(2, [0.0])[0][1] == pytest.approx(1 / 16)
