import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aloha_region.core import (ModelConstants, in_simplex, m_of_n, on_simplex_facet, p_of_delta,
                               pi_of_p, x_of_p)


def test_pi_of_p_examples():
    assert pi_of_p([0.0, 0.0, 0.0]) == 1.0
    assert pi_of_p([1.0, 0.3]) == 0.0
    assert pi_of_p([0.5, 0.5]) == 0.25


def test_x_of_p_examples():
    np.testing.assert_allclose(x_of_p([0.5, 0.5]), [0.25, 0.25])
    np.testing.assert_allclose(x_of_p([1 / 3] * 3), [4 / 27] * 3, rtol=1e-15)
    np.testing.assert_array_equal(x_of_p([1.0, 0.0, 0.0]), [1.0, 0.0, 0.0])


def test_x_of_p_with_unit_entry_is_exact():
    # leave-one-out products must not divide by 1 - p_i
    np.testing.assert_array_equal(x_of_p([1.0, 0.5]), [0.5, 0.0])


def test_x_of_p_batch_matches_rows():
    P = np.random.default_rng(3).random((50, 4))
    X = x_of_p(P)
    for p, x in zip(P, X):
        np.testing.assert_allclose(x_of_p(p), x, rtol=1e-15)


def test_p_of_delta_worked_example():
    x = [0.25, 0.2]
    np.testing.assert_allclose(p_of_delta((11 - math.sqrt(41)) / 2, x), [0.364922, 0.314922], atol=5e-7)
    np.testing.assert_allclose(p_of_delta((11 + math.sqrt(41)) / 2, x), [0.685078, 0.635078], atol=5e-7)
    np.testing.assert_array_equal(p_of_delta(3.7, [0.0, 0.0]), [0.0, 0.0])


def test_p_of_delta_rejects_nonpositive():
    with pytest.raises(ValueError):
        p_of_delta(0.0, [0.1, 0.1])


def test_simplex_predicates():
    assert in_simplex([0.3, 0.3])
    assert not in_simplex([0.6, 0.6])
    assert on_simplex_facet([1 / 3, 1 / 3, 1 / 3], 1e-12)
    assert not on_simplex_facet([0.3, 0.3], 1e-12)


def test_model_constants():
    assert ModelConstants(2).m == 0.25
    ms = [m_of_n(n) for n in range(2, 40)]
    assert all(a > b for a, b in zip(ms, ms[1:]))
    for n in range(2, 40):
        assert 1 / math.e < n * m_of_n(n) <= 0.5
        np.testing.assert_allclose(x_of_p(np.full(n, 1.0 / n)), m_of_n(n), rtol=1e-14)
    with pytest.raises(ValueError):
        ModelConstants(1)


probs = st.lists(st.floats(0.0, 0.999, allow_nan=False), min_size=2, max_size=7)


@settings(max_examples=300, deadline=None)
@given(probs)
def test_rates_lie_in_simplex(p):
    x = x_of_p(p)
    assert np.all(x >= 0.0)
    assert x.sum() <= 1.0 + 1e-12


@settings(max_examples=300, deadline=None)
@given(probs)
def test_round_trip_below_facet(p):
    p = np.asarray(p)
    if p.sum() >= 1.0 or np.all(p == 0.0):
        return
    back = p_of_delta(1.0 / pi_of_p(p), x_of_p(p))
    np.testing.assert_allclose(back, p, atol=1e-12)
