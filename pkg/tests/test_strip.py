import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mellin_hilbert import strip as strips
from mellin_hilbert.errors import DomainError
from mellin_hilbert.strip import HalfLineFunction, Membership, Strip

finite = st.floats(-50, 50, allow_nan=False)


def test_strip_rejects_empty_and_nan():
    with pytest.raises(DomainError):
        Strip(1.0, 1.0)
    with pytest.raises(DomainError):
        Strip(2.0, 1.0)
    with pytest.raises(DomainError):
        Strip(math.nan, 1.0)
    with pytest.raises(DomainError):
        Strip(math.inf, math.inf)


def test_strip_membership_is_open():
    s = Strip(0.0, 1.0)
    assert 0.5 + 3j in s
    assert 0.0 not in s and 1.0 + 2j not in s
    assert list(s.contains(np.array([-0.1, 0.2, 0.99, 1.0]))) == [False, True, True, False]


def test_strip_midpoint_and_half_infinite():
    assert Strip(0.2, 0.6).midpoint() == pytest.approx(0.4)
    assert Strip(0.0, math.inf).midpoint() == 1.0
    assert Strip(-math.inf, 0.0).midpoint() == -1.0
    assert Strip(-math.inf, math.inf).midpoint() == 0.0


@given(finite, finite, finite, finite)
def test_intersection_is_contained_in_both(a, b, c, d):
    if not (a < b and c < d):
        return
    s, t = Strip(a, b), Strip(c, d)
    r = s.intersect(t)
    if r is None:
        assert max(a, c) >= min(b, d)
    else:
        assert s.contains_strip(r) and t.contains_strip(r)
        assert r == t.intersect(s)


def test_half_line_function_breakpoints():
    f = HalfLineFunction(lambda t: t, Strip(0, 1), "f", singular_points=(3.0, 0.5),
                         support=(0.0, 2.0), kinks=(1.5,))
    assert f.breakpoints() == (0.5, 2.0, 3.0)
    assert f.split_points() == (0.5, 1.5, 2.0, 3.0)
    with pytest.raises(DomainError):
        HalfLineFunction(lambda t: t, Strip(0, 1), support=(2.0, 1.0))


def test_scaled_function():
    f = HalfLineFunction(lambda t: t, Strip(0, 1), "f")
    g = f.scaled(2j)
    assert g(np.array([3.0]))[0] == 6j


def test_zeta_weight_oracle():
    t = np.array([0.25, 1.0, 4.0])
    w = strips.zeta_weight(t, 0.3, 0.7)
    # t^-a for t < 1 and t^-b for t > 1
    assert np.allclose(w, [0.25 ** -0.3, 1.0, 4.0 ** -0.7])


def test_norm_of_power_is_exact():
    # zeta(t) t^{1} t^{-1/2} with a1 = 0.4, a2 = 0.6 peaks at 1 with value 1
    f = HalfLineFunction(lambda t: np.asarray(t) ** -0.5, Strip(0.4, 0.6))
    est = strips.test_function_norm(f, 0.4, 0.6, 0)
    assert est.finite and est.value == pytest.approx(1.0, abs=1e-12)


def test_norm_flags_divergence():
    f = HalfLineFunction(lambda t: np.asarray(t) ** -0.9, Strip(0.9, 1.0))
    assert strips.test_function_norm(f, 0.4, 0.6, 0).diverging


def test_norm_derivatives_of_log_gaussian_are_finite():
    f = HalfLineFunction(lambda t: np.exp(-np.log(t) ** 2), Strip(-math.inf, math.inf))
    for k in range(3):
        assert strips.test_function_norm(f, 0.2, 0.8, k).finite


def test_membership_detects_failure_at_zero_and_infinity():
    f = HalfLineFunction(lambda t: (np.asarray(t) < 1).astype(float), Strip(0, math.inf))
    assert strips.check_membership(f, Strip(0.0, 5.0)).consistent
    assert strips.check_membership(f, Strip(-0.5, 1.0)).status is Membership.INCONSISTENT_AT_0
    g = HalfLineFunction(lambda t: 1.0 / (1 + np.asarray(t)), Strip(0, 1))
    assert strips.check_membership(g, Strip(0.0, 1.0)).consistent
    assert strips.check_membership(g, Strip(0.0, 1.5)).status is Membership.INCONSISTENT_AT_INF
