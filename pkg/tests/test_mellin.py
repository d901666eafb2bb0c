import math

import mpmath
import numpy as np
import pytest
from scipy.special import gamma

from mellin_hilbert.catalog import get_entry
from mellin_hilbert.errors import DecayError, DomainError
from mellin_hilbert.mellin import (
    StripFunction,
    estimate_growth,
    invert_mellin,
    invert_mellin_regularized,
    log_grid,
    mellin_convolve,
    mellin_forward,
    mellin_of_log_derivative,
    mellin_transform,
)
from mellin_hilbert.quadrature import ContourSpec
from mellin_hilbert.strip import HalfLineFunction, Strip

EXP = HalfLineFunction(lambda t: np.exp(-t), Strip(0.0, math.inf), "exp(-t)")


def test_forward_gamma_oracle():
    s = np.array([0.5 + 2j, 1.0, 2.5 - 1j, 0.1 + 5j])
    r = mellin_forward(EXP, s)
    assert np.allclose(r.value, gamma(s), rtol=1e-9)


def test_forward_rejects_points_outside_the_strip():
    with pytest.raises(DomainError):
        mellin_forward(EXP, -0.5)


def test_forward_catalog_closed_forms():
    for cid in ("indicator01", "neglog01", "bump12", "expisqrt", "powercut(0.25)"):
        e = get_entry(cid)
        c = e.function.strip.midpoint() if cid != "bump12" else 0.5
        s = np.array([c, c + 1.5j, c - 4j])
        r = mellin_forward(e.function, s)
        assert np.allclose(r.value, e.known_mellin(s), rtol=1e-8, atol=1e-12), cid


def test_expisqrt_mellin_against_mpmath():
    # int_0^X e^{iv} v^{a-1} dv = (-i)^{-a} gamma(a, -iX), evaluated at 30 digits
    with mpmath.workdps(30):
        for s in (0.3 + 0.7j, 0.5, 0.9 - 6j):
            a = 2 * mpmath.mpc(s)
            ref = 2 * (-1j) ** (-a) * mpmath.gammainc(a, 0, -2j * mpmath.pi)
            assert get_entry("expisqrt").known_mellin(s) == pytest.approx(complex(ref), rel=1e-12, abs=1e-13)


def test_strip_function_checks():
    F = get_entry("neglog01").known_mellin
    assert F.holomorphy_residual() < 1e-6
    assert F.growth_ratio() <= 1.0


def test_estimate_growth_degrees():
    m, K, meta = estimate_growth(lambda s: 1 / s, Strip(0.1, 0.9))
    assert m == 0 and meta["fitted_exponent"] == pytest.approx(-1, abs=0.05)
    m, _, _ = estimate_growth(lambda s: s ** 2, Strip(0.1, 0.9))
    assert m == 3


def test_mellin_transform_wrapper():
    F = mellin_transform(EXP, estimate=False)
    assert F(2.0) == pytest.approx(1.0, rel=1e-9)


def test_invert_mellin_gamma_and_sigma_independence():
    F = StripFunction(Strip(0.0, math.inf), gamma, 0, 1.0)
    t = np.array([0.3, 1.0, 3.0])
    a = invert_mellin(F, t, ContourSpec(1.0))
    b = invert_mellin(F, t, ContourSpec(2.5))
    assert np.allclose(a.value, np.exp(-t), atol=1e-10)
    assert np.max(np.abs(a.value - b.value)) < 1e-10


def test_invert_mellin_rejects_bad_contour_and_slow_decay():
    F = get_entry("indicator01").known_mellin
    with pytest.raises(DomainError):
        invert_mellin(F, 0.5, ContourSpec(-0.5))
    with pytest.raises(DecayError):
        invert_mellin(F, 0.5, ContourSpec(0.5))


def test_regularized_inversion_of_slow_transform():
    # 1/s on S(0, inf) is the indicator of (0, 1)
    F = get_entry("indicator01").known_mellin
    t = log_grid(-8, 8, 8)
    r = invert_mellin_regularized(F, 0, ContourSpec(0.5), t)
    away = np.abs(np.log(t)) > 0.2
    assert np.allclose(r.values[away], (t[away] < 1).astype(float), atol=1e-6)
    assert np.all(r.errors[away] < 1e-4)


def test_regularized_inversion_with_no_differencing():
    F = get_entry("bump12").known_mellin
    t = log_grid(-8, 8, 16)
    r = invert_mellin_regularized(F, -2, ContourSpec(0.5), t)
    assert np.max(np.abs(r.values - get_entry("bump12").function(t))) < 1e-10
    assert r.info["order"] == 0


def test_regularized_inversion_argument_checks():
    F = get_entry("neglog01").known_mellin
    with pytest.raises(ValueError):
        invert_mellin_regularized(F, -3, ContourSpec(0.5), log_grid(-4, 4, 4))
    with pytest.raises(DomainError):
        invert_mellin_regularized(F, 0, ContourSpec(0.5), np.array([0.1, 0.2, 0.5]))
    G = StripFunction(Strip(-0.5, 0.5), lambda s: np.exp(s ** 2), 0, 1.0)
    with pytest.raises(DomainError):
        invert_mellin_regularized(G, 0, ContourSpec(0.25), log_grid(-4, 4, 4))


def test_log_grid():
    t = log_grid(-8, 8, 4)
    assert t[0] == pytest.approx(0.01) and t[-1] == pytest.approx(100) and t.size == 17
    with pytest.raises(ValueError):
        log_grid(2, 1)


def test_convolution_oracle():
    # (f v f)(tau) for f = indicator01 is max(0, -ln tau) on (0, 1)
    f = get_entry("indicator01").function
    assert mellin_convolve(f, f, 0.25).value.real == pytest.approx(math.log(4), rel=1e-10)
    assert mellin_convolve(f, f, 2.0).value == 0


def test_log_derivative_transform():
    F = get_entry("indicator01").known_mellin
    G = mellin_of_log_derivative(F, 2)
    assert G(0.5 + 1j) == pytest.approx(0.5 + 1j, rel=1e-14)
    assert G.growth_degree == F.growth_degree + 2
