import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mellin_hilbert.errors import DecayError, DivergenceError, DomainError, QuadratureError
from mellin_hilbert.quadrature import (
    DEFAULT_SPEC,
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    ContourSpec,
    DecayCertificate,
    QuadratureSpec,
    check_decay,
    estimate_decay,
    fd_step,
    integrate_half_line,
    integrate_interval,
    integrate_pv,
    integrate_vertical_line,
    log_derivative,
    tail_bound,
    tail_height,
    vertical_line_transform,
)


def _monomial_exact(k):
    return 2.0 / (k + 1) if k % 2 == 0 else 0.0


def test_kronrod_rule_exact_to_degree_22():
    for k in range(23):
        assert KRONROD_WEIGHTS @ NODES ** k == pytest.approx(_monomial_exact(k), abs=1e-14)


def test_gauss_rule_exact_to_degree_13():
    for k in range(14):
        assert GAUSS_WEIGHTS @ NODES ** k == pytest.approx(_monomial_exact(k), abs=1e-14)
    assert abs(GAUSS_WEIGHTS @ NODES ** 14 - 2 / 15) > 1e-6


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_panels=0)
    with pytest.raises(ValueError):
        ContourSpec(math.inf)


def test_interval_oracles():
    r = integrate_interval(np.sin, 0.0, math.pi)
    assert r.value == pytest.approx(2.0, abs=1e-13) and r.info["converged"]
    r = integrate_interval(lambda x: np.sqrt(x), 0.0, 1.0)
    assert abs(r.value - 2 / 3) <= 1e-9 * 2 / 3
    assert abs(r.value - 2 / 3) <= r.error
    r = integrate_interval(np.exp, 1.0, 0.0)
    assert r.value.real == pytest.approx(1 - math.e, abs=1e-13)


def test_interval_batch_and_split_points():
    def f(x):
        return np.stack([np.abs(x - 0.3), np.where(x < 0.3, 1.0, 2.0)])
    r = integrate_interval(f, 0.0, 1.0, points=(0.3,))
    assert np.allclose(r.value, [0.045 + 0.245, 0.3 + 1.4], atol=1e-13)
    assert r.info["panels"] == 2


def test_interval_rejects_nonfinite_integrand():
    with pytest.raises(QuadratureError):
        integrate_interval(lambda x: np.where(x > 0.5, np.nan, 1.0), 0.0, 1.0)


def test_interval_panel_budget_reports_nonconvergence():
    r = integrate_interval(lambda x: np.sin(1 / (x + 1e-9)), 0.0, 1.0, QuadratureSpec(max_panels=4))
    assert not r.info["converged"]


@settings(max_examples=30, deadline=None)
@given(st.floats(-0.9, 3.0))
def test_half_line_power_cut(p):
    # int_0^1 t^p dt = 1/(p+1)
    r = integrate_half_line(lambda t: t ** p, support=(0.0, 1.0))
    assert r.value.real == pytest.approx(1 / (p + 1), rel=1e-8)


def test_half_line_oracles():
    r = integrate_half_line(lambda t: np.exp(-t))
    assert r.value.real == pytest.approx(1.0, abs=1e-12)
    r = integrate_half_line(lambda t: 1 / (1 + t ** 2))
    assert r.value.real == pytest.approx(math.pi / 2, abs=1e-11)
    r = integrate_half_line(lambda t: t ** -0.5 / (1 + t))
    assert r.value.real == pytest.approx(math.pi, rel=1e-9)


def test_half_line_detects_divergence():
    with pytest.raises(DivergenceError) as exc:
        integrate_half_line(lambda t: 1 / t, support=(0.0, 1.0))
    assert len(exc.value.partial_sums) > 1
    with pytest.raises(DomainError):
        integrate_half_line(lambda t: t, support=(2.0, 1.0))


def test_pv_oracles():
    # pv int_0^2 1/(1-t) dt = 0 and pv int_0^1 t^{-1/2}/(x-t) dt has a closed form
    r = integrate_pv(lambda t: np.ones_like(t), 1.0, support=(0.0, 2.0))
    assert abs(r.value) < 1e-12
    x = 0.25
    exact = math.log((1 + math.sqrt(x)) / (1 - math.sqrt(x))) / math.sqrt(x)
    r = integrate_pv(lambda t: t ** -0.5, x, support=(0.0, 1.0))
    assert r.value.real == pytest.approx(exact, rel=1e-9)


def test_pv_window_shrinks_near_a_jump():
    r = integrate_pv(lambda t: np.ones_like(t), 0.9, support=(0.0, 1.0))
    assert r.info["diagnostics"]
    assert r.value.real == pytest.approx(math.log(9), rel=1e-10)
    with pytest.raises(DomainError):
        integrate_pv(lambda t: np.ones_like(t), 1.0, support=(0.0, 1.0))


def test_vertical_line_of_gaussian():
    # (1/2 pi i) int exp(s^2) ds over Re s = c is 1/(2 sqrt(pi)) for every c
    for c in (0.0, 0.7):
        r = integrate_vertical_line(lambda s: np.exp(s ** 2), ContourSpec(c))
        assert r.value.real == pytest.approx(0.5 / math.sqrt(math.pi), abs=1e-12)


def test_vertical_line_transform_inverts_gamma():
    # M^{-1}[Gamma(s)] = exp(-t); checked away from the slow algebraic regime
    from scipy.special import gamma

    u = np.log(np.array([0.5, 1.0, 2.0]))
    r = vertical_line_transform(gamma, ContourSpec(1.0), u)
    assert np.allclose(r.value, np.exp(-np.exp(u)), atol=1e-10)


def test_decay_certificate_fits_power():
    cert = estimate_decay(lambda s: 1 / s ** 3, 0.5)
    assert cert.p >= 2.9
    y = np.array([10.0, 100.0, 1e4])
    assert np.all(np.abs(1 / (0.5 + 1j * y) ** 3) <= cert.K * y ** -cert.p * (1 + 1e-9))
    check_decay(lambda s: 1 / s ** 3, 0.5, cert, 1e4)
    with pytest.raises(DecayError):
        check_decay(lambda s: 1 / s, 0.5, DecayCertificate(1.0, 3.0, 1.0), 1e4)


def test_tail_height_and_bound_agree():
    Y = tail_height(2.0, 3.0, 1e-10)
    assert tail_bound(DecayCertificate(2.0, 3.0), Y) == pytest.approx(1e-10)
    assert tail_height(1.0, 1.0, 1e-3) == math.inf


def test_log_derivative_of_exponential():
    # (-d/du)^k e^{-2u} = 2^k e^{-2u}
    h = fd_step(2)
    u = np.arange(-40, 41) * h
    g = np.exp(-2 * u)
    for k in (0, 1, 2, 3):
        d = log_derivative(g, h, k)
        core = u[3 * k: u.size - 3 * k]
        assert np.allclose(d, 2 ** k * np.exp(-2 * core), rtol=1e-8)
    with pytest.raises(ValueError):
        log_derivative(g[:5], h, 1)
