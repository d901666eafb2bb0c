import math

import numpy as np
import pytest

from mellin_hilbert.catalog import bump, get_entry, indicator, list_entries, load_samples, powercut, samples
from mellin_hilbert.errors import DomainError
from mellin_hilbert.hilbert import hilbert_direct
from mellin_hilbert.io import write_csv
from mellin_hilbert.mellin import mellin_forward
from mellin_hilbert.strip import HalfLineFunction, Strip


def test_every_listed_entry_resolves():
    for cid in list_entries():
        key = "powercut(0.3)" if cid == "powercut(p)" else cid
        e = get_entry(key)
        assert e.function.strip.a < e.function.strip.b
    with pytest.raises(DomainError):
        get_entry("nope")


def test_indicator_validation_and_strips():
    with pytest.raises(DomainError):
        indicator(1.0, 0.5)
    with pytest.raises(DomainError):
        indicator(0.0, math.inf)
    assert indicator(1.0, math.inf).function.strip == Strip(-math.inf, 0.0)
    e = indicator(0.5, 2.0)
    assert e.known_mellin(1.0) == pytest.approx(1.5)


def test_powercut():
    e = powercut(0.25)
    assert e.function.strip == Strip(0.25, math.inf)
    assert mellin_forward(e.function, 1.0).value == pytest.approx(1 / 0.75, rel=1e-9)


def test_bump_is_smooth_and_overflow_free():
    with np.errstate(all="raise"):
        v = bump(np.array([0.0, 1.0, 1.0 + 1e-300, 1.5, 2.0 - 1e-16, 2.0, 1e300]))
    assert v[0] == v[1] == v[5] == v[6] == 0
    assert v[3] == pytest.approx(math.exp(-1))


def test_bump_mellin_far_up_the_line():
    e = get_entry("bump12")
    for s in (0.5 + 40j, -2.0 + 3j):
        assert mellin_forward(e.function, s).value == pytest.approx(e.known_mellin(s), rel=1e-8, abs=1e-14)


def test_neglog_hilbert_limits():
    H = get_entry("neglog01").known_hilbert
    # Hf(x) ~ 1/(pi x) for large x since int_0^1 -ln y dy = 1
    assert H(1e8) * math.pi * 1e8 == pytest.approx(1.0, rel=1e-7)
    assert np.isfinite(H(np.array([1e-6, 0.5, 2.0]))).all()


def test_indicator_branches_solve_the_equation():
    # the closed-form minus branch maps to the indicator under H
    e = get_entry("indicator01")
    rho = HalfLineFunction(e.extras["rho_minus"], Strip(-0.5, 0.5), "rho-", singular_points=(1.0,))
    x = np.array([0.2, 0.7, 1.5, 6.0])
    r = hilbert_direct(rho, x)
    assert np.allclose(r.value, (x < 1).astype(float), atol=1e-7)
    diff = e.extras["rho_plus"](x) - e.extras["rho_minus"](x)
    assert np.allclose(np.sqrt(x) * diff, 2 / math.pi)


def test_expisqrt_vanishes_at_half():
    assert abs(get_entry("expisqrt").known_mellin(0.5)) < 1e-12


def test_samples_mellin_is_exact_for_piecewise_linear_data():
    t = np.exp(np.linspace(-1, 1, 9))
    vals = np.log(t) ** 2 - 1
    e = samples(t, vals, Strip(-5, 5))
    s = np.array([0.5, 0.2 + 3j])
    assert np.allclose(e.known_mellin(s), mellin_forward(e.function, s).value, rtol=1e-10)
    with pytest.raises(DomainError):
        samples(t[::-1], vals, Strip(0, 1))
    with pytest.raises(DomainError):
        samples(t, vals[:-1], Strip(0, 1))


def test_load_samples_round_trip(tmp_path):
    t = np.array([0.5, 1.0, 2.0])
    path = write_csv(tmp_path / "s.csv", ["t", "re", "im"], zip(t, [1.0, 2.0, 0.5], [0.0, 1.0, 0.0]))
    e = load_samples(path, Strip(0.0, 1.0))
    assert np.allclose(e.function(t), [1.0, 2.0 + 1j, 0.5])
    assert e.function(np.array([0.1]))[0] == 0
