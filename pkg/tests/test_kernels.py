import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from mellin_hilbert.errors import DomainError, PoleError
from mellin_hilbert.kernels import (
    contour_residue,
    cot_pi,
    hilbert_symbol,
    kernel_mellin_symbol,
    solver_symbol,
    tan_abs2,
    tan_bound,
    tan_pi,
    tan_pi_identity,
    tan_residue_at_half,
)

reals = st.floats(-2, 2, allow_nan=False)


def test_symbols_against_mpmath():
    for s in (0.25 + 1j, 0.7 - 3j, 0.1 + 0.2j):
        ref = complex(mpmath.cot(mpmath.pi * mpmath.mpc(s)))
        assert hilbert_symbol(s) == pytest.approx(-ref, rel=1e-13)
        assert kernel_mellin_symbol(s) == pytest.approx(math.pi * ref, rel=1e-13)
        assert solver_symbol(s) == pytest.approx(-complex(mpmath.tan(mpmath.pi * mpmath.mpc(s))), rel=1e-13)


@settings(max_examples=200)
@given(reals, reals)
def test_tan_identity_matches_tan(x, y):
    d = x - 0.5
    assume(abs(d - round(d)) > 1e-6 or abs(y) > 1e-6)
    lhs = tan_pi(x + 1j * y)
    rhs = tan_pi_identity(x, y)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


@settings(max_examples=200)
@given(st.floats(0.02, 0.48), st.floats(-3, 3))
def test_symbol_product_is_one(x, y):
    s = x + 1j * y
    assert abs(hilbert_symbol(s) * solver_symbol(s) - 1) < 1e-12


def test_poles_are_refused():
    with pytest.raises(PoleError):
        hilbert_symbol(1.0)
    with pytest.raises(PoleError):
        solver_symbol(0.5 + 1e-10j)
    with pytest.raises(DomainError):
        kernel_mellin_symbol(1.2)


@settings(max_examples=200)
@given(st.floats(-1, 1), st.sampled_from([0.1, 0.5, 1.0, 5.0]))
def test_y_bound_holds(x, M):
    b = tan_bound(0.5, M)
    assert tan_abs2(x, M) <= b.y_bound * (1 + 1e-12)


@settings(max_examples=200)
@given(st.floats(0.0, 1.0), st.floats(-4, 4))
def test_returned_bound_is_valid(x, y):
    d = x - 0.5
    if abs(d - round(d)) < 1e-6 and abs(y) < 1e-6:
        return
    b = tan_bound(x, y)
    assert tan_abs2(x, y) <= b.bound * (1 + 1e-9)


def test_printed_x_bound_only_valid_up_to_quarter():
    # at eps > 1/4 the printed form falls below the true supremum 1
    b = tan_bound(0.0, 0.0, eps=0.5)
    assert not b.printed_x_valid and b.printed_x_bound < 1 and b.x_bound == 1.0
    with pytest.raises(DomainError):
        tan_bound(0.0, 0.0, eps=0.7)


def test_tan_residue():
    res, err = contour_residue(tan_pi, 0.5, 0.25)
    assert res == pytest.approx(tan_residue_at_half(), abs=1e-12)
    assert err < 1e-10
    res, _ = contour_residue(lambda s: 1 / (s - 0.3) ** 2, 0.3, 0.1)
    assert abs(res) < 1e-14
