"""Trigonometric symbols of the half-line Hilbert kernel.

The principal-value kernel ``1/(1-t)`` has Mellin transform ``pi cot(pi s)``
on ``0 < Re s < 1``; the Hilbert transform acts on Mellin transforms as
multiplication by ``-cot(pi s)``, and solving ``H rho = e`` multiplies by
``-tan(pi s)``.  This module evaluates these symbols, the two bounds for
``|tan|**2`` away from its poles, and residues by circular quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, PoleError

__all__ = [
    "POLE_TOL",
    "tan_pi",
    "cot_pi",
    "tan_pi_identity",
    "kernel_mellin_symbol",
    "hilbert_symbol",
    "solver_symbol",
    "TanBound",
    "tan_bound",
    "tan_abs2",
    "tan_residue_at_half",
    "contour_residue",
]

POLE_TOL = 1e-8


def _as_complex(s):
    return np.asarray(s, dtype=complex)


def _pole_distance(s, offset):
    # distance from s to the nearest point of offset + Z on the real axis
    x = np.real(s) - offset
    return np.hypot(x - np.round(x), np.imag(s))


def tan_pi(s):
    """``tan(pi s)``, stable for large ``|Im s|`` (tends to ``+-i``)."""
    return np.tan(np.pi * _as_complex(s))


def cot_pi(s):
    """``cot(pi s)`` via ``tan(pi (1/2 - s))``."""
    s = _as_complex(s)
    return np.tan(np.pi * (0.5 - s))


def tan_pi_identity(x, y):
    """``(sin 2 pi x + i sinh 2 pi y) / (cos 2 pi x + cosh 2 pi y)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    # the denominator vanishes exactly at the poles, where inf is the right answer
    with np.errstate(divide="ignore", invalid="ignore"):
        return (np.sin(2 * np.pi * x) + 1j * np.sinh(2 * np.pi * y)) / (
            np.cos(2 * np.pi * x) + np.cosh(2 * np.pi * y))


def kernel_mellin_symbol(s):
    """``pi cot(pi s)``, the Mellin transform of ``pv 1/(1-t)``.

    Only defined on ``0 < Re s < 1``.
    """
    s = _as_complex(s)
    x = np.real(s)
    if np.any((x <= 0) | (x >= 1)):
        raise DomainError("the kernel 1/(1-t) is Mellin transformable only for 0 < Re s < 1")
    if np.any(_pole_distance(s, 0.0) < POLE_TOL):
        raise PoleError("s is within 1e-8 of a pole of cot(pi s)")
    out = np.pi * cot_pi(s)
    return out[()] if out.ndim == 0 else out


def hilbert_symbol(s):
    """``-cot(pi s)``: ``M[Hf](s) = -cot(pi s) M[f](s)``."""
    s = _as_complex(s)
    if np.any(_pole_distance(s, 0.0) < POLE_TOL):
        raise PoleError("s is within 1e-8 of an integer, a pole of cot(pi s)")
    out = -cot_pi(s)
    return out[()] if out.ndim == 0 else out


def solver_symbol(s):
    """``-tan(pi s)``, the inverse of :func:`hilbert_symbol`."""
    s = _as_complex(s)
    if np.any(_pole_distance(s, 0.5) < POLE_TOL):
        raise PoleError("s is within 1e-8 of a half-integer, a pole of tan(pi s)")
    out = -tan_pi(s)
    return out[()] if out.ndim == 0 else out


def tan_abs2(x, y):
    """Exact ``|tan(pi (x+iy))|**2 = (cosh 2pi y - cos 2pi x)/(cosh 2pi y + cos 2pi x)``."""
    ch = np.cosh(2 * np.pi * np.asarray(y, dtype=float))
    c = np.cos(2 * np.pi * np.asarray(x, dtype=float))
    with np.errstate(over="ignore", invalid="ignore"):
        r = (ch - c) / (ch + c)
    return np.where(np.isinf(ch), 1.0, r)


@dataclass(frozen=True)
class TanBound:
    """Certified upper bound for ``|tan(pi (x+iy))|**2``.

    ``regime`` names the branch that produced ``bound``.  ``printed_x_bound``
    is ``(cos pi(1-2 eps) + 1)**-2`` as commonly stated; it is a valid bound
    only for ``eps <= 1/4`` and ``printed_x_valid`` records whether it holds
    at this ``eps``.
    """

    bound: float
    regime: str
    x_bound: float
    y_bound: float
    printed_x_bound: float
    printed_x_valid: bool


def _inv_sq(g: float) -> float:
    # g**-2, infinite once it leaves double range
    return g ** -2 if g > 1e-150 else math.inf


def tan_bound(x: float, y: float, eps: float | None = None) -> TanBound:
    """Bound ``|tan(pi (x+iy))|**2`` from the distance to the poles.

    x-regime, with ``eps`` the distance of ``x`` to ``1/2 + Z`` and
    ``C = cos pi(1-2 eps)``: ``(1 + min(C, 0))**-2``.  For ``eps <= 1/4``
    this is the printed ``(C+1)**-2``; for larger ``eps`` the sup over ``y``
    is 1, which the printed form undercuts.

    y-regime, with ``M = |y|``: ``(1 - 1/cosh 2 pi M)**-2``.

    The smaller applicable bound is returned.
    """
    if eps is None:
        d = x - 0.5
        eps = abs(d - round(d))
    if eps < 0 or eps > 0.5:
        raise DomainError("eps must lie in [0, 1/2]")
    M = abs(y)
    if eps == 0 and M == 0:
        raise PoleError("x + iy is a pole of tan(pi s); no bound exists")
    x_bound = y_bound = math.inf
    printed = math.inf
    if eps > 0:
        C = math.cos(math.pi * (1 - 2 * eps))
        printed = _inv_sq(C + 1)
        x_bound = _inv_sq(1 + min(C, 0.0))
    if M > 0:
        z = 2 * math.pi * M
        if z > 700:
            y_bound = 1.0
        else:
            # 1 - 1/cosh z written without cancellation for small z
            gap = 2 * math.sinh(0.5 * z) ** 2 / math.cosh(z)
            y_bound = _inv_sq(gap)
    regime = "x-separated" if x_bound <= y_bound else "y-separated"
    return TanBound(min(x_bound, y_bound), regime, x_bound, y_bound, printed, eps <= 0.25)


def tan_residue_at_half() -> float:
    """Residue of ``tan(pi s)`` at ``s = 1/2``."""
    return -1.0 / math.pi


def contour_residue(F: Callable, center: complex, radius: float, n: int = 256) -> tuple[complex, float]:
    """``(1/2 pi i) \\oint F(s) ds`` over the circle ``|s - center| = radius``.

    The periodic trapezoidal rule converges geometrically for ``F``
    analytic on an annulus around the circle.  Returns the value and the
    difference to the rule with ``n/2`` nodes as an error estimate.
    """
    if radius <= 0 or n < 8:
        raise ValueError("need radius > 0 and n >= 8")

    def rule(k):
        theta = 2 * np.pi * np.arange(k) / k
        z = radius * np.exp(1j * theta)
        vals = np.asarray(F(center + z), dtype=complex)
        return complex(np.mean(vals * z))

    full = rule(n)
    half = rule(n // 2)
    return full, abs(full - half)
