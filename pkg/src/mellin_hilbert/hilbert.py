"""The half-line Hilbert transform ``Hf(x) = (1/pi) pv int_0^inf f(y)/(x-y) dy``.

Three routes are provided: the principal value integral itself, the
multiplicative convolution with the kernel ``(1/pi) pv 1/(1-t)``, and
multiplication of the Mellin transform by ``-cot(pi s)``.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import DomainError
from .kernels import hilbert_symbol
from .mellin import StripFunction, mellin_forward
from .quadrature import DEFAULT_SPEC, QuadratureSpec, QuadResult, integrate_pv
from .strip import HalfLineFunction, Strip

__all__ = ["hilbert_direct", "hilbert_convolution", "hilbert_via_symbol", "kernel_mellin_pv",
           "UNIT_STRIP"]

UNIT_STRIP = Strip(0.0, 1.0)


def _pointwise(one, x):
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise DomainError("the Hilbert transform is evaluated at x > 0 only")
    vals, errs, infos = [], [], []
    for xi in x_arr.ravel():
        r = one(float(xi))
        vals.append(r.value)
        errs.append(r.error)
        infos.append(r.info)
    if x_arr.ndim == 0:
        return QuadResult(complex(vals[0]), float(errs[0]), infos[0])
    info = {"points": infos, "converged": all(i.get("converged", True) for i in infos)}
    return QuadResult(np.array(vals).reshape(x_arr.shape), np.array(errs).reshape(x_arr.shape), info)


def _scaled(spec: QuadratureSpec, x: float) -> QuadratureSpec:
    # the kernel is of size 1/x for x beyond the bulk of f, and so is Hf
    if x <= 1:
        return spec
    return dataclasses.replace(spec, abs_tol=spec.abs_tol / x)


def hilbert_direct(f: HalfLineFunction, x, spec: QuadratureSpec = DEFAULT_SPEC) -> QuadResult:
    """``(1/pi) pv int_0^inf f(y) / (x - y) dy`` at each ``x``.

    Raises :class:`~mellin_hilbert.errors.DomainError` when ``x`` is one of
    the declared breakpoints of ``f``.
    """
    pts = f.breakpoints()
    kinks = tuple(f.kinks)

    def one(xi):
        r = integrate_pv(f, xi, _scaled(spec, xi), support=f.support, points=pts, splits=kinks)
        return QuadResult(r.value / math.pi, r.error / math.pi, r.info)

    return _pointwise(one, x)


def hilbert_convolution(f: HalfLineFunction, x, spec: QuadratureSpec = DEFAULT_SPEC) -> QuadResult:
    """``-(H v f)(x) = -(1/pi) pv int_0^inf f(x/t) / (1 - t) dt/t``.

    The principal value sits at ``t = 1``; breakpoints ``p`` of ``f`` become
    ``x/p`` in the ``t`` variable.
    """
    lo, hi = f.support

    def one(xi):
        if any(abs(xi - p) <= 1e-12 * xi for p in f.breakpoints()):
            raise DomainError(f"x={xi!r} sits on a declared discontinuity of {f.label}")
        support = (xi / hi if math.isfinite(hi) else 0.0, xi / lo if lo > 0 else math.inf)
        pts = tuple(xi / p for p in f.breakpoints())
        kinks = tuple(xi / p for p in f.kinks)

        def phi(t):
            return f(xi / t) / t

        r = integrate_pv(phi, 1.0, _scaled(spec, xi), support=support, points=pts, splits=kinks)
        return QuadResult(-r.value / math.pi, r.error / math.pi, r.info)

    return _pointwise(one, x)


def hilbert_via_symbol(f: HalfLineFunction, spec: QuadratureSpec = DEFAULT_SPEC,
                       transform: StripFunction | None = None) -> StripFunction:
    """``M[Hf](s) = -cot(pi s) M[f](s)`` on ``f.strip`` intersected with ``S(0, 1)``.

    ``transform`` may supply a closed form for ``M[f]``; otherwise
    :func:`~mellin_hilbert.mellin.mellin_forward` is used.
    """
    strip = f.strip.intersect(UNIT_STRIP)
    if strip is None:
        raise DomainError(f"{f.label}: strip {f.strip} does not meet S(0, 1)")
    if transform is not None:
        Mf = transform.func
        m, K = transform.growth_degree, transform.growth_constant
    else:
        def Mf(s):
            return mellin_forward(f, s, spec).value
        m, K = 0, 1.0

    def F(s):
        return hilbert_symbol(s) * Mf(s)

    return StripFunction(strip, F, m, K, (), f"M[H {f.label}]")


def kernel_mellin_pv(s, spec: QuadratureSpec = DEFAULT_SPEC) -> QuadResult:
    """``pv int_0^inf t**(s-1) / (1-t) dt`` by quadrature, for ``0 < Re s < 1``.

    The closed form is ``pi cot(pi s)``
    (:func:`~mellin_hilbert.kernels.kernel_mellin_symbol`).
    """
    s_arr = np.asarray(s, dtype=complex)
    if np.any((s_arr.real <= 0) | (s_arr.real >= 1)):
        raise DomainError("the kernel 1/(1-t) is Mellin transformable only for 0 < Re s < 1")

    def one(si):
        si = complex(si)

        def f(t):
            return np.asarray(t, dtype=float) ** (si - 1)

        return integrate_pv(f, 1.0, spec)

    flat = s_arr.ravel()
    res = [one(si) for si in flat]
    if s_arr.ndim == 0:
        return res[0]
    vals = np.array([r.value for r in res]).reshape(s_arr.shape)
    errs = np.array([r.error for r in res]).reshape(s_arr.shape)
    return QuadResult(vals, errs, {"points": [r.info for r in res]})
