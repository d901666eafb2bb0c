"""Forward and inverse Mellin transforms on strips.

``M[f](s) = int_0^inf f(t) t**(s-1) dt`` is evaluated by
:func:`mellin_forward`.  Inversion along ``Re s = c`` is
:func:`invert_mellin` for transforms decaying at least like ``|s|**-2``, and
:func:`invert_mellin_regularized` for polynomially bounded transforms: the
latter inverts ``F(s)/s**(m+2)`` on a fine ``ln t`` lattice and applies
``(-t d/dt)**(m+2)`` to the samples by finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, PoleError
from .quadrature import (
    DEFAULT_SPEC,
    ContourSpec,
    QuadratureSpec,
    QuadResult,
    integrate_half_line,
    log_derivative,
    vertical_line_lattice,
    vertical_line_transform,
)
from .strip import HalfLineFunction, Strip

__all__ = [
    "StripFunction",
    "mellin_forward",
    "mellin_transform",
    "estimate_growth",
    "invert_mellin",
    "RegularizedInversion",
    "invert_mellin_regularized",
    "log_grid",
    "mellin_convolve",
    "mellin_of_log_derivative",
]

POLE_DISTANCE = 1e-3


@dataclass(frozen=True)
class StripFunction:
    """An analytic function on a strip with a polynomial growth certificate.

    ``|F(s)| <= growth_constant * (1 + |s|)**growth_degree`` is claimed on
    the sampled lines; ``singularities`` lists isolated points inside the
    strip where ``F`` is not holomorphic.
    """

    strip: Strip
    func: Callable[[np.ndarray], np.ndarray]
    growth_degree: int = 0
    growth_constant: float = 1.0
    singularities: tuple[complex, ...] = ()
    label: str = "F"
    metadata: dict = field(default_factory=dict, compare=False, repr=False)

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        return np.asarray(self.func(s), dtype=complex)

    def distance_to_singularity(self, s: complex) -> float:
        if not self.singularities:
            return math.inf
        return min(abs(s - p) for p in self.singularities)

    def holomorphy_residual(self, n: int = 20, seed: int = 0, h: float = 1e-4,
                            y_range: float = 10.0) -> float:
        """Largest relative Cauchy-Riemann mismatch at ``n`` random strip points.

        Compares ``dF/dx`` with ``-i dF/dy`` by central differences.
        """
        rng = np.random.default_rng(seed)
        lo = self.strip.a if math.isfinite(self.strip.a) else self.strip.midpoint() - 2
        hi = self.strip.b if math.isfinite(self.strip.b) else self.strip.midpoint() + 2
        margin = 0.05 * (hi - lo)
        pts = []
        while len(pts) < n:
            s = complex(rng.uniform(lo + margin, hi - margin), rng.uniform(-y_range, y_range))
            if self.distance_to_singularity(s) > 0.1:
                pts.append(s)
        s = np.array(pts)
        dx = (self(s + h) - self(s - h)) / (2 * h)
        dy = (self(s + 1j * h) - self(s - 1j * h)) / (2j * h)
        scale = np.maximum(np.abs(dx), np.abs(self(s)))
        scale = np.where(scale > 0, scale, 1.0)
        return float(np.max(np.abs(dx - dy) / scale))

    def growth_ratio(self, lines: Sequence[float] | None = None,
                     heights: Sequence[float] = (0.0, 1.0, 10.0, 100.0, 1000.0)) -> float:
        """Largest ``|F| / (K (1+|s|)**m)`` over the sampled points."""
        if lines is None:
            lines = _growth_lines(self.strip)
        s = np.array([x + 1j * y * sgn for x in lines for y in heights for sgn in (1, -1)])
        keep = np.array([self.distance_to_singularity(v) > 0.1 for v in s])
        s = s[keep]
        bound = self.growth_constant * (1 + np.abs(s)) ** self.growth_degree
        return float(np.max(np.abs(self(s)) / bound))


def _growth_lines(strip: Strip) -> list[float]:
    fa, fb = math.isfinite(strip.a), math.isfinite(strip.b)
    if fa and fb:
        d = min(0.25, strip.width / 4)
        return [strip.a + d, strip.b - d]
    if fa:
        return [strip.a + 0.25, strip.a + 1.0]
    if fb:
        return [strip.b - 1.0, strip.b - 0.25]
    return [-1.0, 1.0]


# ---------------------------------------------------------------------------
# forward transform


def mellin_forward(f: HalfLineFunction, s, spec: QuadratureSpec = DEFAULT_SPEC) -> QuadResult:
    """``int_0^inf f(t) t**(s-1) dt`` for a scalar or array of ``s``.

    All ``s`` share the adaptive panels, so batches are cheap.

    Raises
    ------
    DomainError
        If some ``Re s`` lies outside the declared strip of ``f``.
    DivergenceError
        If the integral does not settle, which usually means the declared
        strip is wrong.
    """
    s_arr = np.asarray(s, dtype=complex)
    if not np.all(f.strip.contains(s_arr)):
        bad = s_arr.ravel()[~np.atleast_1d(f.strip.contains(s_arr)).ravel()][0]
        raise DomainError(f"s = {bad} is outside the strip {f.strip} of {f.label}")
    flat = s_arr.ravel()

    def integrand(t):
        ft = f(t)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            out = ft[None, :] * np.exp((flat[:, None] - 1) * np.log(t)[None, :])
        return np.where(ft[None, :] == 0, 0.0, out)

    res = integrate_half_line(integrand, spec, support=f.support, points=f.split_points())
    value = np.asarray(res.value).reshape(s_arr.shape)
    error = np.asarray(res.error).reshape(s_arr.shape)
    if s_arr.ndim == 0:
        return QuadResult(complex(value), float(error), res.info)
    return QuadResult(value, error, res.info)


def estimate_growth(F: Callable, strip: Strip, heights: Sequence[float] = (10.0, 100.0, 1000.0),
                    singularities: Sequence[complex] = ()) -> tuple[int, float, dict]:
    """Polynomial growth degree and constant from samples on two lines.

    ``|F|`` is sampled at ``|Im s|`` in ``heights`` on two lines near the
    strip edges.  The fitted log-log slope ``q`` gives
    ``m = max(0, ceil(q) + 1)`` (one degree of safety); ``K`` covers every
    sample, including a few at small ``|Im s|``, with a 5% margin.
    """
    lines = _growth_lines(strip)
    hs = np.asarray(heights, dtype=float)
    s = np.array([x + 1j * sgn * y for x in lines for y in hs for sgn in (1, -1)])
    amp = np.abs(np.asarray(F(s))).reshape(len(lines), len(hs), 2).max(axis=2)
    slopes = []
    for row in amp:
        if np.all(row > 0):
            slopes.append(np.polyfit(np.log(hs), np.log(row), 1)[0])
        else:
            slopes.append(-math.inf)
    q = float(max(slopes))
    m = 0 if not math.isfinite(q) else max(0, math.ceil(q - 0.05) + 1)
    low = np.array([x + 1j * y for x in lines for y in (0.0, 1.0, -1.0, 3.0, -3.0)])
    low = low[[all(abs(v - p) > 0.1 for p in singularities) for v in low]]
    allv = np.concatenate([s, low])
    vals = np.abs(np.asarray(F(allv)))
    K = float(np.max(vals / (1 + np.abs(allv)) ** m)) * 1.05
    return m, max(K, np.finfo(float).tiny), {"fitted_exponent": q, "lines": lines,
                                               "heights": list(hs)}


def mellin_transform(f: HalfLineFunction, spec: QuadratureSpec = DEFAULT_SPEC,
                     estimate: bool = True) -> StripFunction:
    """Wrap :func:`mellin_forward` as a :class:`StripFunction` on ``f.strip``.

    With ``estimate`` the growth degree and constant are fitted by
    :func:`estimate_growth`; the fit is recorded in ``metadata``.
    """
    def F(s):
        return mellin_forward(f, s, spec).value

    m, K, meta = (0, 1.0, {}) if not estimate else estimate_growth(F, f.strip)
    return StripFunction(f.strip, F, m, K, (), f"M[{f.label}]", meta)


# ---------------------------------------------------------------------------
# inversion


def _check_contour(F: StripFunction, c: float):
    if not F.strip.contains(c):
        raise DomainError(f"contour abscissa {c} is outside {F.strip}")
    for p in F.singularities:
        if abs(np.real(p) - c) < POLE_DISTANCE:
            raise PoleError(f"contour near pole: Re s = {c} is within {POLE_DISTANCE} of {p}")


def invert_mellin(F: StripFunction, t, contour: ContourSpec,
                  spec: QuadratureSpec = DEFAULT_SPEC) -> QuadResult:
    """``(1/2 pi i) int_{c-i inf}^{c+i inf} F(s) t**-s ds``.

    Needs ``|F(s)| <= K |s|**-2`` on the line; a slower measured decay raises
    :class:`~mellin_hilbert.errors.DecayError`, in which case use
    :func:`invert_mellin_regularized`.
    """
    _check_contour(F, contour.abscissa)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise DomainError("t must be positive")
    res = vertical_line_transform(F, contour, np.log(t_arr).ravel(), spec)
    value = res.value.reshape(t_arr.shape)
    error = np.asarray(res.error).reshape(t_arr.shape)
    if t_arr.ndim == 0:
        return QuadResult(complex(value), float(error), res.info)
    return QuadResult(value, error, res.info)


def log_grid(k_lo: int = -24, k_hi: int = 24, per_decade: int = 8) -> np.ndarray:
    """``t = 10**(k/per_decade)`` for integer ``k`` in ``[k_lo, k_hi]``."""
    if k_hi < k_lo or per_decade < 1:
        raise ValueError("empty log grid")
    return 10.0 ** (np.arange(k_lo, k_hi + 1) / per_decade)


@dataclass
class RegularizedInversion:
    """Samples of an inverse Mellin transform on a log-uniform grid.

    ``values[i]`` approximates ``f(t[i])``; ``errors[i]`` combines the
    finite-difference truncation estimate, the amplified contour tail and
    roundoff.  ``u_fine``/``f_fine`` hold the differentiated values on the
    whole fine lattice, including points between the output grid.
    """

    t: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    u_fine: np.ndarray
    f_fine: np.ndarray
    info: dict


_FD_PEAK = {}


def _fd_gain(accuracy: int = 6) -> float:
    # largest |symbol| * h of the central first-derivative stencil
    if accuracy not in _FD_PEAK:
        theta = np.linspace(0, math.pi, 20001)
        w = {4: [(1, 8 / 12), (2, -1 / 12)], 6: [(1, 45 / 60), (2, -9 / 60), (3, 1 / 60)]}[accuracy]
        sym = sum(2 * c * np.sin(k * theta) for k, c in w)
        _FD_PEAK[accuracy] = float(np.max(np.abs(sym)))
    return _FD_PEAK[accuracy]


def invert_mellin_regularized(F: StripFunction, m: int, contour: ContourSpec, t_grid: np.ndarray,
                              spec: QuadratureSpec = DEFAULT_SPEC, tol: float = 1e-10,
                              step: float | None = None, height: float | None = None,
                              alias_digits: float = 16.0) -> RegularizedInversion:
    """Invert a polynomially bounded Mellin transform on a log-uniform grid.

    ``g = M^{-1}[F(s) s**-(m+2)]`` is computed on a fine lattice in
    ``u = ln t`` (one trapezoidal sum folded onto the lattice and finished
    by an FFT) and ``f = (-t d/dt)**(m+2) g`` is obtained by repeated sixth
    order central differences.  ``s**(m+2)`` has no zero in the strip
    provided ``0`` is not inside it.

    Parameters
    ----------
    m
        Growth degree; ``m = -2`` inverts ``F`` itself with no differences,
        which suits transforms that already decay fast.
    t_grid
        Log-uniform output grid (at least two points).
    tol
        Target for the part of the error coming from the truncated contour
        after amplification by the differences.
    step
        Lattice spacing in ``u``; by default about ``eps**(1/(6+m+2))``,
        adjusted to divide the grid spacing.
    height
        Contour truncation height; by default chosen from the decay
        certificate of ``F(s) s**-(m+2)`` and ``tol``.
    alias_digits
        Decimal digits by which the periodic images of the lattice sum are
        suppressed; sets the node spacing on the line from the distance of
        the contour to the strip edges and singularities.
    """
    c = contour.abscissa
    _check_contour(F, c)
    if m < -2:
        raise ValueError("m must be at least -2")
    order = m + 2
    if order > 0 and (F.strip.contains(0.0) or any(abs(p) < POLE_DISTANCE for p in F.singularities)):
        raise DomainError("s**(m+2) vanishes inside the strip; regularisation needs 0 outside")
    t_grid = np.asarray(t_grid, dtype=float)
    u_grid = np.log(t_grid)
    if t_grid.size < 2:
        raise ValueError("t_grid needs at least two points")
    du = np.diff(u_grid)
    if np.any(du <= 0) or np.ptp(du) > 1e-9 * du.mean():
        raise DomainError("t_grid must be strictly increasing and log-uniform")
    spacing = float(du.mean())

    h0 = step if step is not None else float(np.finfo(float).eps ** (1.0 / (6 + order)))
    # even, so that every output point also lies on the doubled lattice
    n_sub = 2 * max(1, math.ceil(spacing / (2 * h0) - 1e-9))
    h = spacing / n_sub

    # decay rate of the lattice images: distance to nearest obstruction
    edges = [F.strip.a, F.strip.b] + [float(np.real(p)) for p in F.singularities]
    rate = min(abs(c - e) for e in edges)
    span = float(u_grid[-1] - u_grid[0])
    pad = (3 * order + 8) * h
    period_needed = alias_digits * math.log(10) / rate + span + 2 * pad
    dy_max = 2 * math.pi / period_needed
    npu = max(contour.nodes_per_unit, math.ceil(1.0 / dy_max))

    gain = (_fd_gain(6) / h) ** order
    line_spec = QuadratureSpec(spec.rel_tol, min(spec.abs_tol, tol / gain), spec.max_panels,
                               spec.log_window, spec.tail_safety)
    lattice_contour = ContourSpec(c, height if height is not None else contour.height,
                                  npu, contour.max_nodes)

    def G(s):
        return F(s) / s ** order

    # centre the period on the requested grid and align lattice points with it
    P = int(math.ceil(2 * math.pi * npu / h))
    u_mid = 0.5 * (u_grid[0] + u_grid[-1])
    l0 = int(round((u_mid - u_grid[0]) / h)) - P // 2
    u0 = u_grid[0] + l0 * h
    u, res = vertical_line_lattice(G, lattice_contour, u0, h, line_spec)
    g = res.value
    if np.isrealobj(g) or np.all(np.abs(g.imag) <= 0):
        g = g.real

    f6 = log_derivative(g, h, order, accuracy=6)
    drop = 3 * order
    u_f = u[drop: u.size - drop]
    # Richardson estimate of the truncation error from the doubled step
    start = (-l0) % 2  # parity of the output points on the lattice
    f6_2h = log_derivative(g[start::2], 2 * h, order, accuracy=6)
    trunc = np.full(u_f.shape, np.inf)
    first = (start + 2 * drop) - drop
    trunc[first::2][: f6_2h.size] = np.abs(f6[first::2][: f6_2h.size] - f6_2h) / 63.0
    tail_amp = gain * np.asarray(res.error)[drop: u.size - drop]
    g_abs = np.abs(g)
    local = np.max(np.lib.stride_tricks.sliding_window_view(g_abs, 2 * drop + 1), axis=-1)
    g_round = 8 * np.finfo(float).eps * (local + np.exp(-c * u_f) * res.info["l1"])
    err_fine = trunc + tail_amp + gain * g_round

    idx = np.rint((u_grid - u_f[0]) / h).astype(int)
    if idx[0] < 0 or idx[-1] >= u_f.size:
        raise DomainError("t_grid does not fit inside the aliasing-free part of the lattice")
    info = {"order": order, "m": m, "step": h, "height": res.info["height"],
            "nodes": res.info["nodes"], "dy": res.info["dy"], "decay": res.info["decay"],
            "capped": res.info["capped"], "abscissa": c, "alias_rate": rate,
            "period": res.info["period"]}
    return RegularizedInversion(t_grid, f6[idx], err_fine[idx], u_f, f6, info)


# ---------------------------------------------------------------------------
# convolution and the Mellin differential operator


def mellin_convolve(f: HalfLineFunction, g: HalfLineFunction, tau,
                    spec: QuadratureSpec = DEFAULT_SPEC) -> QuadResult:
    """``(f v g)(tau) = int_0^inf f(t) g(tau/t) dt/t``."""
    if f.strip.intersect(g.strip) is None:
        raise DomainError(f"strips {f.strip} and {g.strip} do not overlap")
    tau = float(tau)
    if not tau > 0:
        raise DomainError("tau must be positive")
    lo = max(f.support[0], tau / g.support[1] if math.isfinite(g.support[1]) else 0.0)
    hi = min(f.support[1], tau / g.support[0] if g.support[0] > 0 else math.inf)
    if not lo < hi:
        return QuadResult(0j, 0.0, {"panels": 0, "converged": True})
    pts = set(f.split_points()) | {tau / p for p in g.split_points()}

    def integrand(t):
        return f(t) * g(tau / t) / t

    return integrate_half_line(integrand, spec, support=(lo, hi),
                               points=tuple(p for p in pts if lo < p < hi))


def mellin_of_log_derivative(F: StripFunction, n: int) -> StripFunction:
    """Transform of ``(-t d/dt)**n f``: ``s -> s**n F(s)``, growth degree ``m + n``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    func = F.func
    return StripFunction(F.strip, lambda s: np.asarray(s, dtype=complex) ** n * func(s),
                         F.growth_degree + n, F.growth_constant, F.singularities,
                         f"s^{n} {F.label}", dict(F.metadata))
