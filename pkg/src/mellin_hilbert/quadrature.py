"""Numerical integration engines.

Four building blocks are provided:

* :func:`integrate_interval` -- globally adaptive Gauss-Kronrod (7/15) on a
  finite interval, vectorised over an optional batch of integrands;
* :func:`integrate_half_line` -- integrals over ``(0, inf)`` computed in the
  logarithmic variable ``u = ln t`` with a growing window;
* :func:`integrate_pv` -- Cauchy principal values ``pv int f(t)/(x0-t) dt``
  using secant subtraction on a window around ``x0``;
* :func:`integrate_vertical_line` and :func:`vertical_line_lattice` --
  trapezoidal sums along ``Re s = c`` truncated at a certified height.

:func:`log_derivative` applies ``(-t d/dt)^n`` to samples on a uniform grid
in ``u = ln t`` by repeated central differences.

All integrands are complex valued.  Callables receive a 1-D float array and
may return an array of shape ``batch + (n,)``; the batch dimensions are
carried through so that, for example, a Mellin transform can be evaluated at
many ``s`` with shared panels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DecayError, DivergenceError, DomainError, QuadratureError

__all__ = [
    "QuadratureSpec",
    "ContourSpec",
    "DecayCertificate",
    "QuadResult",
    "DEFAULT_SPEC",
    "integrate_interval",
    "integrate_half_line",
    "integrate_pv",
    "estimate_decay",
    "check_decay",
    "tail_bound",
    "oscillatory_tail_bound",
    "integrate_vertical_line",
    "vertical_line_transform",
    "vertical_line_lattice",
    "log_derivative",
    "fd_step",
]

# Gauss-Kronrod 7/15 rule on [-1, 1] (QUADPACK qk15 abscissae and weights).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1:14:2] = np.concatenate([_WG[:-1], _WG[::-1]])

# Largest |u| for which exp(u) stays comfortably inside double range.
_U_CAP = 690.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and limits for the integration engines.

    ``log_window`` is the half-width ``U`` of the initial window ``[-U, U]``
    in ``u = ln t``; ``tail_safety`` multiplies certified contour tail bounds.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_panels: int = 20000
    log_window: float = 30.0
    tail_safety: float = 2.0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.max_panels < 1:
            raise ValueError("max_panels must be >= 1")
        if not self.log_window > 0:
            raise ValueError("log_window must be positive")
        if not self.tail_safety >= 1:
            raise ValueError("tail_safety must be >= 1")


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class ContourSpec:
    """A vertical line ``Re s = abscissa`` and how to discretise it.

    ``height`` is the truncation height ``Y``; ``None`` selects it from the
    decay certificate so that the tail bound is below ``abs_tol``.
    """

    abscissa: float
    height: float | None = None
    nodes_per_unit: int = 20
    max_nodes: int = 8_000_001

    def __post_init__(self):
        if not math.isfinite(self.abscissa):
            raise ValueError("contour abscissa must be finite")
        if self.height is not None and not self.height > 0:
            raise ValueError("height must be positive")
        if self.nodes_per_unit < 1:
            raise ValueError("nodes_per_unit must be >= 1")


@dataclass(frozen=True)
class DecayCertificate:
    """Claim ``|F(c+iy)| <= K |y|**-p`` for ``|y| >= y0``.

    Samples at or below ``floor`` are treated as evaluation noise and are
    not required to satisfy the bound.
    """

    K: float
    p: float
    y0: float = 1.0
    floor: float = 0.0


class QuadResult(NamedTuple):
    value: complex | np.ndarray
    error: float | np.ndarray
    info: dict


# ---------------------------------------------------------------------------
# finite intervals


def _eval(f, x, batch=None):
    fx = np.asarray(f(x), dtype=complex)
    if fx.shape[-1:] != x.shape[-1:] and fx.ndim == 0:
        fx = np.broadcast_to(fx, x.shape)
    return fx


def _gk_panels(f, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = (mid[:, None] + half[:, None] * NODES[None, :]).ravel()
    fx = _eval(f, x)
    if not np.all(np.isfinite(fx)):
        bad = x[np.nonzero(~np.isfinite(fx.reshape(-1, x.size)).any(axis=0))[0][0]]
        raise QuadratureError(f"integrand is not finite at {bad:.17g}")
    batch = fx.shape[:-1]
    fx = fx.reshape(batch + (lo.size, 15))
    kron = (fx @ KRONROD_WEIGHTS) * half
    gauss = (fx @ GAUSS_WEIGHTS) * half
    return kron, np.abs(kron - gauss)


def integrate_interval(f: Callable, a: float, b: float, spec: QuadratureSpec = DEFAULT_SPEC,
                       points: Sequence[float] = (), min_panels: int = 1) -> QuadResult:
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[a, b]``.

    Panels whose error dominates are bisected until the summed error estimate
    satisfies ``err <= max(abs_tol, rel_tol*|value|)`` for every batch entry,
    or ``spec.max_panels`` is reached (``info["converged"]`` is then False).
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integrate_interval needs finite limits")
    if b == a:
        probe = _eval(f, np.array([a]))
        z = np.zeros(probe.shape[:-1], dtype=complex)
        return QuadResult(z[()] if z.ndim == 0 else z, 0.0, {"panels": 0, "converged": True})
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    cuts = sorted({a, b, *(p for p in points if a < p < b)})
    edges = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        edges.extend(np.linspace(lo, hi, min_panels + 1)[:-1])
    lo = np.array(edges)
    hi = np.append(lo[1:], b)
    val, err = _gk_panels(f, lo, hi)
    converged = False
    while True:
        total = val.sum(axis=-1)
        err_tot = err.sum(axis=-1)
        tol = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(total))
        if np.all(err_tot <= tol):
            converged = True
            break
        if lo.size >= spec.max_panels:
            break
        score = err / np.asarray(tol)[..., None]
        score = score.reshape(-1, lo.size).max(axis=0)
        split = score >= 0.25 * score.max()
        room = spec.max_panels - lo.size
        if split.sum() > room:
            order = np.argsort(score)[::-1][:room]
            split = np.zeros_like(split)
            split[order] = True
        mids = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mids])
        new_hi = np.concatenate([mids, hi[split]])
        nv, ne = _gk_panels(f, new_lo, new_hi)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[..., keep], nv], axis=-1)
        err = np.concatenate([err[..., keep], ne], axis=-1)
    total = sign * val.sum(axis=-1)
    err_tot = err.sum(axis=-1)
    info = {"panels": int(lo.size), "converged": converged}
    if np.ndim(total) == 0:
        return QuadResult(complex(total), float(err_tot), info)
    return QuadResult(total, err_tot, info)


# ---------------------------------------------------------------------------
# half line


def _log_limits(support):
    lo, hi = support
    if not (0 <= lo < hi):
        raise DomainError(f"invalid support {support!r}")
    u_lo = math.log(lo) if lo > 0 else -math.inf
    u_hi = math.log(hi) if math.isfinite(hi) else math.inf
    return u_lo, u_hi


def integrate_half_line(f: Callable, spec: QuadratureSpec = DEFAULT_SPEC,
                        support: tuple[float, float] = (0.0, math.inf),
                        points: Sequence[float] = ()) -> QuadResult:
    """Integrate ``f`` over ``support`` (a sub-interval of ``(0, inf)``).

    The substitution ``t = e^u`` turns power-law behaviour at 0 and infinity
    into exponentials.  Infinite ends are handled by extending the window in
    steps of growing length until two consecutive extensions each add less
    than the tolerance.

    Raises
    ------
    DivergenceError
        If the window keeps contributing, e.g. ``int_0^1 dt/t``.
    """
    u_lo, u_hi = _log_limits(support)
    U = spec.log_window
    if math.isinf(u_lo) and math.isinf(u_hi):
        core = (-U, U)
    elif math.isinf(u_lo):
        core = (min(-U, u_hi - U), u_hi)
    elif math.isinf(u_hi):
        core = (u_lo, max(U, u_lo + U))
    else:
        core = (u_lo, u_hi)
    # t = e^u must stay representable
    core = (max(core[0], -_U_CAP), min(core[1], _U_CAP))
    if core[0] >= core[1]:
        return QuadResult(0j, 0.0, {"panels": 0, "converged": True})

    def g(u):
        t = np.exp(u)
        return _eval(f, t) * t

    upts = [math.log(p) for p in points if p > 0 and core[0] < math.log(p) < core[1]]
    res = integrate_interval(g, core[0], core[1], spec, points=upts)
    total = res.value
    error = res.error
    converged = res.info["converged"]
    panels = res.info["panels"]

    for side, open_end in ((-1, math.isinf(u_lo)), (+1, math.isinf(u_hi))):
        if not open_end:
            continue
        edge = core[0] if side < 0 else core[1]
        step = 0.5 * U
        quiet = 0
        partial = [total]
        last = res.value
        while quiet < 2:
            if abs(edge) >= _U_CAP:
                # nothing representable lies beyond the cap; accept if the
                # last piece was already negligible
                if quiet or np.all(np.abs(last) <= np.maximum(spec.abs_tol, spec.rel_tol * np.abs(total))):
                    break
                raise DivergenceError(
                    "half-line integral did not stabilise before |ln t| reached "
                    f"{_U_CAP:g}", partial)
            nxt = side * min(abs(edge + side * step), _U_CAP)
            a, b = (nxt, edge) if side < 0 else (edge, nxt)
            piece = integrate_interval(g, a, b, spec)
            last = piece.value
            total = total + piece.value
            error = error + piece.error
            panels += piece.info["panels"]
            converged = converged and piece.info["converged"]
            partial.append(total)
            tol = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(total))
            quiet = quiet + 1 if np.all(np.abs(piece.value) <= tol) else 0
            edge = nxt
            step *= 1.5
    info = {"panels": panels, "converged": converged}
    return QuadResult(total, error, info)


# ---------------------------------------------------------------------------
# principal values


def integrate_pv(f: Callable, x0: float, spec: QuadratureSpec = DEFAULT_SPEC,
                 support: tuple[float, float] = (0.0, math.inf),
                 points: Sequence[float] = (), splits: Sequence[float] = ()) -> QuadResult:
    """Principal value ``pv int_0^inf f(t) / (x0 - t) dt``.

    Splits off the window ``W = (x0/2, 3x0/2)`` and uses

        pv = int_{outside W} f(t)/(x0-t) dt - int_W (f(t)-f(x0))/(t-x0) dt,

    where the second integrand is a bounded secant.  If a declared
    discontinuity (``points`` or an end of ``support``) falls inside ``W`` the
    window is shrunk symmetrically and ``info["diagnostics"]`` says so.
    ``splits`` are extra panel boundaries (kinks) that do not shrink the
    window.
    """
    if not x0 > 0:
        raise DomainError("principal value point must be positive")
    lo, hi = support
    diagnostics = []
    breaks = [p for p in (*points, lo, hi) if p > 0 and math.isfinite(p)]
    delta = 0.5 * x0
    for p in breaks:
        d = abs(p - x0)
        if d <= 1e-12 * x0:
            raise DomainError(f"x0={x0!r} sits on a declared discontinuity")
        if d < delta:
            delta = 0.5 * d
            diagnostics.append(f"window shrunk to half-width {delta:.6g} around x0={x0:.6g} "
                               f"(discontinuity at {p:.6g})")
    fx0 = _eval(f, np.array([x0]))[..., 0]
    if not np.all(np.isfinite(fx0)):
        raise DomainError(f"integrand not evaluable at x0={x0!r}")

    def outer(t):
        return _eval(f, t) / (x0 - t)

    def secant(t):
        # a panel bisected down to rounding level can put a node exactly on x0;
        # its weight is negligible, so that node contributes nothing
        d = t - x0
        return np.where(d != 0, (_eval(f, t) - fx0[..., None]) / np.where(d != 0, d, 1.0), 0.0)

    all_pts = tuple(sorted({*points, *splits}))
    total = 0.0
    error = 0.0
    converged = True
    panels = 0
    left = (lo, min(hi, x0 - delta))
    right = (max(lo, x0 + delta), hi)
    for piece in (left, right):
        if piece[0] < piece[1]:
            r = integrate_half_line(outer, spec, support=piece, points=all_pts)
            total = total + r.value
            error = error + r.error
            converged = converged and r.info["converged"]
            panels += r.info["panels"]
    inner_lo, inner_hi = max(lo, x0 - delta), min(hi, x0 + delta)
    if inner_lo < inner_hi:
        r = integrate_interval(secant, inner_lo, inner_hi, spec, points=(x0, *all_pts))
        total = total - r.value
        error = error + r.error
        converged = converged and r.info["converged"]
        panels += r.info["panels"]
    info = {"panels": panels, "converged": converged, "diagnostics": diagnostics,
            "window": (x0 - delta, x0 + delta)}
    if np.ndim(total) == 0:
        return QuadResult(complex(total), float(error), info)
    return QuadResult(total, error, info)


# ---------------------------------------------------------------------------
# vertical lines


def _line_values(F, c, y):
    return np.asarray(F(c + 1j * y), dtype=complex)


def _line_derivative(F):
    """``s -> F'(s)`` by a central difference along the line (``F`` holomorphic)."""
    def dF(s):
        s = np.asarray(s, dtype=complex)
        d = 1e-3 * (1.0 + np.abs(s.imag))
        return (np.asarray(F(s + 1j * d)) - np.asarray(F(s - 1j * d))) / (2j * d)
    return dF


def estimate_decay(F: Callable, c: float, y_min: float = 8.0, y_max: float = 1e6,
                   tol: float = 1e-12, p_max: float = 16.0) -> DecayCertificate:
    """Fit a decay certificate ``(K, p)`` for ``F`` along ``Re s = c``.

    ``|F(c +- iy)|`` is sampled on a geometric ladder starting at ``y_min``.
    For each trial exponent ``p`` the smallest constant covering all samples
    is formed and the exponent giving the lowest truncation height for
    ``tol`` is kept.  Sampling stops at twice that height or at ``y_max``.
    If ``|F|`` drops below ``1e-3 tol`` (or ``1000 eps`` times its largest
    sample) at a local exponent of 8 or more, the rest is taken as roundoff
    and the certificate is fitted to the samples above that floor.

    Raises
    ------
    DecayError
        If the fitted slope of ``ln|F|`` against ``ln y`` is above ``-1.9``,
        i.e. the line integral cannot be certified with ``p >= 2``.
    """
    ys: list[float] = []
    amps: list[float] = []
    floor = 1e-3 * tol
    y = y_min
    while y <= y_max:
        ladder = y * 2.0 ** (np.arange(4) / 4.0)
        vals = np.abs(_line_values(F, c, np.concatenate([ladder, -ladder])))
        if not np.all(np.isfinite(vals)):
            raise DecayError(f"non-finite integrand on Re s = {c:g}")
        ys.extend(ladder)
        amps.extend(np.maximum(vals[:4], vals[4:]))
        y = ladder[-1] * 2.0 ** 0.25
        ya = np.array(ys)
        aa = np.array(amps)
        if aa.max() == 0.0:
            if ya[-1] >= 4 * y_min:
                return DecayCertificate(0.0, p_max, y_min)
            continue
        verified = []
        for p in np.arange(1.5, p_max + 1e-9, 0.5):
            K = float(np.max(aa * ya ** p)) * 1.05
            Y = max(tail_height(K, p, tol), y_min)
            if 2 * Y <= ya[-1]:
                verified.append((Y, -p, K))
        if verified and len(ys) >= 12:
            Y, negp, K = min(verified)
            return DecayCertificate(K, float(-negp), y_min)
        # roundoff in F itself is relative to its largest sampled value
        floor = max(floor, 1000 * np.finfo(float).eps * float(aa.max()))
        if len(ys) >= 12 and np.all(aa[-8:] <= floor):
            above = np.nonzero(aa > floor)[0][-8:]
            if above.size < 2 or _measured_exponent(ya[above], aa[above]) >= 8:
                return _floor_certificate(F, c, ya[-1], floor, tol, y_min, p_max)
    # no exponent could be checked up to twice its truncation height: fall
    # back to the measured exponent, rounded down to a multiple of 1/2
    ya = np.array(ys)
    aa = np.array(amps)
    slope = _measured_exponent(ya, aa)
    if slope < 1.9:
        raise DecayError(
            f"integrand on Re s = {c:g} decays too slowly (measured exponent "
            f"{slope:.3g}, need >= 2); use the regularised inversion", slope)
    p = min(p_max, max(2.0, math.floor(2 * (slope + 0.05)) / 2))
    return DecayCertificate(float(np.max(aa * ya ** p)) * 1.05, p, y_min)


def _floor_certificate(F, c, y_top, floor, tol, y_min, p_max):
    # F fell to roundoff faster than a moderate power: fit the samples above
    # the floor with exponents up to 4 p_max.  A dense resample keeps a
    # sparse ladder from missing oscillation peaks.
    ya = np.geomspace(y_min, y_top, 512)
    vals = np.abs(_line_values(F, c, np.concatenate([ya, -ya])))
    aa = np.maximum(vals[:512], vals[512:])
    above = aa > floor
    if not above.any():
        return DecayCertificate(0.0, p_max, y_min, floor)
    best = None
    for p in np.arange(1.5, 4 * p_max + 1e-9, 0.5):
        with np.errstate(over="ignore"):
            K = float(np.max(aa[above] * ya[above] ** p)) * 1.05
        if not math.isfinite(K):
            break
        cand = (max(tail_height(K, p, tol), y_min), -p, K)
        best = cand if best is None else min(best, cand)
    return DecayCertificate(best[2], float(-best[1]), y_min, floor)


def _measured_exponent(ya, aa):
    top = ya >= ya[len(ya) // 2]
    mask = top & (aa > 0)
    if mask.sum() < 2:
        return math.inf
    slope = np.polyfit(np.log(ya[mask]), np.log(aa[mask]), 1)[0]
    return float(-slope)


def tail_height(K: float, p: float, tol: float) -> float:
    """Smallest ``Y`` with ``2 K Y**(1-p) / (p-1) <= tol``."""
    if K <= 0:
        return 0.0
    if p <= 1:
        return math.inf
    return (2.0 * K / ((p - 1.0) * tol)) ** (1.0 / (p - 1.0))


def tail_bound(cert: DecayCertificate, Y: float) -> float:
    """Certified bound on ``int_{|y|>Y} |F(c+iy)| dy``."""
    if cert.K == 0:
        return 0.0
    if cert.p <= 1:
        return math.inf
    return 2.0 * cert.K * Y ** (1.0 - cert.p) / (cert.p - 1.0)


def oscillatory_tail_bound(cert: DecayCertificate, dcert: DecayCertificate, Y: float, u):
    """Bound on ``|int_{|y|>Y} F(c+iy) exp(-iyu) dy|`` for ``u != 0``.

    One integration by parts gives, per side, ``(|F(Y)| + int_Y^inf |F'|) / |u|``;
    ``dcert`` is a decay certificate for ``F'``.
    """
    u = np.abs(np.asarray(u, dtype=float))
    edge = cert.K * Y ** (-cert.p) if cert.K > 0 else 0.0
    total = 2.0 * (edge + 0.5 * tail_bound(dcert, Y))
    with np.errstate(divide="ignore"):
        return np.where(u > 0, total / np.where(u > 0, u, 1.0), math.inf)


def check_decay(F: Callable, c: float, cert: DecayCertificate, Y: float, n: int = 24) -> None:
    """Sample ``|F|`` between ``y0`` and ``4Y`` and refuse a violated certificate."""
    if cert.K == 0:
        return
    y_hi = max(4 * Y, 2 * cert.y0)
    ys = np.geomspace(cert.y0, y_hi, n)
    vals = np.abs(_line_values(F, c, np.concatenate([ys, -ys])))
    amp = np.maximum(vals[:n], vals[n:])
    bound = cert.K * ys ** (-cert.p)
    if np.any((amp > 1.05 * bound) & (amp > cert.floor)):
        slope = _measured_exponent(ys, amp)
        raise DecayError(
            f"sampled decay on Re s = {c:g} is slower than certified p={cert.p:g} "
            f"(measured exponent {slope:.3g})", slope)


@dataclass(frozen=True)
class _LinePlan:
    decay: DecayCertificate
    dcert: DecayCertificate | None
    height: float
    capped: bool


def _plan(F, contour, spec, decay, u=None):
    c = contour.abscissa
    if decay is None:
        decay = estimate_decay(F, c, tol=spec.abs_tol)
    if decay.p < 2:
        raise DecayError(f"decay exponent {decay.p:g} < 2 on Re s = {c:g}", decay.p)
    dcert = None
    if u is not None and decay.K > 0:
        dcert = estimate_decay(_line_derivative(F), c, tol=spec.abs_tol)
    dy = 1.0 / contour.nodes_per_unit
    budget = 0.5 * (contour.max_nodes - 1) * dy
    if contour.height is not None:
        Y = contour.height
    else:
        Y = max(tail_height(decay.K, decay.p, spec.abs_tol), decay.y0, 1.0)
        if dcert is not None:
            umin = float(np.min(np.abs(u)))
            if umin > 0:
                lo, hi = decay.y0, Y
                if oscillatory_tail_bound(decay, dcert, hi, umin) <= spec.abs_tol:
                    for _ in range(60):
                        mid = math.sqrt(lo * hi)
                        if oscillatory_tail_bound(decay, dcert, mid, umin) <= spec.abs_tol:
                            hi = mid
                        else:
                            lo = mid
                    Y = hi
    capped = Y > budget
    Y = min(Y, budget)
    check_decay(F, c, decay, Y)
    return _LinePlan(decay, dcert, Y, capped)


def _tail(plan, c, u):
    t = np.full(np.shape(u), tail_bound(plan.decay, plan.height))
    if plan.dcert is not None:
        t = np.minimum(t, oscillatory_tail_bound(plan.decay, plan.dcert, plan.height, u))
    return np.exp(-c * np.asarray(u)) * t / (2 * math.pi)


def integrate_vertical_line(F: Callable, contour: ContourSpec, spec: QuadratureSpec = DEFAULT_SPEC,
                            decay: DecayCertificate | None = None) -> QuadResult:
    """``(1/2 pi i) int_{c-i inf}^{c+i inf} F(s) ds`` by the trapezoidal rule.

    The line is truncated at ``|Im s| = Y`` where ``Y`` is either given by the
    contour or chosen from the decay certificate (capped by the node budget,
    in which case ``info["capped"]`` is set).  The reported error is the
    certified tail plus the difference to the half-resolution sum.
    """
    c = contour.abscissa
    plan = _plan(F, contour, spec, decay)
    dy = 1.0 / contour.nodes_per_unit
    J = int(math.ceil(plan.height / dy))
    total = 0.0 + 0.0j
    even = 0.0 + 0.0j
    chunk = 1 << 18
    for start in range(-J, J + 1, chunk):
        j = np.arange(start, min(start + chunk, J + 1))
        vals = _line_values(F, c, j * dy)
        total += vals.sum()
        even += vals[j % 2 == 0].sum()
    value = total * dy / (2 * math.pi)
    coarse = even * 2 * dy / (2 * math.pi)
    tail = tail_bound(plan.decay, plan.height) / (2 * math.pi)
    err = tail + abs(value - coarse)
    info = {"height": plan.height, "nodes": 2 * J + 1, "dy": dy, "tail_bound": tail,
            "decay": plan.decay, "abscissa": c, "capped": plan.capped}
    return QuadResult(complex(value), float(err), info)


def vertical_line_transform(G: Callable, contour: ContourSpec, u: np.ndarray,
                            spec: QuadratureSpec = DEFAULT_SPEC,
                            decay: DecayCertificate | None = None) -> QuadResult:
    """``(1/2 pi i) int G(s) exp(-s u) ds`` for an arbitrary array of ``u``.

    ``G`` is sampled once; the phases for all ``u`` are applied chunk-wise as
    a matrix product.  For ``u != 0`` the oscillation of ``exp(-iyu)`` allows
    a lower truncation height than the absolute tail bound would; the
    reported error per ``u`` is the smaller of the two certified tails plus
    the difference to the half-resolution sum.
    """
    c = contour.abscissa
    u = np.atleast_1d(np.asarray(u, dtype=float))
    plan = _plan(G, contour, spec, decay, u=u)
    dy = 1.0 / contour.nodes_per_unit
    J = int(math.ceil(plan.height / dy))
    acc = np.zeros(u.shape, dtype=complex)
    acc_even = np.zeros(u.shape, dtype=complex)
    chunk = max(1024, (1 << 21) // max(1, u.size))
    for start in range(-J, J + 1, chunk):
        j = np.arange(start, min(start + chunk, J + 1))
        y = j * dy
        vals = _line_values(G, c, y)
        phase = np.exp(-1j * np.outer(y, u))
        acc += vals @ phase
        ev = j % 2 == 0
        acc_even += vals[ev] @ phase[ev]
    scale = np.exp(-c * u) * dy / (2 * math.pi)
    value = acc * scale
    coarse = acc_even * 2 * scale
    err = _tail(plan, c, u) + np.abs(value - coarse)
    info = {"height": plan.height, "nodes": 2 * J + 1, "dy": dy, "decay": plan.decay,
            "abscissa": c, "capped": plan.capped}
    return QuadResult(value, err, info)


def vertical_line_lattice(G: Callable, contour: ContourSpec, u0: float, h: float,
                          spec: QuadratureSpec = DEFAULT_SPEC,
                          decay: DecayCertificate | None = None) -> tuple[np.ndarray, QuadResult]:
    """Evaluate ``(1/2 pi i) int G(s) exp(-s u) ds`` on a whole ``u`` lattice.

    The lattice is ``u0 + h*l``, ``l = 0..P-1``, and covers one period
    ``2 pi / dy`` of the trapezoidal sum.  The node spacing ``dy`` is chosen
    as ``2 pi / (P h)`` with ``P`` the smallest integer that keeps
    ``dy <= 1/nodes_per_unit``.  The long sum over nodes is folded modulo
    ``P`` and finished with one FFT, so the cost is one pass over the nodes.

    Values near the two ends of the period are polluted by aliasing; callers
    should use the middle of the lattice (see ``info["period"]``).  The
    returned error is the certified tail only.
    """
    c = contour.abscissa
    dy_max = 1.0 / contour.nodes_per_unit
    P = int(math.ceil(2 * math.pi / (dy_max * h)))
    dy = 2 * math.pi / (P * h)
    plan = _plan(G, contour, spec, decay)
    J = int(math.ceil(plan.height / dy))
    folded = np.zeros(P, dtype=complex)
    l1 = 0.0
    chunk = 1 << 18
    for start in range(-J, J + 1, chunk):
        j = np.arange(start, min(start + chunk, J + 1))
        y = j * dy
        a = _line_values(G, c, y) * np.exp(-1j * y * u0)
        l1 += float(np.abs(a).sum())
        r = j % P
        folded += np.bincount(r, weights=a.real, minlength=P)
        folded += 1j * np.bincount(r, weights=a.imag, minlength=P)
    u = u0 + h * np.arange(P)
    value = np.exp(-c * u) * np.fft.fft(folded) * dy / (2 * math.pi)
    tail = _tail(plan, c, u)
    info = {"height": plan.height, "nodes": 2 * J + 1, "dy": dy, "period": P * h,
            "decay": plan.decay, "abscissa": c, "capped": plan.capped,
            "l1": l1 * dy / (2 * math.pi)}
    return u, QuadResult(value, tail, info)



# ---------------------------------------------------------------------------
# logarithmic derivatives

_CENTRAL = {
    4: np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0,
    6: np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0,
}


def fd_step(order: int, accuracy: int = 6) -> float:
    """Heuristic step ``eps**(1/(accuracy+order))`` balancing truncation and roundoff."""
    return float(np.finfo(float).eps ** (1.0 / (accuracy + max(order, 1))))


def log_derivative(g: np.ndarray, h: float, order: int, accuracy: int = 6) -> np.ndarray:
    """Apply ``(-t d/dt)^order`` to samples on a uniform grid in ``u = ln t``.

    Since ``-t d/dt = -d/du`` this is ``order`` passes of a central
    difference of the given order of accuracy (4 or 6).  Each pass drops
    ``accuracy//2`` points at both ends; nothing is extrapolated.
    """
    if accuracy not in _CENTRAL:
        raise ValueError("accuracy must be 4 or 6")
    if not 0 <= order <= 8:
        raise ValueError("order must be between 0 and 8")
    v = np.asarray(g)
    w = _CENTRAL[accuracy]
    half = accuracy // 2
    need = 2 * half * order + 1
    if v.shape[-1] < need:
        raise ValueError(f"log_derivative of order {order} needs at least {need} points, "
                         f"got {v.shape[-1]}")
    for _ in range(order):
        n = v.shape[-1]
        v = -sum(w[k] * v[..., k:n - 2 * half + k] for k in range(2 * half + 1)) / h
    return v
