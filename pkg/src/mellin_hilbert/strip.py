"""Vertical strips, half-line functions and membership diagnostics.

A :class:`Strip` is the open set ``a < Re s < b`` with either end allowed to
be infinite.  A :class:`HalfLineFunction` is a vectorised evaluator on
``(0, inf)`` together with the strip on which its Mellin transform is
claimed to exist.  :func:`test_function_norm` and :func:`check_membership`
are sampling diagnostics for those claims; neither is a proof.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError

__all__ = [
    "Strip",
    "HalfLineFunction",
    "NormEstimate",
    "Membership",
    "MembershipDiagnostic",
    "test_function_norm",
    "check_membership",
    "zeta_weight",
]


@dataclass(frozen=True)
class Strip:
    """Open vertical strip ``a < Re s < b``; ``a`` may be ``-inf``, ``b`` ``+inf``."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if math.isnan(a) or math.isnan(b):
            raise DomainError("strip endpoints must not be NaN")
        if a == math.inf or b == -math.inf:
            raise DomainError(f"strip endpoints out of order: ({a}, {b})")
        if not a < b:
            raise DomainError(f"degenerate or empty strip ({a}, {b}); need a < b")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def contains(self, s) -> bool | np.ndarray:
        """True where ``a < Re s < b`` (works elementwise on arrays)."""
        x = np.real(s)
        res = (self.a < x) & (x < self.b)
        return bool(res) if np.ndim(res) == 0 else res

    def __contains__(self, s) -> bool:
        return bool(self.contains(s))

    def contains_strip(self, other: "Strip") -> bool:
        return self.a <= other.a and other.b <= self.b

    def intersect(self, other: "Strip") -> "Strip | None":
        """Intersection, or ``None`` when it is empty."""
        a, b = max(self.a, other.a), min(self.b, other.b)
        return Strip(a, b) if a < b else None

    @property
    def width(self) -> float:
        return self.b - self.a

    def midpoint(self) -> float:
        """A representative abscissa: the midpoint, or one unit inside a half-infinite strip."""
        fa, fb = math.isfinite(self.a), math.isfinite(self.b)
        if fa and fb:
            return 0.5 * (self.a + self.b)
        if fa:
            return self.a + 1.0
        if fb:
            return self.b - 1.0
        return 0.0

    def distance_to_edge(self, x: float) -> float:
        return min(x - self.a, self.b - x)

    def __str__(self) -> str:
        return f"S({self.a:g}, {self.b:g})"

    def to_list(self) -> list[float]:
        return [self.a, self.b]


@dataclass(frozen=True)
class HalfLineFunction:
    """A function on ``(0, inf)`` with a declared Mellin strip.

    Parameters
    ----------
    func
        Vectorised evaluator ``t -> f(t)`` accepting a float array.
    strip
        Strip on which ``M[f]`` is claimed to converge.
    label
        Identifier used in reports.
    singular_points
        Points where ``f`` is discontinuous or singular.  Quadrature routines
        split there and principal values refuse them.
    support
        Closed interval outside of which ``f`` vanishes.
    kinks
        Points where ``f`` is continuous but not smooth; used only to split
        quadrature panels.
    derivatives
        Optional analytic derivatives ``(f', f'', ...)`` for
        :func:`test_function_norm`.
    """

    func: Callable[[np.ndarray], np.ndarray]
    strip: Strip
    label: str = "f"
    singular_points: tuple[float, ...] = ()
    support: tuple[float, float] = (0.0, math.inf)
    kinks: tuple[float, ...] = field(default=(), repr=False)
    derivatives: tuple[Callable, ...] = field(default=(), repr=False)

    def __post_init__(self):
        lo, hi = self.support
        if not (0 <= lo < hi):
            raise DomainError(f"invalid support {self.support!r}")
        object.__setattr__(self, "singular_points",
                           tuple(sorted(float(p) for p in self.singular_points)))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(self.func(t), dtype=complex)

    def breakpoints(self) -> tuple[float, ...]:
        """Singular points plus finite positive support ends."""
        pts = set(self.singular_points)
        for p in self.support:
            if 0 < p < math.inf:
                pts.add(float(p))
        return tuple(sorted(pts))

    def split_points(self) -> tuple[float, ...]:
        """Breakpoints plus kinks: everywhere quadrature panels should end."""
        return tuple(sorted(set(self.breakpoints()) | {float(k) for k in self.kinks}))

    def scaled(self, c: complex, label: str | None = None) -> "HalfLineFunction":
        """The function ``c*f`` with the same strip and metadata."""
        f = self.func
        derivs = tuple((lambda t, d=d: c * np.asarray(d(t), dtype=complex)) for d in self.derivatives)
        return HalfLineFunction(lambda t: c * np.asarray(f(t), dtype=complex), self.strip,
                                label or f"{c}*{self.label}", self.singular_points,
                                self.support, self.kinks, derivs)


# ---------------------------------------------------------------------------
# test-function norms


def zeta_weight(t: np.ndarray, a1: float, a2: float) -> np.ndarray:
    """``t**-a1`` on ``(0, 1]`` and ``t**-a2`` on ``(1, inf)``.

    An infinite ``a1`` (resp. ``a2``) is read as the limit of the weight,
    which vanishes for ``t < 1`` (resp. ``t > 1``).
    """
    t = np.asarray(t, dtype=float)
    with np.errstate(over="ignore", under="ignore"):
        lo = np.where(t < 1, 0.0, 1.0) if a1 == -math.inf else t ** (-a1)
        hi = np.zeros_like(t) if a2 == math.inf else t ** (-a2)
    return np.where(t <= 1, lo, hi)


def _stirling_first(k: int) -> list[int]:
    """Signed Stirling numbers ``s(k, j)``, ``j = 0..k``."""
    row = [1]
    for n in range(k):
        nxt = [0] * (len(row) + 1)
        for j, v in enumerate(row):
            nxt[j + 1] += v
            nxt[j] -= n * v
        row = nxt
    return row


def _tk_derivative(phi: HalfLineFunction, t: np.ndarray, k: int, h: float = 2e-3) -> np.ndarray:
    """``t**k * phi^(k)(t)`` from analytic derivatives or log-grid differences.

    Uses ``t^k d^k/dt^k = sum_j s(k, j) (t d/dt)^j`` and ``t d/dt = d/du``.
    """
    from .quadrature import log_derivative

    if k == 0:
        return phi(t)
    if len(phi.derivatives) >= k:
        return t ** k * np.asarray(phi.derivatives[k - 1](t), dtype=complex)
    width = 3 * k
    offs = np.arange(-width, width + 1) * h
    u = np.log(t)[:, None] + offs[None, :]
    vals = phi(np.exp(u))
    if not np.all(np.isfinite(vals)):
        bad = np.exp(u[~np.isfinite(vals)])[0]
        raise DomainError(f"derivative of {phi.label} not evaluable near t={bad:.6g}")
    coeffs = _stirling_first(k)
    out = np.zeros(t.shape, dtype=complex)
    for j in range(1, k + 1):
        dj = log_derivative(vals, h, j)  # (-d/du)^j
        mid = dj.shape[-1] // 2
        out += coeffs[j] * (-1) ** j * dj[:, mid]
    return out


@dataclass(frozen=True)
class NormEstimate:
    """Sampled lower bound for a test-function norm.

    ``sups`` holds the grid supremum at each refinement level and ``grids``
    the matching ``(J, step)`` pairs (grid ``t = 2**j``, ``|j| <= J``).
    """

    value: float
    diverging: bool
    sups: tuple[float, ...]
    grids: tuple[tuple[int, float], ...]
    argmax: float

    @property
    def finite(self) -> bool:
        return not self.diverging and math.isfinite(self.value)


def test_function_norm(phi: HalfLineFunction, a1: float, a2: float, k: int,
                       levels: Sequence[int] = (40, 80, 160)) -> NormEstimate:
    """Estimate ``sup_t zeta(t) t**(k+1) |phi^(k)(t)|`` on refining log grids.

    Level ``J`` samples ``t = 2**j`` for ``j`` in ``[-J, J]`` with step
    ``40/J``, so each refinement both widens and densifies the grid.  The
    result is flagged as diverging when the supremum grows by more than a
    factor two at two consecutive refinements.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if not a1 < a2:
        raise DomainError("need a1 < a2")
    sups = []
    grids = []
    argmax = 1.0
    for J in levels:
        step = 40.0 / J
        j = np.arange(-J, J + step / 2, step)
        t = 2.0 ** j
        vals = np.abs(_tk_derivative(phi, t, k)) * t
        if not np.all(np.isfinite(vals)):
            bad = t[~np.isfinite(vals)][0]
            raise DomainError(f"{phi.label}: k={k} derivative not evaluable at t={bad:.6g}")
        with np.errstate(over="ignore", invalid="ignore"):
            weighted = zeta_weight(t, a1, a2) * vals
        weighted = np.nan_to_num(weighted, nan=0.0, posinf=math.inf)
        i = int(np.argmax(weighted))
        sups.append(float(weighted[i]))
        grids.append((int(J), float(step)))
        argmax = float(t[i])
    ratios = [b / a if a > 0 else (math.inf if b > 0 else 1.0) for a, b in zip(sups, sups[1:])]
    diverging = any(r1 > 2 and r2 > 2 for r1, r2 in zip(ratios, ratios[1:])) or not math.isfinite(sups[-1])
    return NormEstimate(sups[-1], diverging, tuple(sups), tuple(grids), argmax)


# ---------------------------------------------------------------------------
# membership


class Membership(str, enum.Enum):
    CONSISTENT = "consistent"
    INCONSISTENT_AT_0 = "inconsistent-at-0"
    INCONSISTENT_AT_INF = "inconsistent-at-inf"


@dataclass(frozen=True)
class MembershipDiagnostic:
    """Outcome of :func:`check_membership`.

    ``growth_at_0`` / ``growth_at_inf`` are the fitted exponents ``g`` in
    ``|f(t)| t**(a+delta) ~ t**-g`` as ``t -> 0`` (resp. ``t**g`` as
    ``t -> inf``); positive values mean the weighted function grows.
    """

    status: Membership
    growth_at_0: float | None
    growth_at_inf: float | None

    @property
    def consistent(self) -> bool:
        return self.status is Membership.CONSISTENT


def _growth_rate(t: np.ndarray, w: np.ndarray) -> float | None:
    # fitted d ln w / d |ln t| over the far half of the samples
    keep = w > 0
    if keep.sum() < 4:
        return None
    x = np.abs(np.log(t[keep]))
    y = np.log(w[keep])
    far = x >= np.median(x)
    if far.sum() < 2:
        return None
    return float(np.polyfit(x[far], y[far], 1)[0])


def check_membership(f: HalfLineFunction, candidate: Strip, delta: float = 0.05,
                     depth: int = 200) -> MembershipDiagnostic:
    """Check sampled decay of ``f`` against a candidate strip.

    Near 0, ``|f(t)| t**(a+delta)`` is sampled at ``t = 2**-j``; near
    infinity ``|f(t)| t**(b-delta)`` at ``t = 2**j`` (``j = 1..depth``).  A
    weighted profile that keeps growing at rate above ``delta/2`` counts as
    unbounded.  Infinite endpoints skip their check.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    j = np.arange(1, depth + 1, dtype=float)
    g0 = ginf = None
    status = Membership.CONSISTENT
    if math.isfinite(candidate.a):
        t = 2.0 ** -j
        with np.errstate(over="ignore", invalid="ignore"):
            w = np.abs(f(t)) * t ** (candidate.a + delta)
        w = np.nan_to_num(w, nan=math.inf)
        g0 = math.inf if not np.all(np.isfinite(w)) else _growth_rate(t, w)
        if g0 is not None and g0 > delta / 2:
            status = Membership.INCONSISTENT_AT_0
    if math.isfinite(candidate.b):
        t = 2.0 ** j
        with np.errstate(over="ignore", invalid="ignore"):
            w = np.abs(f(t)) * t ** (candidate.b - delta)
        w = np.nan_to_num(w, nan=math.inf)
        ginf = math.inf if not np.all(np.isfinite(w)) else _growth_rate(t, w)
        if status is Membership.CONSISTENT and ginf is not None and ginf > delta / 2:
            status = Membership.INCONSISTENT_AT_INF
    return MembershipDiagnostic(status, g0, ginf)
test_function_norm.__test__ = False  # keep pytest from collecting it
