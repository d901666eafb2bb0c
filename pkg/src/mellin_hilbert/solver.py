"""Solving ``H rho = e`` on a Mellin strip.

On the Mellin side the equation reads ``-cot(pi s) M[rho](s) = M[e](s)``, so
``M[rho] = F`` with ``F(s) = -tan(pi s) M[e](s)``.  ``F`` has a pole at
``s = 1/2`` unless ``M[e](1/2) = 0``.  When the pole is present the strip
splits: a solution exists on each side of ``Re s = 1/2`` and no solution has
a transform whose strip contains ``1/2``.  The two branches differ by a
multiple of ``t**-1/2``, the residue of ``F(s) t**-s`` at ``1/2``.
"""

from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, ObstructionError, ShapeMismatchError
from .hilbert import UNIT_STRIP, hilbert_direct
from .kernels import contour_residue, solver_symbol, tan_bound
from .mellin import (
    RegularizedInversion,
    StripFunction,
    estimate_growth,
    invert_mellin_regularized,
    log_grid,
    mellin_transform,
)
from .quadrature import DEFAULT_SPEC, ContourSpec, QuadratureSpec
from .strip import HalfLineFunction, Strip

__all__ = [
    "CaseTag",
    "Side",
    "SolvabilityReport",
    "SolutionBranch",
    "SingularityJump",
    "classify",
    "solve",
    "extract_jump",
    "jump_constant",
    "regularization_degree",
    "PRINTED_JUMP_CONSTANT",
    "HALF_DISTANCE",
]

#: constant in front of ``M[e](1/2) t**-1/2`` as usually printed
PRINTED_JUMP_CONSTANT = 4.0 / math.pi
#: smallest admissible distance between a contour and ``Re s = 1/2``
HALF_DISTANCE = 1e-3
#: midpoint contours closer than this to 1/2 are moved off it
_HALF_AVOID = 0.05

_RESIDUAL_SPEC = QuadratureSpec(rel_tol=1e-8, abs_tol=1e-10, max_panels=20000)


class CaseTag(str, enum.Enum):
    UNIQUE = "unique-in-strip"
    TWO_BRANCHES = "two-branches"


class Side(str, enum.Enum):
    MINUS = "minus"
    PLUS = "plus"
    WHOLE = "whole-strip"


@dataclass
class SolvabilityReport:
    """Outcome of :func:`classify`.

    ``value_at_half`` is ``M[e](1/2)`` (``None`` when ``1/2`` is not in the
    strip).  ``m`` is the growth degree of ``M[e]`` fitted on the strip.
    """

    strip: Strip
    value_at_half: complex | None
    case: CaseTag
    m: int
    tol: float
    transform: StripFunction = field(repr=False)
    growth: dict = field(default_factory=dict, repr=False)

    @property
    def half_in_strip(self) -> bool:
        return self.strip.contains(0.5)

    def to_dict(self) -> dict:
        v = self.value_at_half
        return {"case": self.case.value, "strip": self.strip.to_list(),
                "valueAtHalf": None if v is None else [v.real, v.imag],
                "m": self.m, "solvabilityTol": self.tol}


@dataclass
class SolutionBranch:
    """One solution of ``H rho = e`` sampled on a log grid.

    ``residual`` is ``max |H(rho) - e|`` over ``residual_t``; ``nonconverged``
    is set when it exceeds the threshold given to :func:`solve`.
    """

    side: Side
    contour_abscissa: float
    sub_strip: Strip
    t: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    m_used: int
    residual: float | None = None
    residual_t: np.ndarray | None = None
    residual_values: np.ndarray | None = None
    nonconverged: bool = False
    info: dict = field(default_factory=dict, repr=False)
    inversion: RegularizedInversion | None = field(default=None, repr=False)

    def interpolant(self, window: float = 30.0, singular_points=()) -> HalfLineFunction:
        """Cubic spline of the fine-lattice samples in ``u = ln t``, zero outside.

        The spline covers ``|ln t - centre| <= window``; ``singular_points``
        are passed on as quadrature breakpoints.
        """
        inv = self.inversion
        if inv is None:
            raise ValueError("branch carries no fine-lattice samples")
        uc = 0.5 * (np.log(self.t[0]) + np.log(self.t[-1]))
        keep = np.abs(inv.u_fine - uc) <= window
        u = inv.u_fine[keep]
        spl_re = CubicSpline(u, np.real(inv.f_fine[keep]))
        spl_im = CubicSpline(u, np.imag(inv.f_fine[keep]))
        lo, hi = math.exp(u[0]), math.exp(u[-1])

        def rho(t):
            t = np.asarray(t, dtype=float)
            inside = (t >= lo) & (t <= hi)
            ut = np.log(np.where(inside, t, 1.0))
            return np.where(inside, spl_re(ut) + 1j * spl_im(ut), 0.0)

        pts = tuple(p for p in singular_points if lo < p < hi)
        # unit spacing in ln t keeps adaptive panels from stepping over features
        splits = tuple(math.exp(k) for k in range(math.ceil(u[0]), math.floor(u[-1]) + 1))
        return HalfLineFunction(rho, self.sub_strip, f"rho[{self.side.value}]",
                                singular_points=pts, support=(lo, hi), kinks=splits)

    def to_dict(self) -> dict:
        return {"side": self.side.value, "c": self.contour_abscissa,
                "subStrip": self.sub_strip.to_list(), "m": self.m_used,
                "residual": self.residual, "nonconverged": self.nonconverged,
                "maxErrorEstimate": float(np.max(self.errors))}


@dataclass
class SingularityJump:
    """Fit of ``rho_plus - rho_minus = coefficient * t**-1/2``.

    ``kappa_oracle`` is the residue of ``F(s) t**-s`` at ``1/2`` divided by
    ``M[e](1/2) t**-1/2``; ``kappa_fitted`` is ``coefficient / M[e](1/2)``.
    ``printed_constant`` is ``4/pi`` for comparison.
    """

    coefficient: complex
    predicted_from_mellin: complex
    kappa_oracle: float | complex
    kappa_fitted: complex | None
    printed_constant: float
    flatness: float
    t: np.ndarray = field(repr=False)
    scaled_difference: np.ndarray = field(repr=False)

    @property
    def relative_flatness(self) -> float:
        return self.flatness / max(abs(self.coefficient), np.finfo(float).tiny)

    def to_dict(self) -> dict:
        c = self.coefficient
        kf = self.kappa_fitted
        ko = complex(self.kappa_oracle)
        return {"coefficient": [c.real, c.imag],
                "predictedFromMellin": [self.predicted_from_mellin.real, self.predicted_from_mellin.imag],
                "kappaOracle": ko.real if abs(ko.imag) < 1e-12 else [ko.real, ko.imag],
                "kappaFitted": None if kf is None else [kf.real, kf.imag],
                "printedConstant": self.printed_constant,
                "flatness": self.flatness,
                "relativeFlatness": self.relative_flatness}


# ---------------------------------------------------------------------------


def _solver_strip(e: HalfLineFunction, strip: Strip | None) -> Strip:
    if strip is None:
        s = e.strip.intersect(UNIT_STRIP)
        if s is None:
            raise DomainError(f"strip {e.strip} of {e.label} does not meet S(0, 1)")
        return s
    if strip.a < 0 or strip.b > 1:
        raise DomainError(f"solutions are sought in strips inside [0, 1]; got {strip}")
    if not e.strip.contains_strip(strip):
        raise DomainError(f"{strip} is not inside the strip {e.strip} of {e.label}")
    return strip


def classify(e: HalfLineFunction, spec: QuadratureSpec = DEFAULT_SPEC, strip: Strip | None = None,
             transform: StripFunction | None = None) -> SolvabilityReport:
    """Decide between one solution and two branches.

    ``strip`` defaults to ``e.strip`` intersected with ``S(0, 1)``;
    ``transform`` may supply ``M[e]`` in closed form, otherwise it is
    computed by quadrature.  The solvability tolerance is
    ``1e-9 (1 + max |M[e]|)`` over a few sampled points.
    """
    strip = _solver_strip(e, strip)
    if transform is None:
        transform = mellin_transform(e, spec, estimate=False)
    m, K, growth = estimate_growth(transform, strip)
    mid = strip.midpoint()
    probe = np.array([mid, mid + 1j, mid - 1j, mid + 5j, 0.5 * (strip.a + mid), 0.5 * (mid + strip.b)])
    scale = float(np.max(np.abs(transform(probe))))
    tol = 1e-9 * (1 + scale)
    value = None
    case = CaseTag.UNIQUE
    if strip.contains(0.5):
        value = complex(transform(0.5))
        if abs(value) > tol:
            case = CaseTag.TWO_BRANCHES
    growth = dict(growth, constant=K)
    return SolvabilityReport(strip, value, case, m, tol, transform, growth)


def _default_contour(strip: Strip) -> float:
    c = strip.midpoint()
    if strip.contains(0.5) and abs(c - 0.5) < _HALF_AVOID:
        c = 0.5 * (strip.a + 0.5)
    return c


def _branch_plan(report: SolvabilityReport, contour, contours, sub_strip):
    strip = report.strip
    if report.case is CaseTag.UNIQUE:
        if contours is not None:
            cs = list(contours)
        else:
            cs = [contour if contour is not None else _default_contour(strip)]
        plan = []
        for c in cs:
            if not strip.contains(c):
                raise DomainError(f"contour Re s = {c} is outside {strip}")
            side = Side.WHOLE
            if report.half_in_strip and len(cs) > 1:
                side = Side.MINUS if c < 0.5 else Side.PLUS
            plan.append((side, c, strip))
        return plan

    # two branches: 1/2 is a pole of F
    if sub_strip is not None and sub_strip.contains(0.5):
        raise ObstructionError(
            f"no solution exists whose Mellin strip contains s = 1/2 (requested {sub_strip}); "
            f"M[e](1/2) = {report.value_at_half:.6g} is non-zero")
    minus = Strip(strip.a, 0.5)
    plus = Strip(0.5, strip.b)
    if contours is not None:
        cs = list(contours)
    elif contour is not None:
        cs = [contour]
    elif sub_strip is not None:
        cs = [sub_strip.midpoint()]
    else:
        cs = [0.5 * (strip.a + 0.5), 0.5 * (0.5 + strip.b)]
    plan = []
    for c in cs:
        if abs(c - 0.5) < HALF_DISTANCE:
            raise ObstructionError(
                f"contour Re s = {c} passes within {HALF_DISTANCE} of the pole at 1/2; "
                "no solution exists whose Mellin strip contains s = 1/2")
        if not strip.contains(c):
            raise DomainError(f"contour Re s = {c} is outside {strip}")
        side, sub = (Side.MINUS, minus) if c < 0.5 else (Side.PLUS, plus)
        if sub_strip is not None:
            sub = sub_strip
            if not sub.contains(c):
                raise DomainError(f"contour Re s = {c} is outside the requested {sub_strip}")
        plan.append((side, c, sub))
    return plan


def regularization_degree(fitted_exponent: float, target: float = 3.5) -> int:
    """Degree ``m >= -2`` so that ``F s**-(m+2)`` decays at least like ``|s|**-target``.

    ``fitted_exponent`` is the log-log growth slope of ``M[e]``; ``tan`` is
    bounded on vertical lines away from its poles, so ``F`` has the same
    slope.  Fast decaying transforms get ``m = -2``: no differences at all.
    """
    if not math.isfinite(fitted_exponent):
        return -2
    return max(0, math.ceil(fitted_exponent + target - 0.05)) - 2


def _near_singular(t, points, du=0.15):
    t = np.asarray(t, dtype=float)
    mask = np.zeros(t.shape, dtype=bool)
    for p in points:
        mask |= np.abs(np.log(t) - math.log(p)) < du
    return mask


def solve(e: HalfLineFunction, report: SolvabilityReport, *, contour: float | None = None,
          contours=None, sub_strip: Strip | None = None, m: int | None = None, extra_order: int | None = None,
          t_grid: np.ndarray | None = None, spec: QuadratureSpec = DEFAULT_SPEC, tol: float = 1e-10,
          residual: bool = True, residual_grid: np.ndarray | None = None,
          residual_threshold: float = 1e-4, window: float = 30.0,
          workers: int = 1) -> list[SolutionBranch]:
    """Invert ``F(s) = -tan(pi s) M[e](s)`` on one or two contours.

    Parameters
    ----------
    contour, contours
        Abscissae to use.  By default the strip midpoint (moved to
        ``(a + 1/2)/2`` if it is within 0.05 of 1/2) in the single-solution
        case and ``(a + 1/2)/2``, ``(1/2 + b)/2`` for two branches.
    sub_strip
        Requested strip of validity; in the two-branch case a strip
        containing ``1/2`` raises :class:`ObstructionError`.
    m, extra_order
        Growth degree (default ``report.m``) and the number of extra
        regularising powers of ``s``; the inversion uses ``m + extra_order``.
        With both left at ``None`` the degree comes from
        :func:`regularization_degree`; with only ``m`` given one extra power
        is used.
    t_grid
        Log-uniform output grid, default ``10**(k/8)``, ``|k| <= 24``.
    residual_threshold
        Branches with ``max |H(rho) - e|`` above it are returned with
        ``nonconverged`` set and a warning.
    workers
        Branches are computed in up to this many threads.
    """
    if t_grid is None:
        t_grid = log_grid(-24, 24, 8)
    m_base = report.m if m is None else int(m)
    if extra_order is None:
        m_used = regularization_degree(report.growth.get("fitted_exponent", m_base)) if m is None \
            else m_base + 1
    else:
        m_used = m_base + int(extra_order)
    M = report.transform
    two = report.case is CaseTag.TWO_BRANCHES

    def F(s):
        return solver_symbol(s) * M(s)

    def run(plan):
        side, c, sub = plan
        sing = (0.5,) if two else ()
        Fsf = StripFunction(sub, F, m_base, report.growth.get("constant", 1.0), sing, "F")
        bound = tan_bound(c, 0.0 if abs(c - 0.5) >= HALF_DISTANCE else 1.0)
        inv = invert_mellin_regularized(Fsf, m_used, ContourSpec(c), t_grid, spec, tol=tol)
        info = dict(inv.info)
        info["tan_bound"] = {"bound": bound.bound, "regime": bound.regime}
        br = SolutionBranch(side, c, sub, inv.t, inv.values, inv.errors, m_used,
                            info=info, inversion=inv)
        if residual:
            _attach_residual(br, e, residual_grid, window, residual_threshold)
        return br

    plans = _branch_plan(report, contour, contours, sub_strip)
    if workers > 1 and len(plans) > 1:
        with ThreadPoolExecutor(max_workers=min(workers, len(plans))) as pool:
            return list(pool.map(run, plans))
    return [run(p) for p in plans]


def _attach_residual(br: SolutionBranch, e: HalfLineFunction, grid, window, threshold):
    if grid is None:
        grid = 10.0 ** (np.arange(-8, 9) / 4)
    grid = np.asarray(grid, dtype=float)
    grid = grid[~_near_singular(grid, e.breakpoints())]
    rho = br.interpolant(window, e.breakpoints())
    h_rho = hilbert_direct(rho, grid, _RESIDUAL_SPEC).value
    res = h_rho - e(grid)
    br.residual_t = grid
    br.residual_values = res
    br.residual = float(np.max(np.abs(res))) if res.size else 0.0
    if br.residual > threshold:
        br.nonconverged = True
        warnings.warn(f"branch {br.side.value} at c={br.contour_abscissa:g}: residual "
                      f"{br.residual:.3g} exceeds {threshold:.3g}", RuntimeWarning, stacklevel=3)


# ---------------------------------------------------------------------------
# the t**-1/2 jump


def jump_constant(report: SolvabilityReport, n: int = 256) -> complex:
    """``Res(F(s) t**-s, 1/2) / (M[e](1/2) t**-1/2)`` by circular quadrature at ``t = 1``."""
    v = report.value_at_half
    if v is None or v == 0:
        raise DomainError("the jump constant needs M[e](1/2) != 0")
    strip = report.strip
    r = 0.5 * min(0.5 - strip.a, strip.b - 0.5, 0.25)
    M = report.transform

    def F(s):
        return solver_symbol(s) * M(s)

    res, _ = contour_residue(F, 0.5, r, n)
    return res / v


def extract_jump(minus: SolutionBranch, plus: SolutionBranch, report: SolvabilityReport,
                 t_range: tuple[float, float] = (1e-2, 1e2), exclude=(),
                 flat_rel: float = 1e-3, flat_abs: float = 1e-6) -> SingularityJump:
    """Fit ``sqrt(t) (rho_plus - rho_minus)`` to a constant.

    Grid points within ``|ln t - ln p| < 0.15`` of a point ``p`` in
    ``exclude`` are skipped.  A fit whose maximal deviation exceeds
    ``max(flat_rel |coefficient|, flat_abs)`` raises
    :class:`ShapeMismatchError`.
    """
    if minus.side is Side.PLUS or plus.side is Side.MINUS:
        raise DomainError("extract_jump needs a minus and a plus branch")
    common, im, ip = np.intersect1d(np.round(np.log(minus.t), 9), np.round(np.log(plus.t), 9),
                                    return_indices=True)
    t = minus.t[im]
    keep = (t >= t_range[0] * (1 - 1e-12)) & (t <= t_range[1] * (1 + 1e-12))
    keep &= ~_near_singular(t, exclude)
    if keep.sum() < 2:
        raise DomainError("branches share fewer than two grid points in the fit range")
    t = t[keep]
    d = (plus.values[ip] - minus.values[im])[keep] * np.sqrt(t)
    coef = complex(np.mean(d))
    flat = float(np.max(np.abs(d - coef)))
    if flat > max(flat_rel * abs(coef), flat_abs):
        raise ShapeMismatchError(
            f"sqrt(t) * (rho_plus - rho_minus) varies by {flat:.3g} around {abs(coef):.3g}; "
            "the branch difference is not a pure t**-1/2 profile")
    v = report.value_at_half
    if v is not None and abs(v) > report.tol:
        kappa = jump_constant(report)
        kfit = coef / v
    else:
        kappa = jump_constant_default()
        kfit = None
    predicted = complex(kappa * (v or 0.0))
    return SingularityJump(coef, predicted, kappa, kfit, PRINTED_JUMP_CONSTANT, flat, t, d)


def jump_constant_default() -> float:
    """Residue constant ``1/pi`` of ``-tan(pi s)`` at ``1/2``, used when ``M[e](1/2) = 0``."""
    return 1.0 / math.pi
