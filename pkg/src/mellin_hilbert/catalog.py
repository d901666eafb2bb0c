"""Built-in functions with known Mellin and Hilbert transforms.

Each :class:`CatalogEntry` pairs a :class:`HalfLineFunction` with closed
forms that serve as oracles for the numerical routes.  Entries are looked up
by id with :func:`get_entry`; ``powercut`` takes its exponent in the id,
e.g. ``"powercut(0.25)"``.
"""

from __future__ import annotations

import csv
import functools
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.special import spence

from .errors import DomainError
from .kernels import cot_pi
from .mellin import StripFunction, estimate_growth
from .strip import HalfLineFunction, Strip

__all__ = [
    "CatalogEntry",
    "get_entry",
    "list_entries",
    "indicator",
    "powercut",
    "samples",
    "load_samples",
    "bump",
    "bump_mellin",
    "expisqrt_mellin",
    "EXPISQRT_END",
]

EXPISQRT_END = (2 * math.pi) ** 2
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class CatalogEntry:
    """A test function with its oracles.

    ``extras`` holds further closed forms keyed by name, e.g. the two
    solution branches ``rho_minus`` / ``rho_plus`` for the indicator, or
    ``solution`` for a manufactured right-hand side.
    """

    id: str
    function: HalfLineFunction
    known_mellin: StripFunction | None = None
    known_hilbert: Callable | None = None
    notes: str = ""
    extras: dict = field(default_factory=dict, compare=False)


def _with_growth(strip: Strip, func: Callable, label: str) -> StripFunction:
    m, K, meta = estimate_growth(func, strip)
    return StripFunction(strip, func, m, K, (), label, meta)


def _c(s):
    return np.asarray(s, dtype=complex)


# ---------------------------------------------------------------------------
# elementary families


def indicator(lo: float, hi: float) -> CatalogEntry:
    """``1`` on ``(lo, hi)``, zero elsewhere; ``0 <= lo < hi <= inf``."""
    if not (0 <= lo < hi) or math.isinf(lo):
        raise DomainError(f"indicator needs 0 <= lo < hi, got ({lo}, {hi})")
    if math.isinf(hi):
        if lo == 0:
            raise DomainError("the indicator of (0, inf) has no Mellin strip")
        strip = Strip(-math.inf, 0.0)
    else:
        strip = Strip(0.0 if lo == 0 else -math.inf, math.inf)

    def f(t):
        return ((t > lo) & (t < hi)).astype(float)

    def M(s):
        s = _c(s)
        top = 0.0 if math.isinf(hi) else np.exp(s * math.log(hi))
        bottom = 0.0 if lo == 0 else np.exp(s * math.log(lo))
        return (top - bottom) / s

    def H(x):
        x = np.asarray(x, dtype=float)
        if math.isinf(hi):
            with np.errstate(divide="ignore"):
                return np.log(np.abs(x - lo)) / math.pi
        # ln|(x-lo)/(x-hi)| = ln|1 + r| with r = (hi-lo)/(x-hi); log1p keeps
        # the decay ~ (hi-lo)/x for large x free of cancellation
        with np.errstate(divide="ignore", invalid="ignore"):
            r = (hi - lo) / (x - hi)
            direct = np.log(np.abs(x - lo)) - np.log(np.abs(x - hi))
            v = np.where(np.abs(r) < 0.5, np.log1p(r), direct)
        return v / math.pi

    label = f"indicator({lo:g},{hi:g})"
    fn = HalfLineFunction(f, strip, label, singular_points=tuple(p for p in (lo, hi) if 0 < p < math.inf),
                          support=(lo, hi))
    return CatalogEntry(label, fn, _with_growth(strip, M, f"M[{label}]"), H,
                        "M = (hi^s - lo^s)/s; Hf = (1/pi) ln|x-lo|/|x-hi|")


def powercut(p: float) -> CatalogEntry:
    """``t**-p`` on ``(0, 1)``: ``M = 1/(s-p)`` on ``S(p, inf)``."""
    p = float(p)
    if not math.isfinite(p):
        raise DomainError("powercut exponent must be finite")
    strip = Strip(p, math.inf)

    def f(t):
        t = np.asarray(t, dtype=float)
        return np.where(t < 1, np.minimum(t, 1.0) ** -p, 0.0)

    def M(s):
        return 1.0 / (_c(s) - p)

    label = f"powercut({p:g})"
    fn = HalfLineFunction(f, strip, label, singular_points=(1.0,), support=(0.0, 1.0))
    return CatalogEntry(label, fn, _with_growth(strip, M, f"M[{label}]"), None, "M = 1/(s-p)")


def _li2(z):
    """Dilogarithm on ``[0, 1]``; the power series keeps relative accuracy near 0."""
    z = np.asarray(z, dtype=float)
    zs = np.where(z < 0.5, z, 0.0)
    k = np.arange(1, 60)
    series = np.sum(zs[..., None] ** k / k ** 2, axis=-1)
    return np.where(z < 0.5, series, spence(1 - z))


def _neglog01() -> CatalogEntry:
    strip = Strip(0.0, math.inf)

    def f(t):
        t = np.asarray(t, dtype=float)
        return np.where(t < 1, -np.log(np.minimum(t, 1.0)), 0.0)

    def M(s):
        return 1.0 / _c(s) ** 2

    def H(x):
        # pv int_0^1 -ln y/(x-y) dy, reduced to the dilogarithm by y = x w;
        # for x > 1 the reflection formula leaves Li2(1/x)
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            small = np.log(x) * np.log(np.abs(1 / x - 1)) + math.pi ** 2 / 6 - spence(1 / x)
            large = _li2(1 / np.maximum(x, 1.0))
        return np.where(x > 1, large, small) / math.pi

    fn = HalfLineFunction(f, strip, "neglog01", support=(0.0, 1.0), kinks=(1.0,))
    return CatalogEntry("neglog01", fn, _with_growth(strip, M, "M[neglog01]"), H,
                        "-ln t on (0,1); M = 1/s^2; Hf via Spence's function")


def _indicator01() -> CatalogEntry:
    base = indicator(0.0, 1.0)

    def rho_minus(t):
        r = np.sqrt(np.asarray(t, dtype=float))
        with np.errstate(divide="ignore"):
            return -np.log(np.abs((1 + r) / (1 - r))) / math.pi

    def rho_plus(t):
        t = np.asarray(t, dtype=float)
        return rho_minus(t) + 2.0 / (math.pi * np.sqrt(t))

    fn = HalfLineFunction(base.function.func, base.function.strip, "indicator01",
                          singular_points=(1.0,), support=(0.0, 1.0))
    mellin = StripFunction(base.known_mellin.strip, lambda s: 1.0 / _c(s),
                           base.known_mellin.growth_degree, base.known_mellin.growth_constant,
                           (), "M[indicator01]", base.known_mellin.metadata)
    return CatalogEntry("indicator01", fn, mellin, base.known_hilbert,
                        "M = 1/s on S(0, inf); Hf = (1/pi) ln(x/|1-x|)",
                        {"rho_minus": rho_minus, "rho_plus": rho_plus})


# ---------------------------------------------------------------------------
# smooth bump on (1, 2)


def bump(t):
    """``exp(-1/(1-v**2))`` with ``v = 2t - 3`` on ``(1, 2)``, zero elsewhere."""
    t = np.asarray(t, dtype=float)
    v = 2 * t - 3
    inside = np.abs(v) < 1
    w = np.where(inside, 1 - np.where(inside, v, 0.0) ** 2, 1.0)
    return np.where(inside, np.exp(-1.0 / w), 0.0)


@functools.lru_cache(maxsize=16)
def _bump_nodes(n: int):
    u = np.arange(1, n) * (_LN2 / n)
    return u, bump(np.exp(u)) * (_LN2 / n)


def bump_mellin(s):
    """``M[bump](s) = int_0^{ln 2} bump(e^u) e^{su} du`` by the trapezoidal rule.

    The integrand is smooth with all derivatives vanishing at both ends, so
    the rule converges faster than any power of the node count.  The count
    grows with ``|Im s|`` to keep the aliased frequency ``2 pi n / ln 2 - |Im s|``
    above ``8e3``, where the transform is below ``1e-30``.
    """
    s = _c(s)
    flat = s.ravel()
    out = np.empty(flat.shape, dtype=complex)
    need = (np.abs(flat.imag) + 8e3) * _LN2 / (2 * math.pi)
    levels = 2 ** np.ceil(np.log2(np.maximum(need, 1024))).astype(int)
    for n in np.unique(levels):
        idx = np.nonzero(levels == n)[0]
        u, w = _bump_nodes(int(n))
        chunk = max(1, (1 << 22) // u.size)
        for k in range(0, idx.size, chunk):
            sel = idx[k:k + chunk]
            out[sel] = np.exp(np.outer(flat[sel], u)) @ w
    return out.reshape(s.shape)


def _bump12() -> CatalogEntry:
    strip = Strip(-math.inf, math.inf)
    # smooth at 1 and 2, so these are panel splits rather than discontinuities
    fn = HalfLineFunction(bump, strip, "bump12", kinks=(1.0, 2.0))
    return CatalogEntry("bump12", fn, _with_growth(strip, bump_mellin, "M[bump12]"), None,
                        "smooth bump on (1,2); entire Mellin transform by spectral quadrature")


def _bump_image() -> CatalogEntry:
    # e = H(bump12); its Mellin transform is the symbol times M[bump]
    from .hilbert import hilbert_direct

    b = _bump12().function
    strip = Strip(0.0, 1.0)

    def e(t):
        t = np.asarray(t, dtype=float)
        return np.asarray(hilbert_direct(b, t.ravel()).value).reshape(t.shape)

    def M(s):
        return -cot_pi(s) * bump_mellin(s)

    fn = HalfLineFunction(e, strip, "bump-image")
    return CatalogEntry("bump-image", fn, _with_growth(strip, M, "M[bump-image]"), None,
                        "e = H(bump12); M[e] = -cot(pi s) M[bump12]",
                        {"solution": bump})


# ---------------------------------------------------------------------------
# exp(i sqrt t) on (0, (2 pi)^2)


def expisqrt_mellin(s, terms: int = 90):
    """``int_0^{(2pi)^2} e^{i sqrt t} t^{s-1} dt = 2 int_0^{2pi} e^{iv} v^{2s-1} dv``.

    Uses ``int_0^X e^{iv} v^{a-1} dv = e^{iX} X^a sum_k (-iX)^k / (a (a+1) ... (a+k))``
    with ``X = 2 pi`` (so ``e^{iX} = 1``), which converges for every ``a``.
    """
    a = 2 * _c(s)
    X = 2 * math.pi
    term = 1.0 / a
    total = term.copy()
    for k in range(1, terms):
        term = term * (-1j * X) / (a + k)
        total = total + term
        if np.all(np.abs(term) <= 1e-18 * np.maximum(np.abs(total), 1e-300)):
            break
    return 2.0 * np.exp(a * math.log(X)) * total


def _expisqrt() -> CatalogEntry:
    strip = Strip(0.0, math.inf)

    def f(t):
        t = np.asarray(t, dtype=float)
        return np.where(t < EXPISQRT_END, np.exp(1j * np.sqrt(t)), 0.0)

    fn = HalfLineFunction(f, strip, "expisqrt", singular_points=(EXPISQRT_END,),
                          support=(0.0, EXPISQRT_END))
    return CatalogEntry("expisqrt", fn, _with_growth(strip, expisqrt_mellin, "M[expisqrt]"), None,
                        "exp(i sqrt t) on (0,(2pi)^2); M[e](1/2) = 0")


# ---------------------------------------------------------------------------
# sampled functions


def _segment_moments(z):
    # E1 = (e^z - 1)/z and E2 = ((z-1)e^z + 1)/z^2, with series near 0
    small = np.abs(z) < 0.5
    zs = np.where(small, z, 0.0)
    e1s = np.zeros_like(z)
    e2s = np.zeros_like(z)
    term = np.ones_like(z)
    for k in range(0, 25):
        e1s = e1s + term / (k + 1)
        e2s = e2s + term / (k + 2)
        term = term * zs / (k + 1)
    zl = np.where(small, 1.0, z)
    ez = np.exp(zl)
    e1 = np.where(small, e1s, (ez - 1) / zl)
    e2 = np.where(small, e2s, ((zl - 1) * ez + 1) / zl ** 2)
    return e1, e2


def samples(t_nodes, values, strip: Strip, label: str = "samples") -> CatalogEntry:
    """Linear interpolation in ``ln t`` through ``(t_k, values_k)``, zero outside.

    The Mellin transform is exact: on each segment the integrand is
    ``(A + B w) e^{s(u_k + w)}`` with ``w`` in ``[0, du]``.
    """
    t_nodes = np.asarray(t_nodes, dtype=float)
    vals = np.asarray(values, dtype=complex)
    if t_nodes.ndim != 1 or t_nodes.size < 2 or vals.shape != t_nodes.shape:
        raise DomainError("samples need matching 1-D arrays with at least two points")
    if np.any(t_nodes <= 0) or np.any(np.diff(t_nodes) <= 0):
        raise DomainError("sample abscissae must be positive and strictly increasing")
    if not np.all(np.isfinite(vals)):
        raise DomainError("sample values must be finite")
    u = np.log(t_nodes)
    du = np.diff(u)
    slope = np.diff(vals) / du

    def f(t):
        t = np.asarray(t, dtype=float)
        inside = (t >= t_nodes[0]) & (t <= t_nodes[-1])
        ut = np.log(np.where(inside, t, t_nodes[0]))
        re = np.interp(ut, u, vals.real)
        im = np.interp(ut, u, vals.imag)
        return np.where(inside, re + 1j * im, 0.0)

    def M(s):
        s = _c(s)
        flat = s.ravel()
        out = np.zeros(flat.shape, dtype=complex)
        for k in range(du.size):
            z = flat * du[k]
            e1, e2 = _segment_moments(z)
            out += np.exp(flat * u[k]) * (vals[k] * du[k] * e1 + slope[k] * du[k] ** 2 * e2)
        return out.reshape(s.shape)

    sing = tuple(p for p, v in ((t_nodes[0], vals[0]), (t_nodes[-1], vals[-1])) if v != 0)
    fn = HalfLineFunction(f, strip, label, singular_points=sing,
                          support=(float(t_nodes[0]), float(t_nodes[-1])),
                          kinks=tuple(float(x) for x in t_nodes[1:-1]))
    return CatalogEntry(label, fn, _with_growth(strip, M, f"M[{label}]"), None,
                        "piecewise linear in ln t, zero outside the sampled range")


def load_samples(path, strip: Strip) -> CatalogEntry:
    """Read a CSV with columns ``t`` and ``re`` (optional ``im``) as :func:`samples`."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "t" not in rows[0] or "re" not in rows[0]:
        raise DomainError(f"{path}: expected a header with columns t, re[, im]")
    t = np.array([float(r["t"]) for r in rows])
    re_ = np.array([float(r["re"]) for r in rows])
    im_ = np.array([float(r.get("im") or 0.0) for r in rows])
    return samples(t, re_ + 1j * im_, strip, label=f"samples:{path.name}")


# ---------------------------------------------------------------------------
# registry

_BUILDERS = {
    "indicator01": _indicator01,
    "neglog01": _neglog01,
    "bump12": _bump12,
    "expisqrt": _expisqrt,
    "bump-image": _bump_image,
}
_POWERCUT = re.compile(r"^powercut[(:]\s*([-+0-9.eE]+)\s*\)?$")


def list_entries() -> list[str]:
    """Available ids; ``powercut(p)`` stands for the whole family."""
    return ["indicator01", "neglog01", "bump12", "expisqrt", "powercut(p)", "bump-image"]


@functools.lru_cache(maxsize=None)
def get_entry(id: str) -> CatalogEntry:
    """Look up a catalog entry; unknown ids raise with the list of choices."""
    key = id.strip()
    if key in _BUILDERS:
        return _BUILDERS[key]()
    m = _POWERCUT.match(key)
    if m:
        return powercut(float(m.group(1)))
    raise DomainError(f"unknown catalog id {id!r}; available: {', '.join(list_entries())}")
