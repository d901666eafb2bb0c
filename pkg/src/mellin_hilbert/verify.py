"""Self-checks run by ``mellin-hilbert verify``.

Each suite returns a list of :class:`Check` records (measured value,
threshold, pass flag).  Random sample points come from
``numpy.random.default_rng(seed)``, so a run is reproducible.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .catalog import get_entry
from .errors import ObstructionError
from .hilbert import hilbert_via_symbol, kernel_mellin_pv
from .kernels import (
    contour_residue,
    hilbert_symbol,
    kernel_mellin_symbol,
    solver_symbol,
    tan_abs2,
    tan_bound,
    tan_pi,
    tan_pi_identity,
)
from .mellin import invert_mellin, mellin_forward
from .quadrature import DEFAULT_SPEC, ContourSpec, QuadratureSpec
from .solver import CaseTag, PRINTED_JUMP_CONSTANT, classify, extract_jump, solve
from .strip import HalfLineFunction, Strip, check_membership, test_function_norm

__all__ = ["Check", "SUITES", "run_suite", "run_all"]


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _le(name, value, threshold, **detail) -> Check:
    value = float(value)
    return Check(name, value, threshold, bool(math.isfinite(value) and value <= threshold), detail)


def _flag(name, ok: bool, **detail) -> Check:
    return Check(name, 1.0 if ok else 0.0, 1.0, bool(ok), detail)


def _strip_points(rng, xs, n, ymax=5.0):
    x = rng.choice(np.asarray(xs, dtype=float), n)
    return x + 1j * rng.uniform(-ymax, ymax, n)


# ---------------------------------------------------------------------------


def suite_norms(seed: int = 0, spec: QuadratureSpec = DEFAULT_SPEC) -> list[Check]:
    out = []
    unit = HalfLineFunction(lambda t: np.asarray(t, dtype=float) ** -0.5, Strip(0.4, 0.6), "t^-1/2")
    est = test_function_norm(unit, 0.4, 0.6, 0)
    out.append(_le("norm of t^-1/2 on (0.4, 0.6) equals 1", abs(est.value - 1.0), 1e-12))
    steep = HalfLineFunction(lambda t: np.asarray(t, dtype=float) ** -0.9, Strip(0.9, 1.0), "t^-0.9")
    est = test_function_norm(steep, 0.4, 0.6, 0)
    out.append(_flag("norm of t^-0.9 on (0.4, 0.6) diverges", est.diverging, sups=est.sups))
    gauss = HalfLineFunction(lambda t: np.exp(-np.log(np.asarray(t, dtype=float)) ** 2),
                             Strip(-math.inf, math.inf), "gauss")
    for k in (0, 1, 2):
        est = test_function_norm(gauss, 0.2, 0.8, k)
        out.append(_flag(f"norm of a log-Gaussian, k={k}, is finite", est.finite, value=est.value))
    for cid in ("indicator01", "neglog01", "bump12", "expisqrt", "powercut(0.25)"):
        f = get_entry(cid).function
        d = check_membership(f, f.strip)
        out.append(_flag(f"declared strip of {cid} passes the membership check", d.consistent,
                         status=d.status.value))
    f = get_entry("indicator01").function
    d = check_membership(f, Strip(-0.5, 1.0))
    out.append(_flag("indicator01 is flagged outside its strip", not d.consistent, status=d.status.value))
    return out


def suite_symbol(seed: int = 0, spec: QuadratureSpec = DEFAULT_SPEC) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    s = rng.uniform(0.05, 0.45, 200) * rng.choice([1, -1], 200) + 0.5 + 1j * rng.uniform(-5, 5, 200)
    s = s[np.abs(s - 0.5) > 0.01]
    prod = hilbert_symbol(s) * solver_symbol(s)
    out.append(_le("hilbertSymbol*(-tan) = 1", np.max(np.abs(prod - 1)), 1e-12))

    sk = _strip_points(rng, [0.25, 1 / 3, 2 / 3], 20)
    num = kernel_mellin_pv(sk, spec).value
    ref = kernel_mellin_symbol(sk)
    out.append(_le("kernel pv Mellin = pi cot(pi s)", np.max(np.abs(num - ref) / np.abs(ref)), 1e-6))

    x = rng.uniform(-2, 2, 1000)
    y = rng.uniform(-2, 2, 1000)
    diff = np.abs(tan_pi(x + 1j * y) - tan_pi_identity(x, y))
    out.append(_le("tan identity", np.max(diff / np.maximum(1, np.abs(tan_pi_identity(x, y)))), 1e-12))

    worst = 0.0
    for M in (0.1, 0.5, 1.0, 5.0):
        xs = rng.uniform(-1, 1, 10000)
        b = tan_bound(0.5, M).y_bound
        worst = max(worst, float(np.max(tan_abs2(xs, M) / b)))
    out.append(_le("|tan|^2 below its y-bound", worst, 1 + 1e-12))

    res, _ = contour_residue(tan_pi, 0.5, 0.25)
    out.append(_le("residue of tan(pi s) at 1/2 is -1/pi", abs(res + 1 / math.pi), 1e-8))

    worst = 0.0
    for cid in ("indicator01", "neglog01", "bump12", "expisqrt"):
        e = get_entry(cid)
        if e.function.strip.contains(0.5):
            H = hilbert_via_symbol(e.function, spec, e.known_mellin)
            worst = max(worst, abs(complex(H(0.5))))
    out.append(_le("M[Hf](1/2) = 0 on the catalog", worst, 1e-8))

    e = get_entry("indicator01")
    Hf = HalfLineFunction(e.known_hilbert, Strip(0.0, 1.0), "H indicator01", singular_points=(1.0,))
    sm = _strip_points(rng, [0.25, 0.5, 0.75], 3, ymax=3.0)
    lhs = mellin_forward(Hf, sm, spec).value
    rhs = hilbert_symbol(sm) * e.known_mellin(sm)
    out.append(_le("M[H indicator01] = -cot(pi s) M[indicator01]",
                   np.max(np.abs(lhs - rhs) / np.maximum(1e-300, np.abs(rhs))), 1e-6))
    return out


def suite_inversion(seed: int = 0, spec: QuadratureSpec = DEFAULT_SPEC) -> list[Check]:
    out = []
    t = np.array([0.05, 0.2, 0.5, 0.9, 1.1, 1.3, 1.5, 1.8, 2.5, 4.0])
    for cid, cs in (("bump12", (0.5, -0.3)), ("neglog01", (0.5, 1.5))):
        e = get_entry(cid)
        vals = []
        for c in cs:
            r = invert_mellin(e.known_mellin, t, ContourSpec(c), spec)
            vals.append(r.value)
            out.append(_le(f"{cid}: inverse Mellin on Re s = {c} reproduces f",
                           np.max(np.abs(r.value - e.function(t))), 1e-6,
                           error_estimate=float(np.max(r.error))))
        thr = 2 * spec.abs_tol if cid == "bump12" else 1e-6
        out.append(_le(f"{cid}: abscissa independence", np.max(np.abs(vals[0] - vals[1])), thr,
                       abscissae=list(cs)))
    return out


def suite_solver(seed: int = 0, spec: QuadratureSpec = DEFAULT_SPEC) -> list[Check]:
    out = []
    ind = get_entry("indicator01")
    rep = classify(ind.function, spec, transform=ind.known_mellin)
    out.append(_flag("indicator01 has two branches", rep.case is CaseTag.TWO_BRANCHES,
                     value_at_half=rep.value_at_half))
    minus, plus = solve(ind.function, rep, spec=spec)
    for br in (minus, plus):
        out.append(_le(f"indicator01 {br.side.value} branch residual", br.residual, 1e-4))
    try:
        solve(ind.function, rep, sub_strip=Strip(0.4, 0.6), residual=False, spec=spec)
        rejected = False
    except ObstructionError:
        rejected = True
    out.append(_flag("a strip containing 1/2 is rejected", rejected))
    noise = max(float(np.max(minus.errors)), float(np.max(plus.errors)), 1e-16)
    gap = float(np.max(np.abs(plus.values - minus.values)))
    out.append(_flag("the branches differ beyond noise", gap > 1e3 * noise, gap=gap, noise=noise))
    jump = extract_jump(minus, plus, rep, exclude=ind.function.breakpoints())
    out.append(_le("sqrt(t) (rho_plus - rho_minus) is flat", jump.relative_flatness, 1e-3))
    kfit = complex(jump.kappa_fitted)
    out.append(_le("fitted jump constant matches the residue oracle",
                   abs(kfit - complex(jump.kappa_oracle)), 1e-4,
                   kappa_oracle=complex(jump.kappa_oracle).real, kappa_fitted=kfit.real,
                   printed_constant=PRINTED_JUMP_CONSTANT,
                   printed_minus_oracle=PRINTED_JUMP_CONSTANT - complex(jump.kappa_oracle).real))

    ex = get_entry("expisqrt")
    v = abs(complex(ex.known_mellin(0.5)))
    out.append(_le("M[expisqrt](1/2) = 0", v, 1e-8))
    rep = classify(ex.function, spec, strip=Strip(0.05, 0.95), transform=ex.known_mellin)
    a, b = solve(ex.function, rep, contours=[0.3, 0.7], residual=False, spec=spec)
    out.append(_le("expisqrt: both sides of 1/2 give the same solution",
                   np.max(np.abs(a.values - b.values)), 1e-6))

    bi = get_entry("bump-image")
    rep = classify(bi.function, spec, strip=Strip(0.1, 0.9), transform=bi.known_mellin)
    (br,) = solve(bi.function, rep, spec=spec, residual=False)
    out.append(_le("bump recovered from its Hilbert transform",
                   np.max(np.abs(br.values - bi.extras["solution"](br.t))), 1e-5))
    return out


SUITES: dict[str, Callable[..., list[Check]]] = {
    "norms": suite_norms,
    "symbol": suite_symbol,
    "inversion": suite_inversion,
    "solver": suite_solver,
}


def run_suite(name: str, seed: int = 0, spec: QuadratureSpec = DEFAULT_SPEC) -> dict:
    """Run one suite; the record holds every check (no timings, so reruns match)."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    checks = SUITES[name](seed=seed, spec=spec)
    return {"suite": name, "seed": seed, "passed": all(c.passed for c in checks),
            "checks": [c.to_dict() for c in checks]}


def run_all(names=None, seed: int = 0, spec: QuadratureSpec = DEFAULT_SPEC) -> dict:
    names = list(SUITES) if names is None else list(names)
    suites = [run_suite(n, seed, spec) for n in names]
    return {"passed": all(s["passed"] for s in suites), "suites": suites}
