"""``mellin-hilbert`` command line interface.

Subcommands: ``mellin``, ``hilbert``, ``solve`` and ``verify``.  Functions
are given as JSON FunctionSpecs (inline, as a path to a JSON file, or as a
bare catalog id).  Exit codes: 0 ok, 1 verification failure, 2 domain error,
3 quadrature failure, 4 solvability obstruction.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np

from . import __version__
from .catalog import get_entry, indicator, load_samples, powercut
from .errors import DomainError, MellinHilbertError
from .hilbert import hilbert_convolution, hilbert_direct, kernel_mellin_pv
from .io import format_number, write_csv, write_json
from .mellin import log_grid, mellin_forward, mellin_transform
from .quadrature import DEFAULT_SPEC, QuadratureSpec
from .solver import PRINTED_JUMP_CONSTANT, CaseTag, classify, extract_jump, solve
from .strip import Strip
from .verify import SUITES, run_all

__all__ = ["cli", "main", "parse_function_spec", "FunctionInput", "THREADS_ENV"]

THREADS_ENV = "MELLIN_HILBERT_THREADS"
_GROUP_KEYS = ("threads", "rel_tol", "abs_tol", "max_panels")


@dataclass
class FunctionInput:
    """A parsed FunctionSpec: the function and any closed forms that come with it."""

    function: object
    known_mellin: object = None
    known_hilbert: object = None
    extras: dict = dataclasses.field(default_factory=dict)
    label: str = ""


@dataclass
class Settings:
    spec: QuadratureSpec
    threads: int


def _entry_input(entry) -> FunctionInput:
    return FunctionInput(entry.function, entry.known_mellin, entry.known_hilbert, dict(entry.extras), entry.id)


def parse_function_spec(text: str) -> FunctionInput:
    """Build a function from a FunctionSpec.

    ``text`` is inline JSON, a path to a JSON file, or a bare catalog id.
    Kinds: ``catalog`` (``id``), ``indicator`` (``lo``, ``hi``),
    ``powercut`` (``p``) and ``samples`` (``path``, ``strip``).
    """
    raw = text.strip()
    if not raw.startswith("{"):
        path = Path(raw)
        if path.suffix == ".json" and path.is_file():
            raw = path.read_text(encoding="utf-8")
        else:
            return _entry_input(get_entry(raw))
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DomainError(f"FunctionSpec is not valid JSON: {exc}") from None
    if not isinstance(obj, dict) or "kind" not in obj:
        raise DomainError('FunctionSpec needs a "kind" field')
    kind = obj["kind"]
    try:
        if kind == "catalog":
            return _entry_input(get_entry(str(obj["id"])))
        if kind == "indicator":
            lo, hi = float(obj["lo"]), float(obj["hi"])
            if not lo < hi:
                raise DomainError(f"indicator needs lo < hi, got lo={lo}, hi={hi}")
            return _entry_input(indicator(lo, hi))
        if kind == "powercut":
            return _entry_input(powercut(float(obj["p"])))
        if kind == "samples":
            a, b = (float(v) for v in obj["strip"])
            return _entry_input(load_samples(obj["path"], Strip(a, b)))
    except KeyError as exc:
        raise DomainError(f"FunctionSpec of kind {kind!r} is missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"malformed FunctionSpec: {exc}") from None
    raise DomainError(f"unknown FunctionSpec kind {kind!r}; use catalog, indicator, powercut or samples")


# ---------------------------------------------------------------------------
# flag parsing


def _floats(text: str, n: int | None = None, what: str = "value") -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise click.BadParameter(f"cannot parse {what} {text!r}") from None
    if n is not None and len(vals) != n:
        raise click.BadParameter(f"{what} needs {n} comma-separated numbers, got {text!r}")
    return vals


def _range(text: str, what: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise click.BadParameter(f"{what} must look like lo:hi:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise click.BadParameter(f"cannot parse {what} {text!r}") from None
    if n < 1:
        raise click.BadParameter(f"{what} needs n >= 1")
    return lo, hi, n


def _t_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise click.BadParameter(f"--t-grid must look like k_lo:k_hi:per_decade, got {text!r}")
    try:
        k_lo, k_hi, per = (int(p) for p in parts)
    except ValueError:
        raise click.BadParameter(f"cannot parse --t-grid {text!r}") from None
    return log_grid(k_lo, k_hi, per)


def _emit_csv(out, header, rows):
    if out is None:
        click.echo(",".join(header))
        for r in rows:
            click.echo(",".join(format_number(v) for v in r))
    else:
        write_csv(out, header, rows)


def _threads_default() -> int | None:
    env = os.environ.get(THREADS_ENV)
    if env is None or env.strip() == "":
        return None
    try:
        n = int(env)
    except ValueError:
        raise DomainError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
    if n < 1:
        raise DomainError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
    return n


# ---------------------------------------------------------------------------


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="mellin-hilbert")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="JSON file with defaults: top-level threads/rel_tol/abs_tol/max_panels "
                   "and one object per subcommand keyed by flag name.")
@click.option("--threads", type=click.IntRange(min=1), default=None,
              help=f"Parallelism cap (default: ${THREADS_ENV}, then config, then 1).")
@click.option("--rel-tol", type=float, default=None, help="Relative quadrature tolerance.")
@click.option("--abs-tol", type=float, default=None, help="Absolute quadrature tolerance.")
@click.option("--max-panels", type=click.IntRange(min=1), default=None, help="Panel budget per integral.")
@click.pass_context
def cli(ctx, config_path, threads, rel_tol, abs_tol, max_panels):
    """Mellin transforms, the half-line Hilbert transform, and solving H rho = e."""
    config = {}
    if config_path:
        try:
            config = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DomainError(f"config file {config_path}: {exc}") from None
        if not isinstance(config, dict):
            raise DomainError(f"config file {config_path} must hold a JSON object")
    ctx.default_map = {k: v for k, v in config.items() if k not in _GROUP_KEYS and isinstance(v, dict)}
    if threads is None:
        threads = _threads_default() or int(config.get("threads", 1))
    spec = DEFAULT_SPEC
    overrides = {"rel_tol": rel_tol, "abs_tol": abs_tol, "max_panels": max_panels}
    for key, val in overrides.items():
        if val is None and key in config:
            val = config[key]
        if val is not None:
            spec = dataclasses.replace(spec, **{key: type(getattr(spec, key))(val)})
    ctx.obj = Settings(spec, int(threads))


@cli.command("mellin")
@click.option("--function", "function_spec", default=None, help="FunctionSpec (JSON, file or catalog id).")
@click.option("--s", "s_values", multiple=True, help="Point RE,IM; repeatable.")
@click.option("--s-line", type=float, default=None, help="Abscissa c of a vertical line.")
@click.option("--imag-range", default=None, help="y0:y1:n, imaginary parts along --s-line.")
@click.option("--kernel", is_flag=True, help="Transform the kernel pv 1/(1-t) instead of a function.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV output (default stdout).")
@click.pass_obj
def mellin_cmd(settings: Settings, function_spec, s_values, s_line, imag_range, kernel, out):
    """Evaluate M[f](s) by quadrature; columns re_s,im_s,re_F,im_F,err."""
    pts = [complex(*_floats(v, 2, "--s")) for v in s_values]
    if (s_line is None) != (imag_range is None):
        raise click.UsageError("--s-line and --imag-range go together")
    if s_line is not None:
        y0, y1, n = _range(imag_range, "--imag-range")
        pts.extend(s_line + 1j * np.linspace(y0, y1, n))
    if not pts:
        raise click.UsageError("give --s or --s-line with --imag-range")
    s = np.array(pts, dtype=complex)
    if kernel:
        r = kernel_mellin_pv(s, settings.spec)
    else:
        if function_spec is None:
            raise click.UsageError("--function is required unless --kernel is given")
        f = parse_function_spec(function_spec).function
        r = mellin_forward(f, s, settings.spec)
    vals = np.atleast_1d(r.value)
    errs = np.broadcast_to(np.atleast_1d(r.error), vals.shape)
    rows = [(z.real, z.imag, v.real, v.imag, e) for z, v, e in zip(s, vals, errs)]
    _emit_csv(out, ["re_s", "im_s", "re_F", "im_F", "err"], rows)


@cli.command("hilbert")
@click.option("--function", "function_spec", required=True, help="FunctionSpec (JSON, file or catalog id).")
@click.option("--x", "x_values", type=float, multiple=True, help="Evaluation point; repeatable.")
@click.option("--x-grid", default=None, help="lo:hi:n, log-spaced points.")
@click.option("--method", type=click.Choice(["direct", "convolution", "both"]), default="direct",
              show_default=True)
@click.option("--strict", is_flag=True, help="Fail (exit 2) at a discontinuity instead of writing NaN.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV output (default stdout).")
@click.pass_obj
def hilbert_cmd(settings: Settings, function_spec, x_values, x_grid, method, strict, out):
    """Evaluate Hf(x); columns x,re,im,err (plus the second route for --method both)."""
    xs = list(x_values)
    if x_grid is not None:
        lo, hi, n = _range(x_grid, "--x-grid")
        if not 0 < lo <= hi:
            raise click.BadParameter("--x-grid needs 0 < lo <= hi")
        xs.extend(np.geomspace(lo, hi, n))
    if not xs:
        raise click.UsageError("give --x or --x-grid")
    f = parse_function_spec(function_spec).function
    routes = {"direct": [hilbert_direct], "convolution": [hilbert_convolution],
              "both": [hilbert_direct, hilbert_convolution]}[method]
    rows = []
    worst = 0.0
    for x in xs:
        row = [x]
        vals = []
        for route in routes:
            try:
                r = route(f, float(x), settings.spec)
                vals.append(complex(r.value))
                row.extend([r.value.real, r.value.imag, r.error])
            except DomainError as exc:
                if strict:
                    raise
                click.echo(f"warning: x={x:.17g}: {exc}; writing NaN", err=True)
                vals.append(complex(math.nan, math.nan))
                row.extend([math.nan, math.nan, math.nan])
        if len(vals) == 2:
            d = abs(vals[0] - vals[1])
            row.append(d)
            if math.isfinite(d):
                worst = max(worst, d)
        rows.append(row)
    header = ["x", "re", "im", "err"]
    if method == "both":
        header += ["re_conv", "im_conv", "err_conv", "discrepancy"]
        click.echo(f"max discrepancy between routes: {worst:.3g}", err=True)
    _emit_csv(out, header, rows)


@cli.command("solve")
@click.option("--rhs", required=True, help="FunctionSpec of the right-hand side e.")
@click.option("--strip", "strip_text", default=None, help="a,b: strip of e to work in (inside [0, 1]).")
@click.option("--contour", type=float, default=None, help="One contour abscissa.")
@click.option("--contours", default=None, help="c1,c2: one contour on each side of 1/2.")
@click.option("--branch-strip", default=None, help="alpha,beta: requested strip of the solution.")
@click.option("--m", "m", type=int, default=None, help="Growth degree; one extra power of s is added.")
@click.option("--t-grid", default="-24:24:8", show_default=True,
              help="k_lo:k_hi:per_decade for t = 10**(k/per_decade).")
@click.option("--residual/--no-residual", default=True, show_default=True,
              help="Check H(rho) = e on a grid.")
@click.option("--out-dir", type=click.Path(file_okay=False), default="solve-out", show_default=True)
@click.pass_obj
def solve_cmd(settings: Settings, rhs, strip_text, contour, contours, branch_strip, m, t_grid,
              residual, out_dir):
    """Solve H rho = e; writes report.json and one CSV per branch."""
    fin = parse_function_spec(rhs)
    e = fin.function
    strip = Strip(*_floats(strip_text, 2, "--strip")) if strip_text else None
    transform = fin.known_mellin
    if transform is None:
        transform = mellin_transform(e, settings.spec, estimate=False)
    report = classify(e, settings.spec, strip=strip, transform=transform)
    cs = _floats(contours, 2, "--contours") if contours else None
    sub = Strip(*_floats(branch_strip, 2, "--branch-strip")) if branch_strip else None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        branches = solve(e, report, contour=contour, contours=cs, sub_strip=sub, m=m,
                         t_grid=_t_grid(t_grid), spec=settings.spec, residual=residual,
                         workers=settings.threads)
    for w in caught:
        click.echo(f"warning: {w.message}", err=True)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    recs = []
    for br in branches:
        name = f"branch_{br.side.value}_c{br.contour_abscissa:.6g}.csv"
        write_csv(out / name, ["t", "re", "im", "err"],
                  zip(br.t, br.values.real, br.values.imag, br.errors))
        rec = br.to_dict()
        rec["samplesPath"] = name
        recs.append(rec)
    jump = None
    sides = {br.side.value: br for br in branches}
    if report.case is CaseTag.TWO_BRANCHES and "minus" in sides and "plus" in sides:
        jump = extract_jump(sides["minus"], sides["plus"], report, exclude=e.breakpoints())
    doc = report.to_dict()
    doc["branches"] = recs
    doc["jump"] = None if jump is None else jump.to_dict()
    write_json(out / "report.json", doc)
    click.echo(_verdict(report, branches, jump))


def _verdict(report, branches, jump) -> str:
    res = [b.residual for b in branches if b.residual is not None]
    parts = [f"case={report.case.value}", f"branches={len(branches)}"]
    parts.append("residual=" + (f"{max(res):.3g}" if res else "skipped"))
    if any(b.nonconverged for b in branches):
        parts.append("NONCONVERGED")
    if jump is not None:
        ko = complex(jump.kappa_oracle).real
        kf = jump.kappa_fitted.real if jump.kappa_fitted is not None else math.nan
        parts.append(f"jump={jump.coefficient.real:.10g}")
        parts.append(f"kappa_fit={kf:.10g}")
        parts.append(f"kappa_oracle={ko:.10g}")
        parts.append(f"printed={PRINTED_JUMP_CONSTANT:.10g}")
        parts.append(f"fit/oracle-1={kf / ko - 1:.2g}")
        parts.append(f"printed/oracle={PRINTED_JUMP_CONSTANT / ko:.6g}")
    return " ".join(parts)


@cli.command("verify")
@click.option("--suite", type=click.Choice([*SUITES, "all"]), default="all", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="JSON output.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for sampled points.")
@click.pass_obj
def verify_cmd(settings: Settings, suite, out, seed):
    """Run self-checks; exit 1 if any fails."""
    names = list(SUITES) if suite == "all" else [suite]
    result = run_all(names, seed=seed, spec=settings.spec)
    failed = []
    for s in result["suites"]:
        for c in s["checks"]:
            mark = "PASS" if c["passed"] else "FAIL"
            click.echo(f"{mark} [{s['suite']}] {c['name']}: {c['value']:.3g} (threshold {c['threshold']:.3g})")
            if not c["passed"]:
                failed.append(c["name"])
    if out:
        write_json(out, result)
    if failed:
        click.echo("failed: " + "; ".join(failed), err=True)
        return 1
    return 0


def main(argv=None) -> int:
    """Entry point; maps library errors to exit codes."""
    try:
        rv = cli.main(args=argv, prog_name="mellin-hilbert", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except MellinHilbertError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
