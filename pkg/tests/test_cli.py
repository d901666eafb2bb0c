import json
import math

import click
import numpy as np
import pytest

from mellin_hilbert.catalog import bump_mellin
from mellin_hilbert.cli import THREADS_ENV, cli, main, parse_function_spec
from mellin_hilbert.errors import DomainError
from mellin_hilbert.io import read_csv


def _settings(**kw):
    args = dict(config_path=None, threads=None, rel_tol=None, abs_tol=None, max_panels=None)
    args.update(kw)
    with click.Context(cli) as ctx:
        cli.callback(**args)
        return ctx.obj


def test_parse_function_spec_forms(tmp_path):
    assert parse_function_spec("neglog01").label == "neglog01"
    assert parse_function_spec('{"kind": "catalog", "id": "bump12"}').label == "bump12"
    ind = parse_function_spec('{"kind": "indicator", "lo": 0.5, "hi": 2}')
    assert ind.known_mellin(1.0) == pytest.approx(1.5)
    pc = parse_function_spec('{"kind": "powercut", "p": 0.25}')
    assert pc.function.strip.a == 0.25
    f = tmp_path / "spec.json"
    f.write_text(json.dumps({"kind": "catalog", "id": "expisqrt"}))
    assert parse_function_spec(str(f)).label == "expisqrt"
    with pytest.raises(DomainError):
        parse_function_spec('{"kind": "wavelet"}')
    with pytest.raises(DomainError):
        parse_function_spec('{"kind": "indicator", "lo": 2, "hi": 1}')


def test_threads_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"threads": 3, "rel_tol": 1e-7}))
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert _settings().threads == 1
    assert _settings(config_path=str(cfg)).threads == 3
    assert _settings(config_path=str(cfg)).spec.rel_tol == 1e-7
    monkeypatch.setenv(THREADS_ENV, "2")
    assert _settings(config_path=str(cfg)).threads == 2
    assert _settings(config_path=str(cfg), threads=5).threads == 5
    monkeypatch.setenv(THREADS_ENV, "zero")
    with pytest.raises(DomainError):
        _settings()


def test_mellin_command(tmp_path):
    out = tmp_path / "m.csv"
    assert main(["mellin", "--function", "neglog01", "--s", "0.5,1", "--s", "2,0", "--out", str(out)]) == 0
    cols = read_csv(out)
    F = 1 / (np.array([0.5 + 1j, 2.0]) ** 2)
    assert np.allclose(cols["re_F"] + 1j * cols["im_F"], F, rtol=1e-9)


def test_mellin_line_and_kernel(capsys):
    assert main(["mellin", "--kernel", "--s-line", "0.25", "--imag-range", "-1:1:3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "re_s,im_s,re_F,im_F,err" and len(lines) == 4
    re_F = float(lines[2].split(",")[2])
    assert re_F == pytest.approx(math.pi, rel=1e-8)


def test_mellin_outside_strip_is_a_domain_error(capsys):
    assert main(["mellin", "--function", "indicator01", "--s", "-0.5,0"]) == 2


def test_hilbert_command(tmp_path, capsys):
    out = tmp_path / "h.csv"
    assert main(["hilbert", "--function", "indicator01", "--x-grid", "0.1:10:4",
                 "--method", "both", "--out", str(out)]) == 0
    cols = read_csv(out)
    x = cols["x"]
    assert np.allclose(cols["re"], np.log(x / np.abs(1 - x)) / math.pi, atol=1e-10)
    assert np.max(cols["discrepancy"]) < 1e-8
    # x = 1 is a jump: NaN row with a warning, or exit 2 under --strict
    assert main(["hilbert", "--function", "indicator01", "--x", "1"]) == 0
    assert "nan" in capsys.readouterr().out.lower()
    assert main(["hilbert", "--function", "indicator01", "--x", "1", "--strict"]) == 2


def test_solve_command(tmp_path, capsys):
    out = tmp_path / "sol"
    code = main(["solve", "--rhs", "indicator01", "--t-grid", "-16:16:4", "--out-dir", str(out)])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["case"] == "two-branches"
    assert report["jump"]["kappaOracle"] == pytest.approx(1 / math.pi, rel=1e-10)
    minus = read_csv(out / "branch_minus_c0.25.csv")
    t = minus["t"]
    away = np.abs(np.log(t)) > 0.15
    r = np.sqrt(t[away])
    exact = -np.log(np.abs((1 + r) / (1 - r))) / math.pi
    assert np.max(np.abs(minus["re"][away] - exact)) < 1e-6
    assert "case=two-branches" in capsys.readouterr().out


def test_solve_exit_codes(tmp_path):
    assert main(["solve", "--rhs", "indicator01", "--contour", "0.5005", "--out-dir", str(tmp_path)]) == 4
    assert main(["solve", "--rhs", "indicator01", "--branch-strip", "0.3,0.7",
                 "--out-dir", str(tmp_path)]) == 4
    assert main(["solve", "--rhs", "indicator01", "--strip", "0.2,1.5", "--out-dir", str(tmp_path)]) == 2


def test_solve_reads_config_defaults(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"solve": {"t_grid": "-4:4:2", "residual": False}}))
    out = tmp_path / "o"
    assert main(["--config", str(cfg), "solve", "--rhs", "indicator01", "--out-dir", str(out)]) == 0
    assert read_csv(out / "branch_plus_c0.75.csv")["t"].size == 9


def test_samples_round_trip(tmp_path):
    # solve for the bump, reload the branch CSV as samples and transform it back
    out = tmp_path / "o"
    assert main(["solve", "--rhs", "bump-image", "--strip", "0.1,0.9", "--t-grid", "-128:128:64",
                 "--no-residual", "--out-dir", str(out)]) == 0
    (csv,) = out.glob("branch_*.csv")
    spec = json.dumps({"kind": "samples", "path": str(csv), "strip": [0.1, 0.9]})
    res = tmp_path / "m.csv"
    assert main(["mellin", "--function", spec, "--s", "0.5,0", "--out", str(res)]) == 0
    # linear interpolation in ln t at 64 points per decade
    assert read_csv(res)["re_F"][0] == pytest.approx(complex(bump_mellin(0.5)).real, rel=1e-3)


def test_verify_command(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert main(["verify", "--suite", "symbol", "--out", str(out)]) == 0
    first = out.read_text()
    assert json.loads(first)["passed"]
    assert main(["verify", "--suite", "symbol", "--out", str(out)]) == 0
    assert out.read_text() == first
    assert "PASS [symbol]" in capsys.readouterr().out


def test_usage_errors():
    assert main(["mellin", "--bogus"]) == 2
    assert main(["--version"]) == 0
