import io
import subprocess
import sys

import pytest

from pipoly.cli import Config, load_config, main, parse_int, parse_real
from pipoly.numerics import ext_parse
from pipoly.primes import PrimeCountCache


def run(*argv):
    out = io.StringIO()
    status = main(list(argv), out=out)
    return status, out.getvalue()


def test_pi():
    assert run("pi", "--x", "10000") == (0, "1229\n")
    assert run("pi", "--x", "1e4") == (0, "1229\n")
    assert run("pi", "--x", "100.9") == (0, "25\n")


def test_pi_errors(capsys):
    status, out = run("pi", "--x", "-5")
    assert status == 2 and out == ""
    assert "negative" in capsys.readouterr().err
    status, _ = run("pi", "--x", "1e14")
    assert status == 2
    assert "cap" in capsys.readouterr().err


def test_psi():
    status, out = run("psi", "--x", "10")
    lines = dict(line.split(" ", 1) for line in out.splitlines())
    assert status == 0 and lines["terms"] == "7"
    assert float(lines["psi"]) == pytest.approx(7.832014180505468, rel=1e-15)


def test_eval_family():
    status, out = run("eval", "--family", "H", "--x", "1e4")
    assert status == 0
    v = ext_parse(out.strip())
    assert abs(float(v) / -4.822952515086e8 - 1) < 1e-12


def test_eval_terms_and_hassani():
    status, out = run("eval", "--family", "K", "--x", "1e5", "--terms")
    assert status == 0 and len(out.splitlines()) == 5
    status, out = run("eval", "--family", "hassani", "--x", "1e5")
    assert status == 0 and out.splitlines()[-1] == "holds true"


def test_eval_expr_and_spec_file(tmp_path):
    spec = tmp_path / "g.spec"
    spec.write_text("pi(x)^2 - e*x/log(x)*pi(x/e)\n")
    a = run("eval", "--spec-file", str(spec), "--x", "1e6")
    b = run("eval", "--family", "G", "--x", "1e6")
    c = run("eval", "--expr", "pi(x)^2 - e*x/log(x)*pi(x/e)", "--x", "1e6")
    assert a == b == c and a[0] == 0


def test_eval_syntax_error(capsys):
    status, _ = run("eval", "--expr", "pi(x^", "--x", "10")
    assert status == 2
    assert "column 6" in capsys.readouterr().err


def test_usage_errors():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code != 0
    with pytest.raises(SystemExit) as info:
        main(["pi", "--y", "3"])
    assert info.value.code != 0


def test_table_exit_codes():
    status, out = run("table", "--id", "1", "--cap", "1e8", "--format", "csv")
    lines = out.splitlines()
    assert status == 0
    assert lines[0] == "x,expected,computed,rel_error,status"
    assert len(lines) == 6 and all(line.endswith(",match") for line in lines[1:])
    status, _ = run("table", "--id", "1", "--cap", "1e5", "--tolerance", "1e-18")
    assert status == 1


def test_scan_and_figure():
    status, out = run("scan", "--family", "L", "--n", "5", "--from", "1e4", "--to", "1e6",
                      "--points", "3")
    assert status == 0 and out.splitlines()[0] == "x,value,sign"
    status, out = run("figure", "--id", "2", "--points", "4")
    assert status == 0 and len(out.splitlines()) == 5


def test_check_suite():
    status, out = run("check", "--suite", "cosign", "--max-exp", "6")
    assert status == 0
    assert out.splitlines()[-1] == "3 passed, 0 failed"


def test_check_reports_failures():
    status, out = run("check", "--suite", "maintermtrend", "--max-exp", "6")
    assert status == 1
    assert any(line.startswith("FAIL") for line in out.splitlines())


def test_number_parsing():
    assert parse_real("2.5E4") == 25000.0
    assert parse_int("1e8") == 10 ** 8
    with pytest.raises(Exception):
        parse_int("1.5")
    with pytest.raises(Exception):
        parse_real("inf")


def test_config_file(tmp_path, monkeypatch):
    cfg_path = tmp_path / "pipoly.conf"
    cfg_path.write_text("# settings\npi_cap = 1e9\ntolerance = 1e-8  # tighter\nthreads = 2\n")
    monkeypatch.setenv("PIPOLY_CACHE", str(tmp_path / "env.bin"))
    cfg = load_config(cfg_path)
    assert cfg == Config(cache_path=str(tmp_path / "env.bin"), pi_cap=10 ** 9,
                         tolerance=1e-8, threads=2)
    cfg_path.write_text("bogus = 3\n")
    with pytest.raises(ValueError, match="line|:1:"):
        load_config(cfg_path)


def test_flags_override_config(tmp_path, capsys):
    cfg_path = tmp_path / "pipoly.conf"
    cfg_path.write_text("pi_cap = 1000\n")
    assert run("pi", "--x", "1e4", "--config", str(cfg_path))[0] == 2
    capsys.readouterr()
    assert run("pi", "--x", "1e4", "--config", str(cfg_path), "--pi-cap", "1e5") == (0, "1229\n")


def test_cache_file_written(tmp_path, monkeypatch):
    path = tmp_path / "pi.bin"
    monkeypatch.setenv("PIPOLY_CACHE", str(path))
    assert run("pi", "--x", "2e7") == (0, "1270607\n")
    assert PrimeCountCache(path).get(2 * 10 ** 7) == 1270607


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pipoly", "pi", "--x", "1000"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "168\n"


def test_psi_verbose_reports_both_normalisations():
    from pipoly.primes import psi_deviation, psi_deviation_linear
    status, out = run("psi", "--x", "1e5", "--verbose")
    lines = dict(line.split(" ", 1) for line in out.splitlines())
    assert status == 0
    assert float(lines["deviation_sqrt"]) == pytest.approx(psi_deviation(10 ** 5), rel=1e-12)
    assert float(lines["deviation_linear"]) == pytest.approx(psi_deviation_linear(10 ** 5), rel=1e-12)
