"""Command-line interface, including golden-output checks."""

import contextlib
import io
import json
import shutil
import subprocess
from importlib import resources

import pytest

from superint import catalog
from superint.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def fixture_text(name):
    return resources.files("superint").joinpath("data", name).read_text()


def test_classify_parabolic(capsys):
    assert call(capsys, "classify", "--space", "e2", "--coeffs", "0,0,0,1,0,0") == (0, "Parabolic\n", "")


def test_classify_sphere_gaussian_literals(capsys):
    code, out, _ = call(capsys, "classify", "--space", "s2", "--coeffs", "1,-1,0,-i,0,0")
    assert (code, out) == (0, "Horospherical\n")
    code, out, _ = call(capsys, "classify", "--space", "s2", "--coeffs", "1,1/2,0,0,0,0")
    assert out == "Elliptic\n"


def test_classify_malformed(capsys):
    code, _, err = call(capsys, "classify", "--space", "e2", "--coeffs", "1,2,3")
    assert code != 0 and "6" in err
    code, _, err = call(capsys, "classify", "--space", "e2", "--coeffs", "1,2,3,x,0,0")
    assert code != 0


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as err:
        run(["list", "--bogus"])
    assert err.value.code != 0


def test_verify_unknown_id(capsys):
    code, _, err = call(capsys, "verify", "E99")
    assert code != 0
    assert "E1" in err and "S9" in err


def test_verify_single_system(capsys):
    code, out, err = call(capsys, "verify", "E3")
    assert code == 0 and err == ""
    assert out.strip().endswith("E3: 9/9 checks passed")


def test_verify_json_and_seed_env(capsys, monkeypatch):
    monkeypatch.setenv("SUPERINT_SEED", "17")
    code, out, _ = call(capsys, "verify", "E1", "--samples", "10", "--emit", "json")
    assert code == 0
    rep = json.loads(out)[0]
    assert rep["system"] == "E1"
    assert rep["checks"][0]["seed"] == 17
    assert set(rep["checks"][0]) == {"name", "residual", "tolerance", "pass", "seed", "points"}


def test_verify_with_parameter(capsys):
    code, out, _ = call(capsys, "verify", "E3", "--param", "omega=2+i", "--samples", "10")
    assert code == 0


def test_table_e2_matches_fixture_bytes(capsys):
    code, out, _ = call(capsys, "table", "e2", "--emit", "json", "--check")
    assert code == 0
    assert out == fixture_text("table_e2.json")
    code2, again, _ = call(capsys, "table", "e2", "--emit", "json")
    assert again == out


@pytest.mark.xfail(strict=True, reason="regenerated S1 and S5 lack the published Elliptic "
                   "entries; see the decisions ledger")
def test_table_s2_check(capsys):
    code, _, _ = call(capsys, "table", "s2", "--check")
    assert code == 0


def test_table_s2_reports_each_mismatch(capsys):
    code, out, err = call(capsys, "table", "s2", "--check")
    assert code == 1
    assert err.splitlines() == ["MISMATCH S1 Elliptic: regenerated False, published True",
                                "MISMATCH S5 Elliptic: regenerated False, published True"]
    assert out.startswith("| | Spherical | Horospherical | Elliptic |")


def test_list_and_show(capsys):
    code, out, _ = call(capsys, "list")
    assert code == 0 and len(out.splitlines()) == 29
    code, out, _ = call(capsys, "list", "--space", "s2")
    assert len(out.splitlines()) == 9
    code, out, _ = call(capsys, "show", "E3")
    assert out.splitlines()[:2] == ["E3 (Euclidean)", "  V = omega^2*(x^2+y^2)"]


def test_integrate_writes_csv(capsys, tmp_path):
    path = tmp_path / "e3.csv"
    code, out, _ = call(capsys, "integrate", "E3", "--t", "1", "--dt", "0.01", "--out", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "t,q1_re,q1_im,q2_re,q2_im,p1_re,p1_im,p2_re,p2_im"
    assert len(lines) == 102
    assert "drift H" in out


def test_integrate_explicit_start(capsys):
    code, out, _ = call(capsys, "integrate", "E3", "--t", "1", "--start", "1,0,0,1")
    assert code == 0 and out.splitlines()[1].startswith("start 1+0j 0+0j 0+0j 1+0j")


def test_integrate_singular_start(capsys):
    code, _, err = call(capsys, "integrate", "E1", "--start", "0,1,1,1")
    assert code != 0 and "singular" in err


def test_export_round_trip(capsys, tmp_path):
    path = tmp_path / "catalog.json"
    assert call(capsys, "export", "--out", str(path))[0] == 0
    assert catalog.load_catalog(path.read_text()) == catalog.systems()
    code, out, _ = call(capsys, "export")
    assert out == path.read_text()


@pytest.fixture(scope="module")
def verify_all():
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = run(["verify", "all"])
    return code, out.getvalue(), err.getvalue()


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="verify all includes the sphere table comparison, "
                   "which fails on S1 and S5 Elliptic")
def test_verify_all_clean(verify_all):
    assert verify_all[0] == 0


@pytest.mark.slow
def test_verify_all_fails_only_on_sphere_table(verify_all):
    code, out, err = verify_all
    assert code == 1
    assert err.splitlines() == ["FAIL table:s2 membership-mismatches: residual 2 exceeds tolerance 0"]
    assert "table:e2: 1/1 checks passed" in out
    assert "families: 12/12 checks passed" in out


@pytest.mark.skipif(shutil.which("superint") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["superint", "classify", "--space", "e2", "--coeffs", "0,0,0,1,0,0"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout == "Parabolic\n"
