from fractions import Fraction

import pytest

from gshift.cli import RunConfig, main, parse_eps, show_point
from gshift.core import Point

SPECS = {
    "golden": "# golden mean\nalphabet finite 2\nforbidden 11\n",
    "even": "alphabet finite 2\nbuiltin even\n",
    "allow0": "alphabet countable\nallow 0\nweights geometric 1/2\n",
    "families": "alphabet countable\nfamily 01\n",
    "bad": "alphabet finite 2\nforbiden 11\n",
    "empty": "alphabet finite 2\nforbidden 0 1\n",
}


@pytest.fixture
def spec(tmp_path):
    def make(name):
        path = tmp_path / f"{name}.spec"
        path.write_text(SPECS[name])
        return str(path)

    return make


def call(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_golden(spec, capsys):
    code, out, _ = call(capsys, "check", "--spec", spec("golden"))
    assert code == 0
    assert "closed: yes, disjoint: yes (gap 1/4, exact distance 1/2)" in out
    assert "language sizes n=1..16: 2 3 5 8" in out
    assert "witnesses m=2 [exact] 1: 11" in out


def test_check_even(spec, capsys):
    code, out, _ = call(capsys, "check", "--spec", spec("even"))
    assert code == 0
    assert "closed: no (witness …0001), meets K: yes" in out


def test_check_writes_witness_table(spec, capsys, tmp_path):
    target = tmp_path / "table.tsv"
    call(capsys, "check", "--spec", spec("golden"), "--depth", "9", "--mmax", "8", "--out", str(target))
    lines = target.read_text().splitlines()
    assert lines[0] == "m\tword\tstatus"
    assert "2\t11\texact" in lines
    assert lines[-1].endswith("\tdepth-bounded")  # m = 9 is past the pumping bound


def test_parse_errors_exit_2(spec, capsys):
    code, _, err = call(capsys, "check", "--spec", spec("bad"))
    assert code == 2
    assert "line 2" in err and "forbiden" in err
    code, _, err = call(capsys, "check", "--spec", spec("empty"))
    assert code == 2
    code, _, err = call(capsys, "check", "--spec", "/nonexistent/file.spec")
    assert code == 2


def test_usage_errors_exit_2(spec, capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate", "--spec", spec("golden")])
    assert info.value.code == 2
    code, _, err = call(capsys, "build", "--spec", spec("golden"), "--depth", "4")
    assert code == 2 and "--depth" in err
    code, _, _ = call(capsys, "build", "--spec", spec("allow0"), "--variant", "krieger")
    assert code == 2


def test_build_golden_weighted(spec, capsys):
    code, out, _ = call(capsys, "build", "--spec", spec("golden"))
    assert code == 0
    assert "certificate: m=2 1->0" in out
    assert "0 failed" in out
    assert "strictly positive: Holds (gap 1/2)" in out


def test_build_golden_krieger_table(spec, capsys):
    code, out, _ = call(capsys, "build", "--spec", spec("golden"), "--variant", "krieger")
    assert code == 0
    rows = [ln.split("\t") for ln in out.splitlines() if ln.startswith("g\t")]
    assert [r[1] for r in rows] == ["00", "01", "10", "11"]
    assert rows[2][3] == "[1, 1]" and rows[3][3] == "[0, 0]"


def test_build_even_krieger_not_applicable(spec, capsys):
    code, out, _ = call(capsys, "build", "--spec", spec("even"), "--variant", "krieger")
    assert code == 0
    assert "strictly positive: NotApplicable (witness …0001 in K)" in out


def test_build_report_file(spec, capsys, tmp_path):
    target = tmp_path / "checks.tsv"
    call(capsys, "build", "--spec", spec("allow0"), "--out", str(target))
    rows = target.read_text().splitlines()
    assert rows and all(r.startswith("check\t") and r.endswith("\tpass") for r in rows)


def test_simulate_countable(spec, capsys, tmp_path):
    target = tmp_path / "traj.txt"
    code, out, _ = call(capsys, "simulate", "--spec", spec("allow0"), "--steps", "500", "--runs", "2",
                        "--out", str(target))
    assert code == 0
    assert "Invariant runs=2 steps=500 exits=0" in out
    assert "run 0 symbol counts: 0:500" in out
    lines = target.read_text().splitlines()
    assert len(lines) == 500 and lines[0] == "1 0 1"


def test_simulate_baseline_fails(spec, capsys):
    code, out, _ = call(capsys, "simulate", "--spec", spec("golden"), "--variant", "baseline",
                        "--steps", "50", "--runs", "20")
    assert code == 1
    assert out.splitlines()[4].startswith("NotInvariant")


def test_simulate_start_point(spec, capsys):
    code, out, _ = call(capsys, "simulate", "--spec", spec("golden"), "--steps", "10", "--runs", "1",
                        "--start", "0|1")
    assert code == 0 and "start: …0001" in out
    code, _, err = call(capsys, "simulate", "--spec", spec("golden"), "--start", "0|11")
    assert code == 2 and "not in K" in err


@pytest.mark.parametrize("argv", [
    ["check"],
    ["build", "--variant", "krieger"],
    ["simulate", "--steps", "300", "--runs", "3", "--seed", "9"],
])
def test_reports_are_byte_identical(spec, capsys, argv):
    path = spec("golden")
    first = call(capsys, *argv, "--spec", path)
    second = call(capsys, *argv, "--spec", path)
    assert first == second


def test_helpers():
    assert parse_eps("1/2^20") == Fraction(1, 1 << 20)
    assert parse_eps("3/8") == Fraction(3, 8)
    assert show_point(Point.parse("0|1")) == "…0001"
    assert show_point(Point.parse("01")) == "…0101"
    with pytest.raises(ValueError):
        RunConfig("x", "check", depth=4, m_max=8)
    with pytest.raises(ValueError):
        RunConfig("x", "check", eps=Fraction(0))


def test_module_entry_point_exit_status(spec):
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "gshift", "check", "--spec", spec("bad")],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "unknown or repeated directive 'forbiden'" in proc.stderr
