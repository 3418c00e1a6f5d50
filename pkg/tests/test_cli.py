import json

import pytest

from pomverify import cli
from pomverify.core import criterion_report, is_p_integer
from pomverify.report import emit
from pomverify.scan import ScanReport


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr()


def test_check_known(capsys):
    code, out = run(capsys, "check", "30")
    assert code == 0 and "P-integer true" in out.out


def test_check_json_collision(capsys):
    code, out = run(capsys, "check", "8", "--json", "--no-timestamp")
    d = json.loads(out.out)
    assert code == 0 and d["is_p_integer"] is False and d["collision"] == [3, 11]


def test_criterion_json_lines(capsys):
    code, out = run(capsys, "criterion", "30", "12", "--json")
    lines = [json.loads(x) for x in out.out.splitlines()]
    assert code == 0 and len(lines) == 2
    assert set(lines[0]) == {"k", "T", "t", "L", "case", "d1", "d2", "d3", "s_L", "log_k_upper",
                             "criterion"}
    assert (lines[0]["d1"], lines[0]["d2"], lines[0]["d3"]) == (7, 4, 3)


def test_bounds_range_csv(capsys):
    code, out = run(capsys, "bounds", "--range", "400000", "1000000", "300000")
    rows = out.out.splitlines()
    assert code == 0 and rows[0].startswith("x,pi_exact,dusart_lower")
    assert rows[-1].startswith("1000000,78498,")


def test_bounds_x_list(capsys, tmp_path):
    f = tmp_path / "xs.txt"
    f.write_text("# sample\n1000\n1e6\n")
    code, out = run(capsys, "bounds", "--x-list", str(f), "--profile", "rh")
    assert code == 0 and out.out.splitlines()[2].endswith(",rh")


def test_scan_small(capsys, tmp_path):
    ck = tmp_path / "ck.jsonl"
    code, out = run(capsys, "scan", "--from", "550000", "--to", "600000", "--shards", "2",
                    "--checkpoint", str(ck), "--json", "--no-timestamp")
    d = json.loads(out.out)
    assert code == 0 and d["status"] == "COMPLETE" and d["failed"] == []
    assert ck.exists()


def test_prove_thm11(capsys):
    code, out = run(capsys, "prove", "thm11", "--precision", "256")
    assert code == 0
    assert out.out.count("[CERTIFIED]") == 4 and "overall: CERTIFIED" in out.out


def test_prove_kadiri_exit_negative(capsys):
    code, out = run(capsys, "prove", "thm11", "--profile", "kadiri-experimental", "--json",
                    "--no-timestamp")
    d = json.loads(out.out)
    assert code == 1 and d["certifying"] is False and d["overall"] is False


def test_prove_uncertifiable_is_operational(capsys):
    code, _ = run(capsys, "prove", "thm11", "--precision", "16")
    assert code == 2


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["scan", "--from", "550001", "--to", "600000"],
    ["prove", "thm12", "--profile", "unconditional"],
    ["prove", "thm11", "--profile", "rh"],
    ["bounds", "--range", "10", "5", "1"],
    ["bounds", "--range", "1", "5", "1", "--profile", "nope"],
    ["check", "1"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as e:
        raise SystemExit(cli.main(argv))
    assert e.value.code == 64


def test_io_error(capsys, tmp_path):
    code, _ = run(capsys, "bounds", "--x-list", str(tmp_path / "missing"))
    assert code == 74


def test_env_ceiling_is_respected(capsys, monkeypatch):
    from pomverify import primes as pe

    monkeypatch.setenv(pe.ENV_CEILING, "5000000")
    prev = pe.set_engine(pe.PrimeEngine())
    try:
        code, out = run(capsys, "criterion", "3000000", "--json")
    finally:
        pe.set_engine(prev)
    assert code == 0 and json.loads(out.out)["criterion"] == "indeterminate"


def test_emit_is_deterministic():
    r = criterion_report(30)
    assert emit(r, "json") == emit(criterion_report(30), "json")
    assert "generated_at" in emit(is_p_integer(6), "json", timestamp=True)
    assert "generated_at" not in emit(is_p_integer(6), "json")


def test_empty_scan_report_json():
    d = json.loads(emit(ScanReport(550000, 550000), "json"))
    assert d["witnesses"] == [] and d["failed"] == []


def test_golden_text_for_check(capsys):
    a = run(capsys, "check", "18")[1].out
    b = run(capsys, "check", "18")[1].out
    assert a == b == "k=18: P-integer true\n"
