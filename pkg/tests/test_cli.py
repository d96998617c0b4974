import csv
import io
import json
import subprocess
import sys

import pytest

from secantfano.cli import RunSpec, UsageError, main, parse_d, run


def call(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _values(out):
    rows = {}
    for line in out.splitlines():
        if line.startswith("  ") and not line.startswith("   "):
            parts = line.split()
            if len(parts) >= 2:
                rows[parts[0]] = " ".join(parts[1:])
    return rows


def test_invariants_d4_golden(capsys):
    code, out, _ = call(capsys, "invariants", "--d", "4")
    assert code == 0
    vals = _values(out)
    assert vals["(-K)^3"] == "24"
    assert vals["lct(Sigma,T)"] == "3/4"
    assert vals["alpha_G"] == "3/4"
    assert vals["S(T)"] == "1/4"
    assert vals["H^3"] == "3"


def test_invariants_symbolic_limit(capsys):
    code, out, _ = call(capsys, "invariants")
    vals = _values(out)
    assert vals["alpha_G"] == "(d + 2)/(2*d)"
    assert vals["alpha_G_limit_d_to_infinity"] == "1/2"
    assert vals["(-K)^3"] == "(32*d - 32)/(d^2 - 4*d + 4)"


def test_zhuang_symbolic_prints_margin(capsys):
    code, out, _ = call(capsys, "zhuang-check", "--d", "symbolic")
    assert code == 0
    assert "margin_factor = 1/(d + 2)" in out
    assert "K-polystable" in out


def test_zhuang_adversarial_exits_1_with_certificate(capsys):
    code, out, _ = call(capsys, "zhuang-check", "--t", "1/2")
    assert code == 1
    assert "[FAIL] centre C" in out
    assert "margin_factor = 0" in out
    assert "inconclusive" in out


def test_domain_error_exit_2(capsys):
    code, out, err = call(capsys, "invariants", "--d", "3")
    assert code == 2 and out == ""
    assert "d >= 4" in err
    code, _, err = call(capsys, "higher-secant", "--k", "2", "--d", "4")
    assert code == 2 and "2k+1" in err


def test_usage_errors_exit_2(capsys):
    assert call(capsys, "lct", "--d", "9..5")[0] == 2
    assert call(capsys, "lct", "--d", "four")[0] == 2
    assert call(capsys, "lct", "--d", "4", "--config", "/no/such.yaml")[0] == 2
    assert call(capsys, "chow-eval", "--expr", "H*Q", "--d", "5")[0] == 2
    assert call(capsys, "lct", "--boundary", "W")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_malformed_config_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text("primes: [A\n")
    assert call(capsys, "ledger-replay", "--config", str(p))[0] == 2


def test_custom_config(tmp_path, capsys):
    p = tmp_path / "chain.yaml"
    p.write_text("primes: [D1, D2]\nseeds: {B: {D1: 1, D2: 1}}\nsteps:\n  - {exceptional: E, incident: {D1: 1, D2: 1}}\n")
    code, out, _ = call(capsys, "lct", "--config", str(p), "--boundary", "B", "--d", "5", "--output", "json")
    assert code == 0
    vals = json.loads(out)["results"][0]["values"]
    assert vals["lct"] == "1"


def test_chow_eval(capsys):
    assert _values(call(capsys, "chow-eval", "--expr", "H*H*H", "--d", "5")[1])["H*H*H"] == "6"
    assert _values(call(capsys, "chow-eval", "--expr", "minus_K^3")[1])["minus_K^3"] == "(32*d - 32)/(d^2 - 4*d + 4)"
    assert _values(call(capsys, "chow-eval", "--expr", "Z*Z*A")[1])["Z*Z*A"] == "4"


def test_higher_secant(capsys):
    vals = _values(call(capsys, "higher-secant", "--k", "2", "--d", "7")[1])
    assert (vals["anticanonical_coeff"], vals["degree"], vals["anticanonical_volume"], vals["discrepancy_coeff"]) == (
        "2",
        "10",
        "320",
        "1/3",
    )
    assert call(capsys, "higher-secant", "--k", "1", "--d", "3")[0] == 0


def test_csv_range_ordered(capsys):
    code, out, _ = call(capsys, "lct", "--d", "4..7", "--output", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["d", "name", "numerator", "denominator"]
    lct_rows = [r for r in rows[1:] if r[1] == "lct"]
    assert lct_rows == [["4", "lct", "3", "4"], ["5", "lct", "7", "10"], ["6", "lct", "2", "3"], ["7", "lct", "9", "14"]]


def test_csv_symbolic(capsys):
    out = call(capsys, "invariants", "--output", "csv")[1]
    assert "d,alpha_G,d + 2,2*d" in out.splitlines()


@pytest.mark.parametrize(
    "argv",
    [
        ["invariants", "--d", "4..6"],
        ["zhuang-check"],
        ["cylinder-verify", "--d", "4"],
        ["ledger-replay"],
        ["lct", "--d", "symbolic"],
    ],
)
def test_json_deterministic_and_round_trips(capsys, argv):
    _, a, _ = call(capsys, *argv, "--output", "json")
    _, b, _ = call(capsys, *argv, "--output", "json")
    assert a == b
    assert json.dumps(json.loads(a), indent=2, ensure_ascii=False) + "\n" == a


def test_ledger_replay_rows(capsys):
    vals = _values(call(capsys, "ledger-replay")[1])
    assert vals["T[E2]"] == "2*d/(d - 2)"
    assert vals["K[E2]"] == "4/(d - 2)"
    assert vals["A(E2)"] == "(d + 2)/(d - 2)"


def test_cylinder_verify_d4_note(capsys):
    code, out, _ = call(capsys, "cylinder-verify", "--d", "4")
    assert code == 0
    assert "cubic threefold" in out
    assert out.count("[PASS]") == 5


def test_runspec_validation():
    with pytest.raises(UsageError):
        RunSpec("invariants", ("single", 2))
    with pytest.raises(UsageError):
        RunSpec("nope", ("symbolic",))
    assert parse_d("4..6") == ("range", 4, 6)
    assert RunSpec("lct", ("range", 4, 6)).d_values() == [4, 5, 6]
    buf = io.StringIO()
    assert run(RunSpec("invariants", ("single", 4), output="json"), buf) == 0
    assert json.loads(buf.getvalue())["results"][0]["values"]["(-K)^3"] == "24"


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "secantfano", "invariants", "--d", "3"], capture_output=True, text=True
    )
    assert proc.returncode == 2
    assert "out of range" in proc.stderr
