import json
import subprocess
import sys

import pytest

from qsphere.cli import main, parse_scalar
from qsphere.scalars import Q


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_reduce_sphere(capsys):
    assert run(capsys, "reduce", "C^{kl} x_k x_l")[:2] == (0, "1\n")
    assert run(capsys, "reduce", "sphere", "--N", "5")[:2] == (0, "1\n")


def test_reduce_error_exit_code(capsys):
    code, _, err = run(capsys, "reduce", "dx4", "--N", "3")
    assert code == 2 and "outside 1..3" in err
    code, _, err = run(capsys, "reduce", "x1 +")
    assert code == 2 and "position" in err


def test_unknown_command_and_flag(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["reduce", "x1", "--bogus"])
    assert info.value.code == 2


def test_tensor_lines(capsys):
    code, out, _ = run(capsys, "tensor", "C", "--N", "3")
    assert code == 0
    assert out.splitlines() == ["1 3  q^(-1/2)", "2 2  1", "3 1  q^(1/2)"]
    code, out, _ = run(capsys, "tensor", "RhatInv", "--N", "4", "--format", "records")
    first = json.loads(out.splitlines()[0])
    assert first == {"indices": [1, 1, 1, 1], "coefficient": "q^(-1)"}


def test_classify_theta_zero(capsys):
    code, out, _ = run(capsys, "classify", "--constraint", "theta-zero", "--N", "6")
    assert code == 0
    lines = out.splitlines()
    assert "no solution" in lines
    assert "witness: a1^2 + (-1)" in lines
    assert "witness: a1^2 + (-q^(-1) - q)*a1 + (1)" in lines


def test_classify_free_small_n_caveat(capsys):
    code, out, _ = run(capsys, "classify", "--N", "3")
    assert code == 0 and "no completeness claim" in out
    assert out.count("solution ") == 2


def test_verify_first_order(capsys):
    code, out, _ = run(capsys, "verify", "first-order", "--sign", "plus", "--N", "3")
    assert code == 0
    assert out.splitlines()[-1].strip().startswith("all pass")
    assert "FAIL" not in out


def test_verify_records(capsys):
    code, out, _ = run(capsys, "verify", "limits", "--N", "4", "--format", "records")
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert all(list(r) == ["suite", "check", "n", "params", "status", "witness"] for r in recs)
    assert all(r["status"] == "pass" for r in recs)


def test_verify_failure_exit_code(capsys, monkeypatch):
    from qsphere import suites

    def broken(N, **_):
        yield suites.Check("always fails", False, "x1")

    monkeypatch.setitem(suites.SUITES, "limits", broken)
    code, out, _ = run(capsys, "verify", "limits")
    assert code == 1 and "FAIL always fails  witness: x1" in out


def test_limit_and_dim(capsys):
    code, out, _ = run(capsys, "limit", "--sign", "minus", "--N", "4")
    assert "dx_i . x_j = -x_j dx_i - 2 x_i dx_j + 2 x_i x_j theta" in out
    assert "theta x_i - x_i theta = -2 dx_i" in out
    assert run(capsys, "dim", "--wedge", "4", "--N", "3")[1] == "0\n"
    assert run(capsys, "dim", "--algebra", "2", "--N", "4")[1] == "9\n"


def test_wedge_normal(capsys):
    code, out, _ = run(capsys, "wedge-normal", "g4 ^ g3 ^ g2 ^ g1", "--N", "4")
    assert out == "q^4*g-1 ^ g-2 ^ g-3 ^ g-4\n"
    code, out, _ = run(capsys, "wedge-normal", "g1 ^ g1", "--N", "4")
    assert out == "0\n"


def test_alpha_flag():
    assert parse_scalar("q^2") == Q * Q
    with pytest.raises(ValueError):
        parse_scalar("x1")


def test_output_is_byte_stable():
    cmd = [sys.executable, "-m", "qsphere", "verify", "wedge", "--N", "3", "--format", "records"]
    a = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    assert a == b and a
