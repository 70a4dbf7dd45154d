# services/pattern-packing/tests/unit/test_cli.py
import json

import pytest

from permpack.cli import main, parse_w
from permpack.errors import ParseError

FAST = ["--starts", "8"]


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    return json.loads(out)


def test_density(capsys):
    payload = run_json(capsys, "density", "21", "2143")
    result = payload["result"]
    assert result["count"] == 2
    assert result["p"] == "1/3"
    assert result["density"]["num"] == 1 and result["density"]["den"] == 3


def test_run_config_is_echoed(capsys):
    payload = run_json(capsys, "density", "12", "123")
    config = payload["config"]
    assert config["subcommand"] == "density"
    assert config["optimizer"]["starts"] == 64
    assert config["seed"] == 0
    assert config["forced"] is False
    assert config["arguments"]["tau"] == "12"


def test_forced_runs_carry_a_warning(capsys):
    payload = run_json(capsys, "bound", "1*132 - 1*21", "--n", "2", "--force", *FAST)
    assert payload["config"]["forced"] is True
    assert payload["config"]["warnings"]
    assert payload["result"]["method"] == "projected-ascent"


def test_bound(capsys):
    result = run_json(capsys, "bound", "132", "--n", "2", *FAST)["result"]
    assert result["value"] == pytest.approx(4 / 9, abs=1e-9)
    assert result["exact"] == {"num": 4, "den": 9}
    assert result["mode"] == "pack"


def test_extended_bound_with_dumped_polynomial(capsys):
    result = run_json(
        capsys, "bound", "1243", "--mode", "pack-ext", "--n", "1", "--dump-poly", *FAST
    )["result"]
    assert result["value"] == pytest.approx(3 / 8, abs=1e-9)
    assert result["W"] == []
    assert result["polynomial"]["vars"] == 2


def test_minimization_bound_sequence(capsys):
    result = run_json(capsys, "bound-seq", "21", "--mode", "min", "--n-max", "3", *FAST)["result"]
    values = [r["value"] for r in result["results"]]
    assert values == pytest.approx([1.0, 1 / 2, 1 / 3], abs=1e-8)
    assert result["monotone"] is True


def test_closed_form(capsys):
    result = run_json(capsys, "closed-form", "^2 2")["result"]
    assert result["value"] == "3/8"
    assert result["order"] == 1
    assert result["W"] == []


def test_closed_form_check(capsys):
    result = run_json(capsys, "closed-form", "^3 3", "--check", *FAST)["result"]
    assert result["value"] == "5/16"
    assert result["check_error"] < 1e-6
    assert result["point"] == ["1/2", "1/2"]
    assert result["witness_error"]["max_abs_error"] < 1e-6


def test_minmono(capsys):
    result = run_json(capsys, "minmono", "3", "4", "--check", "2", *FAST)["result"]
    assert result["value"] == "1/8"
    assert result["check_error"] < 1e-8


def test_qblocks(capsys):
    result = run_json(capsys, "qblocks", "321457689")["result"]
    assert result["count"] == 4
    assert result["blocks"] == "3 ^2 2 ^2"
    assert result["decompositions"][0] == "(3, ^2, 2, ^2)"


def test_extremal_and_erdos_szekeres(capsys):
    result = run_json(capsys, "extremal", "21", "--N", "3")["result"]
    assert result["witnesses"] == ["321"]
    result = run_json(capsys, "extremal", "123 + 321", "--N", "4", "--mode", "min", "--layered")[
        "result"
    ]
    assert result["value"] == {"num": 0, "den": 1}
    result = run_json(capsys, "erdos-szekeres", "--N", "4", "--k", "2")["result"]
    assert result["counterexample"] == "2143"


def test_sandwich(capsys):
    result = run_json(capsys, "sandwich", "21", "--n", "1", "--N", "4", *FAST)["result"]
    assert result["lower"] == pytest.approx(1.0)
    assert result["upper"] == {"num": 1, "den": 1}


def test_csv_output(capsys):
    code, out, _ = run(capsys, "extremal", "21", "--N", "3", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "N,mode,value_num,value_den,witness_count"
    assert lines[1] == "3,max_all,1,1,1"


def test_text_output(capsys):
    code, out, _ = run(capsys, "density", "21", "2143", "--format", "text")
    assert code == 0
    assert "result.p: 1/3" in out.splitlines()


@pytest.mark.parametrize(
    "argv,code",
    [
        (["density", "12a", "21"], 2),
        (["bound", "132", "--n", "2", "--mode", "pack-ext", "--W", "5"], 2),
        (["bound", "132", "--n", "2", "--W", "1"], 2),
        (["bound", "21", "--n", "2", "--mode", "min", "--W", "1"], 2),
        (["minmono", "2", "5"], 3),
        (["bound", "231", "--n", "2"], 3),
        (["bound", "1*132 - 1*21", "--n", "2"], 3),
        (["extremal", "21", "--N", "10"], 4),
        (["bound", "132", "--n", "9"], 4),
    ],
)
def test_exit_codes(capsys, argv, code):
    exit_code, out, err = run(capsys, *argv)
    assert exit_code == code
    assert out == ""
    error = json.loads(err.strip().splitlines()[-1])
    assert "error" in error and "detail" in error


def test_parse_w():
    assert parse_w("2,3") == [2, 3]
    assert parse_w("3 1 3") == [1, 3]
    assert parse_w(None) == []
    with pytest.raises(ParseError):
        parse_w("1,x")
