from __future__ import annotations

import json

import pytest

from conftest import FIXTURES, read_fixture
from transcheck.cli import DEFAULTS, EXIT_ENV, EXIT_OK, EXIT_USAGE, build_parser, main, resolve_options

ALG2 = FIXTURES / "motivating" / "distribute_candies.c"
REPLAY = str(FIXTURES / "replay" / "motivating")
PROBLEM = str(FIXTURES / "motivating" / "problem")


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_unknown_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == EXIT_USAGE


def test_missing_file_is_usage_error(tmp_path):
    assert main(["verify", str(tmp_path / "nope.c")]) == EXIT_USAGE


def test_unsupported_c_is_usage_error(tmp_path, capsys):
    src = tmp_path / "bad.c"
    src.write_text("int main() { int *p; return 0; }\n")
    assert main(["verify", str(src)]) == EXIT_USAGE
    assert "bad.c:1:" in capsys.readouterr().err


def test_config_then_flags(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"unwind": 12, "timeout": 2.5}))
    args = build_parser().parse_args(["verify", "x.c", "--config", str(cfg), "--unwind", "3"])
    opts = resolve_options(args)
    assert opts["unwind"] == 3 and opts["timeout"] == 2.5
    assert opts["inline_depth"] == DEFAULTS["inline_depth"]


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"unwnd": 3}))
    assert main(["verify", str(ALG2), "--config", str(cfg)]) == EXIT_USAGE


def test_verify_with_dimacs(tmp_path, capsys):
    dimacs = tmp_path / "tf.cnf"
    assert main(["verify", str(ALG2), "--unwind", "8", "--dimacs", str(dimacs)]) == EXIT_OK
    verdict = _json_out(capsys)
    assert verdict["status"] == "Violated"
    assert dimacs.read_text().startswith("p cnf ")
    assert (tmp_path / "tf.cnf.map").exists()


def test_localize_with_wcnf(tmp_path, capsys):
    wcnf = tmp_path / "g.wcnf"
    assert main(["localize", str(ALG2), "--unwind", "8", "--wcnf", str(wcnf)]) == EXIT_OK
    out = _json_out(capsys)
    assert out["cost"] == 1
    assert [4, "ans = 0 + 1;"] in out["statements"]
    assert wcnf.read_text().startswith("p wcnf ")


def test_localize_correct_program_has_no_diagnosis(tmp_path, capsys):
    src = tmp_path / "ok.c"
    src.write_text(read_fixture("motivating", "distribute_candies.c").replace("    ans = 0 + 1;\n", ""))
    assert main(["localize", str(src), "--unwind", "8"]) == EXIT_OK
    out = _json_out(capsys)
    assert out["cost"] == 0 and out["statements"] == []


def test_mutate_and_validate(tmp_path, capsys):
    code = main(["mutate", str(FIXTURES / "cases" / "p188"), "--kind", "ADC", "--site", "0", "--validate",
                 "--timeout", "2", "--out", str(tmp_path)])
    assert code == EXIT_OK
    out = _json_out(capsys)
    assert out["mutant"] == read_fixture("cases", "p188", "reference_mutant.py")
    assert out["validation"]["accepted"]
    assert (tmp_path / "p188-adc" / "mutant.json").exists()


def test_mutate_without_sites(tmp_path):
    src = tmp_path / "p.py"
    src.write_text("print(1)\n")
    assert main(["mutate", str(src), "--kind", "WBO"]) == EXIT_USAGE


def test_run_with_mock(tmp_path, capsys):
    code = main(["run", PROBLEM, "--mock", REPLAY, "--unwind", "8", "--out", str(tmp_path)])
    assert code == EXIT_OK
    report = json.loads((tmp_path / "problem.json").read_text())
    assert report["outcome"] == "CorrectBugLocalised"


def test_run_missing_fixture_is_env_error(tmp_path):
    code = main(["run", str(FIXTURES / "cases" / "p188"), "--mock", REPLAY,
                 "--out", str(tmp_path)])
    assert code == EXIT_ENV


def test_transpile_unreachable_endpoint_reports_give_up(capsys):
    code = main(["transpile", PROBLEM, "--endpoint", "http://127.0.0.1:9/v1", "--timeout", "2"])
    assert code == EXIT_ENV


def test_report(tmp_path, capsys):
    runs = tmp_path / "runs"
    assert main(["run", PROBLEM, "--mock", REPLAY, "--unwind", "8", "--out", str(runs)]) == EXIT_OK
    capsys.readouterr()
    assert main(["report", str(runs)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "Fault localisation on" in text and "100.0%" in text
    assert (runs / "metrics" / "metrics.csv").exists()


def test_report_empty_dir(tmp_path):
    assert main(["report", str(tmp_path)]) == EXIT_USAGE
