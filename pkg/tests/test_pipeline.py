from __future__ import annotations

import json

import pytest

from conftest import FIXTURES, read_fixture
from transcheck.harness import RunOutcome, load_problem
from transcheck.llm import LlmConfig, NoFixture, ScriptedClient, TransportError, extract_c_code
from transcheck.pipeline import (COMPILATION, CORRECT, FIXED, GAVE_UP, NO_DIAGNOSIS, OTHER,
                                 OUTCOME_CLASSES, VERIFIED, EmptyGroup, MissingGroundTruth,
                                 PipelineConfig, PipelineReport, classify_outcome,
                                 compute_metrics, run_pipeline, strip_timing,
                                 validate_candidate)
from transcheck.pipeline.plots import write_report

ALG2 = read_fixture("motivating", "distribute_candies.c")
CORRECTED_C = ALG2.replace("    ans = 0 + 1;\n", "")
PASS, FAIL = RunOutcome("Pass"), RunOutcome("AssertionFailed", line=11)


# -- gate ----------------------------------------------------------------------

def test_gate_parse_error():
    d = validate_candidate(PASS, "int main() { return 0 }")
    assert d.kind == "Retry" and d.category == "parse"
    assert d.reason.startswith("C compilation/parse error: candidate.c:1:")


def test_gate_differential_reason():
    d = validate_candidate(PASS, ALG2)
    assert d.kind == "Retry" and d.category == "differential"
    assert d.reason == "assertion distributeCandies(5, 2) == 3 failed in C but passed in Python"


def test_gate_runtime_error_is_a_c_failure():
    d = validate_candidate(PASS, "int main(){ int z = 0; return 1 / z; }")
    assert d.kind == "Retry" and "div-by-zero" in d.reason


def test_gate_nondet_candidate_counts_as_failure():
    d = validate_candidate(PASS, "int main(){ int x = nondet_int(); assert(x == x); return 0; }")
    assert d.kind == "Retry"


def test_gate_assume_violation_is_not_failure():
    d = validate_candidate(PASS, "int main(){ assume(0); assert(0); return 0; }")
    assert d.kind == "ToVerifier"


def test_gate_decision_json():
    d = validate_candidate(FAIL, CORRECTED_C)
    assert type(d).from_json(json.loads(json.dumps(d.to_json()))) == d


# -- classification ------------------------------------------------------------

def _report(outcome=None, *, attempts=None, status="Success", verdict="Violated",
            decision="ToVerifier", diagnoses=True, lines=(4,), mutation="ADC", model="m",
            description=True, benchmark="b"):
    r = PipelineReport("p", benchmark, mutation, model, description)
    r.candidate = {"status": status, "decision": {"kind": decision},
                   "attempts": attempts or [{"classification": "Accepted"}]}
    if status == "Success" and verdict:
        r.verdict = {"status": verdict}
    if diagnoses:
        r.diagnoses = {"cost": 1, "diagnoses": [{"statements": [1]}]}
        r.backmap = {"statements": [{"text": "x", "line": l} for l in lines]}
    r.outcome = outcome
    return r


TRUTH = {"line": 4}


def test_classify_correct_and_other():
    assert classify_outcome(_report(lines=(4,)), TRUTH) == CORRECT
    assert classify_outcome(_report(lines=(8,)), TRUTH) == OTHER
    assert classify_outcome(_report(lines=(None,)), TRUTH) == OTHER


def test_classify_missing_ground_truth():
    with pytest.raises(MissingGroundTruth):
        classify_outcome(_report())


def test_classify_compilation_vs_gave_up():
    parse = [{"classification": "ParseFail"}] * 5
    assert classify_outcome(_report(status="GaveUp", attempts=parse)) == COMPILATION
    mixed = [{"classification": "ParseFail"}, {"classification": "DifferentialFail"}]
    assert classify_outcome(_report(status="GaveUp", attempts=mixed)) == GAVE_UP
    r = _report()
    r.candidate = None
    assert classify_outcome(r) == GAVE_UP


def test_classify_verified_and_fixed():
    assert classify_outcome(_report(verdict="Verified", diagnoses=False)) == VERIFIED
    assert classify_outcome(_report(verdict="Verified", diagnoses=False,
                                    decision="FixedCodeSuspected")) == FIXED


def test_classify_no_diagnosis_and_no_verdict():
    assert classify_outcome(_report(diagnoses=False), TRUTH) == NO_DIAGNOSIS
    assert classify_outcome(_report(verdict=None, diagnoses=False)) == GAVE_UP


def test_report_json_round_trip(tmp_path):
    r = _report(CORRECT)
    path = r.save(tmp_path / "r.json")
    assert PipelineReport.load(path) == r
    bad = r.to_json()
    bad["schema_version"] = 99
    with pytest.raises(ValueError):
        PipelineReport.from_json(bad)


def test_strip_timing():
    doc = {"a": 1, "timings": {"x": 1}, "b": [{"duration_ms": 3, "c": 2}]}
    assert strip_timing(doc) == {"a": 1, "b": [{"c": 2}]}


# -- metrics -------------------------------------------------------------------

def test_metrics_percentages_and_partition():
    outcomes = [CORRECT, OTHER, FIXED, COMPILATION, VERIFIED, GAVE_UP, NO_DIAGNOSIS]
    reports = [_report(o) for o in outcomes]
    g = compute_metrics(reports).groups[0]
    p = g.percentages()
    assert sum(p.values()) <= 100.0
    assert sum(g.counts.values()) == g.n == len(outcomes)
    assert set(g.counts) <= set(OUTCOME_CLASSES)


def test_metrics_all_verified():
    t = compute_metrics([_report(VERIFIED, mutation=None) for _ in range(3)])
    assert "100.0%" in t.render()
    assert t.verification()[0].count(VERIFIED) == 3


def test_metrics_empty():
    with pytest.raises(EmptyGroup):
        compute_metrics([])


def test_metrics_group_by_description_flag():
    reports = [_report(CORRECT, description=True), _report(OTHER, description=False)]
    t = compute_metrics(reports)
    assert len(t.groups) == 2
    text = t.render()
    assert "(no natural language description)" in text


def test_folded_denominator():
    reports = [_report(COMPILATION), _report(GAVE_UP), _report(CORRECT), _report(CORRECT)]
    g = compute_metrics(reports).groups[0]
    assert g.percentages()[COMPILATION] == 25.0
    assert g.percentages(fold_give_ups=True)[COMPILATION] == 50.0


def test_write_report(tmp_path):
    reports = [_report(c) for c in (CORRECT, OTHER)] + [_report(VERIFIED, mutation=None)]
    paths = write_report(compute_metrics(reports), tmp_path)
    names = {p.name for p in paths}
    assert {"metrics.csv", "tables.txt", "tables_folded.txt", "verification.png"} <= names
    assert any(n.startswith("localisation_") for n in names)
    assert (tmp_path / "metrics.csv").read_text().startswith("benchmark,mutation,model")


# -- end to end ----------------------------------------------------------------

def _config(replay, **kw):
    return PipelineConfig(LlmConfig(), mock=str(FIXTURES / "replay" / replay), unwind=8, **kw)


def _check_lines_exist(report: PipelineReport):
    py_lines = report.sources["python"].count("\n") + 1
    c_lines = report.sources.get("c", "").count("\n") + 1
    for line in report.anchored_lines():
        assert 1 <= line <= py_lines
    for line, _ in report.c_statements:
        assert 1 <= line <= c_lines


@pytest.mark.parametrize("name,replay,expected,line", [
    ("cases/p57", "p57", CORRECT, 4),
    ("cases/p76", "p76", CORRECT, 4),
])
def test_diverging_mutants_localised(name, replay, expected, line):
    problem = load_problem(FIXTURES / name)
    r = run_pipeline(problem, _config(replay, timeout=1.0))
    assert r.python["program"]["status"] == "Timeout"
    assert r.verdict["status"] in ("Violated", "BoundExceeded")
    assert r.outcome == expected and line in r.anchored_lines()
    _check_lines_exist(r)


def test_stage_errors_captured():
    problem = load_problem(FIXTURES / "motivating" / "problem")
    r = run_pipeline(problem, PipelineConfig(LlmConfig()),
                     client=ScriptedClient([TransportError("down")]))
    assert r.outcome == GAVE_UP
    assert r.errors and r.errors[0]["type"] == "TransportError"
    r = run_pipeline(problem, PipelineConfig(LlmConfig(), mock=str(FIXTURES / "replay" / "p57")))
    assert r.errors[0]["type"] == "NoFixture" and r.outcome == GAVE_UP


def test_compilation_error_outcome():
    problem = load_problem(FIXTURES / "motivating" / "problem")
    r = run_pipeline(problem, PipelineConfig(LlmConfig()),
                     client=ScriptedClient(["```c\nint main( {\n```"]))
    assert r.outcome == COMPILATION and len(r.candidate["attempts"]) == 5


def test_unmutated_program_without_truth_reports_other():
    problem = load_problem(FIXTURES / "motivating" / "problem")
    problem.truth = None
    r = run_pipeline(problem, _config("motivating"))
    assert r.outcome == OTHER and r.notes
