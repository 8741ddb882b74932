from __future__ import annotations

import json
import sys

import pytest
from hypothesis import given, strategies as st

from conftest import FIXTURES, read_fixture
from transcheck.harness import (ADC, HANG_REJECT, WBO, EnvError, LexError, MutantRecord, NoSite,
                                PythonProblem, RunOutcome, eligible_sites, load_benchmark,
                                load_problem, logical_lines, make_variants, mutate, mutate_adc,
                                mutate_wbo, run_python, save_problem, scan_mutation_sites,
                                split_assertions, validate_mutant)

ALG1 = read_fixture("motivating", "distribute_candies.py")
ALG1_ORIGINAL = read_fixture("motivating", "problem", "program.py")


# -- run_python ----------------------------------------------------------------

def test_original_passes():
    assert run_python(ALG1_ORIGINAL).status == "Pass"


def test_injected_fault_fails_module_assert():
    out = run_python(ALG1)
    assert out.status == "AssertionFailed"
    assert out.line == ALG1.splitlines().index("assert distributeCandies(n = 5, limit = 2) == 3") + 1


def test_timeout():
    out = run_python("while True: pass\n", timeout=0.1)
    assert out.status == "Timeout" and out.duration_ms >= 100


def test_runtime_error():
    out = run_python("x = 1 / 0\n")
    assert out.status == "RuntimeError" and "ZeroDivisionError" in out.message


def test_missing_interpreter_is_env_error(tmp_path):
    with pytest.raises(EnvError):
        run_python("pass\n", python=str(tmp_path / "no-such-python"))


def test_interpreter_from_environment(monkeypatch):
    monkeypatch.setenv("TRANSCHECK_PYTHON", sys.executable)
    assert run_python("assert True\n").passed


def test_run_outcome_json_round_trip():
    o = RunOutcome("AssertionFailed", 12.5, 3, "AssertionError")
    assert RunOutcome.from_json(o.to_json()) == o


# -- tokenizer -----------------------------------------------------------------

def test_split_assertions():
    code, asserts = split_assertions(ALG1)
    assert asserts == "assert distributeCandies(n = 5, limit = 2) == 3"
    assert code.endswith("return ans") and "assert" not in code


def test_logical_lines_join_continuations():
    lls = logical_lines("x = (1 +\n     2)\nassert x == 3\n")
    assert [(ll.start_line, ll.end_line, ll.is_assert) for ll in lls] == [(1, 2, False), (3, 3, True)]


def test_lex_error():
    with pytest.raises(LexError):
        scan_mutation_sites('x = "unterminated\n', WBO)


# -- site scanning -------------------------------------------------------------

def test_wbo_sites_of_algorithm_1():
    sites = scan_mutation_sites(ALG1, WBO)
    assert (6, ">") in [(s.line, s.text) for s in sites]
    assert [s for s in sites if s.text == "=="][0].on_assert
    assert all(not s.on_assert for s in eligible_sites(ALG1, WBO))


def test_adc_sites_of_algorithm_1():
    texts = [s.text.strip() for s in scan_mutation_sites(ALG1, ADC)]
    assert "ans = 0" in texts and "limit = min(limit, n)" in texts
    assert not any(t.startswith("ans +=") for t in texts)


@pytest.mark.parametrize("src", ["x += 1\n", "a = b = 1\n", "x: int = 1\n", "a, b = 1, 2\n",
                                 "d[k] = 1\n", "o.x = 1\n", "f(a=1)\n", "x = 1; y = 2\n",
                                 "x = (1 +\n     2)\n", "if (n := 1) > 0: pass\n"])
def test_adc_excluded_shapes(src):
    assert scan_mutation_sites(src, ADC) == []


def test_sites_ordered():
    sites = scan_mutation_sites("a = x < y or y >= z\nb = x != y\n", WBO)
    assert [(s.line, s.text) for s in sites] == [(1, "<"), (1, ">="), (2, "!=")]


# -- mutation ------------------------------------------------------------------

def test_wbo_explicit_site():
    idx = [(s.line, s.text) for s in eligible_sites(ALG1_ORIGINAL, WBO)].index((5, ">"))
    mutant, rec = mutate_wbo(ALG1_ORIGINAL, index=idx)
    assert mutant.splitlines()[4] == "        if n - i <= limit * 2:"
    assert rec.kind == WBO and rec.line == 5 and rec.site == idx


def test_wbo_single_site():
    mutant, rec = mutate_wbo("if a == b:\n    pass\n")
    assert mutant == "if a != b:\n    pass\n"
    assert (rec.original, rec.mutated) == ("if a == b:", "if a != b:")


def test_wbo_ignores_strings_and_comments():
    with pytest.raises(NoSite):
        mutate_wbo('s = "a < b"  # x == y\n')


def test_adc_algorithm_1():
    idx = [s.text.strip() for s in eligible_sites(ALG1_ORIGINAL, ADC)].index("ans = 0")
    mutant, rec = mutate_adc(ALG1_ORIGINAL, index=idx)
    assert mutant == ALG1
    assert rec.line == 4 and rec.mutated == "    ans = 0 + 1"


def test_adc_empty_source():
    with pytest.raises(NoSite):
        mutate_adc("")


def test_unknown_kind():
    with pytest.raises(ValueError):
        mutate("x = 1\n", "SWAP")


def test_record_apply_rejects_mismatch():
    rec = MutantRecord(WBO, 1, "if a == b:", "if a != b:", 0, 0)
    with pytest.raises(ValueError):
        rec.apply("if a < b:\n")


NAMES = st.sampled_from(["a", "b", "n", "total", "k"])
OPS = st.sampled_from(["==", "!=", "<", "<=", ">", ">="])


@st.composite
def python_sources(draw):
    lines = []
    for _ in range(draw(st.integers(1, 6))):
        form = draw(st.integers(0, 3))
        x, y = draw(NAMES), draw(NAMES)
        if form == 0:
            lines.append(f"{x} = {y} + {draw(st.integers(0, 9))}")
        elif form == 1:
            lines.append(f"if {x} {draw(OPS)} {y}:\n    {y} = {x}")
        elif form == 2:
            lines.append(f"s = '{x} {draw(OPS)} {y}'  # {draw(OPS)}")
        else:
            lines.append(f"{x} += 1")
    lines.append(f"assert a {draw(OPS)} b")
    return "a = 1\nb = 2\n" + "\n".join(lines) + "\n"


@given(python_sources(), st.integers(0, 2**63 - 1), st.sampled_from([WBO, ADC]))
def test_mutation_invariants(src, seed, kind):
    try:
        mutant, rec = mutate(src, kind, seed)
    except NoSite:
        assert eligible_sites(src, kind) == []
        return
    old, new = src.splitlines(), mutant.splitlines()
    if kind == WBO:
        assert len(old) == len(new)
        diff = [i for i, (a, b) in enumerate(zip(old, new)) if a != b]
        assert diff == [rec.line - 1]
    else:
        assert len(new) == len(old) + 1
        assert new[:rec.line - 1] + new[rec.line:] == old
        # the duplicate keeps the statement, drops any trailing comment
        assert new[rec.line - 1] == new[rec.line - 2].split("  #")[0] + " + 1"
    assert not new[rec.line - 1].lstrip().startswith("assert")
    assert rec.apply(src) == mutant
    assert mutate(src, kind, seed) == (mutant, rec)
    assert MutantRecord.from_json(json.loads(json.dumps(rec.to_json()))) == rec


# -- problems ------------------------------------------------------------------

def test_load_problem_with_ground_truth():
    p = load_problem(FIXTURES / "motivating" / "problem")
    assert p.source == ALG1 and p.original == ALG1_ORIGINAL
    assert p.truth.line == 4 and p.truth.kind == ADC
    assert p.description.startswith("You are given two positive integers")


def test_save_and_reload(tmp_path):
    p = load_problem(FIXTURES / "motivating" / "problem")
    save_problem(p, tmp_path)
    q = load_benchmark(tmp_path)
    assert len(q) == 1
    assert (q[0].source, q[0].original, q[0].truth, q[0].description) == \
           (p.source, p.original, p.truth, p.description)


def test_validate_accepts_adc_mutant():
    orig = PythonProblem("m", ALG1_ORIGINAL)
    v = validate_mutant(orig, ALG1)
    assert v.accepted and v.reason == "AssertionFailed" and not v.timeout


def test_validate_rejects_equivalent_mutant():
    src = "x = 1\nif x > 5:\n    y = 0\nassert x == 1\n"
    mutant, _ = mutate_adc(src, index=1)
    v = validate_mutant(PythonProblem("e", src), mutant)
    assert not v.accepted and v.reason == "EquivalentMutant"


def test_validate_hang_policies():
    src = "a = 1\nwhile a:\n    if a >= 5:\n        a -= 5\n    else:\n        a = 0\nassert a == 0\n"
    mutant, _ = mutate_wbo(src)
    assert "if a < 5:" in mutant
    v = validate_mutant(PythonProblem("h", src), mutant, timeout=0.5)
    assert v.accepted and v.timeout
    v = validate_mutant(PythonProblem("h", src), mutant, timeout=0.5, hang_policy=HANG_REJECT)
    assert not v.accepted and v.timeout


def test_validate_requires_passing_original():
    with pytest.raises(ValueError):
        validate_mutant(PythonProblem("b", ALG1), ALG1)


def test_make_variants():
    p = load_problem(FIXTURES / "motivating" / "corrected")
    vs = make_variants(p, seed=3)
    assert [v.id for v in vs] == [f"{p.id}-wbo", f"{p.id}-adc"]
    for v in vs:
        assert v.original == p.source and v.truth.apply(p.source) == v.source
