from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from conftest import read_fixture
from fault_corpus import TEMPLATES, build_corpus, with_main
from transcheck.llm import extract_c_code
from transcheck.localize import (Diagnosis, DiagnosisSet, UnsatSpecification, encode_guarded,
                                 enumerate_diagnoses, localize, map_diagnosis_to_source)
from transcheck.minic import load_program
from transcheck.solver import parse_dimacs, PartialMaxSatInstance

ALG2 = read_fixture("motivating", "distribute_candies.c")
CORRECTED = ALG2.replace("    ans = 0 + 1;\n", "")


@pytest.fixture(scope="module")
def alg2():
    p = load_program(ALG2)
    g, ds = localize(p, 8, 8)
    return p, g, ds


def test_guards_cover_function_statements_not_main(alg2):
    p, g, _ = alg2
    guarded_lines = {p.statement(s).span.line for s in g.guards}
    assert {2, 3, 4, 5, 6, 9} <= guarded_lines
    main_sids = {s.sid for s in p.statements if s.function == "main"}
    assert not main_sids & set(g.guards)


def test_all_healthy_is_unsat_for_buggy_program(alg2):
    _, g, _ = alg2
    assert not g.relaxation_sat(())


def test_algorithm_2_cost_one_includes_line_4(alg2):
    p, g, ds = alg2
    assert ds.cost == 1 and not ds.truncated
    assert all(d.cost == 1 and len(d.statements) == 1 for d in ds.diagnoses)
    assert (3,) in [d.statements for d in ds.diagnoses]
    assert (4, "ans = 0 + 1;") in map_diagnosis_to_source(ds, p)


def test_diagnoses_sound_and_distinct(alg2):
    _, g, ds = alg2
    stmts = [d.statements for d in ds.diagnoses]
    assert len(set(stmts)) == len(stmts)
    assert all(g.relaxation_sat(d.statements) for d in ds.diagnoses)


def test_sink_flag_marks_final_write(alg2):
    p, g, ds = alg2
    sinks = [d for d in ds.diagnoses if d.sink]
    assert sinks
    assert all(p.statement(s).kind == "return" for d in sinks for s in d.statements)


def test_corrected_program_needs_no_relaxation():
    g = encode_guarded(load_program(CORRECTED), 8, 8)
    assert g.relaxation_sat(())
    ds = enumerate_diagnoses(g)
    assert ds.cost == 0 and ds.diagnoses == [] and not ds


def test_contradictory_specification():
    with pytest.raises(UnsatSpecification):
        encode_guarded(load_program("int main(){ assert(0 == 1); return 0; }"), 1, 1)


def test_cap_truncates(alg2):
    p, g, ds = alg2
    small = enumerate_diagnoses(encode_guarded(p, 8, 8), cap=2)
    assert small.truncated and len(small.diagnoses) == 2
    assert {d.statements for d in small.diagnoses} <= {d.statements for d in ds.diagnoses}
    with pytest.raises(ValueError):
        enumerate_diagnoses(g, cap=0)


def test_wcnf_dump_round_trips(alg2):
    _, g, _ = alg2
    inst = parse_dimacs(g.to_wcnf())
    assert isinstance(inst, PartialMaxSatInstance)
    assert len(inst.soft) == len(g.guards)


def test_map_empty_and_dedup():
    p = load_program(ALG2)
    assert map_diagnosis_to_source(DiagnosisSet([], 0), p) == []
    ds = DiagnosisSet([Diagnosis((3, 8), 2), Diagnosis((3, 9), 2)], 2)
    out = map_diagnosis_to_source(ds, p)
    assert out == sorted(set(out))
    assert [line for line, _ in out].count(4) == 1


def test_diagnosis_json_has_lines(alg2):
    p, _, ds = alg2
    d = next(d for d in ds.diagnoses if d.statements == (3,))
    assert d.to_json(p) == {"statements": [3], "cost": 1, "sink": False, "lines": [4]}


def test_nondet_inputs_pinned():
    src = ("int main(){ int x = nondet_int(); int y = x + 2; assert(y != 7); return 0; }")
    p = load_program(src)
    g, ds = localize(p, 1, 1, inputs={"main#0:nondet~1": 5})
    assert ds.cost == 1
    assert {p.statement(s).span.line for s in ds.statements()} == {1}


def test_granite_distance_traveled_condition_localised():
    c = extract_c_code(read_fixture("cases", "p57", "transpile_response.txt"))
    p = load_program(c)
    _, ds = localize(p, 8, 8)
    assert ds.cost == 1
    texts = [t for _, t in map_diagnosis_to_source(ds, p)]
    assert "if (mainTank < 5)" in texts


FAST = [c for c in build_corpus() if c.name.split("-")[0] in ("max3", "clamp", "abs_diff", "power")]


@settings(max_examples=len(FAST))
@given(st.sampled_from(FAST))
def test_minimal_and_complete_on_fast_corpus(case):
    p = load_program(case.source)
    g, ds = localize(p, 8, 8)
    sids = sorted(g.guards)
    assert len(sids) <= 12
    for r in range(ds.cost):
        assert not any(g.relaxation_sat(sub) for sub in itertools.combinations(sids, r))
    exact = {sub for sub in itertools.combinations(sids, ds.cost) if g.relaxation_sat(sub)}
    assert exact == {d.statements for d in ds.diagnoses}


def test_passing_templates_have_cost_zero():
    for body, args in TEMPLATES.values():
        if "%" in body or "*" in body:
            continue
        g = encode_guarded(load_program(with_main(body, args)), 8, 8)
        assert g.relaxation_sat(())
