from __future__ import annotations

import ctypes

import pytest
from hypothesis import given, strategies as st

from conftest import FIXTURES, read_fixture
from oracles import ProgramGenerator
from transcheck.llm import extract_c_code
from transcheck.minic import (ExecutionError, LexError, Limits, MiniCTypeError, NondetForbidden,
                              ParseError, UndefinedSymbol, call_function, interpret_main,
                              load_program, parse_minic, pretty_print, tokenize_minic)

ALG2 = read_fixture("motivating", "distribute_candies.c")
CORRECTED = ALG2.replace("    ans = 0 + 1;\n", "")


def _kinds(src):
    return [(t.kind, t.text) for t in tokenize_minic(src) if t.kind != "eof"]


def test_tokens_of_assignment():
    assert _kinds("ans = 0 + 1;") == [("id", "ans"), ("op", "="), ("int", "0"), ("op", "+"),
                                      ("int", "1"), ("op", ";")]


def test_include_is_one_preprocessor_token():
    assert _kinds("#include <assert.h>\nint x;") == [("pp", "#include <assert.h>"), ("kw", "int"),
                                                      ("id", "x"), ("op", ";")]


def test_comments_skipped_and_spans_one_based():
    toks = tokenize_minic("// c\n/* x\n y */ int z;")
    assert toks[0].text == "int" and toks[0].span.line == 3 and toks[0].span.col == 7


def test_unterminated_char_literal():
    with pytest.raises(LexError) as e:
        tokenize_minic("char c = 'L")
    assert e.value.span.line == 1


def test_illegal_character():
    with pytest.raises(LexError):
        tokenize_minic("int x = 1 @ 2;")


def test_parse_algorithm_2():
    p = parse_minic(ALG2)
    assert [f.name for f in p.functions] == ["distributeCandies", "main"]


def test_parse_minimal_main():
    p = load_program("int main(){return 0;}")
    assert len(p.functions) == 1
    assert interpret_main(p).value == 0


@pytest.mark.parametrize("src", [
    "int main(){ int *p = malloc(4); }",
    "struct s { int a; }; int main(){return 0;}",
    "int main(){ goto end; }",
    "int main(){ float f = 1; return 0; }",
])
def test_constructs_outside_subset_rejected(src):
    with pytest.raises(ParseError):
        parse_minic(src)


def test_diagnostic_format():
    with pytest.raises(ParseError) as e:
        parse_minic("int main(){ int *p = malloc(4); }")
    assert e.value.diagnostic("a.c").startswith("a.c:1:")


def test_statement_ids_of_algorithm_2():
    # one id per declaration-with-init, assignment, compound assignment, return,
    # assert and per if/while/for condition; counted by hand from the listing
    expected = [
        (2, "assign"), (3, "decl"), (4, "assign"),
        (5, "decl"), (5, "cond"), (5, "compound"),   # for init, condition, update
        (6, "cond"), (9, "compound"), (12, "return"),
        (16, "assert"), (17, "return"),
    ]
    p = load_program(ALG2)
    assert [(s.span.line, s.kind) for s in p.statements] == expected
    assert [s.sid for s in p.statements] == list(range(1, len(expected) + 1))
    assert p.statement(3).text == "ans = 0 + 1;"


def test_duplicate_function_rejected():
    with pytest.raises(ParseError):
        load_program("int f(){return 1;} int f(){return 2;} int main(){return 0;}")


def test_undefined_function():
    with pytest.raises(UndefinedSymbol):
        load_program("int main(){ g(); return 0; }")


def test_undefined_variable():
    with pytest.raises(UndefinedSymbol):
        load_program("int main(){ x = 1; return 0; }")


def test_string_in_int_context():
    with pytest.raises(MiniCTypeError):
        load_program('int main(){ if ("abc") {} return 0; }')


@pytest.mark.parametrize("src", [
    "int f(int a, int a){return a;} int main(){return 0;}",
    "int f(int a){ if (a) return 1; } int main(){return 0;}",
    "int f(int a){return a;} int main(){ return f(1, 2); }",
    "int main(int argc){return 0;}",
    "int f(){return 0;}",
])
def test_checker_rejects(src):
    with pytest.raises(MiniCTypeError):
        load_program(src)


def test_corrected_algorithm_2_completes():
    out = interpret_main(load_program(CORRECTED))
    assert out.status == "Completed" and out.value == 0


def test_algorithm_2_violates_main_assert():
    out = interpret_main(load_program(ALG2))
    assert out.status == "AssertionViolated" and out.span.line == 16


def test_step_limit():
    out = interpret_main(load_program("int main(){while(1){}}"), Limits(step_limit=10**6))
    assert out.status == "RuntimeError" and out.kind == "step-limit"
    assert out.steps <= 10**6


def test_nondet_forbidden():
    with pytest.raises(NondetForbidden):
        interpret_main(load_program("int main(){int x = nondet_int(); return x;}"))


def test_division_by_zero():
    out = interpret_main(load_program("int main(){int z = 0; int x = 1 / z; return 0;}"))
    assert out.status == "RuntimeError" and out.kind == "div-by-zero"


def test_string_index_out_of_bounds():
    src = 'int f(const char s[], int i){return s[i];} int main(){return f("ab", 3);}'
    assert interpret_main(load_program(src)).kind == "out-of-bounds"
    # the terminating zero byte is readable
    assert call_function(load_program(src), "f", ["ab", 2]) == 0


def test_call_function_values():
    assert call_function(load_program(CORRECTED), "distributeCandies", [5, 2]) == 3
    # hand trace: i = 0 skipped (5 > 4), i = 1 adds 2 - 0 + 1 = 3... with the
    # injected ans = 1 the total is 1 + 2 + 1 = 4
    assert call_function(load_program(ALG2), "distributeCandies", [5, 2]) == 4


def _python_reference(module_src: str, fn: str, *args):
    ns: dict = {}
    exec(compile(module_src.split("\nassert")[0], "<ref>", "exec"), ns)
    return ns[fn](*args)


def test_distance_traveled_corrected_matches_python():
    c = extract_c_code(read_fixture("cases", "p57", "transpile_response.txt"))
    c = c.replace("if (mainTank < 5)", "if (mainTank >= 5)")
    expected = _python_reference(read_fixture("cases", "p57", "program.py"),
                                 "distanceTraveled", 10, 0)
    assert expected == 100
    assert call_function(load_program(c), "distanceTraveled", [10, 0]) == expected


def test_call_function_raises_on_failure():
    p = load_program("int f(){assert(0); return 1;} int main(){return 0;}")
    with pytest.raises(ExecutionError):
        call_function(p, "f", [])


def test_wraparound():
    p = load_program("int f(){int x=2147483647; return x+1;} int main(){return 0;}")
    assert call_function(p, "f", []) == -2147483648


def _c_div(a, b):
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


OPS = {
    "+": lambda a, b: a + b, "-": lambda a, b: a - b, "*": lambda a, b: a * b,
    "/": _c_div, "%": lambda a, b: a - _c_div(a, b) * b,
    "&": lambda a, b: a & b, "|": lambda a, b: a | b, "^": lambda a, b: a ^ b,
    "<": lambda a, b: int(a < b), "<=": lambda a, b: int(a <= b),
    ">": lambda a, b: int(a > b), ">=": lambda a, b: int(a >= b),
    "==": lambda a, b: int(a == b), "!=": lambda a, b: int(a != b),
    "<<": lambda a, b: a << (b & 31), ">>": lambda a, b: a >> (b & 31),
}
int32 = st.integers(-(2**31), 2**31 - 1)


@given(st.sampled_from(sorted(OPS)), int32, int32)
def test_binary_ops_match_int32_reference(op, a, b):
    if op in ("/", "%") and b == 0:
        b = 1
    if op in ("/", "%") and a == -(2**31) and b == -1:
        b = 1
    p = load_program(f"int f(int a, int b){{ return a {op} b; }} int main(){{return 0;}}")
    expected = ctypes.c_int32(OPS[op](a, b)).value
    assert call_function(p, "f", [a, b]) == expected


def test_int_min_div_minus_one_wraps():
    p = load_program("int f(int a, int b){ return a / b; } int main(){return 0;}")
    assert call_function(p, "f", [-(2**31), -1]) == -(2**31)


def test_char_literals_and_strings():
    src = 'int f(const char s[]){ int n = 0; int i = 0; while (s[i] != 0) { if (s[i] == \'L\') n++; i++; } return n; }\nint main(){ return 0; }'
    assert call_function(load_program(src), "f", ["L_RL__R"]) == 2


def _fixture_sources():
    out = [ALG2, CORRECTED]
    for p in ("p188", "p463", "p57", "p76"):
        out.append(extract_c_code(read_fixture("cases", p, "transpile_response.txt")))
    return out


@pytest.mark.parametrize("src", _fixture_sources())
def test_pretty_print_round_trip(src):
    p = parse_minic(src)
    again = parse_minic(pretty_print(p))
    assert again == p
    assert pretty_print(again) == pretty_print(p)


@given(st.integers(0, 10_000))
def test_pretty_print_round_trip_generated(seed):
    src = ProgramGenerator(seed).closed().source
    p = parse_minic(src)
    assert parse_minic(pretty_print(p)) == p


@given(st.integers(0, 10_000))
def test_interpretation_is_deterministic(seed):
    p = load_program(ProgramGenerator(seed).closed().source)
    assert interpret_main(p) == interpret_main(p)


@pytest.mark.parametrize("src", _fixture_sources())
def test_statement_ids_unique_with_spans(src):
    p = load_program(src)
    sids = [s.sid for s in p.statements]
    assert len(set(sids)) == len(sids)
    lines = src.count("\n") + 1
    assert all(1 <= s.span.line <= lines for s in p.statements)
