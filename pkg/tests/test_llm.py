from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from conftest import FIXTURES, read_fixture
from transcheck.harness import PythonProblem, load_problem
from transcheck.llm import (ACCEPTED, DIFFERENTIAL_FAIL, PARSE_FAIL, TIMEOUT, TRANSPORT_FAIL,
                            EmptyMapping, FakeClock, HttpClient, LlmConfig, MissingField,
                            NoCodeBlock, NoFixture, PromptKind, RecordingClient, ReplayClient,
                            ScriptedClient, TransportError, anchor, backmap_statements,
                            code_blocks, extract_c_code, extract_python_code, prompt_key,
                            render_backmap, render_prompt, render_retry, render_transpile,
                            transpile_with_retry)
from transcheck.pipeline.gate import GateDecision

ALG2_RESPONSE = read_fixture("motivating", "transpile_response.txt")


@pytest.fixture
def problem():
    return load_problem(FIXTURES / "motivating" / "problem")


# -- prompts -----------------------------------------------------------------

def test_transpile_prompt_shape(problem):
    text = render_prompt(PromptKind.transpile(), problem)
    assert text.startswith("Transpile Python to C Code With Assertion:")
    assert text.endswith("<C Code>\n```c")
    assert "<NL_Description>\n" + problem.description in text


def test_retry_prompt_embeds_transpile(problem):
    reason = "assertion distributeCandies(5,2)==3 failed"
    text = render_prompt(PromptKind.retry(reason), problem)
    assert text.startswith("Your previous code translation was INCORRECT!\nReason: " + reason)
    assert text.endswith(render_prompt(PromptKind.transpile(), problem))


def test_backmap_prompt():
    text = render_backmap(["ans = 0 + 1;"])
    assert "We have localised the following faulty statements in the C program:\nans = 0 + 1;" in text
    assert text.endswith("```python")


def test_no_description_drops_only_the_box(problem):
    with_d = render_prompt(PromptKind.transpile(), problem, True)
    without = render_prompt(PromptKind.transpile(), problem, False)
    assert "<NL_Description>\n" not in without
    assert without == with_d.replace("<NL_Description>\n" + problem.description + "\n\n", "")


def test_missing_fields(problem):
    with pytest.raises(MissingField):
        render_backmap([])
    with pytest.raises(MissingField):
        render_retry("", "x")
    with pytest.raises(MissingField):
        render_transpile("x = 1", "", "d")
    with pytest.raises(MissingField):
        render_prompt(PromptKind.transpile(), PythonProblem("p", "x = 1\nassert x\n"))
    assert render_prompt(PromptKind.transpile(), PythonProblem("p", "x = 1\nassert x\n"), False)


def test_rendering_is_deterministic(problem):
    a = render_prompt(PromptKind.retry("r"), problem).encode("utf-8")
    b = render_prompt(PromptKind.retry("r"), problem).encode("utf-8")
    assert a == b


# -- extraction ----------------------------------------------------------------

def test_extract_c_strips_prose():
    resp = read_fixture("cases", "p188", "transpile_response.txt")
    code = extract_c_code(resp)
    assert code.lstrip().startswith("#include") and "```" not in code
    assert code.rstrip().endswith("}")


def test_first_c_block_wins():
    resp = "x\n```c\nint a;\n```\n```python\nb = 1\n```\n"
    assert extract_c_code(resp) == "int a;\n"
    assert extract_python_code(resp) == "b = 1\n"


def test_unlabelled_block_fallback_and_unterminated():
    assert extract_c_code("```\nint a;\n```") == "int a;\n"
    assert code_blocks("```c\nint a;\n") == [("c", "int a;\n")]


def test_pure_prose():
    with pytest.raises(NoCodeBlock):
        extract_c_code("I cannot do that.")


def test_python_answer_without_opening_fence():
    assert extract_python_code("    ans = 0 + 1\n```\n").strip() == "ans = 0 + 1"


# -- clients -------------------------------------------------------------------

def test_replay_returns_algorithm_2(problem):
    client = ReplayClient(FIXTURES / "replay" / "motivating")
    text = client.complete(render_prompt(PromptKind.transpile(), problem)).text
    assert text == ALG2_RESPONSE
    assert "ans = 0 + 1;" in extract_c_code(text)


def test_replay_unknown_prompt():
    with pytest.raises(NoFixture):
        ReplayClient(FIXTURES / "replay" / "motivating").complete("something else")


def test_prompt_key_conversation_differs():
    assert prompt_key("a") == prompt_key([{"role": "user", "content": "a"}])
    assert prompt_key("a") != prompt_key([{"role": "user", "content": "a"},
                                          {"role": "assistant", "content": "b"}])


def test_recording_client_round_trip(tmp_path):
    rec = RecordingClient(ScriptedClient(["hello"]), tmp_path)
    assert rec.complete("p").text == "hello"
    assert ReplayClient(tmp_path).complete("p").text == "hello"


def test_unreachable_endpoint():
    cfg = LlmConfig(endpoint="http://127.0.0.1:9/v1", request_timeout=2)
    with pytest.raises(TransportError):
        HttpClient(cfg).complete("hi")


def test_temperature_fixed():
    with pytest.raises(ValueError):
        LlmConfig(temperature=0.7)
    with pytest.raises(ValueError):
        LlmConfig(max_attempts=0)


class _Handler(BaseHTTPRequestHandler):
    seen: list = []

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        _Handler.seen.append((self.path, dict(self.headers), body))
        out = json.dumps({"choices": [{"message": {"content": "```c\nint main(){return 0;}\n```"}}]})
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(out.encode())

    def log_message(self, *args):
        pass


def test_http_client_wire_format(monkeypatch):
    server = HTTPServer(("127.0.0.1", 0), _Handler)
    t = threading.Thread(target=server.serve_forever, daemon=True)
    t.start()
    try:
        monkeypatch.setenv("OPENAI_API_KEY", "sk-test")
        cfg = LlmConfig(endpoint=f"http://127.0.0.1:{server.server_port}/v1", model="m1")
        out = HttpClient(cfg).complete("prompt text")
    finally:
        server.shutdown()
    assert out.text.startswith("```c")
    path, headers, body = _Handler.seen[-1]
    assert path == "/v1/chat/completions"
    assert headers["Authorization"] == "Bearer sk-test"
    assert body == {"model": "m1", "messages": [{"role": "user", "content": "prompt text"}],
                    "temperature": 0.0}


# -- retry loop ----------------------------------------------------------------

def _accept(_src):
    return GateDecision("ToVerifier")


def test_success_first_attempt(problem):
    res = transpile_with_retry(problem, LlmConfig(), _accept, ScriptedClient([ALG2_RESPONSE]))
    assert res.ok and len(res.log) == 1 and res.log.attempts[0].classification == ACCEPTED
    assert "ans = 0 + 1;" in res.source


def test_five_unparseable_responses(problem):
    client = ScriptedClient(["no code here"])
    res = transpile_with_retry(problem, LlmConfig(), _accept, client)
    assert res.status == "GaveUp" and res.reason == "MaxAttempts"
    assert [a.classification for a in res.log.attempts] == [PARSE_FAIL] * 5
    assert res.log.only_parse_failures()
    assert client.prompts[1].startswith("Your previous code translation was INCORRECT!")


def test_time_budget(problem):
    clock = FakeClock()
    client = ScriptedClient([ALG2_RESPONSE], latency=11 * 60, clock=clock)
    res = transpile_with_retry(problem, LlmConfig(), _accept, client, clock)
    assert res.status == "GaveUp" and res.reason == "TimeBudget"
    assert [a.classification for a in res.log.attempts] == [TIMEOUT]


def test_retry_reason_is_forwarded(problem):
    decisions = iter([GateDecision("Retry", "assertion f(1) == 2 failed in C but passed in Python",
                                   "differential"), GateDecision("ToVerifier")])
    client = ScriptedClient([ALG2_RESPONSE])
    res = transpile_with_retry(problem, LlmConfig(), lambda s: next(decisions), client)
    assert res.ok
    assert [a.classification for a in res.log.attempts] == [DIFFERENTIAL_FAIL, ACCEPTED]
    assert "Reason: assertion f(1) == 2 failed in C but passed in Python\n" in client.prompts[1]


def test_attempt_cap_never_exceeded(problem):
    cfg = LlmConfig(max_attempts=3)
    res = transpile_with_retry(problem, cfg, lambda s: GateDecision("Retry", "bad", "parse"),
                               ScriptedClient([ALG2_RESPONSE]))
    assert len(res.log) == 3 and res.log.failures() == 3


def test_transport_error_propagates_after_cap(problem):
    client = ScriptedClient([TransportError("down")])
    with pytest.raises(TransportError):
        transpile_with_retry(problem, LlmConfig(max_attempts=2), _accept, client)
    assert len(client.prompts) == 2


def test_transport_error_then_success(problem):
    client = ScriptedClient([TransportError("blip"), ALG2_RESPONSE])
    res = transpile_with_retry(problem, LlmConfig(), _accept, client)
    assert res.ok
    assert [a.classification for a in res.log.attempts] == [TRANSPORT_FAIL, ACCEPTED]


# -- back-mapping --------------------------------------------------------------

def test_backmap_motivating(problem):
    client = ScriptedClient([read_fixture("motivating", "backmap_response.txt")])
    bm = backmap_statements(client, problem, ["ans = 0 + 1;"])
    assert client.prompts == [render_backmap(["ans = 0 + 1;"])]
    assert [(s.text, s.line) for s in bm.statements] == [("ans = 0 + 1", 4)]


def test_backmap_p76():
    p = load_problem(FIXTURES / "cases" / "p76")
    client = ScriptedClient([read_fixture("cases", "p76", "backmap_response.txt")])
    bm = backmap_statements(client, p, ["while (x < y)"])
    assert ("while x < y:", 4) in [(s.text, s.line) for s in bm.statements]


def test_backmap_unanchored_and_empty(problem):
    bm = backmap_statements(ScriptedClient(["```python\nzzz = 42\n```"]), problem, ["x;"])
    assert bm.statements[0].line is None and not bm.statements[0].anchored
    with pytest.raises(EmptyMapping):
        backmap_statements(ScriptedClient(["```python\n\n```"]), problem, ["x;"])
    with pytest.raises(NoCodeBlock):
        backmap_statements(ScriptedClient(["no idea"]), problem, ["x;"])


def test_anchor_trims():
    assert anchor("a = 1\n    b = 2\n", "  b = 2 ") == 2
    assert anchor("a = 1\n", "c") is None
