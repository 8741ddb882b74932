"""Everything that talks to a language model."""

from .client import (API_KEY_ENV, Completion, FakeClock, HttpClient, LlmConfig, NoFixture,
                     RecordingClient, ReplayClient, ScriptedClient, SystemClock, TransportError,
                     complete, prompt_key, record)
from .extract import NoCodeBlock, code_blocks, extract_c_code, extract_code, extract_python_code
from .prompts import (MissingField, PromptKind, render_backmap, render_prompt, render_retry,
                      render_transpile)
from .transpile import (ACCEPTED, DIFFERENTIAL_FAIL, PARSE_FAIL, TIMEOUT, TRANSPORT_FAIL,
                        Attempt, AttemptLog, BackmapResult, CandidateResult, EmptyMapping,
                        MappedStatement, anchor, backmap_statements, transpile_with_retry)

__all__ = [
    "API_KEY_ENV", "Completion", "FakeClock", "HttpClient", "LlmConfig", "NoFixture",
    "RecordingClient", "ReplayClient", "ScriptedClient", "SystemClock", "TransportError",
    "complete", "prompt_key", "record", "NoCodeBlock", "code_blocks", "extract_c_code",
    "extract_code", "extract_python_code", "MissingField", "PromptKind", "render_backmap",
    "render_prompt", "render_retry", "render_transpile", "ACCEPTED", "DIFFERENTIAL_FAIL",
    "PARSE_FAIL", "TIMEOUT", "TRANSPORT_FAIL", "Attempt", "AttemptLog", "BackmapResult",
    "CandidateResult", "EmptyMapping", "MappedStatement", "anchor", "backmap_statements",
    "transpile_with_retry",
]
