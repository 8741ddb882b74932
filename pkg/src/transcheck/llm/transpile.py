"""Transpilation retry loop and back-mapping of diagnoses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .client import LlmConfig, SystemClock, TransportError
from .extract import NoCodeBlock, extract_c_code, extract_python_code
from .prompts import PromptKind, render_backmap, render_prompt

ACCEPTED = "Accepted"
PARSE_FAIL = "ParseFail"
DIFFERENTIAL_FAIL = "DifferentialFail"
TIMEOUT = "Timeout"
TRANSPORT_FAIL = "TransportError"

NO_CODE_REASON = "C compilation/parse error: no ```c code block in the response"


@dataclass
class Attempt:
    prompt: str
    response: str
    classification: str
    seconds: float
    reason: str = ""

    def to_json(self) -> dict:
        return {"prompt": self.prompt, "response": self.response,
                "classification": self.classification, "reason": self.reason,
                "seconds": round(self.seconds, 3)}

    @classmethod
    def from_json(cls, d):
        return cls(d["prompt"], d["response"], d["classification"], d.get("seconds", 0.0),
                   d.get("reason", ""))


@dataclass
class AttemptLog:
    attempts: list = field(default_factory=list)

    def __len__(self):
        return len(self.attempts)

    def failures(self) -> int:
        return sum(a.classification != ACCEPTED for a in self.attempts)

    def only_parse_failures(self) -> bool:
        return bool(self.attempts) and all(a.classification == PARSE_FAIL for a in self.attempts)

    def to_json(self) -> list:
        return [a.to_json() for a in self.attempts]

    @classmethod
    def from_json(cls, d):
        return cls([Attempt.from_json(a) for a in d])


@dataclass
class CandidateResult:
    status: str                      # Success | GaveUp
    log: AttemptLog
    source: Optional[str] = None     # accepted C source
    reason: Optional[str] = None     # MaxAttempts | TimeBudget for GaveUp
    decision: object = None          # gate decision that accepted the candidate

    @property
    def ok(self) -> bool:
        return self.status == "Success"

    def conversation(self) -> list[dict]:
        """The accepted exchange, as chat messages."""
        last = self.log.attempts[-1]
        return [{"role": "user", "content": last.prompt},
                {"role": "assistant", "content": last.response}]

    def to_json(self) -> dict:
        return {"status": self.status, "reason": self.reason, "source": self.source,
                "decision": self.decision.to_json() if self.decision is not None else None,
                "attempts": self.log.to_json()}


def transpile_with_retry(problem, config: LlmConfig, gate: Callable, client,
                         clock=None) -> CandidateResult:
    """Ask for C code until the gate accepts a candidate.

    ``gate(c_source)`` returns a decision whose ``kind`` is "Retry" (with a
    ``reason``) or anything else to accept. Stops after ``max_attempts``
    rejected candidates or once the time budget is spent.
    """
    clock = clock or SystemClock()
    start = clock.now()
    log = AttemptLog()
    reason = None
    while log.failures() < config.max_attempts:
        if clock.now() - start >= config.time_budget:
            return CandidateResult("GaveUp", log, reason="TimeBudget")
        kind = PromptKind.transpile() if reason is None else PromptKind.retry(reason)
        prompt = render_prompt(kind, problem, config.include_description)
        t0 = clock.now()
        try:
            text = client.complete(prompt).text
        except TransportError as e:
            log.attempts.append(Attempt(prompt, "", TRANSPORT_FAIL, clock.now() - t0, str(e)))
            if log.failures() >= config.max_attempts:
                raise
            continue
        took = clock.now() - t0
        if clock.now() - start > config.time_budget:
            log.attempts.append(Attempt(prompt, text, TIMEOUT, took, "time budget exceeded"))
            return CandidateResult("GaveUp", log, reason="TimeBudget")
        try:
            source = extract_c_code(text)
        except NoCodeBlock:
            reason = NO_CODE_REASON
            log.attempts.append(Attempt(prompt, text, PARSE_FAIL, took, reason))
            continue
        decision = gate(source)
        if decision.kind == "Retry":
            reason = decision.reason
            cls = PARSE_FAIL if decision.category == "parse" else DIFFERENTIAL_FAIL
            log.attempts.append(Attempt(prompt, text, cls, took, reason))
            continue
        log.attempts.append(Attempt(prompt, text, ACCEPTED, took))
        return CandidateResult("Success", log, source, decision=decision)
    return CandidateResult("GaveUp", log, reason="MaxAttempts")


class EmptyMapping(ValueError):
    """The back-mapping answer contains no statements."""


@dataclass
class MappedStatement:
    text: str
    line: Optional[int]

    @property
    def anchored(self) -> bool:
        return self.line is not None

    def to_json(self) -> dict:
        return {"text": self.text, "line": self.line, "anchored": self.anchored}


@dataclass
class BackmapResult:
    statements: list
    prompt: object
    response: str

    def lines(self) -> list[int]:
        return sorted({s.line for s in self.statements if s.line is not None})

    def to_json(self) -> dict:
        return {"statements": [s.to_json() for s in self.statements], "response": self.response}


def anchor(source: str, text: str) -> Optional[int]:
    """First line of ``source`` whose trimmed text equals ``text`` trimmed."""
    want = text.strip()
    for i, line in enumerate(source.splitlines(), 1):
        if line.strip() == want:
            return i
    return None


def backmap_statements(client, problem, c_statements, conversation=None) -> BackmapResult:
    """Ask the model which Python statements the faulty C statements came from.

    With ``conversation`` (the accepted transpilation exchange) the mapping
    prompt is sent as a follow-up turn so the model sees the original code.
    """
    text = render_backmap(list(c_statements))
    prompt = list(conversation) + [{"role": "user", "content": text}] if conversation else text
    response = client.complete(prompt).text
    block = extract_python_code(response)
    rows = [l for l in block.splitlines() if l.strip()]
    if not rows:
        raise EmptyMapping("back-mapping answer has no statements")
    mapped = [MappedStatement(r.strip(), anchor(problem.source, r)) for r in rows]
    return BackmapResult(mapped, prompt, response)
