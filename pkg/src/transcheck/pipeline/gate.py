"""Differential gate between the Python program and a C candidate."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..harness.run import RunOutcome
from ..minic import Limits, MiniCError, interpret_main, load_program
from ..minic.interpreter import ExecutionOutcome, NondetForbidden
from ..util import deep_recursion

TO_VERIFIER = "ToVerifier"
RETRY = "Retry"
FIXED_CODE = "FixedCodeSuspected"

_ASSERT = re.compile(r"^\s*assert\s*\((.*)\)\s*;?\s*$", re.DOTALL)


@dataclass
class GateDecision:
    kind: str                        # ToVerifier | Retry | FixedCodeSuspected
    reason: str = ""
    category: Optional[str] = None   # parse | differential, for Retry
    c_status: Optional[str] = None   # how the candidate ran

    def to_json(self) -> dict:
        return {"kind": self.kind, "reason": self.reason, "category": self.category,
                "c_status": self.c_status}

    @classmethod
    def from_json(cls, d):
        return cls(d["kind"], d.get("reason", ""), d.get("category"), d.get("c_status"))


def compile_reason(err: MiniCError) -> str:
    return f"C compilation/parse error: {err.diagnostic('candidate.c')}"


def _differential_reason(program, out: ExecutionOutcome) -> str:
    if out.status == "AssertionViolated" and out.sid is not None:
        text = program.statement(out.sid).text
        m = _ASSERT.match(text)
        return f"assertion {m.group(1).strip() if m else text} failed in C but passed in Python"
    return f"C execution {out.describe()} but the Python program passed"


def run_candidate(c_source: str, limits: Limits = Limits()):
    """Parse, check and run a candidate; returns (program, outcome)."""
    program = load_program(c_source)
    with deep_recursion():
        try:
            out = interpret_main(program, limits)
        except NondetForbidden as e:
            out = ExecutionOutcome("RuntimeError", 0, span=e.span, kind="nondet")
    return program, out


def c_failed(out: ExecutionOutcome) -> bool:
    # a violated assume only prunes the run; it is not a failure
    return out.status in ("AssertionViolated", "RuntimeError")


def validate_candidate(py_outcome: RunOutcome, c_source: str,
                       limits: Limits = Limits()) -> GateDecision:
    """Map (Python result, C result) to the next pipeline step."""
    try:
        program, out = run_candidate(c_source, limits)
    except MiniCError as e:
        return GateDecision(RETRY, compile_reason(e), "parse")
    c_fail = c_failed(out)
    py_fail = py_outcome.failed
    if c_fail and not py_fail:
        return GateDecision(RETRY, _differential_reason(program, out), "differential", out.status)
    if py_fail and not c_fail:
        return GateDecision(FIXED_CODE, "C passes all assertions while Python fails",
                            None, out.status)
    return GateDecision(TO_VERIFIER, "", None, out.status)
