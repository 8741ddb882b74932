"""Run Python programs with module-level assertions in a subprocess."""

from __future__ import annotations

import os
import re
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from typing import Optional

DEFAULT_TIMEOUT = 5.0
PYTHON_ENV = "TRANSCHECK_PYTHON"

_FRAME = re.compile(r'^\s*File "(?P<file>[^"]+)", line (?P<line>\d+)')


class EnvError(Exception):
    """The configured Python interpreter could not be started."""


@dataclass
class RunOutcome:
    status: str                    # Pass | AssertionFailed | RuntimeError | Timeout
    duration_ms: float = 0.0
    line: Optional[int] = None     # failing line for AssertionFailed, when known
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "Pass"

    @property
    def failed(self) -> bool:
        return self.status != "Pass"

    def to_json(self) -> dict:
        return {"status": self.status, "line": self.line, "message": self.message,
                "duration_ms": round(self.duration_ms, 3)}

    @classmethod
    def from_json(cls, d: dict) -> "RunOutcome":
        return cls(d["status"], d.get("duration_ms", 0.0), d.get("line"), d.get("message", ""))


def python_executable(python: str | None = None) -> str:
    return python or os.environ.get(PYTHON_ENV) or sys.executable


def _classify(stderr: str, path: str) -> tuple[str, Optional[int], str]:
    lines = [l for l in stderr.splitlines() if l.strip()]
    last = lines[-1].strip() if lines else ""
    line = None
    for l in lines:
        m = _FRAME.match(l)
        if m and os.path.basename(m.group("file")) == os.path.basename(path):
            line = int(m.group("line"))
    if last.startswith("AssertionError"):
        return "AssertionFailed", line, last
    return "RuntimeError", line, last


def run_python(source: str, timeout: float = DEFAULT_TIMEOUT,
               python: str | None = None) -> RunOutcome:
    """Execute ``source`` as a module in a fresh interpreter process.

    The process is killed once ``timeout`` seconds of wall clock pass.
    """
    exe = python_executable(python)
    with tempfile.TemporaryDirectory(prefix="tc-run-") as tmp:
        path = os.path.join(tmp, "program.py")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(source)
        start = time.perf_counter()
        try:
            proc = subprocess.run([exe, path], cwd=tmp, capture_output=True, text=True,
                                  timeout=timeout, stdin=subprocess.DEVNULL)
        except subprocess.TimeoutExpired:
            return RunOutcome("Timeout", (time.perf_counter() - start) * 1000.0,
                              message=f"exceeded {timeout:g} s")
        except OSError as e:
            raise EnvError(f"cannot run Python interpreter {exe!r}: {e}") from e
        elapsed = (time.perf_counter() - start) * 1000.0
    if proc.returncode == 0:
        return RunOutcome("Pass", elapsed)
    status, line, msg = _classify(proc.stderr, path)
    return RunOutcome(status, elapsed, line, msg)
