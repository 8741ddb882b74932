"""Per-problem pipeline reports and outcome classification."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

SCHEMA_VERSION = 1

CORRECT = "CorrectBugLocalised"
OTHER = "OtherBugsLocalised"
FIXED = "TranspiledFixedCode"
COMPILATION = "CompilationError"
VERIFIED = "Verified"
NO_DIAGNOSIS = "VerificationFailedNoDiagnosis"
GAVE_UP = "GaveUp"

OUTCOME_CLASSES = (CORRECT, OTHER, FIXED, COMPILATION, VERIFIED, NO_DIAGNOSIS, GAVE_UP)

# keys whose values depend on wall-clock time
TIMING_KEYS = frozenset({"duration_ms", "seconds", "timings"})


class MissingGroundTruth(ValueError):
    """A localisation class needs the injected fault's location."""


@dataclass
class PipelineReport:
    problem: str
    benchmark: str = ""
    mutation: Optional[str] = None          # WBO | ADC | None for unmutated programs
    model: str = ""
    description: bool = True
    config: dict = field(default_factory=dict)
    truth: Optional[dict] = None            # MutantRecord as JSON
    python: dict = field(default_factory=dict)       # "program" / "original" -> RunOutcome JSON
    candidate: Optional[dict] = None        # CandidateResult JSON
    verdict: Optional[dict] = None          # Verdict JSON
    diagnoses: Optional[dict] = None        # {"cost", "truncated", "diagnoses": [...]}
    c_statements: list = field(default_factory=list)  # [[line, text], ...]
    backmap: Optional[dict] = None          # BackmapResult JSON
    outcome: Optional[str] = None
    errors: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    sources: dict = field(default_factory=dict)      # "python" / "c" -> text

    def to_json(self) -> dict:
        d = {"schema_version": SCHEMA_VERSION}
        d.update(asdict(self))
        return d

    @classmethod
    def from_json(cls, d: dict) -> "PipelineReport":
        version = d.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema version {version!r}")
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dumps(), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path) -> "PipelineReport":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

    def anchored_lines(self) -> list[int]:
        if not self.backmap:
            return []
        return sorted({s["line"] for s in self.backmap.get("statements", [])
                       if s.get("line") is not None})


def strip_timing(obj):
    """Copy of a JSON value with every timing field removed."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def classify_outcome(report: PipelineReport, truth: Optional[dict] = None) -> str:
    """Exactly one outcome class for a finished run."""
    cand = report.candidate
    if cand is None or cand.get("status") != "Success":
        attempts = (cand or {}).get("attempts", [])
        if attempts and all(a["classification"] == "ParseFail" for a in attempts):
            return COMPILATION
        return GAVE_UP
    if report.verdict is None:
        return GAVE_UP
    status = report.verdict["status"]
    decision = (cand.get("decision") or {}).get("kind")
    if status == "Verified":
        return FIXED if decision == "FixedCodeSuspected" else VERIFIED
    if not report.diagnoses or not report.diagnoses.get("diagnoses"):
        return NO_DIAGNOSIS
    if truth is None:
        raise MissingGroundTruth(f"{report.problem}: no injected fault to compare against")
    return CORRECT if truth["line"] in report.anchored_lines() else OTHER
