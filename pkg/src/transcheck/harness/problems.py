"""Benchmark problems on disk and mutant validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .mutate import ADC, WBO, MutantRecord, NoSite, mutate
from .pytokens import split_assertions
from .run import DEFAULT_TIMEOUT, RunOutcome, run_python

HANG_ACCEPT = "accept"
HANG_REJECT = "reject"


@dataclass
class PythonProblem:
    id: str
    source: str
    description: Optional[str] = None
    truth: Optional[MutantRecord] = None
    benchmark: str = ""
    original: Optional[str] = None    # unmutated source, when this is a variant

    def split(self) -> tuple[str, str]:
        """(code, assertions) as handed to the transpilation prompt."""
        return split_assertions(self.source)

    def to_json(self) -> dict:
        return {"id": self.id, "benchmark": self.benchmark, "description": self.description,
                "source": self.source, "original": self.original,
                "truth": self.truth.to_json() if self.truth else None}

    @classmethod
    def from_json(cls, d: dict) -> "PythonProblem":
        truth = MutantRecord.from_json(d["truth"]) if d.get("truth") else None
        return cls(d["id"], d["source"], d.get("description"), truth,
                   d.get("benchmark", ""), d.get("original"))


def load_problem(path: str | Path, benchmark: str = "") -> PythonProblem:
    """Read ``<dir>/program.py`` plus the optional description and mutant record.

    With a mutant record the problem's source is the mutant and the file on
    disk is kept as ``original``.
    """
    path = Path(path)
    source = (path / "program.py").read_text(encoding="utf-8")
    desc_file = path / "description.txt"
    description = desc_file.read_text(encoding="utf-8").strip() if desc_file.exists() else None
    truth = None
    original = None
    rec_file = path / "mutant.json"
    if rec_file.exists():
        truth = MutantRecord.from_json(json.loads(rec_file.read_text(encoding="utf-8")))
        original = source
        source = truth.apply(source)
    return PythonProblem(path.name, source, description, truth, benchmark, original)


def load_benchmark(root: str | Path) -> list[PythonProblem]:
    """All problems under ``root/problems`` (or ``root`` itself), sorted by id."""
    root = Path(root)
    base = root / "problems" if (root / "problems").is_dir() else root
    dirs = sorted(p for p in base.iterdir() if (p / "program.py").exists())
    return [load_problem(p, root.name) for p in dirs]


def save_problem(problem: PythonProblem, root: str | Path) -> Path:
    d = Path(root) / problem.id
    d.mkdir(parents=True, exist_ok=True)
    (d / "program.py").write_text(problem.original if problem.truth else problem.source,
                                  encoding="utf-8")
    if problem.description is not None:
        (d / "description.txt").write_text(problem.description + "\n", encoding="utf-8")
    if problem.truth is not None:
        (d / "mutant.json").write_text(json.dumps(problem.truth.to_json(), indent=2) + "\n",
                                       encoding="utf-8")
    return d


@dataclass
class MutantVerdict:
    accepted: bool
    reason: str                   # AssertionFailed, Timeout, EquivalentMutant, RuntimeError
    outcome: RunOutcome = field(default_factory=lambda: RunOutcome("Pass"))

    @property
    def timeout(self) -> bool:
        return self.outcome.status == "Timeout"


def validate_mutant(original: PythonProblem, mutant_source: str,
                    timeout: float = DEFAULT_TIMEOUT, hang_policy: str = HANG_ACCEPT,
                    python: str | None = None, check_original: bool = True) -> MutantVerdict:
    """Accept a mutant only when it observably breaks the assertions.

    A hanging mutant is accepted (and flagged) under the default hang policy.
    """
    if check_original:
        base = run_python(original.source if original.original is None else original.original,
                          timeout, python)
        if not base.passed:
            raise ValueError(f"original program does not pass: {base.status} {base.message}")
    out = run_python(mutant_source, timeout, python)
    if out.status == "AssertionFailed":
        return MutantVerdict(True, "AssertionFailed", out)
    if out.status == "Timeout":
        return MutantVerdict(hang_policy == HANG_ACCEPT, "Timeout", out)
    if out.status == "Pass":
        return MutantVerdict(False, "EquivalentMutant", out)
    return MutantVerdict(False, "RuntimeError", out)


def make_variants(problem: PythonProblem, seed: int = 0,
                  kinds=(WBO, ADC)) -> list[PythonProblem]:
    """At most one mutation per variant; one variant per kind with sites."""
    out = []
    for kind in kinds:
        try:
            mutant, rec = mutate(problem.source, kind, seed)
        except NoSite:
            continue
        out.append(replace(problem, id=f"{problem.id}-{kind.lower()}", source=mutant,
                           truth=rec, original=problem.source))
    return out
