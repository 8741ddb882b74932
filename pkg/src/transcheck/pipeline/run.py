"""End-to-end runs: transpile, gate, verify, localise, map back."""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from ..bmc import DEFAULT_INLINE_DEPTH, DEFAULT_UNWIND, CapacityError, RecursionBound, check_bounded
from ..harness import DEFAULT_TIMEOUT, PythonProblem, run_python
from ..llm import (EmptyMapping, HttpClient, LlmConfig, NoCodeBlock, NoFixture, ReplayClient,
                   TransportError, backmap_statements, transpile_with_retry)
from ..localize import DEFAULT_CAP, UnsatSpecification, localize, map_diagnosis_to_source
from ..minic import Limits, load_program
from ..solver.cdcl import ResourceLimit
from .gate import validate_candidate
from .report import MissingGroundTruth, PipelineReport, OTHER, classify_outcome


@dataclass
class PipelineConfig:
    llm: LlmConfig = field(default_factory=LlmConfig)
    mock: Optional[str] = None               # replay fixture directory
    unwind: int = DEFAULT_UNWIND
    inline_depth: int = DEFAULT_INLINE_DEPTH
    timeout: float = DEFAULT_TIMEOUT         # Python run timeout, seconds
    c_limits: Limits = field(default_factory=Limits)
    cap: int = DEFAULT_CAP
    python: Optional[str] = None
    conflict_budget: Optional[int] = None

    def to_json(self) -> dict:
        return {"llm": self.llm.to_json(), "mock": bool(self.mock), "unwind": self.unwind,
                "inline_depth": self.inline_depth, "timeout": self.timeout,
                "c_step_limit": self.c_limits.step_limit, "c_timeout": self.c_limits.timeout,
                "cap": self.cap}

    def client(self):
        if self.mock:
            return ReplayClient(self.mock)
        return HttpClient(self.llm)


class _Stage:
    def __init__(self, report: PipelineReport, name: str):
        self.report = report
        self.name = name

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.report.timings[self.name] = round(time.perf_counter() - self.t0, 4)
        return False


def _error(report: PipelineReport, stage: str, err: Exception):
    report.errors.append({"stage": stage, "type": type(err).__name__, "message": str(err)})


def run_pipeline(problem: PythonProblem, config: PipelineConfig, client=None,
                 clock=None) -> PipelineReport:
    """Run every stage for one problem; stage failures end up in the report."""
    client = client or config.client()
    report = PipelineReport(problem.id, problem.benchmark,
                            problem.truth.kind if problem.truth else None,
                            config.llm.model, config.llm.include_description, config.to_json(),
                            problem.truth.to_json() if problem.truth else None)
    report.sources["python"] = problem.source

    with _Stage(report, "python"):
        py = run_python(problem.source, config.timeout, config.python)
        report.python["program"] = py.to_json()
        if problem.original is not None:
            report.python["original"] = run_python(problem.original, config.timeout,
                                                   config.python).to_json()

    def gate(src):
        return validate_candidate(py, src, config.c_limits)

    with _Stage(report, "transpile"):
        try:
            cand = transpile_with_retry(problem, config.llm, gate, client, clock)
        except (TransportError, NoFixture) as e:
            _error(report, "transpile", e)
            cand = None
    if cand is not None:
        report.candidate = cand.to_json()
    if cand is None or not cand.ok:
        report.outcome = classify_outcome(report)
        return report
    report.sources["c"] = cand.source

    program = load_program(cand.source)
    k, d = config.unwind, config.inline_depth
    with _Stage(report, "verify"):
        try:
            verdict = check_bounded(program, k, d, conflict_budget=config.conflict_budget)
            report.verdict = verdict.to_json()
        except (CapacityError, RecursionBound, ResourceLimit) as e:
            _error(report, "verify", e)
    if report.verdict is None or report.verdict["status"] == "Verified":
        report.outcome = classify_outcome(report)
        return report

    with _Stage(report, "localize"):
        inputs = None
        if verdict.counterexample and verdict.counterexample.inputs:
            inputs = dict(verdict.counterexample.inputs)
        try:
            _, ds = localize(program, k, d, inputs, config.cap, config.conflict_budget)
            report.diagnoses = {"cost": ds.cost, "truncated": ds.truncated,
                                "diagnoses": [x.to_json(program) for x in ds.diagnoses]}
            pairs = map_diagnosis_to_source(ds, program)
            report.c_statements = [[line, text] for line, text in pairs]
        except (UnsatSpecification, CapacityError, RecursionBound, ResourceLimit) as e:
            _error(report, "localize", e)

    if report.c_statements:
        with _Stage(report, "backmap"):
            try:
                bm = backmap_statements(client, problem, [t for _, t in report.c_statements],
                                        cand.conversation())
                report.backmap = bm.to_json()
            except (TransportError, NoFixture, NoCodeBlock, EmptyMapping) as e:
                _error(report, "backmap", e)

    truth = problem.truth.to_json() if problem.truth else None
    try:
        report.outcome = classify_outcome(report, truth)
    except MissingGroundTruth:
        report.outcome = OTHER
        report.notes.append("no ground truth: localised statements are reported as other bugs")
    return report


def _run_one(args):
    problem, config = args
    return run_pipeline(problem, config)


def report_name(problem: PythonProblem) -> str:
    return f"{problem.id}.json"


def run_batch(problems, config: PipelineConfig, jobs: int | None = None,
              out: str | Path | None = None) -> list[PipelineReport]:
    """Run many problems; reports come back sorted by problem id."""
    problems = sorted(problems, key=lambda p: p.id)
    if jobs is None:
        jobs = min(os.cpu_count() or 1, config.llm.max_in_flight)
    if jobs <= 1 or len(problems) <= 1:
        reports = [run_pipeline(p, config) for p in problems]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_run_one, [(p, config) for p in problems]))
    if out is not None:
        out = Path(out)
        for p, r in zip(problems, reports):
            r.save(out / report_name(p))
    return reports


def with_description(config: PipelineConfig, flag: bool) -> PipelineConfig:
    return replace(config, llm=replace(config.llm, include_description=flag))
