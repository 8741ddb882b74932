"""Command-line interface.

Exit codes: 0 when every stage ran, 1 for usage errors, 2 when the
environment (Python interpreter, model endpoint, fixtures) is unavailable.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .bmc import check_bounded, dump_dimacs, encode_cnf, to_ssa, unroll
from .harness import (ADC, WBO, EnvError, NoSite, PythonProblem, load_benchmark, load_problem,
                      make_variants, mutate, save_problem, validate_mutant)
from .harness.pytokens import LexError as PyLexError
from .llm import LlmConfig, NoFixture, TransportError, transpile_with_retry
from .localize import UnsatSpecification, encode_guarded, enumerate_diagnoses, map_diagnosis_to_source
from .minic import MiniCError, load_program
from .pipeline import PipelineConfig, PipelineReport, compute_metrics, run_batch, run_pipeline
from .pipeline.gate import validate_candidate
from .pipeline.metrics import EmptyGroup
from .harness.run import run_python
from .util import deep_recursion

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ENV = 2

DEFAULTS = {
    "endpoint": "http://localhost:8000/v1",
    "model": "mock",
    "mock": None,
    "no_description": False,
    "unwind": 64,
    "inline_depth": 8,
    "timeout": 5.0,
    "seed": 0,
    "jobs": 1,
    "out": None,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser):
    g = p.add_argument_group("pipeline options")
    g.add_argument("--config", help="JSON file with option defaults")
    g.add_argument("--endpoint", help="chat-completions endpoint URL")
    g.add_argument("--model", help="model name sent to the endpoint")
    g.add_argument("--mock", metavar="DIR", help="serve model responses from a replay directory")
    g.add_argument("--no-description", dest="no_description", action="store_const", const=True,
                   default=None, help="leave the natural language description out of prompts")
    g.add_argument("--unwind", type=int, metavar="K", help="loop unwinding bound")
    g.add_argument("--inline-depth", dest="inline_depth", type=int, metavar="D",
                   help="call inlining depth")
    g.add_argument("--timeout", type=float, metavar="S", help="Python run timeout in seconds")
    g.add_argument("--seed", type=int, metavar="N", help="mutation site seed")
    g.add_argument("--jobs", type=int, metavar="J", help="parallel problems in bench")
    g.add_argument("--out", metavar="DIR", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="transcheck",
                     description="Verify and localise faults in Python programs via C.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("transpile", help="transpile one problem and print the accepted C code")
    p.add_argument("problem", help="problem directory or .py file")
    p.add_argument("--description-file", help="description for a bare .py file")
    _common(p)

    p = sub.add_parser("mutate", help="inject a WBO or ADC fault into a Python program")
    p.add_argument("program", help="problem directory or .py file")
    p.add_argument("--kind", choices=[WBO, ADC], required=True)
    p.add_argument("--site", type=int, help="explicit eligible-site index instead of --seed")
    p.add_argument("--validate", action="store_true", help="check the mutant fails an assertion")
    _common(p)

    p = sub.add_parser("verify", help="bounded model check of a MiniC file")
    p.add_argument("source", help="C file")
    p.add_argument("--policy", choices=["fail", "assume"], default="fail",
                   help="unwinding-assertion policy")
    p.add_argument("--dimacs", metavar="FILE", help="also write the trace formula as DIMACS")
    _common(p)

    p = sub.add_parser("localize", help="MaxSAT fault localisation of a failing MiniC file")
    p.add_argument("source", help="C file")
    p.add_argument("--cap", type=int, default=16, help="maximum number of diagnoses")
    p.add_argument("--wcnf", metavar="FILE", help="also write the guarded formula as WCNF")
    _common(p)

    p = sub.add_parser("run", help="full pipeline on one problem")
    p.add_argument("problem", help="problem directory or .py file")
    p.add_argument("--description-file", help="description for a bare .py file")
    _common(p)

    p = sub.add_parser("bench", help="full pipeline on a directory of problems")
    p.add_argument("benchmark", help="directory holding problems/<id>/ or <id>/ entries")
    p.add_argument("--variants", action="store_true",
                   help="also run one WBO and one ADC mutant per problem")
    _common(p)

    p = sub.add_parser("report", help="metrics tables and figures from stored reports")
    p.add_argument("reports", help="directory of report JSON files")
    _common(p)
    return parser


def resolve_options(args) -> dict:
    """Defaults, then the config file, then explicit flags."""
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, ValueError) as e:
            raise UsageError(f"cannot read config {args.config}: {e}") from e
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        for k, v in data.items():
            key = k.replace("-", "_")
            if key not in DEFAULTS:
                raise UsageError(f"unknown config key {k!r}")
            opts[key] = v
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            opts[key] = v
    return opts


def pipeline_config(opts: dict) -> PipelineConfig:
    llm = LlmConfig(endpoint=opts["endpoint"], model=opts["model"],
                    include_description=not opts["no_description"])
    return PipelineConfig(llm, mock=opts["mock"], unwind=int(opts["unwind"]),
                          inline_depth=int(opts["inline_depth"]), timeout=float(opts["timeout"]))


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from e


def read_problem(path, description_file=None) -> PythonProblem:
    p = Path(path)
    if p.is_dir():
        if not (p / "program.py").exists():
            raise UsageError(f"{p} has no program.py")
        return load_problem(p)
    desc = _read(description_file).strip() if description_file else None
    return PythonProblem(p.stem, _read(p), desc)


def _emit(obj, opts, name: str):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if opts["out"]:
        out = Path(opts["out"])
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_c(path):
    try:
        return load_program(_read(path))
    except MiniCError as e:
        raise UsageError(e.diagnostic(str(path))) from e


def cmd_transpile(args, opts) -> int:
    problem = read_problem(args.problem, args.description_file)
    config = pipeline_config(opts)
    py = run_python(problem.source, config.timeout)
    result = transpile_with_retry(problem, config.llm,
                                  lambda src: validate_candidate(py, src, config.c_limits),
                                  config.client())
    if opts["out"]:
        _emit(result.to_json(), opts, f"{problem.id}.transpile.json")
        if result.ok:
            (Path(opts["out"]) / f"{problem.id}.c").write_text(result.source, encoding="utf-8")
    elif result.ok:
        sys.stdout.write(result.source)
    else:
        print(f"gave up: {result.reason} after {len(result.log)} attempts", file=sys.stderr)
    return EXIT_OK


def cmd_mutate(args, opts) -> int:
    problem = read_problem(args.program)
    if problem.original is not None:
        # a stored variant: mutate the unmutated program it came from
        problem = replace(problem, source=problem.original, truth=None, original=None)
    try:
        mutant, rec = mutate(problem.source, args.kind, int(opts["seed"]), args.site)
    except NoSite as e:
        raise UsageError(str(e)) from e
    out = {"record": rec.to_json(), "mutant": mutant}
    if args.validate:
        v = validate_mutant(problem, mutant, float(opts["timeout"]))
        out["validation"] = {"accepted": v.accepted, "reason": v.reason, "timeout": v.timeout}
    if opts["out"]:
        variant = replace(problem, id=f"{problem.id}-{args.kind.lower()}", source=mutant,
                          truth=rec, original=problem.source)
        save_problem(variant, opts["out"])
    sys.stdout.write(json.dumps(out, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_verify(args, opts) -> int:
    program = _load_c(args.source)
    with deep_recursion():
        verdict = check_bounded(program, int(opts["unwind"]), int(opts["inline_depth"]),
                                args.policy)
        if args.dimacs:
            tf = encode_cnf(to_ssa(unroll(program, int(opts["unwind"]),
                                          int(opts["inline_depth"]), args.policy)))
            text, sidecar = dump_dimacs(tf)
            Path(args.dimacs).write_text(text, encoding="utf-8")
            Path(args.dimacs + ".map").write_text(sidecar, encoding="utf-8")
    _emit(verdict.to_json(), opts, "verdict.json")
    return EXIT_OK


def cmd_localize(args, opts) -> int:
    program = _load_c(args.source)
    try:
        g = encode_guarded(program, int(opts["unwind"]), int(opts["inline_depth"]))
        ds = enumerate_diagnoses(g, args.cap)
    except UnsatSpecification as e:
        raise UsageError(str(e)) from e
    if args.wcnf:
        Path(args.wcnf).write_text(g.to_wcnf(), encoding="utf-8")
    out = {"cost": ds.cost, "truncated": ds.truncated,
           "diagnoses": [d.to_json(program) for d in ds.diagnoses],
           "statements": [[line, text] for line, text in map_diagnosis_to_source(ds, program)]}
    _emit(out, opts, "diagnoses.json")
    return EXIT_OK


def _env_failure(report: PipelineReport) -> bool:
    return any(e["type"] in ("TransportError", "NoFixture") for e in report.errors)


def cmd_run(args, opts) -> int:
    problem = read_problem(args.problem, args.description_file)
    report = run_pipeline(problem, pipeline_config(opts))
    if opts["out"]:
        report.save(Path(opts["out"]) / f"{problem.id}.json")
    else:
        sys.stdout.write(report.dumps())
    print(f"{problem.id}: {report.outcome}", file=sys.stderr)
    return EXIT_ENV if _env_failure(report) else EXIT_OK


def cmd_bench(args, opts) -> int:
    root = Path(args.benchmark)
    if not root.is_dir():
        raise UsageError(f"{root} is not a directory")
    problems = load_benchmark(root)
    if args.variants:
        problems = problems + [v for p in problems if p.truth is None
                               for v in make_variants(p, int(opts["seed"]))]
    config = pipeline_config(opts)
    reports = run_batch(problems, config, int(opts["jobs"]), opts["out"])
    summary = {"schema_version": 1, "benchmark": root.name, "problems": len(reports),
               "outcomes": {r.problem: r.outcome for r in reports}}
    if opts["out"]:
        (Path(opts["out"]) / "summary.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    sys.stdout.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return EXIT_ENV if any(_env_failure(r) for r in reports) else EXIT_OK


def cmd_report(args, opts) -> int:
    from .pipeline.plots import write_report

    d = Path(args.reports)
    if not d.is_dir():
        raise UsageError(f"{d} is not a directory")
    reports = []
    for p in sorted(d.glob("*.json")):
        data = json.loads(p.read_text(encoding="utf-8"))
        if "problem" in data and "schema_version" in data:
            reports.append(PipelineReport.from_json(data))
    try:
        table = compute_metrics(reports)
    except EmptyGroup as e:
        raise UsageError(f"{d}: {e}") from e
    out = Path(opts["out"] or d / "metrics")
    for path in write_report(table, out):
        print(path, file=sys.stderr)
    sys.stdout.write(table.render())
    return EXIT_OK


COMMANDS = {
    "transpile": cmd_transpile, "mutate": cmd_mutate, "verify": cmd_verify,
    "localize": cmd_localize, "run": cmd_run, "bench": cmd_bench, "report": cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = resolve_options(args)
        return COMMANDS[args.command](args, opts)
    except (UsageError, PyLexError) as e:
        print(f"transcheck: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (EnvError, TransportError, NoFixture) as e:
        print(f"transcheck: environment error: {e}", file=sys.stderr)
        return EXIT_ENV


if __name__ == "__main__":
    sys.exit(main())
