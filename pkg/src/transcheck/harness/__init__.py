"""Python side of the pipeline: running programs and injecting faults."""

from .mutate import (ADC, SWAP, WBO, MutantRecord, NoSite, Site, eligible_sites, mutate,
                     mutate_adc, mutate_wbo, scan_mutation_sites)
from .problems import (HANG_ACCEPT, HANG_REJECT, MutantVerdict, PythonProblem, load_benchmark,
                       load_problem, make_variants, save_problem, validate_mutant)
from .pytokens import LexError, logical_lines, split_assertions
from .run import DEFAULT_TIMEOUT, EnvError, RunOutcome, python_executable, run_python

__all__ = [
    "ADC", "SWAP", "WBO", "MutantRecord", "NoSite", "Site", "eligible_sites", "mutate",
    "mutate_adc", "mutate_wbo", "scan_mutation_sites", "HANG_ACCEPT", "HANG_REJECT",
    "MutantVerdict", "PythonProblem", "load_benchmark", "load_problem", "make_variants",
    "save_problem", "validate_mutant", "LexError", "logical_lines", "split_assertions",
    "DEFAULT_TIMEOUT", "EnvError", "RunOutcome", "python_executable", "run_python",
]
