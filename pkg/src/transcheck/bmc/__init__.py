"""Bounded model checking of MiniC programs."""

from .check import (DEFAULT_INLINE_DEPTH, DEFAULT_UNWIND, Counterexample, Verdict,
                    check_bounded, check_formula, dump_dimacs)
from .encode import Encoder, Obligation, TraceFormula, encode_cnf
from .ir import CapacityError
from .ssa import SsaProgram, execute_ssa, to_ssa
from .unroll import RecursionBound, UnrolledProgram, execute_unrolled, unroll

__all__ = [
    "CapacityError", "Counterexample", "DEFAULT_INLINE_DEPTH", "DEFAULT_UNWIND",
    "Encoder", "Obligation", "RecursionBound", "SsaProgram", "TraceFormula",
    "UnrolledProgram", "Verdict", "check_bounded", "check_formula", "dump_dimacs",
    "encode_cnf", "execute_ssa", "execute_unrolled", "to_ssa", "unroll",
]
