from .cdcl import ResourceLimit, Solver
from .cnf import (CnfInstance, FormatError, PartialMaxSatInstance, Sat, Unsat,
                  format_model, parse_dimacs, serialize_dimacs, solve_cnf)
from .maxsat import HardUnsat, MaxSatSolver, OptResult, solve_partial_maxsat

__all__ = [
    "CnfInstance", "FormatError", "HardUnsat", "MaxSatSolver", "OptResult",
    "PartialMaxSatInstance", "ResourceLimit", "Sat", "Solver", "Unsat",
    "format_model", "parse_dimacs", "serialize_dimacs", "solve_cnf",
    "solve_partial_maxsat",
]
