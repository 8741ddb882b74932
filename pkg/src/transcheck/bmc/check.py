"""Bounded verification verdicts and formula dumps."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..minic.nodes import MiniCProgram, Span
from ..solver.cdcl import Solver
from ..solver.cnf import serialize_dimacs
from .ir import ENondet
from .encode import DEFAULT_MAX_VARS, TraceFormula, encode_cnf
from .ssa import SDef, SsaProgram, execute_ssa, to_ssa
from .unroll import unroll

DEFAULT_UNWIND = 64
DEFAULT_INLINE_DEPTH = 8


@dataclass
class Counterexample:
    inputs: list                   # (nondet name, value) in program order
    path: list                     # origin StatementIds along the failing path
    kind: str                      # assert, div, bounds, unwind
    origin: Optional[int] = None
    span: Optional[Span] = None

    def to_json(self) -> dict:
        return {"inputs": [[n, v] for n, v in self.inputs], "path": list(self.path),
                "kind": self.kind, "origin": self.origin,
                "line": self.span.line if self.span else None}


@dataclass
class Verdict:
    status: str                    # Verified | Violated | BoundExceeded
    k: int
    counterexample: Optional[Counterexample] = None
    stats: dict = field(default_factory=dict)

    @property
    def span(self) -> Optional[Span]:
        return self.counterexample.span if self.counterexample else None

    def to_json(self) -> dict:
        return {"status": self.status, "k": self.k,
                "counterexample": self.counterexample.to_json() if self.counterexample else None,
                "stats": dict(self.stats)}


def _counterexample(tf: TraceFormula, ssa: SsaProgram, model, kinds) -> Counterexample:
    values = {name: tf.decode(model, name) for name in ssa.inputs}
    run = execute_ssa(ssa, values)
    v = run.violation
    if v is None or (v.kind == "unwind") != ("unwind" in kinds):
        raise RuntimeError("counterexample replay does not reproduce the violation")
    env = run.env
    on_path = [s.expr.name for s in ssa.stmts
               if isinstance(s, SDef) and isinstance(s.expr, ENondet) and s.var in env
               and (s.guard is None or env[s.guard])]
    inputs = [(n, values[n]) for n in on_path]
    return Counterexample(inputs, run.path, v.kind, v.origin, v.span)


def check_formula(tf: TraceFormula, ssa: SsaProgram, k: int, conflict_budget=None) -> Verdict:
    solver = Solver(tf.num_vars)
    for c in tf.clauses:
        solver.add_clause(c)
    stats = {"vars": tf.num_vars, "clauses": len(tf.clauses)}
    groups = [("Violated", {"assert", "div", "bounds"}), ("BoundExceeded", {"unwind"})]
    for status, kinds in groups:
        lits = tf.violation_clause(kinds)
        if not lits:
            continue
        sel = solver.new_var()
        solver.add_clause(lits + [-sel])
        if solver.solve([sel], conflict_budget=conflict_budget):
            cex = _counterexample(tf, ssa, solver.model, kinds)
            return Verdict(status, k, cex, stats)
        solver.add_clause([-sel])
    return Verdict("Verified", k, None, stats)


def check_bounded(program: MiniCProgram, k: int = DEFAULT_UNWIND,
                  d: int = DEFAULT_INLINE_DEPTH, policy: str = "fail",
                  conflict_budget=None, max_vars: int = DEFAULT_MAX_VARS) -> Verdict:
    """Bounded model check of ``main``.

    Violated when some execution within the bounds fails an assertion (or
    divides by zero / indexes out of bounds); BoundExceeded when only the
    unwinding checks can fail; Verified otherwise.
    """
    u = unroll(program, k, d, policy)
    ssa = to_ssa(u)
    tf = encode_cnf(ssa, max_vars)
    return check_formula(tf, ssa, k, conflict_budget)


def dump_dimacs(tf: TraceFormula, kinds=None) -> tuple[str, str]:
    """DIMACS text of the trace formula plus a sidecar variable map."""
    text = serialize_dimacs(tf.cnf(kinds))
    lines = []
    for name, bits in sorted({**tf.bitvectors, **tf.inputs}.items()):
        for i, b in enumerate(bits):
            if abs(b) > 1:  # skip constants
                neg = "!" if b < 0 else ""
                lines.append(f"var {abs(b)} = {neg}{name}[{i}]")
    return text, "\n".join(lines) + ("\n" if lines else "")
