"""MaxSAT-based fault localisation over MiniC.

Every statement-level definition is guarded by a healthy literal ``h_s``;
the failing test (constant inputs in ``main`` or pinned nondet values) and
the assertions are hard, the unit clauses ``(h_s)`` are soft. Each optimum
of the partial MaxSAT problem is a minimum-cardinality diagnosis; blocking
clauses enumerate the rest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bmc.encode import DEFAULT_MAX_VARS, Encoder, TraceFormula
from .bmc.ir import EIte, EVar, expr_vars
from .bmc.ssa import SCheck, SsaProgram, to_ssa
from .bmc.unroll import unroll
from .minic.nodes import MiniCProgram
from .solver.cdcl import Solver
from .solver.maxsat import MaxSatSolver

DEFAULT_CAP = 16


class UnsatSpecification(Exception):
    """The hard part is unsatisfiable even with every statement relaxed."""


@dataclass
class GuardedFormula:
    formula: TraceFormula
    ssa: SsaProgram
    program: MiniCProgram
    sinks: set = field(default_factory=set)
    _solver: Solver | None = field(default=None, init=False, repr=False, compare=False)

    @property
    def guards(self) -> dict:
        return self.formula.guards

    def relaxation_sat(self, relaxed) -> bool:
        """Whether the hard clauses are satisfiable with exactly ``relaxed``
        switched off and every other guarded statement healthy."""
        relaxed = set(relaxed)
        if self._solver is None:
            self._solver = Solver(self.formula.num_vars)
            for c in self.formula.clauses:
                self._solver.add_clause(c)
        s = self._solver
        assumptions = [-h if sid in relaxed else h for sid, h in sorted(self.guards.items())]
        return s.solve(assumptions)

    def to_wcnf(self) -> str:
        from .solver.cnf import serialize_dimacs
        return serialize_dimacs(self.formula.maxsat())


@dataclass(frozen=True)
class Diagnosis:
    statements: tuple          # StatementIds, sorted
    cost: int
    sink: bool = False         # contains a final write to an asserted value

    def to_json(self, program: MiniCProgram | None = None) -> dict:
        out = {"statements": list(self.statements), "cost": self.cost, "sink": self.sink}
        if program is not None:
            out["lines"] = [program.statement(s).span.line for s in self.statements]
        return out


@dataclass
class DiagnosisSet:
    diagnoses: list
    cost: int
    truncated: bool = False

    def __bool__(self):
        return bool(self.diagnoses)

    def statements(self) -> set:
        out = set()
        for d in self.diagnoses:
            out.update(d.statements)
        return out


def _sinks(ssa: SsaProgram) -> set:
    """StatementIds whose definitions feed an assertion through plumbing only."""
    defs = ssa.definitions()
    out: set = set()
    seen: set = set()
    work = []
    for s in ssa.stmts:
        if isinstance(s, SCheck) and s.kind == "assert":
            work.extend(expr_vars(s.cond))
    while work:
        v = work.pop()
        if v in seen:
            continue
        seen.add(v)
        d = defs.get(v)
        if d is None:
            continue
        if d.origin is not None and d.kind != "cond":
            out.add(d.origin)
            continue
        if d.kind == "merge" and isinstance(d.expr, EIte):
            for x in (d.expr.a, d.expr.b):
                if isinstance(x, EVar):
                    work.append(x.name)
        elif d.kind != "guard":
            work.extend(expr_vars(d.expr))
    return out


def encode_guarded(program: MiniCProgram, k: int = 64, d: int = 8,
                   inputs: dict | None = None, policy: str = "assume",
                   max_vars: int = DEFAULT_MAX_VARS) -> GuardedFormula:
    """Guarded trace formula with the assertions asserted to hold.

    ``inputs`` pins nondet reads (by name) to the failing test's values.
    """
    u = unroll(program, k, d, policy)
    ssa = to_ssa(u)
    hard = [st.sid for st in program.statements
            if st.function == "main" and st.kind == "return"]
    tf = Encoder(ssa, guarded=True, max_vars=max_vars, inputs=inputs, unguarded=hard).run()
    g = GuardedFormula(tf, ssa, program, _sinks(ssa))
    tf.sinks = set(g.sinks)
    s = Solver(tf.num_vars)
    for c in tf.clauses:
        s.add_clause(c)
    if not s.solve():
        raise UnsatSpecification("specification unsatisfiable even with every statement relaxed")
    return g


def enumerate_diagnoses(g: GuardedFormula, cap: int = DEFAULT_CAP,
                        conflict_budget=None) -> DiagnosisSet:
    """All minimum-cost diagnoses (up to ``cap``)."""
    if cap < 1:
        raise ValueError("cap must be positive")
    ms = MaxSatSolver(g.formula.maxsat(), conflict_budget)
    res = ms.optimize()
    if res.status == "HardUnsat":
        raise UnsatSpecification("specification unsatisfiable even with every statement relaxed")
    if res.cost == 0:
        return DiagnosisSet([], 0)
    guards = sorted(g.guards.items())
    found = []
    model = res.model
    truncated = False
    while model is not None:
        if len(found) >= cap:
            truncated = True
            break
        sids = tuple(sid for sid, h in guards if not model[h])
        found.append(Diagnosis(sids, res.cost, bool(set(sids) & g.sinks)))
        ms.add_hard([g.guards[sid] for sid in sids])
        model = ms.solve_at_most(res.cost)
    found.sort(key=lambda x: x.statements)
    return DiagnosisSet(found, res.cost, truncated)


def map_diagnosis_to_source(ds: DiagnosisSet, program: MiniCProgram) -> list[tuple[int, str]]:
    """Line-sorted, deduplicated (line, statement text) pairs."""
    seen = set()
    out = []
    for sid in sorted(ds.statements()):
        info = program.statement(sid)
        key = (info.span.line, info.text)
        if key not in seen:
            seen.add(key)
            out.append(key)
    out.sort()
    return out


def localize(program: MiniCProgram, k: int = 64, d: int = 8, inputs: dict | None = None,
             cap: int = DEFAULT_CAP, conflict_budget=None) -> tuple[GuardedFormula, DiagnosisSet]:
    g = encode_guarded(program, k, d, inputs)
    return g, enumerate_diagnoses(g, cap, conflict_budget)
