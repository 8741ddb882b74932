"""Trace formula construction from SSA.

Only definitions in the cone of influence of a check or assumption are
encoded. In guarded mode every statement-level definition is wrapped as
``h_s -> (x == expr)`` with one healthy literal per StatementId and checks
are asserted to hold; in plain mode checks become violation literals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..minic.nodes import Span
from ..solver.cnf import CnfInstance, PartialMaxSatInstance
from .circuit import F, T, Circuit
from .ir import EBin, EConst, EIte, ENondet, ESel, EUn, EVar, expr_vars
from .ssa import SAssume, SCheck, SDef, SsaProgram

DEFAULT_MAX_VARS = 5_000_000

_COMPARE = {"<", "<=", ">", ">=", "==", "!="}


@dataclass
class Obligation:
    lit: int                # true exactly when this obligation is violated
    kind: str               # assert, div, bounds, unwind
    origin: Optional[int]
    span: Optional[Span]


@dataclass
class TraceFormula:
    num_vars: int
    clauses: list
    bitvectors: dict = field(default_factory=dict)   # versioned name -> literals
    inputs: dict = field(default_factory=dict)       # nondet name -> literals
    obligations: list = field(default_factory=list)
    guards: dict = field(default_factory=dict)       # StatementId -> h_s
    sinks: set = field(default_factory=set)          # StatementIds writing asserted values

    @property
    def hard(self) -> range:
        return range(len(self.clauses))

    @property
    def soft(self) -> list:
        return [([h], 1) for _, h in sorted(self.guards.items())]

    def violation_clause(self, kinds=None) -> list[int]:
        lits = [o.lit for o in self.obligations if kinds is None or o.kind in kinds]
        return [l for l in lits if l != F]

    def cnf(self, kinds=None) -> CnfInstance:
        """The formula with "some obligation is violated" asserted."""
        clauses = [list(c) for c in self.clauses]
        clauses.append(self.violation_clause(kinds) or [F])
        return CnfInstance(self.num_vars, clauses)

    def maxsat(self) -> PartialMaxSatInstance:
        return PartialMaxSatInstance(CnfInstance(self.num_vars, [list(c) for c in self.clauses]),
                                     self.soft)

    def decode(self, model, name: str) -> int:
        bits = self.bitvectors.get(name) or self.inputs.get(name)
        if bits is None:
            return 0
        return decode_bits(model, bits)


def lit_value(model, lit: int) -> bool:
    v = model[abs(lit)]
    return v if lit > 0 else not v


def decode_bits(model, bits) -> int:
    v = 0
    for i, b in enumerate(bits):
        if lit_value(model, b):
            v |= 1 << i
    if len(bits) > 1 and v >> (len(bits) - 1):
        v -= 1 << len(bits)
    return v


def cone_of_influence(ssa: SsaProgram) -> set:
    """Versioned variables that can affect some check or assumption."""
    need: set = set()
    for s in ssa.stmts:
        if isinstance(s, (SCheck, SAssume)):
            expr_vars(s.cond, need)
            if s.guard:
                need.add(s.guard)
            if isinstance(s, SCheck) and s.blocked:
                need.add(s.blocked)
    for s in reversed(ssa.stmts):
        if isinstance(s, SDef) and s.var in need:
            expr_vars(s.expr, need)
    return need


class Encoder:
    def __init__(self, ssa: SsaProgram, guarded: bool = False,
                 max_vars: int = DEFAULT_MAX_VARS, inputs: dict | None = None,
                 unguarded=()):
        self.ssa = ssa
        self.unguarded = set(unguarded)
        self.guarded = guarded
        self.c = Circuit(max_vars)
        self.vec: dict[str, list[int]] = {}
        self.boolv: dict[str, int] = {}
        self.inputs: dict[str, list[int]] = {}
        self.pinned = inputs or {}
        self.guards: dict[int, int] = {}
        self.obligations: list[Obligation] = []

    # -- expressions --------------------------------------------------------

    def var_vec(self, name):
        if name in self.vec:
            return self.vec[name]
        return self.c.bool_to_vec(self.boolv[name])

    def var_bool(self, name):
        if name in self.boolv:
            return self.boolv[name]
        return self.c.nonzero(self.vec[name])

    def input_vec(self, name):
        bits = self.inputs.get(name)
        if bits is None:
            if name in self.pinned:
                bits = Circuit.const(self.pinned[name])
            else:
                bits = self.c.new_vector()
            self.inputs[name] = bits
        return bits

    def bv(self, e) -> list[int]:
        c = self.c
        if isinstance(e, EConst):
            return Circuit.const(e.value)
        if isinstance(e, EVar):
            return self.var_vec(e.name)
        if isinstance(e, ENondet):
            return self.input_vec(e.name)
        if isinstance(e, EUn):
            if e.op == "-":
                return c.neg(self.bv(e.a))
            if e.op == "~":
                return [-x for x in self.bv(e.a)]
            return c.bool_to_vec(self.bool(e))
        if isinstance(e, EIte):
            return c.mux(self.bool(e.c), self.bv(e.a), self.bv(e.b))
        if isinstance(e, ESel):
            idx = self.bv(e.index)
            out = Circuit.const(0)
            for j, byte in enumerate(e.data):
                v = byte - 256 if byte > 127 else byte
                out = c.mux(c.eq(idx, Circuit.const(j)), Circuit.const(v), out)
            return out
        op = e.op
        if op in _COMPARE or op in ("&&", "||"):
            return c.bool_to_vec(self.bool(e))
        a = self.bv(e.a)
        b = self.bv(e.b)
        if op == "+":
            return c.plus(a, b)
        if op == "-":
            return c.minus(a, b)
        if op == "*":
            return c.times(a, b)
        if op == "/":
            return c.sdivrem(a, b)[0]
        if op == "%":
            return c.sdivrem(a, b)[1]
        if op == "<<":
            return c.shl(a, b)
        if op == ">>":
            return c.ashr(a, b)
        if op == "&":
            return [c.AND(x, y) for x, y in zip(a, b)]
        if op == "|":
            return [c.OR(x, y) for x, y in zip(a, b)]
        if op == "^":
            return [c.XOR(x, y) for x, y in zip(a, b)]
        raise ValueError(op)

    def bool(self, e) -> int:
        c = self.c
        if isinstance(e, EConst):
            return T if e.value else F
        if isinstance(e, EVar):
            return self.var_bool(e.name)
        if isinstance(e, EUn) and e.op == "!":
            return -self.bool(e.a)
        if isinstance(e, EBin):
            op = e.op
            if op == "&&":
                return c.AND(self.bool(e.a), self.bool(e.b))
            if op == "||":
                return c.OR(self.bool(e.a), self.bool(e.b))
            if op in _COMPARE:
                a = self.bv(e.a)
                b = self.bv(e.b)
                if op == "<":
                    return c.slt(a, b)
                if op == ">":
                    return c.slt(b, a)
                if op == "<=":
                    return -c.slt(b, a)
                if op == ">=":
                    return -c.slt(a, b)
                if op == "==":
                    return c.eq(a, b)
                return -c.eq(a, b)
        return c.nonzero(self.bv(e))

    # -- statements ---------------------------------------------------------

    def hard(self, lits):
        lits = [l for l in dict.fromkeys(lits) if l != F]
        if T in lits:
            return
        self.c.clauses.append(lits or [F])

    def healthy(self, sid: int) -> int:
        h = self.guards.get(sid)
        if h is None:
            h = self.c.new_var()
            self.guards[sid] = h
        return h

    def guard_lit(self, g):
        return T if g is None else self.boolv[g]

    def run(self) -> TraceFormula:
        need = cone_of_influence(self.ssa)
        for s in self.ssa.stmts:
            if isinstance(s, SDef):
                if s.var in need:
                    self.define(s)
                elif self._relaxable(s):
                    # dead definition: its guard exists but constrains nothing
                    self.healthy(s.origin)
            elif isinstance(s, SCheck):
                g = self.guard_lit(s.guard)
                ok = self.bool(s.cond)
                blocked = self.var_bool(s.blocked) if s.blocked else F
                if self.guarded:
                    self.hard([-g, ok, blocked])
                else:
                    lit = self.c.AND_many([g, -ok, -blocked])
                    self.obligations.append(Obligation(lit, s.kind, s.origin, s.span))
            elif isinstance(s, SAssume):
                self.hard([-self.guard_lit(s.guard), self.bool(s.cond)])
        bitvectors = dict(self.vec)
        for name, lit in self.boolv.items():
            bitvectors[name] = [lit]
        return TraceFormula(self.c.num_vars, self.c.clauses, bitvectors, dict(self.inputs),
                            self.obligations, dict(self.guards))

    def _relaxable(self, s: SDef) -> bool:
        return self.guarded and s.origin is not None and s.origin not in self.unguarded

    def define(self, s: SDef):
        relax = self._relaxable(s)
        if s.boolean:
            val = self.bool(s.expr)
            if relax:
                h = self.healthy(s.origin)
                v = self.c.new_var()
                self.hard([-h, -v, val])
                self.hard([-h, v, -val])
                val = v
            self.boolv[s.var] = val
        else:
            val = self.bv(s.expr)
            if relax:
                h = self.healthy(s.origin)
                bits = self.c.new_vector()
                for x, y in zip(bits, val):
                    self.hard([-h, -x, y])
                    self.hard([-h, x, -y])
                val = bits
            self.vec[s.var] = val


def encode_cnf(ssa: SsaProgram, max_vars: int = DEFAULT_MAX_VARS) -> TraceFormula:
    """Plain trace formula: SAT via :meth:`TraceFormula.cnf` iff some bounded
    execution satisfying the assumptions violates an obligation."""
    return Encoder(ssa, False, max_vars).run()
