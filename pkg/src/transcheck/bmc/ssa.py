"""Guarded static single assignment form of an unrolled program."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..minic.nodes import Span
from ..util import deep_recursion
from .ir import (EBin, EConst, EIte, ENondet, ESel, EUn, EVar, UAssign,
                 UAssume, UCheck, UIf, eval_expr)
from .unroll import UNWOUND, UnrolledProgram


@dataclass
class SDef:
    var: str                       # versioned name, defined exactly once
    expr: object
    origin: Optional[int] = None
    kind: str = "assign"           # ... plus cond, guard, merge
    guard: Optional[str] = None    # path guard variable; None means true

    @property
    def boolean(self) -> bool:
        return self.kind in ("cond", "guard")


@dataclass
class SCheck:
    cond: object
    guard: Optional[str]
    kind: str
    origin: Optional[int] = None
    span: Optional[Span] = None
    blocked: Optional[str] = None  # version of the unwound flag at this point


@dataclass
class SAssume:
    cond: object
    guard: Optional[str]
    kind: str = "assume"
    origin: Optional[int] = None
    span: Optional[Span] = None


@dataclass
class SsaProgram:
    stmts: list
    inputs: list = field(default_factory=list)
    final: dict = field(default_factory=dict)  # base name -> last version

    def definitions(self) -> dict:
        return {s.var: s for s in self.stmts if isinstance(s, SDef)}


class _Builder:
    def __init__(self):
        self.versions: dict[str, int] = {}
        self.cur: dict[str, str] = {}
        self.out: list = []
        self.ncond = 0

    def fresh(self, base: str) -> str:
        n = self.versions.get(base, 0) + 1
        self.versions[base] = n
        name = f"{base}@{n}"
        self.cur[base] = name
        return name

    def rename(self, e):
        if isinstance(e, EVar):
            return EVar(self.cur[e.name])
        if isinstance(e, (EConst, ENondet)):
            return e
        if isinstance(e, EUn):
            return EUn(e.op, self.rename(e.a))
        if isinstance(e, EBin):
            return EBin(e.op, self.rename(e.a), self.rename(e.b))
        if isinstance(e, EIte):
            return EIte(self.rename(e.c), self.rename(e.a), self.rename(e.b))
        if isinstance(e, ESel):
            return ESel(e.data, self.rename(e.index))
        raise TypeError(type(e).__name__)

    def guard_def(self, expr, parent):
        self.ncond += 1
        name = self.fresh(f"g~{self.ncond}")
        self.out.append(SDef(name, expr, None, "guard", parent))
        return name

    def run(self, stmts, guard):
        for s in stmts:
            if isinstance(s, UAssign):
                e = self.rename(s.expr)
                self.out.append(SDef(self.fresh(s.target), e, s.origin, s.kind, guard))
            elif isinstance(s, UCheck):
                self.out.append(SCheck(self.rename(s.cond), guard, s.kind, s.origin,
                                       s.span, self.cur.get(UNWOUND)))
            elif isinstance(s, UAssume):
                self.out.append(SAssume(self.rename(s.cond), guard, s.kind, s.origin, s.span))
            elif isinstance(s, UIf):
                self.branch(s, guard)
            else:
                raise TypeError(type(s).__name__)

    def branch(self, s: UIf, guard):
        c = self.rename(s.cond)
        if isinstance(c, EConst) and s.origin is None:
            self.run(s.then if c.value else s.other, guard)
            return
        self.ncond += 1
        cv = self.fresh(f"c~{self.ncond}")
        self.out.append(SDef(cv, c, s.origin, "cond", guard))
        before = dict(self.cur)
        if guard is None:
            g_then = cv
        else:
            g_then = self.guard_def(EBin("&&", EVar(guard), EVar(cv)), guard)
        self.run(s.then, g_then)
        after_then = self.cur
        self.cur = dict(before)
        if s.other:
            neg = EUn("!", EVar(cv))
            g_else = self.guard_def(neg if guard is None else EBin("&&", EVar(guard), neg), guard)
            self.run(s.other, g_else)
        after_else = self.cur
        for base in sorted(set(after_then) | set(after_else)):
            a = after_then.get(base)
            b = after_else.get(base)
            if a == b or a is None or b is None:
                # unchanged, or local to one branch and out of scope here
                continue
            m = self.fresh(base)
            self.out.append(SDef(m, EIte(EVar(cv), EVar(a), EVar(b)), None, "merge", guard))


def to_ssa(u: UnrolledProgram) -> SsaProgram:
    """Single-assignment form; join points get if-then-else merge definitions."""
    b = _Builder()
    with deep_recursion():
        b.run(u.body, None)
    return SsaProgram(b.out, list(u.nondets), dict(b.cur))


@dataclass
class SsaRun:
    env: dict
    violation: Optional[SCheck]
    blocked: Optional[SAssume]
    path: list          # origin StatementIds on the executed path


def execute_ssa(ssa: SsaProgram, inputs: dict | None = None) -> SsaRun:
    """Evaluate every definition and report the first effective violation."""
    env: dict = {}

    def on(guard):
        return guard is None or env[guard]

    path = []
    for s in ssa.stmts:
        if isinstance(s, SDef):
            v = eval_expr(s.expr, env, inputs)
            env[s.var] = (1 if v else 0) if s.boolean else v
            if s.origin is not None and on(s.guard):
                path.append(s.origin)
        elif isinstance(s, SCheck):
            if on(s.guard) and not (s.blocked and env[s.blocked]):
                if s.origin is not None:
                    path.append(s.origin)
                if not eval_expr(s.cond, env, inputs):
                    return SsaRun(env, s, None, path)
        elif isinstance(s, SAssume):
            if on(s.guard) and not eval_expr(s.cond, env, inputs):
                return SsaRun(env, None, s, path)
    return SsaRun(env, None, None, path)
