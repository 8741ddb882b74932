"""Concrete interpreter for checked MiniC programs.

Functions are compiled once into Python closures over flat frame slots, so
repeated runs (differential gating, exhaustive input enumeration) stay cheap.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass
from typing import Iterator, Optional

from .lexer import MiniCError
from .nodes import (Assert, Assign, Assume, Binary, Block, Break, Call,
                    CompoundAssign, Cond, Continue, Decl, ExprStmt, For, If,
                    Index, IntLit, MiniCProgram, NONDET_NAMES, Return, Span,
                    StrLit, Unary, Var, While)

INT_MIN = -(1 << 31)
INT_MAX = (1 << 31) - 1
MAX_CALL_DEPTH = 400


def wrap32(x: int) -> int:
    return ((x + 0x80000000) & 0xFFFFFFFF) - 0x80000000


def c_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return wrap32(q if (a < 0) == (b < 0) else -q)


def c_rem(a: int, b: int) -> int:
    r = abs(a) % abs(b)
    return -r if a < 0 else r


@dataclass(frozen=True)
class Limits:
    step_limit: int = 10_000_000
    timeout: float = 5.0


@dataclass(frozen=True)
class ExecutionOutcome:
    status: str                      # Completed | AssertionViolated | AssumeViolated | RuntimeError
    steps: int
    value: Optional[int] = None      # exit value when Completed
    span: Optional[Span] = None
    sid: Optional[int] = None        # failing assert/assume
    kind: Optional[str] = None       # div-by-zero | out-of-bounds | step-limit | timeout | stack-overflow

    @property
    def failed(self) -> bool:
        return self.status != "Completed"

    def describe(self) -> str:
        where = f" at line {self.span.line}" if self.span else ""
        if self.status == "Completed":
            return f"completed with exit value {self.value}"
        if self.status == "RuntimeError":
            return f"runtime error ({self.kind}){where}"
        return f"{self.status}{where}"


class NondetForbidden(MiniCError):
    """nondet_int() reached during concrete interpretation."""


class ExecutionError(Exception):
    """Raised by call_function when execution does not complete normally."""

    def __init__(self, outcome: ExecutionOutcome):
        super().__init__(outcome.describe())
        self.outcome = outcome


class _Stop(Exception):
    def __init__(self, status, span=None, sid=None, kind=None):
        self.status, self.span, self.sid, self.kind = status, span, sid, kind


# statement completion codes
_NORMAL, _BREAK, _CONTINUE, _RETURN = 0, 1, 2, 3


class _State:
    __slots__ = ("steps", "limit", "deadline", "nondet", "depth")

    def __init__(self, limits: Limits, nondet):
        self.steps = 0
        self.limit = limits.step_limit
        self.deadline = time.monotonic() + limits.timeout
        self.nondet = nondet
        self.depth = 0


def _tick(st: _State, span):
    st.steps += 1
    if st.steps > st.limit:
        st.steps = st.limit
        raise _Stop("RuntimeError", span, kind="step-limit")
    if not st.steps & 0xFFF and time.monotonic() > st.deadline:
        raise _Stop("RuntimeError", span, kind="timeout")


class _Function:
    __slots__ = ("name", "nslots", "body", "nparams")


class Interpreter:
    """Compiled form of a checked program; reusable across runs."""

    def __init__(self, program: MiniCProgram):
        if not program.checked:
            raise ValueError("program must be typechecked first")
        self.program = program
        self.funcs: dict[str, _Function] = {}
        for f in program.functions:
            self.funcs[f.name] = _Function()
        for f in program.functions:
            self._compile_function(f)

    # -- compilation ----------------------------------------------------------

    def _compile_function(self, f):
        fn = self.funcs[f.name]
        scopes = [{}]
        counter = [1]  # slot 0 holds the return value

        def declare(name):
            slot = counter[0]
            counter[0] += 1
            scopes[-1][name] = slot
            return slot

        for p in f.params:
            declare(p.name)
        ctx = (scopes, declare)
        body = self._block(f.body, ctx, new_scope=False)
        fn.name = f.name
        fn.nslots = counter[0]
        fn.body = body
        fn.nparams = len(f.params)

    def _slot(self, ctx, name):
        for scope in reversed(ctx[0]):
            if name in scope:
                return scope[name]
        raise KeyError(name)

    def _block(self, b: Block, ctx, new_scope=True):
        if new_scope:
            ctx[0].append({})
        stmts = [self._stmt(s, ctx) for s in b.stmts]
        if new_scope:
            ctx[0].pop()
        stmts = tuple(s for s in stmts if s is not None)

        def run(fr, st):
            for s in stmts:
                code = s(fr, st)
                if code:
                    return code
            return _NORMAL
        return run

    def _stmt(self, s, ctx):
        span = s.span
        if isinstance(s, Block):
            return self._block(s, ctx)
        if isinstance(s, Decl):
            if s.init is None:
                init = None
            else:
                init = self._expr(s.init, ctx)
            slot = ctx[1](s.name)
            if init is None:
                default = b"" if s.ctype == "str" else 0

                def run(fr, st):
                    _tick(st, span)
                    fr[slot] = default
                    return _NORMAL
                return run

            def run(fr, st):
                _tick(st, span)
                fr[slot] = init(fr, st)
                return _NORMAL
            return run
        if isinstance(s, Assign):
            slot = self._slot(ctx, s.name)
            val = self._expr(s.value, ctx)

            def run(fr, st):
                _tick(st, span)
                fr[slot] = val(fr, st)
                return _NORMAL
            return run
        if isinstance(s, CompoundAssign):
            slot = self._slot(ctx, s.name)
            op = _binop(s.op, span)
            val = self._expr(s.value, ctx)

            def run(fr, st):
                _tick(st, span)
                fr[slot] = op(fr[slot], val(fr, st))
                return _NORMAL
            return run
        if isinstance(s, If):
            cond = self._expr(s.cond, ctx)
            then = self._block(s.then, ctx)
            other = self._block(s.other, ctx) if s.other is not None else None

            def run(fr, st):
                _tick(st, span)
                if cond(fr, st):
                    return then(fr, st)
                if other is not None:
                    return other(fr, st)
                return _NORMAL
            return run
        if isinstance(s, While):
            cond = self._expr(s.cond, ctx)
            body = self._block(s.body, ctx)

            def run(fr, st):
                while True:
                    _tick(st, span)
                    if not cond(fr, st):
                        return _NORMAL
                    code = body(fr, st)
                    if code == _BREAK:
                        return _NORMAL
                    if code == _RETURN:
                        return code
            return run
        if isinstance(s, For):
            ctx[0].append({})
            init = self._stmt(s.init, ctx) if s.init is not None else None
            cond = self._expr(s.cond, ctx) if s.cond is not None else None
            update = self._stmt(s.update, ctx) if s.update is not None else None
            body = self._block(s.body, ctx)
            ctx[0].pop()

            def run(fr, st):
                if init is not None:
                    init(fr, st)
                while True:
                    _tick(st, span)
                    if cond is not None and not cond(fr, st):
                        return _NORMAL
                    code = body(fr, st)
                    if code == _BREAK:
                        return _NORMAL
                    if code == _RETURN:
                        return code
                    if update is not None:
                        update(fr, st)
            return run
        if isinstance(s, Break):
            return lambda fr, st: _BREAK
        if isinstance(s, Continue):
            return lambda fr, st: _CONTINUE
        if isinstance(s, Return):
            val = self._expr(s.value, ctx) if s.value is not None else None

            def run(fr, st):
                _tick(st, span)
                if val is not None:
                    fr[0] = val(fr, st)
                return _RETURN
            return run
        if isinstance(s, (Assert, Assume)):
            cond = self._expr(s.cond, ctx)
            status = "AssertionViolated" if isinstance(s, Assert) else "AssumeViolated"
            sid = s.sid

            def run(fr, st):
                _tick(st, span)
                if not cond(fr, st):
                    raise _Stop(status, span, sid)
                return _NORMAL
            return run
        if isinstance(s, ExprStmt):
            e = self._expr(s.expr, ctx)

            def run(fr, st):
                _tick(st, span)
                e(fr, st)
                return _NORMAL
            return run
        raise TypeError(f"unsupported statement {type(s).__name__}")

    def _expr(self, e, ctx):
        span = e.span
        if isinstance(e, IntLit):
            v = wrap32(e.value)
            return lambda fr, st: v
        if isinstance(e, StrLit):
            v = e.value
            return lambda fr, st: v
        if isinstance(e, Var):
            slot = self._slot(ctx, e.name)
            return lambda fr, st: fr[slot]
        if isinstance(e, Index):
            base = self._expr(e.base, ctx)
            idx = self._expr(e.index, ctx)

            def run(fr, st):
                b = base(fr, st)
                i = idx(fr, st)
                if i < 0 or i > len(b):
                    raise _Stop("RuntimeError", span, kind="out-of-bounds")
                if i == len(b):
                    return 0
                c = b[i]
                return c - 256 if c > 127 else c
            return run
        if isinstance(e, Unary):
            a = self._expr(e.operand, ctx)
            if e.op == "-":
                return lambda fr, st: wrap32(-a(fr, st))
            if e.op == "!":
                return lambda fr, st: 0 if a(fr, st) else 1
            return lambda fr, st: ~a(fr, st)
        if isinstance(e, Binary):
            a = self._expr(e.left, ctx)
            b = self._expr(e.right, ctx)
            if e.op == "&&":
                return lambda fr, st: 1 if a(fr, st) and b(fr, st) else 0
            if e.op == "||":
                return lambda fr, st: 1 if a(fr, st) or b(fr, st) else 0
            op = _binop(e.op, span)
            return lambda fr, st: op(a(fr, st), b(fr, st))
        if isinstance(e, Cond):
            c = self._expr(e.cond, ctx)
            t = self._expr(e.then, ctx)
            o = self._expr(e.other, ctx)
            return lambda fr, st: t(fr, st) if c(fr, st) else o(fr, st)
        if isinstance(e, Call):
            args = tuple(self._expr(a, ctx) for a in e.args)
            if e.name in self.funcs:
                fn = self.funcs[e.name]
                call = self._call

                def run(fr, st):
                    return call(fn, [a(fr, st) for a in args], st, span)
                return run
            return _intrinsic(e.name, args, span)
        raise TypeError(f"unsupported expression {type(e).__name__}")

    # -- execution ------------------------------------------------------------

    def _call(self, fn: _Function, argv, st: _State, span=None):
        if st.depth >= MAX_CALL_DEPTH:
            raise _Stop("RuntimeError", span, kind="stack-overflow")
        fr = [0] * fn.nslots
        fr[1:1 + len(argv)] = argv
        st.depth += 1
        try:
            fn.body(fr, st)
        finally:
            st.depth -= 1
        return fr[0]

    def _run(self, name, argv, limits, nondet):
        st = _State(limits, nondet)
        old = sys.getrecursionlimit()
        if old < 20000:
            sys.setrecursionlimit(20000)
        try:
            value = self._call(self.funcs[name], list(argv), st)
        except _Stop as stop:
            return ExecutionOutcome(stop.status, st.steps, None, stop.span, stop.sid, stop.kind)
        finally:
            if old < 20000:
                sys.setrecursionlimit(old)
        return ExecutionOutcome("Completed", st.steps, value)

    def run_main(self, limits: Limits = Limits(), nondet: Iterator[int] | None = None) -> ExecutionOutcome:
        return self._run("main", (), limits, nondet)

    def call(self, name: str, args, limits: Limits = Limits(),
             nondet: Iterator[int] | None = None) -> int:
        fn = self.program.function(name)
        if len(args) != len(fn.params):
            raise TypeError(f"{name} expects {len(fn.params)} arguments")
        argv = []
        for p, a in zip(fn.params, args):
            if p.ctype == "str":
                argv.append(a.encode() if isinstance(a, str) else bytes(a))
            else:
                argv.append(wrap32(int(a)))
        out = self._run(name, argv, limits, nondet)
        if out.status != "Completed":
            raise ExecutionError(out)
        return out.value


def _binop(op: str, span):
    if op == "+":
        return lambda a, b: wrap32(a + b)
    if op == "-":
        return lambda a, b: wrap32(a - b)
    if op == "*":
        return lambda a, b: wrap32(a * b)
    if op in ("/", "%"):
        f = c_div if op == "/" else c_rem

        def div(a, b):
            if b == 0:
                raise _Stop("RuntimeError", span, kind="div-by-zero")
            return f(a, b)
        return div
    if op == "<<":
        return lambda a, b: wrap32(a << (b & 31))
    if op == ">>":
        return lambda a, b: a >> (b & 31)
    if op == "&":
        return lambda a, b: a & b
    if op == "|":
        return lambda a, b: a | b
    if op == "^":
        return lambda a, b: a ^ b
    if op == "<":
        return lambda a, b: 1 if a < b else 0
    if op == "<=":
        return lambda a, b: 1 if a <= b else 0
    if op == ">":
        return lambda a, b: 1 if a > b else 0
    if op == ">=":
        return lambda a, b: 1 if a >= b else 0
    if op == "==":
        return lambda a, b: 1 if a == b else 0
    if op == "!=":
        return lambda a, b: 1 if a != b else 0
    raise ValueError(op)


def _intrinsic(name, args, span):
    if name in NONDET_NAMES:
        def run(fr, st):
            if st.nondet is None:
                raise NondetForbidden(span, "nondet_int() is not allowed in concrete interpretation")
            try:
                return wrap32(next(st.nondet))
            except StopIteration:
                raise NondetForbidden(span, "ran out of nondet input values") from None
        return run
    if name == "abs":
        (a,) = args
        return lambda fr, st: wrap32(abs(a(fr, st)))
    if name in ("min", "max"):
        a, b = args
        pick = min if name == "min" else max
        return lambda fr, st: pick(a(fr, st), b(fr, st))
    if name == "printf":
        def run(fr, st):
            for a in args:
                a(fr, st)
            return 0
        return run
    raise TypeError(f"unknown intrinsic {name}")


def interpret_main(program: MiniCProgram, limits: Limits = Limits(),
                   nondet: Iterator[int] | None = None) -> ExecutionOutcome:
    """Run ``main`` of a checked program."""
    return Interpreter(program).run_main(limits, nondet)


def call_function(program: MiniCProgram, name: str, args, limits: Limits = Limits()) -> int:
    """Call ``name`` with concrete arguments and return its int result."""
    return Interpreter(program).call(name, args, limits)
