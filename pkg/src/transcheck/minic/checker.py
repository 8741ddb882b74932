"""Static checks for MiniC and statement numbering.

Statement ids are assigned in source order to every declaration with an
initialiser, assignment, compound assignment, return, assert and assume, and
to the condition of every if/while/for (plus for-loop init/update clauses).
"""

from __future__ import annotations

import dataclasses
import re

from .lexer import MiniCError
from .nodes import (Assert, Assign, Assume, Binary, Block, Break, Call,
                    CompoundAssign, Cond, Continue, Decl, ExprStmt, For,
                    FunctionDef, If, Index, IntLit, INTRINSICS, MiniCProgram,
                    NONDET_NAMES, Return, StmtInfo, StrLit, Unary, Var, While)


class MiniCTypeError(MiniCError):
    pass


class UndefinedSymbol(MiniCTypeError):
    def __init__(self, span, name: str, what: str = "identifier"):
        super().__init__(span, f"undefined {what} '{name}'")
        self.name = name


_RESERVED = {"assert", "assume", "__CPROVER_assume", "__VERIFIER_assume",
             "nondet_int", "__VERIFIER_nondet_int", "main"}


def statement_text(source: str, span) -> str:
    """Source text of a statement with internal whitespace collapsed."""
    return re.sub(r"\s+", " ", source[span.start:span.end]).strip()


class _Checker:
    def __init__(self, program: MiniCProgram):
        self.program = program
        self.functions = {f.name: f for f in program.functions}
        self.infos: list[StmtInfo] = []
        self.fn: FunctionDef | None = None
        self.scopes: list[dict[str, str]] = []
        self.loop_depth = 0

    # -- helpers ------------------------------------------------------------

    def new_sid(self, span, kind: str) -> int:
        sid = len(self.infos) + 1
        text = statement_text(self.program.source, span)
        self.infos.append(StmtInfo(sid, span, text, kind, self.fn.name))
        return sid

    def lookup(self, name: str, span) -> str:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        raise UndefinedSymbol(span, name)

    def declare(self, name: str, ctype: str, span):
        scope = self.scopes[-1]
        if name in scope:
            raise MiniCTypeError(span, f"redeclaration of '{name}'")
        scope[name] = ctype

    def signature(self, name: str, span):
        fn = self.functions.get(name)
        if fn is not None:
            return tuple(p.ctype for p in fn.params), fn.ret
        if name in INTRINSICS:
            return INTRINSICS[name]
        raise UndefinedSymbol(span, name, "function")

    # -- program ------------------------------------------------------------

    def check(self) -> MiniCProgram:
        prog = self.program
        mains = [f for f in prog.functions if f.name == "main"]
        if not mains:
            raise MiniCTypeError(None, "program has no function 'main'")
        if mains[0].params:
            raise MiniCTypeError(mains[0].span, "'main' must take no parameters")
        if mains[0].ret != "int":
            raise MiniCTypeError(mains[0].span, "'main' must return int")
        for f in prog.functions:
            if f.name in _RESERVED - {"main"}:
                raise MiniCTypeError(f.span, f"cannot redefine intrinsic '{f.name}'")
        out = []
        for f in prog.functions:
            out.append(self.check_function(f))
        return dataclasses.replace(prog, functions=tuple(out),
                                   statements=tuple(self.infos), checked=True)

    def check_function(self, f: FunctionDef) -> FunctionDef:
        self.fn = f
        seen = set()
        for p in f.params:
            if p.name in seen:
                raise MiniCTypeError(f.span, f"duplicate parameter '{p.name}'")
            seen.add(p.name)
        self.scopes = [{p.name: p.ctype for p in f.params}]
        body = self.block(f.body, new_scope=False)
        if f.ret == "int" and f.name != "main" and not _always_returns(body):
            raise MiniCTypeError(f.span, f"control reaches end of non-void function '{f.name}'")
        return dataclasses.replace(f, body=body)

    # -- statements ---------------------------------------------------------

    def block(self, b: Block, new_scope: bool = True) -> Block:
        if new_scope:
            self.scopes.append({})
        stmts = tuple(self.stmt(s) for s in b.stmts)
        if new_scope:
            self.scopes.pop()
        return dataclasses.replace(b, stmts=stmts)

    def stmt(self, s):
        if isinstance(s, Block):
            return self.block(s)
        if isinstance(s, Decl):
            sid = None
            if s.init is not None:
                sid = self.new_sid(s.span, "decl")
                t = self.expr(s.init)
                if s.ctype == "str" and not isinstance(s.init, (StrLit, Var)):
                    raise MiniCTypeError(s.init.span, "string variables must be bound to a string")
                if t != s.ctype:
                    raise MiniCTypeError(s.init.span, f"cannot initialise {s.ctype} '{s.name}' with {t}")
            self.declare(s.name, s.ctype, s.span)
            return dataclasses.replace(s, sid=sid)
        if isinstance(s, (Assign, CompoundAssign)):
            kind = "assign" if isinstance(s, Assign) else "compound"
            sid = self.new_sid(s.span, kind)
            if self.lookup(s.name, s.span) != "int":
                raise MiniCTypeError(s.span, f"cannot assign to read-only string '{s.name}'")
            self.int_expr(s.value)
            return dataclasses.replace(s, sid=sid)
        if isinstance(s, If):
            sid = self.new_sid(s.span, "cond")
            self.int_expr(s.cond)
            then = self.block(s.then)
            other = self.block(s.other) if s.other is not None else None
            return dataclasses.replace(s, then=then, other=other, sid=sid)
        if isinstance(s, While):
            sid = self.new_sid(s.span, "cond")
            self.int_expr(s.cond)
            self.loop_depth += 1
            body = self.block(s.body)
            self.loop_depth -= 1
            return dataclasses.replace(s, body=body, sid=sid)
        if isinstance(s, For):
            self.scopes.append({})
            init = self.stmt(s.init) if s.init is not None else None
            sid = None
            if s.cond is not None:
                sid = self.new_sid(s.span, "cond")
                self.int_expr(s.cond)
            update = self.stmt(s.update) if s.update is not None else None
            self.loop_depth += 1
            body = self.block(s.body)
            self.loop_depth -= 1
            self.scopes.pop()
            return dataclasses.replace(s, init=init, update=update, body=body, sid=sid)
        if isinstance(s, (Break, Continue)):
            if not self.loop_depth:
                word = "break" if isinstance(s, Break) else "continue"
                raise MiniCTypeError(s.span, f"'{word}' outside a loop")
            return s
        if isinstance(s, Return):
            sid = self.new_sid(s.span, "return")
            if self.fn.ret == "void":
                if s.value is not None:
                    raise MiniCTypeError(s.span, "void function returns a value")
            else:
                if s.value is None:
                    raise MiniCTypeError(s.span, "non-void function returns no value")
                self.int_expr(s.value)
            return dataclasses.replace(s, sid=sid)
        if isinstance(s, (Assert, Assume)):
            sid = self.new_sid(s.span, "assert" if isinstance(s, Assert) else "assume")
            self.int_expr(s.cond)
            return dataclasses.replace(s, sid=sid)
        if isinstance(s, ExprStmt):
            self.expr(s.expr, allow_void=True)
            return s
        raise MiniCTypeError(getattr(s, "span", None), f"unsupported statement {type(s).__name__}")

    # -- expressions --------------------------------------------------------

    def int_expr(self, e):
        t = self.expr(e)
        if t != "int":
            raise MiniCTypeError(e.span, f"expected int expression, found {t}")

    def expr(self, e, allow_void: bool = False) -> str:
        if isinstance(e, IntLit):
            return "int"
        if isinstance(e, StrLit):
            return "str"
        if isinstance(e, Var):
            return self.lookup(e.name, e.span)
        if isinstance(e, Index):
            if self.expr(e.base) != "str":
                raise MiniCTypeError(e.span, "indexing a non-string value")
            self.int_expr(e.index)
            return "int"
        if isinstance(e, Unary):
            self.int_expr(e.operand)
            return "int"
        if isinstance(e, Binary):
            self.int_expr(e.left)
            self.int_expr(e.right)
            return "int"
        if isinstance(e, Cond):
            self.int_expr(e.cond)
            self.int_expr(e.then)
            self.int_expr(e.other)
            return "int"
        if isinstance(e, Call):
            params, ret = self.signature(e.name, e.span)
            if params is None:
                for a in e.args:
                    self.expr(a)
            else:
                if len(params) != len(e.args):
                    raise MiniCTypeError(e.span, f"'{e.name}' expects {len(params)} "
                                         f"argument(s), got {len(e.args)}")
                for want, a in zip(params, e.args):
                    got = self.expr(a)
                    if got != want:
                        raise MiniCTypeError(a.span, f"argument of '{e.name}' should be {want}, not {got}")
            if ret == "void" and not allow_void:
                raise MiniCTypeError(e.span, f"void value of '{e.name}' used in an expression")
            return ret
        raise MiniCTypeError(getattr(e, "span", None), f"unsupported expression {type(e).__name__}")


def _is_true_const(e) -> bool:
    return isinstance(e, IntLit) and e.value != 0


def _has_break(b) -> bool:
    """Whether a break targets the loop whose body is ``b``."""
    for s in b.stmts:
        if isinstance(s, Break):
            return True
        if isinstance(s, Block) and _has_break(s):
            return True
        if isinstance(s, If) and (_has_break(s.then) or (s.other is not None and _has_break(s.other))):
            return True
    return False


def _always_returns(s) -> bool:
    if isinstance(s, Return):
        return True
    if isinstance(s, Block):
        return any(_always_returns(x) for x in s.stmts)
    if isinstance(s, If):
        return s.other is not None and _always_returns(s.then) and _always_returns(s.other)
    if isinstance(s, While):
        return _is_true_const(s.cond) and not _has_break(s.body)
    if isinstance(s, For):
        return (s.cond is None or _is_true_const(s.cond)) and not _has_break(s.body)
    return False


def typecheck(program: MiniCProgram) -> MiniCProgram:
    """Validate ``program`` and number its statements; returns a new program."""
    return _Checker(program).check()
