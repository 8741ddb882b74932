"""Abstract syntax for MiniC.

Every node carries a :class:`Span`; spans and statement ids are excluded from
equality so that structurally identical programs compare equal regardless of
layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Span:
    line: int      # 1-based
    col: int       # 1-based
    start: int     # character offsets into the source
    end: int


def _span():
    return field(compare=False, repr=False)


def _sid():
    return field(default=None, compare=False)


# -- expressions ------------------------------------------------------------

@dataclass(frozen=True)
class IntLit:
    span: Span = _span()
    value: int = 0
    is_char: bool = field(default=False, compare=False)


@dataclass(frozen=True)
class StrLit:
    span: Span = _span()
    value: bytes = b""


@dataclass(frozen=True)
class Var:
    span: Span = _span()
    name: str = ""


@dataclass(frozen=True)
class Index:
    span: Span = _span()
    base: "Expr" = None
    index: "Expr" = None


@dataclass(frozen=True)
class Unary:
    span: Span = _span()
    op: str = "-"
    operand: "Expr" = None


@dataclass(frozen=True)
class Binary:
    span: Span = _span()
    op: str = "+"
    left: "Expr" = None
    right: "Expr" = None


@dataclass(frozen=True)
class Cond:
    span: Span = _span()
    cond: "Expr" = None
    then: "Expr" = None
    other: "Expr" = None


@dataclass(frozen=True)
class Call:
    span: Span = _span()
    name: str = ""
    args: tuple = ()


Expr = Union[IntLit, StrLit, Var, Index, Unary, Binary, Cond, Call]


# -- statements -------------------------------------------------------------

@dataclass(frozen=True)
class Block:
    span: Span = _span()
    stmts: tuple = ()


@dataclass(frozen=True)
class Decl:
    span: Span = _span()
    ctype: str = "int"          # "int" or "str"
    name: str = ""
    init: Optional[Expr] = None
    sid: Optional[int] = _sid()


@dataclass(frozen=True)
class Assign:
    span: Span = _span()
    name: str = ""
    value: Expr = None
    sid: Optional[int] = _sid()


@dataclass(frozen=True)
class CompoundAssign:
    span: Span = _span()
    op: str = "+"               # arithmetic operator without '='
    name: str = ""
    value: Expr = None
    sid: Optional[int] = _sid()


@dataclass(frozen=True)
class If:
    span: Span = _span()        # covers the header "if (...)"
    cond: Expr = None
    then: Block = None
    other: Optional[Block] = None
    sid: Optional[int] = _sid()


@dataclass(frozen=True)
class While:
    span: Span = _span()
    cond: Expr = None
    body: Block = None
    sid: Optional[int] = _sid()


@dataclass(frozen=True)
class For:
    span: Span = _span()
    init: Optional["Stmt"] = None
    cond: Optional[Expr] = None
    update: Optional["Stmt"] = None
    body: Block = None
    sid: Optional[int] = _sid()  # the condition; None when cond is absent


@dataclass(frozen=True)
class Break:
    span: Span = _span()


@dataclass(frozen=True)
class Continue:
    span: Span = _span()


@dataclass(frozen=True)
class Return:
    span: Span = _span()
    value: Optional[Expr] = None
    sid: Optional[int] = _sid()


@dataclass(frozen=True)
class ExprStmt:
    span: Span = _span()
    expr: Expr = None


@dataclass(frozen=True)
class Assert:
    span: Span = _span()
    cond: Expr = None
    sid: Optional[int] = _sid()


@dataclass(frozen=True)
class Assume:
    span: Span = _span()
    cond: Expr = None
    sid: Optional[int] = _sid()


Stmt = Union[Block, Decl, Assign, CompoundAssign, If, While, For, Break,
             Continue, Return, ExprStmt, Assert, Assume]


@dataclass(frozen=True)
class Param:
    name: str
    ctype: str  # "int" or "str"


@dataclass(frozen=True)
class FunctionDef:
    span: Span = _span()
    name: str = ""
    params: tuple = ()
    ret: str = "int"            # "int" or "void"
    body: Block = None


@dataclass(frozen=True)
class StmtInfo:
    sid: int
    span: Span
    text: str
    kind: str       # decl, assign, compound, return, assert, assume, cond
    function: str


@dataclass(frozen=True)
class MiniCProgram:
    functions: tuple = ()
    source: str = field(default="", compare=False, repr=False)
    statements: tuple = field(default=(), compare=False, repr=False)
    checked: bool = field(default=False, compare=False)

    @property
    def entry(self) -> str:
        return "main"

    def function(self, name: str) -> FunctionDef:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)

    def statement(self, sid: int) -> StmtInfo:
        return self.statements[sid - 1]


# whitelisted intrinsics: name -> (parameter types or None for any, return type)
INTRINSICS = {
    "assert": (("int",), "void"),
    "assume": (("int",), "void"),
    "__CPROVER_assume": (("int",), "void"),
    "__VERIFIER_assume": (("int",), "void"),
    "nondet_int": ((), "int"),
    "__VERIFIER_nondet_int": ((), "int"),
    "abs": (("int",), "int"),
    "min": (("int", "int"), "int"),
    "max": (("int", "int"), "int"),
    "printf": (None, "int"),
}

ASSUME_NAMES = {"assume", "__CPROVER_assume", "__VERIFIER_assume"}
NONDET_NAMES = {"nondet_int", "__VERIFIER_nondet_int"}
