"""Loop-free intermediate form shared by unrolling, SSA and encoding.

Expressions are pure; calls, short-circuit operators with side conditions and
nondet reads are hoisted into preceding statements during unrolling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..minic.interpreter import c_div, c_rem, wrap32
from ..minic.nodes import Span


class CapacityError(Exception):
    """The unrolled program or its formula exceeds a configured ceiling."""


# -- expressions --------------------------------------------------------------

@dataclass(frozen=True)
class EConst:
    value: int


@dataclass(frozen=True)
class EVar:
    name: str


@dataclass(frozen=True)
class ENondet:
    name: str


@dataclass(frozen=True)
class EUn:
    op: str          # - ! ~
    a: object


@dataclass(frozen=True)
class EBin:
    op: str
    a: object
    b: object


@dataclass(frozen=True)
class EIte:
    c: object
    a: object
    b: object


@dataclass(frozen=True)
class ESel:
    """Byte ``index`` of a constant string (terminating zero included)."""
    data: bytes
    index: object


TRUE = EConst(1)
FALSE = EConst(0)


def expr_vars(e, out: set | None = None) -> set:
    if out is None:
        out = set()
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, EVar):
            out.add(x.name)
        elif isinstance(x, EUn):
            stack.append(x.a)
        elif isinstance(x, EBin):
            stack.append(x.a)
            stack.append(x.b)
        elif isinstance(x, EIte):
            stack.extend((x.c, x.a, x.b))
        elif isinstance(x, ESel):
            stack.append(x.index)
    return out


def format_ir(e) -> str:
    if isinstance(e, EConst):
        return str(e.value)
    if isinstance(e, EVar):
        return e.name
    if isinstance(e, ENondet):
        return f"nondet<{e.name}>"
    if isinstance(e, EUn):
        return f"{e.op}{format_ir(e.a)}"
    if isinstance(e, EBin):
        return f"({format_ir(e.a)} {e.op} {format_ir(e.b)})"
    if isinstance(e, EIte):
        return f"({format_ir(e.c)} ? {format_ir(e.a)} : {format_ir(e.b)})"
    if isinstance(e, ESel):
        return f"{e.data!r}[{format_ir(e.index)}]"
    raise TypeError(type(e).__name__)


def eval_expr(e, env: dict, inputs: dict | None = None) -> int:
    """Concrete value of ``e`` under the MiniC integer semantics.

    Division by zero and out-of-range selects evaluate to 0 here; the
    matching obligations are separate statements.
    """
    if isinstance(e, EConst):
        return e.value
    if isinstance(e, EVar):
        return env[e.name]
    if isinstance(e, ENondet):
        return wrap32((inputs or {}).get(e.name, 0))
    if isinstance(e, EUn):
        a = eval_expr(e.a, env, inputs)
        if e.op == "-":
            return wrap32(-a)
        if e.op == "!":
            return 0 if a else 1
        return ~a
    if isinstance(e, EIte):
        if eval_expr(e.c, env, inputs):
            return eval_expr(e.a, env, inputs)
        return eval_expr(e.b, env, inputs)
    if isinstance(e, ESel):
        i = eval_expr(e.index, env, inputs)
        if 0 <= i < len(e.data):
            c = e.data[i]
            return c - 256 if c > 127 else c
        return 0
    op = e.op
    a = eval_expr(e.a, env, inputs)
    if op == "&&":
        return 1 if a and eval_expr(e.b, env, inputs) else 0
    if op == "||":
        return 1 if a or eval_expr(e.b, env, inputs) else 0
    b = eval_expr(e.b, env, inputs)
    if op == "+":
        return wrap32(a + b)
    if op == "-":
        return wrap32(a - b)
    if op == "*":
        return wrap32(a * b)
    if op == "/":
        return c_div(a, b) if b else 0
    if op == "%":
        return c_rem(a, b) if b else 0
    if op == "<<":
        return wrap32(a << (b & 31))
    if op == ">>":
        return a >> (b & 31)
    if op == "&":
        return a & b
    if op == "|":
        return a | b
    if op == "^":
        return a ^ b
    if op == "<":
        return int(a < b)
    if op == "<=":
        return int(a <= b)
    if op == ">":
        return int(a > b)
    if op == ">=":
        return int(a >= b)
    if op == "==":
        return int(a == b)
    if op == "!=":
        return int(a != b)
    raise ValueError(op)


# -- statements ---------------------------------------------------------------

@dataclass
class UAssign:
    target: str
    expr: object
    origin: Optional[int] = None   # StatementId, None for plumbing
    kind: str = "assign"           # assign, decl, compound, return, param, flag, temp


@dataclass
class UIf:
    cond: object
    then: list = field(default_factory=list)
    other: list = field(default_factory=list)
    origin: Optional[int] = None


@dataclass
class UCheck:
    """Obligation: ``cond`` must hold whenever control reaches here."""
    cond: object
    kind: str                      # assert, div, bounds, unwind
    origin: Optional[int] = None
    span: Optional[Span] = None


@dataclass
class UAssume:
    cond: object
    kind: str = "assume"           # assume or unwind
    origin: Optional[int] = None
    span: Optional[Span] = None
