"""Pretty-printer producing MiniC source that reparses to an equal AST."""

from __future__ import annotations

from .nodes import (Assert, Assign, Assume, Binary, Block, Break, Call,
                    CompoundAssign, Cond, Continue, Decl, ExprStmt, For, If,
                    Index, IntLit, MiniCProgram, Return, StrLit, Unary, Var,
                    While)
from .parser import _BINARY_PREC

_SIMPLE_ESCAPES = {10: "\\n", 9: "\\t", 13: "\\r", 92: "\\\\", 34: '\\"', 39: "\\'"}


def _quote(data: bytes, q: str) -> str:
    out = []
    for b in data:
        if b in _SIMPLE_ESCAPES and (b != 39 or q == "'") and (b != 34 or q == '"'):
            out.append(_SIMPLE_ESCAPES[b])
        elif 32 <= b < 127:
            out.append(chr(b))
        else:
            out.append("\\%03o" % b)
    return q + "".join(out) + q


def format_expr(e, prec: int = 0) -> str:
    """Render ``e``; parenthesise when its precedence is below ``prec``."""
    if isinstance(e, IntLit):
        if e.is_char:
            return _quote(bytes([e.value & 0xFF]), "'")
        text = str(e.value)
        return f"({text})" if e.value < 0 and prec > 10 else text
    if isinstance(e, StrLit):
        return _quote(e.value, '"')
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Index):
        return f"{format_expr(e.base, 12)}[{format_expr(e.index)}]"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, Unary):
        inner = format_expr(e.operand, 12)
        if inner.startswith("-"):
            inner = f"({inner})"
        return f"{e.op}{inner}"
    if isinstance(e, Binary):
        p = _BINARY_PREC[e.op]
        text = f"{format_expr(e.left, p)} {e.op} {format_expr(e.right, p + 1)}"
        return f"({text})" if p < prec else text
    if isinstance(e, Cond):
        text = f"{format_expr(e.cond, 1)} ? {format_expr(e.then)} : {format_expr(e.other)}"
        return f"({text})" if prec > 0 else text
    raise TypeError(type(e).__name__)


def _simple(s) -> str:
    """Statement text without the trailing semicolon."""
    if isinstance(s, Decl):
        if s.ctype == "str":
            head = f"const char *{s.name}"
        else:
            head = f"int {s.name}"
        return head if s.init is None else f"{head} = {format_expr(s.init)}"
    if isinstance(s, Assign):
        return f"{s.name} = {format_expr(s.value)}"
    if isinstance(s, CompoundAssign):
        return f"{s.name} {s.op}= {format_expr(s.value)}"
    if isinstance(s, ExprStmt):
        return format_expr(s.expr)
    if isinstance(s, Assert):
        return f"assert({format_expr(s.cond)})"
    if isinstance(s, Assume):
        return f"assume({format_expr(s.cond)})"
    if isinstance(s, Return):
        return "return" if s.value is None else f"return {format_expr(s.value)}"
    if isinstance(s, Break):
        return "break"
    if isinstance(s, Continue):
        return "continue"
    raise TypeError(type(s).__name__)


def _stmt(s, lines: list[str], depth: int):
    pad = "    " * depth
    if isinstance(s, Block):
        lines.append(pad + "{")
        for x in s.stmts:
            _stmt(x, lines, depth + 1)
        lines.append(pad + "}")
    elif isinstance(s, If):
        lines.append(f"{pad}if ({format_expr(s.cond)}) {{")
        _body(s.then, lines, depth)
        if s.other is not None:
            lines.append(pad + "} else {")
            _body(s.other, lines, depth)
        lines.append(pad + "}")
    elif isinstance(s, While):
        lines.append(f"{pad}while ({format_expr(s.cond)}) {{")
        _body(s.body, lines, depth)
        lines.append(pad + "}")
    elif isinstance(s, For):
        init = _simple(s.init) if s.init is not None else ""
        cond = format_expr(s.cond) if s.cond is not None else ""
        update = _simple(s.update) if s.update is not None else ""
        lines.append(f"{pad}for ({init}; {cond}; {update}) {{")
        _body(s.body, lines, depth)
        lines.append(pad + "}")
    else:
        lines.append(pad + _simple(s) + ";")


def _body(b: Block, lines, depth):
    for x in b.stmts:
        _stmt(x, lines, depth + 1)


def pretty_print(program: MiniCProgram) -> str:
    lines: list[str] = []
    for i, f in enumerate(program.functions):
        if i:
            lines.append("")
        params = ", ".join(
            (f"const char *{p.name}" if p.ctype == "str" else f"int {p.name}")
            for p in f.params) or "void"
        lines.append(f"{f.ret} {f.name}({params}) {{")
        _body(f.body, lines, 0)
        lines.append("}")
    return "\n".join(lines) + "\n"
