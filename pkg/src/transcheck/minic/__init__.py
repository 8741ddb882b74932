"""MiniC: the bounded C subset accepted by the verifier and interpreter."""

from .checker import MiniCTypeError, UndefinedSymbol, statement_text, typecheck
from .interpreter import (ExecutionError, ExecutionOutcome, Interpreter, Limits,
                          NondetForbidden, call_function, interpret_main)
from .lexer import LexError, MiniCError, Token, tokenize_minic
from .nodes import MiniCProgram, Span, StmtInfo
from .parser import ParseError, parse_minic
from .printer import pretty_print


def load_program(source: str) -> MiniCProgram:
    """Parse and typecheck in one step."""
    return typecheck(parse_minic(source))


__all__ = [
    "ExecutionError", "ExecutionOutcome", "Interpreter", "LexError", "Limits",
    "MiniCError", "MiniCProgram", "MiniCTypeError", "NondetForbidden",
    "ParseError", "Span", "StmtInfo", "Token", "UndefinedSymbol",
    "call_function", "interpret_main", "load_program", "parse_minic",
    "pretty_print", "statement_text", "tokenize_minic", "typecheck",
]
