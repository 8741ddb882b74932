"""Tokenizer for MiniC source text."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .nodes import Span


class MiniCError(Exception):
    """Base class for diagnostics carrying a source position."""

    def __init__(self, span: Span | None, message: str):
        super().__init__(message)
        self.span = span
        self.message = message

    def diagnostic(self, filename: str = "<input>") -> str:
        if self.span is None:
            return f"{filename}: {self.message}"
        return f"{filename}:{self.span.line}:{self.span.col}: {self.message}"

    def __str__(self):
        return self.diagnostic()


class LexError(MiniCError):
    pass


KEYWORDS = {
    "int", "void", "char", "const", "if", "else", "while", "for", "break",
    "continue", "return",
    # recognised so they can be rejected with a clear message
    "struct", "union", "goto", "long", "short", "unsigned", "signed", "float",
    "double", "sizeof", "typedef", "enum", "static", "do", "switch", "case",
    "default", "extern", "volatile", "bool", "_Bool",
}

OPERATORS = sorted("""
<<= >>= ++ -- += -= *= /= %= &= |= ^= << >> <= >= == != && || ->
+ - * / % < > = ! ~ & | ^ ? : ; , ( ) { } [ ] .
""".split(), key=len, reverse=True)

_ESCAPES = {"n": 10, "t": 9, "r": 13, "0": 0, "\\": 92, "'": 39, '"': 34,
            "a": 7, "b": 8, "f": 12, "v": 11, "?": 63}

_INT_RE = re.compile(r"0[xX][0-9a-fA-F]+|[0-9]+")
_ID_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Token:
    kind: str  # pp, kw, id, int, char, str, op, eof
    text: str
    span: Span
    value: object = None

    def __repr__(self):
        return f"{self.kind}({self.text})"


def tokenize_minic(source: str) -> list[Token]:
    """Split ``source`` into tokens; whitespace and comments are dropped.

    ``#`` lines become a single ``pp`` token. Raises LexError on illegal
    characters and unterminated literals or comments.
    """
    toks: list[Token] = []
    i = 0
    n = len(source)
    line = 1
    line_start = 0

    def span(start, end):
        return Span(line, start - line_start + 1, start, end)

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            line_start = i
            continue
        if ch in " \t\r\f\v":
            i += 1
            continue
        if source.startswith("//", i):
            j = source.find("\n", i)
            i = n if j < 0 else j
            continue
        if source.startswith("/*", i):
            j = source.find("*/", i + 2)
            if j < 0:
                raise LexError(span(i, n), "unterminated comment")
            for k in range(i, j):
                if source[k] == "\n":
                    line += 1
                    line_start = k + 1
            i = j + 2
            continue
        if ch == "#":
            # only at the start of a line (ignoring indentation)
            if source[line_start:i].strip():
                raise LexError(span(i, i + 1), "stray '#'")
            j = source.find("\n", i)
            j = n if j < 0 else j
            toks.append(Token("pp", source[i:j].rstrip(), span(i, j)))
            i = j
            continue
        if ch == '"' or ch == "'":
            start = i
            i += 1
            data = bytearray()
            while True:
                if i >= n or source[i] == "\n":
                    raise LexError(span(start, i), "unterminated %s literal"
                                   % ("string" if ch == '"' else "character"))
                c = source[i]
                if c == ch:
                    i += 1
                    break
                if c == "\\":
                    if i + 1 >= n:
                        raise LexError(span(start, i), "unterminated escape")
                    e = source[i + 1]
                    if e in "01234567":
                        m = re.match(r"[0-7]{1,3}", source[i + 1:])
                        data.append(int(m.group(), 8) & 0xFF)
                        i += 1 + len(m.group())
                    elif e == "x":
                        m = re.match(r"[0-9a-fA-F]+", source[i + 2:])
                        if not m:
                            raise LexError(span(i, i + 2), "bad hex escape")
                        data.append(int(m.group(), 16) & 0xFF)
                        i += 2 + len(m.group())
                    elif e in _ESCAPES:
                        data.append(_ESCAPES[e])
                        i += 2
                    else:
                        raise LexError(span(i, i + 2), f"unknown escape '\\{e}'")
                    continue
                data.extend(c.encode("utf-8"))
                i += 1
            text = source[start:i]
            if ch == "'":
                if len(data) != 1:
                    raise LexError(span(start, i), "character literal must hold one byte")
                v = data[0]
                toks.append(Token("char", text, span(start, i), v - 256 if v > 127 else v))
            else:
                toks.append(Token("str", text, span(start, i), bytes(data)))
            continue
        if ch.isdigit():
            m = _INT_RE.match(source, i)
            end = m.end()
            # reject suffixes and floats
            if end < n and (source[end].isalnum() or source[end] in "._"):
                raise LexError(span(i, end + 1), "unsupported numeric literal")
            text = m.group()
            if text[:2] in ("0x", "0X"):
                value = int(text, 16)
            elif len(text) > 1 and text[0] == "0":
                if not set(text) <= set("01234567"):
                    raise LexError(span(i, end), f"bad octal literal {text}")
                value = int(text, 8)
            else:
                value = int(text)
            toks.append(Token("int", text, span(i, end), value))
            i = end
            continue
        if ch.isalpha() or ch == "_":
            m = _ID_RE.match(source, i)
            word = m.group()
            kind = "kw" if word in KEYWORDS else "id"
            toks.append(Token(kind, word, span(i, m.end())))
            i = m.end()
            continue
        for op in OPERATORS:
            if source.startswith(op, i):
                toks.append(Token("op", op, span(i, i + len(op))))
                i += len(op)
                break
        else:
            raise LexError(span(i, i + 1), f"illegal character {ch!r}")
    return toks
