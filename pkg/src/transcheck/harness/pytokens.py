"""Logical-line view of Python source on top of the stdlib tokenizer."""

from __future__ import annotations

import io
import tokenize
from dataclasses import dataclass

_SKIP = {tokenize.NL, tokenize.COMMENT, tokenize.INDENT, tokenize.DEDENT,
         tokenize.NEWLINE, tokenize.ENDMARKER, tokenize.ENCODING}


class LexError(ValueError):
    """Source that the Python tokenizer rejects."""


@dataclass
class LogicalLine:
    tokens: list            # significant TokenInfo objects, comments excluded
    indent: int             # column of the first token

    @property
    def first(self):
        return self.tokens[0]

    @property
    def start_line(self) -> int:
        return self.tokens[0].start[0]

    @property
    def end_line(self) -> int:
        return self.tokens[-1].end[0]

    @property
    def is_assert(self) -> bool:
        t = self.tokens[0]
        return t.type == tokenize.NAME and t.string == "assert"


def logical_lines(source: str) -> list[LogicalLine]:
    out = []
    cur: list = []
    try:
        for tok in tokenize.generate_tokens(io.StringIO(source).readline):
            if tok.type == tokenize.NEWLINE or tok.type == tokenize.ENDMARKER:
                if cur:
                    out.append(LogicalLine(cur, cur[0].start[1]))
                cur = []
            elif tok.type == tokenize.ERRORTOKEN and not tok.string.isspace():
                raise LexError(f"line {tok.start[0]}: unexpected character {tok.string!r}")
            elif tok.type not in _SKIP and tok.type != tokenize.ERRORTOKEN:
                cur.append(tok)
    except (tokenize.TokenError, IndentationError, SyntaxError) as e:
        raise LexError(str(e)) from e
    if cur:
        out.append(LogicalLine(cur, cur[0].start[1]))
    return out


def split_assertions(source: str) -> tuple[str, str]:
    """Separate module-level assert statements from the rest of the program.

    Returns (code, assertions); both without trailing newlines.
    """
    lines = source.splitlines()
    drop = set()
    asserts = []
    for ll in logical_lines(source):
        if ll.is_assert and ll.indent == 0:
            rows = range(ll.start_line, ll.end_line + 1)
            drop.update(rows)
            asserts.append("\n".join(lines[r - 1] for r in rows))
    code = "\n".join(l for i, l in enumerate(lines, 1) if i not in drop)
    return code.rstrip(), "\n".join(asserts)
