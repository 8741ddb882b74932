"""Pull fenced code blocks out of model responses."""

from __future__ import annotations

import re

_FENCE = re.compile(r"^[ \t]*```[ \t]*([A-Za-z0-9_+#.-]*)[ \t]*$", re.MULTILINE)


class NoCodeBlock(ValueError):
    """The response has no usable fenced code block."""


def code_blocks(response: str) -> list[tuple[str, str]]:
    """(label, body) for every fenced block; an unterminated last block runs
    to the end of the response."""
    out = []
    pos = 0
    while True:
        m = _FENCE.search(response, pos)
        if m is None:
            break
        label = m.group(1).lower()
        start = m.end() + 1
        close = re.compile(r"^[ \t]*```[ \t]*$", re.MULTILINE).search(response, start)
        if close is None:
            out.append((label, response[start:]))
            break
        out.append((label, response[start:close.start()]))
        pos = close.end()
    return out


def extract_code(response: str, lang: str) -> str:
    """First block labelled ``lang``, else the first unlabelled block."""
    blocks = code_blocks(response)
    for label, body in blocks:
        if label == lang:
            return body
    for label, body in blocks:
        if not label:
            return body
    raise NoCodeBlock(f"no ```{lang} block in response")


def extract_c_code(response: str) -> str:
    return extract_code(response, "c")


def extract_python_code(response: str) -> str:
    """Python block of a back-mapping answer.

    The mapping prompt ends with an opening python fence, so a reply that
    starts directly with code and only closes the fence is accepted too.
    """
    blocks = code_blocks(response)
    for label, body in blocks:
        if label == "python":
            return body
    head, sep, _ = response.partition("```")
    if sep and head.strip() and (not blocks or not blocks[0][0]):
        return head
    return extract_code(response, "python")
