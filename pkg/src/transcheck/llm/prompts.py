"""Prompt templates for transpilation, retries and back-mapping.

The typeset templates wrap long lines with a trailing space; those soft
breaks are joined here, hard breaks are kept.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

TRANSPILE_HEADER = (
    "Transpile Python to C Code With Assertion: "
    "You are an exceptionally intelligent coding "
    "assistant who consistently produces accurate "
    "and reliable <C code> by transpiling the given "
    "<Python code> into semantically equivalent "
    "<C code>. <NL_Description> gives a natural "
    "language description of the python code. "
    "Do not forget to  also transpile the given "
    "Python assertion  into a C assertion!"
)
DESCRIPTION_BOX = "<NL_Description>\n{description}"
PYTHON_BOX = "<Python Code>\n```python\n{python_code}\n{assertion}\n```"
C_BOX = "<C Code>\n```c"

RETRY_TEMPLATE = "Your previous code translation was INCORRECT!\nReason: {reason}\nTry again.\n{prompt}"

BACKMAP_HEADER = (
    "Map C program statements back to the original python "
    "program:\n"
    "We have detected that both the Python and C programs "
    "are buggy. We have localised the following faulty "
    "statements in the C program:\n"
    "{statements}"
)
BACKMAP_FOOTER = (
    "Provide us only with the corresponding Python "
    "statements from the original program that "
    "correspond to these buggy statements.\n"
    "```python"
)

BOX_SEPARATOR = "\n\n"


class MissingField(ValueError):
    """A placeholder has no value."""


@dataclass(frozen=True)
class PromptKind:
    kind: str                         # Transpile | Retry | Backmap
    reason: Optional[str] = None
    statements: tuple = field(default_factory=tuple)

    @classmethod
    def transpile(cls):
        return cls("Transpile")

    @classmethod
    def retry(cls, reason: str):
        return cls("Retry", reason=reason)

    @classmethod
    def backmap(cls, statements):
        return cls("Backmap", statements=tuple(statements))


def render_transpile(python_code: str, assertion: str, description: str | None = None,
                     include_description: bool = True) -> str:
    if not python_code.strip():
        raise MissingField("python_code")
    if not assertion.strip():
        raise MissingField("assertion")
    boxes = [TRANSPILE_HEADER]
    if include_description:
        if description is None or not description.strip():
            raise MissingField("description")
        boxes.append(DESCRIPTION_BOX.format(description=description))
    boxes.append(PYTHON_BOX.format(python_code=python_code, assertion=assertion))
    boxes.append(C_BOX)
    return BOX_SEPARATOR.join(boxes)


def render_retry(reason: str, transpile_prompt: str) -> str:
    if not reason:
        raise MissingField("reason")
    return RETRY_TEMPLATE.format(reason=reason, prompt=transpile_prompt)


def render_backmap(statements) -> str:
    statements = [s for s in statements if s.strip()]
    if not statements:
        raise MissingField("list of faulty C statements")
    return BOX_SEPARATOR.join([BACKMAP_HEADER.format(statements="\n".join(statements)),
                               BACKMAP_FOOTER])


def render_prompt(kind: PromptKind, problem, include_description: bool = True) -> str:
    """Render ``kind`` for ``problem`` (a PythonProblem)."""
    if kind.kind == "Backmap":
        return render_backmap(kind.statements)
    code, assertion = problem.split()
    base = render_transpile(code, assertion, problem.description, include_description)
    if kind.kind == "Transpile":
        return base
    if kind.kind == "Retry":
        return render_retry(kind.reason, base)
    raise ValueError(f"unknown prompt kind {kind.kind!r}")
