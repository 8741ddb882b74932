"""Small shared helpers."""

from __future__ import annotations

import contextlib
import sys


@contextlib.contextmanager
def deep_recursion(limit: int = 20000):
    """Temporarily raise the interpreter recursion limit.

    Unrolled loops nest one conditional per iteration, so the recursive
    passes over them go deeper than CPython's default allows.
    """
    old = sys.getrecursionlimit()
    if old < limit:
        sys.setrecursionlimit(limit)
    try:
        yield
    finally:
        if old < limit:
            sys.setrecursionlimit(old)
