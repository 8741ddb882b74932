"""Fault injection for Python programs.

WBO flips a comparison operator through a fixed table; ADC duplicates a
simple assignment on the next line and adds ``+ 1`` to the copy. Lines that
start with ``assert`` are never touched.
"""

from __future__ import annotations

import keyword
import random
import tokenize
from dataclasses import asdict, dataclass

from .pytokens import logical_lines

WBO = "WBO"
ADC = "ADC"

SWAP = {"==": "!=", "!=": "==", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}


class NoSite(Exception):
    """No eligible mutation site."""


@dataclass(frozen=True)
class Site:
    kind: str
    line: int
    col: int
    text: str             # the operator (WBO) or the assignment statement (ADC)
    on_assert: bool = False


@dataclass
class MutantRecord:
    kind: str
    line: int             # 1-based line of the changed (WBO) or inserted (ADC) line
    original: str         # WBO: line before mutation; ADC: the duplicated line
    mutated: str
    seed: int
    site: int             # index into the eligible sites

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "MutantRecord":
        return cls(d["kind"], int(d["line"]), d["original"], d["mutated"],
                   int(d.get("seed", 0)), int(d.get("site", 0)))

    def apply(self, source: str) -> str:
        """Reproduce the mutant from the original source."""
        lines = source.splitlines(keepends=True)
        if self.kind == WBO:
            body, eol = _split_eol(lines[self.line - 1])
            if body != self.original:
                raise ValueError(f"line {self.line} does not match the record")
            lines[self.line - 1] = self.mutated + eol
        elif self.kind == ADC:
            body, eol = _split_eol(lines[self.line - 2])
            if body != self.original:
                raise ValueError(f"line {self.line - 1} does not match the record")
            if not eol:
                lines[self.line - 2] = body + "\n"
            lines.insert(self.line - 1, self.mutated + eol)
        else:
            raise ValueError(f"unknown mutation kind {self.kind!r}")
        return "".join(lines)


def _split_eol(line: str) -> tuple[str, str]:
    body = line.rstrip("\r\n")
    return body, line[len(body):]


def _simple_assignment(ll) -> bool:
    toks = ll.tokens
    if len(toks) < 3:
        return False
    t0, t1 = toks[0], toks[1]
    if t0.type != tokenize.NAME or keyword.iskeyword(t0.string):
        return False
    if t1.type != tokenize.OP or t1.string != "=":
        return False
    if ll.start_line != ll.end_line:
        return False
    depth = 0
    for t in toks[2:]:
        if t.type != tokenize.OP:
            continue
        if t.string in "([{":
            depth += 1
        elif t.string in ")]}":
            depth -= 1
        elif depth == 0 and t.string in ("=", ";", ":="):
            return False
    return True


def scan_mutation_sites(source: str, kind: str) -> list[Site]:
    """All candidate sites of ``kind`` ordered by (line, column); assert-line
    sites are included but flagged."""
    lines = source.splitlines()
    out = []
    for ll in logical_lines(source):
        on_assert = ll.is_assert
        if kind == WBO:
            for t in ll.tokens:
                if t.type == tokenize.OP and t.string in SWAP:
                    out.append(Site(WBO, t.start[0], t.start[1], t.string, on_assert))
        elif kind == ADC:
            if _simple_assignment(ll):
                row = ll.start_line
                text = lines[row - 1][ll.indent:ll.tokens[-1].end[1]]
                out.append(Site(ADC, row, ll.indent, text, on_assert))
        else:
            raise ValueError(f"unknown mutation kind {kind!r}")
    out.sort(key=lambda s: (s.line, s.col))
    return out


def eligible_sites(source: str, kind: str) -> list[Site]:
    return [s for s in scan_mutation_sites(source, kind) if not s.on_assert]


def _pick(sites, seed, index):
    if not sites:
        raise NoSite("no eligible mutation site")
    if index is None:
        index = random.Random(seed).randrange(len(sites))
    if not 0 <= index < len(sites):
        raise NoSite(f"site index {index} out of range ({len(sites)} sites)")
    return index, sites[index]


def mutate_wbo(source: str, seed: int = 0, index: int | None = None) -> tuple[str, MutantRecord]:
    idx, site = _pick(eligible_sites(source, WBO), seed, index)
    lines = source.splitlines(keepends=True)
    body, eol = _split_eol(lines[site.line - 1])
    mutated = body[:site.col] + SWAP[site.text] + body[site.col + len(site.text):]
    rec = MutantRecord(WBO, site.line, body, mutated, seed, idx)
    return rec.apply(source), rec


def mutate_adc(source: str, seed: int = 0, index: int | None = None) -> tuple[str, MutantRecord]:
    idx, site = _pick(eligible_sites(source, ADC), seed, index)
    lines = source.splitlines(keepends=True)
    body, _ = _split_eol(lines[site.line - 1])
    mutated = body[:site.col] + site.text + " + 1"
    rec = MutantRecord(ADC, site.line + 1, body, mutated, seed, idx)
    return rec.apply(source), rec


def mutate(source: str, kind: str, seed: int = 0, index: int | None = None):
    if kind == WBO:
        return mutate_wbo(source, seed, index)
    if kind == ADC:
        return mutate_adc(source, seed, index)
    raise ValueError(f"unknown mutation kind {kind!r}")
