"""Aggregate pipeline reports into localisation and verification tables."""

from __future__ import annotations

import csv
import io
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .report import (COMPILATION, CORRECT, FIXED, GAVE_UP, NO_DIAGNOSIS, OTHER,
                     OUTCOME_CLASSES, VERIFIED, PipelineReport)

COLUMNS = (CORRECT, OTHER, FIXED, COMPILATION)
HEADERS = {
    CORRECT: "% Correct Bug Localised",
    OTHER: "% Other Bugs Localised",
    FIXED: "% Transpiled Fixed Code",
    COMPILATION: "% Compilation Errors",
}
REMAINDER = (VERIFIED, NO_DIAGNOSIS, GAVE_UP)
KIND_TITLES = {"WBO": "Wrong Binary Operator (WBO)",
               "ADC": "Assignment Duplication with Constant (ADC)"}


class EmptyGroup(ValueError):
    """No reports to aggregate."""


def pct(count: int, total: int) -> float:
    return round(100.0 * count / total, 1) if total else 0.0


def fmt_pct(value: float) -> str:
    return f"{value:.1f}%"


@dataclass
class GroupMetrics:
    benchmark: str
    mutation: str | None
    model: str
    description: bool
    n: int
    counts: dict = field(default_factory=dict)

    def count(self, cls: str) -> int:
        return self.counts.get(cls, 0)

    def percentages(self, fold_give_ups: bool = False) -> dict:
        out = {c: pct(self.count(c), self.n) for c in COLUMNS}
        if fold_give_ups:
            out[COMPILATION] = pct(self.count(COMPILATION) + self.count(GAVE_UP), self.n)
        return out


@dataclass
class MetricsTable:
    groups: list

    def localisation(self) -> list:
        return [g for g in self.groups if g.mutation]

    def verification(self) -> list:
        return [g for g in self.groups if not g.mutation]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["benchmark", "mutation", "model", "description", "n"]
                   + [f"pct_{c}" for c in COLUMNS] + ["pct_CompilationErrorIncludingGaveUp"]
                   + ["pct_Verified"] + [f"count_{c}" for c in OUTCOME_CLASSES])
        for g in self.groups:
            p = g.percentages()
            w.writerow([g.benchmark, g.mutation or "", g.model, int(g.description), g.n]
                       + [f"{p[c]:.1f}" for c in COLUMNS]
                       + [f"{g.percentages(True)[COMPILATION]:.1f}"]
                       + [f"{pct(g.count(VERIFIED), g.n):.1f}"]
                       + [g.count(c) for c in OUTCOME_CLASSES])
        return buf.getvalue()

    def render(self, fold_give_ups: bool = False) -> str:
        """Text tables: verification rates, then one localisation table per
        benchmark and description setting with a WBO block and an ADC block."""
        out = []
        ver = self.verification()
        if ver:
            out.append("Verification success rates")
            out.append(_table(["Model", "Benchmark", "Description", "n", "% Verified"],
                              [[g.model, g.benchmark, "yes" if g.description else "no", str(g.n),
                                fmt_pct(pct(g.count(VERIFIED), g.n))] for g in ver]))
            out.append("")
        blocks = defaultdict(list)
        for g in self.localisation():
            blocks[(g.benchmark, g.description)].append(g)
        for (bench, desc), gs in sorted(blocks.items()):
            title = f"Fault localisation on {bench or 'benchmark'}"
            if not desc:
                title += " (no natural language description)"
            if fold_give_ups:
                title += " [give-ups folded into compilation errors]"
            out.append(title)
            for kind in sorted({g.mutation for g in gs}, key=lambda k: (k != "WBO", k)):
                rows = [g for g in gs if g.mutation == kind]
                out.append(f"Bug: {KIND_TITLES.get(kind, kind)}")
                body = []
                for g in sorted(rows, key=lambda g: g.model):
                    p = g.percentages(fold_give_ups)
                    body.append([g.model] + [fmt_pct(p[c]) for c in COLUMNS])
                out.append(_table(["LLMs"] + [HEADERS[c] for c in COLUMNS], body))
                out.append(_footer(rows, fold_give_ups))
            out.append("")
        return "\n".join(out).rstrip() + "\n"


def _table(header, rows) -> str:
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    def line(r):
        cells = [str(c).ljust(w) if i == 0 else str(c).rjust(w) for i, (c, w) in
                 enumerate(zip(r, widths))]
        return " | ".join(cells)
    sep = "-+-".join("-" * w for w in widths)
    return "\n".join([line(header), sep] + [line(r) for r in rows])


def _footer(rows, folded: bool) -> str:
    parts = []
    for g in sorted(rows, key=lambda g: g.model):
        rest = [c for c in REMAINDER if not (folded and c == GAVE_UP)]
        counts = ", ".join(f"{c} {g.count(c)}" for c in rest)
        parts.append(f"  {g.model}: n={g.n}; not in columns: {counts}")
    return "\n".join(parts)


def group_key(r: PipelineReport):
    return (r.benchmark, r.mutation, r.model, bool(r.description))


def compute_metrics(reports) -> MetricsTable:
    reports = list(reports)
    if not reports:
        raise EmptyGroup("no reports to aggregate")
    grouped = defaultdict(list)
    for r in reports:
        grouped[group_key(r)].append(r)
    groups = []
    for key in sorted(grouped, key=lambda k: (k[0], k[1] or "", k[2], not k[3])):
        rs = grouped[key]
        counts = Counter(r.outcome for r in rs)
        groups.append(GroupMetrics(key[0], key[1], key[2], key[3], len(rs), dict(counts)))
    return MetricsTable(groups)
