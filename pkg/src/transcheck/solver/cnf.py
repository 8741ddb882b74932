"""CNF and partial MaxSAT instances, DIMACS interchange, and solve_cnf."""

from __future__ import annotations

import os
import subprocess
import tempfile
from dataclasses import dataclass, field

from .cdcl import ResourceLimit, Solver


class FormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


@dataclass
class CnfInstance:
    num_vars: int
    clauses: list[list[int]] = field(default_factory=list)

    def __post_init__(self):
        for i, c in enumerate(self.clauses):
            if not c:
                raise ValueError(f"clause {i} is empty")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(
                        f"literal {lit} out of range [-{self.num_vars}, {self.num_vars}]")


@dataclass
class PartialMaxSatInstance:
    hard: CnfInstance
    soft: list[tuple[list[int], int]] = field(default_factory=list)

    def __post_init__(self):
        for clause, w in self.soft:
            if w < 1:
                raise ValueError(f"soft weight {w} < 1")
            if not clause:
                raise ValueError("empty soft clause")
            for lit in clause:
                if lit == 0 or abs(lit) > self.hard.num_vars:
                    raise ValueError(f"soft literal {lit} out of range")

    @property
    def top(self) -> int:
        return 1 + sum(w for _, w in self.soft)


@dataclass
class Sat:
    model: list[bool]  # index 0 unused

    def value(self, lit: int) -> bool:
        v = self.model[abs(lit)]
        return v if lit > 0 else not v


@dataclass
class Unsat:
    core: list[int]


def solve_cnf(instance: CnfInstance, assumptions=(), conflict_budget=None,
              external: str | None = None) -> Sat | Unsat:
    """Solve ``instance`` under ``assumptions``.

    ``external`` names a DIMACS solver command; it is run on a temporary file
    with the assumptions added as unit clauses (the core is then all of them).
    Raises ResourceLimit when ``conflict_budget`` is exhausted.
    """
    if external:
        return _solve_external(instance, list(assumptions), external)
    s = Solver(instance.num_vars)
    for c in instance.clauses:
        s.add_clause(c)
    if s.solve(assumptions, conflict_budget=conflict_budget):
        return Sat(s.model)
    return Unsat(s.core)


def _solve_external(instance: CnfInstance, assumptions, cmd: str) -> Sat | Unsat:
    inst = CnfInstance(instance.num_vars,
                       list(instance.clauses) + [[a] for a in assumptions])
    with tempfile.NamedTemporaryFile("w", suffix=".cnf", delete=False) as fh:
        fh.write(serialize_dimacs(inst))
        path = fh.name
    try:
        proc = subprocess.run(cmd.split() + [path], capture_output=True, text=True)
    finally:
        os.unlink(path)
    status = None
    lits = []
    for line in proc.stdout.splitlines():
        if line.startswith("s "):
            status = line[2:].strip()
        elif line.startswith("v "):
            lits.extend(int(t) for t in line[2:].split())
    if status == "SATISFIABLE":
        model = [False] * (instance.num_vars + 1)
        for lit in lits:
            if lit > 0 and lit <= instance.num_vars:
                model[lit] = True
        return Sat(model)
    if status == "UNSATISFIABLE":
        return Unsat(list(assumptions))
    raise ResourceLimit(f"external solver gave no verdict: {status!r}")


def format_model(model: list[bool]) -> str:
    """Model echo line ``v <lit> ... 0``."""
    lits = [str(v if model[v] else -v) for v in range(1, len(model))]
    return "v " + " ".join(lits + ["0"])


# -- DIMACS ---------------------------------------------------------------

def serialize_dimacs(instance: CnfInstance | PartialMaxSatInstance) -> str:
    if isinstance(instance, PartialMaxSatInstance):
        top = instance.top
        hard = instance.hard.clauses
        n = len(hard) + len(instance.soft)
        out = [f"p wcnf {instance.hard.num_vars} {n} {top}\n"]
        for c in hard:
            out.append(f"{top} " + " ".join(map(str, c)) + " 0\n")
        for c, w in instance.soft:
            out.append(f"{w} " + " ".join(map(str, c)) + " 0\n")
        return "".join(out)
    out = [f"p cnf {instance.num_vars} {len(instance.clauses)}\n"]
    for c in instance.clauses:
        out.append(" ".join(map(str, c)) + " 0\n")
    return "".join(out)


def parse_dimacs(text: str) -> CnfInstance | PartialMaxSatInstance:
    header = None
    tokens: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise FormatError(lineno, "duplicate problem line")
            parts = line.split()
            if len(parts) < 4 or parts[1] not in ("cnf", "wcnf"):
                raise FormatError(lineno, f"bad problem line {line!r}")
            try:
                nums = [int(x) for x in parts[2:]]
            except ValueError:
                raise FormatError(lineno, f"bad problem line {line!r}") from None
            if parts[1] == "cnf" and len(nums) != 2:
                raise FormatError(lineno, "expected 'p cnf V C'")
            if parts[1] == "wcnf" and len(nums) != 3:
                raise FormatError(lineno, "expected 'p wcnf V C TOP'")
            header = (parts[1], nums, lineno)
            continue
        if header is None:
            raise FormatError(lineno, "clause before problem line")
        for tok in line.split():
            try:
                tokens.append((int(tok), lineno))
            except ValueError:
                raise FormatError(lineno, f"bad literal {tok!r}") from None
    if header is None:
        raise FormatError(0, "missing problem line")
    kind, nums, hline = header
    nvars = nums[0]
    clauses: list[tuple[int, list[int]]] = []
    cur: list[int] = []
    cur_line = hline
    weighted = kind == "wcnf"
    expect_weight = weighted
    weight = 0
    for val, lineno in tokens:
        if expect_weight:
            if val < 1:
                raise FormatError(lineno, f"bad weight {val}")
            weight = val
            expect_weight = False
            cur_line = lineno
            continue
        if val == 0:
            if not cur:
                raise FormatError(lineno, "empty clause")
            clauses.append((weight, cur))
            cur = []
            expect_weight = weighted
            continue
        if abs(val) > nvars:
            raise FormatError(lineno, f"literal {val} out of range for {nvars} variables")
        cur.append(val)
        cur_line = lineno
    if cur or (weighted and not expect_weight):
        raise FormatError(cur_line, "unterminated clause")
    if len(clauses) != nums[1]:
        raise FormatError(hline, f"header declares {nums[1]} clauses, found {len(clauses)}")
    if not weighted:
        return CnfInstance(nvars, [c for _, c in clauses])
    top = nums[2]
    hard = [c for w, c in clauses if w >= top]
    soft = [(c, w) for w, c in clauses if w < top]
    return PartialMaxSatInstance(CnfInstance(nvars, hard), soft)
