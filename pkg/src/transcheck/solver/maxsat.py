"""Partial MaxSAT by selector relaxation and linear cost descent.

Each soft clause gets a relaxation literal ``r`` (for a unit soft ``(l)`` this
is just ``-l``). The weighted sum of relaxation literals is encoded with a
generalized totalizer whose outputs say "sum >= s"; bounding the cost is then
a matter of assuming the relevant outputs false.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cdcl import ResourceLimit, Solver
from .cnf import CnfInstance, PartialMaxSatInstance


class HardUnsat(Exception):
    """The hard clauses alone are unsatisfiable."""


@dataclass
class OptResult:
    status: str  # "Optimal" or "HardUnsat"
    model: list[bool] | None = None
    cost: int | None = None


class _Totalizer:
    def __init__(self, solver: Solver, inputs: list[tuple[int, int]], cap: int):
        self.solver = solver
        self.cap = cap
        self.outputs = self._build(inputs)

    def _build(self, items):
        if len(items) == 1:
            lit, w = items[0]
            return {min(w, self.cap + 1): lit}
        mid = len(items) // 2
        left = self._build(items[:mid])
        right = self._build(items[mid:])
        out: dict[int, int] = {}
        s = self.solver

        def node(total):
            total = min(total, self.cap + 1)
            if total not in out:
                out[total] = s.new_var()
            return out[total]

        for a, la in left.items():
            s.add_clause([-la, node(a)])
        for b, lb in right.items():
            s.add_clause([-lb, node(b)])
        for a, la in left.items():
            for b, lb in right.items():
                s.add_clause([-la, -lb, node(a + b)])
        return out

    def at_most(self, bound: int) -> list[int]:
        """Assumptions forcing the weighted sum to be <= bound."""
        return [-lit for s, lit in self.outputs.items() if s > bound]


class MaxSatSolver:
    """Incremental partial MaxSAT context (one per task, not thread-shared)."""

    def __init__(self, instance: PartialMaxSatInstance, conflict_budget=None):
        self.instance = instance
        self.budget = conflict_budget
        self.sat = Solver(instance.hard.num_vars)
        for c in instance.hard.clauses:
            self.sat.add_clause(c)
        self.relax: list[tuple[int, int]] = []
        for clause, w in instance.soft:
            if len(clause) == 1:
                r = -clause[0]
            else:
                r = self.sat.new_var()
                self.sat.add_clause(list(clause) + [r])
            self.sat.set_phase(-r)
            self.relax.append((r, w))
        self.totalizer: _Totalizer | None = None
        self.cost: int | None = None
        self.model: list[bool] | None = None

    def _solve(self, assumptions=()) -> bool:
        return self.sat.solve(assumptions, conflict_budget=self.budget)

    def soft_cost(self, model: list[bool]) -> int:
        total = 0
        for clause, w in self.instance.soft:
            if not any(model[abs(l)] == (l > 0) for l in clause):
                total += w
        return total

    def relaxed_cost(self, model: list[bool]) -> int:
        return sum(w for r, w in self.relax
                   if model[abs(r)] == (r > 0))

    def optimize(self) -> OptResult:
        if not self.relax:
            if not self._solve():
                return OptResult("HardUnsat")
            self.model, self.cost = self.sat.model, 0
            return OptResult("Optimal", self.model, 0)
        if self._solve([-r for r, _ in self.relax]):
            self.model, self.cost = self.sat.model, 0
            return OptResult("Optimal", self.model, 0)
        if not self.sat.core:
            return OptResult("HardUnsat")
        if not self._solve():
            return OptResult("HardUnsat")
        best = self.sat.model
        ub = self.soft_cost(best)
        self.totalizer = _Totalizer(self.sat, list(self.relax), ub)
        while ub > 0:
            if not self._solve(self.totalizer.at_most(ub - 1)):
                break
            best = self.sat.model
            ub = self.soft_cost(best)
        self.model, self.cost = best, ub
        return OptResult("Optimal", best, ub)

    def add_hard(self, clause) -> None:
        self.sat.add_clause(clause)

    def solve_at_most(self, bound: int) -> list[bool] | None:
        """A model whose relaxed weight is <= bound, or None."""
        if bound == 0:
            assumps = [-r for r, _ in self.relax]
        else:
            if self.totalizer is None:
                self.totalizer = _Totalizer(self.sat, list(self.relax), bound)
            if bound > self.totalizer.cap:
                raise ValueError("bound above totalizer cap")
            assumps = self.totalizer.at_most(bound)
        if self._solve(assumps):
            return self.sat.model
        return None


def solve_partial_maxsat(instance: PartialMaxSatInstance,
                         conflict_budget=None) -> OptResult:
    """Minimum-weight assignment satisfying every hard clause.

    Returns ``OptResult("HardUnsat")`` when the hard part is unsatisfiable;
    raises ResourceLimit when the conflict budget is exhausted.
    """
    ctx = MaxSatSolver(instance, conflict_budget)
    return ctx.optimize()


__all__ = ["HardUnsat", "MaxSatSolver", "OptResult", "ResourceLimit",
           "solve_partial_maxsat", "CnfInstance", "PartialMaxSatInstance"]
