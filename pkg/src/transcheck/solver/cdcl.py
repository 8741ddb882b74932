"""Conflict-driven clause-learning SAT solver with assumptions and unsat cores.

Literals are signed DIMACS integers at the interface. Internally a literal
``v`` is coded as ``2*v`` and ``-v`` as ``2*v + 1`` so that negation is
``code ^ 1`` and per-literal value lookups are plain list indexing.
"""

from __future__ import annotations

import heapq


class ResourceLimit(Exception):
    """The conflict budget ran out before a verdict was reached."""


_TRUE = 1
_FALSE = -1


def _luby(i: int) -> int:
    # i is 1-based
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        if i >= (1 << (k - 1)):
            i -= (1 << (k - 1)) - 1
            k = 1
            while (1 << k) - 1 < i:
                k += 1
        else:
            k -= 1


class Solver:
    """Incremental CDCL solver.

    Typical use::

        s = Solver()
        s.add_clause([1, 2])
        s.add_clause([-1])
        if s.solve(assumptions=[-2]):
            ...
        else:
            s.core   # subset of the assumptions
    """

    restart_base = 100

    def __init__(self, num_vars: int = 0):
        self.nvars = 0
        self.ok = True
        self.vals: list[int] = [0, 0]
        self.level: list[int] = [0]
        self.reason: list = [None]
        self.activity: list[float] = [0.0]
        self.phase: list[bool] = [False]
        self.seen: list[bool] = [False]
        self.watches: list[list] = [[], []]
        self.binw: list[list] = [[], []]
        self.clauses: list[list[int]] = []
        self.learnts: list[list[int]] = []
        self.lbd: dict[int, int] = {}
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.heap: list = []
        self.var_inc = 1.0
        self.var_decay = 0.95
        self.max_learnts = 4000.0
        self.model: list[bool] = []
        self.core: list[int] = []
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        if num_vars:
            self.ensure_vars(num_vars)

    # -- variables ---------------------------------------------------------

    def new_var(self) -> int:
        self.nvars += 1
        v = self.nvars
        self.vals.extend((0, 0))
        self.level.append(0)
        self.reason.append(None)
        self.activity.append(0.0)
        self.phase.append(False)
        self.seen.append(False)
        self.watches.extend(([], []))
        self.binw.extend(([], []))
        heapq.heappush(self.heap, (0.0, v))
        return v

    def ensure_vars(self, n: int) -> None:
        while self.nvars < n:
            self.new_var()

    def set_phase(self, lit: int) -> None:
        """Prefer assigning ``lit`` true when its variable is decided."""
        self.ensure_vars(abs(lit))
        self.phase[abs(lit)] = lit > 0

    # -- clauses -----------------------------------------------------------

    def add_clause(self, lits) -> bool:
        """Add a clause permanently. Returns False once the solver is UNSAT."""
        if not self.ok:
            return False
        if self.trail_lim:
            self._cancel_until(0)
        codes = set()
        for lit in lits:
            if lit == 0:
                raise ValueError("literal 0 is not allowed")
            v = abs(lit)
            if v > self.nvars:
                self.ensure_vars(v)
            c = (v << 1) | (lit < 0)
            if c ^ 1 in codes:
                return True
            codes.add(c)
        vals = self.vals
        clause = []
        for c in codes:
            val = vals[c]
            if val == _TRUE:
                return True
            if val == 0:
                clause.append(c)
        if not clause:
            self.ok = False
            return False
        if len(clause) == 1:
            self._enqueue(clause[0], None)
            if self._propagate() is not None:
                self.ok = False
                return False
            return True
        clause.sort()
        self.clauses.append(clause)
        self._attach(clause)
        return True

    def _attach(self, c: list[int]) -> None:
        if len(c) == 2:
            self.binw[c[0] ^ 1].append((c[1], c))
            self.binw[c[1] ^ 1].append((c[0], c))
        else:
            self.watches[c[0] ^ 1].append(c)
            self.watches[c[1] ^ 1].append(c)

    # -- trail -------------------------------------------------------------

    def _enqueue(self, p: int, reason) -> None:
        vals = self.vals
        vals[p] = _TRUE
        vals[p ^ 1] = _FALSE
        v = p >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(p)

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        trail = self.trail
        vals = self.vals
        phase = self.phase
        activity = self.activity
        heap = self.heap
        stop = self.trail_lim[lvl]
        for i in range(len(trail) - 1, stop - 1, -1):
            p = trail[i]
            v = p >> 1
            vals[p] = 0
            vals[p ^ 1] = 0
            self.reason[v] = None
            phase[v] = not (p & 1)
            heapq.heappush(heap, (-activity[v], v))
        del trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = min(self.qhead, len(trail))

    def _propagate(self):
        """Unit propagation. Returns a conflicting clause or None."""
        trail = self.trail
        vals = self.vals
        watches = self.watches
        binw = self.binw
        level = self.level
        reason = self.reason
        cur_level = len(self.trail_lim)
        qhead = self.qhead
        props = 0
        while qhead < len(trail):
            p = trail[qhead]
            qhead += 1
            props += 1
            for q, c in binw[p]:
                vq = vals[q]
                if vq == _FALSE:
                    self.qhead = len(trail)
                    self.propagations += props
                    return c
                if vq == 0:
                    vals[q] = _TRUE
                    vals[q ^ 1] = _FALSE
                    v = q >> 1
                    level[v] = cur_level
                    reason[v] = c
                    trail.append(q)
            false_lit = p ^ 1
            ws = watches[p]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if vals[first] == _TRUE:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if vals[lk] != _FALSE:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk ^ 1].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if vals[first] == _FALSE:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        self.propagations += props
                        return c
                    vals[first] = _TRUE
                    vals[first ^ 1] = _FALSE
                    v = first >> 1
                    level[v] = cur_level
                    reason[v] = c
                    trail.append(first)
            del ws[j:]
        self.qhead = qhead
        self.propagations += props
        return None

    # -- conflict analysis -------------------------------------------------

    def _bump(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for u in range(1, self.nvars + 1):
                act[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[u], u) for u in range(1, self.nvars + 1)
                         if self.vals[u << 1] == 0]
            heapq.heapify(self.heap)
        elif self.vals[v << 1] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    def _analyze(self, confl):
        seen = self.seen
        level = self.level
        reason = self.reason
        trail = self.trail
        cur = len(self.trail_lim)
        learnt = [0]
        counter = 0
        p = -1
        idx = len(trail) - 1
        to_clear = []
        while True:
            for q in confl:
                if q == p:
                    continue
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    to_clear.append(v)
                    self._bump(v)
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = p >> 1
            confl = reason[v]
            seen[v] = False
            counter -= 1
            if counter == 0:
                break
        learnt[0] = p ^ 1

        # local minimisation: drop literals implied by other learnt literals
        keep = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None:
                keep.append(q)
                continue
            for x in r:
                u = x >> 1
                if u != q >> 1 and not seen[u] and level[u] > 0:
                    keep.append(q)
                    break
        for v in to_clear:
            seen[v] = False

        if len(keep) == 1:
            bt = 0
        else:
            mi = 1
            for k in range(2, len(keep)):
                if level[keep[k] >> 1] > level[keep[mi] >> 1]:
                    mi = k
            keep[1], keep[mi] = keep[mi], keep[1]
            bt = level[keep[1] >> 1]
        lbd = len({level[q >> 1] for q in keep})
        return keep, bt, lbd

    def _analyze_final(self, p: int) -> list[int]:
        """Assumption core for a falsified assumption code ``p``."""
        core = [p]
        seen = self.seen
        v0 = p >> 1
        if self.level[v0] == 0:
            return core
        seen[v0] = True
        trail = self.trail
        for i in range(len(trail) - 1, self.trail_lim[0] - 1, -1):
            x = trail[i] >> 1
            if seen[x]:
                r = self.reason[x]
                if r is None:
                    if x != v0:
                        core.append(trail[i])
                else:
                    for q in r:
                        u = q >> 1
                        if u != x and self.level[u] > 0:
                            seen[u] = True
                seen[x] = False
        seen[v0] = False
        return core

    # -- search ------------------------------------------------------------

    def _pick_branch(self) -> int:
        heap = self.heap
        vals = self.vals
        act = self.activity
        while heap:
            a, v = heapq.heappop(heap)
            if vals[v << 1] == 0 and -a == act[v]:
                return v
        for v in range(1, self.nvars + 1):
            if vals[v << 1] == 0:
                return v
        return 0

    def _reduce_db(self) -> None:
        self._cancel_until(0)
        lbd = self.lbd
        ranked = sorted(self.learnts, key=lambda c: lbd.get(id(c), 99))
        half = len(ranked) // 2
        kept = [c for i, c in enumerate(ranked)
                if i < half or lbd.get(id(c), 99) <= 2]
        kept_ids = {id(c) for c in kept}
        self.lbd = {k: v for k, v in lbd.items() if k in kept_ids}
        self.learnts = kept
        for w in self.watches:
            w.clear()
        for w in self.binw:
            w.clear()
        # watched positions c[0], c[1] still satisfy the invariant at level 0
        for c in self.clauses:
            self._attach(c)
        for c in self.learnts:
            self._attach(c)
        self.max_learnts *= 1.1

    def solve(self, assumptions=(), conflict_budget: int | None = None) -> bool:
        """Decide satisfiability under ``assumptions``.

        On SAT, ``self.model[v]`` holds the value of variable ``v``. On UNSAT,
        ``self.core`` is a subset of the assumptions that is unsatisfiable
        together with the clauses (empty when the clauses alone are UNSAT).
        """
        self.model = []
        self.core = []
        if not self.ok:
            return False
        assumps = []
        for lit in assumptions:
            v = abs(lit)
            self.ensure_vars(v)
            assumps.append((v << 1) | (lit < 0))
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return False

        start_conflicts = self.conflicts
        restart_no = 1
        budget_left = _luby(restart_no) * self.restart_base
        vals = self.vals
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                if (conflict_budget is not None
                        and self.conflicts - start_conflicts > conflict_budget):
                    self._cancel_until(0)
                    raise ResourceLimit(
                        f"conflict budget {conflict_budget} exhausted")
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, bt, lbd = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self._attach(learnt)
                    self.learnts.append(learnt)
                    self.lbd[id(learnt)] = lbd
                    self._enqueue(learnt[0], learnt)
                self.var_inc /= self.var_decay
                budget_left -= 1
                continue

            if budget_left <= 0:
                restart_no += 1
                budget_left = _luby(restart_no) * self.restart_base
                if len(self.learnts) > self.max_learnts + len(self.trail):
                    self._reduce_db()
                else:
                    self._cancel_until(0)
                continue

            lvl = len(self.trail_lim)
            next_lit = -1
            while lvl < len(assumps):
                p = assumps[lvl]
                if vals[p] == _TRUE:
                    self.trail_lim.append(len(self.trail))
                    lvl += 1
                    continue
                if vals[p] == _FALSE:
                    core = self._analyze_final(p)
                    self.core = [(c >> 1) if not c & 1 else -(c >> 1)
                                 for c in core]
                    self._cancel_until(0)
                    return False
                next_lit = p
                break
            if next_lit < 0:
                v = self._pick_branch()
                if v == 0:
                    self.model = [False] + [vals[u << 1] == _TRUE
                                            for u in range(1, self.nvars + 1)]
                    self._cancel_until(0)
                    return True
                next_lit = (v << 1) | (not self.phase[v])
                self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(next_lit, None)

    def value(self, lit: int) -> bool:
        """Value of ``lit`` in the last model."""
        v = self.model[abs(lit)]
        return v if lit > 0 else not v
