"""A CDCL SAT solver: two watched literals, first-UIP learning, VSIDS,
phase saving, Luby restarts, assumptions with failed-assumption cores and
incremental clause addition.

Literals at the API are DIMACS integers.  Internally literal ``2*v`` is the
positive and ``2*v + 1`` the negative literal of variable ``v``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cardinality import seq_counter
from .ir import CNF, check_model

SAT, UNSAT, UNKNOWN = "SAT", "UNSAT", "UNKNOWN"


def _ilit(d: int) -> int:
    return (d << 1) if d > 0 else ((-d) << 1) | 1


def _dlit(i: int) -> int:
    return -(i >> 1) if i & 1 else i >> 1


def luby(i: int) -> int:
    """The i-th element (0-based) of the Luby sequence 1,1,2,1,1,2,4,..."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


class _Heap:
    """Indexed binary max-heap over variables keyed by activity."""

    def __init__(self, act: list[float]):
        self.act = act
        self.heap: list[int] = []
        self.pos: list[int] = []

    def grow(self, n: int) -> None:
        while len(self.pos) <= n:
            self.pos.append(-1)

    def __contains__(self, v: int) -> bool:
        return self.pos[v] >= 0

    def _up(self, i: int) -> None:
        heap, pos, act = self.heap, self.pos, self.act
        v = heap[i]
        a = act[v]
        while i > 0:
            p = (i - 1) >> 1
            u = heap[p]
            if act[u] >= a:
                break
            heap[i] = u
            pos[u] = i
            i = p
        heap[i] = v
        pos[v] = i

    def _down(self, i: int) -> None:
        heap, pos, act = self.heap, self.pos, self.act
        n = len(heap)
        v = heap[i]
        a = act[v]
        while True:
            c = 2 * i + 1
            if c >= n:
                break
            if c + 1 < n and act[heap[c + 1]] > act[heap[c]]:
                c += 1
            if act[heap[c]] <= a:
                break
            heap[i] = heap[c]
            pos[heap[i]] = i
            i = c
        heap[i] = v
        pos[v] = i

    def push(self, v: int) -> None:
        if self.pos[v] >= 0:
            return
        self.heap.append(v)
        self.pos[v] = len(self.heap) - 1
        self._up(len(self.heap) - 1)

    def bumped(self, v: int) -> None:
        if self.pos[v] >= 0:
            self._up(self.pos[v])

    def pop(self) -> int:
        heap, pos = self.heap, self.pos
        v = heap[0]
        last = heap.pop()
        pos[v] = -1
        if heap:
            heap[0] = last
            pos[last] = 0
            self._down(0)
        return v

    def __len__(self) -> int:
        return len(self.heap)


@dataclass
class Stats:
    decisions: int = 0
    propagations: int = 0
    conflicts: int = 0
    restarts: int = 0
    learnt: int = 0
    deleted: int = 0


class Solver:
    def __init__(self, clauses: Iterable[Sequence[int]] = (), nvars: int = 0, seed: int = 0,
                 random_freq: float = 0.0, restart_base: int = 100, var_decay: float = 0.95):
        self.nvars = 0
        self.clauses: list[list[int] | None] = []
        self.learnt: list[bool] = []
        self.cl_act: list[float] = []
        self.lbd: list[int] = []
        self.watches: list[list[int]] = [[], []]
        self.bins: list[list[tuple[int, int]]] = [[], []]
        self.lv: list[int] = [0, 0]  # per internal literal: 1 true, -1 false, 0 unassigned
        self.level: list[int] = [0]
        self.reason: list[int] = [-1]
        self.phase: list[int] = [1]
        self.seen: list[bool] = [False]
        self.act: list[float] = [0.0]
        self.heap = _Heap(self.act)
        self.heap.grow(0)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.ok = True
        self.var_inc = 1.0
        self.var_decay = var_decay
        self.cla_inc = 1.0
        self.restart_base = restart_base
        self.rng = random.Random(seed)
        self.random_freq = random_freq
        self.max_learnts = 4000.0
        self.stats = Stats()
        self.model: list[bool] | None = None
        self.core: list[int] | None = None
        self.original: list[list[int]] = []
        # optional allocator shared with a variable owner (e.g. an IR problem)
        self.var_source = None
        self.ensure_vars(nvars)
        for c in clauses:
            self.add_clause(c)

    # setup ---------------------------------------------------------------
    def ensure_vars(self, n: int) -> None:
        while self.nvars < n:
            self.nvars += 1
            self.watches += [[], []]
            self.bins += [[], []]
            self.lv += [0, 0]
            self.level.append(0)
            self.reason.append(-1)
            self.phase.append(1)
            self.seen.append(False)
            self.act.append(self.rng.random() * 1e-5 if self.random_freq else 0.0)
            self.heap.grow(self.nvars)
            self.heap.push(self.nvars)

    def new_var(self) -> int:
        if self.var_source is not None:
            v = self.var_source()
            self.ensure_vars(v)
            return v
        self.ensure_vars(self.nvars + 1)
        return self.nvars

    def add_clause(self, clause: Sequence[int]) -> bool:
        """Add a clause at decision level 0; returns False once the formula is UNSAT."""
        self.original.append(list(clause))
        if not self.ok:
            return False
        if self.trail_lim:
            self._cancel_until(0)
        if clause:
            self.ensure_vars(max(abs(l) for l in clause))
        lits = []
        seen = set()
        for d in clause:
            l = _ilit(d)
            if l ^ 1 in seen or self.lv[l] == 1:
                return True
            if l in seen or self.lv[l] == -1:
                continue
            seen.add(l)
            lits.append(l)
        if not lits:
            self.ok = False
            return False
        if len(lits) == 1:
            self._enqueue(lits[0], -1)
            if self._propagate() >= 0:
                self.ok = False
            return self.ok
        self._attach(lits, learnt=False)
        return True

    def add_clauses(self, clauses: Iterable[Sequence[int]]) -> bool:
        for c in clauses:
            self.add_clause(c)
        return self.ok

    def _attach(self, lits: list[int], learnt: bool, lbd: int = 0) -> int:
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.learnt.append(learnt)
        self.cl_act.append(0.0)
        self.lbd.append(lbd)
        if len(lits) == 2:
            self.bins[lits[0] ^ 1].append((lits[1], ci))
            self.bins[lits[1] ^ 1].append((lits[0], ci))
        else:
            self.watches[lits[0] ^ 1].append(ci)
            self.watches[lits[1] ^ 1].append(ci)
        return ci

    # core loop -----------------------------------------------------------
    def _enqueue(self, lit: int, reason: int) -> None:
        lv = self.lv
        lv[lit] = 1
        lv[lit ^ 1] = -1
        v = lit >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self) -> int:
        """Unit propagation; returns a conflicting clause index or -1."""
        lv, trail, clauses, watches, bins = self.lv, self.trail, self.clauses, self.watches, self.bins
        level, reason = self.level, self.reason
        dl = len(self.trail_lim)
        props = 0
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            props += 1
            # watches[p] holds clauses in which p's negation is watched
            for other, ci in bins[p]:
                val = lv[other]
                if val == 1:
                    continue
                if val == -1:
                    self.stats.propagations += props
                    return ci
                lv[other] = 1
                lv[other ^ 1] = -1
                v = other >> 1
                level[v] = dl
                reason[v] = ci
                trail.append(other)
            false_lit = p ^ 1
            ws = watches[p]
            i = j = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c is None:
                    continue
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if lv[first] == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if lv[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk ^ 1].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if lv[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.stats.propagations += props
                        return ci
                    lv[first] = 1
                    lv[first ^ 1] = -1
                    v = first >> 1
                    level[v] = dl
                    reason[v] = ci
                    trail.append(first)
            del ws[j:]
        self.stats.propagations += props
        return -1

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        lv, phase, heap, trail = self.lv, self.phase, self.heap, self.trail
        start = self.trail_lim[lvl]
        for i in range(len(trail) - 1, start - 1, -1):
            l = trail[i]
            v = l >> 1
            lv[l] = 0
            lv[l ^ 1] = 0
            phase[v] = l & 1
            self.reason[v] = -1
            if heap.pos[v] < 0:
                heap.push(v)
        del trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = start

    def _bump_var(self, v: int) -> None:
        act = self.act
        act[v] += self.var_inc
        if act[v] > 1e100:
            for i in range(1, self.nvars + 1):
                act[i] *= 1e-100
            self.var_inc *= 1e-100
        self.heap.bumped(v)

    def _analyze(self, confl: int) -> tuple[list[int], int, int]:
        seen, level, reason, clauses, trail = self.seen, self.level, self.reason, self.clauses, self.trail
        dl = len(self.trail_lim)
        learnt = [0]
        path = 0
        p = -1
        idx = len(trail) - 1
        to_clear = []
        while True:
            if self.learnt[confl]:
                self.cl_act[confl] += self.cla_inc
            pv = p >> 1 if p >= 0 else -1
            for q in clauses[confl]:
                v = q >> 1
                if v == pv or seen[v] or level[v] == 0:
                    continue
                seen[v] = True
                to_clear.append(v)
                self._bump_var(v)
                if level[v] >= dl:
                    path += 1
                else:
                    learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        # drop literals implied by the rest of the clause
        keep = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r < 0 or not self._redundant(r, q >> 1):
                keep.append(q)
        learnt = keep
        for v in to_clear:
            seen[v] = False
        if len(learnt) == 1:
            bt = 0
        else:
            mi = max(range(1, len(learnt)), key=lambda i: level[learnt[i] >> 1])
            learnt[1], learnt[mi] = learnt[mi], learnt[1]
            bt = level[learnt[1] >> 1]
        lbd = len({level[q >> 1] for q in learnt})
        self.var_inc /= self.var_decay
        self.cla_inc /= 0.999
        return learnt, bt, lbd

    def _redundant(self, r: int, v: int) -> bool:
        seen, level = self.seen, self.level
        for q in self.clauses[r]:
            u = q >> 1
            if u != v and not seen[u] and level[u] > 0:
                return False
        return True

    def _analyze_final(self, p: int) -> list[int]:
        """Assumptions responsible for literal ``p`` being false."""
        out = [p]
        if not self.trail_lim:
            return [-_dlit(l) for l in out]
        seen, reason, trail = self.seen, self.reason, self.trail
        seen[p >> 1] = True
        marked = [p >> 1]
        for i in range(len(trail) - 1, self.trail_lim[0] - 1, -1):
            x = trail[i] >> 1
            if not seen[x]:
                continue
            r = reason[x]
            if r < 0:
                if self.level[x] > 0:
                    out.append(trail[i] ^ 1)
            else:
                for q in self.clauses[r]:
                    u = q >> 1
                    if self.level[u] > 0 and not seen[u]:
                        seen[u] = True
                        marked.append(u)
        for u in marked:
            seen[u] = False
        # out holds negations of assumptions (p is the failed assumption itself negated)
        return [-_dlit(l) for l in out]

    def _reduce_db(self) -> None:
        locked = set()
        for l in self.trail:
            r = self.reason[l >> 1]
            if r >= 0:
                locked.add(r)
        cands = [ci for ci, c in enumerate(self.clauses)
                 if c is not None and self.learnt[ci] and len(c) > 2 and ci not in locked and self.lbd[ci] > 2]
        cands.sort(key=lambda ci: (-self.lbd[ci], self.cl_act[ci]))
        for ci in cands[: len(cands) // 2]:
            self.clauses[ci] = None
            self.stats.deleted += 1

    def _pick_branch(self) -> int:
        lv, heap = self.lv, self.heap
        if self.random_freq and self.rng.random() < self.random_freq and heap.heap:
            v = self.rng.choice(heap.heap)
            if lv[v << 1] == 0:
                return (v << 1) | self.phase[v]
        while heap.heap:
            v = heap.pop()
            if lv[v << 1] == 0:
                return (v << 1) | self.phase[v]
        return -1

    def solve(self, assumptions: Sequence[int] = (), conflict_budget: int | None = None) -> bool | None:
        """True (SAT, see ``model``), False (UNSAT, see ``core``) or None (budget hit)."""
        self.model = None
        self.core = None
        if not self.ok:
            self.core = []
            return False
        self._cancel_until(0)
        if assumptions:
            self.ensure_vars(max(abs(a) for a in assumptions))
        assumps = [_ilit(a) for a in assumptions]
        if self._propagate() >= 0:
            self.ok = False
            self.core = []
            return False
        conflicts = 0
        restart = 0
        limit = luby(restart) * self.restart_base
        since = 0
        while True:
            confl = self._propagate()
            if confl >= 0:
                self.stats.conflicts += 1
                conflicts += 1
                since += 1
                if not self.trail_lim:
                    self.ok = False
                    self.core = []
                    return False
                learnt, bt, lbd = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    ci = self._attach(learnt, learnt=True, lbd=lbd)
                    self.stats.learnt += 1
                    self._enqueue(learnt[0], ci)
                continue
            if conflict_budget is not None and conflicts >= conflict_budget:
                self._cancel_until(0)
                return None
            if since >= limit:
                since = 0
                restart += 1
                limit = luby(restart) * self.restart_base
                self.stats.restarts += 1
                self._cancel_until(0)
                continue
            if self.stats.learnt - self.stats.deleted > self.max_learnts + len(self.trail):
                self._reduce_db()
                self.max_learnts *= 1.1
            dl = len(self.trail_lim)
            nxt = -1
            while dl < len(assumps):
                a = assumps[dl]
                if self.lv[a] == 1:
                    self.trail_lim.append(len(self.trail))
                    dl += 1
                elif self.lv[a] == -1:
                    self.core = self._analyze_final(a ^ 1)
                    self._cancel_until(0)
                    return False
                else:
                    nxt = a
                    break
            if nxt < 0:
                nxt = self._pick_branch()
                if nxt < 0:
                    self.model = [False] + [self.lv[v << 1] == 1 for v in range(1, self.nvars + 1)]
                    self._cancel_until(0)
                    return True
                self.stats.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(nxt, -1)

    def value(self, lit: int) -> bool:
        return self.model[lit] if lit > 0 else not self.model[-lit]


@dataclass
class SolveResult:
    status: str
    model: list[bool] | None = None
    core: list[int] | None = None


def solve(cnf: CNF | Iterable[Sequence[int]], assumptions: Sequence[int] = (), conflict_budget: int | None = None,
          seed: int = 0) -> SolveResult:
    clauses = cnf.clauses if isinstance(cnf, CNF) else list(cnf)
    nvars = cnf.nvars if isinstance(cnf, CNF) else 0
    s = Solver(clauses, nvars=nvars, seed=seed)
    r = s.solve(assumptions, conflict_budget)
    if r is None:
        return SolveResult(UNKNOWN)
    if r:
        assert check_model(clauses, s.model), "solver returned a non-model"
        return SolveResult(SAT, model=s.model)
    return SolveResult(UNSAT, core=s.core)


def enumerate_models(solver: Solver | CNF | Iterable[Sequence[int]], projection: Sequence[int],
                     limit: int | None = None, assumptions: Sequence[int] = (), full: bool = False) -> list:
    """Distinct models projected onto ``projection`` using blocking clauses.

    Returns projected ``{var: value}`` dicts, or whole models when ``full``.

    On a live ``Solver`` the blocking clauses are guarded by a fresh
    activation literal that is retired afterwards, so the solver is left
    logically unchanged.
    """
    if not isinstance(solver, Solver):
        cnf = solver
        clauses = cnf.clauses if isinstance(cnf, CNF) else list(cnf)
        solver = Solver(clauses, nvars=cnf.nvars if isinstance(cnf, CNF) else 0)
    act = solver.new_var()
    out = []
    while limit is None or len(out) < limit:
        if not solver.solve(list(assumptions) + [act]):
            break
        m = {v: solver.model[v] for v in projection}
        out.append(list(solver.model) if full else m)
        solver.add_clause([-act] + [(-v if val else v) for v, val in m.items()])
    solver.add_clause([-act])
    return out


@dataclass
class Objective:
    literals: list[int]
    sense: str = "min"  # "min" | "max"
    name: str = ""

    def value(self, model: list[bool]) -> int:
        return sum(1 for l in self.literals if (model[l] if l > 0 else not model[-l]))


@dataclass
class OptimizeResult:
    model: list[bool] | None
    values: list[int]
    optimal: bool
    history: list[list[int]] = field(default_factory=list)
    bounds: list[int] = field(default_factory=list)  # assumptions holding every objective at its optimum


class OptimizeError(RuntimeError):
    pass


def optimize(solver: Solver | CNF, objectives: Sequence[Objective], conflict_budget: int | None = None,
             assumptions: Sequence[int] = (), log=None) -> OptimizeResult:
    """Lexicographic optimization by iterative bound tightening.

    Each objective is solved to optimality with the earlier ones held at
    their optima: find a model, count its value ``v``, require ``<= v - 1``
    through a sequential counter and re-solve until UNSAT.
    """
    if not isinstance(solver, Solver):
        solver = Solver(solver.clauses, nvars=solver.nvars)
    fixed = list(assumptions)
    r = solver.solve(fixed, conflict_budget)
    if r is None:
        return OptimizeResult(None, [], False)
    if not r:
        raise OptimizeError("constraints are unsatisfiable")
    best = solver.model
    values: list[int] = []
    history: list[list[int]] = []
    optimal = True
    for obj in objectives:
        # count "bad" literals: true ones when minimizing, false ones when maximizing
        lits = obj.literals if obj.sense == "min" else [-l for l in obj.literals]
        bad = Objective(lits).value(best)
        trace = [obj.value(best)]
        if bad > 0:
            clauses, out = seq_counter(lits, bad, solver.new_var)
            solver.add_clauses(clauses)
            while bad > 0:
                r = solver.solve(fixed + [-out[bad - 1]], conflict_budget)
                if r is None:
                    optimal = False
                    break
                if not r:
                    break
                best = solver.model
                bad = Objective(lits).value(best)
                trace.append(obj.value(best))
                if log:
                    log(f"{obj.name or 'objective'}: {obj.value(best)}")
            if bad < len(out):
                fixed.append(-out[bad])
        if bad == 0:
            fixed.extend(-l for l in lits)
        history.append(trace)
        values.append(obj.value(best))
        if not optimal:
            break
    return OptimizeResult(best, values, optimal, history, fixed[len(assumptions):])
