"""Finite-domain constraint IR and its grounding to CNF.

Problems are built from finite sorts, function tables over those sorts
(every cell is a finite-domain variable), quantifier-free formulas over
``table(args) = value`` atoms, and cardinality constraints.  ``ground``
produces CNF with a one-hot encoding per cell, Tseitin definitions for
nested connectives and sequential counters for cardinalities.  Grounding is
incremental: each call emits only what was added since the previous one.
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class IRError(ValueError):
    pass


@dataclass(frozen=True)
class Sort:
    name: str
    elements: tuple[str, ...]

    def __post_init__(self):
        if not self.elements:
            raise IRError(f"sort {self.name} is empty")

    @property
    def size(self) -> int:
        return len(self.elements)

    def index(self, value) -> int:
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            if not 0 <= value < self.size:
                raise IRError(f"{value} is not an element of sort {self.name}")
            return value
        try:
            return self.elements.index(value)
        except ValueError:
            raise IRError(f"{value!r} is not an element of sort {self.name}") from None


BOOL = Sort("Bool", ("false", "true"))


def finite_sort(name: str, size_or_elements) -> Sort:
    if isinstance(size_or_elements, int):
        return Sort(name, tuple(f"{name}{i}" for i in range(size_or_elements)))
    return Sort(name, tuple(size_or_elements))


# formulas -----------------------------------------------------------------

class Formula:
    __slots__ = ()

    def __invert__(self):
        return Not(self)

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def implies(self, other):
        return Implies(self, other)


class Atom(Formula):
    """``table(args) = value``; boolean tables use value 1 for true."""

    __slots__ = ("table", "args", "value")

    def __init__(self, table: "FuncTable", args: tuple, value: int):
        self.table, self.args, self.value = table, args, value

    def __repr__(self) -> str:
        return f"{self.table.name}{list(self.args)}={self.table.codomain.elements[self.value]}"


class Not(Formula):
    __slots__ = ("arg",)

    def __init__(self, arg: Formula):
        self.arg = arg


class And(Formula):
    __slots__ = ("args",)

    def __init__(self, *args: Formula):
        self.args = args


class Or(Formula):
    __slots__ = ("args",)

    def __init__(self, *args: Formula):
        self.args = args


class Implies(Formula):
    __slots__ = ("lhs", "rhs")

    def __init__(self, lhs: Formula, rhs: Formula):
        self.lhs, self.rhs = lhs, rhs


class Iff(Formula):
    __slots__ = ("lhs", "rhs")

    def __init__(self, lhs: Formula, rhs: Formula):
        self.lhs, self.rhs = lhs, rhs


class Const(Formula):
    __slots__ = ("value",)

    def __init__(self, value: bool):
        self.value = value


TRUE, FALSE = Const(True), Const(False)


class EqApp(Formula):
    """Equality of two function applications over the same codomain."""

    __slots__ = ("a", "b")

    def __init__(self, a: "App", b: "App"):
        self.a, self.b = a, b


@dataclass(frozen=True)
class App:
    table: "FuncTable"
    args: tuple

    def __eq__(self, other):  # pragma: no cover - dataclass identity only
        return isinstance(other, App) and self.table is other.table and self.args == other.args

    def __hash__(self):
        return hash((id(self.table), self.args))

    def eq(self, value) -> Atom:
        return Atom(self.table, self.args, self.table.codomain.index(value))

    def same(self, other: "App") -> EqApp:
        return EqApp(self, other)

    @property
    def holds(self) -> Atom:
        if self.table.codomain is not BOOL:
            raise IRError(f"{self.table.name} is not boolean")
        return Atom(self.table, self.args, 1)


class FuncTable:
    def __init__(self, problem: "Problem", name: str, domain: tuple[Sort, ...], codomain: Sort):
        self.problem, self.name, self.domain, self.codomain = problem, name, domain, codomain
        self.cells: dict[tuple, list[int]] = {}
        for args in itertools.product(*(range(s.size) for s in domain)):
            if codomain is BOOL:
                self.cells[args] = [0, problem._new_var((name, args, 1))]
            else:
                self.cells[args] = [problem._new_var((name, args, v)) for v in range(codomain.size)]
        problem._pending_cells.append(self)

    def norm(self, args) -> tuple:
        if not isinstance(args, tuple):
            args = (args,)
        if len(args) != len(self.domain):
            raise IRError(f"{self.name} takes {len(self.domain)} arguments, got {len(args)}")
        return tuple(s.index(a) for s, a in zip(self.domain, args))

    def __getitem__(self, args) -> App:
        return App(self, self.norm(args))

    def __call__(self, *args) -> App:
        return App(self, self.norm(args))

    def eq(self, args, value) -> Atom:
        return self[args].eq(value)

    def __repr__(self) -> str:
        return f"FuncTable({self.name})"


@dataclass(frozen=True)
class CardinalityConstraint:
    literals: tuple[Formula, ...]
    bound: int
    sense: str  # "<=", ">=", "=="

    def __post_init__(self):
        if self.sense not in ("<=", ">=", "=="):
            raise IRError(f"bad cardinality sense {self.sense!r}")
        if not 0 <= self.bound <= len(self.literals) and self.sense != "<=":
            raise IRError("cardinality bound out of range")


@dataclass
class CNF:
    nvars: int = 0
    clauses: list[list[int]] = field(default_factory=list)
    varmap: dict[int, tuple] = field(default_factory=dict)
    groups: dict[str, list[tuple[int, int]]] = field(default_factory=dict)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.nvars} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"

    def sidecar(self) -> str:
        rows = {str(v): {"table": t, "cell": list(a), "value": val} for v, (t, a, val) in self.varmap.items()}
        return json.dumps({"vars": rows, "groups": self.groups}, indent=1, sort_keys=True)

    def check(self, model: Sequence[bool] | set) -> bool:
        return check_model(self.clauses, model)


def check_model(clauses: Iterable[Sequence[int]], model) -> bool:
    """Independent linear verifier: every clause has a true literal."""
    if isinstance(model, (set, frozenset)):
        truth = model.__contains__
    else:
        truth = lambda lit: (model[lit] if lit > 0 else not model[-lit])
    return all(any(truth(l) for l in c) for c in clauses)


def parse_dimacs(text: str) -> CNF:
    cnf = CNF()
    cur: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            cnf.nvars = int(line.split()[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                cnf.clauses.append(cur)
                cur = []
            else:
                cur.append(lit)
                cnf.nvars = max(cnf.nvars, abs(lit))
    if cur:
        cnf.clauses.append(cur)
    return cnf


class Problem:
    def __init__(self):
        self.sorts: dict[str, Sort] = {}
        self.tables: dict[str, FuncTable] = {}
        self.formulas: list[tuple[Formula, str]] = []
        self.cards: list[tuple[CardinalityConstraint, str]] = []
        self.cnf = CNF()
        self._pending_cells: list[FuncTable] = []
        self._done_formulas = 0
        self._done_cards = 0
        self._tseitin: dict[int, int] = {}

    # construction --------------------------------------------------------
    def _new_var(self, meaning: tuple | None = None) -> int:
        self.cnf.nvars += 1
        if meaning is not None:
            self.cnf.varmap[self.cnf.nvars] = meaning
        return self.cnf.nvars

    def sort(self, name: str, size_or_elements) -> Sort:
        if name in self.sorts:
            raise IRError(f"duplicate sort {name}")
        s = finite_sort(name, size_or_elements)
        self.sorts[name] = s
        return s

    def table(self, name: str, domain: Sequence[Sort], codomain: Sort) -> FuncTable:
        if name in self.tables:
            raise IRError(f"duplicate table {name}")
        for s in (*domain, codomain):
            if s is not BOOL and self.sorts.get(s.name) is not s:
                raise IRError(f"sort {s.name} not declared in this problem")
        t = FuncTable(self, name, tuple(domain), codomain)
        self.tables[name] = t
        return t

    def boolean(self, name: str) -> Atom:
        return self.table(name, (), BOOL)[()].holds

    def add(self, formula: Formula, group: str = "main") -> None:
        self.formulas.append((formula, group))

    def add_card(self, literals: Sequence[Formula], bound: int, sense: str = "<=", group: str = "main") -> None:
        self.cards.append((CardinalityConstraint(tuple(literals), bound, sense), group))

    # grounding -----------------------------------------------------------
    def ground(self) -> CNF:
        """Emit clauses for everything added since the last call."""
        cnf = self.cnf
        start = len(cnf.clauses)
        for t in self._pending_cells:
            if t.codomain is not BOOL:
                for vars_ in t.cells.values():
                    self._exactly_one(vars_)
        self._pending_cells = []
        self._mark("one-hot", start)
        while self._done_formulas < len(self.formulas):
            f, group = self.formulas[self._done_formulas]
            self._done_formulas += 1
            s = len(cnf.clauses)
            self._clausify(f)
            self._mark(group, s)
        while self._done_cards < len(self.cards):
            c, group = self.cards[self._done_cards]
            self._done_cards += 1
            s = len(cnf.clauses)
            self._card(c)
            self._mark(group, s)
        return cnf

    def _mark(self, group: str, start: int) -> None:
        end = len(self.cnf.clauses)
        if end == start:
            return
        ranges = self.cnf.groups.setdefault(group, [])
        if ranges and ranges[-1][1] == start:
            ranges[-1] = (ranges[-1][0], end)
        else:
            ranges.append((start, end))

    def _emit(self, clause: list[int]) -> None:
        self.cnf.clauses.append(clause)

    def _exactly_one(self, vars_: list[int]) -> None:
        self._emit(list(vars_))
        self.at_most_one(vars_)

    def at_most_one(self, lits: Sequence[int]) -> None:
        lits = list(lits)
        if len(lits) <= 6:
            for a, b in itertools.combinations(lits, 2):
                self._emit([-a, -b])
            return
        # ladder: s_i means "some of lits[0..i] is true"
        prev = lits[0]
        for i in range(1, len(lits)):
            cur = lits[i]
            if i == len(lits) - 1:
                self._emit([-prev, -cur])
                break
            s = self._new_var()
            self._emit([-prev, s])
            self._emit([-cur, s])
            self._emit([-prev, -cur])
            prev = s

    def _check_atom(self, a: Atom) -> None:
        t = a.table
        if self.tables.get(t.name) is not t:
            raise IRError(f"atom {a!r} uses a table from another problem")
        if len(a.args) != len(t.domain) or a.args not in t.cells:
            raise IRError(f"ill-sorted atom {a!r}")
        if not 0 <= a.value < t.codomain.size:
            raise IRError(f"ill-sorted atom {a!r}")

    def literal(self, f: Formula) -> int:
        """CNF literal for a formula, introducing a Tseitin variable if needed."""
        if isinstance(f, Atom):
            self._check_atom(f)
            return f.table.cells[f.args][f.value]
        if isinstance(f, Not):
            return -self.literal(f.arg)
        key = id(f)
        if key in self._tseitin:
            return self._tseitin[key][0]
        v = self._new_var()
        self._define(v, f)
        self._tseitin[key] = (v, f)  # keep f alive so its id stays unique
        return v

    def _define(self, v: int, f: Formula) -> None:
        if isinstance(f, Const):
            self._emit([v] if f.value else [-v])
        elif isinstance(f, And):
            lits = [self.literal(a) for a in f.args]
            for l in lits:
                self._emit([-v, l])
            self._emit([v] + [-l for l in lits])
        elif isinstance(f, Or):
            lits = [self.literal(a) for a in f.args]
            for l in lits:
                self._emit([v, -l])
            self._emit([-v] + lits)
        elif isinstance(f, Implies):
            self._define(v, Or(Not(f.lhs), f.rhs))
        elif isinstance(f, Iff):
            a, b = self.literal(f.lhs), self.literal(f.rhs)
            self._emit([-v, -a, b])
            self._emit([-v, a, -b])
            self._emit([v, a, b])
            self._emit([v, -a, -b])
        elif isinstance(f, EqApp):
            self._define(v, Or(*self._eqapp_cases(f)))
        else:
            raise IRError(f"cannot ground {f!r}")

    def _eqapp_cases(self, f: EqApp) -> list[Formula]:
        ta, tb = f.a.table, f.b.table
        if ta.codomain is not tb.codomain:
            raise IRError(f"ill-sorted equality between {ta.name} and {tb.name}")
        return [And(Atom(ta, f.a.args, v), Atom(tb, f.b.args, v)) for v in range(ta.codomain.size)]

    def _clausify(self, f: Formula) -> None:
        if isinstance(f, And):
            for a in f.args:
                self._clausify(a)
        elif isinstance(f, Const):
            if not f.value:
                self._emit([])
        elif isinstance(f, Implies):
            self._clausify(Or(Not(f.lhs), f.rhs))
        elif isinstance(f, Iff):
            self._clausify(Implies(f.lhs, f.rhs))
            self._clausify(Implies(f.rhs, f.lhs))
        elif isinstance(f, EqApp):
            ta, tb = f.a.table, f.b.table
            if ta.codomain is not tb.codomain:
                raise IRError(f"ill-sorted equality between {ta.name} and {tb.name}")
            for v in range(ta.codomain.size):
                self._clausify(Or(Not(Atom(ta, f.a.args, v)), Atom(tb, f.b.args, v)))
        elif isinstance(f, Not) and not isinstance(f.arg, Atom):
            g = f.arg
            if isinstance(g, Or):
                self._clausify(And(*(Not(a) for a in g.args)))
            elif isinstance(g, Not):
                self._clausify(g.arg)
            elif isinstance(g, Const):
                self._clausify(Const(not g.value))
            elif isinstance(g, Implies):
                self._clausify(And(g.lhs, Not(g.rhs)))
            elif isinstance(g, And):
                self._clausify(Or(*(Not(a) for a in g.args)))
            else:
                self._emit([-self.literal(g)])
        else:
            clause = []
            for d in _disjuncts(f):
                if isinstance(d, Const):
                    if d.value:
                        return
                    continue
                clause.append(self.literal(d))
            self._emit(clause)

    def _card(self, c: CardinalityConstraint) -> None:
        lits = [self.literal(l) for l in c.literals]
        if c.sense in ("<=", "=="):
            self.seq_counter_at_most(lits, c.bound)
        if c.sense in (">=", "=="):
            if c.bound > len(lits):
                self._emit([])
            else:
                self.seq_counter_at_most([-l for l in lits], len(lits) - c.bound)

    def seq_counter_at_most(self, lits: Sequence[int], k: int) -> None:
        """Sinz's sequential counter for sum(lits) <= k."""
        n = len(lits)
        if k >= n:
            return
        if k == 0:
            for l in lits:
                self._emit([-l])
            return
        # s[i][j]: at least j+1 of lits[0..i] are true
        s = [[self._new_var() for _ in range(k)] for _ in range(n - 1)]
        self._emit([-lits[0], s[0][0]])
        for j in range(1, k):
            self._emit([-s[0][j]])
        for i in range(1, n - 1):
            self._emit([-lits[i], s[i][0]])
            self._emit([-s[i - 1][0], s[i][0]])
            for j in range(1, k):
                self._emit([-lits[i], -s[i - 1][j - 1], s[i][j]])
                self._emit([-s[i - 1][j], s[i][j]])
            self._emit([-lits[i], -s[i - 1][k - 1]])
        self._emit([-lits[n - 1], -s[n - 2][k - 1]])

    # decoding ------------------------------------------------------------
    def value(self, app: App, model) -> int:
        vars_ = app.table.cells[app.args]
        truth = _truth(model)
        if app.table.codomain is BOOL:
            return int(truth(vars_[1]))
        hits = [v for v, var in enumerate(vars_) if truth(var)]
        if len(hits) != 1:
            raise IRError(f"one-hot violation in {app.table.name}{list(app.args)}: {hits}")
        return hits[0]

    def holds(self, atom: Formula, model) -> bool:
        lit = self.literal(atom) if not isinstance(atom, Atom) else atom.table.cells[atom.args][atom.value]
        return _truth(model)(lit)

    def evaluate(self, f: Formula, model) -> bool:
        """Evaluate a formula directly from cell values (no Tseitin variables)."""
        truth = _truth(model)
        if isinstance(f, Atom):
            return truth(f.table.cells[f.args][f.value])
        if isinstance(f, Not):
            return not self.evaluate(f.arg, model)
        if isinstance(f, And):
            return all(self.evaluate(a, model) for a in f.args)
        if isinstance(f, Or):
            return any(self.evaluate(a, model) for a in f.args)
        if isinstance(f, Implies):
            return not self.evaluate(f.lhs, model) or self.evaluate(f.rhs, model)
        if isinstance(f, Iff):
            return self.evaluate(f.lhs, model) == self.evaluate(f.rhs, model)
        if isinstance(f, Const):
            return f.value
        if isinstance(f, EqApp):
            return self.value(f.a, model) == self.value(f.b, model)
        raise IRError(f"cannot evaluate {f!r}")

    # export --------------------------------------------------------------
    def to_smtlib(self, extra: Iterable[str] = (), check: bool = True) -> str:
        return export_smtlib(self, extra, check)


def _disjuncts(f: Formula) -> Iterable[Formula]:
    if isinstance(f, Or):
        for a in f.args:
            yield from _disjuncts(a)
    elif isinstance(f, Implies):
        yield from _disjuncts(Not(f.lhs))
        yield from _disjuncts(f.rhs)
    elif isinstance(f, Not) and isinstance(f.arg, And):
        for a in f.arg.args:
            yield from _disjuncts(Not(a))
    elif isinstance(f, Not) and isinstance(f.arg, Not):
        yield from _disjuncts(f.arg.arg)
    else:
        yield f


def _truth(model):
    if isinstance(model, (set, frozenset)):
        return model.__contains__
    return lambda lit: (model[lit] if lit > 0 else not model[-lit])


def ground(problem: Problem) -> CNF:
    return problem.ground()


# SMT-LIB ------------------------------------------------------------------

def _sym(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]", "_", name)


def _smt_app(app: App) -> str:
    t = app.table
    if not app.args:
        return _sym(t.name)
    args = " ".join(_elem(s, a) for s, a in zip(t.domain, app.args))
    return f"({_sym(t.name)} {args})"


def _elem(sort: Sort, index: int) -> str:
    return f"{_sym(sort.name)}__{_sym(sort.elements[index])}"


def _smt(f: Formula) -> str:
    if isinstance(f, Atom):
        app = App(f.table, f.args)
        if f.table.codomain is BOOL:
            return _smt_app(app)
        return f"(= {_smt_app(app)} {_elem(f.table.codomain, f.value)})"
    if isinstance(f, Not):
        return f"(not {_smt(f.arg)})"
    if isinstance(f, (And, Or)):
        if not f.args:
            return "true" if isinstance(f, And) else "false"
        op = "and" if isinstance(f, And) else "or"
        return f"({op} {' '.join(_smt(a) for a in f.args)})"
    if isinstance(f, Implies):
        return f"(=> {_smt(f.lhs)} {_smt(f.rhs)})"
    if isinstance(f, Iff):
        return f"(= {_smt(f.lhs)} {_smt(f.rhs)})"
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, EqApp):
        return f"(= {_smt_app(f.a)} {_smt_app(f.b)})"
    raise IRError(f"cannot export {f!r}")


def smt_count(literals: Sequence[Formula]) -> str:
    if not literals:
        return "0"
    terms = " ".join(f"(ite {_smt(l)} 1 0)" for l in literals)
    return f"(+ {terms})" if len(literals) > 1 else terms


def export_smtlib(problem: Problem, extra: Iterable[str] = (), check: bool = True) -> str:
    """SMT-LIB2 text: sorts as enumerated datatypes, tables as functions."""
    out = ["(set-logic ALL)"]
    used = [s for s in problem.sorts.values()]
    for s in used:
        ctors = " ".join(f"({_elem(s, i)})" for i in range(s.size))
        out.append(f"(declare-datatypes ((S_{_sym(s.name)} 0)) (({ctors})))")

    def sname(s: Sort) -> str:
        return "Bool" if s is BOOL else f"S_{_sym(s.name)}"

    for t in problem.tables.values():
        dom = " ".join(sname(s) for s in t.domain)
        out.append(f"(declare-fun {_sym(t.name)} ({dom}) {sname(t.codomain)})")
    for f, group in problem.formulas:
        out.append(f"(assert {_smt(f)})")
    for c, group in problem.cards:
        op = {"<=": "<=", ">=": ">=", "==": "="}[c.sense]
        out.append(f"(assert ({op} {smt_count(c.literals)} {c.bound}))")
    out.extend(extra)
    if check:
        out.append("(check-sat)")
    return "\n".join(out) + "\n"
