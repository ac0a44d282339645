import itertools

import pytest

from mgsat.ir import (BOOL, FALSE, TRUE, And, Iff, Implies, IRError, Not, Or, Problem, export_smtlib,
                      parse_dimacs)
from mgsat.sat import Solver, enumerate_models, solve

z3 = pytest.importorskip("z3")


def small_problem():
    p = Problem()
    color = p.sort("Color", ["red", "green", "blue"])
    node = p.sort("Node", 3)
    col = p.table("col", (node,), color)
    edge = p.table("edge", (node, node), BOOL)
    for a, b in itertools.combinations(range(3), 2):
        for c in range(3):
            p.add(Implies(edge[(a, b)].holds, Not(And(col.eq(a, c), col.eq(b, c)))))
    p.add(edge[(0, 1)].holds)
    p.add(Or(edge[(1, 2)].holds, edge[(0, 2)].holds))
    return p, col, edge


def brute_models(p, col, edge):
    """Count (col, edge) assignments satisfying the formulas, by direct evaluation."""
    n = 0
    pairs = list(itertools.combinations(range(3), 2))
    for cols in itertools.product(range(3), repeat=3):
        for es in itertools.product([False, True], repeat=len(pairs)):
            e = dict(zip(pairs, es))
            ok = e[(0, 1)] and (e[(1, 2)] or e[(0, 2)])
            ok = ok and all(not e[(a, b)] or cols[a] != cols[b] for a, b in pairs)
            n += ok
    return n


def test_grounding_matches_brute_force():
    p, col, edge = small_problem()
    cnf = p.ground()
    proj = [edge.cells[pair][1] for pair in itertools.combinations(range(3), 2)]
    proj += [v for cells in col.cells.values() for v in cells]
    models = enumerate_models(cnf, proj, full=True)
    assert len(models) == brute_models(p, col, edge)
    for m in models:
        for f, _ in p.formulas:
            assert p.evaluate(f, m)


def test_one_hot_integrity():
    p, col, edge = small_problem()
    cnf = p.ground()
    for m in enumerate_models(cnf, [v for cells in col.cells.values() for v in cells], full=True):
        for args in col.cells:
            assert sum(m[v] for v in col.cells[args]) == 1
            p.value(col[args], m)


def test_ill_sorted_atoms_are_rejected():
    p, col, edge = small_problem()
    with pytest.raises(IRError):
        col.eq(3, "red")
    with pytest.raises(IRError):
        col.eq(0, "purple")
    with pytest.raises(IRError):
        edge[(0,)]
    with pytest.raises(IRError):
        col[0].holds
    q = Problem()
    with pytest.raises(IRError):
        q.table("t", (p.sorts["Node"],), BOOL)


def test_incremental_ground_appends_only():
    p, col, edge = small_problem()
    n1 = len(p.ground().clauses)
    p.add(col.eq(0, "red"))
    cnf = p.ground()
    assert len(cnf.clauses) > n1
    assert cnf.groups["main"][-1][1] == len(cnf.clauses)


def test_constants_and_connectives():
    p = Problem()
    a, b = p.boolean("a"), p.boolean("b")
    p.add(Iff(a, Not(b)))
    p.add(Or(FALSE, a))
    p.add(TRUE)
    r = solve(p.ground())
    assert r.status == "SAT"
    assert p.holds(a, r.model) and not p.holds(b, r.model)
    p.add(FALSE)
    assert solve(p.ground()).status == "UNSAT"


def test_equality_of_applications():
    p = Problem()
    s = p.sort("S", 4)
    f = p.table("f", (), s)
    g = p.table("g", (), s)
    p.add(f[()].same(g[()]))
    p.add(Not(g.eq((), 2)))
    models = enumerate_models(p.ground(), [v for t in (f, g) for v in t.cells[()]])
    assert len(models) == 3


@pytest.mark.parametrize("bound,sense,want", [(1, "<=", 4), (2, ">=", 4), (2, "==", 3), (0, "<=", 1)])
def test_cardinality_constraints(bound, sense, want):
    p = Problem()
    xs = [p.boolean(f"x{i}") for i in range(3)]
    p.add_card(xs, bound, sense)
    cnf = p.ground()
    models = enumerate_models(cnf, [p.literal(x) for x in xs])
    assert len(models) == want


def test_dimacs_round_trip_and_sidecar():
    p, col, edge = small_problem()
    cnf = p.ground()
    back = parse_dimacs(cnf.to_dimacs())
    assert back.clauses == cnf.clauses and back.nvars == cnf.nvars
    assert '"col"' in cnf.sidecar()


def _z3_check(text):
    s = z3.Solver()
    s.from_string(text)
    return s.check()


def test_smtlib_export_agrees_with_z3():
    p, col, edge = small_problem()
    assert _z3_check(export_smtlib(p)) == z3.sat
    assert solve(p.ground()).status == "SAT"
    p.add(edge[(0, 2)].holds)
    p.add(edge[(1, 2)].holds)
    p.add_card([col.eq(i, "blue") for i in range(3)], 0, "<=")
    assert _z3_check(export_smtlib(p)) == z3.unsat
    assert solve(p.ground()).status == "UNSAT"


def random_formula(rng, atoms, depth):
    if depth == 0 or rng.random() < 0.3:
        a = rng.choice(atoms)
        return a if rng.random() < 0.5 else Not(a)
    op = rng.choice([And, Or, Implies, Iff, Not])
    if op is Not:
        return Not(random_formula(rng, atoms, depth - 1))
    if op in (Implies, Iff):
        return op(random_formula(rng, atoms, depth - 1), random_formula(rng, atoms, depth - 1))
    return op(*(random_formula(rng, atoms, depth - 1) for _ in range(rng.randint(1, 3))))


def test_random_problems_agree_with_z3():
    import random
    rng = random.Random(2)
    for trial in range(60):
        p = Problem()
        s = p.sort("S", 3)
        f = p.table("f", (s,), s)
        b = p.table("b", (s,), BOOL)
        atoms = [f.eq(i, v) for i in range(3) for v in range(3)] + [b[i].holds for i in range(3)]
        for _ in range(rng.randint(1, 6)):
            p.add(random_formula(rng, atoms, 3))
        if rng.random() < 0.5:
            p.add(f[0].same(f[1]))
        if rng.random() < 0.5:
            p.add_card(rng.sample(atoms, 4), rng.randint(0, 3), rng.choice(["<=", ">=", "=="]))
        ours = solve(p.ground()).status
        assert (ours == "SAT") == (_z3_check(export_smtlib(p)) == z3.sat), trial
