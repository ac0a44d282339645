import itertools
import random

import pytest

from mgsat.cardinality import at_least, at_most, seq_counter
from mgsat.ir import CNF, check_model
from mgsat.sat import (Objective, OptimizeError, Solver, enumerate_models, luby, optimize, solve)


def brute_sat(clauses, nvars):
    for bits in itertools.product([False, True], repeat=nvars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return True
    return False


def brute_count(clauses, nvars, projection):
    seen = set()
    for bits in itertools.product([False, True], repeat=nvars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            seen.add(tuple(bits[v - 1] for v in projection))
    return len(seen)


def random_3cnf(rng, nvars, nclauses):
    return [[rng.choice([-1, 1]) * v for v in rng.sample(range(1, nvars + 1), 3)] for _ in range(nclauses)]


def test_luby_prefix():
    assert [luby(i) for i in range(15)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


def test_random_3cnf_matches_brute_force():
    rng = random.Random(7)
    for _ in range(500):
        n = rng.randint(3, 12)
        clauses = random_3cnf(rng, n, rng.randint(1, int(5 * n)))
        res = solve(CNF(nvars=n, clauses=clauses))
        assert (res.status == "SAT") == brute_sat(clauses, n)
        if res.status == "SAT":
            assert check_model(clauses, res.model)


def test_empty_clause_and_trivial():
    assert Solver([[]]).solve() is False
    assert Solver([], nvars=3).solve() is True
    s = Solver([[1], [-1]])
    assert s.solve() is False


def test_incremental_clauses_keep_learned_state():
    rng = random.Random(3)
    clauses = random_3cnf(rng, 10, 30)
    s = Solver(clauses, nvars=10)
    extra = []
    for _ in range(15):
        r = s.solve()
        assert r == brute_sat(clauses + extra, 10)
        if not r:
            break
        c = [rng.choice([-1, 1]) * v for v in rng.sample(range(1, 11), 3)]
        extra.append(c)
        s.add_clause(c)


@pytest.mark.parametrize("seed", range(40))
def test_assumption_cores_are_unsat_subsets(seed):
    rng = random.Random(seed)
    n = 10
    clauses = random_3cnf(rng, n, 38)
    s = Solver(clauses, nvars=n)
    assumptions = [rng.choice([-1, 1]) * v for v in rng.sample(range(1, n + 1), 5)]
    r = s.solve(assumptions)
    expect = brute_sat(clauses + [[a] for a in assumptions], n)
    assert r == expect
    if not r:
        assert set(s.core) <= set(assumptions)
        assert not brute_sat(clauses + [[a] for a in s.core], n)
    # assumptions do not stick
    assert s.solve() == brute_sat(clauses, n)


def test_conflict_budget_returns_unknown():
    # pigeonhole 7 into 6 needs many conflicts
    p, h = 7, 6
    var = lambda i, j: i * h + j + 1
    clauses = [[var(i, j) for j in range(h)] for i in range(p)]
    for j in range(h):
        for a, b in itertools.combinations(range(p), 2):
            clauses.append([-var(a, j), -var(b, j)])
    assert Solver(clauses).solve(conflict_budget=5) is None


def _count_with_encoding(n, k, build):
    nv = [n]

    def new_var():
        nv[0] += 1
        return nv[0]

    clauses = build(list(range(1, n + 1)), k, new_var)
    models = enumerate_models(CNF(nvars=nv[0], clauses=clauses), list(range(1, n + 1)))
    return len(models)


def test_cardinality_small_counts():
    def exactly(lits, k, nv):
        return at_most(lits, k, nv) + at_least(lits, k, nv)

    assert _count_with_encoding(3, 1, exactly) == 3
    assert _count_with_encoding(4, 2, at_most) == 11


def test_random_cardinality_counts_match_brute_force():
    rng = random.Random(11)
    from math import comb
    for _ in range(100):
        n = rng.randint(1, 7)
        k = rng.randint(0, n)
        kind = rng.choice(["le", "ge"])
        build = at_most if kind == "le" else at_least
        got = _count_with_encoding(n, k, build)
        want = sum(comb(n, j) for j in range(n + 1) if (j <= k if kind == "le" else j >= k))
        assert got == want, (n, k, kind)


def test_seq_counter_outputs_are_lower_bounds():
    nv = [5]

    def new_var():
        nv[0] += 1
        return nv[0]

    clauses, out = seq_counter([1, 2, 3, 4, 5], 3, new_var)
    s = Solver(clauses, nvars=nv[0])
    for assign in itertools.product([False, True], repeat=5):
        lits = [v if b else -v for v, b in zip(range(1, 6), assign)]
        k = sum(assign)
        for j in range(3):
            # out[j] may only be false when fewer than j + 1 inputs are true
            assert s.solve(lits + [-out[j]]) == (k <= j)


def test_enumerate_projected_models():
    clauses = [[1, 2], [-1, 3]]
    got = enumerate_models(CNF(nvars=4, clauses=clauses), [1, 2, 3])
    assert len(got) == brute_count(clauses, 4, [1, 2, 3])
    assert len({tuple(sorted(m.items())) for m in got}) == len(got)


def test_enumerate_leaves_live_solver_unchanged():
    s = Solver([[1, 2, 3]], nvars=3)
    assert len(enumerate_models(s, [1, 2, 3])) == 7
    assert len(enumerate_models(s, [1, 2, 3])) == 7


def test_optimize_single_objective_vs_brute_force():
    rng = random.Random(5)
    for _ in range(30):
        n = 8
        clauses = random_3cnf(rng, n, 14)
        if not brute_sat(clauses, n):
            continue
        best = min(sum(bits) for bits in itertools.product([0, 1], repeat=n)
                   if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses))
        r = optimize(CNF(nvars=n, clauses=clauses), [Objective(list(range(1, n + 1)))])
        assert r.optimal and r.values == [best]


def test_lexicographic_order_is_strict():
    # x1 + x2 >= 1; prefer few of {1,2}, then many of {2,3}
    clauses = [[1, 2], [-2, -3]]
    r = optimize(CNF(nvars=3, clauses=clauses),
                 [Objective([1, 2], "min"), Objective([2, 3], "max")])
    assert r.values == [1, 1]
    assert r.history[0][-1] == 1


def test_optimize_unsat_raises():
    with pytest.raises(OptimizeError):
        optimize(CNF(nvars=1, clauses=[[1], [-1]]), [Objective([1])])
