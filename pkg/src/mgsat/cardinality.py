"""Clause-level cardinality encodings over DIMACS literals."""
from __future__ import annotations

from typing import Callable, Sequence


def seq_counter(lits: Sequence[int], k: int, new_var: Callable[[], int]) -> tuple[list[list[int]], list[int]]:
    """Sequential counter with unary outputs.

    Returns ``(clauses, out)`` where ``out[j]`` is forced true whenever at
    least ``j + 1`` of ``lits`` are true (``j < k``).  Asserting ``-out[j]``
    therefore bounds the count by ``j``.  Only the upward implications are
    encoded, which is all an upper bound needs.
    """
    n = len(lits)
    clauses: list[list[int]] = []
    if n == 0 or k == 0:
        return clauses, []
    prev = None
    for i, x in enumerate(lits):
        width = min(k, i + 1)
        cur = [new_var() for _ in range(width)]
        clauses.append([-x, cur[0]])
        if prev is not None:
            for j in range(len(prev)):
                clauses.append([-prev[j], cur[j]])
                if j + 1 < width:
                    clauses.append([-x, -prev[j], cur[j + 1]])
        prev = cur
    return clauses, prev


def at_most(lits: Sequence[int], k: int, new_var: Callable[[], int]) -> list[list[int]]:
    if k >= len(lits):
        return []
    if k < 0:
        return [[]]
    if k == 0:
        return [[-l] for l in lits]
    clauses, out = seq_counter(lits, k + 1, new_var)
    clauses.append([-out[k]])
    return clauses


def at_least(lits: Sequence[int], k: int, new_var: Callable[[], int]) -> list[list[int]]:
    return at_most([-l for l in lits], len(lits) - k, new_var)
