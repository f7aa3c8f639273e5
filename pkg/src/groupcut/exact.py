"""Exhaustive enumeration and exact solution-space counting.

Counts are exact Python integers (the fixed-size count is a multinomial over
unlabeled groups, the variable-size count a Stirling number of the second
kind).  Enumeration visits each unlabeled partition exactly once, so the
visited count equals the corresponding combination count; a budget guard
refuses instances whose count exceeds the caller's limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .core import DistanceMatrix, Partition, canonical_labels

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

__all__ = [
    "DEFAULT_BUDGET",
    "EnumerationBudgetError",
    "EnumerationResult",
    "count_fixed",
    "count_variable",
    "format_scientific",
    "enumerate_fixed",
    "enumerate_variable",
]

DEFAULT_BUDGET = 10**8


class EnumerationBudgetError(ValueError):
    """Raised when the solution space exceeds the enumeration budget."""

    def __init__(self, count: int, budget: int):
        self.count = count
        self.budget = budget
        super().__init__(
            f"enumeration refused: {count} feasible partitions "
            f"(about {format_scientific(count)}) exceed the budget of {budget}"
        )


@dataclass(frozen=True)
class EnumerationResult:
    optimum: int | float
    argmin: Partition
    visited: int


def count_fixed(n: int, sizes) -> int:
    """Number of ways to split ``n`` items into unlabeled groups of the given sizes."""
    sizes = [int(s) for s in sizes]
    if any(s < 1 for s in sizes):
        raise ValueError(f"group sizes must be positive, got {sizes}")
    if sum(sizes) != n:
        raise ValueError(f"group sizes sum to {sum(sizes)}, expected {n}")
    total = math.factorial(n)
    for s in sizes:
        total //= math.factorial(s)
    multiplicity: dict[int, int] = {}
    for s in sizes:
        multiplicity[s] = multiplicity.get(s, 0) + 1
    for m in multiplicity.values():
        total //= math.factorial(m)
    return total


def count_variable(n: int, p: int) -> int:
    """Number of partitions of ``n`` items into exactly ``p`` non-empty groups.

    Computed by the recursion ``P(n,p) = P(n-1,p-1) + p*P(n-1,p)`` and checked
    against the inclusion-exclusion closed form before returning.
    """
    if not 1 <= p <= n:
        raise ValueError(f"group count {p} out of range 1..{n}")
    table = [[0] * (p + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        table[i][1] = 1
        for k in range(2, min(i, p) + 1):
            table[i][k] = table[i - 1][k - 1] + k * table[i - 1][k]
    value = table[n][p]
    closed = sum((-1) ** (p - j) * math.comb(p, j) * j**n for j in range(1, p + 1))
    closed //= math.factorial(p)
    if value != closed:
        raise AssertionError(f"recursion {value} != closed form {closed} for ({n},{p})")
    return value


def format_scientific(value: int, digits: int = 3) -> str:
    """Scientific notation with ``digits`` significant digits, e.g. ``1.06E+11``.

    Rounds half away from zero on the truncated digit.
    """
    if value < 0:
        raise ValueError("counts are nonnegative")
    if value == 0:
        return "0.00E+00"
    d = Decimal(int(value))
    exp = d.adjusted()
    quantum = Decimal(1).scaleb(-(digits - 1))
    mantissa = d.scaleb(-exp).quantize(quantum, rounding=ROUND_HALF_UP)
    if mantissa >= 10:
        mantissa = (mantissa / 10).quantize(quantum, rounding=ROUND_HALF_UP)
        exp += 1
    return f"{mantissa}E+{exp:02d}"


@njit(cache=True)
def _enum_fixed_kernel(d, caps):
    """Visit every unlabeled partition with the given size profile.

    ``caps`` must group equal sizes adjacently; an item may only start the
    first still-empty group of a size class.  Returns (visited, best cost,
    canonical argmin labels).
    """
    n = d.shape[0]
    p = caps.shape[0]
    labels = np.zeros(n, dtype=np.int64)
    cnt = np.zeros(p, dtype=np.int64)
    prefix = np.zeros(n + 1, dtype=np.float64)
    best_cost = np.inf
    best = np.zeros(n, dtype=np.int64)
    scratch = np.zeros(n, dtype=np.int64)
    remap = np.zeros(p, dtype=np.int64)
    visited = 0
    i = 0
    g = 0
    while True:
        k = -1
        for c in range(g, p):
            if cnt[c] >= caps[c]:
                continue
            if cnt[c] == 0 and c > 0 and caps[c - 1] == caps[c] and cnt[c - 1] == 0:
                continue
            k = c
            break
        if k >= 0:
            add = 0.0
            for j in range(i):
                if labels[j] == k:
                    add += d[i, j]
            labels[i] = k
            prefix[i + 1] = prefix[i] + add
            cnt[k] += 1
            if i == n - 1:
                visited += 1
                cost = prefix[n]
                if cost <= best_cost:
                    nxt = 0
                    for t in range(p):
                        remap[t] = -1
                    for t in range(n):
                        v = labels[t]
                        if remap[v] < 0:
                            remap[v] = nxt
                            nxt += 1
                        scratch[t] = remap[v]
                    take = cost < best_cost
                    if not take and visited > 1:
                        for t in range(n):
                            if scratch[t] != best[t]:
                                take = scratch[t] < best[t]
                                break
                    if take or visited == 1:
                        best_cost = cost
                        for t in range(n):
                            best[t] = scratch[t]
                cnt[k] -= 1
                g = k + 1
            else:
                i += 1
                g = 0
        else:
            if i == 0:
                break
            i -= 1
            k = labels[i]
            cnt[k] -= 1
            g = k + 1
    return visited, best_cost, best


@njit(cache=True)
def _enum_variable_kernel(d, p):
    """Visit every restricted-growth string of length n with exactly p labels.

    Strings are generated in lexicographic order, so keeping the first
    minimum yields the lexicographically smallest optimal partition.
    Returns (visited, best cost, argmin labels).
    """
    n = d.shape[0]
    labels = np.zeros(n, dtype=np.int64)
    used = np.zeros(n + 1, dtype=np.int64)
    prefix = np.zeros(n + 1, dtype=np.float64)
    best_cost = np.inf
    best = np.zeros(n, dtype=np.int64)
    visited = 0
    used[1] = 1
    if n == 1:
        if p == 1:
            return 1, 0.0, best
        return 0, best_cost, best
    i = 1
    g = 0
    while True:
        u = used[i]
        top = u if u < p else p - 1
        k = -1
        for c in range(g, top + 1):
            new_u = u + 1 if c == u else u
            if new_u + (n - 1 - i) >= p:
                k = c
                break
        if k >= 0:
            add = 0.0
            for j in range(i):
                if labels[j] == k:
                    add += d[i, j]
            labels[i] = k
            prefix[i + 1] = prefix[i] + add
            used[i + 1] = u + 1 if k == u else u
            if i == n - 1:
                if used[n] == p:
                    visited += 1
                    cost = prefix[n]
                    if cost < best_cost:
                        best_cost = cost
                        for t in range(n):
                            best[t] = labels[t]
                g = k + 1
            else:
                i += 1
                g = 0
        else:
            if i == 1:
                break
            i -= 1
            g = labels[i] + 1
    return visited, best_cost, best


def _as_cost(value: float, matrix: DistanceMatrix):
    return int(round(value)) if matrix.is_integral else float(value)


def enumerate_fixed(
    matrix: DistanceMatrix, sizes, budget: int = DEFAULT_BUDGET
) -> EnumerationResult:
    """Optimal partition with prescribed group sizes by total enumeration."""
    sizes = [int(s) for s in sizes]
    total = count_fixed(matrix.n, sizes)
    if total > budget:
        raise EnumerationBudgetError(total, budget)
    order = np.argsort(-np.array(sizes, dtype=np.int64), kind="stable")
    caps = np.array([sizes[i] for i in order], dtype=np.int64)
    d = np.ascontiguousarray(matrix.values, dtype=np.float64)
    visited, cost, labels = _enum_fixed_kernel(d, caps)
    if visited != total:
        raise AssertionError(f"visited {visited} partitions, expected {total}")
    part = Partition(canonical_labels(labels), p=len(sizes))
    return EnumerationResult(_as_cost(cost, matrix), part, visited)


def enumerate_variable(
    matrix: DistanceMatrix, p: int, budget: int = DEFAULT_BUDGET
) -> EnumerationResult:
    """Optimal partition into exactly ``p`` non-empty groups by total enumeration."""
    total = count_variable(matrix.n, p)
    if total > budget:
        raise EnumerationBudgetError(total, budget)
    d = np.ascontiguousarray(matrix.values, dtype=np.float64)
    visited, cost, labels = _enum_variable_kernel(d, p)
    if visited != total:
        raise AssertionError(f"visited {visited} partitions, expected {total}")
    part = Partition(labels, p=p)
    return EnumerationResult(_as_cost(cost, matrix), part, visited)
