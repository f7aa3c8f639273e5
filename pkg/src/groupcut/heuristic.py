"""Multi-start randomized construction and descent for both grouping models.

Each restart builds a partition in three phases: far-apart seed items, one
per group; cheapest-insertion fill of the remaining items; best-improvement
descent (item relocations when sizes are free, cross-group pair swaps when
sizes are fixed).  Construction steps are randomized: the best candidate is
taken with probability ``best_prob`` (default 2/3) and the runner-up
otherwise, which diversifies restarts.

Restarts are independent: restart ``r`` draws its uniforms from a splitmix64
stream seeded with ``base_seed XOR r``, so results are reproducible for a
fixed seed regardless of execution order or worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    DistanceMatrix,
    FixedSizes,
    GroupSpec,
    Partition,
    VariableCount,
    canonical_labels,
    check_spec,
    partition_cost,
)
from .validation import check_labels

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

__all__ = [
    "GraspConfig",
    "SolveResult",
    "RandomStream",
    "seed_groups",
    "greedy_fill",
    "descent_relocate",
    "descent_swap",
    "multistart",
]

_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_U53 = 2.0**-53


def _uniform_block(seed: int, offset: int, count: int) -> np.ndarray:
    """``count`` uniforms in [0,1) from the splitmix64 stream at ``offset``."""
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    z = np.uint64(seed % (1 << 64)) + _GAMMA * idx
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _U53


class RandomStream:
    """Stateful view over a splitmix64 uniform sequence."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._drawn = 0

    def uniforms(self, count: int) -> np.ndarray:
        block = _uniform_block(self.seed, self._drawn, count)
        self._drawn += count
        return block


@dataclass(frozen=True)
class GraspConfig:
    """Multi-start configuration; ``model`` picks fixed or variable sizes."""

    model: GroupSpec
    restarts: int = 10000
    base_seed: int = 0
    best_prob: float = 2.0 / 3.0
    n_jobs: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError(f"restarts must be positive, got {self.restarts}")
        if not 0.0 < self.best_prob <= 1.0:
            raise ValueError(f"best_prob must be in (0, 1], got {self.best_prob}")
        if self.n_jobs < 1:
            raise ValueError(f"n_jobs must be positive, got {self.n_jobs}")


@dataclass(frozen=True)
class SolveResult:
    """Best partition over all restarts, with how often it was reached."""

    best_partition: Partition
    best_cost: int | float
    times_best: int
    elapsed: float
    restarts_run: int


@njit(cache=True)
def _seed_kernel(d, p, best_prob, uniforms, cursor, seeds):
    """Pick p far-apart seed items; returns the uniform cursor."""
    n = d.shape[0]
    if p == 1:
        seeds[0] = 0
        return cursor
    bi = 0
    bj = 1
    bv = d[0, 1]
    si = -1
    sj = -1
    sv = -np.inf
    for i in range(n - 1):
        for j in range(i + 1, n):
            if i == 0 and j == 1:
                continue
            v = d[i, j]
            if v > bv:
                sv = bv
                si = bi
                sj = bj
                bv = v
                bi = i
                bj = j
            elif v > sv:
                sv = v
                si = i
                sj = j
    if si >= 0:
        u = uniforms[cursor]
        cursor += 1
        if u >= best_prob:
            bi = si
            bj = sj
    seeds[0] = bi
    seeds[1] = bj
    chosen = np.zeros(n, dtype=np.bool_)
    chosen[bi] = True
    chosen[bj] = True
    mind = np.empty(n, dtype=np.float64)
    for t in range(n):
        a = d[t, bi]
        b = d[t, bj]
        mind[t] = a if a < b else b
    for k in range(2, p):
        b_item = -1
        b_val = -np.inf
        s_item = -1
        s_val = -np.inf
        for t in range(n):
            if chosen[t]:
                continue
            v = mind[t]
            if v > b_val:
                s_val = b_val
                s_item = b_item
                b_val = v
                b_item = t
            elif v > s_val:
                s_val = v
                s_item = t
        pick = b_item
        if s_item >= 0:
            u = uniforms[cursor]
            cursor += 1
            if u >= best_prob:
                pick = s_item
        seeds[k] = pick
        chosen[pick] = True
        for t in range(n):
            v = d[t, pick]
            if v < mind[t]:
                mind[t] = v
    return cursor


@njit(cache=True)
def _group_sums(d, labels, p):
    """S[i, k] = total distance from item i to the items assigned to group k."""
    n = d.shape[0]
    s = np.zeros((n, p), dtype=np.float64)
    for j in range(n):
        g = labels[j]
        if g >= 0:
            for t in range(n):
                s[t, g] += d[t, j]
    return s


@njit(cache=True)
def _fill_kernel(d, labels, caps, best_prob, uniforms, cursor, s):
    """Assign every unlabeled item by cheapest insertion; returns the cursor.

    ``caps[k] < 0`` means group k is uncapacitated.  ``s`` must match
    ``labels`` on entry and is kept up to date.
    """
    n = d.shape[0]
    p = caps.shape[0]
    cnt = np.zeros(p, dtype=np.int64)
    remaining = 0
    for i in range(n):
        if labels[i] >= 0:
            cnt[labels[i]] += 1
        else:
            remaining += 1
    while remaining > 0:
        b_val = np.inf
        b_item = -1
        b_grp = -1
        s_val = np.inf
        s_item = -1
        s_grp = -1
        for i in range(n):
            if labels[i] >= 0:
                continue
            for k in range(p):
                if caps[k] >= 0 and cnt[k] >= caps[k]:
                    continue
                v = s[i, k]
                if v < b_val:
                    s_val = b_val
                    s_item = b_item
                    s_grp = b_grp
                    b_val = v
                    b_item = i
                    b_grp = k
                elif v < s_val:
                    s_val = v
                    s_item = i
                    s_grp = k
        item = b_item
        grp = b_grp
        if s_item >= 0:
            u = uniforms[cursor]
            cursor += 1
            if u >= best_prob:
                item = s_item
                grp = s_grp
        labels[item] = grp
        cnt[grp] += 1
        remaining -= 1
        for t in range(n):
            s[t, grp] += d[t, item]
    return cursor


@njit(cache=True)
def _relocate_kernel(d, labels, p, s):
    """Best-improvement relocation descent; never empties a group."""
    n = d.shape[0]
    cnt = np.zeros(p, dtype=np.int64)
    for i in range(n):
        cnt[labels[i]] += 1
    while True:
        b_val = 0.0
        b_item = -1
        b_grp = -1
        for i in range(n):
            g = labels[i]
            if cnt[g] == 1:
                continue
            base = s[i, g]
            for k in range(p):
                if k == g:
                    continue
                delta = s[i, k] - base
                if delta < b_val:
                    b_val = delta
                    b_item = i
                    b_grp = k
        if b_item < 0:
            break
        g = labels[b_item]
        labels[b_item] = b_grp
        cnt[g] -= 1
        cnt[b_grp] += 1
        for t in range(n):
            v = d[t, b_item]
            s[t, g] -= v
            s[t, b_grp] += v


@njit(cache=True)
def _swap_kernel(d, labels, s):
    """Best-improvement cross-group pair-swap descent; sizes are preserved."""
    n = d.shape[0]
    while True:
        b_val = 0.0
        b_a = -1
        b_b = -1
        for a in range(n - 1):
            ga = labels[a]
            for b in range(a + 1, n):
                gb = labels[b]
                if gb == ga:
                    continue
                delta = s[a, gb] - s[a, ga] + s[b, ga] - s[b, gb] - 2.0 * d[a, b]
                if delta < b_val:
                    b_val = delta
                    b_a = a
                    b_b = b
        if b_a < 0:
            break
        ga = labels[b_a]
        gb = labels[b_b]
        for t in range(n):
            va = d[t, b_a]
            vb = d[t, b_b]
            s[t, ga] += vb - va
            s[t, gb] += va - vb
        labels[b_a] = gb
        labels[b_b] = ga


@njit(cache=True)
def _restart_kernel(d, caps, fixed_mode, best_prob, uniforms):
    """One full restart: seeds, fill, descent.  Returns (labels, cost)."""
    n = d.shape[0]
    p = caps.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    seeds = np.empty(p, dtype=np.int64)
    cursor = _seed_kernel(d, p, best_prob, uniforms, 0, seeds)
    for k in range(p):
        labels[seeds[k]] = k
    s = _group_sums(d, labels, p)
    _fill_kernel(d, labels, caps, best_prob, uniforms, cursor, s)
    if fixed_mode:
        _swap_kernel(d, labels, s)
    else:
        _relocate_kernel(d, labels, p, s)
    cost = 0.0
    for i in range(n):
        cost += s[i, labels[i]]
    return labels, cost / 2.0


def _caps_for(spec: GroupSpec, n: int) -> tuple[np.ndarray, bool]:
    check_spec(spec, n)
    if isinstance(spec, FixedSizes):
        return np.array(spec.sizes, dtype=np.int64), True
    return np.full(spec.p, -1, dtype=np.int64), False


def seed_groups(
    matrix: DistanceMatrix, p: int, rng: RandomStream, best_prob: float = 2.0 / 3.0
) -> np.ndarray:
    """Select one far-apart seed item per group.

    The first two seeds are a maximal-distance pair; each following seed
    maximizes its minimum distance to the seeds chosen so far.  Every step
    takes the best candidate with probability ``best_prob``, else the
    runner-up.
    """
    if p > matrix.n:
        raise ValueError(f"cannot seed {p} groups with {matrix.n} items")
    if p < 1:
        raise ValueError("group count must be positive")
    d = np.ascontiguousarray(matrix.values, dtype=np.float64)
    seeds = np.empty(p, dtype=np.int64)
    uniforms = rng.uniforms(max(p, 1))
    _seed_kernel(d, p, best_prob, uniforms, 0, seeds)
    return seeds


def greedy_fill(
    matrix: DistanceMatrix,
    seeded_labels,
    spec: GroupSpec,
    rng: RandomStream,
    best_prob: float = 2.0 / 3.0,
) -> Partition:
    """Complete a partial labeling (-1 = unassigned) by cheapest insertion.

    Each step inserts the (item, group) pair that increases the cost least,
    with the usual best/runner-up randomization; a fixed-size group stops
    accepting items once it reaches its capacity.
    """
    labels = check_labels(seeded_labels, matrix.n).copy()
    caps, _ = _caps_for(spec, matrix.n)
    counts = np.bincount(labels[labels >= 0], minlength=caps.shape[0])
    if np.any((caps >= 0) & (counts > caps)):
        raise ValueError("a group already exceeds its capacity")
    d = np.ascontiguousarray(matrix.values, dtype=np.float64)
    s = _group_sums(d, labels, caps.shape[0])
    uniforms = rng.uniforms(matrix.n)
    _fill_kernel(d, labels, caps, best_prob, uniforms, 0, s)
    return Partition(labels, p=caps.shape[0])


def descent_relocate(matrix: DistanceMatrix, part: Partition) -> Partition:
    """Relocate items between groups until no single move improves the cost."""
    labels = part.labels.copy()
    d = np.ascontiguousarray(matrix.values, dtype=np.float64)
    s = _group_sums(d, labels, part.p)
    _relocate_kernel(d, labels, part.p, s)
    return Partition(labels, p=part.p)


def descent_swap(matrix: DistanceMatrix, part: Partition) -> Partition:
    """Swap cross-group item pairs until no exchange improves the cost."""
    labels = part.labels.copy()
    d = np.ascontiguousarray(matrix.values, dtype=np.float64)
    s = _group_sums(d, labels, part.p)
    _swap_kernel(d, labels, s)
    return Partition(labels, p=part.p)


def _run_range(d, caps, fixed_mode, best_prob, base_seed, start, stop):
    """Best (cost, labels) over restarts [start, stop) plus the hit count."""
    n = d.shape[0]
    best_cost = np.inf
    best_labels = None
    times = 0
    for r in range(start, stop):
        uniforms = _uniform_block(base_seed ^ r, 0, n)
        labels, cost = _restart_kernel(d, caps, fixed_mode, best_prob, uniforms)
        if cost < best_cost:
            best_cost = cost
            best_labels = canonical_labels(labels)
            times = 1
        elif cost == best_cost:
            times += 1
            cand = canonical_labels(labels)
            if tuple(cand) < tuple(best_labels):
                best_labels = cand
    return best_cost, best_labels, times


def multistart(matrix: DistanceMatrix, cfg: GraspConfig) -> SolveResult:
    """Run independent GRASP restarts and keep the best partition found.

    Ties across restarts break to the lexicographically smallest canonical
    partition; ``times_best`` counts the restarts that reached the best cost.
    The result depends only on the matrix, the config, and ``base_seed``.
    """
    caps, fixed_mode = _caps_for(cfg.model, matrix.n)
    d = np.ascontiguousarray(matrix.values, dtype=np.float64)
    started = time.perf_counter()
    jobs = min(cfg.n_jobs, cfg.restarts)
    if jobs <= 1:
        best_cost, best_labels, times = _run_range(
            d, caps, fixed_mode, cfg.best_prob, cfg.base_seed, 0, cfg.restarts
        )
    else:
        bounds = np.linspace(0, cfg.restarts, 4 * jobs + 1, dtype=int)
        chunks = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if a < b]
        best_cost, best_labels, times = np.inf, None, 0
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_run_range, d, caps, fixed_mode, cfg.best_prob, cfg.base_seed, a, b)
                for a, b in chunks
            ]
            for future in futures:
                cost, labels, count = future.result()
                if cost < best_cost:
                    best_cost, best_labels, times = cost, labels, count
                elif cost == best_cost:
                    times += count
                    if tuple(labels) < tuple(best_labels):
                        best_labels = labels
    elapsed = time.perf_counter() - started
    part = Partition(best_labels, p=caps.shape[0])
    cost = partition_cost(matrix, part)
    return SolveResult(part, cost, times, elapsed, cfg.restarts)
