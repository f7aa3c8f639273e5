"""Scikit-learn style estimators over the grouping solvers.

Both estimators consume a precomputed distance matrix (shape ``(n, n)``)
and expose cluster labels through ``labels_``, so they slot into pipelines
and model-selection tooling that expects the clustering API.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from .core import DistanceMatrix, FixedSizes, VariableCount
from .exact import DEFAULT_BUDGET, enumerate_fixed, enumerate_variable
from .heuristic import GraspConfig, multistart

__all__ = ["GraspPartitioner", "ExactPartitioner"]


def _resolve_spec(n_groups, group_sizes):
    if (n_groups is None) == (group_sizes is None):
        raise ValueError("specify exactly one of n_groups or group_sizes")
    if group_sizes is not None:
        return FixedSizes(group_sizes)
    return VariableCount(int(n_groups))


class GraspPartitioner(ClusterMixin, BaseEstimator):
    """Multi-start randomized heuristic for minimum intra-group distance.

    Parameters
    ----------
    n_groups : int, optional
        Number of groups with free sizes (mutually exclusive with
        ``group_sizes``).
    group_sizes : sequence of int, optional
        Prescribed group sizes; must sum to the number of items.
    restarts : int, default=10000
        Number of independent randomized restarts.
    best_prob : float, default=2/3
        Probability of taking the best construction candidate over the
        runner-up.
    random_state : int, default=0
        Base seed; restart r is seeded with ``random_state XOR r``.
    n_jobs : int, default=1
        Worker processes for the restarts; the result does not depend on it.

    Attributes
    ----------
    labels_ : ndarray of shape (n,)
        Canonical group label per item.
    cost_ : int or float
        Total intra-group pairwise distance of ``labels_``.
    times_best_ : int
        Restarts that reached ``cost_``.
    n_restarts_ : int
        Restarts executed.
    elapsed_ : float
        Wall-clock seconds spent solving.
    """

    def __init__(
        self,
        n_groups=None,
        group_sizes=None,
        restarts=10000,
        best_prob=2.0 / 3.0,
        random_state=0,
        n_jobs=1,
    ):
        self.n_groups = n_groups
        self.group_sizes = group_sizes
        self.restarts = restarts
        self.best_prob = best_prob
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        matrix = X if isinstance(X, DistanceMatrix) else DistanceMatrix(np.asarray(X))
        spec = _resolve_spec(self.n_groups, self.group_sizes)
        cfg = GraspConfig(
            model=spec,
            restarts=self.restarts,
            base_seed=self.random_state,
            best_prob=self.best_prob,
            n_jobs=self.n_jobs,
        )
        result = multistart(matrix, cfg)
        self.n_features_in_ = matrix.n
        self.labels_ = result.best_partition.labels.copy()
        self.cost_ = result.best_cost
        self.times_best_ = result.times_best
        self.n_restarts_ = result.restarts_run
        self.elapsed_ = result.elapsed
        return self


class ExactPartitioner(ClusterMixin, BaseEstimator):
    """Optimal grouping by total enumeration; only viable for small instances.

    Parameters mirror :class:`GraspPartitioner`; ``max_combinations`` bounds
    the number of feasible partitions the solver is willing to visit.

    Attributes
    ----------
    labels_ : ndarray of shape (n,)
        Canonical optimal group label per item.
    cost_ : int or float
        Optimal total intra-group pairwise distance.
    n_visited_ : int
        Partitions enumerated (equals the solution-space count).
    """

    def __init__(self, n_groups=None, group_sizes=None, max_combinations=DEFAULT_BUDGET):
        self.n_groups = n_groups
        self.group_sizes = group_sizes
        self.max_combinations = max_combinations

    def fit(self, X, y=None):
        matrix = X if isinstance(X, DistanceMatrix) else DistanceMatrix(np.asarray(X))
        spec = _resolve_spec(self.n_groups, self.group_sizes)
        if isinstance(spec, FixedSizes):
            result = enumerate_fixed(matrix, spec.sizes, budget=self.max_combinations)
        else:
            result = enumerate_variable(matrix, spec.p, budget=self.max_combinations)
        self.n_features_in_ = matrix.n
        self.labels_ = result.argmin.labels.copy()
        self.cost_ = result.optimum
        self.n_visited_ = result.visited
        return self
