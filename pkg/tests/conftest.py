"""Shared fixtures and independent oracles for the test suite.

The oracles here are deliberately naive (double loops, itertools sweeps) so
they stay independent of the production code paths they check.
"""

import numpy as np
import pytest

from groupcut import DistanceMatrix, bundled_cities, build_matrix


def pairwise_cost(d, labels):
    """Double-loop cost oracle: sum d[i][j] over same-group pairs i < j."""
    n = len(labels)
    total = 0
    for i in range(n):
        for j in range(i + 1, n):
            if labels[i] == labels[j]:
                total += d[i][j]
    return total


def random_symmetric_int(rng, n, high=100):
    d = rng.integers(1, high, size=(n, n))
    d = np.triu(d, 1)
    return d + d.T


def random_surjective_labels(rng, n, p):
    """Random labels using every group at least once."""
    labels = rng.integers(0, p, size=n)
    anchors = rng.choice(n, size=p, replace=False)
    labels[anchors] = np.arange(p)
    return labels


def random_sized_labels(rng, sizes):
    """Random labels with exactly the given group sizes."""
    labels = np.repeat(np.arange(len(sizes)), sizes)
    return rng.permutation(labels)


@pytest.fixture(scope="session")
def cities():
    return bundled_cities()


@pytest.fixture(scope="session")
def city_matrix_12(cities):
    return build_matrix(cities[:12], rounding="int")


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
