import numpy as np
import pytest

from groupcut import (
    DistanceMatrix,
    FixedSizes,
    Partition,
    VariableCount,
    canonicalize,
    insertion_cost,
    partition_cost,
    removal_gain,
    validate_partition,
)

from conftest import pairwise_cost, random_surjective_labels, random_symmetric_int


def small_matrix():
    return DistanceMatrix(np.array([[0, 1, 2], [1, 0, 3], [2, 3, 0]]))


class TestPartitionCost:
    def test_singletons_cost_zero(self):
        m = small_matrix()
        assert partition_cost(m, Partition([0, 1, 2])) == 0

    def test_single_group_sums_all_pairs(self):
        m = small_matrix()
        assert partition_cost(m, Partition([0, 0, 0])) == 6

    def test_every_two_two_split_matches_pair_loop(self, rng):
        d = random_symmetric_int(rng, 4)
        m = DistanceMatrix(d)
        for labels in ([0, 0, 1, 1], [0, 1, 0, 1], [0, 1, 1, 0]):
            assert partition_cost(m, Partition(labels)) == pairwise_cost(d, labels)

    def test_random_instances_match_oracle_exactly(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 12))
            p = int(rng.integers(1, n + 1))
            d = random_symmetric_int(rng, n)
            labels = random_surjective_labels(rng, n, p)
            got = partition_cost(DistanceMatrix(d), Partition(labels, p=p))
            assert got == pairwise_cost(d, labels)
            assert isinstance(got, int)

    def test_float_matrices_match_oracle_within_tolerance(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 10))
            d = random_symmetric_int(rng, n).astype(float) * rng.uniform(0.1, 2.0)
            np.fill_diagonal(d, 0.0)
            labels = random_surjective_labels(rng, n, 2)
            got = partition_cost(DistanceMatrix(d), Partition(labels, p=2))
            want = pairwise_cost(d, labels)
            assert got == pytest.approx(want, rel=1e-12)

    def test_dimension_mismatch_raises(self):
        with pytest.raises(ValueError):
            partition_cost(small_matrix(), Partition([0, 0]))

    def test_cost_invariant_under_relabeling(self, rng):
        d = random_symmetric_int(rng, 8)
        m = DistanceMatrix(d)
        labels = random_surjective_labels(rng, 8, 3)
        part = Partition(labels, p=3)
        assert partition_cost(m, canonicalize(part)) == partition_cost(m, part)


class TestIncrementalDeltas:
    def test_insertion_into_empty_group_is_free(self):
        assert insertion_cost(small_matrix(), [], 0) == 0

    def test_insertion_next_to_single_member(self):
        assert insertion_cost(small_matrix(), [1], 0) == 1

    def test_insertion_matches_cost_difference(self, rng):
        d = random_symmetric_int(rng, 10)
        m = DistanceMatrix(d)
        members = list(rng.choice(9, size=5, replace=False) + 1)
        labels = np.ones(10, dtype=int)
        for j in members:
            labels[j] = 0
        before = pairwise_cost(d, labels)
        labels[0] = 0
        after = pairwise_cost(d, labels)
        assert insertion_cost(m, members, 0) == after - before

    def test_insertion_rejects_existing_member(self):
        with pytest.raises(ValueError):
            insertion_cost(small_matrix(), [0, 1], 0)

    def test_removal_from_singleton_is_free(self):
        assert removal_gain(small_matrix(), [2], 2) == 0

    def test_removal_from_pair(self):
        assert removal_gain(small_matrix(), [0, 2], 0) == 2

    def test_removal_matches_cost_difference(self, rng):
        d = random_symmetric_int(rng, 10)
        m = DistanceMatrix(d)
        members = list(rng.choice(10, size=6, replace=False))
        labels = np.ones(10, dtype=int)
        for j in members:
            labels[j] = 0
        before = pairwise_cost(d, labels)
        labels[members[0]] = 1
        after = pairwise_cost(d, labels)
        assert removal_gain(m, members, members[0]) == before - after

    def test_removal_rejects_non_member(self):
        with pytest.raises(ValueError):
            removal_gain(small_matrix(), [0, 1], 2)


class TestCanonicalize:
    def test_first_occurrence_relabeling(self):
        part = canonicalize(Partition([1, 0, 1, 2]))
        assert part.labels.tolist() == [0, 1, 0, 2]

    def test_idempotent(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 15))
            p = int(rng.integers(1, n + 1))
            part = Partition(random_surjective_labels(rng, n, p), p=p)
            once = canonicalize(part)
            assert canonicalize(once) == once

    def test_relabel_invariance(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 15))
            p = int(rng.integers(1, n + 1))
            labels = random_surjective_labels(rng, n, p)
            perm = rng.permutation(p)
            relabeled = perm[labels]
            assert canonicalize(Partition(labels, p=p)) == canonicalize(
                Partition(relabeled, p=p)
            )

    def test_same_comembership_same_canonical_form(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 12))
            p = int(rng.integers(1, n + 1))
            a = random_surjective_labels(rng, n, p)
            b = rng.permutation(p)[a]
            same_a = a[:, None] == a[None, :]
            same_b = b[:, None] == b[None, :]
            assert np.array_equal(same_a, same_b)
            assert canonicalize(Partition(a, p=p)) == canonicalize(Partition(b, p=p))


class TestValidate:
    def test_exact_sizes_ok(self):
        part = Partition([0, 0, 1, 1])
        assert validate_partition(part, FixedSizes([2, 2]), 4) == []

    def test_size_violation_on_both_groups(self):
        part = Partition([0, 0, 0, 1])
        violations = validate_partition(part, FixedSizes([2, 2]), 4)
        assert len(violations) == 2

    def test_empty_group_detected(self):
        part = Partition([0, 0], p=2)
        violations = validate_partition(part, VariableCount(2), 2)
        assert any("empty" in v for v in violations)

    def test_variable_ok(self):
        part = Partition([0, 1, 0])
        assert validate_partition(part, VariableCount(2), 3) == []

    def test_length_mismatch_reported(self):
        part = Partition([0, 1])
        assert validate_partition(part, VariableCount(2), 3)

    def test_unequal_sizes_any_label_order(self):
        assert validate_partition(Partition([0, 1, 1]), FixedSizes([2, 1]), 3) == []
        assert validate_partition(Partition([0, 0, 1]), FixedSizes([2, 1]), 3) == []


class TestMatrixInvariants:
    def test_rejects_negative_entries(self):
        with pytest.raises(ValueError):
            DistanceMatrix(np.array([[0, -1], [-1, 0]]))

    def test_rejects_asymmetry(self):
        with pytest.raises(ValueError):
            DistanceMatrix(np.array([[0, 1], [2, 0]]))

    def test_rejects_nonzero_diagonal(self):
        with pytest.raises(ValueError):
            DistanceMatrix(np.array([[1, 2], [2, 0]]))

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            DistanceMatrix(np.zeros((2, 3)))

    def test_rejects_nan(self):
        bad = np.array([[0.0, np.nan], [np.nan, 0.0]])
        with pytest.raises(ValueError):
            DistanceMatrix(bad)

    def test_integral_flag(self):
        assert DistanceMatrix(np.array([[0, 1], [1, 0]])).is_integral
        assert not DistanceMatrix(np.array([[0.0, 1.0], [1.0, 0.0]])).is_integral


class TestTextFormats:
    def test_matrix_roundtrip_int(self, rng):
        d = random_symmetric_int(rng, 5)
        m = DistanceMatrix(d)
        again = DistanceMatrix.from_text(m.to_text())
        assert again.is_integral
        assert np.array_equal(again.values, m.values)

    def test_matrix_roundtrip_float(self):
        d = np.array([[0.0, 1.5], [1.5, 0.0]])
        m = DistanceMatrix(d)
        again = DistanceMatrix.from_text(m.to_text())
        assert not again.is_integral
        assert np.array_equal(again.values, m.values)

    def test_matrix_bad_entry_count(self):
        with pytest.raises(ValueError):
            DistanceMatrix.from_text("2\n0 1\n1")

    def test_partition_roundtrip(self):
        part = Partition([0, 1, 0, 2])
        assert Partition.from_text(part.to_text()) == part
