import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import equitile as eq
from equitile.errors import AdmissibilityError, InputError

from helpers import (
    A0,
    P0_FORWARD,
    PI0_CELLS,
    EMINUS,
    all_partitions,
    random_partition,
    random_weights,
)


class TestPartition:
    def test_validation(self):
        with pytest.raises(InputError):
            eq.Partition.from_cells([[0, 1], [1, 2]])  # overlap
        with pytest.raises(InputError):
            eq.Partition.from_cells([[0], [2]])  # gap
        with pytest.raises(InputError):
            eq.Partition.from_cells([[0], []])  # empty cell
        with pytest.raises(InputError):
            eq.Partition.from_cells([])

    def test_within_cell_sorting(self):
        p = eq.Partition.from_cells([[5, 1], [0, 3], [2, 4]])
        assert p.cells == ((1, 5), (0, 3), (2, 4))

    def test_canonical_orders_cells_by_min(self):
        p = eq.Partition.from_cells([[2], [1], [0]])
        assert p.canonical().cells == ((0,), (1,), (2,))

    def test_refines(self):
        fine = eq.Partition.from_cells([[0], [1], [2, 3]])
        coarse = eq.Partition.from_cells([[0, 1], [2, 3]])
        assert fine.refines(coarse)
        assert not coarse.refines(fine)
        assert fine.refines(fine)

    def test_json_round_trip(self):
        p = eq.Partition.from_cells(PI0_CELLS)
        d = p.to_dict()
        assert d == {"n": 6, "cells": [[1], [2, 6], [3, 4, 5]]}
        assert eq.Partition.from_dict(d) == p

    @given(st.lists(st.integers(0, 4), min_size=1, max_size=12))
    def test_from_labels_covers(self, labels):
        p = eq.Partition.from_labels(labels)
        assert p.n == len(labels)
        assert sorted(v for c in p.cells for v in c) == list(range(len(labels)))
        # canonical by construction: cells ordered by smallest element
        assert p == p.canonical()


class TestIndicatorMatrix:
    def test_singletons_identity(self):
        B = eq.indicator_matrix(eq.Partition.singletons(3))
        assert np.array_equal(B, np.eye(3))

    def test_single_cell_ones(self):
        B = eq.indicator_matrix(eq.Partition.single_cell(3))
        assert np.array_equal(B, np.ones((3, 1)))

    def test_example_pattern(self):
        B = eq.indicator_matrix(eq.Partition.from_cells(PI0_CELLS))
        expected = np.zeros((6, 3))
        expected[0, 0] = 1
        expected[[1, 5], 1] = 1
        expected[[2, 3, 4], 2] = 1
        assert np.array_equal(B, expected)

    def test_columns_orthogonal_with_cell_size_norms(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 15))
            p = random_partition(rng, n)
            B = eq.indicator_matrix(p)
            G = B.T @ B
            assert np.array_equal(G, np.diag(p.sizes))


class TestSuitableIndexing:
    def test_contiguous_is_identity(self):
        p = eq.Partition.from_cells([[0], [1, 2]])
        assert np.array_equal(eq.suitable_indexing_permutation(p), [0, 1, 2])

    def test_worked_example_matches(self):
        p = eq.Partition.from_cells(PI0_CELLS)
        assert np.array_equal(eq.suitable_indexing_permutation(p), P0_FORWARD)

    def test_reversed_singletons(self):
        p = eq.Partition.from_cells([[2], [1], [0]])
        assert np.array_equal(eq.suitable_indexing_permutation(p), [2, 1, 0])

    def test_cells_become_contiguous_in_order(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 16))
            p = random_partition(rng, n)
            perm = eq.suitable_indexing_permutation(p)
            assert sorted(perm) == list(range(n))
            off = 0
            for c in p.cells:
                assert sorted(perm[list(c)]) == list(range(off, off + len(c)))
                off += len(c)


class TestAdmissibility:
    def test_unit_weights_admissible(self):
        wi = eq.WeightedIndicator.unit(eq.Partition.single_cell(4))
        assert eq.is_admissible(wi)

    def test_zero_cell_rejected(self):
        p = eq.Partition.singletons(2)
        wi = eq.WeightedIndicator(p, np.array([1.0, 0.0]))
        assert not eq.is_admissible(wi)

    def test_zero_entry_inside_cell_ok(self):
        p = eq.Partition.single_cell(2)
        wi = eq.WeightedIndicator(p, np.array([1.0, 0.0]))
        assert eq.is_admissible(wi)

    def test_indicator_matrix_structure(self, rng):
        p = random_partition(rng, 8)
        w = random_weights(rng, p)
        wi = eq.WeightedIndicator(p, w)
        W = wi.matrix()
        G = W.conj().T @ W
        assert np.allclose(G, np.diag(wi.cell_norms() ** 2))
        for i, c in enumerate(p.cells):
            mask = np.zeros(8, dtype=bool)
            mask[list(c)] = True
            assert np.array_equal(W[mask, i], w[mask])
            assert np.all(W[~mask, i] == 0)


class TestCheckEquitable:
    def test_worked_example_front_equitable(self):
        wi = eq.WeightedIndicator.unit(eq.Partition.from_cells(PI0_CELLS))
        v = eq.check_equitable(A0, wi, side="front", tol=0.0)
        assert v.is_equitable
        assert v.max_residual == 0.0
        assert np.allclose(eq.generalized_quotient(A0, wi, -1.0).entries, EMINUS)

    def test_zero_matrix_equitable_both_sides(self, rng):
        p = random_partition(rng, 6)
        wi = eq.WeightedIndicator(p, random_weights(rng, p))
        for side in ("front", "rear"):
            v = eq.check_equitable(np.zeros((6, 6)), wi, side=side, tol=0.0)
            assert v.is_equitable and v.max_residual == 0.0

    def test_hand_computed_residual(self):
        # one cell: residual is the norm of (A w - e w)/||w|| with e the mean row sum
        A = np.array([[0.0, 1.0], [0.0, 0.0]])
        wi = eq.WeightedIndicator.unit(eq.Partition.single_cell(2))
        v = eq.check_equitable(A, wi, side="front", tol=1e-12)
        w = np.ones(2)
        e = (w @ (A @ w)) / 2.0
        expected = np.linalg.norm(A @ w - e * w) / np.sqrt(2.0)
        assert v.per_block_residuals[0, 0] == pytest.approx(expected, abs=1e-15)
        assert v.per_block_residuals[0, 0] == pytest.approx(0.5, abs=1e-15)
        assert not v.is_equitable

    def test_residuals_match_deviation_blocks(self, rng):
        for _ in range(10):
            n = int(rng.integers(2, 12))
            p = random_partition(rng, n)
            wi = eq.WeightedIndicator(p, random_weights(rng, p))
            A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            front, rear = eq.deviation_matrices(A, wi)
            for side, dev in (("front", front), ("rear", rear)):
                v = eq.check_equitable(A, wi, side=side)
                expected = np.array(
                    [[np.linalg.norm(dev.blocks[i][j]) for j in range(p.k)]
                     for i in range(p.k)]
                )
                assert np.allclose(v.per_block_residuals, expected, atol=1e-12)
                total = np.sqrt((v.per_block_residuals ** 2).sum())
                assert total == pytest.approx(np.linalg.norm(dev.assembled), abs=1e-12)

    def test_hermitian_front_iff_rear(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 10))
            k = int(rng.integers(1, n + 1))
            A, p, _ = _random_hermitian_equitable(rng, n, k)
            wi = eq.WeightedIndicator.unit(p)
            f = eq.check_equitable(A, wi, side="front", tol=1e-10)
            r = eq.check_equitable(A, wi, side="rear", tol=1e-10)
            assert f.is_equitable == r.is_equitable

    def test_inadmissible_rejected(self):
        p = eq.Partition.singletons(2)
        wi = eq.WeightedIndicator(p, np.array([1.0, 0.0]))
        with pytest.raises(AdmissibilityError):
            eq.check_equitable(np.zeros((2, 2)), wi)

    def test_size_mismatch_rejected(self):
        wi = eq.WeightedIndicator.unit(eq.Partition.single_cell(3))
        with pytest.raises(InputError):
            eq.check_equitable(np.zeros((2, 2)), wi)


def _random_hermitian_equitable(rng, n, k):
    """Hermitian matrix front equitable w.r.t. a random contiguous partition."""
    sizes = np.ones(k, dtype=int)
    for _ in range(n - k):
        sizes[rng.integers(0, k)] += 1
    Theta = rng.normal(size=(k, k))
    Theta = Theta + Theta.T
    offs = np.concatenate([[0], np.cumsum(sizes)])
    A = np.zeros((n, n))
    for i in range(k):
        for j in range(k):
            A[offs[i]:offs[i + 1], offs[j]:offs[j + 1]] = Theta[i, j] / sizes[j]
    A = (A + A.T) / 2
    cells = [tuple(range(offs[i], offs[i + 1])) for i in range(k)]
    return A, eq.Partition.from_cells(cells), Theta


class TestEpsilonEquitability:
    def test_worked_example_zero(self):
        assert eq.epsilon_equitability(A0, eq.Partition.from_cells(PI0_CELLS)) == 0.0

    def test_row_sum_spread(self):
        A = np.array([[1.0, 2.0], [0.0, 0.0]])
        assert eq.epsilon_equitability(A, eq.Partition.single_cell(2)) == 3.0

    def test_singletons_always_zero(self, rng):
        A = rng.normal(size=(5, 5))
        assert eq.epsilon_equitability(A, eq.Partition.singletons(5)) == 0.0

    def test_zero_iff_front_equitable(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 8))
            p = random_partition(rng, n)
            A = rng.integers(0, 3, size=(n, n)).astype(float)
            eps = eq.epsilon_equitability(A, p)
            v = eq.check_equitable(A, eq.WeightedIndicator.unit(p), "front", 0.0)
            assert (eps == 0.0) == v.is_equitable


class TestRegularEquivalence:
    def test_worked_example(self):
        assert eq.check_regular_equivalence(A0, eq.Partition.from_cells(PI0_CELLS))

    def test_mixed_zero_pattern_fails(self):
        A = np.array([[0.0, 1.0], [0.0, 0.0]])
        assert not eq.check_regular_equivalence(A, eq.Partition.single_cell(2))

    def test_zero_matrix_passes(self, rng):
        p = random_partition(rng, 5)
        assert eq.check_regular_equivalence(np.zeros((5, 5)), p)


class TestRefinement:
    def test_equitable_initial_unchanged(self):
        p = eq.Partition.from_cells(PI0_CELLS)
        assert eq.coarsest_front_equitable_refinement(A0, p) == p

    def test_a0_from_single_cell(self):
        out = eq.coarsest_front_equitable_refinement(A0)
        assert out == eq.Partition.from_cells(PI0_CELLS)

    def test_path_graph_degree_split(self):
        P3 = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)
        out = eq.coarsest_front_equitable_refinement(P3)
        assert out == eq.Partition.from_cells([[0, 2], [1]])

    def test_idempotent_and_refining(self, rng):
        for _ in range(15):
            n = int(rng.integers(2, 10))
            A = rng.integers(-2, 3, size=(n, n)).astype(float)
            initial = random_partition(rng, n)
            out = eq.coarsest_front_equitable_refinement(A, initial)
            assert out.refines(initial)
            assert eq.coarsest_front_equitable_refinement(A, out) == out
            v = eq.check_equitable(A, eq.WeightedIndicator.unit(out), "front", 0.0)
            assert v.is_equitable

    def test_coarsest_by_enumeration(self, rng):
        # exhaustive check over the whole partition lattice at small n
        for _ in range(6):
            n = int(rng.integers(2, 6))
            A = rng.integers(0, 3, size=(n, n)).astype(float)
            initial = random_partition(rng, n)
            out = eq.coarsest_front_equitable_refinement(A, initial)
            for q in all_partitions(n):
                if not q.refines(initial) or q == out:
                    continue
                if out.refines(q):
                    wi = eq.WeightedIndicator.unit(q)
                    assert not eq.check_equitable(A, wi, "front", 0.0).is_equitable

    def test_size_mismatch(self):
        with pytest.raises(InputError):
            eq.coarsest_front_equitable_refinement(
                np.zeros((3, 3)), eq.Partition.single_cell(4)
            )


class TestWeightedRefinement:
    def test_unit_weights_match_unweighted(self, rng):
        A = rng.integers(0, 3, size=(6, 6)).astype(float)
        assert eq.weighted_refinement(A, np.ones(6)) == \
            eq.coarsest_front_equitable_refinement(A)

    def test_diagonal_groups_by_value(self, rng):
        A = np.diag([2.0, 3.0, 2.0, 3.0])
        w = rng.uniform(0.5, 2.0, size=4)
        out = eq.weighted_refinement(A, w)
        assert out == eq.Partition.from_cells([[0, 2], [1, 3]])

    def test_planted_similarity_recovered(self, rng):
        for _ in range(10):
            n = int(rng.integers(2, 10))
            k = int(rng.integers(1, n + 1))
            A_star, p_star, _ = _random_front_equitable(rng, n, k)
            w = random_weights(rng, p_star)
            A = (A_star * w[:, None]) / w[None, :]
            # the similarity round trip leaves 1e-16 noise on the colors,
            # so exact color comparison would over-split
            out = eq.weighted_refinement(A, w, p_star, color_tol=1e-9)
            assert out == p_star.canonical()
            wi = eq.WeightedIndicator(out, w)
            assert eq.check_equitable(A, wi, "front", 1e-9).is_equitable

    def test_zero_weight_rejected(self):
        with pytest.raises(InputError):
            eq.weighted_refinement(np.zeros((2, 2)), np.array([1.0, 0.0]))


def _random_front_equitable(rng, n, k):
    sizes = np.ones(k, dtype=int)
    for _ in range(n - k):
        sizes[rng.integers(0, k)] += 1
    Theta = rng.integers(1, 4, size=(k, k)).astype(float)
    offs = np.concatenate([[0], np.cumsum(sizes)])
    A = np.zeros((n, n))
    for i in range(k):
        for j in range(k):
            A[offs[i]:offs[i + 1], offs[j]:offs[j + 1]] = Theta[i, j] / sizes[j]
    cells = [tuple(range(offs[i], offs[i + 1])) for i in range(k)]
    return A, eq.Partition.from_cells(cells), Theta
