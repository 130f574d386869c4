"""
Tests for closed-form evidence combination, belief matrices and naive decisions
"""
import math
import sys
import unittest
from pathlib import Path

import numpy as np
from hypothesis import given, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent.parent))

from backend.combination import build_belief_matrices, combine_row, naive_decisions
from backend.errors import DimensionMismatchError, TotalConflictError
from backend.models import MassTriple
from backend.oracle import dempster_cascade
from conftest import section5_grid


def random_triple(rng):
    yes, no, _ = rng.dirichlet([1.0, 1.0, 1.0])
    return MassTriple.of(yes, no, max(0.0, 1.0 - yes - no))


triples_st = st.lists(
    st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
    .filter(lambda t: sum(t) > 1e-3)
    .map(lambda t: (t[0] / sum(t), t[1] / sum(t)))
    .filter(lambda t: t[0] < 0.9)
    .map(lambda t: MassTriple.of(t[0], t[1], max(0.0, 1.0 - t[0] - t[1]))),
    min_size=1, max_size=6,
)


class TestCombineRow(unittest.TestCase):
    def assertColumn(self, column, singles, star, theta, delta=1e-4):
        self.assertEqual(len(column.singles), len(singles))
        for got, want in zip(column.singles, singles):
            self.assertAlmostEqual(got, want, delta=delta)
        self.assertAlmostEqual(column.star, star, delta=delta)
        self.assertAlmostEqual(column.theta, theta, delta=delta)

    def test_first_perceived_object(self):
        column = combine_row(section5_grid()[0])
        self.assertColumn(column, (0.6545, 0.1636, 0.0182, 0.0), 0.0524, 0.1113)
        self.assertAlmostEqual(column.k_norm, 1 / 0.55, delta=1e-12)

    def test_single_source(self):
        column = combine_row([MassTriple.of(0.3, 0.2, 0.5)])
        self.assertColumn(column, (0.3,), 0.2, 0.5, delta=1e-15)
        self.assertAlmostEqual(column.conflict, 0.0, delta=1e-15)

    def test_total_conflict(self):
        with self.assertRaises(TotalConflictError):
            combine_row([MassTriple.of(1, 0, 0), MassTriple.of(1, 0, 0)])

    def test_empty_row(self):
        with self.assertRaises(ValueError):
            combine_row([])

    def test_matches_cascade_on_random_inputs(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            triples = [random_triple(rng) for _ in range(rng.integers(1, 7))]
            closed = combine_row(triples)
            cascade = dempster_cascade(triples)
            for got, want in zip(closed.singles, cascade.singles):
                self.assertAlmostEqual(got, want, delta=1e-12)
            self.assertAlmostEqual(closed.star, cascade.star, delta=1e-12)
            self.assertAlmostEqual(closed.theta, cascade.theta, delta=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(triples_st, st.randoms(use_true_random=False))
    def test_permutation_equivariance(self, triples, rnd):
        order = list(range(len(triples)))
        rnd.shuffle(order)
        base = combine_row(triples)
        permuted = combine_row([triples[k] for k in order])
        for new_pos, old_pos in enumerate(order):
            self.assertAlmostEqual(permuted.singles[new_pos], base.singles[old_pos], delta=1e-12)
        self.assertAlmostEqual(permuted.star, base.star, delta=1e-12)
        self.assertAlmostEqual(permuted.theta, base.theta, delta=1e-12)
        self.assertAlmostEqual(permuted.k_norm, base.k_norm, delta=1e-9 * base.k_norm)

    @settings(max_examples=200, deadline=None)
    @given(triples_st)
    def test_normaliser_product_form(self, triples):
        yes = [t.m_yes for t in triples]
        product = math.prod(1 - y for y in yes) * (1 + sum(y / (1 - y) for y in yes))
        self.assertAlmostEqual(combine_row(triples).k_norm * product, 1.0, delta=1e-9)

    @settings(max_examples=200, deadline=None)
    @given(triples_st)
    def test_certainly_not_candidate_changes_nothing(self, triples):
        base = combine_row(triples)
        extended = combine_row(list(triples) + [MassTriple.of(0, 1, 0)])
        self.assertEqual(extended.singles[-1], 0.0)
        for a, b in zip(base.singles, extended.singles):
            self.assertAlmostEqual(a, b, delta=1e-12)
        self.assertAlmostEqual(base.theta, extended.theta, delta=1e-12)


class TestBeliefMatrices(unittest.TestCase):
    def test_dual_matrix_first_known_object(self):
        _, dual = build_belief_matrices(section5_grid())
        y1 = dual.columns[0]
        for got, want in zip(y1.singles, (0.6, 0.15, 0.1)):
            self.assertAlmostEqual(got, want, delta=1e-12)
        self.assertAlmostEqual(y1.star, 0.0025, delta=1e-12)
        self.assertAlmostEqual(y1.theta, 0.1475, delta=1e-12)

    def test_shapes(self):
        m1, m2 = build_belief_matrices(section5_grid())
        self.assertEqual((m1.n_sources, m1.n_candidates), (3, 4))
        self.assertEqual((m2.n_sources, m2.n_candidates), (4, 3))

    def test_certain_non_match(self):
        m1, m2 = build_belief_matrices([[MassTriple.of(0, 1, 0)]])
        for column in (m1.columns[0], m2.columns[0]):
            self.assertEqual(column.singles, (0.0,))
            self.assertEqual(column.star, 1.0)
            self.assertEqual(column.theta, 0.0)

    def test_columns_sum_to_one(self):
        rng = np.random.default_rng(5)
        grid = [[random_triple(rng) for _ in range(4)] for _ in range(4)]
        for matrix in build_belief_matrices(grid):
            for column in matrix.columns:
                self.assertAlmostEqual(column.total(), 1.0, delta=1e-9)

    def test_ragged_grid(self):
        grid = section5_grid()
        grid[1] = grid[1][:3]
        with self.assertRaises(DimensionMismatchError):
            build_belief_matrices(grid)

    def test_empty_sides(self):
        m1, m2 = build_belief_matrices([], n_known=2)
        self.assertEqual(m1.n_sources, 0)
        self.assertEqual([c.star for c in m2.columns], [1.0, 1.0])
        m1, m2 = build_belief_matrices([[], []])
        self.assertEqual([c.star for c in m1.columns], [1.0, 1.0])
        self.assertEqual(m2.n_sources, 0)


class TestNaiveDecisions(unittest.TestCase):
    def test_worked_example_disagrees(self):
        decisions = naive_decisions(*build_belief_matrices(section5_grid()))
        self.assertFalse(decisions.agreement)
        known = ["Y1", "Y2", "Y3", "Y4"]
        perceived = ["X1", "X2", "X3"]
        self.assertEqual([c.describe(known) for c in decisions.perceived.choices],
                         ["Y1", "tie(Y1, Y2)", "Y2"])
        self.assertEqual([c.describe(perceived) for c in decisions.known.choices],
                         ["X1", "X3", "Θ", "*"])

    def test_diagonal_grid_agrees(self):
        on, off = MassTriple.of(0.9, 0.05, 0.05), MassTriple.of(0.05, 0.9, 0.05)
        decisions = naive_decisions(*build_belief_matrices([[on, off], [off, on]]))
        self.assertTrue(decisions.agreement)
        self.assertEqual(decisions.perceived.relations(), {(0, 0), (1, 1)})
        self.assertEqual(decisions.known.relations(), {(0, 0), (1, 1)})

    def test_single_pair_agrees(self):
        decisions = naive_decisions(*build_belief_matrices([[MassTriple.of(0.8, 0.1, 0.1)]]))
        self.assertTrue(decisions.agreement)
        self.assertEqual(decisions.perceived.relations(), {(0, 0)})

    def test_double_claim_is_not_agreement(self):
        # both perceived objects pick the same known object
        strong, weak = MassTriple.of(0.9, 0.05, 0.05), MassTriple.of(0.0, 0.9, 0.1)
        decisions = naive_decisions(*build_belief_matrices([[strong, weak], [strong, weak]]))
        self.assertFalse(decisions.agreement)

    def test_ignorance_is_not_agreement(self):
        decisions = naive_decisions(*build_belief_matrices([[MassTriple.of(0.45, 0.0, 0.55)]]))
        self.assertEqual(decisions.perceived.choices[0].kind, "theta")
        self.assertEqual(decisions.known.choices[0].kind, "theta")
        self.assertEqual(decisions.perceived.relations(), decisions.known.relations())
        self.assertFalse(decisions.agreement)

    def test_star_still_agrees(self):
        decisions = naive_decisions(*build_belief_matrices([[MassTriple.of(0.1, 0.8, 0.1)]]))
        self.assertEqual(decisions.perceived.choices[0].kind, "star")
        self.assertTrue(decisions.agreement)

    def test_tie_with_star_and_theta_is_named(self):
        decisions = naive_decisions(*build_belief_matrices([[MassTriple.of(0.0, 0.5, 0.5)]]))
        self.assertEqual(decisions.perceived.choices[0].describe(["Y1"]), "tie(*, Θ)")
        decisions = naive_decisions(*build_belief_matrices([[MassTriple.of(0.5, 0.5, 0.0)]]))
        self.assertEqual(decisions.perceived.choices[0].describe(["Y1"]), "tie(Y1, *)")
        self.assertFalse(decisions.agreement)


if __name__ == "__main__":
    unittest.main()
