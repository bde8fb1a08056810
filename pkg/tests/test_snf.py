"""
Unit tests for the Smith normal form.
"""

import unittest
import sys
import os

# Add the parent directory to the path so we can import eqkhovanov
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from eqkhovanov.core.coeff import GroundRing, NonEuclideanRingError, SparseMatrix
from eqkhovanov.core.snf import (
    determinant_divisors,
    invariant_factors_by_minors,
    is_smith_normal_form,
    smith_normal_form,
)
from eqkhovanov.core.verify import snf_suite
from eqkhovanov.domain.models import FieldKind, FieldSpec


class TestSmithNormalForm(unittest.TestCase):
    """Diagonalization with tracked change of basis."""

    def setUp(self):
        self.Z = GroundRing(FieldSpec(FieldKind.INTEGERS))
        self.Qh = GroundRing(FieldSpec(FieldKind.RATIONALS), [("h", 2)])
        self.h = self.Qh.gen("h")

    def assertFactorization(self, M, sf):
        self.assertEqual(sf.P @ M @ sf.Q, sf.S)
        self.assertEqual(sf.P @ sf.P_inv, SparseMatrix.identity(M.ring, M.nrows))
        self.assertEqual(sf.Q_inv @ sf.Q, SparseMatrix.identity(M.ring, M.ncols))

    def test_integer_example(self):
        M = SparseMatrix.from_dense(self.Z, [[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
        sf = smith_normal_form(M)
        self.assertEqual(sf.pivots, [2, 6, 12])
        self.assertEqual(sf.rank, 3)
        self.assertTrue(is_smith_normal_form(sf.S))
        self.assertFactorization(M, sf)

    def test_agrees_with_minors(self):
        M = SparseMatrix.from_dense(self.Z, [[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
        self.assertEqual(invariant_factors_by_minors(M), [2, 6, 12])
        self.assertEqual(determinant_divisors(M), [2, 12, 144])

    def test_rank_deficient(self):
        M = SparseMatrix.from_dense(self.Z, [[1, 2], [2, 4], [3, 6]])
        sf = smith_normal_form(M)
        self.assertEqual(sf.pivots, [1])
        self.assertFactorization(M, sf)

    def test_zero_matrix(self):
        sf = smith_normal_form(SparseMatrix.zeros(self.Z, 2, 3))
        self.assertEqual(sf.rank, 0)
        self.assertTrue(sf.S.is_zero())

    def test_polynomial_divisibility_chain(self):
        M = SparseMatrix.from_dense(self.Qh, [[self.h ** 2, self.Qh.zero], [self.Qh.zero, self.h]])
        sf = smith_normal_form(M)
        self.assertEqual(sf.pivots, [self.h, self.h ** 2])
        self.assertFactorization(M, sf)

    def test_pivots_are_monic(self):
        M = SparseMatrix.from_dense(self.Qh, [[self.h * 3]])
        sf = smith_normal_form(M)
        self.assertEqual(sf.pivots, [self.h])
        self.assertFactorization(M, sf)

    def test_coprime_entries_combine(self):
        M = SparseMatrix.from_dense(self.Z, [[2, 0], [0, 3]])
        self.assertFalse(is_smith_normal_form(M))
        sf = smith_normal_form(M)
        self.assertEqual(sf.pivots, [1, 6])
        self.assertFactorization(M, sf)

    def test_left_only(self):
        M = SparseMatrix.from_dense(self.Z, [[4, 6]])
        sf = smith_normal_form(M, track_right=False)
        self.assertIsNone(sf.Q)
        self.assertEqual(sf.pivots, [2])

    def test_graded_degrees_returned(self):
        # d: Q[h]{0} -> Q[h]{0} (+) Q[h]{-2}, entries 1 and h
        M = SparseMatrix.from_dense(self.Qh, [[self.Qh.one], [self.h]])
        sf = smith_normal_form(M, row_degrees=[0, -2], col_degrees=[0])
        self.assertEqual(sf.pivots, [self.Qh.one])
        self.assertEqual(sf.row_degrees, [0, -2])
        self.assertEqual(sf.col_degrees, [0])
        self.assertFactorization(M, sf)

    def test_degrees_go_together(self):
        with self.assertRaises(ValueError):
            smith_normal_form(SparseMatrix.identity(self.Z, 1), row_degrees=[0])

    def test_non_euclidean_ring(self):
        Zh = GroundRing(FieldSpec(FieldKind.INTEGERS), [("h", 2)])
        with self.assertRaises(NonEuclideanRingError):
            smith_normal_form(SparseMatrix.identity(Zh, 2))

    def test_random_suite(self):
        report = snf_suite(seed=3, samples=500)
        self.assertTrue(report.passed, report.as_dict())


if __name__ == "__main__":
    unittest.main()
