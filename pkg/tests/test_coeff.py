"""
Unit tests for ground rings and sparse matrices.
"""

import unittest
import sys
import os

# Add the parent directory to the path so we can import eqkhovanov
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from eqkhovanov.core.coeff import (
    DivisibilityError,
    GroundRing,
    HomogeneityError,
    NonEuclideanRingError,
    RingMismatchError,
    SparseMatrix,
    ring_arith,
)
from eqkhovanov.domain.models import FieldKind, FieldSpec, ScopeError

ZZ_SPEC = FieldSpec(FieldKind.INTEGERS)
QQ_SPEC = FieldSpec(FieldKind.RATIONALS)
F2_SPEC = FieldSpec(FieldKind.PRIME, 2)


class TestGroundRing(unittest.TestCase):
    """Arithmetic, grading and Euclidean structure."""

    def setUp(self):
        self.Z = GroundRing(ZZ_SPEC)
        self.Qh = GroundRing(QQ_SPEC, [("h", 2)])
        self.h = self.Qh.gen("h")

    def test_names(self):
        self.assertEqual(self.Z.name, "Z")
        self.assertEqual(self.Qh.name, "Q[h]")
        self.assertEqual(GroundRing(F2_SPEC, [("h", 2), ("t", 4)]).name, "F2[h,t]")

    def test_odd_variable_degree_rejected(self):
        with self.assertRaises(ValueError):
            GroundRing(QQ_SPEC, [("h", 3)])

    def test_unknown_variable(self):
        with self.assertRaises(RingMismatchError):
            self.Qh.gen("t")

    def test_integer_divmod(self):
        q, r = self.Z.divmod(self.Z(7), self.Z(3))
        self.assertEqual((q, r), (2, 1))
        self.assertEqual(ring_arith(self.Z, self.Z(7), self.Z(3), "divmod"), (2, 1))

    def test_polynomial_divmod(self):
        a = self.h ** 3 + self.h
        q, r = self.Qh.divmod(a, self.h ** 2)
        self.assertEqual(q, self.h)
        self.assertEqual(r, self.h)

    def test_divide_by_zero(self):
        with self.assertRaises(ZeroDivisionError):
            self.Z.divmod(self.Z(1), self.Z.zero)

    def test_exact_quotient(self):
        self.assertEqual(self.Qh.exquo(self.h ** 3, self.h), self.h ** 2)
        with self.assertRaises(DivisibilityError):
            self.Qh.exquo(self.h, self.h ** 2)

    def test_degree(self):
        self.assertEqual(self.Qh.degree(self.h ** 2), 4)
        self.assertEqual(self.Qh.degree(self.Qh(5)), 0)
        self.assertIsNone(self.Qh.degree(self.Qh.zero))
        with self.assertRaises(HomogeneityError):
            self.Qh.degree(self.h + self.Qh.one)

    def test_euclidean(self):
        self.assertTrue(self.Z.is_euclidean)
        self.assertTrue(self.Qh.is_euclidean)
        self.assertFalse(GroundRing(ZZ_SPEC, [("h", 2)]).is_euclidean)
        Qht = GroundRing(QQ_SPEC, [("h", 2), ("t", 4)])
        self.assertFalse(Qht.is_euclidean)
        with self.assertRaises(NonEuclideanRingError):
            Qht.require_euclidean("homology")

    def test_non_euclidean_is_scope_error(self):
        Zh = GroundRing(ZZ_SPEC, [("h", 2)])
        with self.assertRaises(ScopeError):
            Zh.divmod(Zh.gen("h"), Zh(2))

    def test_units_and_normalize(self):
        self.assertTrue(self.Z.is_unit(self.Z(-1)))
        self.assertFalse(self.Z.is_unit(self.Z(2)))
        self.assertTrue(self.Qh.is_unit(self.Qh(3)))
        self.assertFalse(self.Qh.is_unit(self.h))
        self.assertEqual(self.Z.normalize(self.Z(-4)), 4)
        self.assertEqual(self.Qh.normalize(self.h * 3), self.h)

    def test_gcd(self):
        self.assertEqual(self.Z.gcd(self.Z(12), self.Z(-18)), 6)
        self.assertEqual(self.Qh.gcd(self.h ** 3 * 2, self.h ** 2), self.h ** 2)

    def test_valuation(self):
        self.assertEqual(self.Qh.valuation(self.h ** 3 + self.h ** 2), 2)
        self.assertEqual(self.Qh.valuation(self.Qh(7)), 0)
        self.assertIsNone(self.Qh.valuation(self.Qh.zero))

    def test_prime_field(self):
        F2 = GroundRing(F2_SPEC)
        self.assertEqual(F2(3), F2.one)
        self.assertFalse(F2(2))

    def test_hom(self):
        Q = GroundRing(QQ_SPEC)
        a = self.h ** 2 + self.Qh(3)
        self.assertEqual(self.Qh.hom(a, [Q.zero], Q), Q(3))
        self.assertEqual(self.Qh.hom(a, [Q(2)], Q), Q(7))

    def test_random_homogeneous(self):
        rng = np.random.default_rng(7)
        Qht = GroundRing(QQ_SPEC, [("h", 2), ("t", 4)])
        for _ in range(20):
            a = Qht.random_homogeneous(rng, 4)
            self.assertIn(Qht.degree(a), (None, 4))

    def test_monomials_of_degree(self):
        Qht = GroundRing(QQ_SPEC, [("h", 2), ("t", 4)])
        self.assertEqual(sorted(Qht.monomials_of_degree(4)), [(0, 1), (2, 0)])
        self.assertEqual(Qht.monomials_of_degree(3), [])
        self.assertEqual(Qht.monomials_of_degree(0), [(0, 0)])


class TestSparseMatrix(unittest.TestCase):
    """Sparse matrix arithmetic."""

    def setUp(self):
        self.Z = GroundRing(ZZ_SPEC)

    def test_from_entries_sums_duplicates(self):
        M = SparseMatrix.from_entries(self.Z, 2, 2, [(0, 0, 1), (0, 0, -1), (1, 0, 2), (1, 0, 3)])
        self.assertEqual(M.get(0, 0), 0)
        self.assertEqual(M.get(1, 0), 5)
        self.assertEqual(M.nnz, 1)

    def test_out_of_range(self):
        with self.assertRaises(IndexError):
            SparseMatrix(self.Z, 1, 1, {0: {3: self.Z(1)}})

    def test_matmul_identity(self):
        M = SparseMatrix.from_dense(self.Z, [[1, 2], [3, 4], [5, 6]])
        self.assertEqual(M @ SparseMatrix.identity(self.Z, 2), M)
        self.assertEqual(SparseMatrix.identity(self.Z, 3) @ M, M)

    def test_product(self):
        A = SparseMatrix.from_dense(self.Z, [[1, 2], [0, 1]])
        B = SparseMatrix.from_dense(self.Z, [[1, -2], [0, 1]])
        self.assertEqual(A @ B, SparseMatrix.identity(self.Z, 2))

    def test_shape_mismatch(self):
        A = SparseMatrix.zeros(self.Z, 2, 3)
        with self.assertRaises(ValueError):
            A @ A
        with self.assertRaises(ValueError):
            A + SparseMatrix.zeros(self.Z, 3, 2)

    def test_transpose_and_negation(self):
        M = SparseMatrix.from_dense(self.Z, [[1, 2, 0]])
        T = M.transpose()
        self.assertEqual(T.shape, (3, 1))
        self.assertEqual(T.get(1, 0), 2)
        self.assertTrue((M + (-M)).is_zero())
        self.assertEqual(M - M, SparseMatrix.zeros(self.Z, 1, 3))

    def test_apply(self):
        M = SparseMatrix.from_dense(self.Z, [[1, 2], [0, 0], [3, 0]])
        self.assertEqual(M.apply({0: self.Z(1), 1: self.Z(1)}), {0: 3, 2: 3})

    def test_submatrix(self):
        M = SparseMatrix.from_dense(self.Z, [[1, 2, 3], [4, 5, 6]])
        S = M.submatrix([1], [2, 0])
        self.assertEqual(S.to_dense(), [[6, 4]])

    def test_domain_matrix_determinant(self):
        M = SparseMatrix.from_dense(self.Z, [[2, 1], [1, 1]])
        self.assertEqual(M.to_domain_matrix().det(), 1)

    def test_triples(self):
        M = SparseMatrix.from_dense(self.Z, [[0, -2]])
        self.assertEqual(M.to_triples(), [(0, 1, "-2")])


if __name__ == "__main__":
    unittest.main()
