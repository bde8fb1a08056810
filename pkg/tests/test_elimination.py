"""
Unit tests for cancelling unit entries of a chain complex.
"""

import unittest
import sys
import os

# Add the parent directory to the path so we can import eqkhovanov
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from eqkhovanov.core.coeff import GroundRing, SparseMatrix
from eqkhovanov.core.complex import ChainVector, build_complex
from eqkhovanov.core.diagram import braid_closure, parse_pd
from eqkhovanov.core.elimination import eliminate
from eqkhovanov.core.frobenius import make_theory
from eqkhovanov.domain.models import FieldKind, FieldSpec

TREFOIL = "PD[X[1,4,2,5],X[3,6,4,1],X[5,2,6,3]]"


def _eliminate_complex(c):
    return eliminate(c.ring, {i: c.q_degrees(i) for i in c.degrees},
                     {i: c.differential(i) for i in c.degrees})


class TestSmallComplex(unittest.TestCase):
    """A two-term complex written by hand."""

    def setUp(self):
        self.R = GroundRing(FieldSpec(FieldKind.RATIONALS), [("h", 2)])
        self.h = self.R.gen("h")
        d0 = SparseMatrix(self.R, 1, 2, {0: {0: self.R.one, 1: self.h}})
        self.small = eliminate(self.R, {0: [0, 2], 1: [0]}, {0: d0})

    def test_cancels_the_unit(self):
        self.assertEqual(len(self.small.steps), 1)
        self.assertEqual(self.small.surviving, {0: [1], 1: []})
        self.assertEqual(self.small.degrees, [0])
        self.assertEqual(self.small.q_degrees(0), [2])

    def test_lift_is_the_cycle(self):
        self.assertEqual(self.small.lift(0, {0: self.R.one}), {1: self.R.one, 0: -self.h})

    def test_push(self):
        self.assertEqual(self.small.push(0, {1: self.R.one}), {0: self.R.one})
        self.assertEqual(self.small.push(0, {0: self.R.one}), {})

    def test_non_units_stay(self):
        d0 = SparseMatrix(self.R, 1, 1, {0: {0: self.h}})
        small = eliminate(self.R, {0: [2], 1: [0]}, {0: d0})
        self.assertEqual(small.steps, [])
        self.assertEqual(small.rank(0), 1)
        self.assertEqual(small.rank(1), 1)


class TestCubeComplexes(unittest.TestCase):
    """Elimination on Khovanov complexes."""

    def test_trefoil_shrinks(self):
        c = build_complex(parse_pd(TREFOIL), make_theory("u1", "q"))
        small = _eliminate_complex(c)
        before = sum(c.rank(i) for i in c.degrees)
        after = sum(small.rank(i) for i in small.degrees)
        self.assertLess(after, before)
        for i in small.degrees:
            self.assertTrue((small.differential(i + 1) @ small.differential(i)).is_zero(), i)

    def test_push_after_lift_is_identity(self):
        c = build_complex(braid_closure("1,-2,1,-2"), make_theory("u1", "f2"))
        small = _eliminate_complex(c)
        for i in small.degrees:
            for p in range(small.rank(i)):
                lifted = small.lift(i, {p: c.ring.one})
                self.assertEqual(small.push(i, lifted), {p: c.ring.one}, (i, p))

    def test_lifted_cycles_are_cycles(self):
        c = build_complex(parse_pd(TREFOIL), make_theory("u1", "q"))
        small = _eliminate_complex(c)
        for i in small.degrees:
            d = small.differential(i)
            for p in range(small.rank(i)):
                if d.apply({p: c.ring.one}):
                    continue
                z = ChainVector(c, i, small.lift(i, {p: c.ring.one}))
                self.assertTrue(z.is_cycle(), (i, p))


if __name__ == "__main__":
    unittest.main()
