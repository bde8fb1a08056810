"""
Unit tests for cube complexes, chain maps and the splitting into reduced pieces.
"""

import unittest
import sys
import os

# Add the parent directory to the path so we can import eqkhovanov
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from eqkhovanov.core.complex import (
    ChainVector,
    build_complex,
    chain_endo,
    complex_to_json,
    mirror_dual_iso,
    split_reduced,
    verify_d_squared,
    verify_disjoint_union,
    verify_dual_iso,
    verify_homogeneous,
    verify_nu_identities,
    verify_u_squared,
    verify_wigderson,
    wigderson_homotopy,
)
from eqkhovanov.core.diagram import BasepointError, LinkDiagram, disjoint_union, parse_pd
from eqkhovanov.core.frobenius import TheoryError, make_theory
from eqkhovanov.domain.models import EndoKind, RootLabel, ScopeError

TREFOIL = "PD[X[1,4,2,5],X[3,6,4,1],X[5,2,6,3]]"
HOPF = "PD[X[2,4,1,3],X[4,2,3,1]]"


class TestBuildComplex(unittest.TestCase):
    """Generators, gradings and the differential."""

    def setUp(self):
        self.u1 = make_theory("u1", "q")
        self.trefoil = parse_pd(TREFOIL, name="3_1")

    def test_unknot(self):
        c = build_complex(parse_pd("unknot"), self.u1)
        self.assertEqual(c.ranks(), {0: 2})
        self.assertEqual(sorted(c.q_degrees(0)), [-1, 1])

    def test_trefoil_ranks(self):
        c = build_complex(self.trefoil, self.u1)
        self.assertEqual(c.degrees, [-3, -2, -1, 0])
        self.assertEqual(c.ranks(), {-3: 8, -2: 12, -1: 6, 0: 4})
        self.assertEqual(c.total_rank, 30)
        self.assertEqual(sorted(c.q_degrees(0)), [1, 3, 3, 5])

    def test_d_squared_and_homogeneity(self):
        for tag, field in (("u2", "z"), ("u1", "f2"), ("u1xu1", "q"), ("su2sqrt", "f3"), ("plain", "z")):
            c = build_complex(self.trefoil, make_theory(tag, field))
            self.assertTrue(verify_d_squared(c), tag)
            self.assertTrue(verify_homogeneous(c), tag)

    def test_reduced_is_half(self):
        d = self.trefoil.with_basepoint(1)
        c = build_complex(d, self.u1, reduced=True)
        self.assertTrue(c.reduced)
        self.assertEqual(c.ranks(), {-3: 4, -2: 6, -1: 3, 0: 2})
        self.assertIn(c.root_label, (RootLabel.X, RootLabel.Y))

    def test_reduced_label(self):
        d = self.trefoil.with_basepoint(1)
        c = build_complex(d, self.u1, reduced=True, label="Y")
        self.assertEqual(c.root_label, RootLabel.Y)
        self.assertTrue(verify_d_squared(c))

    def test_reduced_needs_basepoint(self):
        with self.assertRaises(BasepointError):
            build_complex(self.trefoil, self.u1, reduced=True)

    def test_label_must_be_a_root(self):
        with self.assertRaises(TheoryError):
            build_complex(self.trefoil.with_basepoint(1), self.u1, reduced=True, label="X1")

    def test_label_without_reduced(self):
        with self.assertRaises(ScopeError):
            build_complex(self.trefoil.with_basepoint(1), self.u1, label="X")

    def test_scope_limits(self):
        with self.assertRaises(ScopeError):
            build_complex(LinkDiagram([], {}), self.u1)
        with self.assertRaises(ScopeError):
            build_complex(self.trefoil, self.u1, max_crossings=2)

    def test_quantum_degree_of_chains(self):
        c = build_complex(self.trefoil, self.u1)
        g = c.generators[0][0]
        v = c.basis_vector(0, 0, self.u1.h)
        self.assertEqual(v.quantum_degree(), g.q + 2)
        self.assertIsNone(c.zero(0).quantum_degree())

    def test_chain_arithmetic(self):
        c = build_complex(self.trefoil, self.u1)
        a = c.basis_vector(-1, 0)
        b = c.basis_vector(-1, 1)
        self.assertEqual((a + b) - b, a)
        self.assertTrue((a - a).is_zero())
        self.assertTrue(a.differential().differential().is_zero())
        with self.assertRaises(ValueError):
            a + c.basis_vector(0, 0)

    def test_json_dump(self):
        dump = complex_to_json(build_complex(parse_pd("unknot"), self.u1))
        self.assertEqual(dump["schema"], 1)
        self.assertEqual(dump["ring"], "Q[h]")
        self.assertIsNone(dump["reduced"])
        self.assertEqual(sorted(g["labels"] for g in dump["generators"]["0"]), ["1", "X"])
        self.assertEqual(dump["differentials"], {})


class TestChainMaps(unittest.TestCase):
    """Involutions, nu, basepoint actions and their identities."""

    def setUp(self):
        self.trefoil = parse_pd(TREFOIL, basepoint=1)

    def test_sigma_hat_is_chain_map(self):
        for tag, field in (("u1", "q"), ("u2", "z")):
            c = build_complex(self.trefoil, make_theory(tag, field))
            f = chain_endo(c, EndoKind.SIGMA_HAT)
            self.assertFalse(f.is_linear)

    def test_nu_identities(self):
        for tag, field in (("u1", "q"), ("u1", "f2"), ("u1xu1", "q"), ("su2sqrt", "q")):
            c = build_complex(self.trefoil, make_theory(tag, field))
            self.assertTrue(verify_nu_identities(c), f"{tag}/{field}")

    def test_nu_on_reduced_is_rejected(self):
        c = build_complex(self.trefoil, make_theory("u1", "q"), reduced=True)
        with self.assertRaises(ScopeError):
            chain_endo(c, EndoKind.NU_HAT)

    def test_u_squared(self):
        for tag, field in (("u2", "z"), ("u1", "q")):
            c = build_complex(self.trefoil, make_theory(tag, field))
            self.assertTrue(verify_u_squared(c), tag)

    def test_u_needs_basepoint(self):
        c = build_complex(self.trefoil.with_basepoint(None), make_theory("u1", "q"))
        with self.assertRaises(BasepointError):
            chain_endo(c, EndoKind.U)

    def test_basepoint_bars(self):
        c = build_complex(self.trefoil, make_theory("u1", "q"))
        for kind in (EndoKind.XBAR, EndoKind.YBAR):
            self.assertTrue(chain_endo(c, kind).is_linear)
        with self.assertRaises(TheoryError):
            chain_endo(c, EndoKind.X1BAR)

    def test_wigderson(self):
        c = build_complex(self.trefoil, make_theory("u1", "f2"))
        self.assertTrue(verify_wigderson(c))

    def test_wigderson_needs_char_two(self):
        c = build_complex(self.trefoil, make_theory("u1", "q"))
        with self.assertRaises(TheoryError):
            wigderson_homotopy(c)


class TestSplitting(unittest.TestCase):
    """Unreduced complexes as two reduced subcomplexes."""

    def test_trefoil_u1(self):
        c = build_complex(parse_pd(TREFOIL, basepoint=2), make_theory("u1", "q"))
        split = split_reduced(c)
        self.assertTrue(split.verify(), split.checks)
        self.assertEqual(split.first.total_rank + split.second.total_rank, c.total_rank)

    def test_hopf_u1xu1(self):
        c = build_complex(parse_pd(HOPF, basepoint=1), make_theory("u1xu1", "q"))
        split = split_reduced(c)
        self.assertTrue(split.verify(), split.checks)

    def test_su2sqrt(self):
        c = build_complex(parse_pd(HOPF, basepoint=1), make_theory("su2sqrt", "f3"))
        self.assertTrue(split_reduced(c).verify())

    def test_u2_cannot_split(self):
        c = build_complex(parse_pd(HOPF, basepoint=1), make_theory("u2", "z"))
        with self.assertRaises(TheoryError):
            split_reduced(c)


class TestDualityAndUnions(unittest.TestCase):
    """Mirror duality and disjoint unions."""

    def test_mirror_duality(self):
        for tag, field in (("u1", "q"), ("u2", "z")):
            f = mirror_dual_iso(parse_pd(TREFOIL), make_theory(tag, field))
            self.assertTrue(verify_dual_iso(f), tag)

    def test_dual_degrees(self):
        f = mirror_dual_iso(parse_pd(HOPF), make_theory("u1", "q"))
        self.assertEqual(f.source.ranks(), f.target.ranks())
        self.assertTrue(f.target.is_dual)

    def test_disjoint_union(self):
        th = make_theory("u1", "q")
        d1, d2 = parse_pd(TREFOIL), parse_pd("unknot")
        c12 = build_complex(disjoint_union(d1, d2), th)
        self.assertTrue(verify_disjoint_union(build_complex(d1, th), build_complex(d2, th), c12))

    def test_disjoint_union_of_links(self):
        th = make_theory("u2", "z")
        d1, d2 = parse_pd(HOPF), parse_pd(HOPF)
        c12 = build_complex(disjoint_union(d1, d2), th)
        self.assertEqual(c12.total_rank, build_complex(d1, th).total_rank ** 2)
        self.assertTrue(verify_disjoint_union(build_complex(d1, th), build_complex(d2, th), c12))


if __name__ == "__main__":
    unittest.main()
