"""
Unit tests for bigraded homology, nu on homology and table rendering.
"""

import unittest
import sys
import os

# Add the parent directory to the path so we can import eqkhovanov
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from eqkhovanov.core.complex import build_complex
from eqkhovanov.core.diagram import mirror, parse_pd
from eqkhovanov.core.frobenius import make_theory
from eqkhovanov.core.homology import (
    HomologyError,
    class_coordinates,
    generator_cycle,
    homology,
    nu_homology_acyclicity,
    split_comparison,
    verify_euler_characteristic,
)
from eqkhovanov.domain.models import ScopeError
from eqkhovanov.utils.report import homology_frame, render_homology_table

TREFOIL = "PD[X[1,4,2,5],X[3,6,4,1],X[5,2,6,3]]"
FIGURE_EIGHT = "PD[X[4,2,5,1],X[8,6,1,5],X[6,3,7,4],X[2,7,3,8]]"


def _homology(pd_text, tag, field, reduced=False, basepoint=None):
    d = parse_pd(pd_text, basepoint=basepoint)
    return build_complex(d, make_theory(tag, field), reduced=reduced)


class TestTrefoilHomology(unittest.TestCase):
    """Known tables for the left-handed trefoil."""

    def test_char_two(self):
        module = homology(_homology(TREFOIL, "u1", "f2"))
        self.assertEqual(module.keys(), [(-2, 5, "h"), (-2, 7, "h"), (0, 1, ""), (0, 3, "")])
        self.assertEqual(module.free_gradings(), [1, 3])

    def test_rationals(self):
        module = homology(_homology(TREFOIL, "u1", "q"))
        self.assertEqual(module.keys(), [(-2, 5, "h^2"), (0, 1, ""), (0, 3, "")])
        self.assertEqual(len(module.torsion), 1)

    def test_reduced(self):
        for field in ("q", "f2"):
            module = homology(_homology(TREFOIL, "u1", field, reduced=True, basepoint=1))
            self.assertEqual(module.keys(), [(-2, 6, "h"), (0, 2, "")], field)

    def test_mirror_negates_free_gradings(self):
        d = parse_pd(TREFOIL)
        for tag, field in (("u1", "q"), ("u1", "f2"), ("plain", "q")):
            th = make_theory(tag, field)
            free = [(s.i, s.q) for s in homology(build_complex(d, th)).free]
            mirrored = [(s.i, s.q) for s in homology(build_complex(mirror(d), th)).free]
            self.assertEqual(sorted(mirrored), sorted((-i, -q) for i, q in free), (tag, field))
            self.assertTrue(free)

    def test_integral_khovanov(self):
        module = homology(_homology(TREFOIL, "plain", "z"))
        self.assertEqual(module.free_gradings(), [1, 3, 5, 9])
        self.assertEqual([(s.i, s.q, s.order_text) for s in module.torsion], [(-2, 7, "2")])

    def test_euler_characteristic(self):
        for tag, field in (("u1", "q"), ("u1", "f2"), ("plain", "z"), ("u1xu1", "f3")):
            c = _homology(TREFOIL, tag, field)
            if c.ring.is_euclidean:
                self.assertTrue(verify_euler_characteristic(c), f"{tag}/{field}")

    def test_records(self):
        module = homology(_homology(TREFOIL, "u1", "q"))
        records = module.as_records()
        self.assertEqual(records[0], {"i": -2, "q": 5, "free": False, "order": "h^2", "module": "Q[h]/(h^2)"})
        self.assertIsNone(records[-1]["order"])


class TestOtherDiagrams(unittest.TestCase):
    """Unknot, figure-eight and scope."""

    def test_unknot(self):
        module = homology(_homology("unknot", "u1", "q"))
        self.assertEqual(module.keys(), [(0, -1, ""), (0, 1, "")])

    def test_figure_eight_free_part(self):
        module = homology(_homology(FIGURE_EIGHT, "u1", "q"))
        self.assertEqual(module.free_gradings(), [-1, 1])
        self.assertEqual(module.free_rank(0), 2)

    def test_two_variable_ring(self):
        c = _homology(TREFOIL, "u2", "z")
        with self.assertRaises(ScopeError):
            homology(c)

    def test_generator_cycles(self):
        c = _homology(TREFOIL, "u1", "q")
        module = homology(c)
        for i in (-2, 0):
            for index, summand in enumerate(module.in_degree(i)):
                z = generator_cycle(c, i, index)
                self.assertTrue(z.is_cycle())
                coords = class_coordinates(c, z)
                position = coords.summands.index(summand)
                self.assertEqual(coords.coords[position], c.ring.one)
                self.assertEqual(sum(1 for x in coords.coords if x), 1)
                self.assertEqual(z.quantum_degree(), summand.q)

    def test_class_of_a_non_cycle(self):
        c = _homology(TREFOIL, "u1", "q")
        for k in range(c.rank(-3)):
            v = c.basis_vector(-3, k)
            if not v.is_cycle():
                with self.assertRaises(HomologyError):
                    class_coordinates(c, v)
                return
        self.fail("every generator in degree -3 is a cycle")


class TestNuOnHomology(unittest.TestCase):
    """nu_hat is acyclic on Kh_h over a field."""

    def test_trefoil(self):
        for field in ("q", "f2"):
            report = nu_homology_acyclicity(_homology(TREFOIL, "u1", field))
            self.assertTrue(report.nu_squared_zero, field)
            self.assertTrue(report.acyclic, field)

    def test_unknot(self):
        report = nu_homology_acyclicity(_homology("unknot", "u1", "q"))
        self.assertTrue(report.acyclic)
        self.assertTrue(all(report.by_degree.values()))

    def test_rejects_other_theories(self):
        with self.assertRaises(ScopeError):
            nu_homology_acyclicity(_homology(TREFOIL, "u2", "z"))
        with self.assertRaises(ScopeError):
            nu_homology_acyclicity(_homology(TREFOIL, "u1", "z"))


class TestSplitComparison(unittest.TestCase):
    """Unreduced homology against two shifted reduced copies."""

    def test_trefoil(self):
        for field, over in (("q", "F[h^2]"), ("f2", "F[h]")):
            th = make_theory("u1", field)
            d = parse_pd(TREFOIL, basepoint=1)
            result = split_comparison(build_complex(d, th), build_complex(d, th, reduced=True))
            self.assertEqual(result.over, over)
            self.assertTrue(result.free_matches, field)
            self.assertTrue(result.torsion_matches, field)

    def test_rejects_mixed_theories(self):
        d = parse_pd(TREFOIL, basepoint=1)
        full = build_complex(d, make_theory("u1", "q"))
        reduced = build_complex(d, make_theory("u1", "f2"), reduced=True)
        with self.assertRaises(ScopeError):
            split_comparison(full, reduced)


class TestTables(unittest.TestCase):
    """pandas rendering of homology tables."""

    def test_frame(self):
        frame = homology_frame(homology(_homology(TREFOIL, "u1", "f2")))
        self.assertEqual(list(frame.index), [7, 5, 3, 1])
        self.assertEqual(list(frame.columns), [-2, -1, 0])
        self.assertEqual(frame.loc[7, -2], "F2[h]/(h)")
        self.assertEqual(frame.loc[1, 0], "F2[h]")
        self.assertEqual(frame.loc[3, -1], ".")

    def test_repeated_summands(self):
        module = homology(_homology(FIGURE_EIGHT, "u1", "q"))
        text = render_homology_table(module, title="4_1")
        self.assertTrue(text.startswith("4_1\n"))
        self.assertIn("Q[h]", text)

    def test_empty_module(self):
        from eqkhovanov.core.homology import GradedModule
        module = GradedModule(make_theory("u1", "q").ring)
        self.assertEqual(render_homology_table(module), "0")


if __name__ == "__main__":
    unittest.main()
