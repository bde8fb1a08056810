"""
Unit tests for Lee cycles, the s-invariant, the nu basis of links and the su2 transfer.
"""

import unittest
import sys
import os

# Add the parent directory to the path so we can import eqkhovanov
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from eqkhovanov.core.complex import build_complex
from eqkhovanov.core.diagram import braid_closure, mirror, parse_pd, reverse
from eqkhovanov.core.explainer import explain_s_invariant
from eqkhovanov.core.frobenius import ONE, X, TheoryError, make_theory
from eqkhovanov.core.homology import class_coordinates
from eqkhovanov.core.lee import (
    h_divisibility,
    lee_cycle,
    lee_grading,
    lee_labeling,
    lee_pair,
    link_basis_via_nu,
    s_invariant,
    sigma_acts_by,
    su2_transfer,
    with_default_basepoint,
)
from eqkhovanov.domain.models import RootLabel, ScopeError

TREFOIL = "PD[X[1,4,2,5],X[3,6,4,1],X[5,2,6,3]]"
HOPF = "PD[X[2,4,1,3],X[4,2,3,1]]"
FIGURE_EIGHT = "PD[X[4,2,5,1],X[8,6,1,5],X[6,3,7,4],X[2,7,3,8]]"


class TestLeeCycles(unittest.TestCase):
    """alpha and beta at the oriented resolution."""

    def test_alpha_is_a_cycle_in_its_grading(self):
        for tag in ("u1", "u1xu1", "su2sqrt"):
            c = build_complex(parse_pd(TREFOIL), make_theory(tag, "q"))
            alpha, beta = lee_pair(c)
            self.assertTrue(alpha.is_cycle())
            self.assertTrue(beta.is_cycle())
            self.assertEqual(alpha.i, 0)
            self.assertEqual(alpha.quantum_degree(), lee_grading(c))

    def test_trefoil_grading(self):
        c = build_complex(parse_pd(TREFOIL), make_theory("u1", "q"))
        self.assertEqual(lee_grading(c), 5)

    def test_labeling_swaps_on_reversal(self):
        th = make_theory("u1", "q")
        d = parse_pd(TREFOIL)
        forward = lee_labeling(d, th)
        backward = lee_labeling(d, th, reverse_orientation=True)
        self.assertEqual(len(forward.labels), 2)
        swap = {RootLabel.X: RootLabel.Y, RootLabel.Y: RootLabel.X}
        self.assertEqual(tuple(swap[lab] for lab in forward.labels), backward.labels)

    def test_u2_has_no_lee_cycle(self):
        c = build_complex(parse_pd(TREFOIL), make_theory("u2", "z"))
        with self.assertRaises(TheoryError):
            lee_cycle(c)

    def test_reduced_alpha(self):
        d = with_default_basepoint(parse_pd(TREFOIL))
        self.assertEqual(d.basepoint, 1)
        c = build_complex(d, make_theory("u1", "q"), reduced=True)
        alpha = lee_cycle(c)
        self.assertEqual(alpha.quantum_degree(), 4)


class TestSInvariant(unittest.TestCase):
    """s from the divisibility formula and both grading routes."""

    def test_trefoil(self):
        for field in ("q", "f2", "f3"):
            report = s_invariant(parse_pd(TREFOIL, name="3_1"), field)
            self.assertEqual(report.s, -2, field)
            self.assertEqual(report.d_h, 1)
            self.assertEqual(report.writhe, -3)
            self.assertEqual(report.seifert_circles, 2)
            self.assertEqual(report.unreduced_free_gradings, [1, 3])
            self.assertEqual(report.reduced_free_grading, 2)
            self.assertTrue(report.free_generation_verified)
            self.assertTrue(report.u_relations_verified)
            self.assertTrue(report.zeta_sigma_fixed)

    def test_mirror(self):
        report = s_invariant(mirror(parse_pd(TREFOIL)))
        self.assertEqual(report.s, 2)
        self.assertEqual(report.writhe, 3)

    def test_reverse_keeps_s(self):
        self.assertEqual(s_invariant(reverse(parse_pd(TREFOIL)), "f2").s, -2)

    def test_positive_braid(self):
        self.assertEqual(s_invariant(braid_closure("1,1,1")).s, 2)

    def test_unknot_and_figure_eight(self):
        self.assertEqual(s_invariant(parse_pd("unknot")).s, 0)
        self.assertEqual(s_invariant(parse_pd(FIGURE_EIGHT)).s, 0)

    def test_zeta_prime_only_in_odd_characteristic(self):
        self.assertIsNotNone(s_invariant(parse_pd(TREFOIL), "q").zeta_prime)
        self.assertIsNone(s_invariant(parse_pd(TREFOIL), "f2").zeta_prime)

    def test_sigma_hat_fixes_zeta_but_not_its_negative(self):
        c = build_complex(parse_pd(TREFOIL), make_theory("u1", "q"))
        alpha, beta = lee_pair(c)
        R, h = c.ring, c.theory.h
        # d_h = 1, so zeta = (alpha + beta) / h^2 and zeta_tilde = alpha / h
        zeta = [R.exquo(v, h ** 2) for v in class_coordinates(c, alpha + beta).free_coords]
        zeta_tilde = [R.exquo(v, h) for v in class_coordinates(c, alpha).free_coords]
        self.assertTrue(sigma_acts_by(c, alpha.i, zeta, 1))
        self.assertFalse(sigma_acts_by(c, alpha.i, zeta, -1))
        self.assertTrue(sigma_acts_by(c, alpha.i, [h * v for v in zeta], -1))
        self.assertFalse(sigma_acts_by(c, alpha.i, [h * v for v in zeta], 1))
        self.assertFalse(sigma_acts_by(c, alpha.i, zeta_tilde, 1))
        self.assertFalse(sigma_acts_by(c, alpha.i, zeta_tilde, -1))

    def test_h_divisibility(self):
        self.assertEqual(h_divisibility(parse_pd(TREFOIL)), 1)
        self.assertEqual(h_divisibility(parse_pd("unknot")), 0)

    def test_scope(self):
        with self.assertRaises(ScopeError):
            s_invariant(parse_pd(HOPF))
        with self.assertRaises(ScopeError):
            s_invariant(parse_pd(TREFOIL), "z")

    def test_report_dict(self):
        data = s_invariant(parse_pd(TREFOIL, name="3_1")).as_dict()
        self.assertEqual(data["routes"], {"formula": -2, "gradings": -2, "reduced": -2})
        self.assertEqual(data["name"], "3_1")
        self.assertTrue(all(data["checks"].values()))

    def test_explanation(self):
        text = explain_s_invariant(s_invariant(parse_pd(TREFOIL, name="3_1")))
        self.assertIn("FOR 3_1", text)
        self.assertIn("s = 2*1 + (-3) - 2 + 1 = -2", text)
        self.assertIn("RESULT: s = -2", text)
        self.assertNotIn("FAILED", text)


class TestLinkBasis(unittest.TestCase):
    """Pairs (z, nu_hat z) for links."""

    def test_hopf(self):
        basis = link_basis_via_nu(parse_pd(HOPF, name="hopf"))
        self.assertTrue(basis.verified)
        self.assertEqual(sorted(z.i for z, _ in basis.pairs), [0, 2])
        for z, nz in basis.pairs:
            self.assertEqual(nz.quantum_degree(), z.quantum_degree() - 2)
            self.assertTrue(z.is_cycle())
            self.assertTrue(nz.is_cycle())

    def test_hopf_cycles(self):
        basis = link_basis_via_nu(parse_pd(HOPF, name="hopf"))
        c = basis.complex

        def e(i, vertex, labels, coeff=None):
            return c.basis_vector(i, c.find(i, vertex, labels), coeff)

        pairs = {z.i: (z, nz) for z, nz in basis.pairs}
        h = c.theory.h
        z, nz = pairs[0]
        self.assertEqual(z, e(0, (0, 0), (X, ONE), -h) + e(0, (0, 0), (X, X)))
        self.assertEqual(nz, e(0, (0, 0), (ONE, X)) - e(0, (0, 0), (X, ONE)))
        z, nz = pairs[2]
        self.assertEqual(z, e(2, (1, 1), (X, ONE)))
        self.assertEqual(nz, e(2, (1, 1), (ONE, ONE)))

    def test_trefoil(self):
        basis = link_basis_via_nu(parse_pd(TREFOIL), "f2")
        self.assertTrue(basis.verified)
        self.assertEqual(len(basis.pairs), 1)

    def test_as_dict(self):
        data = link_basis_via_nu(parse_pd(HOPF)).as_dict()
        self.assertTrue(data["verified"])
        self.assertEqual(len(data["pairs"]), 2)
        self.assertIn("chain", data["pairs"][0]["z"])


class TestTransfer(unittest.TestCase):
    """gamma_plus and gamma_minus over F[t]."""

    def test_unknot(self):
        report = su2_transfer(parse_pd("unknot"))
        self.assertTrue(report.ok, report.checks)
        self.assertEqual(report.d_h, 0)
        self.assertEqual(report.gamma_plus.quantum_degree(), 1)
        self.assertEqual(report.gamma_minus.quantum_degree(), -1)

    def test_trefoil(self):
        report = su2_transfer(parse_pd(TREFOIL), "f3")
        self.assertTrue(report.ok, report.checks)
        self.assertEqual(report.zeta_t["source"], "gamma_plus")
        self.assertEqual(report.zeta_prime_t["source"], "gamma_minus")

    def test_scope(self):
        with self.assertRaises(ScopeError):
            su2_transfer(parse_pd(TREFOIL), "f2")
        with self.assertRaises(ScopeError):
            su2_transfer(parse_pd(HOPF))


if __name__ == "__main__":
    unittest.main()
