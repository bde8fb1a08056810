"""
Corpus-wide consistency runs over tests/data/corpus.txt.

Diagrams whose names agree before the first dot are diagrams of one knot;
their invariants must agree.
"""

import unittest
import sys
import os
import time
from collections import defaultdict

import pytest

# Add the parent directory to the path so we can import eqkhovanov
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import kh_equiv
from eqkhovanov.core.complex import build_complex
from eqkhovanov.core.frobenius import make_theory
from eqkhovanov.core.homology import homology, verify_euler_characteristic
from eqkhovanov.core.lee import s_invariant
from eqkhovanov.core.verify import run_suite

pytestmark = pytest.mark.slow

CORPUS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", "corpus.txt")

# seconds for every knot diagram of the corpus over F2 and Q
S_BUDGET = 300.0

KNOWN_S = {
    "unknot": 0,
    "3_1": -2,
    "T(2,3)": 2,
    "4_1": 0,
    "5_1": -4,
    "T(2,5)": 4,
    "5_2": 2,
    "6_1": 0,
    "6_2": 2,
    "6_3": 0,
    "7_1": -6,
    "7_2": 2,
    "7_3": 4,
    "7_4": 2,
    "7_5": 4,
    "7_6": 2,
    "7_7": 0,
}


def _corpus():
    return [(name, kh_equiv.load_diagram(source, name=name)) for name, source in kh_equiv.read_batch_file(CORPUS)]


def _knot(name: str) -> str:
    return name.split(".", 1)[0]


class TestCorpus(unittest.TestCase):
    """Every diagram of the corpus through the main routes."""

    @classmethod
    def setUpClass(cls):
        cls.diagrams = _corpus()
        cls.knots = [(name, d) for name, d in cls.diagrams if d.num_components == 1]

    def test_corpus_covers_seven_crossings(self):
        groups = defaultdict(list)
        for name, _ in self.knots:
            groups[_knot(name)].append(name)
        for knot in ("5_1", "5_2", "6_1", "6_2", "6_3", "7_1", "7_2", "7_3", "7_4", "7_5", "7_6", "7_7"):
            self.assertGreaterEqual(len(groups[knot]), 2, knot)
        self.assertEqual(set(groups), set(KNOWN_S))

    def test_s_routes_and_diagram_invariance(self):
        values = defaultdict(set)
        start = time.perf_counter()
        for name, d in self.knots:
            for field in ("f2", "q"):
                with self.subTest(name=name, field=field):
                    report = s_invariant(d, field)
                    self.assertEqual(report.s_formula, report.s_gradings)
                    self.assertEqual(report.s_formula, report.s_reduced)
                    self.assertTrue(report.free_generation_verified)
                    self.assertTrue(report.u_relations_verified)
                    self.assertTrue(report.zeta_sigma_fixed)
                    values[_knot(name)].add(report.s)
        elapsed = time.perf_counter() - start
        for knot, found in values.items():
            self.assertEqual(found, {KNOWN_S[knot]}, knot)
        self.assertLess(elapsed, S_BUDGET, f"s over the corpus took {elapsed:.1f} s")

    def test_s_in_characteristic_three(self):
        for name, d in self.knots:
            if d.n > 5:
                continue
            with self.subTest(name=name):
                self.assertEqual(s_invariant(d, "f3").s, KNOWN_S[_knot(name)])

    def test_homology_agrees_across_diagrams(self):
        th = make_theory("u1", "f2")
        tables = defaultdict(dict)
        for name, d in self.knots:
            if d.n > 8:
                continue
            tables[_knot(name)][name] = homology(build_complex(d, th)).keys()
        for knot, by_name in tables.items():
            first = next(iter(by_name.values()))
            for name, keys in by_name.items():
                self.assertEqual(keys, first, name)

    def test_euler_characteristic(self):
        for name, d in self.diagrams:
            if d.n > 6:
                continue
            for field in ("q", "f2"):
                with self.subTest(name=name, field=field):
                    c = build_complex(d, make_theory("u1", field))
                    self.assertTrue(verify_euler_characteristic(c, homology(c)))

    def test_complex_suite(self):
        th = make_theory("u1", "f2")
        for name, d in self.diagrams:
            if d.n > 4:
                continue
            with self.subTest(name=name):
                report = run_suite("complex", d, th)
                self.assertTrue(report.passed, report.as_dict())

    def test_splitting_and_lee_suites(self):
        th = make_theory("u1", "q")
        for name, d in self.diagrams:
            if d.n > 4:
                continue
            for suite in ("splitting", "lee"):
                with self.subTest(name=name, suite=suite):
                    report = run_suite(suite, d, th)
                    self.assertTrue(report.passed, report.as_dict())

    def test_nu_acyclic(self):
        for name, d in self.diagrams:
            if d.n > 4:
                continue
            with self.subTest(name=name):
                self.assertTrue(run_suite("nu-acyclic", d, make_theory("u1", "q")).passed)


if __name__ == "__main__":
    unittest.main()
