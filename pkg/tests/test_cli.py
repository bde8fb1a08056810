"""
Tests for the kh_equiv command line: exit codes, output formats, batch files and settings.
"""

import io
import json
import os
import sys
import tempfile
import unittest
from contextlib import redirect_stdout
from unittest.mock import patch

# Add the parent directory to the path so we can import kh_equiv
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import kh_equiv
from eqkhovanov.core.verify import CheckResult, SuiteReport
from eqkhovanov.domain.models import InputError, KhovanovError, ScopeError, VerificationError
from eqkhovanov.utils.config import DEFAULT_VERIFY_SAMPLES, load_settings

TREFOIL = "PD[X[1,4,2,5],X[3,6,4,1],X[5,2,6,3]]"
HOPF = "PD[X[2,4,1,3],X[4,2,3,1]]"


def run_cli(*argv):
    """Run main() and capture what it prints."""
    out = io.StringIO()
    with redirect_stdout(out):
        code = kh_equiv.main(list(argv))
    return code, out.getvalue()


class TestCommands(unittest.TestCase):
    """Single-diagram runs."""

    def test_homology_table(self):
        code, out = run_cli("homology", "--pd", TREFOIL, "--field", "f2")
        self.assertEqual(code, kh_equiv.EXIT_OK)
        self.assertIn("F2[h]/(h)", out)
        self.assertIn("Kh over F2[h]", out)

    def test_s_json_envelope(self):
        code, out = run_cli("s", "--pd", TREFOIL, "--format", "json")
        self.assertEqual(code, kh_equiv.EXIT_OK)
        payload = json.loads(out)
        self.assertEqual(set(payload), {"schema", "command", "input", "result"})
        self.assertEqual(payload["schema"], 1)
        self.assertEqual(payload["command"], "s")
        self.assertEqual(payload["input"]["theory"], "u1")
        self.assertEqual(payload["result"]["s"], -2)

    def test_braid_source(self):
        code, out = run_cli("s", "--braid", "1,1,1", "--format", "json")
        self.assertEqual(code, kh_equiv.EXIT_OK)
        self.assertEqual(json.loads(out)["result"]["s"], 2)

    def test_reduced_with_label(self):
        code, out = run_cli("homology", "--pd", TREFOIL, "--reduced", "--label", "Y", "--format", "json")
        self.assertEqual(code, kh_equiv.EXIT_OK)
        result = json.loads(out)["result"]
        self.assertEqual(result["label"], "Y")
        self.assertEqual(result["basepoint"], 1)
        self.assertEqual([(s["i"], s["q"]) for s in result["summands"]], [(-2, 6), (0, 2)])

    def test_complex_dump(self):
        code, out = run_cli("complex", "--pd", "unknot", "--format", "json")
        self.assertEqual(code, kh_equiv.EXIT_OK)
        self.assertIn("generators", json.loads(out)["result"])

    def test_basis_and_transfer(self):
        self.assertEqual(run_cli("basis", "--pd", HOPF)[0], kh_equiv.EXIT_OK)
        code, out = run_cli("transfer", "--pd", "unknot")
        self.assertEqual(code, kh_equiv.EXIT_OK)
        self.assertIn("mod4_split", out)

    def test_verify_suite(self):
        code, out = run_cli("verify", "--suite", "snf", "--samples", "200")
        self.assertEqual(code, kh_equiv.EXIT_OK)
        self.assertIn("Suite snf: PASS", out)


class TestExitCodes(unittest.TestCase):
    """Error classes map onto exit codes."""

    def test_bad_input(self):
        self.assertEqual(run_cli("homology", "--pd", "PD[X[1,2,3]]")[0], kh_equiv.EXIT_INPUT)
        self.assertEqual(run_cli("homology")[0], kh_equiv.EXIT_INPUT)
        self.assertEqual(run_cli("homology", "--pd", TREFOIL, "--label", "X")[0], kh_equiv.EXIT_INPUT)
        self.assertEqual(run_cli("verify", "--suite", "frobenius", "--pd", TREFOIL)[0], kh_equiv.EXIT_INPUT)

    def test_out_of_scope(self):
        self.assertEqual(run_cli("homology", "--pd", TREFOIL, "--theory", "u2", "--field", "z")[0],
                         kh_equiv.EXIT_SCOPE)
        self.assertEqual(run_cli("s", "--pd", HOPF)[0], kh_equiv.EXIT_SCOPE)
        self.assertEqual(run_cli("transfer", "--pd", TREFOIL, "--field", "f2")[0], kh_equiv.EXIT_SCOPE)

    def test_crossing_limit(self):
        with patch.dict(os.environ, {"EQKH_MAX_CROSSINGS": "2"}):
            self.assertEqual(run_cli("homology", "--pd", TREFOIL)[0], kh_equiv.EXIT_SCOPE)

    def test_failed_verification(self):
        failing = SuiteReport("frobenius", [CheckResult("identity", False, 1, "boom")])
        with patch("kh_equiv.run_suite", return_value=failing):
            code, out = run_cli("verify", "--suite", "frobenius")
        self.assertEqual(code, kh_equiv.EXIT_VERIFICATION)
        self.assertIn("counterexample: boom", out)

    def test_usage_errors(self):
        with redirect_stdout(io.StringIO()):
            self.assertEqual(kh_equiv.main([]), kh_equiv.EXIT_USAGE)
        for argv in (["verify"], ["homology", "--format", "xml"], ["nonsense"]):
            with self.assertRaises(SystemExit) as ctx, redirect_stdout(io.StringIO()), \
                    patch("sys.stderr", io.StringIO()):
                kh_equiv.main(argv)
            self.assertEqual(ctx.exception.code, kh_equiv.EXIT_USAGE, argv)

    def test_exit_code_for(self):
        self.assertEqual(kh_equiv.exit_code_for(InputError("x")), kh_equiv.EXIT_INPUT)
        self.assertEqual(kh_equiv.exit_code_for(ScopeError("x")), kh_equiv.EXIT_SCOPE)
        self.assertEqual(kh_equiv.exit_code_for(VerificationError("x")), kh_equiv.EXIT_VERIFICATION)
        self.assertEqual(kh_equiv.exit_code_for(KhovanovError("x")), 1)


class TestBatch(unittest.TestCase):
    """Batch files keep input order and report the worst exit code."""

    def setUp(self):
        self.tmp = tempfile.NamedTemporaryFile("w", suffix=".txt", delete=False, encoding="utf-8")
        self.tmp.write("# small corpus\n")
        self.tmp.write(f"trefoil\t{TREFOIL}\n")
        self.tmp.write("\n")
        self.tmp.write("unknot\n")
        self.tmp.write("bad\tPD[X[1,2,3]]\n")
        self.tmp.write("positive\tbraid:1,1,1\n")
        self.tmp.close()

    def tearDown(self):
        os.unlink(self.tmp.name)

    def test_read_batch_file(self):
        entries = kh_equiv.read_batch_file(self.tmp.name)
        self.assertEqual([name for name, _ in entries], ["trefoil", "line4", "bad", "positive"])
        self.assertEqual(entries[1][1], "unknot")

    def test_missing_or_empty_file(self):
        with self.assertRaises(InputError):
            kh_equiv.read_batch_file(self.tmp.name + ".missing")
        with tempfile.NamedTemporaryFile("w", suffix=".txt", delete=False) as fh:
            fh.write("# nothing here\n\n")
        try:
            with self.assertRaises(InputError):
                kh_equiv.read_batch_file(fh.name)
        finally:
            os.unlink(fh.name)

    def test_s_batch_json(self):
        code, out = run_cli("s", "--file", self.tmp.name, "--format", "json")
        self.assertEqual(code, kh_equiv.EXIT_INPUT)
        rows = json.loads(out)["result"]
        self.assertEqual([r["name"] for r in rows], ["trefoil", "line4", "bad", "positive"])
        self.assertEqual([r.get("result", {}).get("s") for r in rows], [-2, 0, None, 2])
        self.assertEqual(rows[2]["exit_code"], kh_equiv.EXIT_INPUT)
        self.assertIn("PDParseError", rows[2]["error"])

    def test_s_batch_table(self):
        code, out = run_cli("s", "--file", self.tmp.name)
        self.assertEqual(code, kh_equiv.EXIT_INPUT)
        lines = out.strip().splitlines()
        self.assertEqual(len(lines), 5)
        self.assertIn("trefoil", lines[1])
        self.assertIn("PDParseError", lines[3])

    def test_parallel_batch_keeps_order(self):
        with patch.dict(os.environ, {"EQKH_WORKERS": "2"}):
            code, out = run_cli("s", "--file", self.tmp.name, "--format", "json")
        self.assertEqual(code, kh_equiv.EXIT_INPUT)
        rows = json.loads(out)["result"]
        self.assertEqual([r["name"] for r in rows], ["trefoil", "line4", "bad", "positive"])


class TestSettings(unittest.TestCase):
    """EQKH_* environment variables."""

    def test_defaults(self):
        with patch.dict(os.environ, {}, clear=True):
            settings = load_settings()
        self.assertEqual(settings.workers, 1)
        self.assertFalse(settings.debug)
        self.assertEqual(settings.verify_samples, DEFAULT_VERIFY_SAMPLES)

    def test_values(self):
        env = {"EQKH_WORKERS": "4", "EQKH_DEBUG": "yes", "EQKH_VERIFY_SAMPLES": "50", "EQKH_MAX_CROSSINGS": "0"}
        with patch.dict(os.environ, env, clear=True):
            settings = load_settings()
        self.assertEqual(settings.workers, 4)
        self.assertTrue(settings.debug)
        self.assertEqual(settings.verify_samples, 50)
        self.assertEqual(settings.max_crossings, 0)

    def test_bad_values_fall_back(self):
        with patch.dict(os.environ, {"EQKH_WORKERS": "many", "EQKH_VERIFY_SAMPLES": "-3"}, clear=True):
            settings = load_settings()
        self.assertEqual(settings.workers, 1)
        self.assertEqual(settings.verify_samples, DEFAULT_VERIFY_SAMPLES)

    def test_load_diagram(self):
        d = kh_equiv.load_diagram("braid:1,1,1", name="T", basepoint=2)
        self.assertEqual(d.writhe, 3)
        self.assertEqual(d.basepoint, 2)
        self.assertEqual(d.name, "T")


if __name__ == "__main__":
    unittest.main()
