"""
Equivariant Khovanov homology from the command line.

Commands:
- homology: bigraded homology table (rows q, columns i)
- s: s-invariant report with d_h and every computation route
- verify: property suites (frobenius, complex, splitting, nu-acyclic, lee, snf)
- complex: JSON dump of the chain complex
- basis: nu_hat basis of Kh_h/Tor for links
- transfer: SU(2) transfer of the Lee cycles

Usage:
    $ python3 kh_equiv.py homology --pd "PD[X[1,4,2,5],X[3,6,4,1],X[5,2,6,3]]" --theory u1 --field f2
    $ python3 kh_equiv.py s --file tests/data/corpus.txt --field f2 --format json
    $ python3 kh_equiv.py verify --suite frobenius --seed 42

    Run unit tests:
        $ python3 kh_equiv.py --run-tests

Exit codes: 0 success, 2 usage, 3 bad input, 4 out of scope, 5 failed verification.
"""

from __future__ import annotations
import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, List, Optional, Tuple

from eqkhovanov import __version__
from eqkhovanov.core.complex import build_complex, complex_to_json
from eqkhovanov.core.diagram import LinkDiagram, braid_closure, parse_pd
from eqkhovanov.core.explainer import explain_s_invariant
from eqkhovanov.core.frobenius import make_theory
from eqkhovanov.core.homology import homology
from eqkhovanov.core.lee import link_basis_via_nu, s_invariant, su2_transfer, with_default_basepoint
from eqkhovanov.core.verify import SUITES, SuiteReport, run_suite
from eqkhovanov.domain.models import (
    InputError,
    JobSpec,
    KhovanovError,
    OutputFormat,
    ScopeError,
    VerificationError,
)
from eqkhovanov.utils.config import Settings, load_settings
from eqkhovanov.utils.report import (
    dump_json,
    json_envelope,
    render_batch_table,
    render_homology_table,
)

logger = logging.getLogger("kh_equiv")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_SCOPE = 4
EXIT_VERIFICATION = 5

BRAID_PREFIX = "braid:"


def exit_code_for(exc: BaseException) -> int:
    """Map a library exception onto its exit code class."""
    if isinstance(exc, VerificationError):
        return EXIT_VERIFICATION
    if isinstance(exc, ScopeError):
        return EXIT_SCOPE
    if isinstance(exc, InputError):
        return EXIT_INPUT
    return 1


# ---------------------------
# Input
# ---------------------------

def load_diagram(source: str, name: str = "", basepoint: Optional[int] = None) -> LinkDiagram:
    """PD text, 'unknot', a JSON crossing list, or 'braid:<word>'."""
    text = source.strip()
    if text.lower().startswith(BRAID_PREFIX):
        d = braid_closure(text[len(BRAID_PREFIX):], name=name)
        return d.with_basepoint(basepoint) if basepoint is not None else d
    return parse_pd(text, name=name, basepoint=basepoint)


def read_batch_file(path: str) -> List[Tuple[str, str]]:
    """(name, source) pairs from a batch file.

    Lines are ``name<TAB>source`` or a bare source; blank lines and lines
    starting with ``#`` are skipped. Unnamed entries are called ``line<N>``.

    Raises:
        InputError: if the file cannot be read or holds no entries
    """
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.readlines()
    except OSError as exc:
        raise InputError(f"Cannot read batch file {path}: {exc}") from None

    entries = []
    for lineno, line in enumerate(raw, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "\t" in stripped:
            name, source = stripped.split("\t", 1)
            name, source = name.strip(), source.strip()
        else:
            name, source = f"line{lineno}", stripped
        if not source:
            raise InputError(f"{path}:{lineno}: entry {name!r} has no diagram")
        entries.append((name, source))
    if not entries:
        raise InputError(f"Batch file {path} contains no diagrams")
    logger.info(f"Read {len(entries)} diagrams from {path}")
    return entries


def spec_from_args(args: argparse.Namespace) -> JobSpec:
    """Translate parsed flags into a validated JobSpec."""
    return JobSpec(
        command=args.command,
        pd=args.pd,
        file=args.file,
        braid=args.braid,
        theory=args.theory,
        field_spec=args.field,
        reduced=args.reduced,
        basepoint=args.basepoint,
        label=args.label,
        output=args.format,
        seed=args.seed,
        suite=getattr(args, "suite", None),
        samples=getattr(args, "samples", None),
    )


def job_input(spec: JobSpec) -> Dict[str, Any]:
    """Echo of the request for the JSON envelope."""
    return {
        "pd": spec.pd,
        "file": spec.file,
        "braid": spec.braid,
        "theory": spec.theory.value,
        "field": spec.field_spec.name,
        "reduced": spec.reduced,
        "basepoint": spec.basepoint,
        "label": spec.label.value if spec.label else None,
        "seed": spec.seed,
        "suite": spec.suite,
        "samples": spec.samples,
    }


# ---------------------------
# Commands
# ---------------------------

def _check_size(d: Optional[LinkDiagram], settings: Settings):
    if d is not None and d.n > settings.max_crossings:
        raise ScopeError(
            f"{d.name or 'Diagram'} has {d.n} crossings; EQKH_MAX_CROSSINGS is {settings.max_crossings}"
        )


def cmd_homology(spec: JobSpec, d: LinkDiagram, settings: Settings) -> Tuple[Dict[str, Any], str]:
    th = make_theory(spec.theory, spec.field_spec)
    if spec.reduced:
        d = with_default_basepoint(d)
    c = build_complex(d, th, reduced=spec.reduced, label=spec.label)
    module = homology(c)
    result = {
        "name": d.name,
        "ring": c.ring.name,
        "reduced": spec.reduced,
        "basepoint": d.basepoint if spec.reduced else None,
        "label": c.root_label.value if c.root_label else None,
        "summands": module.as_records(),
    }
    flavour = "reduced " if spec.reduced else ""
    title = f"{d.name + ': ' if d.name else ''}{flavour}Kh over {c.ring.name}"
    return result, render_homology_table(module, title)


def cmd_s(spec: JobSpec, d: LinkDiagram, settings: Settings) -> Tuple[Dict[str, Any], str]:
    report = s_invariant(d, spec.field_spec)
    return report.as_dict(), explain_s_invariant(report)


def render_suite(report: SuiteReport) -> str:
    lines = [f"Suite {report.suite}: {'PASS' if report.passed else 'FAIL'}"]
    for check in report.checks:
        mark = "ok" if check.passed else "FAILED"
        lines.append(f"  {check.name:<40} {mark:>6}  ({check.samples} samples)")
        if check.counterexample:
            lines.append(f"      counterexample: {check.counterexample}")
    for name in report.skipped:
        lines.append(f"  {name:<40} {'skipped':>6}")
    return "\n".join(lines)


def cmd_verify(spec: JobSpec, d: Optional[LinkDiagram], settings: Settings) -> Tuple[Dict[str, Any], str]:
    th = make_theory(spec.theory, spec.field_spec)
    samples = spec.samples if spec.samples is not None else settings.verify_samples
    report = run_suite(spec.suite, diagram=d, theory=th, seed=spec.seed, samples=samples)
    return report.as_dict(), render_suite(report)


def cmd_complex(spec: JobSpec, d: LinkDiagram, settings: Settings) -> Tuple[Dict[str, Any], str]:
    th = make_theory(spec.theory, spec.field_spec)
    if spec.reduced:
        d = with_default_basepoint(d)
    c = build_complex(d, th, reduced=spec.reduced, label=spec.label)
    lines = [f"CKh over {c.ring.name}: {c.total_rank} generators"]
    for i in c.degrees:
        lines.append(f"  i = {i:>3}: rank {c.rank(i)}")
    return complex_to_json(c), "\n".join(lines)


def cmd_basis(spec: JobSpec, d: LinkDiagram, settings: Settings) -> Tuple[Dict[str, Any], str]:
    basis = link_basis_via_nu(d, spec.field_spec)
    result = basis.as_dict()
    lines = [f"nu basis of Kh_h/Tor ({'verified' if basis.verified else 'NOT verified'})"]
    for pair in result["pairs"]:
        lines.append(f"  i = {pair['i']}")
        lines.append(f"    z      (q = {pair['z']['q']}): {pair['z']['chain']}")
        lines.append(f"    nu(z)  (q = {pair['nu_z']['q']}): {pair['nu_z']['chain']}")
    return result, "\n".join(lines)


def cmd_transfer(spec: JobSpec, d: LinkDiagram, settings: Settings) -> Tuple[Dict[str, Any], str]:
    report = su2_transfer(d, spec.field_spec)
    result = report.as_dict()
    lines = [f"SU(2) transfer, d_h = {report.d_h}"]
    lines.append(f"  gamma_plus  (q = {result['gamma_plus']['q']}): {result['gamma_plus']['chain']}")
    lines.append(f"  gamma_minus (q = {result['gamma_minus']['q']}): {result['gamma_minus']['chain']}")
    for name, ok in sorted(report.checks.items()):
        lines.append(f"  {name:<20} {'ok' if ok else 'FAILED'}")
    return result, "\n".join(lines)


COMMANDS = {
    "homology": cmd_homology,
    "s": cmd_s,
    "verify": cmd_verify,
    "complex": cmd_complex,
    "basis": cmd_basis,
    "transfer": cmd_transfer,
}


def _failed(command: str, result: Dict[str, Any]) -> bool:
    if command == "verify":
        return not result.get("passed", True)
    if command == "basis":
        return not result.get("verified", True)
    if command == "transfer":
        return not all(result.get("checks", {}).values())
    return False


def run_job(spec: JobSpec, source: Optional[str], name: str = "",
            settings: Optional[Settings] = None) -> Tuple[Dict[str, Any], str]:
    """Run one command on one diagram source (None for diagram-free suites)."""
    settings = settings or load_settings()
    d = load_diagram(source, name=name, basepoint=spec.basepoint) if source is not None else None
    _check_size(d, settings)
    return COMMANDS[spec.command](spec, d, settings)


def _batch_worker(job: Tuple[JobSpec, str, str, Settings]) -> Dict[str, Any]:
    """One batch row; errors become row content."""
    spec, name, source, settings = job
    try:
        result, text = run_job(spec, source, name, settings)
    except KhovanovError as exc:
        return {"name": name, "exit_code": exit_code_for(exc), "error": f"{type(exc).__name__}: {exc}"}
    code = EXIT_VERIFICATION if _failed(spec.command, result) else EXIT_OK
    return {"name": name, "exit_code": code, "result": result, "text": text}


def run_batch(spec: JobSpec, settings: Settings) -> List[Dict[str, Any]]:
    """Fan out over a batch file; rows come back in input order."""
    entries = read_batch_file(spec.file)
    jobs = [(spec, name, source, settings) for name, source in entries]
    if settings.workers > 1 and len(jobs) > 1:
        logger.info(f"Running {len(jobs)} jobs on {settings.workers} workers")
        with ProcessPoolExecutor(max_workers=settings.workers) as pool:
            return list(pool.map(_batch_worker, jobs))
    return [_batch_worker(job) for job in jobs]


def _summary_row(command: str, row: Dict[str, Any]) -> Dict[str, Any]:
    out: Dict[str, Any] = {"name": row["name"]}
    if "error" in row:
        out["status"] = row["error"]
        return out
    result = row["result"]
    if command == "s":
        out.update({"s": result["s"], "d_h": result["d_h"], "writhe": result["writhe"],
                    "r": result["seifert_circles"]})
    elif command == "verify":
        out["passed"] = result["passed"]
    out["status"] = "ok" if row["exit_code"] == EXIT_OK else "FAILED"
    return out


def render_batch(command: str, rows: List[Dict[str, Any]]) -> str:
    if command in ("s", "verify"):
        return render_batch_table([_summary_row(command, r) for r in rows])
    blocks = []
    for r in rows:
        blocks.append(r.get("text") or f"{r['name']}: {r['error']}")
    return "\n\n".join(blocks)


# ---------------------------
# Entrypoint
# ---------------------------

def _build_arg_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--pd", help="PD code, 'unknot', or a JSON list of 4-tuples")
    source.add_argument("--file", help="batch file of name<TAB>PD lines")
    source.add_argument("--braid", help="braid word such as '1,1,1'")
    common.add_argument("--theory", default="u1",
                        help="u2, u1, u1xu1, su2, su2sqrt or plain (default u1)")
    common.add_argument("--field", default="q", help="z, q or f<p> (default q)")
    common.add_argument("--reduced", action="store_true", help="reduced complex at the basepoint")
    common.add_argument("--basepoint", type=int, help="basepoint arc (default: smallest arc)")
    common.add_argument("--label", help="basepoint root label for --reduced (default: the Lee one)")
    common.add_argument("--format", default="table", choices=[f.value for f in OutputFormat])
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--verbose", action="store_true", help="debug logging")

    p = argparse.ArgumentParser(prog="kh_equiv", description="Equivariant Khovanov homology")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--run-tests", action="store_true", help="Run unit tests and exit")
    sub = p.add_subparsers(dest="command")
    sub.add_parser("homology", parents=[common], help="bigraded homology table")
    sub.add_parser("s", parents=[common], help="s-invariant report")
    verify = sub.add_parser("verify", parents=[common], help="run a property suite")
    verify.add_argument("--suite", required=True, choices=SUITES)
    verify.add_argument("--samples", type=int, help="samples per identity (default EQKH_VERIFY_SAMPLES)")
    sub.add_parser("complex", parents=[common], help="JSON dump of the chain complex")
    sub.add_parser("basis", parents=[common], help="nu basis of Kh_h/Tor")
    sub.add_parser("transfer", parents=[common], help="SU(2) transfer of the Lee cycles")
    return p


def _configure_logging(settings: Settings, verbose: bool):
    level = logging.DEBUG if (verbose or settings.debug) else logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def run_tests() -> int:
    """Discover tests/test_*.py and run them with unittest."""
    import glob as _glob
    import importlib as _importlib
    import unittest

    loader = unittest.defaultTestLoader
    suite = unittest.TestSuite()
    for path in sorted(_glob.glob("tests/test_*.py")):
        module = path.replace("/", ".")[:-3]
        suite.addTests(loader.loadTestsFromModule(_importlib.import_module(module)))
    result = unittest.TextTestRunner(verbosity=2).run(suite)
    return 0 if result.wasSuccessful() else 1


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if "--run-tests" in argv:
        return run_tests()

    parser = _build_arg_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE

    settings = load_settings()
    _configure_logging(settings, args.verbose)
    try:
        spec = spec_from_args(args)
        if spec.file is not None:
            rows = run_batch(spec, settings)
            code = max((r["exit_code"] for r in rows), default=EXIT_OK)
            if spec.output == OutputFormat.JSON:
                payload = [{k: v for k, v in r.items() if k != "text"} for r in rows]
                print(dump_json(json_envelope(spec.command, job_input(spec), payload)))
            else:
                print(render_batch(spec.command, rows))
            return code

        source = spec.pd if spec.pd is not None else (
            BRAID_PREFIX + spec.braid if spec.braid is not None else None)
        result, text = run_job(spec, source, settings=settings)
    except KhovanovError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return exit_code_for(exc)

    if spec.output == OutputFormat.JSON:
        print(dump_json(json_envelope(spec.command, job_input(spec), result)))
    else:
        print(text)
    return EXIT_VERIFICATION if _failed(spec.command, result) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
