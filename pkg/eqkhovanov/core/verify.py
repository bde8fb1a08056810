"""Property suites behind ``kh_equiv.py verify``.

Every suite returns a SuiteReport listing each identity with its sample
count and, on failure, the first counterexample. Randomness comes from a
seeded numpy generator so reruns are reproducible.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from eqkhovanov.core.coeff import GroundRing, SparseMatrix
from eqkhovanov.core.complex import (
    build_complex,
    chain_endo,
    involution_endo,
    mirror_dual_iso,
    split_reduced,
    verify_d_squared,
    verify_disjoint_union,
    verify_dual_iso,
    verify_homogeneous,
    verify_nu_identities,
    verify_u_squared,
    verify_wigderson,
)
from eqkhovanov.core.diagram import LinkDiagram, disjoint_union, mirror, parse_pd, reverse
from eqkhovanov.core.extensions import ARROWS, base_change, check_arrow, get_arrow
from eqkhovanov.core.frobenius import (
    AlgebraElement,
    DualTensor,
    TensorVector,
    Theory,
    comultiply,
    counit,
    dual_comultiply,
    dual_involution,
    dual_multiply,
    dualize,
    evaluate_dual,
    involution,
    make_theory,
    multiply,
    multiply_tensor,
    named_elements,
    nu_bar,
    nu_hat,
    nu_k,
    pairing,
    scalar_involution,
    scalar_nu,
    unit,
)
from eqkhovanov.core.homology import nu_homology_acyclicity, split_comparison, verify_euler_characteristic
from eqkhovanov.core.lee import lee_grading, lee_pair, s_invariant, su2_transfer, with_default_basepoint
from eqkhovanov.core.snf import invariant_factors_by_minors, is_smith_normal_form, smith_normal_form
from eqkhovanov.domain.models import (
    FieldKind,
    FieldSpec,
    InvolutionKind,
    KhovanovError,
    ScopeError,
    TheoryTag,
)

logger = logging.getLogger(__name__)

SUITES = ("frobenius", "complex", "splitting", "nu-acyclic", "lee", "snf")


@dataclass
class CheckResult:
    name: str
    passed: bool
    samples: int
    counterexample: Optional[str] = None

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "samples": self.samples,
                "counterexample": self.counterexample}


@dataclass
class SuiteReport:
    suite: str
    checks: List[CheckResult] = field(default_factory=list)
    skipped: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "skipped": list(self.skipped),
        }

    def record(self, name: str, samples: int, fn: Callable[[int], Optional[str]]):
        """Run fn(k) for k < samples; fn returns a counterexample string or None."""
        for k in range(samples):
            try:
                bad = fn(k)
            except KhovanovError as exc:
                bad = f"{type(exc).__name__}: {exc}"
            if bad:
                logger.error(f"[{self.suite}] {name} failed: {bad}")
                self.checks.append(CheckResult(name, False, k + 1, bad))
                return
        self.checks.append(CheckResult(name, True, samples))

    def flag(self, name: str, fn: Callable[[], bool]):
        """Single yes/no check."""
        self.record(name, 1, lambda _: None if fn() else "identity does not hold")


class Sampler:
    """Random scalars, algebra elements and tensors over one theory."""

    def __init__(self, rng: np.random.Generator, th: Theory, max_degree: int = 4):
        self.rng = rng
        self.th = th
        self.max_degree = max_degree

    def scalar(self):
        R = self.th.ring
        if not R.names:
            return R(int(self.rng.integers(-3, 4)))
        degree = 2 * int(self.rng.integers(0, self.max_degree // 2 + 1))
        return R.random_homogeneous(self.rng, degree)

    def element(self) -> AlgebraElement:
        return AlgebraElement(self.th, self.scalar(), self.scalar())

    def tensor(self, length: int) -> TensorVector:
        out = TensorVector.zero(self.th, length)
        for _ in range(int(self.rng.integers(1, 4))):
            labels = tuple(int(b) for b in self.rng.integers(0, 2, size=length))
            out = out + TensorVector.pure(self.th, labels, self.scalar())
        return out

    def dual_tensor(self, length: int) -> DualTensor:
        return DualTensor(self.tensor(length))


def _elt(v: TensorVector) -> AlgebraElement:
    return AlgebraElement.from_tensor(v)


def _inv(a: AlgebraElement, kind: InvolutionKind) -> AlgebraElement:
    return _elt(involution(a.to_tensor(), kind))


def _show(*items) -> str:
    return "; ".join(str(x) for x in items)


# ----------------------------------------------------------------------
# Suites
# ----------------------------------------------------------------------

def frobenius_suite(seed: int = 0, samples: int = 10000) -> SuiteReport:
    """Involution, nu and duality identities on random elements."""
    rng = np.random.default_rng(seed)
    report = SuiteReport("frobenius")
    u2 = make_theory(TheoryTag.U2, "z")
    s = Sampler(rng, u2)
    SIGMA, HAT = InvolutionKind.SIGMA, InvolutionKind.SIGMA_HAT
    tau = scalar_involution(u2, HAT)

    def sigma_ops(_):
        a, b = s.element(), s.element()
        if multiply(_inv(a, SIGMA), _inv(b, SIGMA)) != _inv(multiply(a, b), SIGMA):
            return _show("m(sigma a, sigma b) != sigma m(a, b)", a, b)
        if comultiply(_inv(a, SIGMA)) != -involution(comultiply(a), SIGMA):
            return _show("Delta sigma != -(sigma (x) sigma) Delta", a)
        if counit(_inv(a, SIGMA)) != -counit(a):
            return _show("eps sigma != -eps", a)
        return None

    def hsigma_ops(_):
        a, b, r = s.element(), s.element(), s.scalar()
        if multiply(_inv(a, HAT), _inv(b, HAT)) != _inv(multiply(a, b), HAT):
            return _show("m(sh a, sh b) != sh m(a, b)", a, b)
        if _inv(unit(r, u2), HAT) != unit(tau(r), u2):
            return _show("iota sigma_0 != sigma_1 iota", r)
        if comultiply(_inv(a, HAT)) != involution(comultiply(a), HAT):
            return _show("Delta sh != (sh (x) sh) Delta", a)
        if counit(_inv(a, HAT)) != tau(counit(a)):
            return _show("eps sh != sigma_0 eps", a)
        return None

    def involutive(_):
        for th, kinds in ((u2, (SIGMA, HAT)),
                          (make_theory(TheoryTag.U1XU1, "z"), (SIGMA, HAT, InvolutionKind.SIGMA_ALPHA)),
                          (make_theory(TheoryTag.SU2_SQRT, "z"), (HAT, InvolutionKind.SIGMA_SQRT_T))):
            x = Sampler(rng, th).tensor(int(rng.integers(1, 4)))
            for kind in kinds:
                if involution(involution(x, kind), kind) != x:
                    return _show(f"{kind.value} is not an involution", x)
        return None

    def nu_formula(th: Theory):
        sampler = Sampler(rng, th)
        sigma = th.nu_involution

        def check(_):
            x, y = sampler.tensor(1), sampler.tensor(int(rng.integers(1, 3)))
            lhs = nu_hat(x.tensor(y))
            rhs = nu_hat(x).tensor(y) + involution(x, sigma).tensor(nu_hat(y))
            if lhs != rhs:
                return _show("nu(x (x) y) != nu(x) (x) y + s(x) (x) nu(y)", x, y)
            z = x.tensor(y)
            if involution(nu_hat(z), sigma) != nu_hat(z):
                return _show("s nu != nu", z)
            if nu_hat(involution(z, sigma)) != -nu_hat(z):
                return _show("nu s != -nu", z)
            if not nu_hat(nu_hat(z)).is_zero():
                return _show("nu^2 != 0", z)
            return None
        return check

    def nu_and_algebra(_):
        a, b, r = s.element(), s.element(), s.scalar()
        ab = a.to_tensor().tensor(b.to_tensor())
        if _elt(nu_hat(multiply(a, b).to_tensor())) != multiply_tensor(nu_hat(ab)):
            return _show("nu m != m nu", a, b)
        if _elt(nu_hat(unit(r, u2).to_tensor())) != unit(scalar_nu(u2)(r), u2):
            return _show("nu iota != iota nu_0", r)
        if nu_hat(comultiply(a)) != comultiply(_elt(nu_hat(a.to_tensor()))):
            return _show("nu Delta != Delta nu", a)
        if counit(_elt(nu_hat(a.to_tensor()))) != scalar_nu(u2)(counit(a)):
            return _show("eps nu != nu_0 eps", a)
        return None

    u1_f2 = make_theory(TheoryTag.U1, "f2")
    s2 = Sampler(rng, u1_f2)
    to_plain = get_arrow("u1_to_plain")

    def nu_and_sigma(_):
        x = s2.tensor(int(rng.integers(1, 4)))
        if x + nu_bar(x).scale(u1_f2.h) != involution(x, SIGMA):
            return _show("id + h nu_bar != sigma", x)
        if nu_hat(x) != nu_bar(x):
            return _show("nu_hat != nu_bar over F2[h]", x)
        if base_change(nu_hat(x), to_plain) != nu_k(base_change(x, to_plain), 1):
            return _show("nu_hat at h = 0 != nu_1", x)
        return None

    def eigen(_):
        el = named_elements(u2)
        h = u2.h
        for v, sign in ((el["1"], 1), (el["U"], 1), (el["1"].scale(h), -1), (el["U"].scale(h), -1)):
            if _inv(v, HAT) != v.scale(u2.ring(sign)):
                return _show("sigma_hat eigenvector fails", v)
        return None

    def duality(_):
        a, b = s.element(), s.element()
        if evaluate_dual(dualize(a), b) != pairing(a, b):
            return _show("D(a)(b) != beta(a, b)", a, b)
        if dual_involution(dualize(a)) != dualize(_inv(a, HAT)):
            return _show("sh_D D != D sh", a)
        F = s.dual_tensor(2)
        if dual_comultiply(dual_involution(F)) != dual_involution(dual_comultiply(F)):
            return _show("Delta* (shD (x) shD) != shD Delta*", F)
        f = dualize(a)
        if dual_multiply(dual_involution(f)) != dual_involution(dual_multiply(f)):
            return _show("m* shD != (shD (x) shD) m*", a)
        return None

    paths = [
        (("u2_to_u1xu1", "u1xu1_to_u1"), "u2_to_u1", TheoryTag.U2),
        (("u1_to_u1xu1", "u1xu1_to_su2sqrt"), "u1_to_su2sqrt", TheoryTag.U1),
        (("u2_to_su2", "su2_to_su2sqrt"), ("u2_to_u1xu1", "u1xu1_to_su2sqrt"), TheoryTag.U2),
    ]

    def arrows(_):
        for arrow in ARROWS.values():
            if not check_arrow(arrow, make_theory(arrow.source, "z")):
                return f"{arrow.name} does not respect X^2 = hX + t"
        for left, right, source in paths:
            x = Sampler(rng, make_theory(source, "z")).tensor(2)
            via = lambda v, names: _apply_path(v, (names,) if isinstance(names, str) else names)
            if via(x, left) != via(x, right):
                return _show(f"{left} != {right}", x)
        return None

    report.record("sigma_ops", samples, sigma_ops)
    report.record("hsigma_ops", samples, hsigma_ops)
    report.record("involutions_square_to_id", max(1, samples // 10), involutive)
    report.record("hnu_formula_u2", samples, nu_formula(u2))
    report.record("hnu_formula_u1xu1", samples, nu_formula(make_theory(TheoryTag.U1XU1, "z")))
    report.record("hnu_and_A", samples, nu_and_algebra)
    report.record("nu_and_sigma_char2", samples, nu_and_sigma)
    report.record("sigma_hat_eigen", 1, eigen)
    report.record("hat_sigma_and_dual_ops", samples, duality)
    report.record("base_change_paths", max(1, samples // 100), arrows)
    return report


def _apply_path(v: TensorVector, names) -> TensorVector:
    for name in names:
        v = base_change(v, get_arrow(name))
    return v


def complex_suite(d: LinkDiagram, th: Theory) -> SuiteReport:
    """Matrix identities on the complex of one diagram."""
    report = SuiteReport("complex")
    d = with_default_basepoint(d)
    c = build_complex(d, th)
    report.flag("d_squared_and_homogeneity", lambda: verify_d_squared(c) and verify_homogeneous(c))
    report.flag("sigma_hat_chain_map", lambda: involution_endo(c, InvolutionKind.SIGMA_HAT) is not None)
    if th.tag in (TheoryTag.U2, TheoryTag.U1, TheoryTag.U1XU1, TheoryTag.SU2_SQRT):
        report.flag("nu_hat_chain_map", lambda: chain_endo(c, "nu_hat") is not None)
    if th.tag in (TheoryTag.U1, TheoryTag.U1XU1, TheoryTag.SU2_SQRT):
        report.flag("nu_bar_identities", lambda: verify_nu_identities(c))
        report.flag("u_squared", lambda: verify_u_squared(c))
    else:
        report.skipped.append("nu_bar_identities")
    if th.tag == TheoryTag.U1 and th.characteristic == 2:
        report.flag("wigderson_relation", lambda: verify_wigderson(c))
    else:
        report.skipped.append("wigderson_relation")
    report.flag("mirror_duality", lambda: verify_dual_iso(mirror_dual_iso(d, th)))
    unknot = parse_pd("unknot")
    report.flag("disjoint_union", lambda: verify_disjoint_union(
        c, build_complex(unknot, th), build_complex(disjoint_union(d, unknot), th)))
    if c.ring.is_euclidean:
        report.flag("euler_characteristic", lambda: verify_euler_characteristic(c))
    return report


def splitting_suite(d: LinkDiagram, th: Theory) -> SuiteReport:
    """Explicit splitting maps compose to identities; homology comparison for u1."""
    report = SuiteReport("splitting")
    d = with_default_basepoint(d)
    c = build_complex(d, th)
    report.flag("split_maps", lambda: split_reduced(c).verify())
    if th.tag == TheoryTag.U1 and th.field_spec.is_field:
        reduced = build_complex(d, th, reduced=True)
        report.flag("free_parts_double", lambda: split_comparison(c, reduced).free_matches)
    return report


def nu_acyclic_suite(d: LinkDiagram, th: Theory) -> SuiteReport:
    report = SuiteReport("nu-acyclic")
    c = build_complex(d, th)
    report.flag("nu_hat_acyclic_on_homology", lambda: nu_homology_acyclicity(c).acyclic)
    return report


def lee_suite(d: LinkDiagram, th: Theory) -> SuiteReport:
    """Lee cycle checks, and for knots the s-invariant routes and the su2 transfer."""
    report = SuiteReport("lee")
    d = with_default_basepoint(d)
    c = build_complex(d, th)

    def cycles():
        alpha, _ = lee_pair(c)
        return alpha.quantum_degree() == lee_grading(c)

    report.flag("alpha_cycle_beta_sigma_alpha_grading", cycles)
    knot = d.num_components == 1
    if knot and th.field_spec.is_field:
        def routes():
            rep = s_invariant(d, th.field_spec)
            return rep.free_generation_verified and rep.u_relations_verified and rep.zeta_sigma_fixed
        report.flag("s_routes_and_generators", routes)

        def symmetric():
            s = s_invariant(d, th.field_spec).s
            return (s_invariant(reverse(d), th.field_spec).s == s
                    and s_invariant(mirror(d), th.field_spec).s == -s)
        report.flag("s_reverse_and_mirror", symmetric)
        if th.characteristic != 2:
            report.flag("su2_transfer", lambda: su2_transfer(d, th.field_spec).ok)
        else:
            report.skipped.append("su2_transfer")
    else:
        report.skipped += ["s_routes_and_generators", "s_reverse_and_mirror", "su2_transfer"]
    return report


def snf_suite(seed: int = 0, samples: int = 10000) -> SuiteReport:
    """Smith forms against the determinant-divisor oracle over Z and Q[h]."""
    rng = np.random.default_rng(seed)
    report = SuiteReport("snf")
    rings = {
        "Z": GroundRing(FieldSpec(FieldKind.INTEGERS)),
        "Q[h]": GroundRing(FieldSpec(FieldKind.RATIONALS), (("h", 2),)),
    }

    def random_matrix(R: GroundRing) -> SparseMatrix:
        rows, cols = (int(x) for x in rng.integers(1, 7, size=2))
        dense = []
        for _ in range(rows):
            row = []
            for _ in range(cols):
                if rng.random() < 0.4:
                    row.append(R.zero)
                elif R.names:
                    h = R.gens[0]
                    row.append(sum((R(int(rng.integers(-2, 3))) * h ** k for k in range(3)), R.zero))
                else:
                    row.append(R(int(rng.integers(-6, 7))))
            dense.append(row)
        return SparseMatrix.from_dense(R, dense)

    def check(R: GroundRing):
        def run(_):
            M = random_matrix(R)
            S = smith_normal_form(M)
            if not is_smith_normal_form(S.S):
                return f"not in Smith form: {S.S.to_dense()}"
            if S.P @ M @ S.Q != S.S:
                return f"P M Q != S for {M.to_dense()}"
            if S.pivots != invariant_factors_by_minors(M):
                return f"invariant factors differ from minors for {M.to_dense()}"
            return None
        return run

    snf_samples = max(1, samples // 100)
    for name, R in rings.items():
        report.record(f"snf_vs_minors_{name}", snf_samples, check(R))
    return report


def run_suite(
    suite: str,
    diagram: Optional[LinkDiagram] = None,
    theory: Optional[Theory] = None,
    seed: int = 0,
    samples: int = 10000,
) -> SuiteReport:
    """Dispatch by suite name.

    Raises:
        ScopeError: unknown suite, or a diagram suite without a diagram
    """
    if suite not in SUITES:
        raise ScopeError(f"Unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    logger.info(f"Running suite {suite} (seed={seed}, samples={samples})")
    if suite == "frobenius":
        return frobenius_suite(seed, samples)
    if suite == "snf":
        return snf_suite(seed, samples)
    if diagram is None or theory is None:
        raise ScopeError(f"Suite {suite} needs a diagram and a theory")
    runners: Dict[str, Callable[[LinkDiagram, Theory], SuiteReport]] = {
        "complex": complex_suite,
        "splitting": splitting_suite,
        "nu-acyclic": nu_acyclic_suite,
        "lee": lee_suite,
    }
    return runners[suite](diagram, theory)
