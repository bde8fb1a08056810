"""Lee cycles, h-divisibility and the s-invariant.

The Lee cycle of a diagram sits at the oriented resolution and puts a root
element of X^2 - hX - t on every Seifert circle, chosen by the nesting
parity coloring. Reversing the orientation swaps the two roots.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from eqkhovanov.core.coeff import DivisibilityError, RingElement, SparseMatrix
from eqkhovanov.core.complex import (
    ChainMapError,
    ChainVector,
    CubeComplex,
    build_complex,
    chain_endo,
    inclusion_map,
    involution_endo,
)
from eqkhovanov.core.diagram import LinkDiagram, seifert_data
from eqkhovanov.core.frobenius import TensorVector, Theory, TheoryError, make_theory
from eqkhovanov.core.homology import (
    ClassCoordinates,
    class_coordinates,
    free_class_cycle,
    generator_cycle,
    homology,
)
from eqkhovanov.domain.models import (
    EndoKind,
    FieldSpec,
    InvolutionKind,
    RootLabel,
    ScopeError,
    SInvariantReport,
    TheoryTag,
    VerificationError,
    _normalize_field,
)

logger = logging.getLogger(__name__)


class LeeCycleError(VerificationError):
    """The Lee labeling did not produce a cycle, or beta != sigma(alpha)"""
    pass


class SInvariantMismatchError(VerificationError):
    """The independent routes to s disagree"""
    pass


@dataclass(frozen=True)
class LeeLabeling:
    """Root label per Seifert circle of the oriented resolution."""
    vertex: Tuple[int, ...]
    labels: Tuple[RootLabel, ...]
    reversed_orientation: bool = False


def with_default_basepoint(d: LinkDiagram) -> LinkDiagram:
    """The diagram itself, or a copy based at its smallest arc."""
    if d.basepoint is not None:
        return d
    arc = min(d.all_arcs)
    logger.info(f"No basepoint given; using arc {arc}")
    return d.with_basepoint(arc)


def _require_knot(d: LinkDiagram, what: str):
    if d.is_empty:
        raise ScopeError(f"{what} needs a nonempty diagram")
    if d.num_components != 1:
        raise ScopeError(f"{what} is defined for knots; the diagram has {d.num_components} components")


def lee_labeling(d: LinkDiagram, th: Theory, reverse_orientation: bool = False) -> LeeLabeling:
    """Color each Seifert circle with the first or second Lee root.

    Raises:
        TheoryError: for u2, whose relation does not factor
    """
    first, second = th.lee_labels
    sd = seifert_data(d)
    labels = tuple(
        (first if colored_x != reverse_orientation else second)
        for colored_x in sd.lee_x
    )
    return LeeLabeling(sd.resolution.vertex, labels, reverse_orientation)


def lee_cycle(c: CubeComplex, reverse_orientation: bool = False) -> ChainVector:
    """alpha(D), or beta(D) with ``reverse_orientation``, as a verified cycle.

    Works on unreduced complexes and on reduced ones whose basepoint label
    matches the coloring.

    Raises:
        LeeCycleError: if the chain is not a cycle or misses the subcomplex
    """
    if c.is_dual:
        raise ScopeError("Lee cycles live in the cube complex, not its dual")
    th = c.theory
    labeling = lee_labeling(c.diagram, th, reverse_orientation)
    tensor = TensorVector.product([th.root_element(label) for label in labeling.labels])
    i = sum(labeling.vertex) - c.diagram.n_minus
    try:
        alpha = c.vector_from_tensors(i, {labeling.vertex: tensor})
    except ChainMapError as exc:
        raise LeeCycleError(f"Lee chain of {c.diagram.to_pd()} is outside the reduced subcomplex: {exc}") from None
    if not alpha.is_cycle():
        raise LeeCycleError(f"Lee chain of {c.diagram.name or c.diagram.to_pd()} is not a cycle: {alpha.to_str()}")
    return alpha


def lee_pair(c: CubeComplex) -> Tuple[ChainVector, ChainVector]:
    """(alpha, beta) with beta checked against the involution swapping the roots."""
    alpha = lee_cycle(c)
    beta = lee_cycle(c, reverse_orientation=True)
    th = c.theory
    kind = InvolutionKind.SIGMA_HAT if th.tag == TheoryTag.PLAIN else th.nu_involution
    if not c.reduced:
        sigma = involution_endo(c, kind)
        if not sigma.apply(alpha) == beta:
            raise LeeCycleError(f"beta != {kind.value}(alpha) for {c.diagram.name or c.diagram.to_pd()}")
    return alpha, beta


def lee_grading(c: CubeComplex) -> int:
    """Quantum degree r - w of alpha, one less when reduced."""
    sd = seifert_data(c.diagram)
    return sd.r - sd.writhe - (1 if c.reduced else 0)


def _u1(field_spec) -> Theory:
    return make_theory(TheoryTag.U1, _normalize_field(field_spec))


def h_divisibility(d: LinkDiagram, field_spec="q") -> int:
    """Largest k with [alpha] = h^k * generator modulo torsion in reduced Kh_h.

    Raises:
        ScopeError: for links or the empty diagram
        LeeCycleError: if alpha is torsion
    """
    _require_knot(d, "h_divisibility")
    d = with_default_basepoint(d)
    return _lee_divisibility(build_complex(d, _u1(field_spec), reduced=True))


def _lee_divisibility(c: CubeComplex) -> int:
    d = c.diagram
    coords = class_coordinates(c, lee_cycle(c))
    k = coords.free_valuation()
    if k is None:
        raise LeeCycleError(f"[alpha] is torsion in reduced homology of {d.name or d.to_pd()}")
    logger.info(f"d_h = {k} over {c.ring.name}")
    return k


def _divided(c: CubeComplex, coords: ClassCoordinates, power: int) -> List[RingElement]:
    R = c.ring
    divisor = c.theory.h ** power
    return [R.exquo(x, divisor) for x in coords.free_coords]


def _zeta_record(c: CubeComplex, q: int, values: List[RingElement], summands) -> Dict[str, object]:
    return {
        "q": q,
        "coordinates": [
            {"q": s.q, "value": c.ring.to_str(v)} for s, v in zip(summands, values)
        ],
    }


def _unit_determinant(c: CubeComplex, rows: List[List[RingElement]]) -> bool:
    R = c.ring
    if not rows or len(rows) != len(rows[0]):
        return False
    det = SparseMatrix.from_dense(R, rows).to_domain_matrix().det()
    return R.is_unit(det)


def sigma_acts_by(c: CubeComplex, i: int, values: List[RingElement], sign: int) -> bool:
    """True when sigma_hat sends the free class with these coordinates to sign times itself.

    The comparison is made on classes modulo torsion, so it does not depend
    on the cycle chosen to represent the class.
    """
    if "sigma_hat" not in c.cache:
        c.cache["sigma_hat"] = involution_endo(c, InvolutionKind.SIGMA_HAT)
    image = class_coordinates(c, c.cache["sigma_hat"].apply(free_class_cycle(c, i, values)))
    R = c.ring
    return image.free_coords == [R(sign) * v for v in values]


def s_invariant(d: LinkDiagram, field_spec="q") -> SInvariantReport:
    """Rasmussen invariant over a field, computed three ways.

    The routes are 2 d_h + w - r + 1, minus the average of the free quantum
    gradings of Kh_h, and minus the free grading of reduced Kh_h.

    Raises:
        ScopeError: for links or rings that are not fields
        SInvariantMismatchError: when the routes disagree
    """
    field_spec = _normalize_field(field_spec)
    if not field_spec.is_field:
        raise ScopeError("The s-invariant is computed over a field")
    _require_knot(d, "s_invariant")
    d = with_default_basepoint(d)
    th = _u1(field_spec)
    sd = seifert_data(d)
    reduced = build_complex(d, th, reduced=True)
    dh = _lee_divisibility(reduced)
    s_formula = 2 * dh + sd.writhe - sd.r + 1

    c = build_complex(d, th)
    module = homology(c)
    free = module.free_gradings()
    if len(free) != 2:
        raise SInvariantMismatchError(f"Expected two free summands, found gradings {free}")
    s_gradings = -(free[0] + free[1]) // 2

    reduced_free = homology(reduced).free_gradings()
    if len(reduced_free) != 1:
        raise SInvariantMismatchError(f"Expected one reduced free summand, found {reduced_free}")
    s_reduced = -reduced_free[0]

    if not s_formula == s_gradings == s_reduced:
        raise SInvariantMismatchError(
            f"s routes disagree for {d.name or d.to_pd()}: formula {s_formula}, "
            f"gradings {s_gradings}, reduced {s_reduced}"
        )

    alpha, beta = lee_pair(c)
    a_coords = class_coordinates(c, alpha)
    summands = a_coords.free_summands
    q_alpha = lee_grading(c)
    sign_zeta = -1 if (dh + 1) % 2 else 1
    zeta_chain = alpha + beta.scale(c.ring(sign_zeta))
    zeta_coords = class_coordinates(c, zeta_chain)
    try:
        zeta_tilde = _divided(c, a_coords, dh)
        zeta = _divided(c, zeta_coords, dh + 1)
    except DivisibilityError as exc:
        raise SInvariantMismatchError(f"Lee classes are not divisible as expected: {exc}") from None

    zeta_prime = None
    if field_spec.characteristic != 2:
        prime_chain = alpha + beta.scale(c.ring(-sign_zeta))
        zeta_prime = _zeta_record(c, q_alpha - 2 * dh, _divided(c, class_coordinates(c, prime_chain), dh), summands)

    free_ok = _unit_determinant(c, [zeta, zeta_tilde])
    if not free_ok:
        logger.error("zeta and zeta_tilde do not freely generate Kh/Tor")

    u = chain_endo(c, EndoKind.U)
    h = c.theory.h
    u_ok = u.apply(alpha) == alpha.scale(h) and u.apply(beta) == beta.scale(-h)
    i0 = a_coords.i
    sigma_ok = sigma_acts_by(c, i0, zeta, 1) and sigma_acts_by(c, i0, [h * v for v in zeta], -1)
    if not sigma_ok:
        logger.error("sigma_hat does not fix the class zeta")

    report = SInvariantReport(
        field_name=field_spec.name,
        d_h=dh,
        writhe=sd.writhe,
        seifert_circles=sd.r,
        s=s_formula,
        s_formula=s_formula,
        s_gradings=s_gradings,
        s_reduced=s_reduced,
        unreduced_free_gradings=free,
        reduced_free_grading=reduced_free[0],
        zeta=_zeta_record(c, q_alpha - 2 * dh - 2, zeta, summands),
        zeta_tilde=_zeta_record(c, q_alpha - 2 * dh, zeta_tilde, summands),
        zeta_prime=zeta_prime,
        free_generation_verified=free_ok,
        u_relations_verified=u_ok,
        zeta_sigma_fixed=sigma_ok,
        name=d.name,
    )
    logger.info(f"s = {report.s} over {field_spec.name} for {d.name or d.to_pd()}")
    return report


# ----------------------------------------------------------------------
# Links: the nu basis
# ----------------------------------------------------------------------

@dataclass
class LinkBasis:
    """Pairs (z, nu_hat z) whose classes freely generate Kh_h/Tor."""
    complex: CubeComplex
    pairs: List[Tuple[ChainVector, ChainVector]]
    verified: bool = False

    def as_dict(self) -> dict:
        out = []
        for z, nz in self.pairs:
            out.append({
                "i": z.i,
                "z": {"q": z.quantum_degree(), "chain": z.to_str()},
                "nu_z": {"q": nz.quantum_degree(), "chain": nz.to_str()},
            })
        return {"verified": self.verified, "pairs": out}


def _reduced_representatives(red: CubeComplex) -> List[ChainVector]:
    """One cycle per free summand of reduced homology, preferring simple chains."""
    module = homology(red)
    by_degree: Dict[int, List] = {}
    for s in module.free:
        by_degree.setdefault(s.i, []).append(s)
    for i, summands in by_degree.items():
        if len(summands) > 1:
            raise ScopeError(
                f"Reduced homology has free rank {len(summands)} in degree {i}; "
                "the nu basis needs rank at most one per degree"
            )
    try:
        alpha = lee_cycle(red)
    except LeeCycleError:
        alpha = None
    reps = []
    for i, (summand,) in sorted(by_degree.items()):
        candidates = []
        if alpha is not None and alpha.i == i:
            candidates.append(alpha)
        candidates += [red.basis_vector(i, k) for k, g in enumerate(red.generators[i]) if g.q == summand.q]
        all_summands = homology(red).in_degree(i)
        candidates.append(generator_cycle(red, i, all_summands.index(summand)))
        for z in candidates:
            if not z.is_cycle() or z.quantum_degree() != summand.q:
                continue
            free = class_coordinates(red, z).free_coords
            if len(free) == 1 and red.ring.is_unit(free[0]):
                reps.append(z)
                break
        else:
            raise VerificationError(f"No representative found for the free summand at {summand}")
    return reps


def link_basis_via_nu(d: LinkDiagram, field_spec="q") -> LinkBasis:
    """Cycles z_k and nu_hat(z_k) giving a basis of Kh_h/Tor over F[h].

    The z_k generate reduced homology with basepoint label X and are
    included into the unreduced complex.

    Raises:
        ScopeError: when reduced homology has free rank above one in some degree
    """
    if d.is_empty:
        raise ScopeError("link_basis_via_nu needs a nonempty diagram")
    d = with_default_basepoint(d)
    th = _u1(field_spec)
    c = build_complex(d, th)
    red = build_complex(d, th, reduced=True, label=RootLabel.X)
    incl = inclusion_map(red, c)
    nu = chain_endo(c, EndoKind.NU_HAT)
    pairs = []
    for z_red in _reduced_representatives(red):
        z = incl.apply(z_red)
        pairs.append((z, nu.apply(z)))
    basis = LinkBasis(c, pairs)
    basis.verified = _verify_basis(c, pairs)
    return basis


def _verify_basis(c: CubeComplex, pairs) -> bool:
    module = homology(c)
    by_degree: Dict[int, List[ChainVector]] = {}
    for z, nz in pairs:
        for v in (z, nz):
            by_degree.setdefault(v.i, []).append(v)
    degrees = {s.i for s in module.free} | set(by_degree)
    for i in degrees:
        rows = [class_coordinates(c, v).free_coords for v in by_degree.get(i, [])]
        if len(rows) != module.free_rank(i) or (rows and not _unit_determinant(c, rows)):
            logger.error(f"nu basis does not generate the free part in degree {i}")
            return False
    return True


# ----------------------------------------------------------------------
# SU(2) transfer
# ----------------------------------------------------------------------

@dataclass
class TransferReport:
    gamma_plus: ChainVector
    gamma_minus: ChainVector
    d_h: int
    checks: Dict[str, bool] = field(default_factory=dict)
    zeta_t: Dict[str, object] = field(default_factory=dict)
    zeta_prime_t: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def as_dict(self) -> dict:
        return {
            "d_h": self.d_h,
            "gamma_plus": {"q": self.gamma_plus.quantum_degree(), "chain": self.gamma_plus.to_str()},
            "gamma_minus": {"q": self.gamma_minus.quantum_degree(), "chain": self.gamma_minus.to_str()},
            "zeta_t": self.zeta_t,
            "zeta_prime_t": self.zeta_prime_t,
            "checks": dict(self.checks),
        }


def _descend(v: ChainVector, source: CubeComplex, target: CubeComplex) -> Optional[ChainVector]:
    """Rewrite sqrt_t^(2k) as t^k; None if an odd power occurs."""
    R, T = source.ring, target.ring
    t = T.gen("t")
    coords = {}
    for k, val in v.coords.items():
        out = T.zero
        for (e,), coeff in R.terms(val):
            if e % 2:
                return None
            out = out + T.lift(coeff) * t ** (e // 2)
        coords[k] = out
    return ChainVector(target, v.i, coords)


def su2_transfer(d: LinkDiagram, field_spec="q") -> TransferReport:
    """gamma_plus = alpha + beta and gamma_minus = (alpha - beta) / (2 sqrt_t) over F[t].

    Raises:
        ScopeError: in characteristic 2, or for links
    """
    field_spec = _normalize_field(field_spec)
    if field_spec.characteristic == 2:
        raise ScopeError("The su2 transfer divides by 2 and needs characteristic != 2")
    if not field_spec.is_field:
        raise ScopeError("The su2 transfer is computed over a field")
    _require_knot(d, "su2_transfer")
    d = with_default_basepoint(d)
    th = make_theory(TheoryTag.SU2_SQRT, field_spec)
    c = build_complex(d, th)
    alpha, beta = lee_pair(c)
    R = c.ring
    divisor = R(2) * R.gen("sqrt_t")
    gamma_plus = alpha + beta
    diff = alpha - beta
    gamma_minus = ChainVector(c, diff.i, {k: R.exquo(v, divisor) for k, v in diff.coords.items()})

    ct = build_complex(d, make_theory(TheoryTag.SU2, field_spec))
    checks: Dict[str, bool] = {}
    plus_t = _descend(gamma_plus, c, ct)
    minus_t = _descend(gamma_minus, c, ct)
    checks["integral_in_t"] = plus_t is not None and minus_t is not None
    checks["cycles"] = checks["integral_in_t"] and plus_t.is_cycle() and minus_t.is_cycle()
    residues = {gamma_plus.quantum_degree() % 4, gamma_minus.quantum_degree() % 4}
    checks["mod4_split"] = residues == {1, 3}

    dh = h_divisibility(d, field_spec)
    report = TransferReport(gamma_plus, gamma_minus, dh, checks)
    if checks["cycles"]:
        # with h -> 2 sqrt_t: (alpha +- beta) / (2 sqrt_t)^k becomes gamma / (4t)^m
        if dh % 2 == 0:
            zeta_src, zeta_power = minus_t, dh // 2
            prime_src, prime_power = plus_t, dh // 2
        else:
            zeta_src, zeta_power = plus_t, (dh + 1) // 2
            prime_src, prime_power = minus_t, (dh - 1) // 2
        T = ct.ring
        four_t = T(4) * T.gen("t")
        for key, src, power in (("zeta_t", zeta_src, zeta_power), ("zeta_prime_t", prime_src, prime_power)):
            coords = class_coordinates(ct, src)
            try:
                values = [T.exquo(x, four_t ** power) for x in coords.free_coords]
                divisible = True
            except DivisibilityError:
                values, divisible = coords.free_coords, False
            record = {
                "source": "gamma_minus" if src is minus_t else "gamma_plus",
                "power_of_4t": power,
                "coordinates": [{"q": s.q, "value": T.to_str(v)} for s, v in zip(coords.free_summands, values)],
            }
            setattr(report, key, record)
            checks[f"{key}_divisible"] = divisible
    if not report.ok:
        logger.error(f"su2 transfer checks failed: {report.checks}")
    return report
