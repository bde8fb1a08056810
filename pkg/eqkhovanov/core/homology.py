"""Bigraded homology of cube complexes over Euclidean ground rings.

Unit entries of the differentials are cancelled first (see elimination).
On what is left, for each homological degree i the kernel of d_i is read
off a graded Smith form of d_i, the image of d_{i-1} is written in that
kernel basis, and a second graded Smith form splits the quotient into cyclic summands.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from eqkhovanov.core.coeff import GroundRing, RingElement, SparseMatrix
from eqkhovanov.core.complex import ChainVector, CubeComplex, chain_endo
from eqkhovanov.core.elimination import Elimination, eliminate
from eqkhovanov.core.snf import smith_normal_form
from eqkhovanov.domain.models import EndoKind, ScopeError, Summand, TheoryTag, VerificationError

logger = logging.getLogger(__name__)


class HomologyError(VerificationError):
    """A chain handed to homology is not a cycle, or bookkeeping failed"""
    pass


@dataclass
class GradedModule:
    """Direct sum of free and cyclic torsion summands with bigradings."""
    ring: GroundRing
    summands: List[Summand] = field(default_factory=list)

    def __post_init__(self):
        self.summands = sorted(self.summands, key=Summand.sort_key)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedModule):
            return NotImplemented
        return self.keys() == other.keys()

    def __repr__(self) -> str:
        return f"GradedModule({self.ring.name}, {self.keys()})"

    def keys(self) -> List[Tuple[int, int, str]]:
        return [s.sort_key() for s in self.summands]

    @property
    def free(self) -> List[Summand]:
        return [s for s in self.summands if s.is_free]

    @property
    def torsion(self) -> List[Summand]:
        return [s for s in self.summands if not s.is_free]

    def free_gradings(self, i: Optional[int] = None) -> List[int]:
        return sorted(s.q for s in self.free if i is None or s.i == i)

    def in_degree(self, i: int) -> List[Summand]:
        return [s for s in self.summands if s.i == i]

    def free_rank(self, i: Optional[int] = None) -> int:
        return len(self.free_gradings(i))

    def shifted(self, dq: int) -> "GradedModule":
        return GradedModule(self.ring, [Summand(s.i, s.q + dq, s.order, s.order_text) for s in self.summands])

    def summand_text(self, s: Summand) -> str:
        """F[h] for a free summand, F[h]/(h^2) for torsion."""
        base = self.ring.name
        if s.is_free:
            return base
        return f"{base}/({s.order_text})"

    def as_records(self) -> List[dict]:
        return [
            {"i": s.i, "q": s.q, "free": s.is_free, "order": None if s.is_free else s.order_text,
             "module": self.summand_text(s)}
            for s in self.summands
        ]


@dataclass
class _DegreeData:
    """Presentation data of H_i: kernel basis and the quotient's Smith data."""
    kernel: SparseMatrix
    Q_inv: SparseMatrix
    rank_d: int
    P: SparseMatrix
    P_inv: SparseMatrix
    pivots: List[RingElement]
    degrees: List[int]
    # positions j of the nontrivial generators, aligned with ``summands``
    positions: List[int]
    summands: List[Summand]


@dataclass
class ClassCoordinates:
    """A homology class written in the generators of H_i.

    Free coordinates are defined modulo torsion; torsion coordinates are
    reduced modulo their order.
    """
    ring: GroundRing
    i: int
    summands: List[Summand]
    coords: List[RingElement]

    @property
    def free_coords(self) -> List[RingElement]:
        return [c for s, c in zip(self.summands, self.coords) if s.is_free]

    @property
    def free_summands(self) -> List[Summand]:
        return [s for s in self.summands if s.is_free]

    @property
    def torsion_coords(self) -> List[RingElement]:
        return [c for s, c in zip(self.summands, self.coords) if not s.is_free]

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_torsion(self) -> bool:
        return not any(self.free_coords)

    def free_valuation(self, var: int = 0) -> Optional[int]:
        """Minimum valuation over the free coordinates; None if the free part is zero."""
        vals = [self.ring.valuation(c, var) for c in self.free_coords if c]
        return min(vals) if vals else None

    def as_dict(self) -> dict:
        return {
            "i": self.i,
            "coordinates": [
                {"q": s.q, "free": s.is_free, "order": None if s.is_free else s.order_text,
                 "value": self.ring.to_str(c)}
                for s, c in zip(self.summands, self.coords)
            ],
        }


def _require_homology_ring(c: CubeComplex):
    R = c.ring
    if not R.is_euclidean:
        raise ScopeError(
            f"Homology is unavailable over {R.name}; use chain-level commands "
            "(complex, verify) or base change to a one-variable theory"
        )


def _degree_data(small: Elimination, i: int) -> _DegreeData:
    R = small.ring
    n = small.rank(i)
    qs = small.q_degrees(i)
    A = small.differential(i)
    SA = smith_normal_form(A, track_left=False, track_right=True,
                           row_degrees=small.q_degrees(i + 1), col_degrees=qs)
    r = SA.rank
    kernel = SA.Q.submatrix(range(n), range(r, n))
    kernel_degrees = SA.col_degrees[r:]
    B = SA.Q_inv @ small.differential(i - 1)
    for row in range(r):
        if B.row(row):
            raise HomologyError(f"Image of d_{i - 1} is not inside ker d_{i}")
    B_ker = B.submatrix(range(r, n), range(B.ncols))
    SB = smith_normal_form(B_ker, track_left=True, track_right=False,
                           row_degrees=kernel_degrees, col_degrees=small.q_degrees(i - 1))
    positions, summands = [], []
    for j in range(n - r):
        if j < SB.rank:
            order = SB.pivots[j]
            if R.is_unit(order):
                continue
            summands.append(Summand(i, SB.row_degrees[j], order, R.to_str(order)))
        else:
            summands.append(Summand(i, SB.row_degrees[j]))
        positions.append(j)
    logger.debug(f"H_{i}: rank d = {r}, kernel {n - r}, image rank {SB.rank}, {len(summands)} summands")
    return _DegreeData(kernel, SA.Q_inv, r, SB.P, SB.P_inv, SB.pivots, SB.row_degrees, positions, summands)


def _elimination(c: CubeComplex) -> Elimination:
    if "elimination" not in c.cache:
        _require_homology_ring(c)
        q_degrees = {i: c.q_degrees(i) for i in c.degrees}
        c.cache["elimination"] = eliminate(c.ring, q_degrees, {i: c.differential(i) for i in c.degrees})
    return c.cache["elimination"]


def _presentation(c: CubeComplex) -> Dict[int, _DegreeData]:
    if "homology" not in c.cache:
        small = _elimination(c)
        c.cache["homology"] = {i: _degree_data(small, i) for i in small.degrees}
    return c.cache["homology"]


def homology(c: CubeComplex) -> GradedModule:
    """Kh(c) as a sorted list of free and torsion summands.

    Raises:
        ScopeError: over a ground ring that is not Euclidean
    """
    data = _presentation(c)
    module = GradedModule(c.ring, [s for dd in data.values() for s in dd.summands])
    logger.info(f"Homology over {c.ring.name}: {len(module.free)} free, {len(module.torsion)} torsion summands")
    return module


def class_coordinates(c: CubeComplex, z: ChainVector) -> ClassCoordinates:
    """Coordinates of [z] in the homology generators of degree z.i.

    Raises:
        HomologyError: if z is not a cycle
    """
    if z.complex is not c:
        raise ValueError("The chain does not belong to this complex")
    if not z.is_cycle():
        raise HomologyError(f"Not a cycle: {z.to_str()}")
    data = _presentation(c)
    R = c.ring
    dd = data.get(z.i)
    if dd is None:
        return ClassCoordinates(R, z.i, [], [])
    y = dd.Q_inv.apply(_elimination(c).push(z.i, z.coords))
    y_ker = {k - dd.rank_d: v for k, v in y.items() if k >= dd.rank_d}
    w = dd.P.apply(y_ker)
    coords = []
    for j, s in zip(dd.positions, dd.summands):
        value = w.get(j, R.zero)
        if not s.is_free:
            value = R.divmod(value, s.order)[1]
        coords.append(value)
    return ClassCoordinates(R, z.i, list(dd.summands), coords)


def generator_cycle(c: CubeComplex, i: int, index: int) -> ChainVector:
    """A cycle representing the index-th summand of ``homology(c).in_degree(i)``."""
    dd = _presentation(c)[i]
    # summands are listed sorted, the presentation keeps Smith order
    order = sorted(range(len(dd.summands)), key=lambda k: dd.summands[k].sort_key())
    j = dd.positions[order[index]]
    kernel_coords = {r: vals[j] for r, vals in dd.P_inv.rows_dict().items() if j in vals}
    return ChainVector(c, i, _elimination(c).lift(i, dd.kernel.apply(kernel_coords)))


def free_generator_cycles(c: CubeComplex, i: int) -> List[ChainVector]:
    """Cycles for the free summands of H_i, aligned with ``ClassCoordinates.free_summands``."""
    dd = _presentation(c).get(i)
    if dd is None:
        return []
    small = _elimination(c)
    P_inv = dd.P_inv.rows_dict()
    cycles = []
    for j, s in zip(dd.positions, dd.summands):
        if not s.is_free:
            continue
        kernel_coords = {r: vals[j] for r, vals in P_inv.items() if j in vals}
        cycles.append(ChainVector(c, i, small.lift(i, dd.kernel.apply(kernel_coords))))
    return cycles


def free_class_cycle(c: CubeComplex, i: int, values: List[RingElement]) -> ChainVector:
    """A cycle whose class has the given free coordinates and no torsion part."""
    out = ChainVector(c, i, {})
    for v, z in zip(values, free_generator_cycles(c, i)):
        if v:
            out = out + z.scale(v)
    return out


def verify_euler_characteristic(c: CubeComplex, module: Optional[GradedModule] = None) -> bool:
    """Graded Euler characteristic of the chains equals that of the homology.

    Both sides are multiplied by (1 - q^2) so that a free summand at q
    contributes q^q and a torsion summand contributes q^q - q^(q + deg order).
    """
    module = module or homology(c)
    R = c.ring
    polynomial_ring = bool(R.names)
    chains: Dict[int, int] = {}
    for i in c.degrees:
        sign = -1 if i % 2 else 1
        for q in c.q_degrees(i):
            chains[q] = chains.get(q, 0) + sign
    homs: Dict[int, int] = {}
    for s in module.summands:
        sign = -1 if s.i % 2 else 1
        if s.is_free:
            homs[s.q] = homs.get(s.q, 0) + sign
        elif polynomial_ring:
            homs[s.q] = homs.get(s.q, 0) + sign
            top = s.q + R.degree(s.order)
            homs[top] = homs.get(top, 0) - sign
    clean = lambda d: {k: v for k, v in d.items() if v}
    ok = clean(chains) == clean(homs)
    if not ok:
        logger.error(f"Euler characteristic mismatch: chains {clean(chains)} vs homology {clean(homs)}")
    return ok


# ----------------------------------------------------------------------
# nu on homology
# ----------------------------------------------------------------------

@dataclass
class NuAcyclicityReport:
    """Exactness of (H, nu_hat) per bidegree inside a finite q window."""
    dims: Dict[Tuple[int, int], int] = field(default_factory=dict)
    rank_out: Dict[Tuple[int, int], int] = field(default_factory=dict)
    exact: Dict[Tuple[int, int], bool] = field(default_factory=dict)
    nu_squared_zero: bool = True

    @property
    def by_degree(self) -> Dict[int, bool]:
        out: Dict[int, bool] = {}
        for (i, _), ok in self.exact.items():
            out[i] = out.get(i, True) and ok
        return out

    @property
    def acyclic(self) -> bool:
        return self.nu_squared_zero and all(self.exact.values())


def _slice_basis(c: CubeComplex, i: int, q: int) -> List[Tuple[int, tuple]]:
    R = c.ring
    basis = []
    for k, g in enumerate(c.generators.get(i, ())):
        if q - g.q >= 0:
            for m in R.monomials_of_degree(q - g.q):
                basis.append((k, m))
    return basis


def _slice_matrix(c: CubeComplex, images: Dict[Tuple[int, tuple], Dict[int, RingElement]],
                  src: List[Tuple[int, tuple]], dst: List[Tuple[int, tuple]], base: GroundRing) -> SparseMatrix:
    R = c.ring
    row_of = {key: r for r, key in enumerate(dst)}
    entries = []
    for col, key in enumerate(src):
        for k, val in images[key].items():
            for m, coeff in R.terms(val):
                entries.append((row_of[(k, m)], col, coeff))
    return SparseMatrix.from_entries(base, len(dst), len(src), entries)


def _rank(M: SparseMatrix) -> int:
    if not M.nrows or not M.ncols or M.is_zero():
        return 0
    return M.to_domain_matrix().rank()


def _hstack(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    entries = list(a.entries()) + [(r, col + a.ncols, v) for r, col, v in b.entries()]
    return SparseMatrix.from_entries(a.ring, a.nrows, a.ncols + b.ncols, entries)


def nu_homology_acyclicity(c: CubeComplex) -> NuAcyclicityReport:
    """Check that nu_hat induces an exact complex on homology.

    Works with F-vector-space slices (i, q) of the chains, q running from
    the lowest generator degree to four above the highest, where
    multiplication by the variable is an isomorphism on chains.

    Raises:
        ScopeError: unless the theory is u1 or su2sqrt over a field
    """
    th = c.theory
    if th.tag not in (TheoryTag.U1, TheoryTag.SU2_SQRT) or not th.field_spec.is_field:
        raise ScopeError("nu-acyclicity is checked for u1 or su2sqrt over a field")
    if c.diagram.is_empty:
        raise ScopeError("nu-acyclicity needs a nonempty diagram")
    nu = chain_endo(c, EndoKind.NU_HAT)
    R = c.ring
    base = GroundRing(th.field_spec)
    all_q = [g.q for gs in c.generators.values() for g in gs]
    q_lo, q_hi = min(all_q), max(all_q) + 4
    report = NuAcyclicityReport()

    def images_of(i: int, q: int, fn) -> Tuple[List, Dict]:
        basis = _slice_basis(c, i, q)
        imgs = {}
        for k, m in basis:
            v = ChainVector(c, i, {k: R.from_terms({m: R.base.one})})
            imgs[(k, m)] = fn(v).coords
        return basis, imgs

    slices: Dict[Tuple[int, int], dict] = {}
    for i in c.degrees:
        for q in range(q_lo - 2, q_hi + 1):
            src, d_imgs = images_of(i, q, lambda v: v.differential())
            D = _slice_matrix(c, d_imgs, src, _slice_basis(c, i + 1, q), base)
            prev, b_imgs = images_of(i - 1, q, lambda v: v.differential())
            B = _slice_matrix(c, b_imgs, prev, src, base)
            kernel_basis = _field_kernel(D, base)
            _, n_imgs = images_of(i, q, nu.apply)
            N = _slice_matrix(c, n_imgs, src, _slice_basis(c, i, q - 2), base)
            slices[(i, q)] = {"B": B, "Z": kernel_basis, "N": N,
                              "dimH": kernel_basis.ncols - _rank(B)}

    for (i, q), s in slices.items():
        lower = slices.get((i, q - 2))
        if lower is None:
            continue
        image = s["N"] @ s["Z"]
        report.rank_out[(i, q)] = _rank(_hstack(image, lower["B"])) - _rank(lower["B"])
        report.dims[(i, q)] = s["dimH"]
        if (i, q - 4) in slices:
            twice = slices[(i, q - 2)]["N"] @ image
            if not _rank(_hstack(twice, slices[(i, q - 4)]["B"])) == _rank(slices[(i, q - 4)]["B"]):
                report.nu_squared_zero = False

    for (i, q), dim in report.dims.items():
        if not (q_lo <= q <= q_hi - 2) or (i, q + 2) not in report.rank_out:
            continue
        kernel_dim = dim - report.rank_out[(i, q)]
        report.exact[(i, q)] = kernel_dim == report.rank_out[(i, q + 2)]
    if not report.acyclic:
        bad = sorted(k for k, ok in report.exact.items() if not ok)
        logger.error(f"nu_hat is not acyclic on homology at {bad}")
    else:
        logger.info(f"nu_hat acyclic on homology for q in [{q_lo}, {q_hi - 2}]")
    return report


def _field_kernel(M: SparseMatrix, base: GroundRing) -> SparseMatrix:
    """Columns spanning the kernel of M over a field."""
    n = M.ncols
    if n == 0:
        return SparseMatrix.zeros(base, 0, 0)
    if M.nrows == 0 or M.is_zero():
        return SparseMatrix.identity(base, n)
    S = smith_normal_form(M, track_left=False, track_right=True)
    return S.Q.submatrix(range(n), range(S.rank, n))


# ----------------------------------------------------------------------
# Comparison with reduced homology
# ----------------------------------------------------------------------

@dataclass
class SplitComparison:
    """Unreduced summands against two shifted copies of the reduced ones."""
    unreduced: List[Tuple[int, int, Optional[int]]]
    doubled_reduced: List[Tuple[int, int, Optional[int]]]
    over: str

    @property
    def free_matches(self) -> bool:
        free = lambda keys: sorted(k for k in keys if k[2] is None)
        return free(self.unreduced) == free(self.doubled_reduced)

    @property
    def torsion_matches(self) -> bool:
        tors = lambda keys: sorted(k for k in keys if k[2] is not None)
        return tors(self.unreduced) == tors(self.doubled_reduced)

    def as_dict(self) -> dict:
        return {
            "over": self.over,
            "free_matches": self.free_matches,
            "torsion_matches": self.torsion_matches,
            "unreduced": [list(k) for k in self.unreduced],
            "doubled_reduced": [list(k) for k in self.doubled_reduced],
        }


def _exponent(ring: GroundRing, order: RingElement) -> int:
    return ring.degree(order) // 2


def _over_squares(module: GradedModule) -> List[Tuple[int, int, Optional[int]]]:
    """Restrict a u1 module to F[h^2]: free at q gives free at q and q+2,
    F[h]/(h^k) at q gives orders (h^2)^ceil(k/2) at q and (h^2)^floor(k/2) at q+2."""
    out = []
    for s in module.summands:
        if s.is_free:
            out += [(s.i, s.q, None), (s.i, s.q + 2, None)]
            continue
        k = _exponent(module.ring, s.order)
        for q, e in ((s.q, (k + 1) // 2), (s.q + 2, k // 2)):
            if e:
                out.append((s.i, q, e))
    return sorted(out, key=lambda t: (t[0], t[1], -1 if t[2] is None else t[2]))


def split_comparison(unreduced: CubeComplex, reduced: CubeComplex) -> SplitComparison:
    """Compare Kh with Kh_red{+1} (+) Kh_red{-1}.

    In characteristic 2 the comparison is over F[h]; otherwise both sides are
    restricted to F[h^2] first.
    """
    if unreduced.theory.tag != TheoryTag.U1 or reduced.theory != unreduced.theory:
        raise ScopeError("split_comparison compares u1 complexes over the same field")
    full = homology(unreduced)
    red = homology(reduced)
    doubled = GradedModule(red.ring, red.shifted(1).summands + red.shifted(-1).summands)
    sort = lambda keys: sorted(keys, key=lambda t: (t[0], t[1], -1 if t[2] is None else t[2]))
    if unreduced.theory.characteristic == 2:
        as_keys = lambda m: sort((s.i, s.q, None if s.is_free else _exponent(m.ring, s.order)) for s in m.summands)
        result = SplitComparison(as_keys(full), as_keys(doubled), "F[h]")
    else:
        result = SplitComparison(_over_squares(full), _over_squares(doubled), "F[h^2]")
    if not result.free_matches:
        logger.error(f"Free parts of unreduced and doubled reduced homology differ: {result.as_dict()}")
    if not result.torsion_matches:
        logger.warning("Torsion of unreduced homology is not two copies of the reduced torsion")
    return result
