"""Khovanov cube complexes over a Frobenius theory.

Generators are (vertex, labels) pairs: a cube vertex and one basis label per
circle of its resolution. A generator sits in homological degree
|v| - n_minus and quantum degree #X - #1 - |v| - n_plus + 2 n_minus, with a
further shift of -1 for reduced complexes.

A reduced complex is the subcomplex of elements whose basepoint factor is a
multiple of a root element rho = X - a. Its generators keep the label X at
the basepoint circle as a marker for rho.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from eqkhovanov.core.coeff import RingElement, SparseMatrix
from eqkhovanov.core.diagram import (
    BasepointError,
    LinkDiagram,
    Resolution,
    mirror,
    resolve,
    seifert_data,
)
from eqkhovanov.core.frobenius import (
    ONE,
    X,
    AlgebraElement,
    Labels,
    TensorVector,
    Theory,
    TheoryError,
    involution,
    merge_table,
    named_elements,
    nu_hat,
    probe_scalars,
    scalar_involution,
    scalar_nu,
    split_table,
)
from eqkhovanov.domain.models import (
    EndoKind,
    InvolutionKind,
    RootLabel,
    ScopeError,
    TheoryTag,
    VerificationError,
    _normalize_root_label,
)

logger = logging.getLogger(__name__)

Vertex = Tuple[int, ...]
Coords = Dict[int, RingElement]


class ComplexError(VerificationError):
    """A built complex violates d^2 = 0, homogeneity or the subcomplex property"""
    pass


class ChainMapError(VerificationError):
    """A map fails its chain-map or structural identity"""
    pass


@dataclass(frozen=True)
class Generator:
    vertex: Vertex
    labels: Labels
    i: int
    q: int

    def label_word(self) -> str:
        return "".join("X" if lab == X else "1" for lab in self.labels)


# ----------------------------------------------------------------------
# Complexes and chains
# ----------------------------------------------------------------------

class CubeComplex:
    """Bigraded free complex with sparse differentials d_i: C_i -> C_{i+1}."""

    def __init__(
        self,
        theory: Theory,
        diagram: LinkDiagram,
        generators: Dict[int, List[Generator]],
        differentials: Optional[Dict[int, SparseMatrix]] = None,
        root_label: Optional[RootLabel] = None,
        is_dual: bool = False,
    ):
        self.theory = theory
        self.diagram = diagram
        self.generators = {i: list(gs) for i, gs in generators.items() if gs}
        self.differentials: Dict[int, SparseMatrix] = dict(differentials or {})
        self.root_label = root_label
        self.is_dual = is_dual
        self.resolutions: Dict[Vertex, Resolution] = {}
        self.cache: Dict[str, object] = {}
        self.index: Dict[int, Dict[Tuple[Vertex, Labels], int]] = {
            i: {(g.vertex, g.labels): k for k, g in enumerate(gs)}
            for i, gs in self.generators.items()
        }

    def __repr__(self) -> str:
        kind = "dual" if self.is_dual else (f"reduced[{self.root_label.value}]" if self.reduced else "unreduced")
        return f"CubeComplex({self.theory.tag.value}/{self.theory.field_spec.name}, {kind}, ranks={self.ranks()})"

    @property
    def ring(self):
        return self.theory.ring

    @property
    def reduced(self) -> bool:
        return self.root_label is not None

    @property
    def root(self) -> RingElement:
        return self.theory.root(self.root_label)

    @property
    def degrees(self) -> List[int]:
        return sorted(self.generators)

    def ranks(self) -> Dict[int, int]:
        return {i: len(gs) for i, gs in sorted(self.generators.items())}

    def rank(self, i: int) -> int:
        return len(self.generators.get(i, ()))

    @property
    def total_rank(self) -> int:
        return sum(self.ranks().values())

    def q_degrees(self, i: int) -> List[int]:
        return [g.q for g in self.generators.get(i, ())]

    def differential(self, i: int) -> SparseMatrix:
        if i in self.differentials:
            return self.differentials[i]
        return SparseMatrix.zeros(self.ring, self.rank(i + 1), self.rank(i))

    def find(self, i: int, vertex: Vertex, labels: Labels) -> Optional[int]:
        return self.index.get(i, {}).get((tuple(vertex), tuple(labels)))

    def degree_of_vertex(self, vertex: Vertex) -> int:
        return sum(vertex) - self.diagram.n_minus

    def basepoint_circle(self, vertex: Vertex) -> int:
        res = self.resolutions[tuple(vertex)]
        if res.basepoint_circle is None:
            raise BasepointError("The diagram has no basepoint")
        return res.basepoint_circle

    # -- chains --------------------------------------------------------------

    def zero(self, i: int) -> "ChainVector":
        return ChainVector(self, i, {})

    def basis_vector(self, i: int, k: int, coeff: Optional[RingElement] = None) -> "ChainVector":
        return ChainVector(self, i, {k: self.ring.one if coeff is None else coeff})

    def generator_tensor(self, g: Generator) -> TensorVector:
        """The tensor a generator stands for; X - a at the basepoint when reduced."""
        th = self.theory
        pure = TensorVector.pure(th, g.labels)
        if not self.reduced or not self.root:
            return pure
        b = self.basepoint_circle(g.vertex)
        lowered = g.labels[:b] + (ONE,) + g.labels[b + 1:]
        return pure - TensorVector.pure(th, lowered, self.root)

    def coords_from_tensor(self, vertex: Vertex, tensor: TensorVector) -> Coords:
        """Coordinates of a tensor at ``vertex`` in this complex's basis.

        Raises:
            ChainMapError: if the tensor is outside the reduced subcomplex
        """
        vertex = tuple(vertex)
        i = self.degree_of_vertex(vertex)
        out: Coords = {}
        if not self.reduced:
            for labels, c in tensor.terms.items():
                out[self.index[i][(vertex, labels)]] = c
            return out
        b = self.basepoint_circle(vertex)
        a = self.root
        for labels, c in tensor.terms.items():
            if labels[b] == X:
                out[self.index[i][(vertex, labels)]] = c
        for labels, c in tensor.terms.items():
            if labels[b] == ONE:
                partner = labels[:b] + (X,) + labels[b + 1:]
                k = self.index[i].get((vertex, partner))
                expected = -(a * out.get(k, self.ring.zero)) if k is not None else None
                if expected is None or c != expected:
                    raise ChainMapError(
                        f"{tensor.to_str()} at {vertex} is not in the {self.root_label.value} subcomplex"
                    )
        return out

    def tensor_at(self, v: "ChainVector", vertex: Vertex) -> TensorVector:
        vertex = tuple(vertex)
        out = None
        for k, c in v.coords.items():
            g = self.generators[v.i][k]
            if g.vertex == vertex:
                term = self.generator_tensor(g).scale(c)
                out = term if out is None else out + term
        if out is None:
            return TensorVector.zero(self.theory, self.resolutions[vertex].num_circles)
        return out

    def vector_from_tensors(self, i: int, tensors: Dict[Vertex, TensorVector]) -> "ChainVector":
        coords: Coords = {}
        for vertex, tensor in tensors.items():
            coords.update(self.coords_from_tensor(vertex, tensor))
        return ChainVector(self, i, coords)


class ChainVector:
    """Element of one homological degree of a CubeComplex."""

    def __init__(self, complex_: CubeComplex, i: int, coords: Coords):
        self.complex = complex_
        self.i = i
        self.coords: Coords = {k: c for k, c in coords.items() if c}

    def _check(self, other: "ChainVector"):
        if other.complex is not self.complex or other.i != self.i:
            raise ValueError("Chain vectors live in different complexes or degrees")

    def __add__(self, other: "ChainVector") -> "ChainVector":
        self._check(other)
        out = dict(self.coords)
        zero = self.complex.ring.zero
        for k, c in other.coords.items():
            out[k] = out.get(k, zero) + c
        return ChainVector(self.complex, self.i, out)

    def __sub__(self, other: "ChainVector") -> "ChainVector":
        return self + (-other)

    def __neg__(self) -> "ChainVector":
        return ChainVector(self.complex, self.i, {k: -c for k, c in self.coords.items()})

    def scale(self, r: RingElement) -> "ChainVector":
        return ChainVector(self.complex, self.i, {k: r * c for k, c in self.coords.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainVector):
            return NotImplemented
        return other.complex is self.complex and other.i == self.i and (self - other).is_zero()

    def __repr__(self) -> str:
        return f"ChainVector(i={self.i}, {self.to_str()})"

    def is_zero(self) -> bool:
        return not self.coords

    def differential(self) -> "ChainVector":
        d = self.complex.differential(self.i)
        return ChainVector(self.complex, self.i + 1, d.apply(self.coords))

    def is_cycle(self) -> bool:
        return self.differential().is_zero()

    def quantum_degree(self) -> Optional[int]:
        """Common quantum degree of all terms, None for zero.

        Raises:
            ComplexError: if the chain is not homogeneous
        """
        R = self.complex.ring
        degrees = set()
        for k, c in self.coords.items():
            q = self.complex.generators[self.i][k].q
            for m, _ in R.terms(c):
                degrees.add(q + R.monomial_degree(m))
        if len(degrees) > 1:
            raise ComplexError(f"Chain {self.to_str()} is not homogeneous: {sorted(degrees)}")
        return degrees.pop() if degrees else None

    def to_str(self) -> str:
        if not self.coords:
            return "0"
        R = self.complex.ring
        parts = []
        for k in sorted(self.coords):
            g = self.complex.generators[self.i][k]
            v = "".join(str(b) for b in g.vertex)
            parts.append(f"({R.to_str(self.coords[k])})·[{v}|{g.label_word()}]")
        return " + ".join(parts)


# ----------------------------------------------------------------------
# Building
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class _Edge:
    target: Vertex
    sign: int
    merge: bool
    touched_src: Tuple[int, ...]
    touched_dst: Tuple[int, ...]
    carry: Tuple[Tuple[int, int], ...]
    dst_size: int


def _edges_from(d: LinkDiagram, resolutions: Dict[Vertex, Resolution], v: Vertex) -> List[_Edge]:
    edges = []
    src = resolutions[v]
    for k, bit in enumerate(v):
        if bit:
            continue
        w = v[:k] + (1,) + v[k + 1:]
        dst = resolutions[w]
        arcs = d.crossings[k]
        s_set = tuple(sorted({src.arc_to_circle[a] for a in arcs}))
        t_set = tuple(sorted({dst.arc_to_circle[a] for a in arcs}))
        if len(s_set) == 2 and len(t_set) == 1:
            merge = True
        elif len(s_set) == 1 and len(t_set) == 2:
            merge = False
        else:
            raise ComplexError(f"Edge {v} -> {w} is neither a merge nor a split")
        carry = tuple(
            (s, dst.arc_to_circle[src.circles[s][0]])
            for s in range(src.num_circles) if s not in s_set
        )
        sign = -1 if sum(v[:k]) % 2 else 1
        edges.append(_Edge(w, sign, merge, s_set, t_set, carry, dst.num_circles))
    return edges


def _edge_terms(th: Theory, edge: _Edge, labels: Labels) -> Iterator[Tuple[Labels, RingElement]]:
    base: List[Optional[int]] = [None] * edge.dst_size
    for s, t in edge.carry:
        base[t] = labels[s]
    if edge.merge:
        i, j = edge.touched_src
        (m,) = edge.touched_dst
        for lab, c in merge_table(th)[(labels[i], labels[j])]:
            new = list(base)
            new[m] = lab
            yield tuple(new), c
    else:
        (i,) = edge.touched_src
        a, b = edge.touched_dst
        for (l1, l2), c in split_table(th)[labels[i]]:
            new = list(base)
            new[a], new[b] = l1, l2
            yield tuple(new), c


def lee_root_label(d: LinkDiagram, th: Theory) -> RootLabel:
    """Root carried by the basepoint circle in the Lee coloring."""
    if d.basepoint is None:
        raise BasepointError("A basepoint is required")
    sd = seifert_data(d)
    first, second = th.lee_labels
    circle = sd.resolution.arc_to_circle[d.basepoint]
    return first if sd.lee_x[circle] else second


def build_complex(
    d: LinkDiagram,
    th: Theory,
    reduced: bool = False,
    label=None,
    max_crossings: Optional[int] = None,
) -> CubeComplex:
    """Build CKh(D) or its reduced subcomplex.

    Args:
        d: diagram; reduced complexes need ``d.basepoint``
        th: Frobenius theory
        reduced: build the subcomplex at the basepoint
        label: root label of the basepoint factor; None picks the Lee one
        max_crossings: refuse larger diagrams

    Returns:
        CubeComplex with d^2 = 0 and homogeneity verified

    Raises:
        BasepointError: reduced without a basepoint
        TheoryError: label is not a root of the theory
        ComplexError: d^2 != 0 or a non-homogeneous entry
    """
    if d.is_empty:
        raise ScopeError("The empty diagram has no complex here")
    if max_crossings is not None and d.n > max_crossings:
        raise ScopeError(f"Diagram has {d.n} crossings, limit is {max_crossings}")
    root_label = None
    if reduced:
        if d.basepoint is None:
            raise BasepointError("Reduced complexes need a basepoint")
        root_label = _normalize_root_label(label) if label is not None else lee_root_label(d, th)
        th.root(root_label)
    elif label is not None:
        raise ScopeError("A basepoint label only applies to reduced complexes")

    n_plus, n_minus = d.n_plus, d.n_minus
    vertices = sorted(itertools.product((0, 1), repeat=d.n), key=lambda v: (sum(v), v))
    resolutions = {v: resolve(d, v) for v in vertices}
    generators: Dict[int, List[Generator]] = {}
    shift = -1 if reduced else 0
    for v in vertices:
        res = resolutions[v]
        i = sum(v) - n_minus
        bp = res.basepoint_circle
        for labels in itertools.product((ONE, X), repeat=res.num_circles):
            if reduced and labels[bp] != X:
                continue
            q = sum(1 if lab == X else -1 for lab in labels) - sum(v) - n_plus + 2 * n_minus + shift
            generators.setdefault(i, []).append(Generator(v, labels, i, q))

    c = CubeComplex(th, d, generators, root_label=root_label)
    c.resolutions = resolutions
    edges = {v: _edges_from(d, resolutions, v) for v in vertices}
    for i in c.degrees:
        if (i + 1) in c.generators:
            c.differentials[i] = _differential(c, i, edges)
    verify_d_squared(c)
    verify_homogeneous(c)
    kind = f"reduced at {root_label.value}" if reduced else "unreduced"
    logger.info(f"Built {kind} {th.tag.value} complex over {th.field_spec.name}: n={d.n}, ranks={c.ranks()}")
    return c


def _differential(c: CubeComplex, i: int, edges: Dict[Vertex, List[_Edge]]) -> SparseMatrix:
    th = c.theory
    R = th.ring
    zero = R.zero
    rows: Dict[int, Dict[int, RingElement]] = {}
    a = c.root if c.reduced else None
    for col, g in enumerate(c.generators[i]):
        for edge in edges[g.vertex]:
            acc: Dict[Labels, RingElement] = {}
            for labels, coeff in _edge_terms(th, edge, g.labels):
                acc[labels] = acc.get(labels, zero) + coeff
            if c.reduced:
                b = c.basepoint_circle(g.vertex)
                if a:
                    lowered = g.labels[:b] + (ONE,) + g.labels[b + 1:]
                    for labels, coeff in _edge_terms(th, edge, lowered):
                        acc[labels] = acc.get(labels, zero) - a * coeff
                b2 = c.basepoint_circle(edge.target)
                kept = {}
                for labels, val in acc.items():
                    if labels[b2] == X:
                        kept[labels] = val
                        continue
                    partner = labels[:b2] + (X,) + labels[b2 + 1:]
                    expected = -(a * acc.get(partner, zero)) if a else zero
                    if val != expected:
                        raise ComplexError(f"Reduced differential leaves the subcomplex at {edge.target}")
                acc = kept
            for labels, val in acc.items():
                if not val:
                    continue
                row = c.index[i + 1][(edge.target, labels)]
                entry = val if edge.sign > 0 else -val
                target = rows.setdefault(row, {})
                target[col] = target.get(col, zero) + entry
    return SparseMatrix(R, c.rank(i + 1), c.rank(i), rows)


def verify_d_squared(c: CubeComplex) -> bool:
    """Raises ComplexError unless d_{i+1} d_i = 0 for every i."""
    for i in c.degrees:
        if i in c.differentials and (i + 1) in c.differentials:
            if not (c.differentials[i + 1] @ c.differentials[i]).is_zero():
                raise ComplexError(f"d^2 != 0 at degree {i} for {c.diagram.name or c.diagram.to_pd()}")
    return True


def verify_homogeneous(c: CubeComplex) -> bool:
    """Raises ComplexError unless every entry has degree q(source) - q(target)."""
    R = c.ring
    for i, d in c.differentials.items():
        src, tgt = c.generators[i], c.generators[i + 1]
        for r, col, v in d.entries():
            expected = src[col].q - tgt[r].q
            if not R.is_homogeneous(v) or R.degree(v) != expected:
                raise ComplexError(f"Entry {R.to_str(v)} at ({r},{col}) in degree {i} is not of degree {expected}")
    return True


# ----------------------------------------------------------------------
# Chain maps
# ----------------------------------------------------------------------

class ChainMap:
    """A map f with f(r e) = delta(r) J(e) + tau(r) f(e) on generators e.

    ``columns[i][k]`` holds f(e_k) for generator k of source degree i.
    Without tau and delta the map is linear. J is the identity unless
    ``delta_columns`` is given.
    """

    def __init__(
        self,
        source: CubeComplex,
        target: CubeComplex,
        columns: Dict[int, Dict[int, Coords]],
        degree: int = 0,
        tau: Optional[Callable[[RingElement], RingElement]] = None,
        delta: Optional[Callable[[RingElement], RingElement]] = None,
        delta_columns: Optional[Dict[int, Dict[int, Coords]]] = None,
        probe_kind: Optional[InvolutionKind] = None,
        name: str = "",
    ):
        self.source = source
        self.target = target
        self.columns = columns
        self.degree = degree
        self.tau = tau
        self.delta = delta
        self.delta_columns = delta_columns
        self.probe_kind = probe_kind
        self.name = name

    def __repr__(self) -> str:
        return f"ChainMap({self.name or 'f'}, degree={self.degree}, linear={self.is_linear})"

    @property
    def is_linear(self) -> bool:
        return self.tau is None and self.delta is None

    def apply(self, v: ChainVector) -> ChainVector:
        if v.complex is not self.source:
            raise ValueError(f"{self.name or 'map'} applied to a chain of another complex")
        R = self.target.ring
        zero = R.zero
        out: Coords = {}
        cols = self.columns.get(v.i, {})
        jcols = self.delta_columns.get(v.i, {}) if self.delta_columns is not None else None
        for k, r in v.coords.items():
            rr = self.tau(r) if self.tau else r
            if rr:
                for row, c in cols.get(k, {}).items():
                    out[row] = out.get(row, zero) + rr * c
            if self.delta:
                dr = self.delta(r)
                if dr:
                    image = {k: R.one} if jcols is None else jcols.get(k, {})
                    for row, c in image.items():
                        out[row] = out.get(row, zero) + dr * c
        return ChainVector(self.target, v.i + self.degree, out)

    def matrix(self, i: int) -> SparseMatrix:
        if not self.is_linear:
            raise ValueError(f"{self.name} is not linear; compare it on probes instead")
        rows: Dict[int, Dict[int, RingElement]] = {}
        for k, image in self.columns.get(i, {}).items():
            for row, c in image.items():
                rows.setdefault(row, {})[k] = c
        return SparseMatrix(self.target.ring, self.target.rank(i + self.degree), self.source.rank(i), rows)

    def negated(self) -> "ChainMap":
        neg = lambda cols: {i: {k: {r: -c for r, c in img.items()} for k, img in ks.items()} for i, ks in cols.items()}
        delta = (lambda r, d=self.delta: -d(r)) if self.delta else None
        return ChainMap(self.source, self.target, neg(self.columns), self.degree, self.tau, delta,
                        self.delta_columns, self.probe_kind, f"-{self.name}")


def probes(c: CubeComplex, kinds: Sequence[Optional[InvolutionKind]] = (None,)) -> Iterator[ChainVector]:
    """theta * e for every generator e and every theta spanning R over the fixed subring."""
    thetas = []
    for kind in kinds:
        for th in probe_scalars(c.theory, kind):
            if all(th != seen for seen in thetas):
                thetas.append(th)
    for i in c.degrees:
        for k in range(c.rank(i)):
            for theta in thetas:
                yield c.basis_vector(i, k, theta)


def _local_map(
    c: CubeComplex,
    fn: Callable[[Generator, TensorVector], TensorVector],
    target: Optional[CubeComplex] = None,
) -> Dict[int, Dict[int, Coords]]:
    target = target or c
    columns: Dict[int, Dict[int, Coords]] = {}
    for i in c.degrees:
        cols = {}
        for k, g in enumerate(c.generators[i]):
            image = fn(g, c.generator_tensor(g))
            cols[k] = target.coords_from_tensor(g.vertex, image)
        columns[i] = cols
    return columns


def verify_chain_map(f: ChainMap, sign: int = 1, raise_on_failure: bool = False) -> bool:
    """d f = sign * f d on all probes."""
    for v in probes(f.source, (f.probe_kind,)):
        lhs = f.apply(v).differential()
        rhs = f.apply(v.differential())
        if sign < 0:
            rhs = -rhs
        if not lhs == rhs:
            msg = f"{f.name} is not a chain map on {v.to_str()}"
            logger.error(msg)
            if raise_on_failure:
                raise ChainMapError(msg)
            return False
    return True


def involution_endo(c: CubeComplex, kind: InvolutionKind) -> ChainMap:
    """sigma, sigma_hat, sigma_alpha or sigma_sqrt_t on an unreduced complex."""
    _require_unreduced(c, kind.value)
    th = c.theory
    tau = scalar_involution(th, kind)
    columns = _local_map(c, lambda g, t: involution(t, kind, th))
    f = ChainMap(c, c, columns, tau=tau, probe_kind=kind, name=kind.value)
    verify_chain_map(f, raise_on_failure=True)
    return f


def multiplication_endo(c: CubeComplex, element: AlgebraElement, name: str) -> ChainMap:
    """Multiply the basepoint factor by ``element``."""
    if c.diagram.basepoint is None:
        raise BasepointError(f"{name} needs a basepoint")
    columns = _local_map(c, lambda g, t: t.multiply_factor(c.basepoint_circle(g.vertex), element))
    f = ChainMap(c, c, columns, name=name)
    verify_chain_map(f, raise_on_failure=True)
    return f


def _require_unreduced(c: CubeComplex, what: str):
    if c.reduced or c.is_dual:
        raise ScopeError(f"{what} is defined on unreduced complexes")


def _u_sign(c: CubeComplex) -> int:
    sd = seifert_data(c.diagram)
    return 1 if sd.lee_x[sd.resolution.arc_to_circle[c.diagram.basepoint]] else -1


def chain_endo(c: CubeComplex, kind) -> ChainMap:
    """A verified chain endomorphism of ``c``.

    sigma_hat and nu_hat are twisted-linear; the bars, u and K act on the
    basepoint factor. K is the char-2 homotopy of the cone description and is
    checked through ``verify_wigderson`` instead of the chain-map equation.

    Raises:
        BasepointError: basepoint maps without a basepoint
        TheoryError: the map does not exist for the theory
        ChainMapError: the chain-map equation fails
    """
    kind = EndoKind(kind) if isinstance(kind, str) else kind
    th = c.theory
    if kind == EndoKind.SIGMA_HAT:
        return involution_endo(c, InvolutionKind.SIGMA_HAT)
    if kind == EndoKind.NU_HAT:
        _require_unreduced(c, "nu_hat")
        inv_kind = th.nu_involution
        columns = _local_map(c, lambda g, t: nu_hat(t, th))
        f = ChainMap(c, c, columns, tau=scalar_involution(th, inv_kind), delta=scalar_nu(th),
                     probe_kind=inv_kind, name="nu_hat")
        verify_chain_map(f, raise_on_failure=True)
        return f
    elements = named_elements(th)
    if kind == EndoKind.XBAR:
        return multiplication_endo(c, elements["X"], "xbar")
    if kind == EndoKind.YBAR:
        return multiplication_endo(c, elements["Y"], "ybar")
    if kind == EndoKind.X1BAR:
        return multiplication_endo(c, th.root_element(RootLabel.X1), "x1bar")
    if kind == EndoKind.X2BAR:
        return multiplication_endo(c, th.root_element(RootLabel.X2), "x2bar")
    if kind == EndoKind.U:
        if c.diagram.basepoint is None:
            raise BasepointError("u needs a basepoint")
        u = elements["U"] if _u_sign(c) > 0 else -elements["U"]
        return multiplication_endo(c, u, "u")
    if kind == EndoKind.WIGDERSON_K:
        return wigderson_homotopy(c)
    raise ValueError(f"Unknown endomorphism {kind}")


def root_bars(c: CubeComplex) -> Tuple[ChainMap, ChainMap]:
    """Multiplication by the two Lee roots X - a1, X - a2 at the basepoint."""
    first, second = c.theory.lee_labels
    th = c.theory
    return (
        multiplication_endo(c, th.root_element(first), f"bar[{first.value}]"),
        multiplication_endo(c, th.root_element(second), f"bar[{second.value}]"),
    )


def wigderson_homotopy(c: CubeComplex) -> ChainMap:
    """K(1 (x) y) = X (x) nu_hat(y) and K = 0 on the X subcomplex (u1, characteristic 2)."""
    th = c.theory
    _require_unreduced(c, "K")
    if th.tag != TheoryTag.U1 or th.characteristic != 2:
        raise TheoryError("The homotopy K is defined for u1 in characteristic 2")
    if c.diagram.basepoint is None:
        raise BasepointError("K needs a basepoint")
    x_elem = named_elements(th)["X"]

    def image(g: Generator, t: TensorVector) -> TensorVector:
        b = c.basepoint_circle(g.vertex)
        if g.labels[b] == X:
            return TensorVector.zero(th, t.length)
        rest = t.split_factor(b)[ONE]
        return nu_hat(rest, th).insert_factor(b, x_elem)

    return ChainMap(c, c, _local_map(c, image), name="wigderson_K")


# ----------------------------------------------------------------------
# Identity checks
# ----------------------------------------------------------------------

def _same_on(c: CubeComplex, kinds, lhs: Callable[[ChainVector], ChainVector],
             rhs: Callable[[ChainVector], ChainVector], what: str) -> bool:
    for v in probes(c, kinds):
        if not lhs(v) == rhs(v):
            logger.error(f"{what} fails on {v.to_str()}")
            return False
    return True


def verify_nu_identities(c: CubeComplex) -> bool:
    """nu X1 - X2 nu = id, X1 nu - nu X2 = id, nu^2 = 0, s nu = nu = -nu s."""
    nu = chain_endo(c, EndoKind.NU_HAT)
    sigma = involution_endo(c, c.theory.nu_involution)
    x1, x2 = root_bars(c)
    kinds = (nu.probe_kind,)
    checks = [
        (lambda v: nu.apply(x1.apply(v)) - x2.apply(nu.apply(v)), lambda v: v, "nu X1 - X2 nu = id"),
        (lambda v: x1.apply(nu.apply(v)) - nu.apply(x2.apply(v)), lambda v: v, "X1 nu - nu X2 = id"),
        (lambda v: nu.apply(nu.apply(v)), lambda v: v.scale(c.ring.zero), "nu^2 = 0"),
        (lambda v: sigma.apply(nu.apply(v)), nu.apply, "sigma nu = nu"),
        (lambda v: nu.apply(sigma.apply(v)), lambda v: -nu.apply(v), "nu sigma = -nu"),
    ]
    return all(_same_on(c, kinds, lhs, rhs, what) for lhs, rhs, what in checks)


def verify_u_squared(c: CubeComplex) -> bool:
    """u^2 = h^2 + 4t, the discriminant of X^2 - hX - t."""
    u = chain_endo(c, EndoKind.U)
    th = c.theory
    disc = th.h * th.h + th.ring(4) * th.t
    return _same_on(c, (None,), lambda v: u.apply(u.apply(v)), lambda v: v.scale(disc), "u^2 = h^2 + 4t")


def verify_wigderson(c: CubeComplex) -> bool:
    """f = d_X K + K d_1 where f is the C_1 -> C_X block of d."""
    K = wigderson_homotopy(c)
    for i in c.degrees:
        for k, g in enumerate(c.generators[i]):
            if g.labels[c.basepoint_circle(g.vertex)] == X:
                continue
            e = c.basis_vector(i, k)
            de = e.differential()
            f_e = ChainVector(c, i + 1, {
                r: val for r, val in de.coords.items()
                if _label_at_basepoint(c, i + 1, r) == X
            })
            rhs = K.apply(e).differential() + K.apply(de)
            if not f_e == rhs:
                logger.error(f"f != dK + Kd on generator {g}")
                return False
    return True


def _label_at_basepoint(c: CubeComplex, i: int, k: int) -> int:
    g = c.generators[i][k]
    return g.labels[c.basepoint_circle(g.vertex)]


# ----------------------------------------------------------------------
# Splitting into reduced complexes
# ----------------------------------------------------------------------

def inclusion_map(sub: CubeComplex, full: CubeComplex) -> ChainMap:
    """The inclusion of a reduced subcomplex into the unreduced complex."""
    return ChainMap(sub, full, _local_map(sub, lambda g, t: t, target=full), name=f"incl[{sub.root_label.value}]")


def restrict_to(sub: CubeComplex, v: ChainVector) -> ChainVector:
    """Coordinates in ``sub`` of a chain of the unreduced complex lying in it.

    Raises:
        ChainMapError: if ``v`` is not in the subcomplex
    """
    full = v.complex
    by_vertex: Dict[Vertex, TensorVector] = {}
    for k in v.coords:
        vertex = full.generators[v.i][k].vertex
        if vertex not in by_vertex:
            by_vertex[vertex] = full.tensor_at(v, vertex)
    return sub.vector_from_tensors(v.i, by_vertex)


@dataclass
class SplitData:
    """C = C_first (+) C_second with Phi(a, b) = a - nu(b), Psi(c) = (c + nu Xb c, Xb c)."""
    full: CubeComplex
    first: CubeComplex
    second: CubeComplex
    include_first: ChainMap
    include_second: ChainMap
    project_second: ChainMap
    section: ChainMap
    nu: ChainMap
    bar_second: ChainMap
    sigma: ChainMap
    checks: Dict[str, bool] = field(default_factory=dict)

    def forward(self, a: ChainVector, b: ChainVector) -> ChainVector:
        return self.include_first.apply(a) + self.section.apply(b)

    def backward(self, c: ChainVector) -> Tuple[ChainVector, ChainVector]:
        lifted = c + self.nu.apply(self.bar_second.apply(c))
        return restrict_to(self.first, lifted), self.project_second.apply(c)

    def verify(self) -> bool:
        kinds = (self.nu.probe_kind,)
        ok = {}
        ok["chain_maps"] = all(
            verify_chain_map(f) for f in (self.include_first, self.include_second, self.project_second, self.section)
        )
        ok["phi_psi"] = all(self.forward(*self.backward(v)) == v for v in probes(self.full, kinds))
        ok["psi_phi_first"] = all(
            self.backward(self.forward(a, self.second.zero(a.i))) == (a, self.second.zero(a.i))
            for a in probes(self.first, kinds)
        )
        ok["psi_phi_second"] = all(
            self.backward(self.forward(self.first.zero(b.i), b)) == (self.first.zero(b.i), b)
            for b in probes(self.second, kinds)
        )
        ok["exact"] = all(
            self.project_second.apply(self.include_first.apply(a)).is_zero()
            for a in probes(self.first)
        )
        ok["sigma_swaps"] = self._sigma_swaps()
        self.checks = ok
        for name, passed in ok.items():
            if not passed:
                logger.error(f"Splitting check {name} failed for {self.full.diagram.name or self.full.diagram.to_pd()}")
        return all(ok.values())

    def _sigma_swaps(self) -> bool:
        try:
            for sub, other in ((self.first, self.second), (self.second, self.first)):
                incl = self.include_first if sub is self.first else self.include_second
                for i in sub.degrees:
                    for k in range(sub.rank(i)):
                        restrict_to(other, self.sigma.apply(incl.apply(sub.basis_vector(i, k))))
        except ChainMapError as exc:
            logger.error(f"Involution does not swap the reduced subcomplexes: {exc}")
            return False
        return True


def split_reduced(c: CubeComplex) -> SplitData:
    """Explicit splitting of an unreduced complex into its two reduced subcomplexes.

    Available for u1 (over the subring fixed by sigma_hat, or over F2[h]),
    u1xu1 (via sigma_alpha) and su2sqrt (via sigma_sqrt_t).

    Raises:
        TheoryError: for theories without two roots and a nu operation
        BasepointError: without a basepoint
    """
    th = c.theory
    _require_unreduced(c, "split_reduced")
    if th.tag not in (TheoryTag.U1, TheoryTag.U1XU1, TheoryTag.SU2_SQRT):
        raise TheoryError(f"Splitting is available for u1, u1xu1 and su2sqrt, not {th.tag.value}")
    d = c.diagram
    if d.basepoint is None:
        raise BasepointError("Splitting needs a basepoint")
    first_label, second_label = th.lee_labels
    first = build_complex(d, th, reduced=True, label=first_label)
    second = build_complex(d, th, reduced=True, label=second_label)
    nu = chain_endo(c, EndoKind.NU_HAT)
    sigma = involution_endo(c, th.nu_involution)
    _, bar_second = root_bars(c)
    include_first = inclusion_map(first, c)
    include_second = inclusion_map(second, c)
    project_second = ChainMap(
        c, second,
        _local_map(c, lambda g, t: t.multiply_factor(c.basepoint_circle(g.vertex), th.root_element(second_label)),
                   target=second),
        name="project_second",
    )
    section_cols = {}
    for i in second.degrees:
        section_cols[i] = {
            k: (-nu.apply(include_second.apply(second.basis_vector(i, k)))).coords
            for k in range(second.rank(i))
        }
    section = ChainMap(
        second, c, section_cols, tau=nu.tau, delta=lambda r: -nu.delta(r),
        delta_columns=include_second.columns, probe_kind=nu.probe_kind, name="section",
    )
    return SplitData(c, first, second, include_first, include_second, project_second,
                     section, nu, bar_second, sigma)


# ----------------------------------------------------------------------
# Duality
# ----------------------------------------------------------------------

def dual_complex(c: CubeComplex) -> CubeComplex:
    """Hom(C, R) with degrees negated and transposed differentials."""
    gens = {-i: [Generator(g.vertex, g.labels, -i, -g.q) for g in gs] for i, gs in c.generators.items()}
    dual = CubeComplex(c.theory, c.diagram, gens, root_label=c.root_label, is_dual=True)
    dual.resolutions = c.resolutions
    for j in dual.degrees:
        if (j + 1) in dual.generators:
            dual.differentials[j] = c.differential(-j - 1).transpose()
    return dual


def _dual_factor(th: Theory) -> Dict[int, Tuple[Tuple[int, RingElement], ...]]:
    # D(1) = X*, D(X) = 1* + h X*
    R = th.ring
    return {ONE: ((X, R.one),), X: ((ONE, R.one),) + (((X, th.h),) if th.h else ())}


def _vertex_sign(w: Vertex) -> int:
    return -1 if sum(k for k, bit in enumerate(w) if bit) % 2 else 1


def mirror_dual_iso(d: LinkDiagram, th: Theory) -> ChainMap:
    """CKh(D*) -> CKh(D)*, (w, y) -> eps(w) D(y) at the complementary vertex.

    eps(w) = (-1)^(sum of the positions of the 1s in w).

    Raises:
        ChainMapError: if the map is not a chain map
    """
    source = build_complex(mirror(d), th)
    target = dual_complex(build_complex(d, th))
    factor = _dual_factor(th)
    R = th.ring
    columns: Dict[int, Dict[int, Coords]] = {}
    for i in source.degrees:
        cols = {}
        for k, g in enumerate(source.generators[i]):
            wbar = tuple(1 - b for b in g.vertex)
            terms: Dict[Labels, RingElement] = {(): R(_vertex_sign(g.vertex))}
            for lab in g.labels:
                terms = {
                    labels + (new,): c * f
                    for labels, c in terms.items() for new, f in factor[lab]
                }
            cols[k] = {target.index[i][(wbar, labels)]: c for labels, c in terms.items() if c}
        columns[i] = cols
    f = ChainMap(source, target, columns, name="dual_iso")
    verify_chain_map(f, raise_on_failure=True)
    logger.info(f"Mirror duality verified for {d.name or d.to_pd()}")
    return f


def dual_sigma_hat(dual: CubeComplex) -> ChainMap:
    """sigma_D(phi) = sigma_0 o phi o sigma_hat on the dual complex."""
    th = dual.theory
    tau = scalar_involution(th, InvolutionKind.SIGMA_HAT)
    columns: Dict[int, Dict[int, Coords]] = {}
    for j in dual.degrees:
        by_vertex: Dict[Vertex, List[int]] = {}
        for k, g in enumerate(dual.generators[j]):
            by_vertex.setdefault(g.vertex, []).append(k)
        cols: Dict[int, Coords] = {k: {} for k in range(dual.rank(j))}
        for vertex, ks in by_vertex.items():
            for k2 in ks:
                g2 = dual.generators[j][k2]
                image = involution(TensorVector.pure(th, g2.labels), InvolutionKind.SIGMA_HAT, th)
                for labels, c in image.terms.items():
                    k = dual.index[j][(vertex, labels)]
                    cols[k][k2] = tau(c)
        columns[j] = cols
    return ChainMap(dual, dual, columns, tau=tau, probe_kind=InvolutionKind.SIGMA_HAT, name="sigma_hat_dual")


def verify_dual_iso(f: ChainMap) -> bool:
    """The duality map intertwines sigma_hat with sigma_hat_D and is invertible."""
    th = f.source.theory
    s_src = involution_endo(f.source, InvolutionKind.SIGMA_HAT)
    s_dst = dual_sigma_hat(f.target)
    ok = _same_on(f.source, (InvolutionKind.SIGMA_HAT,),
                  lambda v: f.apply(s_src.apply(v)), lambda v: s_dst.apply(f.apply(v)),
                  "D sigma_hat = sigma_hat_D D")
    # inverse factor-wise: 1* -> -h D(1) + D(X) and X* -> D(1)
    R = th.ring
    inv_factor = {ONE: ((ONE, -th.h), (X, R.one)) if th.h else ((X, R.one),), X: ((ONE, R.one),)}
    for i in f.target.degrees:
        for k, g in enumerate(f.target.generators[i]):
            w = tuple(1 - b for b in g.vertex)
            terms: Dict[Labels, RingElement] = {(): R(_vertex_sign(w))}
            for lab in g.labels:
                terms = {labels + (new,): c * x for labels, c in terms.items() for new, x in inv_factor[lab]}
            pre = ChainVector(f.source, i, {f.source.index[i][(w, labels)]: c for labels, c in terms.items() if c})
            if not f.apply(pre) == f.target.basis_vector(i, k):
                logger.error(f"Duality map is not invertible at {g}")
                return False
    return ok


# ----------------------------------------------------------------------
# Disjoint unions and serialization
# ----------------------------------------------------------------------

def verify_disjoint_union(c1: CubeComplex, c2: CubeComplex, c12: CubeComplex) -> bool:
    """CKh(D1 + D2) agrees with CKh(D1) (x) CKh(D2) generator by generator.

    The tensor differential is d1 (x) 1 + (-1)^{|v1|} 1 (x) d2.
    """
    d1, d2 = c1.diagram, c2.diagram
    shift = d1.max_label
    loops12 = c12.diagram.free_loop_labels

    def source_of(arc: int):
        if arc in loops12:
            k = loops12.index(arc)
            if k < d1.free_loops:
                return 1, d1.free_loop_labels[k]
            return 2, d2.free_loop_labels[k - d1.free_loops]
        if arc <= shift:
            return 1, arc
        return 2, arc - shift

    if c12.total_rank != c1.total_rank * c2.total_rank:
        logger.error("Disjoint union ranks do not multiply")
        return False

    def glue(g1: Generator, g2: Generator) -> Optional[Tuple[int, int]]:
        v = g1.vertex + g2.vertex
        res = c12.resolutions[v]
        r1, r2 = c1.resolutions[g1.vertex], c2.resolutions[g2.vertex]
        labels = []
        for circle in res.circles:
            side, arc = source_of(circle[0])
            labels.append(g1.labels[r1.arc_to_circle[arc]] if side == 1 else g2.labels[r2.arc_to_circle[arc]])
        i = sum(v) - c12.diagram.n_minus
        k = c12.find(i, v, tuple(labels))
        return None if k is None else (i, k)

    def tensor(x: ChainVector, y: ChainVector) -> Dict[Tuple[int, int], RingElement]:
        out: Dict[Tuple[int, int], RingElement] = {}
        for k1, a in x.coords.items():
            for k2, b in y.coords.items():
                key = glue(x.complex.generators[x.i][k1], y.complex.generators[y.i][k2])
                out[key] = out.get(key, c12.ring.zero) + a * b
        return out

    for i1 in c1.degrees:
        for k1, g1 in enumerate(c1.generators[i1]):
            e1 = c1.basis_vector(i1, k1)
            for i2 in c2.degrees:
                for k2, g2 in enumerate(c2.generators[i2]):
                    e2 = c2.basis_vector(i2, k2)
                    key = glue(g1, g2)
                    if key is None or c12.generators[key[0]][key[1]].q != g1.q + g2.q:
                        logger.error(f"No matching generator for {g1} (x) {g2}")
                        return False
                    expected = tensor(e1.differential(), e2)
                    sign = -1 if sum(g1.vertex) % 2 else 1
                    for kk, val in tensor(e1, e2.differential()).items():
                        val = val if sign > 0 else -val
                        expected[kk] = expected.get(kk, c12.ring.zero) + val
                    got = c12.basis_vector(*key).differential()
                    want = ChainVector(c12, key[0] + 1, {k: v for (_, k), v in expected.items()})
                    if not got == want:
                        logger.error(f"Differential mismatch on {g1} (x) {g2}")
                        return False
    return True


def complex_to_json(c: CubeComplex) -> dict:
    """Debug dump: generators with bigradings and differential triples."""
    return {
        "schema": 1,
        "theory": c.theory.tag.value,
        "field": c.theory.field_spec.name,
        "ring": c.ring.name,
        "reduced": c.root_label.value if c.reduced else None,
        "dual": c.is_dual,
        "diagram": c.diagram.to_pd(),
        "n_plus": c.diagram.n_plus,
        "n_minus": c.diagram.n_minus,
        "generators": {
            str(i): [
                {"vertex": "".join(str(b) for b in g.vertex), "labels": g.label_word(), "q": g.q}
                for g in gs
            ]
            for i, gs in sorted(c.generators.items())
        },
        "differentials": {
            str(i): [list(t) for t in m.to_triples()] for i, m in sorted(c.differentials.items())
        },
    }
