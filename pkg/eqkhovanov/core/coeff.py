"""Exact coefficient rings and sparse matrices.

Ground rings are thin wrappers around sympy domains: the base is ZZ, QQ
or GF(p), optionally extended by graded polynomial variables (h, t, a1,
a2, sqrt_t).  Ring elements are the sympy domain elements themselves
(``PolyElement`` when there are variables), so arithmetic is native
``+``, ``-``, ``*``; everything that depends on the grading or on the
Euclidean structure goes through the ``GroundRing`` methods.
"""

from __future__ import annotations

import logging
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import sympy
from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.polyerrors import ExactQuotientFailed

from eqkhovanov.domain.models import (
    FieldKind,
    FieldSpec,
    KhovanovError,
    ScopeError,
    VerificationError,
)

logger = logging.getLogger(__name__)

RingElement = Any
Monomial = Tuple[int, ...]


class NonEuclideanRingError(ScopeError):
    """Euclidean division requested in a ring that has none"""
    pass


class DivisibilityError(VerificationError):
    """An exact division that must succeed did not"""
    pass


class HomogeneityError(VerificationError):
    """An element or operation broke the quantum grading"""
    pass


class RingMismatchError(KhovanovError):
    """Operands live in different ground rings"""
    pass


def _base_domain(spec: FieldSpec):
    if spec.kind == FieldKind.INTEGERS:
        return ZZ
    if spec.kind == FieldKind.RATIONALS:
        return QQ
    return GF(spec.p, symmetric=False)


class GroundRing:
    """Graded ring base[v1, ..., vk] with even positive variable degrees."""

    def __init__(self, field_spec: FieldSpec, variables: Sequence[Tuple[str, int]] = ()):
        for name, degree in variables:
            if degree <= 0 or degree % 2:
                raise ValueError(f"Variable {name} needs a positive even degree, got {degree}")
        self.field_spec = field_spec
        self.base = _base_domain(field_spec)
        self.names: Tuple[str, ...] = tuple(name for name, _ in variables)
        self.degrees: Tuple[int, ...] = tuple(degree for _, degree in variables)
        if self.names:
            self.symbols = tuple(sympy.symbols(self.names))
            self.domain = self.base.poly_ring(*self.symbols)
            self.ring = self.domain.ring
            self.gens = tuple(self.ring.gens)
        else:
            self.symbols = ()
            self.domain = self.base
            self.ring = None
            self.gens = ()

    def __repr__(self) -> str:
        return f"GroundRing({self.name})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroundRing)
            and self.field_spec == other.field_spec
            and self.names == other.names
            and self.degrees == other.degrees
        )

    def __hash__(self) -> int:
        return hash((self.field_spec, self.names, self.degrees))

    @property
    def name(self) -> str:
        if not self.names:
            return self.field_spec.name
        return f"{self.field_spec.name}[{','.join(self.names)}]"

    @property
    def characteristic(self) -> int:
        return self.field_spec.characteristic

    @property
    def zero(self) -> RingElement:
        return self.domain.zero

    @property
    def one(self) -> RingElement:
        return self.domain.one

    def __call__(self, value: int) -> RingElement:
        return self.lift(self.base.convert(value))

    def lift(self, coeff) -> RingElement:
        """Embed a base-domain coefficient as a constant."""
        if self.ring is None:
            return coeff
        return self.ring.ground_new(coeff)

    def gen(self, name: str) -> RingElement:
        try:
            return self.gens[self.names.index(name)]
        except ValueError:
            raise RingMismatchError(f"{self.name} has no variable {name}") from None

    # ------------------------------------------------------------------
    # Term access and grading
    # ------------------------------------------------------------------

    def terms(self, a: RingElement) -> List[Tuple[Monomial, Any]]:
        if self.ring is None:
            return [((), a)] if a else []
        return list(a.terms())

    def from_terms(self, terms: Dict[Monomial, Any]) -> RingElement:
        if self.ring is None:
            return terms.get((), self.base.zero)
        return self.ring.from_dict({m: c for m, c in terms.items() if c})

    def monomial_degree(self, monomial: Monomial) -> int:
        return sum(e * d for e, d in zip(monomial, self.degrees))

    def degree(self, a: RingElement) -> Optional[int]:
        """Common quantum degree of the terms of ``a``; None for zero.

        Raises:
            HomogeneityError: if the terms have different degrees
        """
        degrees = {self.monomial_degree(m) for m, _ in self.terms(a)}
        if not degrees:
            return None
        if len(degrees) > 1:
            raise HomogeneityError(f"{self.to_str(a)} is not homogeneous")
        return degrees.pop()

    def is_homogeneous(self, a: RingElement) -> bool:
        return len({self.monomial_degree(m) for m, _ in self.terms(a)}) <= 1

    def homogeneous_parts(self, a: RingElement) -> Dict[int, RingElement]:
        parts: Dict[int, Dict[Monomial, Any]] = {}
        for m, c in self.terms(a):
            parts.setdefault(self.monomial_degree(m), {})[m] = c
        return {deg: self.from_terms(t) for deg, t in parts.items()}

    # ------------------------------------------------------------------
    # Units, division, Euclidean structure
    # ------------------------------------------------------------------

    @property
    def is_euclidean(self) -> bool:
        if not self.names:
            return True
        return self.field_spec.is_field and len(self.names) == 1

    def require_euclidean(self, what: str):
        if not self.is_euclidean:
            raise NonEuclideanRingError(f"{what} needs a Euclidean ring; {self.name} is not one")

    def is_unit(self, a: RingElement) -> bool:
        terms = self.terms(a)
        if len(terms) != 1 or any(terms[0][0]):
            return False
        c = terms[0][1]
        if self.field_spec.is_field:
            return True
        return c == self.base.one or c == -self.base.one

    def unit_inverse(self, u: RingElement) -> RingElement:
        if not self.is_unit(u):
            raise DivisibilityError(f"{self.to_str(u)} is not a unit in {self.name}")
        (_, c), = self.terms(u)
        return self.lift(self.base.quo(self.base.one, c) if self.field_spec.is_field else c)

    def normalization_unit(self, a: RingElement) -> RingElement:
        """Unit u such that u*a is monic (polynomials) or positive (Z)."""
        terms = self.terms(a)
        if not terms:
            return self.one
        if self.ring is not None:
            lc = a.LC
        else:
            lc = terms[0][1]
        if self.field_spec.is_field:
            return self.lift(self.base.quo(self.base.one, lc))
        return self.lift(self.base.one if lc > 0 else -self.base.one)

    def normalize(self, a: RingElement) -> RingElement:
        return self.normalization_unit(a) * a

    def norm(self, a: RingElement) -> int:
        """Euclidean norm: |a| over Z, degree over F[x], 0 for field units."""
        self.require_euclidean("norm")
        if not a:
            raise ZeroDivisionError("norm of zero")
        if self.ring is not None:
            return a.degree()
        if self.field_spec.is_field:
            return 0
        return abs(int(a))

    @property
    def unit_norm(self) -> int:
        return 1 if (not self.names and not self.field_spec.is_field) else 0

    def divmod(self, a: RingElement, b: RingElement) -> Tuple[RingElement, RingElement]:
        """Euclidean division a = q*b + r with norm(r) < norm(b) or r = 0."""
        self.require_euclidean("divmod")
        if not b:
            raise ZeroDivisionError("division by zero in " + self.name)
        return self.domain.div(a, b)

    def exquo(self, a: RingElement, b: RingElement) -> RingElement:
        """Exact quotient a/b; raises DivisibilityError when b does not divide a."""
        if not b:
            raise ZeroDivisionError("division by zero in " + self.name)
        try:
            return self.domain.exquo(a, b)
        except ExactQuotientFailed:
            raise DivisibilityError(
                f"{self.to_str(b)} does not divide {self.to_str(a)} in {self.name}"
            ) from None

    def divides(self, b: RingElement, a: RingElement) -> bool:
        if not b:
            return not a
        try:
            self.domain.exquo(a, b)
        except ExactQuotientFailed:
            return False
        return True

    def gcd(self, a: RingElement, b: RingElement) -> RingElement:
        return self.normalize(self.domain.gcd(a, b))

    def valuation(self, a: RingElement, var: int = 0) -> Optional[int]:
        """Largest k with var^k dividing a; None for zero."""
        exps = [m[var] for m, _ in self.terms(a)] if self.names else []
        if not a:
            return None
        return min(exps) if exps else 0

    # ------------------------------------------------------------------
    # Homomorphisms and display
    # ------------------------------------------------------------------

    def hom(self, a: RingElement, images: Sequence[RingElement], target: "GroundRing") -> RingElement:
        """Image of ``a`` under the ring map sending generator i to images[i]."""
        if target.base != self.base:
            raise RingMismatchError(f"Cannot map {self.name} to {target.name}")
        result = target.zero
        for monomial, c in self.terms(a):
            term = target.lift(c)
            for img, e in zip(images, monomial):
                if e:
                    term = term * img ** e
            result = result + term
        return result

    def coeff_to_int(self, c) -> int:
        return int(self.base.to_sympy(c))

    def to_str(self, a: RingElement) -> str:
        if self.ring is None:
            return str(self.base.to_sympy(a))
        return str(a.as_expr()).replace("**", "^")

    def random_homogeneous(self, rng, degree: int, coeff_range: int = 3) -> RingElement:
        """Random homogeneous element of the given quantum degree."""
        monomials = self.monomials_of_degree(degree)
        terms = {}
        for m in monomials:
            c = int(rng.integers(-coeff_range, coeff_range + 1))
            if c:
                terms[m] = self.base.convert(c)
        return self.from_terms(terms)

    def monomials_of_degree(self, degree: int) -> List[Monomial]:
        if degree < 0 or degree % 2:
            return []
        out: List[Monomial] = []

        def _walk(i: int, remaining: int, prefix: Tuple[int, ...]):
            if i == len(self.degrees):
                if remaining == 0:
                    out.append(prefix)
                return
            for e in range(remaining // self.degrees[i] + 1):
                _walk(i + 1, remaining - e * self.degrees[i], prefix + (e,))

        _walk(0, degree, ())
        return out


def ring_arith(ring: GroundRing, a: RingElement, b: RingElement, op: str):
    """Single entry point for add, sub, mul and divmod on ring elements."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "divmod":
        return ring.divmod(a, b)
    raise ValueError(f"Unknown ring operation: {op}")


class SparseMatrix:
    """Immutable sparse matrix over a GroundRing, stored row-wise."""

    def __init__(self, ring: GroundRing, nrows: int, ncols: int,
                 rows: Optional[Dict[int, Dict[int, RingElement]]] = None):
        self.ring = ring
        self.nrows = nrows
        self.ncols = ncols
        self._rows: Dict[int, Dict[int, RingElement]] = {}
        for r, row in (rows or {}).items():
            if not 0 <= r < nrows:
                raise IndexError(f"Row {r} outside {nrows}x{ncols}")
            clean = {}
            for c, v in row.items():
                if not 0 <= c < ncols:
                    raise IndexError(f"Column {c} outside {nrows}x{ncols}")
                if v:
                    clean[c] = v
            if clean:
                self._rows[r] = clean

    @classmethod
    def from_entries(cls, ring: GroundRing, nrows: int, ncols: int,
                     entries: Iterable[Tuple[int, int, RingElement]]) -> "SparseMatrix":
        rows: Dict[int, Dict[int, RingElement]] = {}
        for r, c, v in entries:
            row = rows.setdefault(r, {})
            row[c] = row.get(c, ring.zero) + v
        return cls(ring, nrows, ncols, rows)

    @classmethod
    def identity(cls, ring: GroundRing, n: int) -> "SparseMatrix":
        return cls(ring, n, n, {i: {i: ring.one} for i in range(n)})

    @classmethod
    def zeros(cls, ring: GroundRing, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(ring, nrows, ncols)

    @classmethod
    def from_dense(cls, ring: GroundRing, dense: Sequence[Sequence[Any]]) -> "SparseMatrix":
        nrows = len(dense)
        ncols = len(dense[0]) if nrows else 0
        rows = {}
        for r, line in enumerate(dense):
            rows[r] = {c: (ring(v) if isinstance(v, int) else v) for c, v in enumerate(line)}
        return cls(ring, nrows, ncols, rows)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nrows, self.ncols)

    def row(self, r: int) -> Dict[int, RingElement]:
        return dict(self._rows.get(r, {}))

    def rows_dict(self) -> Dict[int, Dict[int, RingElement]]:
        return {r: dict(row) for r, row in self._rows.items()}

    def get(self, r: int, c: int) -> RingElement:
        return self._rows.get(r, {}).get(c, self.ring.zero)

    def entries(self) -> Iterator[Tuple[int, int, RingElement]]:
        for r in sorted(self._rows):
            row = self._rows[r]
            for c in sorted(row):
                yield r, c, row[c]

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self._rows.values())

    def is_zero(self) -> bool:
        return not self._rows

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix.from_entries(
            self.ring, self.ncols, self.nrows, ((c, r, v) for r, c, v in self.entries())
        )

    def map_entries(self, fn) -> "SparseMatrix":
        return SparseMatrix(
            self.ring, self.nrows, self.ncols,
            {r: {c: fn(v) for c, v in row.items()} for r, row in self._rows.items()},
        )

    def scale(self, a: RingElement) -> "SparseMatrix":
        return self.map_entries(lambda v: a * v)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"Shape mismatch {self.shape} @ {other.shape}")
        out: Dict[int, Dict[int, RingElement]] = {}
        for r, row in self._rows.items():
            acc: Dict[int, RingElement] = {}
            for k, a in row.items():
                for c, b in other._rows.get(k, {}).items():
                    acc[c] = acc.get(c, self.ring.zero) + a * b
            out[r] = acc
        return SparseMatrix(self.ring, self.nrows, other.ncols, out)

    def _combine(self, other: "SparseMatrix", sign: int) -> "SparseMatrix":
        if self.shape != other.shape:
            raise ValueError(f"Shape mismatch {self.shape} vs {other.shape}")
        out = self.rows_dict()
        for r, c, v in other.entries():
            row = out.setdefault(r, {})
            row[c] = row.get(c, self.ring.zero) + (v if sign > 0 else -v)
        return SparseMatrix(self.ring, self.nrows, self.ncols, out)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self._combine(other, 1)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self._combine(other, -1)

    def __neg__(self) -> "SparseMatrix":
        return self.map_entries(lambda v: -v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and (self - other).is_zero()

    def __repr__(self) -> str:
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz}, {self.ring.name})"

    def apply(self, vector: Dict[int, RingElement]) -> Dict[int, RingElement]:
        """Matrix times a sparse column vector given as index -> value."""
        out: Dict[int, RingElement] = {}
        for r, row in self._rows.items():
            acc = self.ring.zero
            for c, a in row.items():
                b = vector.get(c)
                if b:
                    acc = acc + a * b
            if acc:
                out[r] = acc
        return out

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "SparseMatrix":
        col_pos = {c: j for j, c in enumerate(cols)}
        out = {}
        for i, r in enumerate(rows):
            out[i] = {col_pos[c]: v for c, v in self._rows.get(r, {}).items() if c in col_pos}
        return SparseMatrix(self.ring, len(rows), len(cols), out)

    def to_dense(self) -> List[List[RingElement]]:
        dense = [[self.ring.zero] * self.ncols for _ in range(self.nrows)]
        for r, c, v in self.entries():
            dense[r][c] = v
        return dense

    def to_domain_matrix(self) -> DomainMatrix:
        return DomainMatrix(self.rows_dict(), self.shape, self.ring.domain)

    def to_triples(self) -> List[Tuple[int, int, str]]:
        return [(r, c, self.ring.to_str(v)) for r, c, v in self.entries()]
