"""Frobenius algebras A = R[X]/(X^2 - hX - t) and their tensor powers.

Every theory is a specialization of the U(2) relation X^2 = hX + t:

    u2       R = k[h, t]
    u1       R = k[h],        t = 0
    u1xu1    R = k[a1, a2],   h = a1 + a2, t = -a1*a2
    su2      R = k[t],        h = 0
    su2sqrt  R = k[sqrt_t],   h = 0, t = sqrt_t^2
    plain    R = k,           h = t = 0

Tensors are stored in the basis {1, X} of each factor, encoded as 0 and 1.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from eqkhovanov.core.coeff import (
    DivisibilityError,
    GroundRing,
    HomogeneityError,
    RingElement,
    RingMismatchError,
    SparseMatrix,
)
from eqkhovanov.domain.models import (
    FieldSpec,
    InvolutionKind,
    RootLabel,
    ScopeError,
    TheoryTag,
    _normalize_field,
    _normalize_theory_tag,
)

logger = logging.getLogger(__name__)

ONE, X = 0, 1
Labels = Tuple[int, ...]


class TheoryError(ScopeError):
    """Operation not available for this theory or characteristic"""
    pass


_VARIABLES = {
    TheoryTag.U2: (("h", 2), ("t", 4)),
    TheoryTag.U1: (("h", 2),),
    TheoryTag.U1XU1: (("a1", 2), ("a2", 2)),
    TheoryTag.SU2: (("t", 4),),
    TheoryTag.SU2_SQRT: (("sqrt_t", 2),),
    TheoryTag.PLAIN: (),
}


class Theory:
    """A Frobenius extension (R, A) with its structure constants h and t."""

    def __init__(self, tag: TheoryTag, field_spec: FieldSpec):
        self.tag = tag
        self.field_spec = field_spec
        self.ring = GroundRing(field_spec, _VARIABLES[tag])
        R = self.ring
        zero = R.zero
        if tag == TheoryTag.U2:
            self.h, self.t = R.gen("h"), R.gen("t")
            self.roots = None
        elif tag == TheoryTag.U1:
            self.h, self.t = R.gen("h"), zero
            self.roots = {RootLabel.X: zero, RootLabel.Y: R.gen("h")}
        elif tag == TheoryTag.U1XU1:
            a1, a2 = R.gen("a1"), R.gen("a2")
            self.h, self.t = a1 + a2, -(a1 * a2)
            self.roots = {RootLabel.X1: a1, RootLabel.X2: a2}
        elif tag == TheoryTag.SU2:
            self.h, self.t = zero, R.gen("t")
            self.roots = None
        elif tag == TheoryTag.SU2_SQRT:
            r = R.gen("sqrt_t")
            self.h, self.t = zero, r * r
            self.roots = {RootLabel.XPLUS: -r, RootLabel.XMINUS: r}
        else:
            self.h, self.t = zero, zero
            self.roots = {RootLabel.X: zero}

    def __repr__(self) -> str:
        return f"Theory({self.tag.value}, {self.field_spec.name})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Theory) and self.tag == other.tag and self.field_spec == other.field_spec

    def __hash__(self) -> int:
        return hash((self.tag, self.field_spec))

    @property
    def characteristic(self) -> int:
        return self.field_spec.characteristic

    @property
    def lee_labels(self) -> Tuple[RootLabel, RootLabel]:
        """Labels standing in for X and Y in the Lee coloring."""
        if self.tag == TheoryTag.U1XU1:
            return (RootLabel.X1, RootLabel.X2)
        if self.tag == TheoryTag.SU2_SQRT:
            return (RootLabel.XPLUS, RootLabel.XMINUS)
        if self.tag == TheoryTag.PLAIN:
            return (RootLabel.X, RootLabel.X)
        if self.tag == TheoryTag.U1:
            return (RootLabel.X, RootLabel.Y)
        raise TheoryError(f"X^2 - hX - t does not factor over {self.ring.name}; no Lee labels")

    def root(self, label: RootLabel) -> RingElement:
        if not self.roots or label not in self.roots:
            raise TheoryError(f"{label.value} is not a root label of {self.tag.value}")
        return self.roots[label]

    def root_element(self, label: RootLabel) -> "AlgebraElement":
        """The element X - a for the root a named by ``label``."""
        return AlgebraElement(self, -self.root(label), self.ring.one)

    @property
    def nu_involution(self) -> InvolutionKind:
        if self.tag in (TheoryTag.U2, TheoryTag.U1):
            return InvolutionKind.SIGMA_HAT
        if self.tag == TheoryTag.U1XU1:
            return InvolutionKind.SIGMA_ALPHA
        if self.tag == TheoryTag.SU2_SQRT:
            return InvolutionKind.SIGMA_SQRT_T
        raise TheoryError(f"nu is not defined for theory {self.tag.value}")

    @property
    def nu_divisor(self) -> RingElement:
        R = self.ring
        if self.tag in (TheoryTag.U2, TheoryTag.U1):
            return self.h
        if self.tag == TheoryTag.U1XU1:
            return R.gen("a2") - R.gen("a1")
        if self.tag == TheoryTag.SU2_SQRT:
            divisor = R(2) * R.gen("sqrt_t")
            if not divisor:
                raise TheoryError("nu on su2sqrt divides by 2*sqrt_t and needs characteristic != 2")
            return divisor
        raise TheoryError(f"nu is not defined for theory {self.tag.value}")



@lru_cache(maxsize=None)
def make_theory(tag, field_spec) -> Theory:
    """Cached Theory lookup from enum members or CLI spellings."""
    return Theory(_normalize_theory_tag(tag), _normalize_field(field_spec))


def _same(th: Theory, *others: Theory):
    for other in others:
        if other != th:
            raise RingMismatchError(f"Theory mismatch: {th} vs {other}")


@dataclass(frozen=True)
class AlgebraElement:
    """a*1 + b*X in A, always reduced."""
    theory: Theory
    one: RingElement
    x: RingElement

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _same(self.theory, other.theory)
        return AlgebraElement(self.theory, self.one + other.one, self.x + other.x)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        _same(self.theory, other.theory)
        return AlgebraElement(self.theory, self.one - other.one, self.x - other.x)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.theory, -self.one, -self.x)

    def scale(self, r: RingElement) -> "AlgebraElement":
        return AlgebraElement(self.theory, r * self.one, r * self.x)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.theory == other.theory and self.one == other.one and self.x == other.x

    def __hash__(self) -> int:
        return hash((self.theory, str(self.one), str(self.x)))

    def __repr__(self) -> str:
        return self.to_tensor().to_str()

    def is_zero(self) -> bool:
        return not self.one and not self.x

    def to_tensor(self) -> "TensorVector":
        return TensorVector(self.theory, 1, {(ONE,): self.one, (X,): self.x})

    @classmethod
    def from_tensor(cls, v: "TensorVector") -> "AlgebraElement":
        if v.length != 1:
            raise ValueError("Only tensors of length 1 are algebra elements")
        R = v.theory.ring
        return cls(v.theory, v.terms.get((ONE,), R.zero), v.terms.get((X,), R.zero))


def basis_element(th: Theory, label: int) -> AlgebraElement:
    R = th.ring
    return AlgebraElement(th, R.one, R.zero) if label == ONE else AlgebraElement(th, R.zero, R.one)


def named_elements(th: Theory) -> Dict[str, AlgebraElement]:
    """The named elements 1, X, Y = X - h and U = 2X - h."""
    R = th.ring
    return {
        "1": AlgebraElement(th, R.one, R.zero),
        "X": AlgebraElement(th, R.zero, R.one),
        "Y": AlgebraElement(th, -th.h, R.one),
        "U": AlgebraElement(th, -th.h, R(2)),
    }


class TensorVector:
    """Linear combination of pure tensors x1 (x) ... (x) xr in the basis {1, X}."""

    def __init__(self, theory: Theory, length: int, terms: Optional[Dict[Labels, RingElement]] = None):
        self.theory = theory
        self.length = length
        self.terms: Dict[Labels, RingElement] = {}
        for labels, c in (terms or {}).items():
            if len(labels) != length:
                raise ValueError(f"Pure tensor {labels} does not have length {length}")
            if c:
                self.terms[labels] = c

    @classmethod
    def pure(cls, theory: Theory, labels: Labels, coeff: Optional[RingElement] = None) -> "TensorVector":
        return cls(theory, len(labels), {tuple(labels): theory.ring.one if coeff is None else coeff})

    @classmethod
    def zero(cls, theory: Theory, length: int) -> "TensorVector":
        return cls(theory, length)

    @classmethod
    def product(cls, factors: Sequence[AlgebraElement]) -> "TensorVector":
        """x1 (x) x2 (x) ... for algebra elements, expanded in the basis."""
        th = factors[0].theory if factors else None
        out = cls(th, 0, {(): th.ring.one}) if th else None
        for a in factors:
            out = out.tensor(a.to_tensor())
        return out

    def _check(self, other: "TensorVector"):
        _same(self.theory, other.theory)
        if self.length != other.length:
            raise ValueError(f"Tensor lengths differ: {self.length} vs {other.length}")

    def __add__(self, other: "TensorVector") -> "TensorVector":
        self._check(other)
        out = dict(self.terms)
        zero = self.theory.ring.zero
        for labels, c in other.terms.items():
            out[labels] = out.get(labels, zero) + c
        return TensorVector(self.theory, self.length, out)

    def __sub__(self, other: "TensorVector") -> "TensorVector":
        return self + (-other)

    def __neg__(self) -> "TensorVector":
        return TensorVector(self.theory, self.length, {k: -c for k, c in self.terms.items()})

    def scale(self, r: RingElement) -> "TensorVector":
        return TensorVector(self.theory, self.length, {k: r * c for k, c in self.terms.items()})

    def map_coefficients(self, fn: Callable[[RingElement], RingElement]) -> "TensorVector":
        return TensorVector(self.theory, self.length, {k: fn(c) for k, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorVector):
            return NotImplemented
        return self.theory == other.theory and self.length == other.length and (self - other).is_zero()

    def __repr__(self) -> str:
        return self.to_str()

    def is_zero(self) -> bool:
        return not self.terms

    def tensor(self, other: "TensorVector") -> "TensorVector":
        _same(self.theory, other.theory)
        out: Dict[Labels, RingElement] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                out[a + b] = ca * cb
        return TensorVector(self.theory, self.length + other.length, out)

    def split_factor(self, pos: int) -> Dict[int, "TensorVector"]:
        """Group by the label at ``pos``; values drop that factor."""
        groups: Dict[int, Dict[Labels, RingElement]] = {}
        for labels, c in self.terms.items():
            groups.setdefault(labels[pos], {})[labels[:pos] + labels[pos + 1:]] = c
        return {k: TensorVector(self.theory, self.length - 1, v) for k, v in groups.items()}

    def insert_factor(self, pos: int, element: AlgebraElement) -> "TensorVector":
        out: Dict[Labels, RingElement] = {}
        zero = self.theory.ring.zero
        for labels, c in self.terms.items():
            for lab, e in ((ONE, element.one), (X, element.x)):
                if e:
                    key = labels[:pos] + (lab,) + labels[pos:]
                    out[key] = out.get(key, zero) + c * e
        return TensorVector(self.theory, self.length + 1, out)

    def multiply_factor(self, pos: int, element: AlgebraElement) -> "TensorVector":
        """Multiply the factor at ``pos`` by ``element``."""
        out = TensorVector.zero(self.theory, self.length)
        for lab, rest in self.split_factor(pos).items():
            out = out + rest.insert_factor(pos, multiply(basis_element(self.theory, lab), element))
        return out

    def quantum_degree(self) -> Optional[int]:
        """Common quantum degree (#X - #1 plus coefficient degree); None for zero."""
        R = self.theory.ring
        degrees = set()
        for labels, c in self.terms.items():
            base = sum(1 if lab == X else -1 for lab in labels)
            for m, _ in R.terms(c):
                degrees.add(base + R.monomial_degree(m))
        if len(degrees) > 1:
            raise HomogeneityError(f"{self.to_str()} is not homogeneous")
        return degrees.pop() if degrees else None

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        R = self.theory.ring
        parts = []
        for labels in sorted(self.terms):
            word = "⊗".join("X" if lab == X else "1" for lab in labels) or "1"
            parts.append(f"({R.to_str(self.terms[labels])})·{word}")
        return " + ".join(parts)


# ----------------------------------------------------------------------
# Structure maps
# ----------------------------------------------------------------------

def multiply(a: AlgebraElement, b: AlgebraElement, th: Optional[Theory] = None) -> AlgebraElement:
    """Product in A using X^2 = hX + t."""
    th = th or a.theory
    _same(th, a.theory, b.theory)
    xx = a.x * b.x
    return AlgebraElement(
        th,
        a.one * b.one + xx * th.t,
        a.one * b.x + a.x * b.one + xx * th.h,
    )


def comultiply(a: AlgebraElement, th: Optional[Theory] = None) -> TensorVector:
    """Delta(1) = 1(x)X + X(x)1 - h 1(x)1 and Delta(X) = X(x)X + t 1(x)1."""
    th = th or a.theory
    _same(th, a.theory)
    return TensorVector(th, 2, {
        (ONE, X): a.one,
        (X, ONE): a.one,
        (ONE, ONE): -(th.h * a.one) + th.t * a.x,
        (X, X): a.x,
    })


def counit(a: AlgebraElement) -> RingElement:
    return a.x


def unit(r: RingElement, th: Theory) -> AlgebraElement:
    return AlgebraElement(th, r, th.ring.zero)


def multiply_tensor(v: TensorVector) -> AlgebraElement:
    """m applied to a tensor of length 2."""
    if v.length != 2:
        raise ValueError("multiply_tensor needs length 2")
    th = v.theory
    out = AlgebraElement(th, th.ring.zero, th.ring.zero)
    for (a, b), c in v.terms.items():
        out = out + multiply(basis_element(th, a), basis_element(th, b)).scale(c)
    return out


@lru_cache(maxsize=None)
def merge_table(th: Theory) -> Dict[Tuple[int, int], Tuple[Tuple[int, RingElement], ...]]:
    """(a, b) -> nonzero (label, coefficient) pairs of m(a (x) b)."""
    out = {}
    for a in (ONE, X):
        for b in (ONE, X):
            p = multiply(basis_element(th, a), basis_element(th, b))
            out[(a, b)] = tuple((lab, c) for lab, c in ((ONE, p.one), (X, p.x)) if c)
    return out


@lru_cache(maxsize=None)
def split_table(th: Theory) -> Dict[int, Tuple[Tuple[Tuple[int, int], RingElement], ...]]:
    """a -> nonzero ((label1, label2), coefficient) pairs of Delta(a)."""
    out = {}
    for a in (ONE, X):
        v = comultiply(basis_element(th, a))
        out[a] = tuple(sorted(v.terms.items()))
    return out


# ----------------------------------------------------------------------
# Involutions and nu operations
# ----------------------------------------------------------------------

def _check_involution(kind: InvolutionKind, th: Theory):
    if kind == InvolutionKind.SIGMA_ALPHA and th.tag != TheoryTag.U1XU1:
        raise TheoryError("sigma_alpha only exists on u1xu1")
    if kind == InvolutionKind.SIGMA_SQRT_T and th.tag != TheoryTag.SU2_SQRT:
        raise TheoryError("sigma_sqrt_t only exists on su2sqrt")


def scalar_involution(th: Theory, kind: InvolutionKind) -> Callable[[RingElement], RingElement]:
    """The action of an involution on scalars."""
    _check_involution(kind, th)
    R = th.ring
    if kind == InvolutionKind.SIGMA:
        return lambda r: r
    if kind == InvolutionKind.SIGMA_HAT:
        images = [(-g if (d // 2) % 2 else g) for g, d in zip(R.gens, R.degrees)]
    elif kind == InvolutionKind.SIGMA_ALPHA:
        images = [R.gen("a2"), R.gen("a1")]
    else:
        images = [-R.gen("sqrt_t")]
    return lambda r: R.hom(r, images, R)


def probe_scalars(th: Theory, kind: Optional[InvolutionKind]) -> List[RingElement]:
    """Scalars spanning R over the subring fixed by the involution.

    A map that is linear over that subring is determined by its values on
    theta * e for these theta and the basis generators e.
    """
    R = th.ring
    if kind is None or kind == InvolutionKind.SIGMA:
        return [R.one]
    _check_involution(kind, th)
    if kind == InvolutionKind.SIGMA_HAT:
        return [R.one] + [g for g, d in zip(R.gens, R.degrees) if d % 4 == 2]
    if kind == InvolutionKind.SIGMA_ALPHA:
        return [R.one, R.gen("a1")]
    return [R.one, R.gen("sqrt_t")]


def _x_image(th: Theory, kind: InvolutionKind) -> AlgebraElement:
    R = th.ring
    if kind == InvolutionKind.SIGMA:
        return AlgebraElement(th, th.h, -R.one)
    if kind == InvolutionKind.SIGMA_HAT:
        return AlgebraElement(th, -th.h, R.one)
    return AlgebraElement(th, R.zero, R.one)


def involution(x: TensorVector, kind: InvolutionKind, th: Optional[Theory] = None) -> TensorVector:
    """Apply sigma, sigma_hat, sigma_alpha or sigma_sqrt_t factor-wise.

    Raises:
        TheoryError: if the involution does not exist for the theory
    """
    th = th or x.theory
    _same(th, x.theory)
    kind = InvolutionKind(kind) if isinstance(kind, str) else kind
    tau = scalar_involution(th, kind)
    ximg = _x_image(th, kind)
    one = basis_element(th, ONE)
    images = {ONE: one.to_tensor(), X: ximg.to_tensor()}
    out = TensorVector.zero(th, x.length)
    for labels, c in x.terms.items():
        term = TensorVector(th, 0, {(): tau(c)})
        for lab in labels:
            term = term.tensor(images[lab])
        out = out + term
    return out


def scalar_nu(th: Theory) -> Callable[[RingElement], RingElement]:
    """(r - tau(r)) / divisor on scalars."""
    tau = scalar_involution(th, th.nu_involution)
    divisor = th.nu_divisor
    return lambda r: th.ring.exquo(r - tau(r), divisor)


def nu_hat(x: TensorVector, th: Optional[Theory] = None) -> TensorVector:
    """(id - involution)(x) divided exactly by the theory's divisor.

    h for u2 and u1, a2 - a1 for u1xu1, 2*sqrt_t for su2sqrt.

    Raises:
        TheoryError: for theories without nu
        DivisibilityError: if the difference is not divisible
    """
    th = th or x.theory
    diff = x - involution(x, th.nu_involution, th)
    divisor = th.nu_divisor
    try:
        return diff.map_coefficients(lambda c: th.ring.exquo(c, divisor))
    except DivisibilityError as exc:
        raise DivisibilityError(f"nu: {diff.to_str()} not divisible by the divisor: {exc}") from None


def _require_char_two(th: Theory, what: str):
    if th.characteristic != 2:
        raise TheoryError(f"{what} needs characteristic 2, got {th.field_spec.name}")


def nu_k(x: TensorVector, k: int) -> TensorVector:
    """Sum over k-subsets of X factors, each replaced by 1 (characteristic 2)."""
    th = x.theory
    _require_char_two(th, "nu_k")
    if k < 0:
        raise ValueError("k must be non-negative")
    out: Dict[Labels, RingElement] = {}
    zero = th.ring.zero
    for labels, c in x.terms.items():
        xs = [i for i, lab in enumerate(labels) if lab == X]
        for subset in itertools.combinations(xs, k):
            new = list(labels)
            for i in subset:
                new[i] = ONE
            key = tuple(new)
            out[key] = out.get(key, zero) + c
    return TensorVector(th, x.length, out)


def nu_bar(x: TensorVector) -> TensorVector:
    th = x.theory
    _require_char_two(th, "nu_bar")
    if th.tag != TheoryTag.U1:
        raise TheoryError("nu_bar is defined on u1")
    out = TensorVector.zero(th, x.length)
    power = th.ring.one
    for k in range(1, x.length + 1):
        out = out + nu_k(x, k).scale(power)
        power = power * th.h
    return out


def sigma_hat_matrix(th: Theory) -> SparseMatrix:
    """sigma_hat on A over Z[h^2, t], basis (1, h, X, hX); columns are images."""
    if th.tag != TheoryTag.U2:
        raise TheoryError("sigma_hat_matrix is stated over u2")
    R = th.ring
    h = th.h
    one = R.one
    return SparseMatrix.from_entries(R, 4, 4, [
        (0, 0, one),
        (1, 1, -one),
        (1, 2, -one), (2, 2, one),
        (0, 3, h * h), (3, 3, -one),
    ])


def subring_coordinates(a: AlgebraElement) -> Dict[int, RingElement]:
    """Coordinates of a in the Z[h^2, t]-basis (1, h, X, hX) of A over u2."""
    th = a.theory
    R = th.ring
    coords: Dict[int, Dict] = {0: {}, 1: {}, 2: {}, 3: {}}
    for slot, c in ((0, a.one), (2, a.x)):
        for m, coeff in R.terms(c):
            if m[0] % 2:
                coords[slot + 1][(m[0] - 1,) + m[1:]] = coeff
            else:
                coords[slot][m] = coeff
    return {k: R.from_terms(v) for k, v in coords.items() if v}


# ----------------------------------------------------------------------
# Duality
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class DualElement:
    """d1 * D(1) + dx * D(X) in the standard dual basis."""
    theory: Theory
    d1: RingElement
    dx: RingElement

    def __add__(self, other: "DualElement") -> "DualElement":
        _same(self.theory, other.theory)
        return DualElement(self.theory, self.d1 + other.d1, self.dx + other.dx)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DualElement):
            return NotImplemented
        return self.theory == other.theory and self.d1 == other.d1 and self.dx == other.dx

    def __hash__(self) -> int:
        return hash((self.theory, str(self.d1), str(self.dx)))

    def to_tensor(self) -> "DualTensor":
        return DualTensor(TensorVector(self.theory, 1, {(ONE,): self.d1, (X,): self.dx}))


def pairing(a: AlgebraElement, b: AlgebraElement) -> RingElement:
    """beta(a, b) = eps(a*b)."""
    return counit(multiply(a, b))


def dualize(a: AlgebraElement) -> DualElement:
    """D(a) = beta(a, -) in the standard basis {D(1), D(X)}."""
    return DualElement(a.theory, a.one, a.x)


def evaluate_dual(f: DualElement, y: AlgebraElement) -> RingElement:
    th = f.theory
    return f.d1 * counit(y) + f.dx * pairing(basis_element(th, X), y)


def _pairing_matrix(th: Theory):
    R = th.ring
    return ((R.zero, R.one), (R.one, th.h))


def _inverse_pairing_matrix(th: Theory):
    R = th.ring
    return ((-th.h, R.one), (R.one, R.zero))


def _factorwise(values: Dict[Labels, RingElement], matrix, length: int, zero) -> Dict[Labels, RingElement]:
    """new[j] = sum_x prod_i matrix[j_i][x_i] * old[x], one factor at a time."""
    current = dict(values)
    for pos in range(length):
        nxt: Dict[Labels, RingElement] = {}
        for labels, c in current.items():
            old = labels[pos]
            for new in (ONE, X):
                coeff = matrix[new][old]
                if coeff:
                    key = labels[:pos] + (new,) + labels[pos + 1:]
                    nxt[key] = nxt.get(key, zero) + coeff * c
        current = {k: v for k, v in nxt.items() if v}
    return current


class DualTensor:
    """Element of (A*)^{(x) r}, stored in the tensor basis D(x1) (x) ... (x) D(xr)."""

    def __init__(self, coords: TensorVector):
        self.coords = coords

    @property
    def theory(self) -> Theory:
        return self.coords.theory

    @property
    def length(self) -> int:
        return self.coords.length

    @classmethod
    def from_values(cls, th: Theory, length: int, values: Dict[Labels, RingElement]) -> "DualTensor":
        coords = _factorwise(values, _inverse_pairing_matrix(th), length, th.ring.zero)
        return cls(TensorVector(th, length, coords))

    def values(self) -> Dict[Labels, RingElement]:
        """Values on the basis tensors of A^{(x) r}."""
        th = self.theory
        return _factorwise(self.coords.terms, _pairing_matrix(th), self.length, th.ring.zero)

    def evaluate(self, v: TensorVector) -> RingElement:
        vals = self.values()
        total = self.theory.ring.zero
        for labels, c in v.terms.items():
            if labels in vals:
                total = total + c * vals[labels]
        return total

    def tensor(self, other: "DualTensor") -> "DualTensor":
        return DualTensor(self.coords.tensor(other.coords))

    def to_element(self) -> DualElement:
        th = self.theory
        return DualElement(th, self.coords.terms.get((ONE,), th.ring.zero),
                           self.coords.terms.get((X,), th.ring.zero))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DualTensor):
            return NotImplemented
        return self.coords == other.coords

    def __repr__(self) -> str:
        return "D" + self.coords.to_str()


def dualize_tensor(v: TensorVector) -> DualTensor:
    """Factor-wise D on a tensor."""
    return DualTensor(v)


def _basis_tensors(length: int) -> Iterable[Labels]:
    return itertools.product((ONE, X), repeat=length)


def dual_involution(f, th: Optional[Theory] = None):
    """sigma_hat_D(f) = sigma_hat_0 o f o sigma_hat_1, factor-wise on tensors.

    Accepts a DualElement or a DualTensor and returns the same kind.
    """
    single = isinstance(f, DualElement)
    F = f.to_tensor() if single else f
    th = th or F.theory
    tau = scalar_involution(th, InvolutionKind.SIGMA_HAT)
    values = {}
    for labels in _basis_tensors(F.length):
        image = involution(TensorVector.pure(th, labels), InvolutionKind.SIGMA_HAT, th)
        values[labels] = tau(F.evaluate(image))
    out = DualTensor.from_values(th, F.length, values)
    return out.to_element() if single else out


def dual_comultiply(F: DualTensor) -> DualElement:
    """Delta*(F) = F o Delta, for F in A* (x) A*."""
    th = F.theory
    values = {}
    for a in (ONE, X):
        values[(a,)] = F.evaluate(comultiply(basis_element(th, a)))
    return DualTensor.from_values(th, 1, values).to_element()


def dual_multiply(f: DualElement) -> DualTensor:
    """m*(f) = f o m."""
    th = f.theory
    values = {}
    for a, b in _basis_tensors(2):
        values[(a, b)] = evaluate_dual(f, multiply(basis_element(th, a), basis_element(th, b)))
    return DualTensor.from_values(th, 2, values)


def dual_counit(r: RingElement, th: Theory) -> DualElement:
    """eps*(r) = r * eps."""
    values = {(ONE,): r * counit(basis_element(th, ONE)), (X,): r * counit(basis_element(th, X))}
    return DualTensor.from_values(th, 1, values).to_element()


def dual_unit(f: DualElement) -> RingElement:
    """iota*(f) = f(1)."""
    return evaluate_dual(f, basis_element(f.theory, ONE))
