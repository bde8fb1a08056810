"""Domain models for equivariant Khovanov computations."""

from __future__ import annotations
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple


class TheoryTag(Enum):
    """Frobenius extension a complex is built from."""
    U2 = "u2"              # Z[h,t],   X^2 = hX + t
    U1 = "u1"              # Z[h],     X^2 = hX
    U1XU1 = "u1xu1"        # Z[a1,a2], X^2 = (a1+a2)X - a1*a2
    SU2 = "su2"            # Z[t],     X^2 = t
    SU2_SQRT = "su2sqrt"   # Z[r],     X^2 = r^2 with r = sqrt(t)
    PLAIN = "plain"        # Z,        X^2 = 0


class FieldKind(Enum):
    """Base ring of coefficients."""
    INTEGERS = "z"
    RATIONALS = "q"
    PRIME = "f"


class InvolutionKind(Enum):
    """Involutions on tensor powers of A."""
    SIGMA = "sigma"
    SIGMA_HAT = "sigma_hat"
    SIGMA_ALPHA = "sigma_alpha"
    SIGMA_SQRT_T = "sigma_sqrt_t"


class EndoKind(Enum):
    """Chain endomorphisms of a cube complex."""
    SIGMA_HAT = "sigma_hat"
    NU_HAT = "nu_hat"
    XBAR = "xbar"
    YBAR = "ybar"
    X1BAR = "x1bar"
    X2BAR = "x2bar"
    U = "u"
    WIGDERSON_K = "wigderson_K"


class RootLabel(Enum):
    """Fixed label carried by the basepoint circle of a reduced complex."""
    X = "X"
    Y = "Y"
    X1 = "X1"
    X2 = "X2"
    XPLUS = "X+"
    XMINUS = "X-"


class OutputFormat(Enum):
    TABLE = "table"
    JSON = "json"


class KhovanovError(Exception):
    """Base exception for all library errors"""
    pass


class InputError(KhovanovError):
    """Malformed user input (PD text, flags, batch files)"""
    pass


class ScopeError(KhovanovError):
    """Request outside the supported theory/field/diagram combinations"""
    pass


class VerificationError(KhovanovError):
    """A structural identity failed at runtime"""
    pass


_THEORY_ALIASES = {
    "u(2)": TheoryTag.U2,
    "u(1)": TheoryTag.U1,
    "bar_natan": TheoryTag.U1,
    "barnatan": TheoryTag.U1,
    "u1_u1": TheoryTag.U1XU1,
    "u(1)xu(1)": TheoryTag.U1XU1,
    "alpha": TheoryTag.U1XU1,
    "su(2)": TheoryTag.SU2,
    "su2_sqrt": TheoryTag.SU2_SQRT,
    "su2_sqrt_t": TheoryTag.SU2_SQRT,
    "nonequivariant": TheoryTag.PLAIN,
    "non_equivariant": TheoryTag.PLAIN,
    "khovanov": TheoryTag.PLAIN,
}


def _normalize_theory_tag(value) -> TheoryTag:
    """Accept enum members or loose command-line spellings."""
    if isinstance(value, TheoryTag):
        return value
    if isinstance(value, str):
        normalized = value.strip().lower().replace("-", "_").replace(" ", "_")
        if normalized in _THEORY_ALIASES:
            return _THEORY_ALIASES[normalized]
        try:
            return TheoryTag(normalized)
        except ValueError:
            raise InputError(f"Unknown theory: {value!r}") from None
    raise InputError(f"Unknown theory: {value!r}")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient ring: Z, Q or F_p."""
    kind: FieldKind
    p: int = 0

    def __post_init__(self):
        if self.kind == FieldKind.PRIME and not _is_prime(self.p):
            raise InputError(f"F_p requires a prime p, got {self.p}")
        if self.kind != FieldKind.PRIME and self.p != 0:
            raise InputError(f"Characteristic given for {self.kind.value}")

    @property
    def name(self) -> str:
        if self.kind == FieldKind.PRIME:
            return f"F{self.p}"
        return "Z" if self.kind == FieldKind.INTEGERS else "Q"

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def is_field(self) -> bool:
        return self.kind != FieldKind.INTEGERS


def _normalize_field(value) -> FieldSpec:
    """Parse 'z', 'q', 'f2', 'F_5', 'GF(3)' and similar spellings."""
    if isinstance(value, FieldSpec):
        return value
    if not isinstance(value, str):
        raise InputError(f"Unknown field: {value!r}")
    normalized = value.strip().lower().replace("_", "").replace("gf(", "f").rstrip(")")
    if normalized in ("z", "zz", "int", "integers"):
        return FieldSpec(FieldKind.INTEGERS)
    if normalized in ("q", "qq", "rationals"):
        return FieldSpec(FieldKind.RATIONALS)
    if normalized.startswith("f") and normalized[1:].isdigit():
        return FieldSpec(FieldKind.PRIME, int(normalized[1:]))
    raise InputError(f"Unknown field: {value!r}")


def _normalize_root_label(value) -> Optional[RootLabel]:
    if value is None or isinstance(value, RootLabel):
        return value
    if isinstance(value, str):
        normalized = value.strip().upper().replace("_", "")
        aliases = {"XPLUS": RootLabel.XPLUS, "XMINUS": RootLabel.XMINUS,
                   "X₁": RootLabel.X1, "X₂": RootLabel.X2}
        if normalized in aliases:
            return aliases[normalized]
        try:
            return RootLabel(normalized)
        except ValueError:
            raise InputError(f"Unknown basepoint label: {value!r}") from None
    raise InputError(f"Unknown basepoint label: {value!r}")


@dataclass(frozen=True)
class Summand:
    """One cyclic summand of a bigraded module.

    ``order`` is None for a free summand, otherwise the monic torsion order
    (a ring element of the homology ring).
    """
    i: int
    q: int
    order: Any = None
    order_text: str = ""

    @property
    def is_free(self) -> bool:
        return self.order is None

    def sort_key(self) -> Tuple[int, int, str]:
        return (self.i, self.q, self.order_text)


@dataclass
class SInvariantReport:
    """Outcome of an s-invariant computation, both routes included."""
    field_name: str
    d_h: int
    writhe: int
    seifert_circles: int
    s: int
    s_formula: int
    s_gradings: int
    s_reduced: int
    unreduced_free_gradings: List[int]
    reduced_free_grading: int
    zeta: Dict[str, Any] = field(default_factory=dict)
    zeta_tilde: Dict[str, Any] = field(default_factory=dict)
    zeta_prime: Optional[Dict[str, Any]] = None
    free_generation_verified: bool = False
    u_relations_verified: bool = False
    zeta_sigma_fixed: bool = False
    name: str = ""

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "field": self.field_name,
            "d_h": self.d_h,
            "writhe": self.writhe,
            "seifert_circles": self.seifert_circles,
            "s": self.s,
            "routes": {
                "formula": self.s_formula,
                "gradings": self.s_gradings,
                "reduced": self.s_reduced,
            },
            "unreduced_free_gradings": list(self.unreduced_free_gradings),
            "reduced_free_grading": self.reduced_free_grading,
            "zeta": self.zeta,
            "zeta_tilde": self.zeta_tilde,
            "zeta_prime": self.zeta_prime,
            "checks": {
                "free_generation": self.free_generation_verified,
                "u_relations": self.u_relations_verified,
                "zeta_sigma_fixed": self.zeta_sigma_fixed,
            },
        }


_COMMANDS = ("homology", "s", "verify", "complex", "basis", "transfer")


@dataclass
class JobSpec:
    """One CLI request."""
    command: str
    pd: Optional[str] = None
    file: Optional[str] = None
    braid: Optional[str] = None
    theory: TheoryTag = TheoryTag.U1
    field_spec: FieldSpec = field(default_factory=lambda: FieldSpec(FieldKind.RATIONALS))
    reduced: bool = False
    basepoint: Optional[int] = None
    label: Optional[RootLabel] = None
    output: OutputFormat = OutputFormat.TABLE
    seed: int = 0
    suite: Optional[str] = None
    samples: Optional[int] = None
    name: str = ""

    def __post_init__(self):
        """Validate the request before any computation starts."""
        if self.command not in _COMMANDS:
            raise InputError(f"Unknown command: {self.command}")
        self.theory = _normalize_theory_tag(self.theory)
        self.field_spec = _normalize_field(self.field_spec)
        self.label = _normalize_root_label(self.label)
        if isinstance(self.output, str):
            self.output = OutputFormat(self.output.strip().lower())

        sources = [s for s in (self.pd, self.file, self.braid) if s is not None]
        if self.command == "verify" and self.suite in ("frobenius", "snf"):
            if sources:
                raise InputError(f"Suite {self.suite} takes no diagram input")
        elif len(sources) != 1:
            raise InputError("Exactly one of --pd, --file, --braid is required")
        if self.label is not None and not self.reduced:
            raise InputError("--label only applies together with --reduced")
