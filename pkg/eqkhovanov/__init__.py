"""
Equivariant Khovanov - exact equivariant Khovanov homology

Chain complexes of link diagrams over the U(2), U(1), U(1)xU(1) and SU(2)
Frobenius extensions, their symmetries, homology over Euclidean rings,
Lee cycles and the s-invariant over any field.
"""

# Version
__version__ = "1.0.0"

# Domain models
from eqkhovanov.domain.models import (
    TheoryTag,
    FieldKind,
    FieldSpec,
    InvolutionKind,
    EndoKind,
    RootLabel,
    Summand,
    SInvariantReport,
    JobSpec,
    KhovanovError,
    InputError,
    ScopeError,
    VerificationError,
)

# Core functions
from eqkhovanov.core.coeff import GroundRing, SparseMatrix
from eqkhovanov.core.snf import smith_normal_form
from eqkhovanov.core.frobenius import make_theory, involution, nu_hat
from eqkhovanov.core.extensions import base_change
from eqkhovanov.core.diagram import LinkDiagram, parse_pd, braid_closure, mirror, seifert_data
from eqkhovanov.core.complex import build_complex, chain_endo, split_reduced
from eqkhovanov.core.homology import GradedModule, homology, class_coordinates, nu_homology_acyclicity

from eqkhovanov.core.lee import (
    lee_cycle,
    h_divisibility,
    s_invariant,
    link_basis_via_nu,
    su2_transfer,
)

from eqkhovanov.core.explainer import explain_s_invariant

# Public API
__all__ = [
    # Version
    "__version__",

    # Domain models
    "TheoryTag",
    "FieldKind",
    "FieldSpec",
    "InvolutionKind",
    "EndoKind",
    "RootLabel",
    "Summand",
    "SInvariantReport",
    "JobSpec",

    # Errors
    "KhovanovError",
    "InputError",
    "ScopeError",
    "VerificationError",

    # Arithmetic
    "GroundRing",
    "SparseMatrix",
    "smith_normal_form",

    # Frobenius extensions
    "make_theory",
    "involution",
    "nu_hat",
    "base_change",

    # Diagrams and complexes
    "LinkDiagram",
    "parse_pd",
    "braid_closure",
    "mirror",
    "seifert_data",
    "build_complex",
    "chain_endo",
    "split_reduced",

    # Homology
    "GradedModule",
    "homology",
    "class_coordinates",
    "nu_homology_acyclicity",

    # Lee theory
    "lee_cycle",
    "h_divisibility",
    "s_invariant",
    "link_basis_via_nu",
    "su2_transfer",
    "explain_s_invariant",
]
