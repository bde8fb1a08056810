"""Core computations: arithmetic, Frobenius extensions, complexes, homology."""

from eqkhovanov.core.coeff import GroundRing, SparseMatrix
from eqkhovanov.core.snf import SmithForm, smith_normal_form

from eqkhovanov.core.frobenius import (
    Theory,
    make_theory,
    involution,
    nu_hat,
    sigma_hat_matrix,
)

from eqkhovanov.core.extensions import base_change, get_arrow

from eqkhovanov.core.diagram import (
    LinkDiagram,
    parse_pd,
    braid_closure,
    disjoint_union,
    mirror,
    resolve,
    seifert_data,
)

from eqkhovanov.core.complex import (
    CubeComplex,
    ChainVector,
    build_complex,
    chain_endo,
    split_reduced,
    mirror_dual_iso,
)

from eqkhovanov.core.homology import (
    GradedModule,
    homology,
    class_coordinates,
    nu_homology_acyclicity,
    split_comparison,
)

from eqkhovanov.core.lee import (
    lee_cycle,
    h_divisibility,
    s_invariant,
    link_basis_via_nu,
    su2_transfer,
)

from eqkhovanov.core.explainer import explain_s_invariant

from eqkhovanov.core.verify import SUITES, run_suite

__all__ = [
    "GroundRing",
    "SparseMatrix",
    "SmithForm",
    "smith_normal_form",
    "Theory",
    "make_theory",
    "involution",
    "nu_hat",
    "sigma_hat_matrix",
    "base_change",
    "get_arrow",
    "LinkDiagram",
    "parse_pd",
    "braid_closure",
    "disjoint_union",
    "mirror",
    "resolve",
    "seifert_data",
    "CubeComplex",
    "ChainVector",
    "build_complex",
    "chain_endo",
    "split_reduced",
    "mirror_dual_iso",
    "GradedModule",
    "homology",
    "class_coordinates",
    "nu_homology_acyclicity",
    "split_comparison",
    "lee_cycle",
    "h_divisibility",
    "s_invariant",
    "link_basis_via_nu",
    "su2_transfer",
    "explain_s_invariant",
    "SUITES",
    "run_suite",
]
