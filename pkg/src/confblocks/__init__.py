"""Exact computations around conformal blocks of rational vertex algebras:
fusion-ring ranks over stable graphs, truncated Fock and lattice vertex
algebras, sewing and nodal gluing checks, and a genus-zero coinvariant oracle."""

from .catalog import (
    CatalogEntry,
    FusionRing,
    affine_sl2,
    from_selector,
    lattice_catalog,
    load_ring,
    minimal_model,
    validate_fusion,
)
from .exact import EchelonBasis, LaurentJet, QSeries, bareiss_rank, quotient_dim
from .factorization import (
    RankQuery,
    StableGraph,
    enumerate_stable_graphs,
    invariance_check,
    rank,
    rank_via_graph,
)
from .fock import FockModule, FockVOA, graded_dimension
from .genus_zero import oracle_vs_fusion, truncated_coinvariant_dim, zhu_element
from .nodal import KDifferentialJet, RationalSection, glue_check, nodal_chiral_check, prescribe_jets_p1
from .sewing import sewing_identity_check, spectral_apply_D
from .voa import ModeElement, gamma_action, lie_bracket, theta_involution

__version__ = "0.1.0"

__all__ = [
    "CatalogEntry",
    "EchelonBasis",
    "FockModule",
    "FockVOA",
    "FusionRing",
    "KDifferentialJet",
    "LaurentJet",
    "ModeElement",
    "QSeries",
    "RankQuery",
    "RationalSection",
    "StableGraph",
    "affine_sl2",
    "bareiss_rank",
    "enumerate_stable_graphs",
    "from_selector",
    "gamma_action",
    "glue_check",
    "graded_dimension",
    "invariance_check",
    "lattice_catalog",
    "lie_bracket",
    "load_ring",
    "minimal_model",
    "nodal_chiral_check",
    "oracle_vs_fusion",
    "prescribe_jets_p1",
    "quotient_dim",
    "rank",
    "rank_via_graph",
    "sewing_identity_check",
    "spectral_apply_D",
    "theta_involution",
    "truncated_coinvariant_dim",
    "validate_fusion",
    "zhu_element",
]
