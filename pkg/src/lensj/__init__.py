"""Exact computation of KO, J and KQ groups of lens spaces L^{2k} mod p^r."""
from .exactalg import (
    CyclicDecomposition,
    IntMatrix,
    Lattice,
    element_order,
    hermite_normal_form,
    invariant_factors,
    kernel_of_induced_endomorphism,
    lattice_contains,
    quotient_decomposition,
    smith_normal_form,
    subgroup_quotient,
)
from .jcalc import ConsistencyError, JGroupResult, compute_j_group
from .kqcalc import KQResult, compute_kq_group
from .ktheory import build_k_presentation, build_ko_presentation

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError",
    "CyclicDecomposition",
    "IntMatrix",
    "JGroupResult",
    "KQResult",
    "Lattice",
    "build_k_presentation",
    "build_ko_presentation",
    "compute_j_group",
    "compute_kq_group",
    "element_order",
    "hermite_normal_form",
    "invariant_factors",
    "kernel_of_induced_endomorphism",
    "lattice_contains",
    "quotient_decomposition",
    "smith_normal_form",
    "subgroup_quotient",
]
