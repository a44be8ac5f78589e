"""Exact certificates and numerical checks for global convergence in reaction networks."""

from .certify import Certificate, certify, verify_certificate
from .cone import (
    CubicCone,
    build_cubic_cone,
    check_K_irreducible,
    check_K_quasipositive,
    cone_interior_member,
    cone_member,
    find_diagonal_rescale,
    find_nonneg_right_inverse,
    kernel_covector,
    quasipositivity_witness,
)
from .cube import build_cube_matrix, edge_partner, verify_vertex_extremality
from .digraph import build_bipartite_digraph, is_strongly_connected, structural_digraph
from .kinetics import KineticModel, jacobian, qualitative_class_member, rate_vector
from .network import (
    ReactionNetwork,
    family_network,
    parse_network,
    render,
    repelling_faces_check,
    stoichiometric_matrix,
    tail_network,
)
from .simulate import (
    class_convergence_experiment,
    find_equilibrium,
    integrate,
    order_preservation_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "certify",
    "verify_certificate",
    "CubicCone",
    "build_cubic_cone",
    "check_K_irreducible",
    "check_K_quasipositive",
    "cone_interior_member",
    "cone_member",
    "find_diagonal_rescale",
    "find_nonneg_right_inverse",
    "kernel_covector",
    "quasipositivity_witness",
    "build_cube_matrix",
    "edge_partner",
    "verify_vertex_extremality",
    "build_bipartite_digraph",
    "is_strongly_connected",
    "structural_digraph",
    "KineticModel",
    "jacobian",
    "qualitative_class_member",
    "rate_vector",
    "ReactionNetwork",
    "family_network",
    "parse_network",
    "render",
    "repelling_faces_check",
    "stoichiometric_matrix",
    "tail_network",
    "class_convergence_experiment",
    "find_equilibrium",
    "integrate",
    "order_preservation_experiment",
]
