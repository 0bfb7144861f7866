"""Swendsen-Wang sampling with double flip moves for Ising models with mixed
boundary conditions, plus an exact-enumeration oracle for tiny instances."""

from .chain import (
    ChainConfig,
    ChainTrace,
    average_spin,
    count_transitions,
    run_chain,
    run_replicas,
    swdf_step,
)
from .flip import (
    FlipOutcome,
    GeometricInvolution,
    InvolutionError,
    MatchingReport,
    build_matching,
    double_flip,
    metropolized_double_flip,
    random_interior_involution,
    validate_involution,
)
from .lattices import (
    BoundarySpec,
    MeshParams,
    build_disk_triangulation,
    build_square_lattice,
    exact_involution_for,
)
from .model import (
    GraphFormatError,
    IsingGraph,
    alignment_delta_under_flip,
    alignment_sum,
    load_graph,
    parse_graph,
    save_graph,
    serialize_graph,
)
from .rng import RngStream
from .sw import (
    ComponentDecomposition,
    ConflictingBoundaryError,
    assign_spins,
    decompose,
    sample_edge_config,
    sw_step,
)

__version__ = "0.1.0"

__all__ = [
    "BoundarySpec",
    "ChainConfig",
    "ChainTrace",
    "ComponentDecomposition",
    "ConflictingBoundaryError",
    "FlipOutcome",
    "GeometricInvolution",
    "GraphFormatError",
    "InvolutionError",
    "IsingGraph",
    "MatchingReport",
    "MeshParams",
    "RngStream",
    "alignment_delta_under_flip",
    "alignment_sum",
    "assign_spins",
    "average_spin",
    "build_disk_triangulation",
    "build_matching",
    "build_square_lattice",
    "count_transitions",
    "decompose",
    "double_flip",
    "exact_involution_for",
    "load_graph",
    "metropolized_double_flip",
    "parse_graph",
    "random_interior_involution",
    "run_chain",
    "run_replicas",
    "sample_edge_config",
    "save_graph",
    "serialize_graph",
    "sw_step",
    "swdf_step",
    "validate_involution",
]
