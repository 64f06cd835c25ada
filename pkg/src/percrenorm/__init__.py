"""Percolation renormalization of lattice cluster states.

Monte Carlo estimation of block-crossing and renormalization success
probabilities on cubic, diamond, covering and pyrochlore lattices, plus
the classical post-processing that turns a successful sample into a
measurement plan preparing a brick-wall cluster state.
"""

from ._kernels import BACKEND
from .lattice import LatticeGraph, LatticeKind, build_block, covering_lattice
from .pathing import (
    GraphState,
    IncompletePlanError,
    MeasurementPlan,
    NotFullError,
    apply_plan,
    build_plan,
    extract_routes,
    hexagonal_target,
    verify_target,
)
from .percolation import (
    Configuration,
    CrossingCurve,
    CrossingEstimate,
    PercolationParams,
    close_lost_sites,
    crossing_clusters,
    crossing_curve,
    estimate_crossing_prob,
    label_clusters,
    sample,
)
from .renorm import (
    BoundConstants,
    RenormScheme,
    RenormalizedLattice,
    bound_block_size,
    build_renormalized,
    estimate_P,
    evaluate_lower_bound,
    min_block_size,
    scaling_scan,
)
from .resources import (
    BUDGET_QUBIT_BOUND,
    LossSpec,
    ResourceSpec,
    apply_heralded_loss,
    loss_budget,
    mixed_params_from_gates,
    resource_count,
    site_success_prob_5star,
)
from .rng import RngSpec, uniforms

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BUDGET_QUBIT_BOUND",
    "BoundConstants",
    "Configuration",
    "CrossingCurve",
    "CrossingEstimate",
    "GraphState",
    "IncompletePlanError",
    "LatticeGraph",
    "LatticeKind",
    "LossSpec",
    "MeasurementPlan",
    "NotFullError",
    "PercolationParams",
    "RenormScheme",
    "RenormalizedLattice",
    "ResourceSpec",
    "RngSpec",
    "apply_heralded_loss",
    "apply_plan",
    "bound_block_size",
    "build_block",
    "build_plan",
    "build_renormalized",
    "close_lost_sites",
    "covering_lattice",
    "crossing_clusters",
    "crossing_curve",
    "estimate_P",
    "estimate_crossing_prob",
    "evaluate_lower_bound",
    "extract_routes",
    "hexagonal_target",
    "label_clusters",
    "loss_budget",
    "min_block_size",
    "mixed_params_from_gates",
    "resource_count",
    "sample",
    "scaling_scan",
    "site_success_prob_5star",
    "uniforms",
    "verify_target",
]
