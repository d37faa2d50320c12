"""Exact graph pebbling computations: solvability, pebbling numbers, and
support-restricted bounds via automorphism orbits and covering designs."""

from .configurations import Configuration, apply_move, parse_config_literal, weight
from .covering import CoveringDesign, greedy_cover, validate_cover
from .follower import (
    DeliveryResult,
    FlowVector,
    MoveMultigraph,
    balance_check,
    bfs_oracle,
    is_solvable,
    max_deliverable,
    order_moves,
    purify_flow,
)
from .graphs import (
    Arc,
    DistanceTable,
    Graph,
    arcs,
    cartesian_product,
    catalog,
    distances,
    from_edge_list,
    in_arcs,
    load_edge_list,
    out_arcs,
)
from .leader import BilevelInstance, BilevelOutcome, max_unsolvable, pi_support
from .pipeline import (
    GrahamReport,
    PebblingReport,
    graham_support_check,
    pi,
    pi_k_upper,
    pi_rooted,
    two_pebbling_witness,
)
from .symmetry import (
    AutGroup,
    Permutation,
    SupportClasses,
    automorphisms,
    support_class_reps,
    vertex_orbits,
)

__all__ = [name for name in dir() if not name.startswith("_")]
