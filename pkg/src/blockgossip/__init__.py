"""Block gossip simulation toolkit: graphs, coverings, the block randomized
Kaczmarz solver, gossip protocols with noise models, and an experiment CLI."""

from .covering import (
    CoveringConstants,
    RowCovering,
    constants,
    greedy_clique_cover,
    greedy_ies_cover,
    load_covering,
    merge_disjoint,
    random_block_cover,
    random_path_cover,
    reduce_to_spanning_forests,
    save_covering,
)
from .gossip import (
    ConsensusProblem,
    Consistent,
    ConstantEdgeError,
    GossipTrajectory,
    NoiseModel,
    VaryingEdgeError,
    consensus_target,
    gossip_horizon_bound,
    gossip_rate_bound,
    gossip_rate_caps,
    gossip_step,
    gossip_step_noisy,
)
from .graph import (
    EdgeSubset,
    Graph,
    algebraic_connectivity,
    connected_components,
    generate_complete,
    generate_erdos_renyi,
    generate_path,
    generate_square_lattice,
    incidence_matrix,
    is_connected,
    laplacian,
    load_graph,
    save_graph,
    spanning_forest,
)
from .kaczmarz import (
    BKState,
    BKTrajectory,
    LinearSystem,
    bk_run,
    bk_step,
    solution_point,
    theoretical_horizon,
    theoretical_rate,
)

__all__ = [
    "BKState",
    "BKTrajectory",
    "ConsensusProblem",
    "Consistent",
    "ConstantEdgeError",
    "CoveringConstants",
    "EdgeSubset",
    "GossipTrajectory",
    "Graph",
    "LinearSystem",
    "NoiseModel",
    "RowCovering",
    "VaryingEdgeError",
    "algebraic_connectivity",
    "bk_run",
    "bk_step",
    "connected_components",
    "consensus_target",
    "constants",
    "generate_complete",
    "generate_erdos_renyi",
    "generate_path",
    "generate_square_lattice",
    "gossip_horizon_bound",
    "gossip_rate_bound",
    "gossip_rate_caps",
    "gossip_step",
    "gossip_step_noisy",
    "greedy_clique_cover",
    "greedy_ies_cover",
    "incidence_matrix",
    "is_connected",
    "laplacian",
    "load_covering",
    "load_graph",
    "merge_disjoint",
    "random_block_cover",
    "random_path_cover",
    "reduce_to_spanning_forests",
    "save_covering",
    "save_graph",
    "solution_point",
    "spanning_forest",
    "theoretical_horizon",
    "theoretical_rate",
]
