"""Simulated MPC execution of greedy MIS, fractional matching / vertex cover and
matching rounding, with sequential references and runtime certificates."""

from .graph import EdgeListError, Graph, check_graph, induced_subgraph, load_edge_list, read_edge_list
from .generators import from_spec, gen_gnp
from .matching import (
    FractionalMatching,
    SimulationKnobs,
    ThresholdSchedule,
    VertexCover,
    central,
    central_rand,
    check_certificates,
    matching_weight,
    mpc_simulation,
    verify_vertex_cover,
)
from .mis import (
    BatchSchedule,
    IndependentSet,
    RankPermutation,
    mpc_greedy_mis,
    residual_graph,
    sequential_greedy_mis,
    verify_mis,
)
from .mpc import MpcConfig, PartitionAssignment, RoundTrace, SpaceViolation, account_round, partition_vertices
from .oracles import ExactResult, exact_max_matching, greedy_maximal_matching, vc_lower_bound
from .rounding import Matching, best_of, iterated_matching, round_matching, small_matching_fallback, verify_matching

__version__ = "0.1.0"
