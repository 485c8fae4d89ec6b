"""Self-triggered α-consensus: simulator, analysis and worst-case instances."""

from .analysis import (
    ConsensusReport,
    DisagreementTrajectory,
    InvariantReport,
    adversarial_duration_oracle,
    check_invariants,
    consensus_time,
    disagreement_trajectory,
)
from .engine import (
    BroadcastRecord,
    PiecewiseLinearTrajectory,
    SimulationError,
    SimulationResult,
    communication_cost,
    reconstruct_neighbor_state,
    run,
    state_at,
)
from .graph import Graph, build_graph, fig6_graph, is_connected, laplacian, worst_case_graph
from .protocol import (
    ProtocolParams,
    UpdatePlan,
    local_disagreement,
    plan_update,
    t_star,
    time_optimal_control,
)

__version__ = "0.1.0"
