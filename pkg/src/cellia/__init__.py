"""Cellular interference alignment on the hexagonal lattice.

The package builds the Eisenstein-lattice interference graph, draws seeded
MIMO channels, constructs one-shot linear alignment schemes for 2x2, 2x3
and 2x4 antenna configurations, certifies them numerically, and computes
matching converse bounds from the triangle LP.
"""

from .channel import ChannelSet, generate
from .converse import (
    LpOutcome,
    TriangleConfig,
    best_lambda,
    bound_report,
    config_table,
    two_fifths_bound_holds,
    dual_bound,
    enumerate_configs,
    f_m,
    feasibility_check,
    g_fn,
    general_m_bound,
    graph_lp_params,
    integer_oracle,
    lp_solve_exact,
    s_fn,
)
from .exceptions import DegenerateChannelError, InfeasibleLPError, RankDeficiencyError, UnorderedEdgeError
from .lattice import (
    ClusterPartition,
    EisensteinPoint,
    InterferenceGraph,
    build_graph,
    cardinality_formulas,
    classify_boundary,
    enumerate_triangles,
    graph_to_json,
    inactive_set_and_clusters,
    orient_edges,
)
from .schemes import (
    BeamformerSolution,
    claimed_average_dof,
    effective_links,
    align_three_streams,
    solve,
    solve_2x2,
    solve_2x3,
    solve_2x4,
)
from .verifier import Certificate, RateReport, certify_alignment, measure_rates

__version__ = "0.1.0"
