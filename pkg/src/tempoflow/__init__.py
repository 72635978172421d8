"""Flows over time with exact rational arithmetic.

Maximum flows over time, earliest arrival flows, lexicographically maximum
flows over time and transshipments over time, each returned together with a
certificate that can be checked independently.
"""

from .algorithms import (
    EarliestArrivalResult,
    LexMaxResult,
    MaxFlowResult,
    earliest_arrival,
    lex_max,
    max_flow_over_time,
)
from .flow_over_time import (
    ArrivalPattern,
    CutOverTime,
    FlowOverTime,
    StepFunction,
    VerificationReport,
    Violation,
    arrival_pattern,
    cut_capacity,
    extract_cut,
    induce_finite,
    induce_infinite,
    net_outflow,
    verify,
)
from .network import (
    INF,
    SUPER,
    Arc,
    ExtendedNetwork,
    Network,
    NetworkError,
    ParseError,
    extend,
    load_network,
    make_network,
    parse_network,
)
from .static_flow import (
    ChainDecomposition,
    ChainFlow,
    StaticFlow,
    Step,
    decompose_standard,
    min_cost_circulation,
    residual_capacity,
    shortest_walk_from_super,
)
from .transshipment import (
    feasible,
    greedy_vertex,
    o_value,
    quickest_horizon,
    sfm_min_norm,
    transshipment,
)

__version__ = "0.1.0"
