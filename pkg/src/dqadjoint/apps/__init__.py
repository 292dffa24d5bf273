"""Graph Laplacian and pose graph optimization applications."""

from .graphs import (
    Graph,
    build_laplacian,
    build_pentagon,
    cycle_graph,
    metric_e_lambda,
    random_graph,
    random_unit_dq,
    random_unit_dq_vector,
)
from .pgo import (
    PGOConfig,
    PGOInstance,
    PGOResult,
    dump_instance,
    load_instance,
    make_pgo_instance,
    metric_e_Q,
    pgo_solve,
)
