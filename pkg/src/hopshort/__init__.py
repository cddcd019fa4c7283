"""Diameter-reducing shortcut sets and the tooling built on them.

The package splits into the graph substrate (graph, generators, io), the
shortcut constructions (seq, parallel, shortcuts), the consumers built on
top of them (reach, congest), and the experiment layer (harness, cli).
Hot traversal kernels live in _kernels with a compiled backend and a pure
NumPy fallback chosen at import; BACKEND names the one in use.
"""

from ._kernels import BACKEND
from .congest import (
    AUTO,
    HubRelations,
    Network,
    RoundLedger,
    SkeletonGraph,
    auto_alpha,
    broadcast_all,
    broadcast_charge,
    build_skeleton,
    distr_reach,
    limited_bfs_all,
    round_report,
)
from .generators import (
    complete_dag,
    cycle,
    layered_grid,
    path,
    path_plus_random,
    random_dag,
)
from .graph import (
    BACKWARD,
    FORWARD,
    Digraph,
    DistMap,
    VertexSet,
    bfs_limited,
    exact_diameter,
    reachable_set,
    strongly_connected_components,
    transitive_closure_oracle,
)
from .harness import (
    ExperimentConfig,
    GeneratorSpec,
    MetricsRecord,
    ScalingFit,
    calibrate_budgets,
    fit_scaling,
    generate,
    run_experiment,
    write_csv,
)
from .io import read_edge_list, write_edge_list
from .parallel import (
    DepthMetrics,
    FringeRing,
    ParallelSCResult,
    ParCtx,
    ScaleOverride,
    compute_search_scale,
    parallel_diam,
    parallel_sc,
)
from .reach import ReachResult, estimate_diameter, hopset_bfs, reach_with_hopset
from .seq import default_repetitions, seq_shortcut, seq_shortcut_whp
from .shortcuts import ShortcutSet, WorkMetrics

__version__ = "0.1.0"

__all__ = [
    "AUTO",
    "BACKEND",
    "BACKWARD",
    "FORWARD",
    "DepthMetrics",
    "Digraph",
    "DistMap",
    "ExperimentConfig",
    "FringeRing",
    "GeneratorSpec",
    "HubRelations",
    "MetricsRecord",
    "Network",
    "ParCtx",
    "ParallelSCResult",
    "ReachResult",
    "RoundLedger",
    "ScaleOverride",
    "ScalingFit",
    "ShortcutSet",
    "SkeletonGraph",
    "VertexSet",
    "WorkMetrics",
    "auto_alpha",
    "bfs_limited",
    "broadcast_all",
    "broadcast_charge",
    "build_skeleton",
    "calibrate_budgets",
    "complete_dag",
    "compute_search_scale",
    "cycle",
    "default_repetitions",
    "distr_reach",
    "estimate_diameter",
    "exact_diameter",
    "fit_scaling",
    "generate",
    "hopset_bfs",
    "layered_grid",
    "limited_bfs_all",
    "parallel_diam",
    "parallel_sc",
    "path",
    "path_plus_random",
    "random_dag",
    "reach_with_hopset",
    "reachable_set",
    "read_edge_list",
    "round_report",
    "run_experiment",
    "seq_shortcut",
    "seq_shortcut_whp",
    "strongly_connected_components",
    "transitive_closure_oracle",
    "write_csv",
    "write_edge_list",
]
