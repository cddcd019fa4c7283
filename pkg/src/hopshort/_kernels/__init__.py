"""Kernel backend selection.

The compiled backend (_speed, Cython) is preferred when importable; the
pure-Python reference is the fallback and the semantics authority. Set
HOPSHORT_PURE=1 to force the fallback, e.g. for the backend benchmark.
"""

import os

from . import pure as _pure

if os.environ.get("HOPSHORT_PURE"):
    _impl = _pure
else:
    try:
        from . import _speed as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND_NAME

NO_LIMIT = _pure.NO_LIMIT

make_workspace = _impl.make_workspace
set_graph = _impl.set_graph
level_sweep = _impl.level_sweep
chain_keys = _impl.chain_keys
closure_and_ecc = _impl.closure_and_ecc
ecc_all = _impl.ecc_all
merged_ecc = _impl.merged_ecc
bfs_hybrid = _impl.bfs_hybrid
relation_stats = _impl.relation_stats
saturated_signatures = _impl.saturated_signatures
saturated_hub_stats = _impl.saturated_hub_stats
saturated_cell_order = _impl.saturated_cell_order
batch_cells = _impl.batch_cells
event_tables = _impl.event_tables
run_hist = _impl.run_hist
flood = _impl.flood

__all__ = [
    "BACKEND",
    "NO_LIMIT",
    "make_workspace",
    "set_graph",
    "level_sweep",
    "chain_keys",
    "closure_and_ecc",
    "ecc_all",
    "merged_ecc",
    "bfs_hybrid",
    "relation_stats",
    "saturated_signatures",
    "saturated_hub_stats",
    "saturated_cell_order",
    "batch_cells",
    "event_tables",
    "run_hist",
    "flood",
]
