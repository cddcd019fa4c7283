"""Shortcut-edge bookkeeping shared by the sequential and parallel builders.

A ShortcutSet is a deduplicated set of extra edges layered on top of a host
graph. For n up to DENSE_MAX it is a bitmap (one row of uint64 words per
source vertex), which is what lets the compiled kernels test-and-set edges
in bulk; beyond that a plain hash set takes over. Self-loops are never
stored: a shortcut (v, v) says nothing about reachability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional

import numpy as np

#: beyond this vertex count the dense bitmap would exceed ~128 MB
DENSE_MAX = 32768

# Label kinds. ANC sorts before DES, which fixes the canonical ordering of
# partition keys; ELIM marks vertices dropped from the next level.
ANC = 0
DES = 1
ELIM = 2

_KIND_NAMES = {ANC: "anc", DES: "des", ELIM: "elim"}


def kind_name(kind: int) -> str:
    return _KIND_NAMES[kind]


class Label(NamedTuple):
    """A relation discovered between a vertex and a shortcutter."""

    vertex: int
    shortcutter: int
    kind: int

    def __repr__(self) -> str:
        return f"Label({self.vertex}, sc={self.shortcutter}, {kind_name(self.kind)})"


@dataclass
class WorkMetrics:
    """Operation counters for one shortcut construction.

    comparisons counts partition work: one per label routed through the
    refinement map plus, per subproblem, #cells * ceil(log2(#cells + 1))
    for ordering the cells. The formula is fixed so that every execution
    strategy reports identical numbers.
    """

    edge_scans: int = 0
    label_assignments: int = 0
    comparisons: int = 0
    shortcuts_added: int = 0
    max_r_reached: int = 0

    def merge(self, other: "WorkMetrics") -> None:
        self.edge_scans += other.edge_scans
        self.label_assignments += other.label_assignments
        self.comparisons += other.comparisons
        self.shortcuts_added += other.shortcuts_added
        self.max_r_reached = max(self.max_r_reached, other.max_r_reached)

    def as_dict(self) -> dict:
        return {
            "edge_scans": self.edge_scans,
            "label_assignments": self.label_assignments,
            "comparisons": self.comparisons,
            "shortcuts_added": self.shortcuts_added,
            "max_r_reached": self.max_r_reached,
        }


class ShortcutSet:
    """Deduplicated shortcut edges with optional per-edge provenance.

    Provenance (the recursion level and shortcutter that first produced an
    edge) is a dict and only affordable at small n; it defaults on below
    4097 vertices and off above. First insertion wins both for membership
    and provenance.
    """

    __slots__ = ("n", "words", "_rows", "_sparse", "_count", "_origins")

    def __init__(self, n: int, track_origins: Optional[bool] = None):
        self.n = int(n)
        if track_origins is None:
            track_origins = n <= 4096
        self._count = 0
        self._origins: Optional[dict] = {} if track_origins else None
        if n <= DENSE_MAX:
            self.words = (n + 63) // 64
            self._rows = np.zeros((max(n, 1), self.words), dtype=np.uint64)
            self._sparse = None
        else:
            self.words = 0
            self._rows = None
            self._sparse = set()

    @property
    def rows(self) -> Optional[np.ndarray]:
        """Dense bitmap rows for kernel use; None in sparse mode."""
        return self._rows

    @property
    def tracks_origins(self) -> bool:
        return self._origins is not None

    def add(self, u: int, v: int, level: int = 0, shortcutter: int = -1) -> bool:
        """Insert edge (u, v); returns True when it is new. Drops u == v."""
        if u == v:
            return False
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
        if self._rows is not None:
            w, b = divmod(v, 64)
            bit = np.uint64(1 << b)
            if self._rows[u, w] & bit:
                return False
            self._rows[u, w] |= bit
        else:
            key = (u, v)
            if key in self._sparse:
                return False
            self._sparse.add(key)
        self._count += 1
        if self._origins is not None:
            self._origins[(u, v)] = (level, shortcutter)
        return True

    def bulk_note(self, added: int) -> None:
        """Account for edges a kernel wrote directly into `rows`."""
        self._count += int(added)

    def note_origins(self, us, vs, level: int, shortcutters) -> None:
        """Record provenance for edges a kernel wrote directly into `rows`.

        First record wins, matching add(); callers feed freshly-deduped
        edges so collisions only occur if they replay a batch.
        """
        if self._origins is None:
            return
        origins = self._origins
        for u, v, s in zip(us.tolist(), vs.tolist(), shortcutters.tolist()):
            origins.setdefault((u, v), (level, s))

    def __contains__(self, edge: tuple[int, int]) -> bool:
        u, v = edge
        if u == v or not (0 <= u < self.n and 0 <= v < self.n):
            return False
        if self._rows is not None:
            w, b = divmod(v, 64)
            return bool(self._rows[u, w] & np.uint64(1 << b))
        return (u, v) in self._sparse

    def __len__(self) -> int:
        return self._count

    def origin(self, u: int, v: int) -> Optional[tuple[int, int]]:
        """(level, shortcutter) that first inserted the edge, if tracked."""
        if self._origins is None:
            return None
        return self._origins.get((u, v))

    def edges(self) -> np.ndarray:
        """All edges as a sorted (m, 2) int64 array. O(n^2 / 64) in dense mode."""
        if self._rows is None:
            if not self._sparse:
                return np.zeros((0, 2), dtype=np.int64)
            arr = np.array(sorted(self._sparse), dtype=np.int64)
            return arr
        out_u = []
        out_v = []
        for u in range(self.n):
            row = self._rows[u]
            if not row.any():
                continue
            bits = np.unpackbits(row.view(np.uint8), bitorder="little")[: self.n]
            vs = np.flatnonzero(bits)
            out_u.append(np.full(vs.size, u, dtype=np.int64))
            out_v.append(vs.astype(np.int64))
        if not out_u:
            return np.zeros((0, 2), dtype=np.int64)
        return np.column_stack([np.concatenate(out_u), np.concatenate(out_v)])

    def __iter__(self) -> Iterator[tuple[int, int]]:
        for u, v in self.edges():
            yield int(u), int(v)

    def merge(self, other: "ShortcutSet") -> int:
        """Union in `other`, first-insertion-wins. Returns #edges added."""
        if other.n != self.n:
            raise ValueError("cannot merge shortcut sets over different n")
        if self._rows is not None and other._rows is not None:
            new = other._rows & ~self._rows
            added = int(np.bitwise_count(new).sum())
            if added:
                self._rows |= other._rows
            if self._origins is not None:
                if other._origins is None:
                    self._origins = None
                elif added:
                    for u in np.flatnonzero(new.any(axis=1)):
                        bits = np.unpackbits(
                            new[u].view(np.uint8), bitorder="little"
                        )[: self.n]
                        for v in np.flatnonzero(bits):
                            self._origins[(int(u), int(v))] = other._origins[
                                (int(u), int(v))
                            ]
        else:
            added = 0
            for u, v in other:
                if self.add(u, v):
                    added += 1
                    if self._origins is not None and other._origins is not None:
                        self._origins[(u, v)] = other._origins[(u, v)]
            return added
        self._count += added
        return added

    def __repr__(self) -> str:
        return f"ShortcutSet(n={self.n}, edges={self._count})"
