"""Plain-text edge-list files.

Format: first non-comment line is `n m`, followed by m lines `u v`.
Anything from `#` to end of line is a comment. Parse errors report the
1-based line number.
"""

from __future__ import annotations

from pathlib import Path

from .graph import Digraph


def read_edge_list(path: str | Path) -> Digraph:
    tokens: list[tuple[int, list[str]]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                tokens.append((lineno, line.split()))
    if not tokens:
        raise ValueError(f"{path}: empty file, expected a header line 'n m'")
    lineno, head = tokens[0]
    if len(head) != 2:
        raise ValueError(f"{path}: line {lineno}: header must be 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise ValueError(f"{path}: line {lineno}: header must be two integers") from None
    if n < 0 or m < 0:
        raise ValueError(f"{path}: line {lineno}: negative header values")
    body = tokens[1:]
    if len(body) != m:
        raise ValueError(
            f"{path}: header announces {m} edges but file has {len(body)}"
        )
    edges = []
    for lineno, parts in body:
        if len(parts) != 2:
            raise ValueError(f"{path}: line {lineno}: expected 'u v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: endpoints must be integers") from None
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(
                f"{path}: line {lineno}: edge ({u}, {v}) out of range for n={n}"
            )
        edges.append((u, v))
    return Digraph(n, edges)


def write_edge_list(g: Digraph, path: str | Path) -> None:
    e = g.edges()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v in e:
            fh.write(f"{u} {v}\n")
