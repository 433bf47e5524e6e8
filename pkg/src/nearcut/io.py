"""Plain-text graph format.

Line 1 is ``n m``; then ``m`` lines ``u v`` with ``0 <= u < v < n``.  Repeated
lines are parallel edges and ``#`` lines are comments.  Edge id is the
zero-based position among the edge lines.
"""

from __future__ import annotations

from pathlib import Path

from .errors import GraphFormatError, ParameterError
from .graph import MultiGraph


def parse_graph(text: str) -> MultiGraph:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected two integers, got {raw!r}")
        try:
            rows.append((int(parts[0]), int(parts[1]), lineno))
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: non-integer token in {raw!r}") from exc
    if not rows:
        raise GraphFormatError("missing header line 'n m'")
    n, m, _ = rows[0]
    edges = rows[1:]
    if len(edges) != m:
        raise GraphFormatError(f"header announces {m} edges but {len(edges)} were given")
    for u, v, lineno in edges:
        if not (0 <= u < v < n):
            raise GraphFormatError(f"line {lineno}: need 0 <= u < v < n, got {u} {v}")
    try:
        return MultiGraph(n, tuple((u, v) for u, v, _ in edges))
    except ParameterError as exc:
        raise GraphFormatError(str(exc)) from exc


def format_graph(G: MultiGraph) -> str:
    lines = [f"{G.n} {G.m}"]
    lines.extend(f"{u} {v}" for u, v in G.edges)
    return "\n".join(lines) + "\n"


def read_graph(path) -> MultiGraph:
    return parse_graph(Path(path).read_text())


def write_graph(G: MultiGraph, path) -> None:
    Path(path).write_text(format_graph(G))
