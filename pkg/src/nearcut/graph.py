"""Multigraphs, cut boundaries, global minimum cut and near-minimum-cut enumeration.

Vertex sets are plain ``int`` bitmasks: bit ``v`` is set iff vertex ``v`` is a
member.  Cut shores are canonicalized so that they never contain vertex 0.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidShoreError, ParameterError

MAX_ETA = Fraction(1, 5)


def mask_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def members(mask: int) -> list[int]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def parse_eta(value) -> Fraction:
    """Parse ``"p/q"``, an int, a Fraction or a decimal string into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**6)
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"cannot parse eta from {value!r}") from exc


def check_eta(eta) -> Fraction:
    eta = parse_eta(eta)
    if not (0 < eta <= MAX_ETA):
        raise ParameterError(f"eta must lie in (0, 1/5], got {eta}")
    return eta


@dataclass(frozen=True)
class MultiGraph:
    """Undirected loopless connected multigraph on vertices ``0..n-1``.

    ``edges[i]`` is the endpoint pair of the edge with id ``i``; parallel
    copies are separate entries.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = tuple((min(u, v), max(u, v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.n < 2:
            raise ParameterError("a graph needs at least two vertices")
        for u, v in edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ParameterError(f"edge ({u}, {v}) has an endpoint outside 0..{self.n - 1}")
            if u == v:
                raise ParameterError(f"self-loop at vertex {u}")
        if not self.is_connected():
            raise ParameterError("graph is disconnected (minimum cut would be 0)")

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for eid, (u, v) in enumerate(self.edges):
            adj[u].append((eid, v))
            adj[v].append((eid, u))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def support(self) -> dict[tuple[int, int], list[int]]:
        """Map each distinct endpoint pair to the ids of its parallel copies."""
        sup: dict[tuple[int, int], list[int]] = {}
        for eid, uv in enumerate(self.edges):
            sup.setdefault(uv, []).append(eid)
        return dict(sorted(sup.items()))

    @cached_property
    def support_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        pairs = list(self.support)
        us = np.array([u for u, _ in pairs], dtype=np.int64)
        vs = np.array([v for _, v in pairs], dtype=np.int64)
        ws = np.array([len(ids) for ids in self.support.values()], dtype=np.int64)
        return us, vs, ws

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n


@dataclass(frozen=True)
class CutRecord:
    """One near-minimum cut: its canonical shore and cached boundary size."""

    shore: int
    boundary: int
    eta: Fraction = field(compare=False)
    k: int = field(compare=False)

    @property
    def is_eta_nmc(self) -> bool:
        return self.boundary < (1 + self.eta) * self.k

    def vertices(self) -> list[int]:
        return members(self.shore)


def _check_shore(G: MultiGraph, S: int) -> None:
    if S <= 0 or S & G.full == G.full or S >> G.n:
        raise InvalidShoreError("shore must be a nonempty proper subset of the vertices")


def canonical(G: MultiGraph, S: int) -> int:
    """Return whichever of ``S`` and its complement avoids vertex 0."""
    return G.full ^ S if S & 1 else S


def boundary_edges(G: MultiGraph, S: int) -> list[int]:
    _check_shore(G, S)
    return [eid for eid, (u, v) in enumerate(G.edges) if ((S >> u) ^ (S >> v)) & 1]


def boundary_size(G: MultiGraph, S: int) -> int:
    """Number of edges, with multiplicity, having exactly one endpoint in ``S``."""
    _check_shore(G, S)
    total = 0
    for (u, v), ids in G.support.items():
        if ((S >> u) ^ (S >> v)) & 1:
            total += len(ids)
    return total


def boundary_sizes(G: MultiGraph, masks: np.ndarray) -> np.ndarray:
    """Vectorized boundary sizes for an array of vertex masks (n <= 62)."""
    us, vs, ws = G.support_arrays
    masks = np.asarray(masks, dtype=np.int64)
    out = np.zeros(masks.shape, dtype=np.int64)
    for u, v, w in zip(us, vs, ws):
        out += w * (((masks >> u) ^ (masks >> v)) & 1)
    return out


def min_cut_value(G: MultiGraph) -> int:
    """Global minimum cut by Stoer-Wagner node merging on the support weights."""
    n = G.n
    w = [[0] * n for _ in range(n)]
    for (u, v), ids in G.support.items():
        w[u][v] += len(ids)
        w[v][u] += len(ids)
    alive = list(range(n))
    best = None
    while len(alive) > 1:
        added = [alive[0]]
        conn = {v: w[alive[0]][v] for v in alive[1:]}
        prev = alive[0]
        last = alive[0]
        while conn:
            nxt = max(conn, key=lambda v: (conn[v], -v))
            cut_of_phase = conn.pop(nxt)
            prev, last = last, nxt
            added.append(nxt)
            for v in conn:
                conn[v] += w[nxt][v]
        if best is None or cut_of_phase < best:
            best = cut_of_phase
        # merge last into prev
        for v in alive:
            if v != last and v != prev:
                w[prev][v] += w[last][v]
                w[v][prev] = w[prev][v]
        alive.remove(last)
    return best


def brute_force_min_cut(G: MultiGraph) -> int:
    if G.n > 24:
        raise ParameterError("brute-force minimum cut limited to n <= 24")
    masks = np.arange(1, 1 << (G.n - 1), dtype=np.int64) << 1
    return int(boundary_sizes(G, masks).min())


def _nmc_threshold(k: int, eta: Fraction) -> Fraction:
    return (1 + eta) * k


def _sort_key(mask: int) -> tuple[int, ...]:
    return tuple(members(mask))


def brute_force_near_min_cuts(G: MultiGraph, eta, k: int | None = None) -> list[CutRecord]:
    """Exhaustive enumeration over all canonical shores."""
    eta = parse_eta(eta)
    if G.n > 24:
        raise ParameterError("brute-force enumeration limited to n <= 24")
    masks = np.arange(1, 1 << (G.n - 1), dtype=np.int64) << 1
    sizes = boundary_sizes(G, masks)
    if k is None:
        k = int(sizes.min())
    thr = _nmc_threshold(k, eta)
    # strict: size < thr  <=>  size * den < thr_num
    keep = sizes * thr.denominator < thr.numerator
    records = [CutRecord(int(s), int(b), eta, k) for s, b in zip(masks[keep], sizes[keep])]
    records.sort(key=lambda r: _sort_key(r.shore))
    return records


def _contraction_candidates(G: MultiGraph, rng: random.Random, trials: int, keep: int) -> set[int]:
    """Random contractions down to ``keep`` super-vertices; every bipartition is a candidate."""
    found: set[int] = set()
    ids = list(range(G.m))
    for _ in range(trials):
        rng.shuffle(ids)
        parent = list(range(G.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        groups = G.n
        for eid in ids:
            if groups <= keep:
                break
            u, v = G.edges[eid]
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                groups -= 1
        blocks: dict[int, int] = {}
        for v in range(G.n):
            r = find(v)
            blocks[r] = blocks.get(r, 0) | (1 << v)
        parts = list(blocks.values())
        for sel in range(1, 1 << (len(parts) - 1)):
            S = 0
            for b, part in enumerate(parts[:-1]):
                if sel >> b & 1:
                    S |= part
            found.add(canonical(G, S))
    return found


def contraction_near_min_cuts(
    G: MultiGraph, eta, k: int | None = None, seed: int = 0, batch: int | None = None
) -> list[CutRecord]:
    """Randomized enumeration, repeated until the collected set is stable for 3 batches."""
    eta = parse_eta(eta)
    if k is None:
        k = min_cut_value(G)
    thr = _nmc_threshold(k, eta)
    rng = random.Random(seed)
    batch = batch or max(50, 2 * G.n * G.n)
    collected: dict[int, int] = {}
    stable = 0
    while stable < 3:
        before = len(collected)
        for S in _contraction_candidates(G, rng, batch, keep=min(6, G.n)):
            if S in collected:
                continue
            b = boundary_size(G, S)
            if b < thr:
                collected[S] = b
        stable = stable + 1 if len(collected) == before else 0
    records = [CutRecord(S, b, eta, k) for S, b in collected.items()]
    records.sort(key=lambda r: _sort_key(r.shore))
    return records


def enumerate_near_min_cuts(
    G: MultiGraph, eta, *, max_bruteforce_n: int = 20, seed: int = 0
) -> list[CutRecord]:
    """All canonical shores ``S`` with ``|delta(S)| < (1 + eta) k``, each listed once."""
    eta = check_eta(eta)
    k = min_cut_value(G)
    if G.n <= max_bruteforce_n:
        return brute_force_near_min_cuts(G, eta, k)
    return contraction_near_min_cuts(G, eta, k, seed=seed)


def induced_cut_size(G: MultiGraph, P: int, within: int) -> int:
    """Edges of ``G[within]`` with exactly one endpoint in ``P`` (P is a subset of ``within``)."""
    total = 0
    for (u, v), ids in G.support.items():
        if (within >> u) & 1 and (within >> v) & 1 and ((P >> u) ^ (P >> v)) & 1:
            total += len(ids)
    return total


def graph_from_pairs(n: int, pairs: Sequence[tuple[int, int]]) -> MultiGraph:
    return MultiGraph(n, tuple(pairs))
