"""Instance generators: the two worked figures, cycles and random corpora."""

from __future__ import annotations

import random

from .errors import ParameterError
from .graph import MultiGraph


def gen_cycle(n: int, copies: int = 1) -> MultiGraph:
    if n < 3:
        raise ParameterError("a cycle needs n >= 3")
    edges = []
    for i in range(n):
        edges.extend([(i, (i + 1) % n)] * copies)
    return MultiGraph(n, tuple(edges))


def fig1_second_cycle(n: int) -> list[int]:
    """Vertex order of the second Hamiltonian cycle, 0-based (vertex ``v_i`` is ``i - 1``).

    Starts at v1 and alternately takes the next unused vertex clockwise and
    counterclockwise, ending at v_{n/2+1}.
    """
    order = [0]
    cw, ccw = 1, n - 1
    take_cw = True
    while len(order) < n:
        if take_cw:
            order.append(cw)
            cw += 1
        else:
            order.append(ccw)
            ccw -= 1
        take_cw = not take_cw
    return order


def gen_fig1(n: int, k: int | None = None) -> MultiGraph:
    """Heavy Hamiltonian cycle (k copies per edge) plus one copy of the zig-zag cycle.

    ``k`` defaults to ``30 * n``.
    """
    if n < 6 or n % 2:
        raise ParameterError("fig1 needs an even n >= 6")
    if k is None:
        k = 30 * n
    if k < 1:
        raise ParameterError("fig1 needs k >= 1")
    edges = []
    for i in range(n):
        edges.extend([(i, (i + 1) % n)] * k)
    order = fig1_second_cycle(n)
    for a, b in zip(order, order[1:] + order[:1]):
        edges.append((a, b))
    return MultiGraph(n, tuple(edges))


def fig1_tree_edges(G: MultiGraph) -> list[int]:
    """Edge ids of the zig-zag cycle minus its closing edge (a Hamiltonian path)."""
    n = G.n
    k = (G.m - n) // n
    return list(range(n * k, n * k + n - 1))


def gen_fig2() -> MultiGraph:
    """The 16-vertex example with minimum cut 7 (figure vertex ``i`` is index ``i - 1``)."""
    pairs = []
    for i in range(1, 15):
        j = i % 14 + 1
        pairs.extend([(i, j)] * 3)
    pairs.extend((i, 15) for i in range(1, 7))
    pairs.extend((i, 16) for i in range(9, 15))
    pairs.append((15, 16))
    pairs.append((6, 8))
    pairs.append((7, 9))
    return MultiGraph(16, tuple((u - 1, v - 1) for u, v in pairs))


def gen_random_kec(n: int, c: int, seed: int) -> MultiGraph:
    """Union of ``c`` independently shuffled Hamiltonian cycles (at least 2c-edge-connected)."""
    if n < 4 or c < 1:
        raise ParameterError("random-kec needs n >= 4 and c >= 1")
    rng = random.Random(seed)
    edges = []
    for _ in range(c):
        perm = list(range(n))
        rng.shuffle(perm)
        for i in range(n):
            edges.append((perm[i], perm[(i + 1) % n]))
    return MultiGraph(n, tuple(edges))


def gen_heavy_cycle(n: int, k: int, c: int, seed: int) -> MultiGraph:
    """Hamiltonian cycle with ``k`` copies per edge plus ``c`` random single-copy Hamiltonian cycles.

    Every arc of the heavy cycle has boundary ``2k`` plus the number of light
    edges leaving it, so for suitable ``k`` some arcs are near-minimum and
    others are not.
    """
    if n < 4 or k < 1 or c < 0:
        raise ParameterError("heavy-cycle needs n >= 4, k >= 1 and c >= 0")
    rng = random.Random(seed)
    edges = []
    for i in range(n):
        edges.extend([(i, (i + 1) % n)] * k)
    for _ in range(c):
        perm = list(range(n))
        rng.shuffle(perm)
        for i in range(n):
            edges.append((perm[i], perm[(i + 1) % n]))
    return MultiGraph(n, tuple(edges))
