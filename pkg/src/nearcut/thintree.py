"""Fractional spanning-tree points, crossing bounds, LP iterative rounding and tree checks.

The LP lives on support pairs: parallel copies of an edge collapse into one
variable because a spanning tree uses at most one copy of each pair and the
crossing counts only see which pairs are used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Sequence

import networkx as nx
import numpy as np
from scipy.optimize import linprog

from .errors import BudgetError, IntegrityError, ParameterError, RoundingError, StructuralError
from .graph import MultiGraph, boundary_edges, members, popcount

TOL = 1e-9


@dataclass(frozen=True)
class FractionalPoint:
    """Edge-id indexed vector of exact rationals."""

    x: tuple[Fraction, ...]

    def total(self) -> Fraction:
        return sum(self.x, Fraction(0))

    def on(self, eids: Sequence[int]) -> Fraction:
        return sum((self.x[e] for e in eids), Fraction(0))


def fractional_point(G: MultiGraph, k: int, scale) -> FractionalPoint:
    """The constant point ``x_e = scale`` where ``scale`` is ``2/k`` or ``3/k``."""
    scale = Fraction(scale)
    if scale not in (Fraction(2, k), Fraction(3, k)):
        raise ParameterError("scale must be 2/k or 3/k")
    return FractionalPoint(tuple(scale for _ in range(G.m)))


def crossing_bound(G: MultiGraph, S: int, k: int) -> int:
    """``ceil(2 |delta(S)| / k)``."""
    d = len(boundary_edges(G, S))
    return -((-2 * d) // k)


def bounds(G: MultiGraph, sets: Sequence[int], k: int) -> list[int]:
    return [crossing_bound(G, S, k) for S in sets]


def point_within_bounds(G: MultiGraph, x: FractionalPoint, sets: Sequence[int], b: Sequence[int]) -> bool:
    return all(x.on(boundary_edges(G, S)) <= bS for S, bS in zip(sets, b))


# ---------------------------------------------------------------- partitions


def _local_cut_weights(x: FractionalPoint, S: int, G: MultiGraph) -> tuple[list[int], int, int]:
    """Integer weights ``c[P]`` of ``x(delta_{G[S]}(P))`` for all subsets ``P`` of ``S``, scaled by ``D``."""
    verts = members(S)
    local = {v: i for i, v in enumerate(verts)}
    s = len(verts)
    inner = [(local[u], local[v], x.x[e]) for e, (u, v) in enumerate(G.edges) if u in local and v in local]
    D = reduce(math.lcm, (w.denominator for _, _, w in inner), 1)
    subsets = np.arange(1 << s, dtype=np.int64)
    c = np.zeros(1 << s, dtype=object)
    for u, v, w in inner:
        c = c + (((subsets >> u) ^ (subsets >> v)) & 1).astype(object) * int(w * D)
    return [int(t) for t in c], D, s


def min_partition_slack(x: FractionalPoint, S: int, G: MultiGraph, max_size: int = 12) -> Fraction | None:
    """Minimum over partitions of ``S`` into at least two parts of ``sum_P x(delta_{G[S]}(P)) - 2(|Pi| - 1)``.

    Exact subset dynamic program over all partitions; None when ``|S| < 2``.
    """
    if popcount(S) > max_size:
        raise BudgetError(f"partition check limited to |S| <= {max_size}")
    if popcount(S) < 2:
        return None
    c, D, s = _local_cut_weights(x, S, G)
    full = (1 << s) - 1
    h = [cv - 2 * D for cv in c]
    f = [0] * (1 << s)
    for U in range(1, full + 1):
        low = U & -U
        rest = U ^ low
        best = h[U]
        sub = rest
        while sub:
            sub = (sub - 1) & rest
            # block holding the lowest vertex is ``sub | low``; sub = rest was the whole of U
            B = sub | low
            val = h[B] + f[U ^ B]
            if val < best:
                best = val
        f[U] = best
    low = 1
    rest = full ^ low
    best = None
    sub = rest
    while True:
        B = sub | low
        if B != full:
            val = h[B] + f[full ^ B]
            if best is None or val < best:
                best = val
        if sub == 0:
            break
        sub = (sub - 1) & rest
    return Fraction(best + 2 * D, D)


def check_partition_inequalities(x: FractionalPoint, S: int, G: MultiGraph, max_size: int = 12) -> bool:
    """True iff every partition of ``S`` into ``p >= 2`` parts has ``sum_P x(delta_{G[S]}(P)) >= 2(p - 1)``."""
    slack = min_partition_slack(x, S, G, max_size)
    return slack is None or slack >= 0


def set_partitions(items: Sequence[int]):
    """All set partitions of ``items`` (restricted-growth order)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first], *part]
        for i in range(len(part)):
            yield [*part[:i], [first, *part[i]], *part[i + 1 :]]


@lru_cache(maxsize=None)
def _partition_labels(s: int) -> np.ndarray:
    """One row per set partition of ``range(s)``: the block index of each element."""
    rows = []
    for part in set_partitions(range(s)):
        row = [0] * s
        for bi, blk in enumerate(part):
            for v in blk:
                row[v] = bi
        rows.append(row)
    return np.array(rows, dtype=np.int64).reshape(len(rows), s)


def enumerate_partition_slack(x: FractionalPoint, S: int, G: MultiGraph, max_size: int = 9) -> Fraction | None:
    """Same quantity as :func:`min_partition_slack`, by listing every set partition."""
    verts = members(S)
    if len(verts) > max_size:
        raise BudgetError(f"explicit partition listing limited to |S| <= {max_size}")
    if len(verts) < 2:
        return None
    local = {v: i for i, v in enumerate(verts)}
    inner = [(local[u], local[v], x.x[e]) for e, (u, v) in enumerate(G.edges) if u in local and v in local]
    D = reduce(math.lcm, (w.denominator for _, _, w in inner), 1)
    L = _partition_labels(len(verts))
    between = np.zeros(len(L), dtype=np.int64)
    for u, v, w in inner:
        between += (L[:, u] != L[:, v]) * int(w * D)
    parts = L.max(axis=1) + 1
    vals = 2 * between - 2 * D * (parts - 1)
    best = int(vals[parts >= 2].min())
    return Fraction(best, D)


# ---------------------------------------------------------------- LP


@dataclass
class Support:
    """Distinct endpoint pairs of a multigraph with the lowest edge id of each."""

    n: int
    pairs: list[tuple[int, int]]
    rep: list[int]

    @classmethod
    def of(cls, G: MultiGraph) -> "Support":
        pairs = list(G.support)
        return cls(G.n, pairs, [G.support[p][0] for p in pairs])

    def crossing(self, S: int) -> list[int]:
        return [t for t, (u, v) in enumerate(self.pairs) if ((S >> u) ^ (S >> v)) & 1]


def _violated_subtours(n: int, pairs, y, exact: bool) -> list[int]:
    """Vertex masks ``U`` with ``y(E(U)) > |U| - 1``, one per root where found."""
    # minimise sum_{v in U} (1 - d(v)/2) + y(delta(U))/2 over U containing r;
    # U violates its subtour constraint iff the minimum is below 1
    if exact:
        D = reduce(math.lcm, (Fraction(v).denominator for v in y), 1)
        scale = 2 * D
        ys = [int(Fraction(v) * scale) for v in y]
    else:
        scale = 1.0
        ys = [float(v) for v in y]
    deg = [0] * n
    for (u, v), w in zip(pairs, ys):
        deg[u] += w
        deg[v] += w
    half = (lambda q: q // 2) if exact else (lambda q: q / 2)
    wv = [scale - half(d) for d in deg]
    neg = sum(w for w in wv if w < 0)
    found = []
    for r in range(n):
        H = nx.DiGraph()
        H.add_node("s")
        H.add_node("t")
        for v in range(n):
            if wv[v] > 0:
                H.add_edge(v, "t", capacity=wv[v])
            elif wv[v] < 0:
                H.add_edge("s", v, capacity=-wv[v])
        for (u, v), w in zip(pairs, ys):
            if w:
                c = half(w)
                H.add_edge(u, v, capacity=H.get_edge_data(u, v, {"capacity": 0})["capacity"] + c)
                H.add_edge(v, u, capacity=H.get_edge_data(v, u, {"capacity": 0})["capacity"] + c)
        H.add_edge("s", r)  # no capacity attribute: infinite
        value, (side, _) = nx.minimum_cut(H, "s", "t")
        F = value + neg
        if (F < scale) if exact else (F < scale - 1e-7):
            U = 0
            for v in side:
                if v != "s":
                    U |= 1 << v
            if popcount(U) >= 2:
                found.append(U)
    return found


@dataclass
class LPSolution:
    y: list  # per support pair; Fractions when exact
    exact: bool
    rounds: int
    cuts: list[int] = field(default_factory=list)


def _rational_vertex(rows, rhs, senses, lb, ub, yf) -> list[Fraction] | None:
    """Recover the exact vertex from the tight constraints of a floating-point optimum."""
    nvar = len(yf)
    val: list[Fraction | None] = [None] * nvar
    free = []
    for t, v in enumerate(yf):
        if abs(v - lb[t]) < TOL:
            val[t] = Fraction(lb[t])
        elif abs(v - ub[t]) < TOL:
            val[t] = Fraction(ub[t])
        else:
            free.append(t)
    if not free:
        return [Fraction(v) for v in val]  # type: ignore[arg-type]
    pos = {t: i for i, t in enumerate(free)}
    eqs = []
    for row, b, sense in zip(rows, rhs, senses):
        lhs = sum(yf[t] for t in row)
        if sense == "eq" or abs(lhs - b) < 1e-7:
            vec = [Fraction(0)] * (len(free) + 1)
            const = Fraction(b)
            for t in row:
                if t in pos:
                    vec[pos[t]] += 1
                else:
                    const -= val[t]
            vec[-1] = const
            if any(vec[:-1]):
                eqs.append(vec)
    # Gaussian elimination over the rationals
    nf = len(free)
    pivots = []
    r = 0
    for col in range(nf):
        piv = next((i for i in range(r, len(eqs)) if eqs[i][col] != 0), None)
        if piv is None:
            continue
        eqs[r], eqs[piv] = eqs[piv], eqs[r]
        p = eqs[r][col]
        eqs[r] = [a / p for a in eqs[r]]
        for i in range(len(eqs)):
            if i != r and eqs[i][col] != 0:
                f = eqs[i][col]
                eqs[i] = [a - f * b for a, b in zip(eqs[i], eqs[r])]
        pivots.append(col)
        r += 1
        if r == len(eqs):
            break
    if len(pivots) < nf:
        return None
    for i in range(r, len(eqs)):
        if eqs[i][-1] != 0:
            return None
    for i, col in enumerate(pivots):
        val[free[col]] = eqs[i][-1]
    return [Fraction(v) for v in val]  # type: ignore[arg-type]


def solve_fractional(
    G: MultiGraph,
    sets: Sequence[int],
    b: Sequence[int],
    *,
    fixed: Sequence[int] = (),
    removed: Sequence[int] = (),
    support: Support | None = None,
    max_rounds: int = 200,
) -> LPSolution:
    """A vertex of the spanning-tree polytope intersected with ``y(delta(S)) <= b_S``.

    Works on support pairs (see :class:`Support`); ``fixed`` pairs are forced to
    one and ``removed`` pairs to zero.  Subtour constraints are generated on
    demand with a max-flow separation routine.  The vertex is rebuilt in exact
    arithmetic from its tight constraints and re-checked; if that fails the
    floating-point point is returned with ``exact=False``.
    """
    sup = support or Support.of(G)
    n = G.n
    npairs = len(sup.pairs)
    removed_set = set(removed)
    lb = [1.0 if t in set(fixed) else 0.0 for t in range(npairs)]
    ub = [0.0 if t in removed_set else 1.0 for t in range(npairs)]
    fam_rows = [sup.crossing(S) for S in sets]
    sub_rows: list[list[int]] = []
    sub_masks: list[int] = []
    pair_u = [u for u, _ in sup.pairs]
    pair_v = [v for _, v in sup.pairs]

    def inside(U):
        return [t for t in range(npairs) if (U >> pair_u[t]) & 1 and (U >> pair_v[t]) & 1]

    # deterministic tie-breaking objective: prefer low support-pair index
    cost = np.array([1.0 + t * 1e-4 for t in range(npairs)])
    rounds = 0
    while True:
        rounds += 1
        if rounds > max_rounds:
            raise RoundingError("subtour separation did not converge", {"rounds": rounds})
        A_ub = [[1.0 if t in set(row) else 0.0 for t in range(npairs)] for row in fam_rows + sub_rows]
        b_ub = [float(v) for v in b] + [float(popcount(U) - 1) for U in sub_masks]
        res = linprog(
            cost,
            A_ub=np.array(A_ub) if A_ub else None,
            b_ub=np.array(b_ub) if b_ub else None,
            A_eq=np.ones((1, npairs)),
            b_eq=np.array([float(n - 1)]),
            bounds=list(zip(lb, ub)),
            method="highs-ds",
        )
        if res.status != 0:
            raise RoundingError(
                f"LP infeasible or failed: {res.message}",
                {"family_rows": len(fam_rows), "subtours": [members(U) for U in sub_masks], "fixed": list(fixed)},
            )
        yf = list(res.x)
        new = [U for U in _violated_subtours(n, sup.pairs, yf, exact=False) if U not in sub_masks]
        if not new:
            break
        for U in new:
            if U not in sub_masks:
                sub_masks.append(U)
                sub_rows.append(inside(U))
    rows = fam_rows + sub_rows + [list(range(npairs))]
    rhs = list(b) + [popcount(U) - 1 for U in sub_masks] + [n - 1]
    senses = ["le"] * (len(fam_rows) + len(sub_rows)) + ["eq"]
    yq = _rational_vertex(rows, rhs, senses, lb, ub, yf)
    if yq is not None and _exact_feasible(n, sup, yq, fam_rows, b, lb, ub):
        return LPSolution(yq, True, rounds, sub_masks)
    return LPSolution(yf, False, rounds, sub_masks)


def _exact_feasible(n, sup, y, fam_rows, b, lb, ub) -> bool:
    if any(v < Fraction(l) or v > Fraction(u) for v, l, u in zip(y, lb, ub)):
        return False
    if sum(y) != n - 1:
        return False
    for row, bS in zip(fam_rows, b):
        if sum(y[t] for t in row) > bS:
            return False
    return not _violated_subtours(n, sup.pairs, y, exact=True)


# ---------------------------------------------------------------- rounding


@dataclass
class RoundResult:
    """Spanning tree from iterative rounding plus the log of what happened."""

    edges: list[int]
    pairs: list[tuple[int, int]]
    crossings: list[int]
    violation: list[int]
    iterations: int
    dropped: list[int]
    exact_steps: int
    float_steps: int
    rule_relaxed: bool

    @property
    def max_violation(self) -> int:
        return max(self.violation, default=0)


def _is_one(v) -> bool:
    return v == 1 if isinstance(v, Fraction) else abs(v - 1) < TOL


def _is_zero(v) -> bool:
    return v == 0 if isinstance(v, Fraction) else abs(v) < TOL


def iterative_round(G: MultiGraph, sets: Sequence[int], b: Sequence[int], *, slack: int = 3) -> RoundResult:
    """Round an LP vertex to a spanning tree by fixing, deleting and dropping.

    A family constraint is dropped once the fractional support pairs in its
    boundary number at most ``slack`` more than its remaining budget
    ``b_S - (fixed pairs in delta(S))``.  If nothing qualifies the comparison
    against ``b_S`` itself is tried before giving up.
    """
    sup = Support.of(G)
    n = G.n
    fixed: list[int] = []
    removed: set[int] = set()
    active = list(range(len(sets)))
    rows = [set(sup.crossing(S)) for S in sets]
    dropped: list[int] = []
    it = exact_steps = float_steps = 0
    relaxed = False
    while len(fixed) < n - 1:
        it += 1
        if it > 10 * len(sup.pairs) + 10:
            raise RoundingError("iterative rounding exceeded its iteration budget", {"fixed": fixed})
        sol = solve_fractional(
            G, [sets[i] for i in active], [b[i] for i in active], fixed=fixed, removed=sorted(removed), support=sup
        )
        exact_steps += sol.exact
        float_steps += not sol.exact
        changed = False
        for t, v in enumerate(sol.y):
            if t in removed or t in fixed:
                continue
            if _is_zero(v):
                removed.add(t)
                changed = True
            elif _is_one(v):
                fixed.append(t)
                changed = True
        if changed:
            continue
        frac = {t for t, v in enumerate(sol.y) if t not in removed and t not in fixed}
        fixed_set = set(fixed)

        def droppable(i, budget_of):
            return len(rows[i] & frac) <= budget_of(i) + slack

        drop = [i for i in active if droppable(i, lambda i: b[i] - len(rows[i] & fixed_set))]
        if not drop:
            drop = [i for i in active if droppable(i, lambda i: b[i])]
            relaxed = relaxed or bool(drop)
        if not drop:
            raise RoundingError(
                "fractional vertex with nothing to fix, delete or drop",
                {
                    "y": {str(sup.pairs[t]): str(v) for t, v in enumerate(sol.y) if t not in removed},
                    "active": [members(sets[i]) for i in active],
                    "bounds": [b[i] for i in active],
                },
            )
        dropped.extend(drop)
        active = [i for i in active if i not in drop]
    edges = sorted(sup.rep[t] for t in fixed)
    cross = [sum(1 for t in fixed if t in rows[i]) for i in range(len(sets))]
    verify_spanning_tree(G, edges)
    return RoundResult(
        edges,
        [sup.pairs[t] for t in sorted(fixed)],
        cross,
        [c - bS for c, bS in zip(cross, b)],
        it,
        dropped,
        exact_steps,
        float_steps,
        relaxed,
    )


# ---------------------------------------------------------------- verification


def verify_spanning_tree(G: MultiGraph, edges: Sequence[int]) -> None:
    """Raise :class:`StructuralError` unless ``edges`` is a spanning tree of ``G``."""
    if len(edges) != G.n - 1 or len(set(edges)) != len(edges):
        raise StructuralError(f"a spanning tree needs exactly {G.n - 1} distinct edges, got {len(edges)}")
    parent = list(range(G.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        if not 0 <= e < G.m:
            raise StructuralError(f"edge id {e} out of range")
        u, v = G.edges[e]
        ru, rv = find(u), find(v)
        if ru == rv:
            raise StructuralError(f"edge {e} closes a cycle")
        parent[ru] = rv


@dataclass
class TreeReport:
    crossings: list[int]
    threshold: int | None

    @property
    def maximum(self) -> int:
        return max(self.crossings, default=0)

    @property
    def ok(self) -> bool:
        return self.threshold is None or self.maximum <= self.threshold


def tree_crossing(G: MultiGraph, edges: Sequence[int], S: int) -> int:
    return sum(1 for e in edges if ((S >> G.edges[e][0]) ^ (S >> G.edges[e][1])) & 1)


def verify_tree(G: MultiGraph, edges: Sequence[int], cuts: Sequence[int], threshold: int | None = None) -> TreeReport:
    """``|T cap delta(S)|`` for every cut; raises if ``edges`` is not a spanning tree."""
    verify_spanning_tree(G, edges)
    return TreeReport([tree_crossing(G, edges, S) for S in cuts], threshold)


def oracle_best_tree(
    G: MultiGraph, sets: Sequence[int], b: Sequence[int], *, budget: int = 2_000_000
) -> tuple[list[int], int]:
    """Spanning tree of the support graph minimising ``max_S (|T cap delta(S)| - b_S)`` by branch and bound.

    Returns ``(edge ids, optimum)``.  Limited to 12 vertices and 24 support pairs.
    """
    sup = Support.of(G)
    n, E = G.n, len(sup.pairs)
    if n > 12 or E > 24:
        raise BudgetError("oracle tree search limited to 12 vertices and 24 support pairs")
    cross_of = [[i for i, S in enumerate(sets) if ((S >> u) ^ (S >> v)) & 1] for u, v in sup.pairs]
    best = [math.inf, None]
    nodes = 0
    counts = [0] * len(sets)
    chosen: list[int] = []

    def connected_possible(comp, start):
        parent = list(comp)

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        groups = len({find(v) for v in range(n)})
        for t in range(start, E):
            u, v = sup.pairs[t]
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                groups -= 1
        return groups == 1

    def rec(t, comp):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetError("oracle tree search budget exceeded")
        cur = max((c - bb for c, bb in zip(counts, b)), default=-math.inf)
        if cur >= best[0]:
            return
        if len(chosen) == n - 1:
            best[0], best[1] = cur, list(chosen)
            return
        if t == E or not connected_possible(comp, t):
            return
        u, v = sup.pairs[t]
        cu, cv = comp[u], comp[v]
        if cu != cv:
            new = [cu if c == cv else c for c in comp]
            for i in cross_of[t]:
                counts[i] += 1
            chosen.append(t)
            rec(t + 1, new)
            chosen.pop()
            for i in cross_of[t]:
                counts[i] -= 1
        rec(t + 1, comp)

    rec(0, list(range(n)))
    if best[1] is None:
        raise IntegrityError("support graph has no spanning tree")
    opt = best[0] if sets else 0
    return sorted(sup.rep[t] for t in best[1]), int(opt) if opt != -math.inf else 0


# ---------------------------------------------------------------- arithmetic facts


def additive_constant_check(k_range=range(7, 201)) -> list[tuple[int, int]]:
    """Pairs ``(k, d)`` with ``d in [k, 2k]`` violating ``22 ceil(2d/k) <= 66 d / k`` (empty when it holds)."""
    bad = []
    for k in k_range:
        for d in range(k, 2 * k + 1):
            if 22 * -((-2 * d) // k) * k > 66 * d:
                bad.append((k, d))
    return bad


def aligned_constant_check(k_range=range(7, 201)) -> list[tuple[int, int]]:
    """Pairs ``(k, d)`` with ``d <= floor(4k/3)`` violating ``2 (3/k) d + 3 <= 11``."""
    bad = []
    for k in k_range:
        for d in range(0, (4 * k) // 3 + 1):
            if Fraction(6 * d, k) + 3 > 11:
                bad.append((k, d))
    return bad
