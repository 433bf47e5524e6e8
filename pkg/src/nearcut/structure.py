"""Crossing relation, cross-graph components, atoms and polygon representations.

The polygon is kept purely combinatorial: a circular order of the outside
atoms, the set of inside atoms with their side on every cut, and the interval
``(l, r)`` of outside atoms ``a_l .. a_{r-1}`` that each cut covers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .errors import BudgetError, ParameterError, RepresentationError
from .graph import CutRecord, members


def crossing(A: int, B: int, n: int) -> bool:
    """True iff ``A&B``, ``A-B``, ``B-A`` and the complement of ``A|B`` are all nonempty."""
    full = (1 << n) - 1
    return bool(A & B) and bool(A & ~B) and bool(B & ~A) and bool(full & ~(A | B))


def intervals_cross(a: tuple[int, int], b: tuple[int, int]) -> bool:
    (l1, r1), (l2, r2) = a, b
    return l1 < l2 < r1 < r2 or l2 < l1 < r2 < r1


def refine_atoms(shores: Sequence[int], n: int) -> list[int]:
    """Coarsest partition of ``0..n-1`` that every shore is a union of, sorted by least vertex."""
    blocks = [(1 << n) - 1]
    for S in shores:
        nxt = []
        for b in blocks:
            inside, outside = b & S, b & ~S
            if inside:
                nxt.append(inside)
            if outside:
                nxt.append(outside)
        blocks = nxt
    return sorted(blocks, key=lambda b: (b & -b))


@dataclass(frozen=True)
class CrossComponent:
    """A connected component of the cross graph.

    ``cuts`` are indices into the enumerated cut list, ``shores`` the matching
    canonical shores, ``edges`` the crossing pairs by position in ``cuts``.
    """

    n: int
    cuts: tuple[int, ...]
    shores: tuple[int, ...]
    atoms: tuple[int, ...]
    edges: tuple[tuple[int, int], ...] = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.cuts)

    def atom_mask(self, S: int) -> int:
        """Express a union of atoms as a bitmask over atom indices."""
        out = 0
        for i, a in enumerate(self.atoms):
            if S & a:
                out |= 1 << i
        return out


def components(cuts: Sequence[CutRecord], n: int) -> list[CrossComponent]:
    """Partition ``cuts`` into cross-graph components, ordered by their first cut."""
    shores = [c.shore for c in cuts]
    parent = list(range(len(shores)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pairs = []
    for i, j in combinations(range(len(shores)), 2):
        if crossing(shores[i], shores[j], n):
            pairs.append((i, j))
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(len(shores)):
        groups.setdefault(find(i), []).append(i)
    out = []
    for idx in sorted(groups.values(), key=lambda g: g[0]):
        pos = {c: p for p, c in enumerate(idx)}
        local = tuple((pos[i], pos[j]) for i, j in pairs if i in pos and j in pos)
        comp_shores = tuple(shores[i] for i in idx)
        out.append(CrossComponent(n, tuple(idx), comp_shores, tuple(refine_atoms(comp_shores, n)), local))
    return out


def atoms(component: CrossComponent) -> list[int]:
    if not component.shores:
        raise ParameterError("empty component")
    return refine_atoms(component.shores, component.n)


@dataclass(frozen=True)
class PolygonRep:
    """Combinatorial polygon representation of one crossing component.

    ``outside[t]`` is the atom index of ``a_t``; ``a_0`` is the root.
    ``oriented[c]`` is the shore of cut ``c`` that avoids the root atom.
    """

    n: int
    atoms: tuple[int, ...]
    outside: tuple[int, ...]
    inside: tuple[int, ...]
    oriented: tuple[int, ...]
    interval_of: dict[int, tuple[int, int]]
    membership: dict[int, tuple[bool, ...]]

    @property
    def m(self) -> int:
        return len(self.outside)

    @property
    def root(self) -> int:
        return self.atoms[self.outside[0]]

    def interval_atoms(self, l: int, r: int) -> int:
        """Vertex mask of the outside atoms ``a_l .. a_{r-1}``."""
        out = 0
        for t in range(l, r):
            out |= self.atoms[self.outside[t]]
        return out

    def outside_interval(self, S: int) -> tuple[int, int] | None:
        """The interval formed by the outside atoms of ``S``, or None if they are not one."""
        pos = [t for t, a in enumerate(self.outside) if self.atoms[a] & S]
        if not pos or pos[0] == 0 or pos[-1] - pos[0] + 1 != len(pos):
            return None
        return pos[0], pos[-1] + 1


def _consecutive_order(items: list[int], sets: list[int], budget: int) -> list[int] | None:
    """Linear order of ``items`` in which every mask in ``sets`` is contiguous (backtracking)."""
    sizes = [bin(s).count("1") for s in sets]
    order: list[int] = []
    placed_count = [0] * len(sets)
    nodes = 0

    def rec(unplaced: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetError("consecutive-order search budget exceeded")
        if not unplaced:
            return True
        allowed = unplaced
        for s, c, sz in zip(sets, placed_count, sizes):
            if 0 < c < sz:
                allowed &= s
        for x in items:
            if not (allowed >> x) & 1:
                continue
            touched = [i for i, s in enumerate(sets) if (s >> x) & 1]
            for i in touched:
                placed_count[i] += 1
            order.append(x)
            if rec(unplaced & ~(1 << x)):
                return True
            order.pop()
            for i in touched:
                placed_count[i] -= 1
        return False

    start = 0
    for x in items:
        start |= 1 << x
    return list(order) if rec(start) else None


def _restricted_ok(cut_masks: list[int], keep: int, pairs_cross: set[tuple[int, int]]) -> bool:
    restricted = [c & keep for c in cut_masks]
    if any(r == 0 for r in restricted):
        return False
    if len(set(restricted)) != len(restricted):
        return False
    for i, j in combinations(range(len(restricted)), 2):
        a, b = restricted[i], restricted[j]
        cross = bool(a & b) and bool(a & ~b) and bool(b & ~a)
        if cross != ((i, j) in pairs_cross):
            return False
    return True


def _try_outside(component, raw, keep, pairs_cross, budget):
    """Root atom and linear order of the non-root atoms of ``keep``, or None."""
    A = len(component.atoms)
    all_atoms = (1 << A) - 1
    root = (keep & -keep).bit_length() - 1
    oriented = [all_atoms ^ c if (c >> root) & 1 else c for c in raw]
    if not _restricted_ok(oriented, keep, pairs_cross):
        return None
    items = [a for a in range(A) if (keep >> a) & 1 and a != root]
    order = _consecutive_order(items, [c & keep for c in oriented], budget)
    if order is None:
        return None
    if order[-1] < order[0]:
        order.reverse()
    return root, order, oriented


def atom_unions_below(G, atom_list: Sequence[int], bound_num: int, bound_den: int, k: int) -> list[int]:
    """Atom-index masks of every union of atoms ``S`` (avoiding atom 0) with ``|delta(S)| * den < num * k``."""
    import numpy as np

    from .graph import boundary_sizes

    A = len(atom_list)
    if A > 22:
        raise BudgetError("too many atoms for exhaustive union enumeration")
    arr = np.array(atom_list[1:], dtype=np.int64)
    codes = np.arange(1, 1 << (A - 1), dtype=np.int64)
    masks = np.zeros(codes.shape, dtype=np.int64)
    for i in range(A - 1):
        masks |= np.where((codes >> i) & 1, arr[i], 0)
    sizes = boundary_sizes(G, masks)
    keep = sizes * bound_den < bound_num * k
    return [int(c) << 1 for c in codes[keep]]


def _outside_parts_distinct(unions: Sequence[int], keep: int, all_atoms: int) -> bool:
    root = (keep & -keep).bit_length() - 1
    seen = set()
    for c in unions:
        if (c >> root) & 1:
            c = all_atoms ^ c
        part = c & keep
        if not part:
            continue
        if part in seen:
            return False
        seen.add(part)
    return True


def build_polygon(
    component: CrossComponent, G=None, *, k: int | None = None, budget: int = 200_000
) -> PolygonRep:
    """Polygon representation of a component with at least two cuts.

    Finds a largest set of atoms admitting a circular order in which every cut
    is an arc.  When the graph ``G`` is supplied, atoms are then moved inside
    one at a time (highest atom index first) as long as the representation
    stays valid and no two unions of atoms with boundary below ``6k/5`` end up
    with the same outside atoms; such atoms never bound a cut of their own.
    """
    if len(component) < 2:
        raise ParameterError("polygon construction needs a component with at least two cuts")
    n = component.n
    A = len(component.atoms)
    all_atoms = (1 << A) - 1
    raw = [component.atom_mask(S) for S in component.shores]
    pairs_cross = {
        (i, j) for i, j in combinations(range(len(raw)), 2) if crossing(component.shores[i], component.shores[j], n)
    }
    found = None
    for drop in range(0, A - 2):
        for removed in combinations(range(A), drop):
            keep = all_atoms
            for a in removed:
                keep &= ~(1 << a)
            got = _try_outside(component, raw, keep, pairs_cross, budget)
            if got is not None:
                found = keep, got
                break
        if found:
            break
    if found is None:
        raise RepresentationError("no circular order with at least three outside atoms exists")
    keep, got = found
    if G is not None:
        if k is None:
            from .graph import min_cut_value

            k = min_cut_value(G)
        unions = atom_unions_below(G, component.atoms, 6, 5, k)
        changed = True
        while changed:
            changed = False
            for a in reversed(range(A)):
                trial = keep & ~(1 << a)
                if not (keep >> a) & 1 or bin(trial).count("1") < 3:
                    continue
                if not _outside_parts_distinct(unions, trial, all_atoms):
                    continue
                alt = _try_outside(component, raw, trial, pairs_cross, budget)
                if alt is not None:
                    keep, got, changed = trial, alt, True
    root, order, oriented = got
    removed = [a for a in range(A) if not (keep >> a) & 1]
    return _assemble(component, root, order, removed, oriented)


def _assemble(component, root, order, removed, oriented_atoms) -> PolygonRep:
    atom_list = component.atoms
    outside = (root, *order)
    pos = {a: t for t, a in enumerate(outside)}
    oriented = []
    interval_of = {}
    for c, am in enumerate(oriented_atoms):
        S = 0
        for a in range(len(atom_list)):
            if (am >> a) & 1:
                S |= atom_list[a]
        oriented.append(S)
        ts = sorted(pos[a] for a in pos if (am >> a) & 1)
        interval_of[c] = (ts[0], ts[-1] + 1)
    inside = tuple(sorted(removed))
    membership = {a: tuple(bool((am >> a) & 1) for am in oriented_atoms) for a in inside}
    return PolygonRep(component.n, tuple(atom_list), outside, inside, tuple(oriented), interval_of, membership)


@dataclass
class PolygonReport:
    ok: bool
    failures: list[tuple[str, str]]

    @property
    def first(self) -> tuple[str, str] | None:
        return self.failures[0] if self.failures else None

    def failed(self, check: str) -> bool:
        return any(c == check for c, _ in self.failures)


def verify_polygon(P: PolygonRep, component: CrossComponent) -> PolygonReport:
    """Check a polygon against its component.

    Checks: (a) cuts map to distinct proper intervals matching their outside
    atoms, (b) cuts cross iff intervals cross, (c) atoms partition V and every
    cut is a union of atoms, (d) the root atom avoids every oriented shore.
    """
    fails: list[tuple[str, str]] = []
    n, m = P.n, P.m
    full = (1 << n) - 1
    seen: dict[tuple[int, int], int] = {}
    for c in range(len(component)):
        iv = P.interval_of.get(c)
        if iv is None:
            fails.append(("a", f"cut {c} has no interval"))
            continue
        l, r = iv
        if not (1 <= l < r <= m):
            fails.append(("a", f"cut {c} interval {iv} is not proper"))
        if iv in seen:
            fails.append(("a", f"cuts {seen[iv]} and {c} share interval {iv}"))
        seen.setdefault(iv, c)
        S = P.oriented[c]
        if S != component.shores[c] and S != full ^ component.shores[c]:
            fails.append(("a", f"cut {c} oriented shore is not a side of the cut"))
        if 1 <= l < r <= m and P.outside_interval(S) != iv:
            fails.append(("a", f"cut {c} outside atoms disagree with interval {iv}"))
    for i, j in combinations(range(len(component)), 2):
        if i not in P.interval_of or j not in P.interval_of:
            continue
        a = crossing(component.shores[i], component.shores[j], n)
        b = intervals_cross(P.interval_of[i], P.interval_of[j])
        if a != b:
            fails.append(("b", f"cuts {i},{j}: cross={a} but intervals {P.interval_of[i]},{P.interval_of[j]} cross={b}"))
    cover = 0
    for a in P.atoms:
        if cover & a:
            fails.append(("c", "atoms overlap"))
        cover |= a
        for S in component.shores:
            if a & S and a & ~S:
                fails.append(("c", f"atom {members(a)} is split by a cut"))
                break
    if cover != full:
        fails.append(("c", "atoms do not cover V"))
    if sorted((*P.outside, *P.inside)) != list(range(len(P.atoms))):
        fails.append(("c", "outside and inside atoms do not partition the atom set"))
    for c, S in enumerate(P.oriented):
        if S & P.root:
            fails.append(("d", f"root atom lies in oriented shore of cut {c}"))
    return PolygonReport(not fails, fails)


@dataclass
class CycleSearch:
    status: str  # "found", "none" or "inconclusive"
    cycle: list[int] | None = None

    @property
    def length(self) -> int | None:
        return len(self.cycle) if self.cycle else None


def _is_k_cycle(sets: Sequence[int], n: int) -> bool:
    k = len(sets)
    if k < 3:
        return False
    full = (1 << n) - 1
    for i in range(k):
        if not crossing(sets[i], sets[(i + 1) % k], n):
            return False
        for j in range(k):
            if j not in ((i - 1) % k, i, (i + 1) % k) and sets[i] & sets[j]:
                return False
    union = 0
    for s in sets:
        union |= s
    if union == full:
        return False
    if k == 3:
        for i in range(3):
            if (sets[i] & sets[(i + 1) % 3]) & ~sets[(i - 1) % 3] == 0:
                return False
    return True


def find_short_k_cycle(
    component_or_sets, max_len: int, n: int | None = None, *, budget: int = 500_000
) -> CycleSearch:
    """Search for a k-cycle of length at most ``max_len`` among the cuts (either shore of each)."""
    if max_len > 12:
        raise ParameterError("k-cycle search is bounded to max_len <= 12")
    if isinstance(component_or_sets, CrossComponent):
        n = component_or_sets.n
        full = (1 << n) - 1
        sets = sorted({s for S in component_or_sets.shores for s in (S, full ^ S)})
    else:
        if n is None:
            raise ParameterError("n is required when passing raw sets")
        sets = list(component_or_sets)
    N = len(sets)
    full = (1 << n) - 1
    cross_bits = [sum(1 << j for j in range(N) if crossing(sets[i], sets[j], n)) for i in range(N)]
    disj_bits = [sum(1 << j for j in range(N) if not sets[i] & sets[j]) for i in range(N)]
    avoid_bits = [sum(1 << j for j in range(N) if not sets[j] >> v & 1) for v in range(n)]
    nodes = 0
    path: list[int] = []

    def bits(mask: int):
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def can_close(last: int, allowed: int, steps: int) -> bool:
        # some chain of at most `steps` allowed sets leads from `last` to a set crossing the start
        first = path[0]
        closers = cross_bits[first] & allowed
        middle = allowed & disj_bits[first]
        frontier = cross_bits[last] & allowed
        seen = frontier
        for _ in range(steps - 1):
            if frontier & closers:
                return True
            nxt = 0
            for y in bits(frontier & middle):
                nxt |= cross_bits[y]
            frontier = nxt & allowed & ~seen
            if not frontier:
                return False
            seen |= frontier
        return bool(frontier & closers)

    def rec(union: int, allowed: int) -> list[int] | None:
        # allowed: later-indexed sets not on the path and disjoint from every interior path set
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetError
        t = len(path)
        first, last = path[0], path[-1]
        for x in bits(cross_bits[last] & allowed):
            if union | sets[x] == full:
                continue
            if t >= 2 and cross_bits[first] >> x & 1:
                cand = [*path, x]
                if _is_k_cycle([sets[i] for i in cand], n):
                    return cand
                continue
            if t >= 2 and sets[x] & sets[first]:
                continue
            if t + 1 >= max_len:
                continue
            nxt = allowed & ~(1 << x)
            if t >= 2:
                nxt &= disj_bits[last]
            grown = union | sets[x]
            # the finished cycle leaves some vertex uncovered, so the rest of it avoids that vertex
            steps = max_len - t - 1
            if not any(can_close(x, nxt & avoid_bits[v], steps) for v in bits(full & ~grown)):
                continue
            path.append(x)
            got = rec(grown, nxt)
            if got:
                return got
            path.pop()
        return None

    try:
        for s in range(N):
            path[:] = [s]
            above = ((1 << N) - 1) & ~((1 << (s + 1)) - 1)
            got = rec(sets[s], above)
            if got:
                return CycleSearch("found", [sets[i] for i in got])
    except BudgetError:
        return CycleSearch("inconclusive")
    return CycleSearch("none")
