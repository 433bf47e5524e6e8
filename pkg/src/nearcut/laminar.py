"""Canonical cuts, special intervals, the alternating laminar recursion and cover extraction.

Intervals are pairs ``(l, r)`` with ``1 <= l < r <= m`` over the outside atoms
of one polygon; ``(l, r)`` stands for the atoms ``a_l .. a_{r-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import CoverError, IntegrityError, RepresentationError
from .graph import (
    CutRecord,
    MultiGraph,
    boundary_edges,
    boundary_size,
    boundary_sizes,
    members,
    min_cut_value,
    parse_eta,
)
from .structure import CrossComponent, PolygonRep, crossing, intervals_cross

FIFTH = Fraction(1, 5)
MAX_BRUTE_ATOMS = 22

Interval = tuple[int, int]


@dataclass(frozen=True)
class Witness:
    """Why an interval is special.

    ``kind`` is ``"nmi"`` (the canonical cut is itself near-minimum) or one of
    ``"cap"``, ``"cup"``, ``"diff"`` applied to the NMIs ``a`` and ``b``
    (``"diff"`` means ``a`` minus ``b``).
    """

    kind: str
    a: Interval | None = None
    b: Interval | None = None


def combine_intervals(a: Interval, b: Interval, op: str) -> Interval | None:
    """Interval arithmetic for two crossing intervals; None if the result is empty."""
    (la, ra), (lb, rb) = a, b
    if not intervals_cross(a, b):
        raise IntegrityError(f"intervals {a} and {b} do not cross")
    if op == "cap":
        return (max(la, lb), min(ra, rb))
    if op == "cup":
        return (min(la, lb), max(ra, rb))
    if op == "diff":
        return (la, lb) if la < lb else (rb, ra)
    raise IntegrityError(f"unknown interval operation {op!r}")


def combine_sets(A: int, B: int, op: str) -> int:
    if op == "cap":
        return A & B
    if op == "cup":
        return A | B
    if op == "diff":
        return A & ~B
    raise IntegrityError(f"unknown set operation {op!r}")


@dataclass
class CanonicalTable:
    """Per-interval canonical cuts of one polygon plus the special-interval bookkeeping."""

    polygon: PolygonRep
    k: int
    eta: Fraction
    cut: dict[Interval, int]
    boundary: dict[Interval, int]
    nmi: set[Interval]
    special: dict[Interval, Witness]
    witnesses: dict[Interval, list[Witness]]
    special_diff: dict[Interval, tuple[Interval, Interval]]
    heuristic: bool = False

    @property
    def m(self) -> int:
        return self.polygon.m

    def is_shadow(self, iv: Interval) -> bool:
        return iv in self.cut

    def is_special(self, iv: Interval) -> bool:
        return iv in self.special

    def is_addable(self, iv: Interval) -> bool:
        """Special, or a difference of two crossing special intervals."""
        return iv in self.special or iv in self.special_diff


def _fifth_nmcs_over_atoms(G: MultiGraph, P: PolygonRep, k: int) -> list[tuple[int, int]]:
    """All (shore, boundary) with boundary < 6k/5 that are unions of atoms avoiding the root atom."""
    others = [a for a in P.atoms if a != P.root]
    A = len(others)
    if A > MAX_BRUTE_ATOMS:
        raise RepresentationError("too many atoms for exhaustive shadow enumeration")
    atom_arr = np.array(others, dtype=np.int64)
    codes = np.arange(1, 1 << A, dtype=np.int64)
    masks = np.zeros(codes.shape, dtype=np.int64)
    for i in range(A):
        masks |= np.where((codes >> i) & 1, atom_arr[i], 0)
    sizes = boundary_sizes(G, masks)
    keep = sizes * 5 < 6 * k
    return [(int(s), int(b)) for s, b in zip(masks[keep], sizes[keep])]


def build_canonical_table(
    G: MultiGraph, P: PolygonRep, eta, k: int | None = None, fifth_nmcs: Sequence[tuple[int, int]] | None = None
) -> CanonicalTable:
    """Canonical cut per interval, NMI flags and special witnesses for one polygon.

    ``fifth_nmcs`` may supply the candidate (shore, boundary) pairs; by default
    every union of atoms avoiding the root atom is tried.
    """
    eta = parse_eta(eta)
    if k is None:
        k = min_cut_value(G)
    if fifth_nmcs is None:
        fifth_nmcs = _fifth_nmcs_over_atoms(G, P, k)
    cut: dict[Interval, int] = {}
    boundary: dict[Interval, int] = {}
    for S, b in fifth_nmcs:
        if S & P.root or b * 5 >= 6 * k:
            continue
        iv = P.outside_interval(S)
        if iv is None:
            continue
        if iv in cut and cut[iv] != S:
            raise RepresentationError(
                f"interval {iv} is the outside part of two cuts {members(cut[iv])} and {members(S)}"
            )
        cut[iv] = S
        boundary[iv] = b
    thr = (1 + eta) * k
    nmi = {iv for iv, b in boundary.items() if b < thr}

    witnesses: dict[Interval, list[Witness]] = {iv: [Witness("nmi")] for iv in sorted(nmi)}
    nmi_sorted = sorted(nmi)
    n = G.n
    for a, b in combinations(nmi_sorted, 2):
        if a[0] > b[0] or (a[0] == b[0] and a[1] > b[1]):
            a, b = b, a
        if not intervals_cross(a, b):
            continue
        A, B = cut[a], cut[b]
        if not crossing(A, B, n):
            raise RepresentationError(f"intervals {a},{b} cross but their canonical cuts do not")
        for op, x, y in (("cap", a, b), ("cup", a, b), ("diff", a, b), ("diff", b, a)):
            iv = combine_intervals(x, y, op)
            S = combine_sets(cut[x], cut[y], op)
            if cut.get(iv) == S:
                witnesses.setdefault(iv, []).append(Witness(op, x, y))
            elif boundary_size(G, S) * 5 < 6 * k:
                raise RepresentationError(f"{op} of {x},{y} is a cut other than the canonical cut of {iv}")
    special = {iv: ws[0] for iv, ws in sorted(witnesses.items())}

    special_diff: dict[Interval, tuple[Interval, Interval]] = {}
    spec_sorted = sorted(special)
    for a, b in combinations(spec_sorted, 2):
        if not intervals_cross(a, b):
            continue
        for x, y in ((a, b), (b, a)):
            iv = combine_intervals(x, y, "diff")
            if iv in special or iv in special_diff:
                continue
            S = cut[x] & ~cut[y]
            if cut.get(iv) == S:
                special_diff[iv] = (x, y)
    return CanonicalTable(P, k, eta, cut, boundary, nmi, special, witnesses, special_diff)


def _reflect(iv: Interval, m: int) -> Interval:
    return (m + 1 - iv[1], m + 1 - iv[0])


def special_cross_resolve(table: CanonicalTable, A: Interval, B: Interval) -> tuple[tuple[Interval, Witness], tuple[Interval, Witness]]:
    """For a special ``A`` crossing an NMI ``B``: a special member of each pair.

    Returns ``((X, wX), (Y, wY))`` with ``X`` one of ``A & B``, ``A - B`` and
    ``Y`` one of ``A | B``, ``B - A``, each with a witness built from NMIs.
    The choice follows the shape of ``A``'s witness.
    """
    if A not in table.special:
        raise IntegrityError(f"{A} is not special")
    if B not in table.nmi:
        raise IntegrityError(f"{B} is not a near-minimum interval")
    if not intervals_cross(A, B):
        raise IntegrityError(f"{A} and {B} do not cross")
    m = table.m
    if A[0] > B[0]:
        # mirror so that l_A < l_B; interval operations commute with reflection
        rA, rB = _reflect(A, m), _reflect(B, m)
        wit = _reflect_witness(table.special[A], m)
        out = _resolve_ordered(rA, rB, wit)
        return tuple((_reflect(iv, m), _reflect_witness(w, m)) for iv, w in out)  # type: ignore[return-value]
    return _resolve_ordered(A, B, table.special[A])


def _reflect_witness(w: Witness, m: int) -> Witness:
    if w.kind == "nmi":
        return w
    return Witness(w.kind, _reflect(w.a, m), _reflect(w.b, m))


def _resolve_ordered(A: Interval, B: Interval, w: Witness):
    (lA, rA), (lB, rB) = A, B
    cap, cup = (lB, rA), (lA, rB)
    a_minus_b, b_minus_a = (lA, lB), (rA, rB)
    if w.kind == "nmi":
        return (cap, Witness("cap", A, B)), (cup, Witness("cup", A, B))
    a, b = w.a, w.b
    if w.kind == "cap" and ((a[1] == rA and b[0] == lA) or (b[1] == rA and a[0] == lA)):
        # A = <x, rA> & <lA, y>, x < lA < rA < y
        left = a if a[1] == rA and b[0] == lA else b
        return (cap, Witness("cap", left, B)), (b_minus_a, Witness("diff", B, left))
    if w.kind == "diff":
        if a[1] == rA and b[1] == lA:
            # A = <y, rA> - <x, lA>
            return (cap, Witness("cap", a, B)), (b_minus_a, Witness("diff", B, a))
        if a[0] == lA and b[0] == rA:
            # A = <lA, x> - <rA, y>
            x = a[1]
            if x < rB:
                return (a_minus_b, Witness("diff", a, B)), (cup, Witness("cup", a, B))
            return (cap, Witness("diff", B, b)), (b_minus_a, Witness("cap", b, B))
    if w.kind == "cup" and ((a[0] == lA and b[1] == rA) or (b[0] == lA and a[1] == rA)):
        # A = <lA, x> | <y, rA>, lA < y < x < rA
        first = a if a[0] == lA and b[1] == rA else b
        second = b if first is a else a
        x = first[1]
        if x <= lB:
            return (cap, Witness("cap", second, B)), (b_minus_a, Witness("diff", B, second))
        return (a_minus_b, Witness("diff", first, B)), (cup, Witness("cup", first, B))
    raise IntegrityError(f"witness {w} of {A} matches none of the resolution cases")


@dataclass
class TraceNode:
    """One call of the recursion with the chain it chose and the cuts it emitted."""

    id: int
    L: int
    R: int
    depth: int
    untouched: int
    chain: tuple[int, ...] = ()
    children: list[int] = field(default_factory=list)
    emitted: list[tuple[Interval, str]] = field(default_factory=list)


@dataclass
class ComponentFamily:
    """Laminar family of one component: intervals in emission order and the recursion trace."""

    table: CanonicalTable
    intervals: list[Interval]
    emitted_by: dict[Interval, str]
    nodes: list[TraceNode]

    def cut(self, iv: Interval) -> int:
        return self.table.cut[iv]

    def sets(self) -> list[int]:
        return [self.table.cut[iv] for iv in self.intervals]

    def kind(self, iv: Interval) -> str:
        if iv in self.table.special:
            return self.table.special[iv].kind
        return "special-diff"


def make_lam(table: CanonicalTable) -> ComponentFamily:
    """Run the alternating prefix/suffix recursion from ``(1, m)`` at depth 0.

    A chain point must lie strictly inside the active interval; the interval
    itself is still added when it qualifies, so a chain consisting only of the
    whole interval counts as no chain (this keeps the recursion finite).
    """
    m = table.m
    nodes: list[TraceNode] = []
    order: list[Interval] = []
    emitted_by: dict[Interval, str] = {}

    def emit(node: TraceNode, iv: Interval, line: str) -> None:
        node.emitted.append((iv, line))
        if iv not in emitted_by:
            emitted_by[iv] = line
            order.append(iv)

    # explicit stack of (L, R, depth, untouched, parent id)
    stack = [(1, m, 0, 0, -1)]
    while stack:
        L, R, depth, untouched, parent = stack.pop()
        node = TraceNode(len(nodes), L, R, depth, untouched)
        nodes.append(node)
        if parent >= 0:
            nodes[parent].children.append(node.id)
        if L >= R:
            continue
        if untouched >= 2:
            stack.append((L + 1, R, depth + 1, 0, node.id))
            continue
        if table.is_addable((L, R)):
            emit(node, (L, R), "active")
        if depth % 2 == 0:
            xs = [x for x in range(L + 1, R) if (L, x) in table.special]
        else:
            xs = [x for x in range(L + 1, R) if (x, R) in table.special]
        if not xs:
            stack.append((L, R, depth + 1, untouched + 1, node.id))
            continue
        node.chain = tuple(xs)
        for x in xs:
            if depth % 2 == 0:
                emit(node, (L, x), "prefix")
            else:
                emit(node, (x, R), "suffix")
        pts = [L, *xs, R]
        for a, b in reversed(list(zip(pts, pts[1:]))):
            stack.append((a, b, depth + 1, 0, node.id))
    for node in nodes:
        node.children.sort(key=lambda c: (nodes[c].L, nodes[c].R))
    return ComponentFamily(table, order, emitted_by, nodes)


def verify_cover(G: MultiGraph, S: int, B: Iterable[int]) -> bool:
    """True iff every edge leaving ``S`` leaves some set of ``B``."""
    return uncovered_edge(G, S, B) is None


def uncovered_edge(G: MultiGraph, S: int, B: Iterable[int]) -> int | None:
    B = list(B)
    for eid in boundary_edges(G, S):
        u, v = G.edges[eid]
        if not any(((X >> u) ^ (X >> v)) & 1 for X in B):
            return eid
    return None


def _orient_to_polygon(P: PolygonRep, S: int) -> int:
    full = (1 << P.n) - 1
    return full ^ S if S & P.root else S


def extract_cover(G: MultiGraph, S: int, fam: ComponentFamily) -> list[Interval]:
    """Intervals of at most eight family cuts whose boundaries cover that of ``S``.

    Follows the constructive argument: locate the deepest recursion call whose
    interval contains ``S``'s interval, use the two extreme chain cuts inside
    ``S``, one cut on the left and up to five cuts on the right.
    """
    table = fam.table
    P = table.polygon
    S = _orient_to_polygon(P, S)
    iv = P.outside_interval(S)
    if iv is None or table.cut.get(iv) != S:
        raise IntegrityError("cut is not the canonical cut of an interval of this polygon")
    members_set = set(fam.intervals)
    if iv in members_set:
        cover = [iv]
    else:
        cover = _trace_cover(fam, iv)
    missing = [c for c in cover if c not in members_set]
    if missing:
        raise CoverError(f"cover of {iv} uses intervals {missing} that are not in the family")
    bad = uncovered_edge(G, S, [table.cut[c] for c in cover])
    if bad is not None:
        raise CoverError(f"cover {cover} of {iv} misses edge {bad} {G.edges[bad]}", bad)
    if len(cover) > 8:
        raise CoverError(f"cover of {iv} has {len(cover)} cuts")
    return cover


def _trace_cover(fam: ComponentFamily, iv: Interval) -> list[Interval]:
    table = fam.table
    m = table.m
    lS, rS = iv
    deepest = None
    for node in fam.nodes:
        if node.L <= lS and rS <= node.R and node.L < node.R:
            if deepest is None or node.depth > deepest.depth:
                deepest = node
    if deepest is None:
        raise CoverError(f"no recursion call contains {iv}")
    if deepest.depth % 2 == 0:
        def spec(l, r):
            return (l, r) in table.special
        L1, R1 = deepest.L, deepest.R
        out = _cover_even(spec, L1, R1, lS, rS)
        return out
    # odd depth: mirror every interval so suffix chains become prefix chains
    def spec(l, r):
        return _reflect((l, r), m) in table.special
    L1, R1 = _reflect((deepest.L, deepest.R), m)
    lr, rr = _reflect(iv, m)
    return [_reflect(c, m) for c in _cover_even(spec, L1, R1, lr, rr)]


def _cover_even(spec, L1: int, R1: int, lS: int, rS: int) -> list[Interval]:
    """Cover for the case where the deepest containing call takes prefix chains."""
    prefixes = [x for x in range(max(lS, L1 + 1), rS + 1) if spec(L1, x)]
    if not prefixes:
        raise CoverError(f"no special prefix of ({L1},{R1}) ends inside ({lS},{rS})")
    i, j = prefixes[0], prefixes[-1]
    cover = [(L1, i)]
    if j != i:
        cover.append((L1, j))
    if lS < i:
        cover.append((lS, i))
    if j < rS:
        chain = [x for x in range(j + 1, R1) if spec(L1, x)]
        L2, R2 = j, (chain[0] if chain else R1)
        suffixes = []
        if rS < R2:
            suffixes = [x for x in range(L2, rS + 1) if x < R2 and spec(x, R2)]
        if not suffixes:
            # either nothing special ends at R2 inside S, or S reaches R2 itself
            cover.append((j, rS))
        else:
            L3, z = suffixes[-1], suffixes[0]
            right = [x for x in range(rS, R2) if spec(x, R2)]
            R3 = right[0] if right else R2
            cover.append((L3, R2))
            if R3 < R2:
                cover.append((R3, R2))
            cover.append((z, R2))
            if j < z:
                cover.append((j, z))
            if L3 < rS:
                cover.append((L3, rS))
    seen = []
    for c in cover:
        if c not in seen:
            seen.append(c)
    return seen


def min_cover_size(G: MultiGraph, S: int, family: Sequence[int], limit: int = 8) -> int | None:
    """Smallest number of family sets covering the boundary of ``S`` (None if more than ``limit``)."""
    elems = boundary_edges(G, S)
    pairs = sorted({G.edges[e] for e in elems})
    index = {p: t for t, p in enumerate(pairs)}
    full = (1 << len(pairs)) - 1
    covers = []
    for X in family:
        mask = 0
        for (u, v), t in index.items():
            if ((X >> u) ^ (X >> v)) & 1:
                mask |= 1 << t
        if mask:
            covers.append(mask)
    covers = sorted(set(covers), reverse=True)

    def search(covered: int, budget: int) -> bool:
        if covered == full:
            return True
        if budget == 0:
            return False
        missing = full & ~covered
        t = (missing & -missing).bit_length() - 1
        for c in covers:
            if (c >> t) & 1 and search(covered | c, budget - 1):
                return True
        return False

    for size in range(0, limit + 1):
        if search(0, size):
            return size
    return None


@dataclass
class LaminarFamily:
    """A laminar family over ``0..n-1`` with every set avoiding the root vertex.

    ``parent[i]`` is the index of the smallest set strictly containing set
    ``i`` (or -1); ``origin[i]`` records where the set came from.
    """

    n: int
    sets: list[int]
    parent: list[int]
    origin: list[dict]
    root_vertex: int = 0

    def __len__(self) -> int:
        return len(self.sets)

    def index(self, S: int) -> int | None:
        try:
            return self.sets.index(S)
        except ValueError:
            return None


def parent_forest(sets: Sequence[int]) -> list[int]:
    parent = []
    for i, S in enumerate(sets):
        best = -1
        for j, T in enumerate(sets):
            if i != j and S & T == S and S != T:
                if best < 0 or bin(T).count("1") < bin(sets[best]).count("1"):
                    best = j
        parent.append(best)
    return parent


def combine_components(
    n: int,
    per_component: Sequence[ComponentFamily],
    singleton_cuts: Sequence[CutRecord],
    root_vertex: int = 0,
    component_ids: Sequence[int] | None = None,
) -> LaminarFamily:
    """Merge per-component families and uncrossed cuts into one laminar family avoiding ``root_vertex``."""
    full = (1 << n) - 1
    rbit = 1 << root_vertex
    sets: list[int] = []
    origin: list[dict] = []
    seen: dict[int, int] = {}

    def add(S: int, info: dict) -> None:
        if S & rbit:
            S = full ^ S
        if S in seen:
            return
        seen[S] = len(sets)
        sets.append(S)
        origin.append(info)

    ids = list(component_ids) if component_ids is not None else list(range(len(per_component)))
    for cid, fam in zip(ids, per_component):
        for iv in fam.intervals:
            add(fam.cut(iv), {"component": cid, "interval": iv, "kind": fam.kind(iv), "line": fam.emitted_by[iv]})
    for rec in singleton_cuts:
        add(rec.shore, {"component": None, "interval": None, "kind": "uncrossed", "line": None})
    for i, j in combinations(range(len(sets)), 2):
        if crossing(sets[i], sets[j], n):
            raise IntegrityError(f"family sets {members(sets[i])} and {members(sets[j])} cross")
    return LaminarFamily(n, sets, parent_forest(sets), origin, root_vertex)


def naive_maximal_laminar(cuts: Sequence[CutRecord | int], n: int, root_vertex: int = 0) -> LaminarFamily:
    """Greedy baseline: keep each cut in the given order unless it crosses one already kept."""
    full = (1 << n) - 1
    rbit = 1 << root_vertex
    kept: list[int] = []
    for c in cuts:
        S = c.shore if isinstance(c, CutRecord) else int(c)
        if S & rbit:
            S = full ^ S
        if S in kept or any(crossing(S, T, n) for T in kept):
            continue
        kept.append(S)
    origin = [{"component": None, "interval": None, "kind": "greedy", "line": None} for _ in kept]
    return LaminarFamily(n, kept, parent_forest(kept), origin, root_vertex)


def is_laminar(sets: Sequence[int]) -> bool:
    for A, B in combinations(sets, 2):
        if A & B and A & ~B and B & ~A:
            return False
    return True


def format_family(fam: LaminarFamily) -> str:
    """One line per set: sorted vertex ids followed by its origin; sorted for stable diffs."""
    rows = []
    for S, info in zip(fam.sets, fam.origin):
        verts = " ".join(str(v) for v in members(S))
        comp = "-" if info.get("component") is None else str(info["component"])
        iv = info.get("interval")
        ivs = "-" if iv is None else f"{iv[0]},{iv[1]}"
        rows.append((members(S), f"{{{verts}}}\tcomponent={comp}\tinterval={ivs}\tkind={info.get('kind')}"))
    rows.sort(key=lambda r: (len(r[0]), r[0]))
    return "\n".join(r[1] for r in rows) + ("\n" if rows else "")
