from fractions import Fraction
from itertools import combinations
from types import SimpleNamespace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import stress_specs
from nearcut.errors import IntegrityError
from nearcut.generators import gen_cycle, gen_fig1
from nearcut.graph import CutRecord, boundary_edges, enumerate_near_min_cuts, mask_of, members
from nearcut.laminar import (
    CanonicalTable,
    Witness,
    build_canonical_table,
    combine_components,
    combine_intervals,
    combine_sets,
    extract_cover,
    format_family,
    is_laminar,
    make_lam,
    min_cover_size,
    naive_maximal_laminar,
    special_cross_resolve,
    uncovered_edge,
    verify_cover,
)
from nearcut.pipeline import fig1_adversarial_order
from nearcut.structure import build_polygon, components, crossing, intervals_cross

ETA = Fraction(1, 40)


def component_tables(G, eta):
    cuts = enumerate_near_min_cuts(G, eta)
    out = []
    for comp in components(cuts, G.n):
        if len(comp) > 1:
            P = build_polygon(comp, G)
            out.append((comp, P, build_canonical_table(G, P, eta)))
    return cuts, out


@pytest.fixture(scope="module")
def cycle8():
    G = gen_cycle(8)
    cuts, ((comp, P, table),) = component_tables(G, ETA)
    return G, comp, P, table, make_lam(table)


@pytest.fixture(scope="module")
def stress_tables():
    out = []
    for spec, eta in stress_specs():
        G = spec.build()
        _, tabs = component_tables(G, eta)
        out.extend((G, comp, P, t) for comp, P, t in tabs)
    return out


class TestCombination:
    def test_interval_ops(self):
        a, b = (1, 5), (3, 8)
        assert combine_intervals(a, b, "cap") == (3, 5)
        assert combine_intervals(a, b, "cup") == (1, 8)
        assert combine_intervals(a, b, "diff") == (1, 3)
        assert combine_intervals(b, a, "diff") == (5, 8)

    def test_set_ops(self):
        A, B = mask_of([1, 2, 3]), mask_of([3, 4])
        assert combine_sets(A, B, "cap") == mask_of([3])
        assert combine_sets(A, B, "cup") == mask_of([1, 2, 3, 4])
        assert combine_sets(A, B, "diff") == mask_of([1, 2])


class TestCanonicalTable:
    def test_cycle_every_interval_is_special(self, cycle8):
        _, _, P, table, _ = cycle8
        every = {(l, r) for l in range(1, 9) for r in range(l + 1, 9)}
        assert set(table.cut) == every
        assert table.nmi == every
        assert set(table.special) == every
        assert all(table.special[iv].kind == "nmi" for iv in every)

    def test_nmi_implies_special(self, stress_tables):
        for _, _, _, t in stress_tables:
            assert t.nmi <= set(t.special)

    def test_witnesses_match_vertex_level_combination(self, stress_tables):
        checked = 0
        for _, _, _, t in stress_tables:
            for iv, ws in t.witnesses.items():
                for w in ws:
                    if w.kind == "nmi":
                        assert iv in t.nmi
                        continue
                    assert w.a in t.nmi and w.b in t.nmi
                    assert intervals_cross(w.a, w.b)
                    assert t.cut[iv] == combine_sets(t.cut[w.a], t.cut[w.b], w.kind)
                    checked += 1
            for iv, (a, b) in t.special_diff.items():
                assert t.cut[iv] == t.cut[a] & ~t.cut[b]
        assert checked > 50

    def test_canonical_cuts_are_fifth_near_min(self, stress_tables):
        for G, _, P, t in stress_tables:
            for iv, S in t.cut.items():
                assert len(boundary_edges(G, S)) * 5 < 6 * t.k
                assert P.outside_interval(S) == iv and not S & P.root

    def test_specials_below_twice_eta(self, stress_tables):
        for _, _, _, t in stress_tables:
            for iv in t.special:
                assert t.boundary[iv] < (1 + 2 * t.eta) * t.k


def toy_table(m, special, nmi):
    return CanonicalTable(SimpleNamespace(m=m), 10, ETA, {}, {}, set(nmi), dict(special), {}, {})


class TestSpecialCrossResolve:
    def test_nmi_case_returns_cap_and_cup(self, cycle8):
        *_, table, _ = cycle8
        (X, wX), (Y, wY) = special_cross_resolve(table, (2, 5), (3, 7))
        assert (X, Y) == ((3, 5), (2, 7))
        assert wX == Witness("cap", (2, 5), (3, 7)) and wY == Witness("cup", (2, 5), (3, 7))

    def test_cap_witness_case(self):
        # A = <3,6> = <2,6> & <3,8>, B = <4,9>: lA < lB < rA < rB
        A, B = (3, 6), (4, 9)
        t = toy_table(10, {A: Witness("cap", (2, 6), (3, 8))}, {(2, 6), (3, 8), B})
        (X, wX), (Y, wY) = special_cross_resolve(t, A, B)
        assert X == (4, 6) and Y == (6, 9)
        assert wX == Witness("cap", (2, 6), B)
        assert wY == Witness("diff", B, (2, 6))

    def test_mirrored_cap_witness_case(self):
        # reflection of the case above inside m = 10
        A, B = (5, 8), (2, 7)
        t = toy_table(10, {A: Witness("cap", (5, 9), (3, 8))}, {(5, 9), (3, 8), B})
        (X, _), (Y, _) = special_cross_resolve(t, A, B)
        assert X == (5, 7) and Y == (2, 5)

    def test_rejects_non_crossing(self, cycle8):
        *_, table, _ = cycle8
        with pytest.raises(IntegrityError):
            special_cross_resolve(table, (2, 4), (4, 6))

    def test_rejects_unknown_witness_shape(self):
        A, B = (3, 6), (4, 9)
        t = toy_table(10, {A: Witness("cup", (1, 2), (7, 8))}, {B})
        with pytest.raises(IntegrityError):
            special_cross_resolve(t, A, B)

    def test_every_pair_on_stress_components(self, stress_tables):
        total = 0
        for _, _, _, t in stress_tables:
            for A in t.special:
                for B in t.nmi:
                    if not intervals_cross(A, B):
                        continue
                    (X, wX), (Y, wY) = special_cross_resolve(t, A, B)
                    (lA, rA), (lB, rB) = A, B
                    lo, hi = (A, B) if lA < lB else (B, A)
                    # X is A&B or A-B, Y is A|B or B-A (as intervals)
                    assert X in {combine_intervals(A, B, "cap"), combine_intervals(A, B, "diff")}
                    assert Y in {combine_intervals(A, B, "cup"), combine_intervals(B, A, "diff")}
                    for iv, w in ((X, wX), (Y, wY)):
                        assert w.a in t.nmi and w.b in t.nmi
                        assert combine_intervals(w.a, w.b, w.kind) == iv
                        # where the combination is a shadow, its cut is the vertex-level combination
                        if iv in t.cut:
                            assert t.cut[iv] == combine_sets(t.cut[w.a], t.cut[w.b], w.kind)
                    total += 1
        assert total > 100


class TestMakeLam:
    def test_cycle_depth_zero_chain_is_all_prefixes(self, cycle8):
        *_, fam = cycle8
        root = fam.nodes[0]
        assert (root.L, root.R, root.depth) == (1, 8, 0)
        assert root.chain == tuple(range(2, 8))
        prefixes = {(1, r) for r in range(2, 9)}
        assert prefixes <= set(fam.intervals)
        # the remaining members are the single-atom intervals emitted one level down
        assert set(fam.intervals) - prefixes == {(i, i + 1) for i in range(2, 8)}

    def test_empty_range(self):
        t = toy_table(1, {}, set())
        assert make_lam(t).intervals == []

    def test_intervals_pairwise_non_crossing(self, stress_tables):
        for _, _, _, t in stress_tables:
            fam = make_lam(t)
            for a, b in combinations(fam.intervals, 2):
                assert not intervals_cross(a, b)
            assert all(t.is_addable(iv) for iv in fam.intervals)

    def test_family_below_four_eta(self, stress_tables):
        for G, _, _, t in stress_tables:
            fam = make_lam(t)
            for S in fam.sets():
                assert len(boundary_edges(G, S)) < (1 + 4 * t.eta) * t.k


class TestCover:
    def test_family_member_covers_itself(self, cycle8):
        G, _, _, t, fam = cycle8
        assert extract_cover(G, t.cut[(1, 4)], fam) == [(1, 4)]

    @pytest.mark.parametrize("l,r", [(2, 5), (3, 8), (2, 7)])
    def test_cycle_arc_covered_by_two_prefixes(self, cycle8, l, r):
        G, _, _, t, fam = cycle8
        assert sorted(extract_cover(G, t.cut[(l, r)], fam)) == [(1, l), (1, r)]

    def test_verify_cover_basics(self, cycle8):
        G, _, _, t, _ = cycle8
        S = t.cut[(2, 5)]
        assert verify_cover(G, S, [S])
        assert not verify_cover(G, S, [])
        assert uncovered_edge(G, S, []) in boundary_edges(G, S)

    def test_stress_covers(self, stress_tables):
        sizes = []
        for G, comp, P, t in stress_tables:
            fam = make_lam(t)
            fam_sets = fam.sets()
            for S in comp.shores:
                ivs = extract_cover(G, S, fam)
                sets = [fam.cut(iv) for iv in ivs]
                assert len(ivs) <= 8
                assert set(ivs) <= set(fam.intervals)
                assert oracles.covers(G.edges, oracles.vertex_set(S), [oracles.vertex_set(B) for B in sets])
                # at most one member is a difference of specials
                assert sum(iv not in t.special for iv in ivs) <= 1
                if P.m <= 10:
                    best = min_cover_size(G, S, fam_sets)
                    assert best is not None and best <= len(ivs)
                sizes.append(len(ivs))
        assert max(sizes) >= 3

    def test_min_cover_exhaustive_small(self, cycle8):
        G, _, _, t, fam = cycle8
        assert min_cover_size(G, t.cut[(2, 5)], fam.sets()) == 2
        assert min_cover_size(G, t.cut[(1, 5)], fam.sets()) == 1


class TestCombine:
    def test_single_component_only_reorients(self, cycle8):
        G, _, _, t, fam = cycle8
        L = combine_components(8, [fam], [])
        full = G.full
        assert sorted(L.sets) == sorted(S if not S & 1 else full ^ S for S in fam.sets())
        assert all(not S & 1 for S in L.sets)
        assert is_laminar(L.sets)

    def test_crossing_input_raises(self, cycle8):
        G, _, _, t, fam = cycle8
        bad = CutRecord(t.cut[(2, 5)], 2, ETA, 2)
        with pytest.raises(IntegrityError):
            combine_components(8, [fam], [bad])

    def test_parent_forest(self, cycle8):
        G, _, _, _, fam = cycle8
        L = combine_components(8, [fam], [])
        for i, p in enumerate(L.parent):
            if p >= 0:
                assert L.sets[i] & ~L.sets[p] == 0 and L.sets[i] != L.sets[p]

    def test_format_is_sorted_by_size(self, cycle8):
        G, _, _, _, fam = cycle8
        lines = format_family(combine_components(8, [fam], [])).splitlines()
        sizes = [len(line.split("\t")[0].strip("{}").split()) for line in lines]
        assert sizes == sorted(sizes)


class TestNaive:
    def test_keeps_non_crossing_input(self):
        sets = [mask_of([1]), mask_of([1, 2]), mask_of([4, 5])]
        assert naive_maximal_laminar(sets, 6).sets == sets

    @given(st.permutations(range(28)))
    @settings(max_examples=20, deadline=None)
    def test_maximal_for_any_order(self, perm):
        cuts = enumerate_near_min_cuts(gen_cycle(8), ETA)
        L = naive_maximal_laminar([cuts[i] for i in perm], 8)
        assert is_laminar(L.sets)
        for c in cuts:
            if c.shore not in L.sets:
                assert any(crossing(c.shore, T, 8) for T in L.sets)

    def test_fig1_adversarial_order_takes_zigzag_prefixes(self):
        G = gen_fig1(8, 240)
        cuts = enumerate_near_min_cuts(G, ETA)
        L = naive_maximal_laminar(fig1_adversarial_order(G, cuts), 8)
        full = G.full
        # {v1,v2}, {v1,v2,v8}, {v1,v2,v8,v3}, ... stored by their complements
        for size in range(2, 8):
            prefix = mask_of([0, 1, 7, 2, 6, 3, 5][:size])
            assert full ^ prefix in L.sets
        assert is_laminar(L.sets)


@given(st.lists(st.integers(1, 2**7 - 2), max_size=8))
def test_is_laminar_agrees_with_oracle(sets):
    assert is_laminar(sets) == oracles.laminar([oracles.vertex_set(s) for s in sets])
