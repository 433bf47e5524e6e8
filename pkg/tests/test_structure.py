import dataclasses
from fractions import Fraction
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import stress_specs
from nearcut.errors import ParameterError, RepresentationError
from nearcut.generators import gen_cycle, gen_heavy_cycle
from nearcut.graph import enumerate_near_min_cuts, mask_of, members
from nearcut.structure import (
    CrossComponent,
    build_polygon,
    components,
    crossing,
    find_short_k_cycle,
    intervals_cross,
    refine_atoms,
    verify_polygon,
)


def one_based(mask):
    return [v + 1 for v in members(mask)]


class TestCrossing:
    def test_four_regions(self):
        assert crossing(mask_of([1, 2]), mask_of([2, 3]), 4)

    def test_nested(self):
        assert not crossing(mask_of([1]), mask_of([1, 2]), 4)

    def test_complementary(self):
        assert not crossing(mask_of([0, 1]), mask_of([2, 3]), 4)

    @given(st.integers(3, 9).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, 2**n - 2), st.integers(1, 2**n - 2))))
    def test_matches_set_definition(self, args):
        n, A, B = args
        assert crossing(A, B, n) == oracles.sets_cross(oracles.vertex_set(A), oracles.vertex_set(B), n)

    def test_interval_crossing(self):
        assert intervals_cross((1, 3), (2, 5))
        assert not intervals_cross((1, 3), (3, 5))
        assert not intervals_cross((1, 5), (2, 3))


class TestComponents:
    def test_fig2_big_component_and_singleton(self, fig2_structure):
        cuts, comps, big, _ = fig2_structure
        full = (1 << 16) - 1
        # single-vertex cuts never cross anything; set them aside
        proper = [c for c in comps if all(1 < bin(s).count("1") < 15 for s in c.shores)]
        assert len(proper) == 2 and big in proper
        small = [c for c in proper if c is not big][0]
        assert len(small) == 1
        assert one_based(small.shores[0]) == [7, 8]
        vertex_cuts = [c for c in comps if c not in proper]
        assert len(vertex_cuts) == 16 and all(len(c) == 1 for c in vertex_cuts)
        assert {s for c in vertex_cuts for s in c.shores} == {full ^ 1} | {1 << v for v in range(1, 16)}

    def test_fig2_atoms(self, fig2_structure):
        _, _, big, _ = fig2_structure
        atoms = sorted(one_based(a) for a in big.atoms)
        assert len(atoms) == 15
        assert atoms == sorted([[i] for i in range(1, 7)] + [[7, 8]] + [[i] for i in range(9, 17)])

    def test_single_cut_component(self):
        from nearcut.graph import CutRecord

        rec = CutRecord(mask_of([1, 2]), 2, Fraction(1, 40), 2)
        (comp,) = components([rec], 5)
        assert sorted(comp.atoms) == sorted([mask_of([1, 2]), mask_of([0, 3, 4])])

    def test_cycle5_matches_crossing_graph_oracle(self):
        G = gen_cycle(5)
        cuts = enumerate_near_min_cuts(G, Fraction(1, 40))
        sets = [oracles.vertex_set(c.shore) for c in cuts]
        H = nx.Graph()
        H.add_nodes_from(range(len(sets)))
        H.add_edges_from((i, j) for i, j in combinations(range(len(sets)), 2) if oracles.sets_cross(sets[i], sets[j], 5))
        want = sorted(sorted(c) for c in nx.connected_components(H))
        got = sorted(sorted(c.cuts) for c in components(cuts, 5))
        assert got == want
        # four vertex cuts stay alone; the five 2-arcs (as shores avoiding 0) form one component
        assert sorted(len(c) for c in got) == [1, 1, 1, 1, 1, 5]

    @given(st.integers(0, 10**6))
    @settings(max_examples=25, deadline=None)
    def test_atoms_match_signature_oracle(self, seed):
        G = gen_heavy_cycle(6 + seed % 6, 20 + seed % 9, 1 + seed % 3, seed)
        cuts = enumerate_near_min_cuts(G, Fraction(1, 10))
        for comp in components(cuts, G.n):
            want = oracles.atoms_by_signature(G.n, [oracles.vertex_set(s) for s in comp.shores])
            assert {oracles.vertex_set(a) for a in comp.atoms} == want
            # refining by the atoms themselves changes nothing
            assert sorted(refine_atoms(comp.atoms, G.n)) == sorted(comp.atoms)


class TestPolygonFig2:
    def test_outside_order_and_inside_atoms(self, fig2_structure):
        _, _, _, P = fig2_structure
        order = [one_based(P.atoms[a]) for a in P.outside]
        assert order == [[i] for i in range(1, 7)] + [[7, 8]] + [[i] for i in range(9, 15)]
        assert sorted(one_based(P.atoms[a]) for a in P.inside) == [[15], [16]]

    def test_verifies(self, fig2_structure):
        _, _, big, P = fig2_structure
        assert verify_polygon(P, big).ok

    def test_no_short_k_cycle(self, fig2_structure):
        # inside atoms here are not certified by a short k-cycle (see the decisions ledger)
        _, _, big, _ = fig2_structure
        assert find_short_k_cycle(big, 12).status == "none"

    def test_without_graph_keeps_every_representable_atom_outside(self, fig2_structure):
        _, _, big, _ = fig2_structure
        P = build_polygon(big)
        assert verify_polygon(P, big).ok
        assert P.m == 15 and P.inside == ()


class TestVerifyPolygonNegatives:
    def test_shared_interval_fails_a(self, fig2_structure):
        _, _, big, P = fig2_structure
        iv = dict(P.interval_of)
        iv[1] = iv[0]
        rep = verify_polygon(dataclasses.replace(P, interval_of=iv), big)
        assert not rep.ok and rep.failed("a")

    def test_reversed_nesting_fails_b(self):
        G = gen_cycle(6)
        cuts = enumerate_near_min_cuts(G, Fraction(1, 40))
        big = max(components(cuts, 6), key=len)
        P = build_polygon(big, G)
        # find a nested pair and rewrite one interval so the two now cross
        for i, j in combinations(range(len(big)), 2):
            (l1, r1), (l2, r2) = P.interval_of[i], P.interval_of[j]
            if l1 < l2 and r2 < r1 and l2 + 1 < r2 and r1 < P.m:
                iv = dict(P.interval_of)
                iv[j] = (l2, r1 + 1)
                rep = verify_polygon(dataclasses.replace(P, interval_of=iv), big)
                assert rep.failed("b")
                return
        pytest.fail("no nested pair to perturb")

    def test_root_inside_shore_fails_d(self, fig2_structure):
        _, _, big, P = fig2_structure
        full = (1 << P.n) - 1
        oriented = list(P.oriented)
        oriented[0] = full ^ oriented[0]
        rep = verify_polygon(dataclasses.replace(P, oriented=tuple(oriented)), big)
        assert rep.failed("d")

    def test_foreign_atoms_fail_c(self, fig2_structure):
        _, _, big, P = fig2_structure
        atoms = list(P.atoms)
        atoms[0] |= atoms[1]
        rep = verify_polygon(dataclasses.replace(P, atoms=tuple(atoms)), big)
        assert rep.failed("c")


class TestPolygonGeneral:
    @pytest.mark.parametrize("spec,eta", stress_specs()[::3])
    def test_stress_components_verify(self, spec, eta):
        G = spec.build()
        cuts = enumerate_near_min_cuts(G, eta)
        for comp in components(cuts, G.n):
            if len(comp) < 2:
                continue
            P = build_polygon(comp, G)
            rep = verify_polygon(P, comp)
            assert rep.ok, rep.first
            # outside part of every cut is exactly its interval
            for c, S in enumerate(P.oriented):
                l, r = P.interval_of[c]
                inside = sum(P.atoms[a] for a in P.inside if P.atoms[a] & S)
                assert P.interval_atoms(l, r) == S & ~inside
            ivs = list(P.interval_of.values())
            assert len(set(ivs)) == len(ivs)

    def test_cycle_has_no_inside_atoms(self):
        G = gen_cycle(9)
        cuts = enumerate_near_min_cuts(G, Fraction(1, 40))
        big = max(components(cuts, 9), key=len)
        P = build_polygon(big, G)
        assert P.inside == () and P.m == 9
        assert find_short_k_cycle(big, 6).status == "none"

    def test_root_and_orientation(self):
        G = gen_cycle(7)
        cuts = enumerate_near_min_cuts(G, Fraction(1, 40))
        big = max(components(cuts, 7), key=len)
        P = build_polygon(big, G)
        assert [members(P.atoms[a]) for a in P.outside] == [[v] for v in range(7)]

    def test_family_without_polygon_is_refused(self):
        n = 7
        shores = [mask_of([1, 2, 3]), mask_of([3, 4, 5]), mask_of([5, 6, 1])]
        shores.append(mask_of([2, 4, 6]))
        atoms = refine_atoms(shores, n)
        comp = CrossComponent(n, tuple(range(4)), tuple(shores), tuple(atoms))
        with pytest.raises(RepresentationError):
            build_polygon(comp)


class TestKCycle:
    def five_cycle(self):
        # S_i = {v_2i, v_2i+1, v_2i+2} around a 10-cycle; vertex 10 lies in none
        return [mask_of([(2 * i) % 10, (2 * i + 1) % 10, (2 * i + 2) % 10]) for i in range(5)], 11

    def test_finds_hand_built_five_cycle(self):
        sets, n = self.five_cycle()
        got = find_short_k_cycle(sets, 5, n)
        assert got.status == "found" and got.length == 5
        assert sorted(got.cycle) == sorted(sets)

    def test_too_short_bound_finds_nothing(self):
        sets, n = self.five_cycle()
        assert find_short_k_cycle(sets, 4, n).status == "none"

    def test_chain_without_cycle(self):
        sets = [mask_of([1, 2]), mask_of([2, 3]), mask_of([3, 4])]
        assert find_short_k_cycle(sets, 12, 6).status == "none"

    def test_budget_reports_inconclusive(self):
        sets, n = self.five_cycle()
        assert find_short_k_cycle(sets, 5, n, budget=1).status == "inconclusive"

    def test_bound_capped(self):
        sets, n = self.five_cycle()
        with pytest.raises(ParameterError):
            find_short_k_cycle(sets, 13, n)

    @given(st.integers(4, 9).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(1, 2**n - 2), min_size=1, max_size=6, unique=True))))
    @settings(max_examples=200, deadline=None)
    def test_matches_exhaustive_search(self, args):
        n, sets = args
        want = oracles.has_k_cycle([oracles.vertex_set(s) for s in sets], 5, n)
        got = find_short_k_cycle(sets, 5, n)
        assert (got.status == "found") == want
        if want:
            assert oracles.is_k_cycle([oracles.vertex_set(s) for s in got.cycle], n)

    @pytest.mark.parametrize("n", [12, 14, 16])
    def test_long_cycle_concludes(self, n):
        big = max(components(enumerate_near_min_cuts(gen_cycle(n), Fraction(1, 40)), n), key=len)
        assert find_short_k_cycle(big, 12).status == "none"
