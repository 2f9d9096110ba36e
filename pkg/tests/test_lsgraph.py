import random

import pytest

from latinplex.core import gen_cyclic, gen_qstep, gen_two_step_pow2, validate
from latinplex.errors import (
    DimensionMismatchError,
    NotAPartitionError,
    OrderTooLargeError,
)
from latinplex.lsgraph import (
    build_graph,
    domatic_upper_bound,
    gamma_k_exact,
    gamma_k_lower_bound,
    has_mate_coloring,
    induced_degrees,
    is_k_dominating,
    is_lk_independent_dominating,
    quasi_3ds_correspondence,
    scan_3ds_sets,
    transversal_equivalence_check,
    verify_domatic_partition,
)
from latinplex.plexes import (
    check_transversal,
    enumerate_transversals,
    find_kplex,
    find_quasi_transversal,
    find_orthogonal_mate,
    max_disjoint_transversals,
)
from latinplex.constructions import domatic_family_cells

from conftest import corpus_up_to
from oracles import brute_is_k_dominating, neighbors_of


def all_cells(n):
    return [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]


class TestGraphStructure:
    def test_order1_is_k1(self):
        g = build_graph(gen_cyclic(1))
        assert g.num_vertices == 1
        assert g.degree((1, 1)) == 0

    def test_order2_is_complete(self):
        g = build_graph(validate([[1, 2], [2, 1]]))
        cells = all_cells(2)
        for a in cells:
            for b in cells:
                if a != b:
                    assert g.adjacent(a, b)
        assert all(g.degree(c) == 3 for c in cells)

    def test_order4_degree_9(self):
        g = build_graph(gen_cyclic(4))
        assert all(g.degree(c) == 9 for c in all_cells(4))

    def test_regularity_corpus(self):
        for label, sq in corpus_up_to(12):
            g = build_graph(sq)
            expected = 3 * (sq.order - 1)
            assert all(g.degree(c) == expected for c in all_cells(sq.order)), label

    def test_common_neighbors_row_pair_order4(self):
        g = build_graph(gen_cyclic(4))
        assert g.common_neighbor_count((1, 1), (1, 2)) == 4

    def test_common_neighbors_all_adjacent_pairs(self):
        # adjacent cells share exactly one of row/column/symbol and have
        # exactly n common neighbors
        for label, sq in corpus_up_to(8):
            n = sq.order
            if n < 2:
                continue
            g = build_graph(sq)
            cells = all_cells(n)
            for idx, a in enumerate(cells):
                for b in cells[idx + 1 :]:
                    if g.adjacent(a, b):
                        assert g.common_neighbor_count(a, b) == n, (label, a, b)

    def test_adjacency_matches_oracle(self):
        sq = gen_qstep(2, 3)
        g = build_graph(sq)
        for cell in all_cells(6):
            expected = neighbors_of(sq, cell)
            actual = {u for u in all_cells(6) if g.adjacent(cell, u)}
            assert actual == expected

    def test_materialized_refusal(self):
        with pytest.raises(OrderTooLargeError):
            build_graph(gen_cyclic(17), materialize=True)

    def test_implicit_mode_large_order(self):
        g = build_graph(gen_qstep(4, 9), materialize=False)
        assert g.adj is None
        assert g.degree((1, 1)) == 3 * 35


class TestDomination:
    def test_whole_vertex_set_dominates(self):
        for k in (1, 3, 9):
            g = build_graph(gen_cyclic(3))
            cert = is_k_dominating(g, all_cells(3), k)
            assert cert.verdict and not cert.deficient

    def test_transversal_is_3_dominating(self):
        sq = gen_two_step_pow2(2)
        g = build_graph(sq)
        t = find_kplex(sq, 1)
        assert is_k_dominating(g, t, 3).verdict

    def test_cyclic4_diagonal_not_3_dominating(self):
        sq = gen_cyclic(4)
        g = build_graph(sq)
        cert = is_k_dominating(g, [(i, i) for i in range(1, 5)], 3)
        assert not cert.verdict
        i, j, count = cert.deficient[0]
        assert count < 3

    def test_counts_match_oracle(self):
        rng = random.Random(3)
        for label, sq in corpus_up_to(5):
            n = sq.order
            g = build_graph(sq)
            cells = all_cells(n)
            for _ in range(20):
                pick = rng.sample(cells, rng.randint(1, min(n + 1, n * n)))
                for k in (1, 3):
                    assert (
                        is_k_dominating(g, pick, k).verdict
                        == brute_is_k_dominating(sq, pick, k)
                    ), label

    def test_certificate_json_shape(self):
        g = build_graph(gen_cyclic(4))
        cert = is_k_dominating(g, [(1, 1)], 3)
        obj = cert.to_json_dict()
        assert set(obj) == {"k", "set", "verdict", "deficient"}
        cert2 = is_lk_independent_dominating(g, [(1, 1)], 1, 3)
        assert "ell" in cert2.to_json_dict()


class TestIndependentDomination:
    def test_transversal_is_13_ids(self):
        for label, sq in corpus_up_to(6):
            census = enumerate_transversals(sq, cap=5)
            g = build_graph(sq)
            for t in census.witnesses:
                assert is_lk_independent_dominating(g, t, 1, 3).verdict, label

    def test_two_cells_one_row_not_1_independent(self):
        g = build_graph(gen_cyclic(4))
        cert = is_lk_independent_dominating(g, [(1, 1), (1, 2)], 1, 9)
        assert not cert.verdict

    def test_quasi_of_cyclic4_is_33_ids_not_23(self):
        # every quasi-transversal of the order-4 cyclic square has induced
        # maximum degree exactly 2: its three doubled pairs interlock, so it
        # is a (3,3)-IDS but never a (2,3)-IDS
        sq = gen_cyclic(4)
        g = build_graph(sq)
        quasi = find_quasi_transversal(sq)
        assert is_lk_independent_dominating(g, quasi, 3, 3).verdict
        assert not is_lk_independent_dominating(g, quasi, 2, 3).verdict
        assert max(induced_degrees(sq, quasi.cells).values()) == 2

    def test_some_quasi_of_qstep23_is_23_ids(self):
        # at order 6 quasi-transversals with pairwise-disjoint doubled pairs
        # exist and those are (2,3)-independent dominating
        sq = gen_qstep(2, 3)
        g = build_graph(sq)
        from latinplex.plexes import _all_quasi_cellsets

        assert any(
            is_lk_independent_dominating(g, q, 2, 3).verdict
            for q in _all_quasi_cellsets(sq)
        )


class TestGammaExact:
    def test_cyclic4_gamma3_is_5(self):
        g = build_graph(gen_cyclic(4))
        value, witness = gamma_k_exact(g, 3)
        assert value == 5
        assert is_k_dominating(g, witness, 3).verdict

    def test_twostep2_gamma3_is_4(self):
        g = build_graph(gen_two_step_pow2(2))
        value, witness = gamma_k_exact(g, 3)
        assert value == 4
        assert is_k_dominating(g, witness, 3).verdict

    def test_cyclic3_gamma3_is_3(self):
        g = build_graph(gen_cyclic(3))
        assert gamma_k_exact(g, 3)[0] == 3

    def test_lower_bound_formula(self):
        assert gamma_k_lower_bound(4, 3) == 4  # ceil(48/12)
        assert gamma_k_lower_bound(6, 3) == 6  # ceil(108/18)

    def test_matches_brute_force_tiny(self):
        from oracles import brute_gamma_k

        for sq in (gen_cyclic(2), gen_cyclic(3)):
            g = build_graph(sq)
            assert gamma_k_exact(g, 1)[0] == brute_gamma_k(sq, 1)

    def test_hint_cells_accepted(self):
        sq = gen_cyclic(4)
        g = build_graph(sq)
        quasi = find_quasi_transversal(sq)
        value, _ = gamma_k_exact(g, 3, upper_hint=5, hint_cells=quasi.cells)
        assert value == 5

    def test_refusal_above_6(self):
        g = build_graph(gen_cyclic(7))
        with pytest.raises(OrderTooLargeError):
            gamma_k_exact(g, 3)


class TestEquivalence:
    def test_all_transversals_of_cyclic5(self):
        sq = gen_cyclic(5)
        census = enumerate_transversals(sq, cap=100)
        for t in census.witnesses:
            report = transversal_equivalence_check(sq, t)
            assert report.agree
            assert report.is_transversal

    def test_random_sets_agree(self):
        rng = random.Random(11)
        for label, sq in corpus_up_to(5):
            n = sq.order
            cells = all_cells(n)
            for _ in range(200):
                pick = rng.sample(cells, n)
                report = transversal_equivalence_check(sq, pick)
                assert report.agree, (label, pick)

    def test_cyclic4_diagonal_all_false(self):
        report = transversal_equivalence_check(gen_cyclic(4), [(i, i) for i in range(1, 5)])
        assert report.agree
        assert not report.is_transversal

    def test_wrong_size_rejected(self):
        with pytest.raises(DimensionMismatchError):
            transversal_equivalence_check(gen_cyclic(4), [(1, 1)])


class TestDomaticVerification:
    def test_twostep2_decomposition_is_domatic(self):
        sq = gen_two_step_pow2(2)
        g = build_graph(sq)
        tau, family = max_disjoint_transversals(sq)
        assert tau == 4
        report = verify_domatic_partition(g, family, 3, strict=True)
        assert report.verdict
        assert report.implied_lower_bound == 4
        # equality: d_3 <= floor(16/4) = 4 once gamma_3 = 4 is known
        assert domatic_upper_bound(4, 4) == 4

    def test_domatic_family_cyclic4(self):
        sq = gen_cyclic(4)
        g = build_graph(sq)
        parts = domatic_family_cells(4)
        report = verify_domatic_partition(g, parts, 3, strict=True)
        assert report.verdict
        assert report.implied_lower_bound == 3

    def test_single_part_whole_vertex_set(self):
        g = build_graph(gen_cyclic(3))
        report = verify_domatic_partition(g, [all_cells(3)], 3, strict=True)
        assert report.verdict

    def test_overlap_rejected_in_strict_mode(self):
        g = build_graph(gen_cyclic(3))
        with pytest.raises(NotAPartitionError):
            verify_domatic_partition(g, [all_cells(3), [(1, 1)]], 1, strict=True)

    def test_partial_family_flagged(self):
        sq = gen_two_step_pow2(2)
        g = build_graph(sq)
        _, family = max_disjoint_transversals(sq)
        report = verify_domatic_partition(g, family[:2], 3, strict=False)
        assert report.verdict
        assert not report.is_partition
        assert report.implied_lower_bound == 2


class TestMateColoring:
    def test_twostep2_colorable(self):
        sq = gen_two_step_pow2(2)
        ok, coloring = has_mate_coloring(sq)
        assert ok
        g = build_graph(sq)
        for a in all_cells(4):
            for b in all_cells(4):
                if a != b and g.adjacent(a, b):
                    assert coloring[a] != coloring[b]
        assert len(set(coloring.values())) == 4

    def test_cyclic4_not_n_colorable(self):
        ok, coloring = has_mate_coloring(gen_cyclic(4))
        assert not ok and coloring is None

    def test_order1(self):
        assert has_mate_coloring(gen_cyclic(1))[0]

    def test_matches_tau_and_mate(self):
        for label, sq in corpus_up_to(6):
            tau, _ = max_disjoint_transversals(sq)
            mate = find_orthogonal_mate(sq)
            colorable, _ = has_mate_coloring(sq)
            assert colorable == (tau == sq.order) == (mate is not None), label


class TestQuasi3dsCorrespondence:
    def test_quasi_of_cyclic4_is_3ds_of_size_5(self):
        sq = gen_cyclic(4)
        quasi = find_quasi_transversal(sq)
        report = quasi_3ds_correspondence(sq, quasi)
        assert report.is_quasi and report.is_3ds and report.forward_ok

    def test_every_quasi_is_3ds_small_orders(self):
        from latinplex.plexes import _all_quasi_cellsets

        for n in (3, 4, 5):
            sq = gen_cyclic(n)
            g = build_graph(sq, materialize=False)
            for q in _all_quasi_cellsets(sq):
                assert is_k_dominating(g, q, 3).verdict, (n, q.cells)

    def test_exhaustive_scan_cyclic4(self):
        # every 5-cell 3-dominating set of the order-4 cyclic square turns
        # out to be a quasi-transversal (96 of each); reported, not assumed
        total, quasi_count, examples = scan_3ds_sets(gen_cyclic(4), 5)
        assert total == 96
        assert quasi_count == 96
        assert examples == ()

    def test_order3_quasi_is_3ds_of_size_4(self):
        sq = gen_cyclic(3)
        quasi = find_quasi_transversal(sq)
        report = quasi_3ds_correspondence(sq, quasi)
        assert report.is_quasi and report.is_3ds
        assert report.scan_total_3ds is not None  # auto scan at order <= 4

    def test_scan_refusal_above_5(self):
        with pytest.raises(OrderTooLargeError):
            scan_3ds_sets(gen_cyclic(6), 7)

    def test_wrong_size_rejected(self):
        with pytest.raises(DimensionMismatchError):
            quasi_3ds_correspondence(gen_cyclic(4), [(1, 1), (2, 2)])


class TestBoundChain:
    @pytest.mark.parametrize("n", [4, 6])
    def test_cyclic_even_gamma_chain(self, n):
        # no transversal -> no 3DS of size n (equivalence) -> gamma_3 >= n+1,
        # and the explicit quasi witness gives gamma_3 <= n+1
        sq = gen_cyclic(n)
        assert enumerate_transversals(sq, cap=0).count == 0
        quasi = find_quasi_transversal(sq)
        g = build_graph(sq)
        assert is_k_dominating(g, quasi, 3).verdict
        if n == 4:
            assert gamma_k_exact(g, 3)[0] == n + 1

    def test_dk_upper_bound_consistency(self):
        # family size never exceeds floor(n^2/gamma_k) when gamma is known
        sq = gen_cyclic(4)
        g = build_graph(sq)
        gamma, _ = gamma_k_exact(g, 3)
        parts = domatic_family_cells(4)
        report = verify_domatic_partition(g, parts, 3)
        assert report.implied_lower_bound <= domatic_upper_bound(4, gamma)
