import random

import pytest

from latinplex.core import gen_cyclic, gen_qstep, gen_two_step_pow2, validate
from latinplex.errors import (
    InvalidCellSetError,
    InvalidPartialError,
    InvalidPlexError,
    OrderTooLargeError,
)
from latinplex.plexes import (
    COMPLETABLE,
    EXTENDIBLE,
    KIND_KPLEX,
    KIND_NEAR,
    KIND_QUASI,
    KIND_TRANSVERSAL,
    NON_EXTENDIBLE,
    CellSet,
    check_kplex,
    check_near_transversal,
    check_partial_transversal,
    check_quasi_transversal,
    check_transversal,
    complement_plex,
    conjecture_sweep,
    enumerate_transversals,
    extendibility_report,
    find_kplex,
    find_near_transversal,
    find_orthogonal_mate,
    find_quasi_transversal,
    max_disjoint_quasi_transversals,
    max_disjoint_transversals,
    quasi_profile,
)

from conftest import corpus_up_to
from oracles import permutation_diagonal_count


class TestCellSet:
    def test_cells_sorted_and_deduped(self):
        cs = CellSet(3, ((3, 1), (1, 2), (2, 3)), KIND_TRANSVERSAL)
        assert cs.cells == ((1, 2), (2, 3), (3, 1))

    def test_duplicate_cells_rejected(self):
        with pytest.raises(InvalidCellSetError):
            CellSet(3, ((1, 1), (1, 1), (2, 2)), KIND_TRANSVERSAL)

    def test_out_of_range_rejected(self):
        with pytest.raises(InvalidCellSetError):
            CellSet(3, ((1, 4), (2, 2), (3, 3)), KIND_TRANSVERSAL)

    @pytest.mark.parametrize(
        "kind,count",
        [(KIND_TRANSVERSAL, 3), (KIND_NEAR, 2), (KIND_QUASI, 4)],
    )
    def test_cardinality_enforced(self, kind, count):
        cells = tuple((i, i) for i in range(1, count))  # one short
        with pytest.raises(InvalidCellSetError):
            CellSet(3, cells, kind)

    def test_kplex_needs_k(self):
        with pytest.raises(InvalidCellSetError):
            CellSet(2, ((1, 1), (2, 2)), KIND_KPLEX)

    def test_json_round_trip(self):
        cs = CellSet(4, ((1, 1), (2, 2), (3, 3), (4, 4), (1, 2), (2, 1), (3, 4), (4, 3)),
                     KIND_KPLEX, 2)
        assert CellSet.from_json_dict(4, cs.to_json_dict()) == cs


class TestCheckers:
    def test_constant_symbol_diagonal_rejected(self):
        # cells (1,1),(2,3),(3,2) of the cyclic square all carry symbol 1
        sq = gen_cyclic(3)
        ok, why = check_transversal(sq, [(1, 1), (2, 3), (3, 2)])
        assert not ok
        assert "symbol 1" in why

    def test_main_diagonal_odd_cyclic(self):
        ok, why = check_transversal(gen_cyclic(3), [(1, 1), (2, 2), (3, 3)])
        assert ok, why

    def test_empty_set_fails(self):
        ok, why = check_transversal(gen_cyclic(3), [])
        assert not ok
        assert "expected 3" in why

    def test_whole_square_is_n_plex(self):
        for _, sq in corpus_up_to(5):
            n = sq.order
            cells = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
            assert check_kplex(sq, cells, n)[0]

    def test_kplex_matches_transversal_at_k1(self):
        rng = random.Random(1)
        for _, sq in corpus_up_to(6):
            n = sq.order
            cells = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
            for _ in range(50):
                pick = rng.sample(cells, n)
                assert check_transversal(sq, pick)[0] == check_kplex(sq, pick, 1)[0]

    def test_found_two_plex_validates(self):
        sq = gen_cyclic(4)
        plex = find_kplex(sq, 2)
        assert plex is not None
        assert check_kplex(sq, plex, 2)[0]

    def test_order3_quasi_exists_and_validates(self):
        sq = gen_cyclic(3)
        quasi = find_quasi_transversal(sq)
        assert quasi is not None
        assert check_quasi_transversal(sq, quasi)[0]

    def test_transversal_plus_duplicate_cell_is_not_quasi(self):
        sq = gen_cyclic(3)
        cells = [(1, 1), (2, 2), (3, 3), (1, 1)]
        ok, why = check_quasi_transversal(sq, cells)
        assert not ok
        assert "duplicate" in why

    def test_quasi_vacuous_below_order_3(self):
        sq = validate([[1, 2], [2, 1]])
        ok, why = check_quasi_transversal(sq, [(1, 1), (1, 2), (2, 1)])
        assert not ok
        assert "vacuous" in why

    def test_near_from_dropped_transversal_cell(self):
        sq = gen_cyclic(5)
        t = find_kplex(sq, 1)
        for drop in t.cells:
            rest = [c for c in t.cells if c != drop]
            assert check_near_transversal(sq, rest)[0]

    def test_near_search_on_cyclic4(self):
        sq = gen_cyclic(4)
        near = find_near_transversal(sq)
        assert near is not None
        assert check_near_transversal(sq, near)[0]

    def test_repeated_symbol_not_near(self):
        sq = gen_cyclic(4)
        ok, why = check_near_transversal(sq, [(1, 1), (2, 4), (3, 3)])
        assert not ok  # symbols 1,1,1

    def test_quasi_profile(self):
        sq = gen_cyclic(4)
        quasi = find_quasi_transversal(sq)
        dr, dc, ds = quasi_profile(sq, quasi)
        rows = [r for r, _ in quasi.cells]
        assert rows.count(dr) == 2
        syms = [sq.symbol(r, c) for r, c in quasi.cells]
        assert syms.count(ds) == 2


class TestEnumeration:
    @pytest.mark.parametrize(
        "square,count",
        [
            (gen_cyclic(3), 3),
            (gen_cyclic(4), 0),
            (gen_two_step_pow2(2), 8),
            (gen_cyclic(5), 15),
        ],
    )
    def test_frozen_counts(self, square, count):
        # values independently derived from the permutation-diagonal oracle
        assert enumerate_transversals(square).count == count
        assert permutation_diagonal_count(square) == count

    def test_oracle_equivalence_corpus(self):
        for label, sq in corpus_up_to(5):
            assert (
                enumerate_transversals(sq).count == permutation_diagonal_count(sq)
            ), label

    def test_even_order_parity(self):
        for label, sq in corpus_up_to(6):
            if sq.order in (4, 6):
                assert enumerate_transversals(sq).count % 2 == 0, label

    def test_witness_cap_and_truncation(self):
        census = enumerate_transversals(gen_cyclic(5), cap=4)
        assert census.count == 15
        assert len(census.witnesses) == 4
        assert census.truncated
        full = enumerate_transversals(gen_cyclic(5), cap=100)
        assert len(full.witnesses) == 15
        assert not full.truncated

    def test_witnesses_are_valid_and_lex_ordered(self):
        census = enumerate_transversals(gen_cyclic(7), cap=50)
        cols = [tuple(c for _, c in w.cells) for w in census.witnesses]
        assert cols == sorted(cols)
        for w in census.witnesses:
            assert check_transversal(gen_cyclic(7), w)[0]

    def test_mitm_agrees_with_dfs(self):
        # orders >= 10 switch to the meet-in-the-middle counter
        from latinplex.plexes import _dfs_count_collect, _mitm_count

        for sq in (gen_cyclic(9), gen_two_step_pow2(3), gen_qstep(3, 3)):
            grid = sq.cells0
            assert _mitm_count(grid, sq.order) == _dfs_count_collect(grid, sq.order, 0)[0]

    def test_threads_match_sequential(self):
        for sq in (gen_cyclic(5), gen_two_step_pow2(3)):
            seq = enumerate_transversals(sq, cap=10, threads=1)
            par = enumerate_transversals(sq, cap=10, threads=4)
            assert seq == par

    def test_order_refusal(self):
        with pytest.raises(OrderTooLargeError):
            enumerate_transversals(gen_cyclic(17))

    def test_determinism(self):
        a = enumerate_transversals(gen_cyclic(7), cap=20)
        b = enumerate_transversals(gen_cyclic(7), cap=20)
        assert a == b


class TestKPlexSearch:
    def test_cyclic4_two_plex_found(self):
        assert find_kplex(gen_cyclic(4), 2) is not None

    def test_cyclic4_transversal_not_found(self):
        assert find_kplex(gen_cyclic(4), 1) is None

    def test_cyclic4_three_plex_not_found(self):
        # complement of a 3-plex would be a transversal, so none can exist
        assert find_kplex(gen_cyclic(4), 3) is None

    def test_qstep23_three_plex_not_found(self):
        # odd q, odd k, even m: no k-transversal
        assert find_kplex(gen_qstep(2, 3), 3) is None

    def test_lexicographically_least(self):
        plex = find_kplex(gen_cyclic(4), 2)
        again = find_kplex(gen_cyclic(4), 2)
        assert plex == again
        assert plex.cells[0] == (1, 1)

    def test_refuses_large_order(self):
        with pytest.raises(OrderTooLargeError):
            find_kplex(gen_cyclic(13), 2)

    def test_bad_k(self):
        with pytest.raises(InvalidPlexError):
            find_kplex(gen_cyclic(4), 5)


class TestComplement:
    def test_transversal_complement_is_2plex(self):
        sq = gen_cyclic(3)
        t = find_kplex(sq, 1)
        comp = complement_plex(sq, t)
        assert comp.k == 2
        assert check_kplex(sq, comp, 2)[0]

    def test_involution(self):
        sq = gen_cyclic(4)
        plex = find_kplex(sq, 2)
        assert complement_plex(sq, complement_plex(sq, plex)) == plex

    def test_whole_square_complement_empty(self):
        sq = gen_cyclic(3)
        whole = CellSet(3, tuple((i, j) for i in range(1, 4) for j in range(1, 4)),
                        KIND_KPLEX, 3)
        comp = complement_plex(sq, whole)
        assert comp.k == 0
        assert len(comp) == 0

    def test_invalid_input_rejected(self):
        sq = gen_cyclic(4)
        bad = CellSet(4, ((1, 1), (1, 2), (2, 1), (2, 2), (3, 3), (3, 4), (4, 3), (4, 4)),
                      KIND_KPLEX, 2)
        with pytest.raises(InvalidPlexError):
            complement_plex(sq, bad)


class TestPacking:
    def test_twostep2_tau_4(self):
        tau, family = max_disjoint_transversals(gen_two_step_pow2(2))
        assert tau == 4
        used = set()
        for t in family:
            assert check_transversal(gen_two_step_pow2(2), t)[0]
            assert not used & set(t.cells)
            used |= set(t.cells)

    def test_cyclic4_tau_0(self):
        assert max_disjoint_transversals(gen_cyclic(4))[0] == 0

    def test_cyclic3_tau_3(self):
        # group table: one transversal forces a full decomposition
        assert max_disjoint_transversals(gen_cyclic(3))[0] == 3

    def test_tau_bounds_and_mate_equivalence(self):
        for label, sq in corpus_up_to(6):
            tau, _ = max_disjoint_transversals(sq)
            assert 0 <= tau <= sq.order, label
            mate = find_orthogonal_mate(sq)
            assert (mate is not None) == (tau == sq.order), label

    def test_refusal_above_8(self):
        with pytest.raises(OrderTooLargeError):
            max_disjoint_transversals(gen_cyclic(9))


class TestMate:
    def test_twostep2_mate(self):
        sq = gen_two_step_pow2(2)
        mate = find_orthogonal_mate(sq)
        assert mate is not None
        pairs = {
            (sq.symbol(i, j), mate.symbol(i, j))
            for i in range(1, 5)
            for j in range(1, 5)
        }
        assert len(pairs) == 16

    def test_cyclic4_no_mate(self):
        assert find_orthogonal_mate(gen_cyclic(4)) is None

    def test_order1_mate(self):
        assert find_orthogonal_mate(gen_cyclic(1)).rows() == [[1]]

    def test_deterministic(self):
        assert find_orthogonal_mate(gen_cyclic(5)) == find_orthogonal_mate(gen_cyclic(5))


class TestExtendibility:
    def test_empty_partial_completable_in_cyclic3(self):
        assert extendibility_report(gen_cyclic(3), []) == COMPLETABLE

    def test_full_transversal_completable(self):
        t = find_kplex(gen_cyclic(3), 1)
        assert extendibility_report(gen_cyclic(3), t) == COMPLETABLE

    def test_near_in_cyclic4_never_completable(self):
        sq = gen_cyclic(4)
        near = find_near_transversal(sq)
        # length n-1 with no transversal in the square: the one candidate
        # extension cell cannot work
        assert extendibility_report(sq, near) == NON_EXTENDIBLE

    def test_all_nears_of_cyclic4_not_completable(self):
        # the square has no transversal, so every length-3 partial is stuck
        import itertools

        sq = gen_cyclic(4)
        cells = [(i, j) for i in range(1, 5) for j in range(1, 5)]
        nears = [
            comb
            for comb in itertools.combinations(cells, 3)
            if check_near_transversal(sq, comb)[0]
        ]
        assert nears
        for near in nears:
            assert extendibility_report(sq, near) == NON_EXTENDIBLE

    def test_extendible_middle_state(self):
        sq = gen_cyclic(4)
        report = extendibility_report(sq, [(1, 1)])
        assert report == EXTENDIBLE

    def test_invalid_partial_rejected(self):
        with pytest.raises(InvalidPartialError):
            extendibility_report(gen_cyclic(4), [(1, 1), (1, 2)])


class TestQuasiNearSearch:
    def test_constrained_near(self):
        # (missing row 3, column 1, symbol 6) is realizable in qstep(2,3)
        sq = gen_qstep(2, 3)
        near = find_near_transversal(sq, missing_row=3, missing_col=1, missing_symbol=6)
        assert near is not None
        rows = {r for r, _ in near.cells}
        cols = {c for _, c in near.cells}
        syms = {sq.symbol(r, c) for r, c in near.cells}
        assert 3 not in rows and 1 not in cols and 6 not in syms

    def test_constrained_near_infeasible_returns_none(self):
        # in the cyclic square of order 4 the cell set forbidding everything
        # in sight leaves no room: missing symbol equal to every diagonal
        sq = gen_cyclic(3)
        # a transversal exists through every cell, so only impossible
        # combinations return None: demand two contradictory constraints
        near = find_near_transversal(
            sq, missing_row=1, missing_col=1, missing_symbol=2,
            forbidden=frozenset({(2, 2), (2, 3), (3, 2), (3, 3)}),
        )
        assert near is None

    def test_forbidden_cells_respected(self):
        sq = gen_cyclic(5)
        first = find_near_transversal(sq)
        second = find_near_transversal(sq, forbidden=frozenset(first.cells))
        assert second is not None
        assert not set(first.cells) & set(second.cells)

    def test_quasi_below_order3_is_none(self):
        assert find_quasi_transversal(validate([[1, 2], [2, 1]])) is None

    def test_quasi_deterministic(self):
        a = find_quasi_transversal(gen_cyclic(6))
        b = find_quasi_transversal(gen_cyclic(6))
        assert a == b

    def test_randomized_quasi_large_order(self):
        sq = gen_qstep(2, 7)
        rng = random.Random(0)
        quasi = find_quasi_transversal(sq, rng=rng) if sq.order > 12 else find_quasi_transversal(sq)
        assert quasi is not None
        assert check_quasi_transversal(sq, quasi)[0]

    def test_exhaustive_refusal_above_12(self):
        with pytest.raises(OrderTooLargeError):
            find_quasi_transversal(gen_cyclic(14))


class TestDisjointQuasis:
    def test_cyclic4_reaches_pigeonhole_bound(self):
        count, family = max_disjoint_quasi_transversals(gen_cyclic(4))
        assert count == 3  # floor(16/5)
        used = set()
        for q in family:
            assert check_quasi_transversal(gen_cyclic(4), q)[0]
            assert not used & set(q.cells)
            used |= set(q.cells)

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_never_exceeds_bound(self, n):
        sq = gen_cyclic(n)
        count, _ = max_disjoint_quasi_transversals(sq)
        assert count <= (n * n) // (n + 1)

    def test_refusal_above_6(self):
        with pytest.raises(OrderTooLargeError):
            max_disjoint_quasi_transversals(gen_cyclic(7))


class TestSweep:
    def test_cyclic_orders_2_to_8(self):
        report = conjecture_sweep(2, 8, generators=("cyclic",))
        assert report.counterexample is None
        by_order = {row.order: row for row in report.rows}
        assert by_order[2].near and by_order[2].two_plex and not by_order[2].quasi
        for n in range(3, 9):
            row = by_order[n]
            assert row.near and row.quasi and row.two_plex

    def test_qstep23_row(self):
        report = conjecture_sweep(6, 6, generators=("qstep",))
        labels = [r.label for r in report.rows]
        assert "qstep(2,3)" in labels
        assert all(r.near and r.quasi and r.two_plex for r in report.rows)

    def test_qstep_sweep_to_order_12(self):
        report = conjecture_sweep(4, 12, generators=("qstep",))
        labels = [r.label for r in report.rows]
        for expected in ("qstep(2,3)", "qstep(4,3)", "qstep(2,5)"):
            assert expected in labels
        assert report.counterexample is None

    def test_sweep_refusal_above_12(self):
        with pytest.raises(OrderTooLargeError):
            conjecture_sweep(13, 13)

    def test_isotopes_of_cyclic7(self):
        report = conjecture_sweep(7, 7, generators=("isotopes",), isotopes=20, seed=0)
        assert len(report.rows) == 20
        assert report.counterexample is None
        assert all(r.near and r.quasi and r.two_plex for r in report.rows)

    def test_deterministic(self):
        a = conjecture_sweep(3, 5, isotopes=3, seed=7)
        b = conjecture_sweep(3, 5, isotopes=3, seed=7)
        assert a == b

    def test_counterexample_halts(self, monkeypatch):
        # no real counterexample exists; force one to exercise the halt path
        import latinplex.plexes as plexes_mod

        monkeypatch.setattr(plexes_mod, "find_near_transversal", lambda sq, **kw: None)
        report = plexes_mod.conjecture_sweep(3, 5, generators=("cyclic",))
        assert report.counterexample is not None
        assert report.counterexample.order == 3
        assert report.rows[-1] == report.counterexample
