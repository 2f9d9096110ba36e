"""Validators and exhaustive search engines for transversal-like cell sets.

A transversal hits every row, column and symbol once; a k-plex k times; a
near-transversal is a partial transversal of length n-1; a quasi-transversal
has n+1 cells with exactly one doubled row, doubled column and doubled
symbol (every symbol present).  Quasi-transversals are treated as undefined
below order 3, matching the scope of every statement that uses them.

Search engines are exhaustive and deterministic: a None result certifies
nonexistence, and engines refuse (OrderTooLargeError) rather than return an
uncertified answer.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .core import MAX_EXHAUSTIVE_ORDER, LatinSquare
from .errors import (
    InvalidCellSetError,
    InvalidPartialError,
    InvalidPlexError,
    OrderTooLargeError,
)

KIND_TRANSVERSAL = "transversal"
KIND_PARTIAL = "partial-transversal"
KIND_NEAR = "near-transversal"
KIND_QUASI = "quasi-transversal"
KIND_KPLEX = "k-plex"
KIND_CELLS = "cell-set"  # unconstrained cardinality; used for domination sets

_KINDS = (KIND_TRANSVERSAL, KIND_PARTIAL, KIND_NEAR, KIND_QUASI, KIND_KPLEX, KIND_CELLS)

#: transversal-list ceiling for the exact set-packing engine
MAX_PACKING_LIST = 100_000


@dataclass(frozen=True)
class CellSet:
    """A set of (row, column) cells of an order-n square, tagged with intent.

    Cells are 1-based and stored sorted row-major.  Cardinality must match
    the kind: n for a transversal, n-1 near, n+1 quasi, n*k for a k-plex;
    partial-transversal and cell-set are unconstrained (up to n / n^2).
    """

    square_order: int
    cells: tuple[tuple[int, int], ...]
    kind: str
    k: int | None = None

    def __post_init__(self):
        n = self.square_order
        cells = tuple(sorted((int(r), int(c)) for r, c in self.cells))
        object.__setattr__(self, "cells", cells)
        if self.kind not in _KINDS:
            raise InvalidCellSetError(f"unknown kind {self.kind!r}")
        if len(set(cells)) != len(cells):
            raise InvalidCellSetError("duplicate cells")
        for r, c in cells:
            if not (1 <= r <= n and 1 <= c <= n):
                raise InvalidCellSetError(f"cell ({r},{c}) outside 1..{n}")
        m = len(cells)
        if self.kind == KIND_TRANSVERSAL and m != n:
            raise InvalidCellSetError(f"transversal needs {n} cells, got {m}")
        if self.kind == KIND_NEAR and m != n - 1:
            raise InvalidCellSetError(f"near-transversal needs {n - 1} cells, got {m}")
        if self.kind == KIND_QUASI and m != n + 1:
            raise InvalidCellSetError(f"quasi-transversal needs {n + 1} cells, got {m}")
        if self.kind == KIND_KPLEX:
            if self.k is None or not 0 <= self.k <= n:
                raise InvalidCellSetError(f"k-plex needs 0 <= k <= {n}")
            if m != n * self.k:
                raise InvalidCellSetError(f"{self.k}-plex needs {n * self.k} cells, got {m}")
        if self.kind == KIND_PARTIAL and m > n:
            raise InvalidCellSetError(f"partial transversal cannot exceed {n} cells")

    def __len__(self) -> int:
        return len(self.cells)

    def to_json_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.k is not None:
            out["k"] = self.k
        out["cells"] = [[r, c] for r, c in self.cells]
        return out

    @classmethod
    def from_json_dict(cls, order: int, obj: dict) -> "CellSet":
        return cls(order, tuple((r, c) for r, c in obj["cells"]), obj["kind"], obj.get("k"))


def _as_cells(cells) -> tuple[tuple[int, int], ...]:
    if isinstance(cells, CellSet):
        return cells.cells
    return tuple(sorted((int(r), int(c)) for r, c in cells))


def _in_range(order: int, cells) -> str | None:
    for r, c in cells:
        if not (1 <= r <= order and 1 <= c <= order):
            return f"cell ({r},{c}) outside 1..{order}"
    if len(set(cells)) != len(cells):
        dup = next(x for x, m in Counter(cells).items() if m > 1)
        return f"duplicate cell {dup}"
    return None


def check_transversal(square: LatinSquare, cells) -> tuple[bool, str | None]:
    """True iff the cells cover every row, column and symbol exactly once."""
    return check_kplex(square, cells, 1)


def check_kplex(square: LatinSquare, cells, k: int) -> tuple[bool, str | None]:
    """True iff every row, column and symbol occurs exactly k times."""
    n = square.order
    cs = _as_cells(cells)
    bad = _in_range(n, cs)
    if bad:
        return False, bad
    if len(cs) != n * k:
        return False, f"expected {n * k} cells for a {k}-plex of order {n}, got {len(cs)}"
    rows = Counter()
    cols = Counter()
    syms = Counter()
    grid = square.cells0
    for r, c in cs:
        rows[r] += 1
        cols[c] += 1
        syms[grid[r - 1][c - 1] + 1] += 1
    for i in range(1, n + 1):
        if rows[i] != k:
            return False, f"row {i} occurs {rows[i]} times, expected {k}"
        if cols[i] != k:
            return False, f"column {i} occurs {cols[i]} times, expected {k}"
        if syms[i] != k:
            return False, f"symbol {i} occurs {syms[i]} times, expected {k}"
    return True, None


def check_partial_transversal(square: LatinSquare, cells) -> tuple[bool, str | None]:
    """True iff rows, columns and symbols are pairwise distinct (any length <= n)."""
    n = square.order
    cs = _as_cells(cells)
    bad = _in_range(n, cs)
    if bad:
        return False, bad
    if len(cs) > n:
        return False, f"{len(cs)} cells exceed order {n}"
    grid = square.cells0
    rows, cols, syms = set(), set(), set()
    for r, c in cs:
        s = grid[r - 1][c - 1] + 1
        if r in rows:
            return False, f"row {r} used twice"
        if c in cols:
            return False, f"column {c} used twice"
        if s in syms:
            return False, f"symbol {s} used twice"
        rows.add(r)
        cols.add(c)
        syms.add(s)
    return True, None


def check_near_transversal(square: LatinSquare, cells) -> tuple[bool, str | None]:
    """True iff the cells form a partial transversal of length exactly n-1."""
    n = square.order
    cs = _as_cells(cells)
    if len(cs) != n - 1:
        return False, f"near-transversal needs {n - 1} cells, got {len(cs)}"
    return check_partial_transversal(square, cs)


def check_quasi_transversal(square: LatinSquare, cells) -> tuple[bool, str | None]:
    """True iff n+1 cells double exactly one row, one column and one symbol.

    All n symbols appear (n-1 once, one twice); likewise rows and columns.
    For order < 3 the notion is treated as vacuous and the check fails with
    a diagnosis rather than an error.
    """
    n = square.order
    if n < 3:
        return False, "quasi-transversal is vacuous below order 3"
    cs = _as_cells(cells)
    bad = _in_range(n, cs)
    if bad:
        return False, bad
    if len(cs) != n + 1:
        return False, f"expected {n + 1} cells, got {len(cs)}"
    grid = square.cells0
    rows = Counter(r for r, _ in cs)
    cols = Counter(c for _, c in cs)
    syms = Counter(grid[r - 1][c - 1] + 1 for r, c in cs)
    for name, cnt in (("row", rows), ("column", cols), ("symbol", syms)):
        multiplicities = sorted(cnt.values())
        if len(cnt) != n or multiplicities != [1] * (n - 1) + [2]:
            over = [x for x, m in cnt.items() if m > 2]
            if over:
                return False, f"{name} {over[0]} occurs {cnt[over[0]]} times"
            missing = [x for x in range(1, n + 1) if cnt[x] == 0]
            if missing:
                return False, f"{name} {missing[0]} does not occur"
            doubles = [x for x, m in cnt.items() if m == 2]
            return False, f"{name}s doubled more than once: {sorted(doubles)}"
    return True, None


def quasi_profile(square: LatinSquare, cells) -> tuple[int, int, int]:
    """(doubled row, doubled column, doubled symbol) of a valid quasi-transversal."""
    ok, why = check_quasi_transversal(square, cells)
    if not ok:
        raise InvalidCellSetError(f"not a quasi-transversal: {why}")
    cs = _as_cells(cells)
    grid = square.cells0
    rows = Counter(r for r, _ in cs)
    cols = Counter(c for _, c in cs)
    syms = Counter(grid[r - 1][c - 1] + 1 for r, c in cs)
    return (
        next(x for x, m in rows.items() if m == 2),
        next(x for x, m in cols.items() if m == 2),
        next(x for x, m in syms.items() if m == 2),
    )


# ---------------------------------------------------------------------------
# transversal enumeration


@dataclass(frozen=True)
class PlexCensus:
    """Exact count of an enumeration plus a capped list of witnesses."""

    square_order: int
    kind: str
    count: int
    witnesses: tuple[CellSet, ...] = ()
    truncated: bool = False

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "count": self.count,
            "truncated": self.truncated,
            "witnesses": [w.to_json_dict() for w in self.witnesses],
        }


def _dfs_count_collect(grid, n: int, cap: int, first_col: int | None = None,
                       stop_at_cap: bool = False):
    """Row-by-row backtracking over columns with column/symbol bitmasks.

    Returns (count, list of column tuples).  Witnesses are emitted in
    lexicographic order of the column sequence; counting is exhaustive
    unless stop_at_cap asks for the first `cap` witnesses only.
    """
    count = 0
    found: list[tuple[int, ...]] = []
    path = [0] * n

    def rec(row: int, colmask: int, symmask: int) -> bool:
        nonlocal count
        if row == n:
            count += 1
            if len(found) < cap:
                found.append(tuple(path))
            return stop_at_cap and cap > 0 and len(found) >= cap
        grow = grid[row]
        for c in range(n):
            bit = 1 << c
            if colmask & bit:
                continue
            sbit = 1 << grow[c]
            if symmask & sbit:
                continue
            path[row] = c
            if rec(row + 1, colmask | bit, symmask | sbit):
                return True
        return False

    if first_col is None:
        rec(0, 0, 0)
    else:
        bit = 1 << first_col
        path[0] = first_col
        rec(1, bit, 1 << grid[0][first_col])
    return count, found


def _mitm_count(grid, n: int) -> int:
    """Meet-in-the-middle exact count: top and bottom half-row tables joined
    on complementary column and symbol masks."""
    full = (1 << n) - 1
    h = n // 2

    def table(rows):
        out: dict[tuple[int, int], int] = {}

        def rec(i: int, colmask: int, symmask: int):
            if i == len(rows):
                key = (colmask, symmask)
                out[key] = out.get(key, 0) + 1
                return
            grow = grid[rows[i]]
            for c in range(n):
                bit = 1 << c
                if colmask & bit:
                    continue
                sbit = 1 << grow[c]
                if symmask & sbit:
                    continue
                rec(i + 1, colmask | bit, symmask | sbit)

        rec(0, 0, 0)
        return out

    top = table(range(h))
    total = 0
    bottom = table(range(h, n))
    for (cm, sm), mult in bottom.items():
        total += mult * top.get((full ^ cm, full ^ sm), 0)
    return total


def _cols_to_cellset(order: int, cols: tuple[int, ...]) -> CellSet:
    return CellSet(order, tuple((i + 1, c + 1) for i, c in enumerate(cols)), KIND_TRANSVERSAL)


def enumerate_transversals(square: LatinSquare, cap: int = 10, threads: int = 1) -> PlexCensus:
    """Exact transversal count with the first `cap` witnesses in lex order.

    The count is certified by exhaustion: plain backtracking by default,
    with a meet-in-the-middle join at orders 10..12 where it is an order of
    magnitude faster; orders above MAX_EXHAUSTIVE_ORDER are refused.
    """
    n = square.order
    if n > MAX_EXHAUSTIVE_ORDER:
        raise OrderTooLargeError(f"order {n} exceeds exhaustive limit {MAX_EXHAUSTIVE_ORDER}")
    grid = square.cells0
    if 10 <= n <= 12:  # join tables stay small here; beyond, DFS avoids the memory
        count = _mitm_count(grid, n)
        found: list[tuple[int, ...]] = []
        if count and cap:
            _, found = _dfs_count_collect(grid, n, cap, stop_at_cap=True)
    elif threads > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=min(threads, n)) as pool:
            parts = list(pool.map(lambda c: _dfs_count_collect(grid, n, cap, first_col=c), range(n)))
        count = sum(p[0] for p in parts)
        found = [w for p in parts for w in p[1]][:cap]
    else:
        count, found = _dfs_count_collect(grid, n, cap)
    witnesses = tuple(_cols_to_cellset(n, w) for w in found)
    return PlexCensus(n, KIND_TRANSVERSAL, count, witnesses, truncated=count > len(witnesses))


# ---------------------------------------------------------------------------
# k-plex search


def find_kplex(square: LatinSquare, k: int) -> CellSet | None:
    """Lexicographically least k-plex, or None certified by exhaustion.

    Rows are processed in order, each choosing k columns.  Pruning: basic
    per-column and per-symbol quotas, plus a supply check that every
    deficient symbol still has enough remaining rows whose cell for it sits
    in a non-full column (and dually for columns).  Pruning only removes
    provably dead branches, so the first solution stays the lex least.
    """
    n = square.order
    if n > 12:
        raise OrderTooLargeError(f"k-plex engine is exhaustive only up to order 12, got {n}")
    if not 1 <= k <= n:
        raise InvalidPlexError(f"k must be in 1..{n}")
    grid = square.cells0
    sym_col = [[0] * n for _ in range(n)]  # column of symbol s in row r
    for r in range(n):
        for c in range(n):
            sym_col[grid[r][c]][r] = c
    col_cnt = [0] * n
    sym_cnt = [0] * n
    chosen: list[tuple[int, ...]] = []

    def supplies_hold(row: int, left: int) -> bool:
        for s in range(n):
            need = k - sym_cnt[s]
            if need > left:
                return False
            if need > 0:
                cols_of_s = sym_col[s]
                avail = 0
                for r in range(row + 1, n):
                    if col_cnt[cols_of_s[r]] < k:
                        avail += 1
                        if avail == need:
                            break
                if avail < need:
                    return False
        for c in range(n):
            need = k - col_cnt[c]
            if need > left:
                return False
            if need > 0:
                avail = 0
                for r in range(row + 1, n):
                    if sym_cnt[grid[r][c]] < k:
                        avail += 1
                        if avail == need:
                            break
                if avail < need:
                    return False
        return True

    def rec(row: int) -> bool:
        if row == n:
            return True
        left = n - row - 1
        for combo in itertools.combinations(range(n), k):
            ok = True
            for c in combo:
                if col_cnt[c] >= k or sym_cnt[grid[row][c]] >= k:
                    ok = False
                    break
            if not ok:
                continue
            for c in combo:
                col_cnt[c] += 1
                sym_cnt[grid[row][c]] += 1
            if supplies_hold(row, left):
                chosen.append(combo)
                if rec(row + 1):
                    return True
                chosen.pop()
            for c in combo:
                col_cnt[c] -= 1
                sym_cnt[grid[row][c]] -= 1
        return False

    if not rec(0):
        return None
    cells = tuple((i + 1, c + 1) for i, combo in enumerate(chosen) for c in combo)
    kind = KIND_TRANSVERSAL if k == 1 else KIND_KPLEX
    return CellSet(n, cells, kind, None if k == 1 else k)


def complement_plex(square: LatinSquare, plex: CellSet) -> CellSet:
    """Set complement of a k-plex within the n^2 cells: an (n-k)-plex."""
    n = square.order
    k = 1 if plex.kind == KIND_TRANSVERSAL else plex.k
    if plex.kind not in (KIND_TRANSVERSAL, KIND_KPLEX) or k is None:
        raise InvalidPlexError(f"expected a k-plex cell set, got kind {plex.kind!r}")
    ok, why = check_kplex(square, plex, k)
    if not ok:
        raise InvalidPlexError(f"input is not a valid {k}-plex: {why}")
    used = set(plex.cells)
    rest = tuple(
        (i, j) for i in range(1, n + 1) for j in range(1, n + 1) if (i, j) not in used
    )
    comp = CellSet(n, rest, KIND_KPLEX, n - k)
    ok, why = check_kplex(square, comp, n - k)
    if not ok:  # impossible by counting; guards implementation bugs
        raise InvalidPlexError(f"complement failed validation: {why}")
    return comp


# ---------------------------------------------------------------------------
# disjoint-transversal packing, orthogonal mates


def _transversal_masks(square: LatinSquare) -> list[tuple[int, ...]]:
    """All transversals as column tuples, lex sorted."""
    n = square.order
    census = enumerate_transversals(square, cap=MAX_PACKING_LIST + 1)
    if census.count > MAX_PACKING_LIST:
        raise OrderTooLargeError(
            f"{census.count} transversals exceed the packing limit {MAX_PACKING_LIST}"
        )
    return sorted(tuple(c - 1 for _, c in w.cells) for w in census.witnesses)


def max_disjoint_transversals(square: LatinSquare) -> tuple[int, tuple[CellSet, ...]]:
    """Exact maximum family of pairwise-disjoint transversals (tau).

    Branch-and-bound over the full transversal list grouped by the row-1
    column; deterministic first-optimum witness.  Orders above 8 are
    refused.
    """
    n = square.order
    if n > 8:
        raise OrderTooLargeError(f"exact tau packing supports order <= 8, got {n}")
    perms = _transversal_masks(square)
    by_col: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in range(n)]
    for p in perms:
        mask = 0
        for r, c in enumerate(p):
            mask |= 1 << (r * n + c)
        by_col[p[0]].append((mask, p))
    best_size = 0
    best: list[tuple[int, ...]] = []

    def rec(col: int, used: int, chosen: list[tuple[int, ...]]):
        nonlocal best_size, best
        if len(chosen) + (n - col) <= best_size:
            return
        if col == n:
            if len(chosen) > best_size:
                best_size = len(chosen)
                best = list(chosen)
            return
        for mask, p in by_col[col]:
            if not (mask & used):
                chosen.append(p)
                rec(col + 1, used | mask, chosen)
                chosen.pop()
        rec(col + 1, used, chosen)

    rec(0, 0, [])
    return best_size, tuple(_cols_to_cellset(n, p) for p in best)


def find_orthogonal_mate(square: LatinSquare) -> LatinSquare | None:
    """Mate via a full decomposition into n disjoint transversals.

    Symbol k of the mate marks the cells of the k-th transversal of the
    decomposition (lex-first exact cover).  None certifies that no
    decomposition exists.
    """
    n = square.order
    if n > 8:
        raise OrderTooLargeError(f"mate search supports order <= 8, got {n}")
    if n == 1:
        return LatinSquare([[1]])
    perms = _transversal_masks(square)
    if len(perms) < n:
        return None
    masks = []
    for p in perms:
        mask = 0
        for r, c in enumerate(p):
            mask |= 1 << (r * n + c)
        masks.append((mask, p))
    full = (1 << (n * n)) - 1
    chosen: list[tuple[int, ...]] = []

    def rec(used: int) -> bool:
        if used == full:
            return True
        v = (~used & (used + 1)).bit_length() - 1  # lowest free cell: deterministic cover order
        for mask, p in masks:
            if (mask >> v) & 1 and not (mask & used):
                chosen.append(p)
                if rec(used | mask):
                    return True
                chosen.pop()
        return False

    if not rec(0):
        return None
    grid = [[0] * n for _ in range(n)]
    for idx, p in enumerate(sorted(chosen)):
        for r, c in enumerate(p):
            grid[r][c] = idx + 1
    mate = LatinSquare(grid)
    pairs = {(square.cells0[i][j], mate.cells0[i][j]) for i in range(n) for j in range(n)}
    if len(pairs) != n * n:  # guaranteed by construction; guards bugs
        raise InvalidPlexError("mate failed the pair-distinctness recheck")
    return mate


# ---------------------------------------------------------------------------
# partial transversals and extendibility

COMPLETABLE = "completable"
EXTENDIBLE = "extendible"
NON_EXTENDIBLE = "non_extendible"


def extendibility_report(square: LatinSquare, partial) -> str:
    """Classify a partial transversal by exhaustive extension search."""
    n = square.order
    if n > 8:
        raise OrderTooLargeError(f"extendibility search supports order <= 8, got {n}")
    cs = _as_cells(partial)
    ok, why = check_partial_transversal(square, cs)
    if not ok:
        raise InvalidPartialError(why)
    grid = square.cells0
    used_rows = {r - 1 for r, _ in cs}
    colmask = 0
    symmask = 0
    for r, c in cs:
        colmask |= 1 << (c - 1)
        symmask |= 1 << grid[r - 1][c - 1]
    free_rows = [i for i in range(n) if i not in used_rows]

    def complete(idx: int, cm: int, sm: int) -> bool:
        if idx == len(free_rows):
            return True
        grow = grid[free_rows[idx]]
        for c in range(n):
            bit = 1 << c
            if cm & bit:
                continue
            sbit = 1 << grow[c]
            if sm & sbit:
                continue
            if complete(idx + 1, cm | bit, sm | sbit):
                return True
        return False

    if complete(0, colmask, symmask):
        return COMPLETABLE
    for i in free_rows:
        for c in range(n):
            if not (colmask >> c) & 1 and not (symmask >> grid[i][c]) & 1:
                return EXTENDIBLE
    return NON_EXTENDIBLE


def find_near_transversal(
    square: LatinSquare,
    *,
    missing_row: int | None = None,
    missing_col: int | None = None,
    missing_symbol: int | None = None,
    forbidden: frozenset[tuple[int, int]] = frozenset(),
) -> CellSet | None:
    """First near-transversal in deterministic search order, or None.

    Optional constraints pin which row/column/symbol must stay unused and
    which cells are off limits (used by the structured 2-plex fallback).
    """
    n = square.order
    if n > MAX_EXHAUSTIVE_ORDER:
        raise OrderTooLargeError(f"order {n} exceeds exhaustive limit {MAX_EXHAUSTIVE_ORDER}")
    if n < 1:
        return None
    grid = square.cells0
    colmask0 = 0 if missing_col is None else 1 << (missing_col - 1)
    symmask0 = 0 if missing_symbol is None else 1 << (missing_symbol - 1)
    out: list[tuple[int, int]] = []

    def rec(row: int, skipped: bool, cm: int, sm: int) -> bool:
        if row == n:
            return skipped or n == 0
        must_skip = missing_row is not None and row == missing_row - 1
        if not must_skip:
            grow = grid[row]
            for c in range(n):
                bit = 1 << c
                if cm & bit:
                    continue
                sbit = 1 << grow[c]
                if sm & sbit:
                    continue
                if (row + 1, c + 1) in forbidden:
                    continue
                out.append((row + 1, c + 1))
                if rec(row + 1, skipped, cm | bit, sm | sbit):
                    return True
                out.pop()
        if not skipped and (must_skip or missing_row is None):
            if rec(row + 1, True, cm, sm):
                return True
        return False

    if not rec(0, False, colmask0, symmask0):
        return None
    return CellSet(n, tuple(out), KIND_NEAR)


def find_quasi_transversal(
    square: LatinSquare,
    *,
    forbidden: frozenset[tuple[int, int]] = frozenset(),
    rng: random.Random | None = None,
    restarts: int = 2000,
) -> CellSet | None:
    """First quasi-transversal in deterministic order, or None by exhaustion.

    Exhaustive up to order 12; beyond that a seeded randomized restart
    search is used when an rng is supplied (a miss there is inconclusive,
    so None is only certified at order <= 12).
    """
    n = square.order
    if n < 3:
        return None
    if n > 12:
        if rng is None:
            raise OrderTooLargeError(f"exhaustive quasi search supports order <= 12, got {n}")
        return _quasi_randomized(square, forbidden, rng, restarts)
    grid = square.cells0
    out: list[tuple[int, int]] = []

    def rec(row: int, doubled_row: int, col_cnt, sym_cnt, col2: bool, sym2: bool) -> bool:
        if row == n:
            return col2 and sym2
        take = 2 if row == doubled_row else 1
        for combo in itertools.combinations(range(n), take):
            new_col2, new_sym2 = col2, sym2
            ok = True
            syms = []
            for c in combo:
                s = grid[row][c]
                if (row + 1, c + 1) in forbidden or col_cnt[c] >= 2 or sym_cnt[s] >= 2:
                    ok = False
                    break
                syms.append(s)
            if not ok or len(set(syms)) != len(syms):
                continue
            for c, s in zip(combo, syms):
                col_cnt[c] += 1
                sym_cnt[s] += 1
                if col_cnt[c] == 2:
                    if new_col2:
                        ok = False
                    new_col2 = True
                if sym_cnt[s] == 2:
                    if new_sym2:
                        ok = False
                    new_sym2 = True
            if ok:
                out.extend((row + 1, c + 1) for c in combo)
                if rec(row + 1, doubled_row, col_cnt, sym_cnt, new_col2, new_sym2):
                    return True
                del out[-take:]
            for c, s in zip(combo, syms):
                col_cnt[c] -= 1
                sym_cnt[s] -= 1
        return False

    for doubled_row in range(n):
        if rec(0, doubled_row, [0] * n, [0] * n, False, False):
            cs = CellSet(n, tuple(out), KIND_QUASI)
            ok, why = check_quasi_transversal(square, cs)
            if not ok:  # defensive; search invariants should guarantee this
                raise InvalidCellSetError(f"search produced an invalid quasi: {why}")
            return cs
        out.clear()
    return None


def _quasi_randomized(square, forbidden, rng: random.Random, restarts: int) -> CellSet | None:
    """Randomized-restart quasi search for large orders; inconclusive on miss."""
    n = square.order
    grid = square.cells0
    for _ in range(restarts):
        doubled_row = rng.randrange(n)
        col_cnt = [0] * n
        sym_cnt = [0] * n
        cells: list[tuple[int, int]] = []
        col2 = sym2 = False
        ok = True
        for row in range(n):
            take = 2 if row == doubled_row else 1
            cols = list(range(n))
            rng.shuffle(cols)
            placed = 0
            row_syms = set()
            for c in cols:
                if placed == take:
                    break
                s = grid[row][c]
                if (row + 1, c + 1) in forbidden or s in row_syms:
                    continue
                if col_cnt[c] >= 2 or sym_cnt[s] >= 2:
                    continue
                if col_cnt[c] == 1 and col2:
                    continue
                if sym_cnt[s] == 1 and sym2:
                    continue
                col_cnt[c] += 1
                sym_cnt[s] += 1
                col2 = col2 or col_cnt[c] == 2
                sym2 = sym2 or sym_cnt[s] == 2
                row_syms.add(s)
                cells.append((row + 1, c + 1))
                placed += 1
            if placed != take:
                ok = False
                break
        if ok and col2 and sym2:
            cs = CellSet(n, tuple(cells), KIND_QUASI)
            valid, _ = check_quasi_transversal(square, cs)
            if valid:
                return cs
    return None


def max_disjoint_quasi_transversals(square: LatinSquare) -> tuple[int, tuple[CellSet, ...]]:
    """Exact maximum family of pairwise-disjoint quasi-transversals.

    Greedy lexicographic packing provides the incumbent; if it reaches the
    pigeonhole ceiling floor(n^2/(n+1)) the answer is exact already.
    Otherwise target sizes descend from the ceiling, each sought by a
    depth-first packing over the full quasi enumeration; the first size
    attained is the maximum.  Supported for order <= 6.
    """
    n = square.order
    if n > 6:
        raise OrderTooLargeError(f"exact quasi packing supports order <= 6, got {n}")
    if n < 3:
        return 0, ()
    ceiling = (n * n) // (n + 1)
    greedy: list[CellSet] = []
    used: set[tuple[int, int]] = set()
    while True:
        nxt = find_quasi_transversal(square, forbidden=frozenset(used))
        if nxt is None:
            break
        greedy.append(nxt)
        used.update(nxt.cells)
        if len(greedy) == ceiling:
            return ceiling, tuple(greedy)

    quasis = _all_quasi_cellsets(square)
    masks = []
    for q in quasis:
        m = 0
        for r, c in q.cells:
            m |= 1 << ((r - 1) * n + (c - 1))
        masks.append(m)

    def seek(target: int) -> list[int] | None:
        result: list[int] | None = None

        def rec(start: int, used_mask: int, chosen: list[int]) -> bool:
            if len(chosen) == target:
                nonlocal result
                result = list(chosen)
                return True
            free = n * n - bin(used_mask).count("1")
            if len(chosen) + free // (n + 1) < target:
                return False
            for i in range(start, len(masks)):
                if not masks[i] & used_mask:
                    chosen.append(i)
                    if rec(i + 1, used_mask | masks[i], chosen):
                        return True
                    chosen.pop()
            return False

        rec(0, 0, [])
        return result

    for target in range(ceiling, len(greedy), -1):
        fam = seek(target)
        if fam is not None:
            return target, tuple(quasis[i] for i in fam)
    return len(greedy), tuple(greedy)


def _all_quasi_cellsets(square: LatinSquare) -> list[CellSet]:
    """Every quasi-transversal, by scanning doubled-row choices exhaustively."""
    n = square.order
    grid = square.cells0
    out: list[CellSet] = []

    def rec(row, doubled_row, col_cnt, sym_cnt, col2, sym2, acc):
        if row == n:
            if col2 and sym2:
                out.append(CellSet(n, tuple(acc), KIND_QUASI))
            return
        take = 2 if row == doubled_row else 1
        for combo in itertools.combinations(range(n), take):
            syms = [grid[row][c] for c in combo]
            if len(set(syms)) != len(syms):
                continue
            nc2, ns2 = col2, sym2
            ok = True
            for c, s in zip(combo, syms):
                if col_cnt[c] >= 2 or sym_cnt[s] >= 2:
                    ok = False
                    break
            if not ok:
                continue
            for c, s in zip(combo, syms):
                col_cnt[c] += 1
                sym_cnt[s] += 1
                if col_cnt[c] == 2:
                    if nc2:
                        ok = False
                    nc2 = True
                if sym_cnt[s] == 2:
                    if ns2:
                        ok = False
                    ns2 = True
            if ok:
                acc.extend((row + 1, c + 1) for c in combo)
                rec(row + 1, doubled_row, col_cnt, sym_cnt, nc2, ns2, acc)
                del acc[-take:]
            for c, s in zip(combo, syms):
                col_cnt[c] -= 1
                sym_cnt[s] -= 1

    for doubled_row in range(n):
        rec(0, doubled_row, [0] * n, [0] * n, False, False, [])
    return out


# ---------------------------------------------------------------------------
# conjecture sweep


@dataclass(frozen=True)
class SweepRow:
    """Existence flags for one square of the sweep."""

    label: str
    order: int
    near: bool
    quasi: bool
    two_plex: bool
    note: str = ""

    def to_json_dict(self) -> dict:
        out = {
            "square": self.label,
            "order": self.order,
            "near": self.near,
            "quasi": self.quasi,
            "two_plex": self.two_plex,
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]
    counterexample: SweepRow | None = None

    def to_json_dict(self) -> dict:
        out = {"rows": [r.to_json_dict() for r in self.rows]}
        out["counterexample"] = (
            None if self.counterexample is None else self.counterexample.to_json_dict()
        )
        return out


def sweep_squares(min_order: int, max_order: int, generators, isotopes: int, seed: int):
    """Yield (label, square) for the sweep corpus, deterministically."""
    from .core import Isotopy, apply_isotopy, gen_cyclic, gen_qstep

    rng = random.Random(seed)
    for n in range(min_order, max_order + 1):
        if "cyclic" in generators:
            yield f"cyclic({n})", gen_cyclic(n)
        if "qstep" in generators:
            for m in range(2, n):
                if n % m == 0 and n // m >= 2:
                    yield f"qstep({m},{n // m})", gen_qstep(m, n // m)
        if "isotopes" in generators and isotopes > 0:
            base = gen_cyclic(n)
            for t in range(isotopes):
                iso = Isotopy.random(n, rng)
                yield f"isotope({n})#{t}", apply_isotopy(base, iso)


def conjecture_sweep(
    min_order: int = 2,
    max_order: int = 7,
    generators: tuple[str, ...] = ("cyclic", "qstep", "isotopes"),
    isotopes: int = 0,
    seed: int = 0,
) -> SweepReport:
    """Test near-transversal, quasi-transversal and 2-plex existence per square.

    A square of order >= 3 missing any of the three halts the sweep with a
    counterexample row (none is expected; this probes the Brualdi-Stein-
    Ryser and Rodney conjectures on the generated corpus).  Orders up to 12
    are accepted, the ceiling of the exhaustive quasi and 2-plex engines;
    sweeps above order 8 trade speed for coverage.
    """
    if max_order > 12:
        raise OrderTooLargeError("sweep engines are exhaustive only up to order 12")
    rows: list[SweepRow] = []
    counterexample = None
    for label, sq in sweep_squares(min_order, max_order, generators, isotopes, seed):
        n = sq.order
        near = find_near_transversal(sq) is not None
        quasi = find_quasi_transversal(sq) is not None
        two = find_kplex(sq, 2) is not None if n >= 2 else False
        note = "quasi-transversal vacuous below order 3" if n < 3 else ""
        row = SweepRow(label, n, near, quasi, two, note)
        rows.append(row)
        if n >= 3 and not (near and quasi and two):
            counterexample = row
            break
    return SweepReport(tuple(rows), counterexample)
