"""Latin squares: representation, validation, generators, and transforms.

Symbols are 1..n at every interface; storage is 0-based.  Every type here
is immutable after construction, so concurrent read-only use is safe.  All
exhaustive search engines elsewhere in the package cap the order at
MAX_EXHAUSTIVE_ORDER so cell sets fit fixed-width bitmasks; the generators
here are unbounded.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .errors import (
    ColumnRepeatError,
    DimensionMismatchError,
    FormatError,
    InvalidOAError,
    NotAPermutationError,
    NotSquareError,
    OrderTooSmallError,
    RowRepeatError,
    SymbolOutOfRangeError,
)

MAX_EXHAUSTIVE_ORDER = 16


class LatinSquare:
    """An order-n Latin square over symbols 1..n.

    Construction validates the defining property and reports the first
    offending row or column.  Instances are immutable and hashable.
    """

    __slots__ = ("_cells", "_order")

    def __init__(self, rows):
        grid = [list(r) for r in rows]
        n = len(grid)
        if n == 0 or any(len(r) != n for r in grid):
            raise NotSquareError(f"expected n rows of n entries, got {[len(r) for r in grid]}")
        for r in grid:
            for x in r:
                if not isinstance(x, int) or isinstance(x, bool) or not 1 <= x <= n:
                    raise SymbolOutOfRangeError(f"entry {x!r} outside 1..{n}")
        for i, r in enumerate(grid):
            seen = set()
            for x in r:
                if x in seen:
                    raise RowRepeatError(i + 1, x)
                seen.add(x)
        for j in range(n):
            seen = set()
            for i in range(n):
                x = grid[i][j]
                if x in seen:
                    raise ColumnRepeatError(j + 1, x)
                seen.add(x)
        self._order = n
        self._cells = tuple(tuple(x - 1 for x in r) for r in grid)

    @property
    def order(self) -> int:
        return self._order

    @property
    def cells0(self) -> tuple[tuple[int, ...], ...]:
        """Internal 0-based grid; engines index this directly."""
        return self._cells

    def symbol(self, i: int, j: int) -> int:
        """Symbol at row i, column j (all 1-based)."""
        return self._cells[i - 1][j - 1] + 1

    def rows(self) -> list[list[int]]:
        """1-based copy of the grid."""
        return [[x + 1 for x in r] for r in self._cells]

    def row_band(self, start: int, stop: int) -> "LatinRectangle":
        """Rows start..stop (1-based, inclusive) as a Latin rectangle."""
        return LatinRectangle([[x + 1 for x in r] for r in self._cells[start - 1 : stop]])

    def __eq__(self, other) -> bool:
        return isinstance(other, LatinSquare) and self._cells == other._cells

    def __hash__(self) -> int:
        return hash(self._cells)

    def __repr__(self) -> str:
        return f"LatinSquare(order={self._order})"

    def __str__(self) -> str:
        w = len(str(self._order))
        return "\n".join(" ".join(str(x + 1).rjust(w) for x in r) for r in self._cells)


class LatinRectangle:
    """r rows by n columns, entries 1..n, no repeat in any row or column."""

    __slots__ = ("_cells", "_rows", "_width")

    def __init__(self, rows):
        grid = [list(r) for r in rows]
        r = len(grid)
        if r == 0:
            raise NotSquareError("empty rectangle")
        n = len(grid[0])
        if any(len(row) != n for row in grid):
            raise NotSquareError("ragged rows")
        if r > n:
            raise DimensionMismatchError(f"{r} rows exceed width {n}")
        for row in grid:
            for x in row:
                if not isinstance(x, int) or isinstance(x, bool) or not 1 <= x <= n:
                    raise SymbolOutOfRangeError(f"entry {x!r} outside 1..{n}")
        for i, row in enumerate(grid):
            if len(set(row)) != n:
                dup = next(x for x in row if row.count(x) > 1)
                raise RowRepeatError(i + 1, dup)
        for j in range(n):
            col = [grid[i][j] for i in range(r)]
            if len(set(col)) != r:
                dup = next(x for x in col if col.count(x) > 1)
                raise ColumnRepeatError(j + 1, dup)
        self._rows = r
        self._width = n
        self._cells = tuple(tuple(x - 1 for x in row) for row in grid)

    @property
    def rows_count(self) -> int:
        return self._rows

    @property
    def width(self) -> int:
        return self._width

    def rows(self) -> list[list[int]]:
        return [[x + 1 for x in r] for r in self._cells]

    def __eq__(self, other) -> bool:
        return isinstance(other, LatinRectangle) and self._cells == other._cells

    def __hash__(self) -> int:
        return hash(("rect", self._cells))


def validate(grid) -> LatinSquare:
    """Validate a 1-based grid, returning the square or raising the first defect."""
    return LatinSquare(grid)


@dataclass(frozen=True)
class StepTypeSpec:
    """Parameters of a q-step-type layout: m block-rows of q-by-q blocks."""

    m: int
    q: int

    def __post_init__(self):
        if self.m < 1 or self.q < 1:
            raise DimensionMismatchError("m and q must be positive")

    @property
    def order(self) -> int:
        return self.m * self.q


def gen_cyclic(n: int) -> LatinSquare:
    """Cayley table of the additive cyclic group: symbol(i,j) = ((i+j-2) mod n) + 1."""
    if n < 1:
        raise OrderTooSmallError("order must be at least 1")
    return LatinSquare([[((i + j) % n) + 1 for j in range(n)] for i in range(n)])


def gen_qstep(m: int, q: int) -> LatinSquare:
    """Canonical q-step-type square of order m*q with cyclic q-by-q blocks.

    Block (i,j) carries the symbol interval for class (i+j-2) mod m, so the
    block symbol-set condition holds by construction.  Equals the Cayley
    table of Z_m x Z_q under interval relabelling.
    """
    if m < 1 or q < 1:
        raise OrderTooSmallError("m and q must be positive")
    n = m * q
    grid = []
    for r in range(n):
        i, s = divmod(r, q)
        row = []
        for c in range(n):
            j, t = divmod(c, q)
            block_class = (i + j) % m
            row.append(block_class * q + ((s + t) % q) + 1)
        grid.append(row)
    return LatinSquare(grid)


#: order-4 table of the elementary abelian group, the doubling base.
TWO_STEP_BASE_ROWS = ((1, 2, 3, 4), (2, 1, 4, 3), (3, 4, 1, 2), (4, 3, 2, 1))


def gen_two_step_pow2(k: int) -> LatinSquare:
    """Order-2^k square built by block doubling from the order-4 base.

    Each step maps A to [[A, s(A)], [s(A), A]] with s(x) = x + 2^(k-1).
    The output is 2^(k-1)-step type (two half-order blocks); its full
    disjoint-transversal decomposition is produced by
    constructions.decompose_two_step.
    """
    if k < 2:
        raise OrderTooSmallError("doubling construction needs order 2^k >= 4")
    grid = [list(r) for r in TWO_STEP_BASE_ROWS]
    for level in range(3, k + 1):
        half = 1 << (level - 1)
        shifted = [[x + half for x in row] for row in grid]
        grid = [a + b for a, b in zip(grid, shifted)] + [b + a for a, b in zip(grid, shifted)]
    return LatinSquare(grid)


def is_qstep_type(square: LatinSquare, spec: StepTypeSpec) -> tuple[bool, str | None]:
    """Decide whether the square is q-step type for the given (m, q).

    Requires every aligned q-by-q block to be a Latin subsquare on a
    q-symbol set, and two blocks to share a symbol set exactly when their
    block coordinates satisfy i+j = i'+j' (mod m).  The diagnosis names the
    first failing block or block pair.
    """
    m, q = spec.m, spec.q
    n = square.order
    if m * q != n:
        raise DimensionMismatchError(f"spec order {m * q} != square order {n}")
    cells = square.cells0
    sets: dict[tuple[int, int], frozenset[int]] = {}
    for bi in range(m):
        for bj in range(m):
            syms = frozenset(cells[bi * q + s][bj * q + t] for s in range(q) for t in range(q))
            if len(syms) != q:
                return False, f"block ({bi + 1},{bj + 1}) is not on a {q}-symbol set"
            for s in range(q):
                if frozenset(cells[bi * q + s][bj * q + t] for t in range(q)) != syms:
                    return False, f"block ({bi + 1},{bj + 1}) row {s + 1} is not a permutation of its symbol set"
                if frozenset(cells[bi * q + t][bj * q + s] for t in range(q)) != syms:
                    return False, f"block ({bi + 1},{bj + 1}) column {s + 1} is not a permutation of its symbol set"
            sets[(bi, bj)] = syms
    class_set: dict[int, frozenset[int]] = {}
    set_class: dict[frozenset[int], int] = {}
    for (bi, bj), syms in sorted(sets.items()):
        cls = (bi + bj) % m
        if cls in class_set and class_set[cls] != syms:
            return False, (
                f"block ({bi + 1},{bj + 1}) disagrees with its class {cls}: "
                f"same i+j (mod {m}) but different symbols"
            )
        if syms in set_class and set_class[syms] != cls:
            return False, (
                f"block ({bi + 1},{bj + 1}) shares symbols with class {set_class[syms]} "
                f"but lies in class {cls}"
            )
        class_set.setdefault(cls, syms)
        set_class.setdefault(syms, cls)
    return True, None


@dataclass(frozen=True)
class OrthogonalArray3:
    """OA(n,3): n^2 triples (r, c, s) with pairwise-distinct 2-projections."""

    order: int
    triples: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        n = self.order
        if len(self.triples) != n * n:
            raise InvalidOAError(f"expected {n * n} triples, got {len(self.triples)}")
        for t in self.triples:
            if len(t) != 3 or any(not 1 <= x <= n for x in t):
                raise InvalidOAError(f"triple {t} outside 1..{n}")
        for a, b in ((0, 1), (0, 2), (1, 2)):
            pairs = {(t[a], t[b]) for t in self.triples}
            if len(pairs) != n * n:
                raise InvalidOAError(f"projection onto coordinates ({a + 1},{b + 1}) repeats a pair")


def to_oa(square: LatinSquare) -> OrthogonalArray3:
    """Row-major triples (i, j, symbol(i,j))."""
    n = square.order
    cells = square.cells0
    return OrthogonalArray3(
        n,
        tuple((i + 1, j + 1, cells[i][j] + 1) for i in range(n) for j in range(n)),
    )


def from_oa(oa: OrthogonalArray3) -> LatinSquare:
    """Rebuild the square: triple (r, c, s) puts s at row r, column c."""
    n = oa.order
    grid = [[0] * n for _ in range(n)]
    for r, c, s in oa.triples:
        grid[r - 1][c - 1] = s
    return LatinSquare(grid)


@dataclass(frozen=True)
class Isotopy:
    """Row, column and symbol permutations of 1..n, stored as image tuples."""

    f: tuple[int, ...]
    g: tuple[int, ...]
    h: tuple[int, ...]

    def __post_init__(self):
        n = len(self.f)
        for name, p in (("f", self.f), ("g", self.g), ("h", self.h)):
            if len(p) != n or sorted(p) != list(range(1, n + 1)):
                raise NotAPermutationError(f"component {name} is not a permutation of 1..{n}")

    @property
    def order(self) -> int:
        return len(self.f)

    @classmethod
    def identity(cls, n: int) -> "Isotopy":
        ident = tuple(range(1, n + 1))
        return cls(ident, ident, ident)

    @classmethod
    def random(cls, n: int, rng: random.Random) -> "Isotopy":
        perms = []
        for _ in range(3):
            p = list(range(1, n + 1))
            rng.shuffle(p)
            perms.append(tuple(p))
        return cls(*perms)


def apply_isotopy(square: LatinSquare, iso: Isotopy) -> LatinSquare:
    """Image square M with M[f(i)][g(j)] = h(L[i][j])."""
    n = square.order
    if iso.order != n:
        raise DimensionMismatchError(f"isotopy on 1..{iso.order} applied to order {n}")
    cells = square.cells0
    grid = [[0] * n for _ in range(n)]
    for i in range(n):
        fi = iso.f[i] - 1
        for j in range(n):
            grid[fi][iso.g[j] - 1] = iso.h[cells[i][j]]
    return LatinSquare(grid)


# ---------------------------------------------------------------------------
# serialization

def format_ls(square: LatinSquare) -> str:
    """Text format: first line n, then n rows of space-separated symbols."""
    n = square.order
    lines = [str(n)]
    lines += [" ".join(str(x + 1) for x in row) for row in square.cells0]
    return "\n".join(lines) + "\n"


def parse_ls(text: str) -> LatinSquare:
    """Parse the .ls text format; trailing garbage is rejected."""
    lines = text.splitlines()
    idx = 0
    while idx < len(lines) and not lines[idx].strip():
        idx += 1
    if idx == len(lines):
        raise FormatError("empty input")
    try:
        n = int(lines[idx].strip())
    except ValueError:
        raise FormatError(f"first line must be the order, got {lines[idx]!r}") from None
    if n < 1:
        raise FormatError(f"order must be positive, got {n}")
    grid = []
    idx += 1
    for r in range(n):
        if idx >= len(lines):
            raise FormatError(f"expected {n} rows, found {r}")
        parts = lines[idx].split()
        try:
            grid.append([int(p) for p in parts])
        except ValueError:
            raise FormatError(f"row {r + 1} contains a non-integer token") from None
        idx += 1
    for rest in lines[idx:]:
        if rest.strip():
            raise FormatError(f"trailing garbage after row {n}: {rest!r}")
    return LatinSquare(grid)


def square_to_json_dict(square: LatinSquare) -> dict:
    return {"order": square.order, "rows": square.rows()}


def square_from_json_dict(obj: dict) -> LatinSquare:
    if not isinstance(obj, dict) or "rows" not in obj:
        raise FormatError("square JSON needs a 'rows' field")
    sq = LatinSquare(obj["rows"])
    if "order" in obj and obj["order"] != sq.order:
        raise FormatError(f"declared order {obj['order']} != grid order {sq.order}")
    return sq


def load_square_text(text: str) -> LatinSquare:
    """Sniff JSON vs .ls and parse accordingly."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"bad JSON: {exc}") from None
        return square_from_json_dict(obj)
    return parse_ls(text)
