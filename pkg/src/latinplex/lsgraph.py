"""The Latin square graph and its k-domination structure.

Vertices are the n^2 cells; two distinct cells are adjacent when they share
a row, a column, or a symbol, giving a 3(n-1)-regular graph.  Adjacency is
materialized as bitmask rows up to order 16 and computed from the rule
beyond that; domination checks use row/column/symbol counters so they work
in either mode.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import MAX_EXHAUSTIVE_ORDER, LatinSquare
from .errors import (
    DimensionMismatchError,
    NotAPartitionError,
    OrderTooLargeError,
    ValidationFailureError,
)
from .plexes import (
    _as_cells,
    check_quasi_transversal,
    check_transversal,
    find_orthogonal_mate,
)


class LatinSquareGraph:
    """L3(L, n): cells of a Latin square, adjacent on shared row/column/symbol."""

    def __init__(self, square: LatinSquare, materialize: bool | None = None):
        n = square.order
        if materialize is None:
            materialize = n <= MAX_EXHAUSTIVE_ORDER
        if materialize and n > MAX_EXHAUSTIVE_ORDER:
            raise OrderTooLargeError(
                f"materialized adjacency supports order <= {MAX_EXHAUSTIVE_ORDER}, got {n}"
            )
        self.square = square
        self.n = n
        self.num_vertices = n * n
        self.adj: list[int] | None = None
        if materialize:
            self.adj = self._build_adj()
            expected = 3 * (n - 1)
            for v, mask in enumerate(self.adj):
                if bin(mask).count("1") != expected:
                    raise ValidationFailureError(
                        f"vertex {self.cell_of(v)} has degree {bin(mask).count('1')}, "
                        f"expected {expected}"
                    )

    def _build_adj(self) -> list[int]:
        n = self.n
        grid = self.square.cells0
        row_mask = [0] * n
        col_mask = [0] * n
        sym_mask = [0] * n
        for i in range(n):
            for j in range(n):
                v = i * n + j
                row_mask[i] |= 1 << v
                col_mask[j] |= 1 << v
                sym_mask[grid[i][j]] |= 1 << v
        adj = []
        for i in range(n):
            for j in range(n):
                v = i * n + j
                adj.append((row_mask[i] | col_mask[j] | sym_mask[grid[i][j]]) & ~(1 << v))
        return adj

    def vertex_index(self, i: int, j: int) -> int:
        """Row-major vertex id of cell (i, j), 1-based input."""
        return (i - 1) * self.n + (j - 1)

    def cell_of(self, v: int) -> tuple[int, int]:
        i, j = divmod(v, self.n)
        return i + 1, j + 1

    def vertices(self):
        return ((i, j) for i in range(1, self.n + 1) for j in range(1, self.n + 1))

    def adjacent(self, a: tuple[int, int], b: tuple[int, int]) -> bool:
        if a == b:
            return False
        (i, j), (p, q) = a, b
        g = self.square.cells0
        return i == p or j == q or g[i - 1][j - 1] == g[p - 1][q - 1]

    def degree(self, cell: tuple[int, int]) -> int:
        if self.adj is not None:
            return bin(self.adj[self.vertex_index(*cell)]).count("1")
        return sum(1 for u in self.vertices() if self.adjacent(cell, u))

    def common_neighbor_count(self, a: tuple[int, int], b: tuple[int, int]) -> int:
        if self.adj is not None:
            u = self.vertex_index(*a)
            v = self.vertex_index(*b)
            return bin(self.adj[u] & self.adj[v]).count("1")
        return sum(1 for w in self.vertices() if self.adjacent(a, w) and self.adjacent(b, w))


def build_graph(square: LatinSquare, materialize: bool | None = None) -> LatinSquareGraph:
    """Construct the graph; regularity 3(n-1) is verified when materialized."""
    return LatinSquareGraph(square, materialize)


@dataclass(frozen=True)
class DominationCertificate:
    """Verdict of a (k or (ell,k)) domination check with per-vertex deficiencies.

    `deficient` lists (i, j, count): for vertices outside the set, count is
    the number of dominating neighbors (< k); for vertices inside the set
    under an ell constraint, count is the induced degree (> ell-1).
    """

    k: int
    ell: int | None
    cells: tuple[tuple[int, int], ...]
    verdict: bool
    deficient: tuple[tuple[int, int, int], ...] = ()

    def to_json_dict(self) -> dict:
        out: dict = {"k": self.k}
        if self.ell is not None:
            out["ell"] = self.ell
        out["set"] = [[i, j] for i, j in self.cells]
        out["verdict"] = self.verdict
        out["deficient"] = [[i, j, c] for i, j, c in self.deficient]
        return out


def _class_counters(square: LatinSquare, cells):
    n = square.order
    grid = square.cells0
    row_cnt = [0] * (n + 1)
    col_cnt = [0] * (n + 1)
    sym_cnt = [0] * (n + 1)
    for r, c in cells:
        row_cnt[r] += 1
        col_cnt[c] += 1
        sym_cnt[grid[r - 1][c - 1] + 1] += 1
    return row_cnt, col_cnt, sym_cnt


def dominating_count(square: LatinSquare, counters, cell: tuple[int, int]) -> int:
    """|N(v) cap S| for v outside S: a set cell shares exactly one of row,
    column, symbol with v, so the class counters add up exactly."""
    row_cnt, col_cnt, sym_cnt = counters
    r, c = cell
    s = square.symbol(r, c)
    return row_cnt[r] + col_cnt[c] + sym_cnt[s]


def is_k_dominating(graph: LatinSquareGraph, cells, k: int) -> DominationCertificate:
    """Every vertex outside the set needs at least k neighbors inside."""
    sq = graph.square
    cs = _as_cells(cells)
    in_set = set(cs)
    counters = _class_counters(sq, cs)
    deficient = []
    for v in graph.vertices():
        if v in in_set:
            continue
        cnt = dominating_count(sq, counters, v)
        if cnt < k:
            deficient.append((v[0], v[1], cnt))
    return DominationCertificate(k, None, cs, not deficient, tuple(deficient))


def induced_degrees(square: LatinSquare, cells) -> dict[tuple[int, int], int]:
    """Degree of each set cell in the subgraph induced by the set."""
    cs = _as_cells(cells)
    counters = _class_counters(square, cs)
    row_cnt, col_cnt, sym_cnt = counters
    out = {}
    for r, c in cs:
        s = square.symbol(r, c)
        out[(r, c)] = (row_cnt[r] - 1) + (col_cnt[c] - 1) + (sym_cnt[s] - 1)
    return out


def is_lk_independent_dominating(
    graph: LatinSquareGraph, cells, ell: int, k: int
) -> DominationCertificate:
    """k-dominating with induced maximum degree at most ell-1."""
    base = is_k_dominating(graph, cells, k)
    deficient = list(base.deficient)
    for (r, c), d in sorted(induced_degrees(graph.square, base.cells).items()):
        if d > ell - 1:
            deficient.append((r, c, d))
    return DominationCertificate(k, ell, base.cells, not deficient, tuple(deficient))


# ---------------------------------------------------------------------------
# exact k-domination number


def gamma_k_lower_bound(n: int, k: int) -> int:
    """k*N/(k+Delta) rounded up, with N = n^2 and Delta = 3(n-1)."""
    num = k * n * n
    den = k + 3 * (n - 1)
    return -(-num // den)


def gamma_k_exact(
    graph: LatinSquareGraph,
    k: int,
    upper_hint: int | None = None,
    hint_cells=None,
) -> tuple[int, tuple[tuple[int, int], ...]]:
    """Exact gamma_k by branch-and-bound, orders up to 6 (36 vertices).

    Vertices are explored in row-major order with include/exclude branching;
    pruning uses the remaining-deficit bound ceil(D/(k+Delta)) seeded by the
    degree lower bound, plus per-vertex infeasibility.  hint_cells, if
    given, must be a validated k-dominating set and seeds the incumbent.
    """
    n = graph.n
    if n > 6:
        raise OrderTooLargeError(f"exact gamma_k supports order <= 6, got {n}")
    N = graph.num_vertices
    adj = graph.adj if graph.adj is not None else LatinSquareGraph(graph.square).adj
    deg = 3 * (n - 1)
    denom = k + deg
    lower = gamma_k_lower_bound(n, k)

    neighbors = [tuple(u for u in range(N) if (adj[v] >> u) & 1) for v in range(N)]

    def greedy() -> int:
        S = 0
        counts = [0] * N
        while True:
            deficit = [
                (k - counts[v]) if counts[v] < k and not (S >> v) & 1 else 0 for v in range(N)
            ]
            if not any(deficit):
                return S
            best_red, best_v = -1, -1
            for v in range(N):
                if (S >> v) & 1:
                    continue
                red = deficit[v]
                for u in neighbors[v]:
                    if not (S >> u) & 1 and counts[u] < k:
                        red += 1
                if red > best_red:
                    best_red, best_v = red, v
            S |= 1 << best_v
            for u in neighbors[best_v]:
                counts[u] += 1

    incumbent_mask = greedy()
    best_size = bin(incumbent_mask).count("1")
    if hint_cells is not None:
        cert = is_k_dominating(graph, hint_cells, k)
        if not cert.verdict:
            raise ValidationFailureError("hint_cells is not a k-dominating set")
        if len(cert.cells) < best_size:
            best_size = len(cert.cells)
            incumbent_mask = 0
            for r, c in cert.cells:
                incumbent_mask |= 1 << graph.vertex_index(r, c)
    if upper_hint is not None and upper_hint + 1 < best_size:
        # prune harder, but only below a bound the caller claims achievable
        best_size = upper_hint + 1

    best_mask = incumbent_mask

    def rec(idx: int, S: int, size: int, counts: list[int], D: int):
        nonlocal best_size, best_mask
        if size + (D + denom - 1) // denom >= best_size:
            return
        if D == 0:
            best_size, best_mask = size, S
            return
        if idx == N:
            return
        v = idx
        # include v
        delta = (k - counts[v]) if counts[v] < k else 0
        new_counts = counts[:]
        for u in neighbors[v]:
            if not (S >> u) & 1:
                if new_counts[u] < k:
                    delta += 1
                new_counts[u] += 1
        rec(idx + 1, S | (1 << v), size + 1, new_counts, D - delta)
        # exclude v: it must still be reachable from undecided neighbors
        remaining = sum(1 for u in neighbors[v] if u > idx)
        if counts[v] >= k or counts[v] + remaining >= k:
            rec(idx + 1, S, size, counts, D)

    if best_size > lower:
        rec(0, 0, 0, [0] * N, k * N)
    cells = tuple(sorted(graph.cell_of(v) for v in range(N) if (best_mask >> v) & 1))
    if len(cells) != best_size:
        # only reachable when upper_hint understated gamma_k without a witness
        raise ValidationFailureError(f"upper_hint {upper_hint} is below gamma_{k}")
    return best_size, cells


# ---------------------------------------------------------------------------
# equivalences


@dataclass(frozen=True)
class EquivalenceReport:
    """Independent evaluations of the three transversal-equivalent statements."""

    is_3ds_of_size_n: bool
    is_13_ids_of_size_n: bool
    is_transversal: bool

    @property
    def agree(self) -> bool:
        return self.is_3ds_of_size_n == self.is_13_ids_of_size_n == self.is_transversal

    def to_json_dict(self) -> dict:
        return {
            "three_dominating_size_n": self.is_3ds_of_size_n,
            "one_three_ids_size_n": self.is_13_ids_of_size_n,
            "transversal": self.is_transversal,
            "agree": self.agree,
        }


def transversal_equivalence_check(square: LatinSquare, cells) -> EquivalenceReport:
    """Evaluate independently: size-n 3-dominating set, size-n (1,3)-IDS,
    and transversal; the three must agree for every input."""
    n = square.order
    cs = _as_cells(cells)
    if len(cs) != n:
        raise DimensionMismatchError(f"expected {n} cells, got {len(cs)}")
    graph = build_graph(square, materialize=False)
    three_ds = is_k_dominating(graph, cs, 3).verdict
    ids13 = is_lk_independent_dominating(graph, cs, 1, 3).verdict
    trans = check_transversal(square, cs)[0]
    return EquivalenceReport(three_ds, ids13, trans)


@dataclass(frozen=True)
class DomaticReport:
    """Result of verifying a family of disjoint k-dominating sets."""

    k: int
    parts: tuple[tuple[tuple[int, int], ...], ...]
    verdict: bool
    is_partition: bool
    implied_lower_bound: int
    failures: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "parts": [[[i, j] for i, j in p] for p in self.parts],
            "verdict": self.verdict,
            "is_partition": self.is_partition,
            "implied_lower_bound": self.implied_lower_bound,
            "failures": list(self.failures),
        }


def verify_domatic_partition(
    graph: LatinSquareGraph, parts, k: int, strict: bool = False
) -> DomaticReport:
    """Check pairwise disjointness and k-domination of every part.

    In strict mode the parts must exactly partition the vertex set;
    otherwise a disjoint family is accepted and flagged as partial (any
    disjoint family of kDS extends to a k-domatic partition of the same
    size, so d_k >= number of parts either way).
    """
    norm = [tuple(sorted(_as_cells(p))) for p in parts]
    failures: list[str] = []
    seen: dict[tuple[int, int], int] = {}
    for idx, p in enumerate(norm):
        for cell in p:
            if cell in seen:
                failures.append(f"cell {cell} appears in parts {seen[cell]} and {idx}")
            seen[cell] = idx
    covered = len(seen) == graph.num_vertices and not failures
    if strict and (failures or not covered):
        raise NotAPartitionError(
            "; ".join(failures) if failures else f"parts cover {len(seen)} of {graph.num_vertices} vertices"
        )
    for idx, p in enumerate(norm):
        cert = is_k_dominating(graph, p, k)
        if not cert.verdict:
            failures.append(
                f"part {idx} is not {k}-dominating (first deficiency {cert.deficient[0]})"
            )
    verdict = not failures
    return DomaticReport(
        k,
        tuple(norm),
        verdict,
        covered,
        len(norm) if verdict else 0,
        tuple(failures),
    )


def domatic_upper_bound(n: int, gamma_k: int) -> int:
    """d_k <= |V| / gamma_k for any graph; here |V| = n^2."""
    return (n * n) // gamma_k


def has_mate_coloring(square: LatinSquare) -> tuple[bool, dict[tuple[int, int], int] | None]:
    """Whether a proper n-coloring of the graph exists.

    Each row is an n-clique so chi >= n always; an n-coloring exists exactly
    when the square decomposes into n disjoint transversals, i.e. when an
    orthogonal mate exists, whose symbol classes are the color classes.
    """
    n = square.order
    if n == 1:
        return True, {(1, 1): 1}
    mate = find_orthogonal_mate(square)
    if mate is None:
        return False, None
    coloring = {
        (i, j): mate.symbol(i, j) for i in range(1, n + 1) for j in range(1, n + 1)
    }
    return True, coloring


# ---------------------------------------------------------------------------
# quasi-transversal <-> 3DS correspondence


@dataclass(frozen=True)
class CorrespondenceReport:
    """Forward check plus (small orders) the exhaustive converse scan."""

    is_quasi: bool
    is_3ds: bool
    forward_ok: bool
    scan_total_3ds: int | None = None
    scan_quasi_count: int | None = None
    scan_non_quasi_examples: tuple[tuple[tuple[int, int], ...], ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "is_quasi": self.is_quasi,
            "is_3ds": self.is_3ds,
            "forward_ok": self.forward_ok,
            "scan_total_3ds": self.scan_total_3ds,
            "scan_quasi_count": self.scan_quasi_count,
            "scan_non_quasi_examples": [
                [[i, j] for i, j in ex] for ex in self.scan_non_quasi_examples
            ],
        }


def scan_3ds_sets(square: LatinSquare, size: int, cap_examples: int = 5):
    """Enumerate every size-`size` 3-dominating set; order <= 5 only."""
    n = square.order
    if n > 5:
        raise OrderTooLargeError(f"exhaustive 3DS scan supports order <= 5, got {n}")
    graph = build_graph(square)
    adj = graph.adj
    N = graph.num_vertices
    total = 0
    quasi_count = 0
    examples: list[tuple[tuple[int, int], ...]] = []
    for comb in itertools.combinations(range(N), size):
        mask = 0
        for v in comb:
            mask |= 1 << v
        ok = True
        for v in range(N):
            if (mask >> v) & 1:
                continue
            if bin(adj[v] & mask).count("1") < 3:
                ok = False
                break
        if not ok:
            continue
        total += 1
        cells = tuple(graph.cell_of(v) for v in comb)
        if check_quasi_transversal(square, cells)[0]:
            quasi_count += 1
        elif len(examples) < cap_examples:
            examples.append(cells)
    return total, quasi_count, tuple(examples)


def quasi_3ds_correspondence(
    square: LatinSquare, cells, include_scan: bool | None = None
) -> CorrespondenceReport:
    """Forward direction: a quasi-transversal is a 3DS of size n+1 (n >= 3).

    When include_scan is enabled (default for order <= 4, supported to 5)
    every (n+1)-subset that 3-dominates is tested against the
    quasi-transversal validator and disagreements are reported, not
    assumed away.
    """
    n = square.order
    cs = _as_cells(cells)
    if len(cs) != n + 1:
        raise DimensionMismatchError(f"expected {n + 1} cells, got {len(cs)}")
    graph = build_graph(square, materialize=False)
    is_quasi = check_quasi_transversal(square, cs)[0]
    is_3ds = is_k_dominating(graph, cs, 3).verdict
    forward_ok = (not is_quasi) or is_3ds
    if include_scan is None:
        include_scan = n <= 4
    if not include_scan:
        return CorrespondenceReport(is_quasi, is_3ds, forward_ok)
    total, quasi_count, examples = scan_3ds_sets(square, n + 1)
    return CorrespondenceReport(is_quasi, is_3ds, forward_ok, total, quasi_count, examples)
