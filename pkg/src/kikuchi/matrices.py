"""Construction of the sparse clause-membership matrices behind the certificates.

All matrices are indexed by ranked fixed-size subsets (colexicographic order,
see :mod:`kikuchi.subsets`).  Three constructions live here:

* even arity: square matrices over subsets of [n] with a pruning rule that
  leaves at most one nonzero entry per row and column;
* odd arity: the asymmetric variant with columns one element larger;
* the 3-XOR pipeline: per-derived-clause matrices over subsets of two copies
  of [n], filtered by half clauses, equalized to a common entry count, and
  aggregated with signs.

For the two-copy universe, element ids are ``v-1`` for the first copy of
vertex v and ``n+v-1`` for the second copy.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from .errors import CapacityError, InfeasibilityError, InputError
from .hypergraph import Hypergraph, MatchingFamily
from .subsets import SubsetIndexer
from .xor import DerivedClause, DerivedFourXor, Partition, derive_4xor, validate_assignment

DENSE_SAFETY_CAP = 20_000


@dataclass(frozen=True)
class KikuchiMatrix:
    """Sparse integer matrix over ranked subsets.

    ``provenance`` optionally maps an entry to the index of the clause that
    produced it (single-clause builds) for per-clause audits.
    """

    row_count: int
    col_count: int
    entries: dict[tuple[int, int], int]
    universe: int | None = None
    row_subset_size: int | None = None
    col_subset_size: int | None = None
    provenance: dict[tuple[int, int], int] | None = None

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def sorted_triplets(self) -> list[tuple[int, int, int]]:
        return [(r, c, self.entries[(r, c)]) for r, c in sorted(self.entries)]

    def is_symmetric(self) -> bool:
        if self.row_count != self.col_count:
            return False
        return all(self.entries.get((c, r)) == w for (r, c), w in self.entries.items())

    def transpose(self) -> "KikuchiMatrix":
        return KikuchiMatrix(
            row_count=self.col_count,
            col_count=self.row_count,
            entries={(c, r): w for (r, c), w in self.entries.items()},
            universe=self.universe,
            row_subset_size=self.col_subset_size,
            col_subset_size=self.row_subset_size,
        )

    def row_l1_max(self) -> int:
        sums: Counter[int] = Counter()
        for (r, _), w in self.entries.items():
            sums[r] += abs(w)
        return max(sums.values(), default=0)

    def col_l1_max(self) -> int:
        sums: Counter[int] = Counter()
        for (_, c), w in self.entries.items():
            sums[c] += abs(w)
        return max(sums.values(), default=0)

    def row_nnz_max(self) -> int:
        return max(Counter(r for r, _ in self.entries).values(), default=0)

    def col_nnz_max(self) -> int:
        return max(Counter(c for _, c in self.entries).values(), default=0)

    def to_dense(self, cap: int = DENSE_SAFETY_CAP) -> np.ndarray:
        if max(self.row_count, self.col_count) > cap:
            raise CapacityError(
                f"dense shape {self.row_count}x{self.col_count} exceeds cap {cap}"
            )
        dense = np.zeros((self.row_count, self.col_count), dtype=np.float64)
        for (r, c), w in self.entries.items():
            dense[r, c] = w
        return dense


def aggregate_matrices(parts) -> dict[tuple[int, int], int]:
    """Sum weighted sparse matrices into one entry dict, dropping zeros."""
    acc: dict[tuple[int, int], int] = {}
    for weight, mat in parts:
        for key, w in mat.entries.items():
            acc[key] = acc.get(key, 0) + weight * w
    return {key: w for key, w in acc.items() if w != 0}


def matrix_to_text(mat: KikuchiMatrix) -> str:
    lines = [f"{mat.row_count} {mat.col_count} {mat.nnz}"]
    for r, c, w in mat.sorted_triplets():
        lines.append(f"{r} {c} {w}")
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> KikuchiMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("line 1: empty matrix file")
    try:
        rows, cols, nnz = (int(t) for t in lines[0].split())
    except ValueError:
        raise InputError(f"line 1: expected 'rows cols nnz', got {lines[0]!r}") from None
    if len(lines) - 1 != nnz:
        raise InputError(f"header promises {nnz} entries, file has {len(lines) - 1}")
    entries: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        try:
            r, c, w = (int(t) for t in raw.split())
        except ValueError:
            raise InputError(f"line {lineno}: expected 'row col weight'") from None
        if not (0 <= r < rows and 0 <= c < cols) or w == 0:
            raise InputError(f"line {lineno}: entry ({r},{c},{w}) out of contract")
        entries[(r, c)] = w
    return KikuchiMatrix(row_count=rows, col_count=cols, entries=entries)


def suggest_subset_size(n: int, k: int, c: float = 4.0) -> int:
    """max(2, ceil(sqrt(n/k)/c)); bad choices surface as infeasibility errors."""
    if n <= 0 or k <= 0 or c <= 0:
        raise InputError("need positive n, k, c")
    return max(2, math.ceil(math.sqrt(n / k) / c))


# ---------------------------------------------------------------------------
# Even and odd arity matrices over subsets of [n]
# ---------------------------------------------------------------------------


def build_even_kikuchi(member: Hypergraph, ell: int) -> KikuchiMatrix:
    """Square matrix with entry (S,T)=1 iff S ^ T is a clause and no other
    clause comes within symmetric-difference distance ell of S or T.

    Requires a matching with even arity and ell >= q/2.  The pruning leaves
    at most one nonzero entry per row/column, and the entry count per clause
    is the same for every clause of the member.
    """
    q = member.q
    if q % 2 != 0:
        raise InputError(f"even-arity build got q={q}")
    if ell < q // 2:
        raise InputError(f"ell={ell} below q/2={q // 2}: no valid pairs exist")
    if not member.is_matching():
        raise InputError("even-arity build needs a matching")
    return _build_symmetric_difference_matrix(member, ell, odd=False)


def build_odd_kikuchi(member: Hypergraph, ell: int) -> KikuchiMatrix:
    """Asymmetric variant for odd arity: rows are ell-subsets, columns
    (ell+1)-subsets, with the analogous pruning rule."""
    q = member.q
    if q % 2 != 1:
        raise InputError(f"odd-arity build got q={q}")
    if ell < (q - 1) // 2 or ell < 1:
        raise InputError(f"ell={ell} too small for arity {q}")
    if not member.is_matching():
        raise InputError("odd-arity build needs a matching")
    return _build_symmetric_difference_matrix(member, ell, odd=True)


def _build_symmetric_difference_matrix(member: Hypergraph, ell: int, odd: bool) -> KikuchiMatrix:
    n, q = member.n, member.q
    row_size = ell
    col_size = ell + 1 if odd else ell
    split = (q - 1) // 2 if odd else q // 2  # |S ∩ C|
    rows = SubsetIndexer(n, row_size)
    cols = SubsetIndexer(n, col_size)
    if rows.count == 0 or cols.count == 0:
        return KikuchiMatrix(rows.count, cols.count, {}, n, row_size, col_size, {})
    # For S = C_S ∪ Q and T = C_T ∪ Q the pruning conditions reduce to
    # conditions on |Q ∩ C'| alone, because a matching keeps C' disjoint from C.
    banned = {split, q - split} if odd else {split}
    entries: dict[tuple[int, int], int] = {}
    provenance: dict[tuple[int, int], int] = {}
    vertices = set(range(1, n + 1))
    q_size = ell - split
    for ci, clause in enumerate(member.edges):
        others = [set(c) for c in member.edges if c != clause]
        rest = sorted(vertices - set(clause))
        if q_size < 0 or q_size > len(rest):
            continue
        for q_part in combinations(rest, q_size):
            q_set = set(q_part)
            if any(len(q_set & other) in banned for other in others):
                continue
            for c_s in combinations(clause, split):
                c_t = tuple(v for v in clause if v not in c_s)
                s_rank = rows.rank([v - 1 for v in c_s + q_part])
                t_rank = cols.rank([v - 1 for v in c_t + q_part])
                entries[(s_rank, t_rank)] = 1
                provenance[(s_rank, t_rank)] = ci
    return KikuchiMatrix(rows.count, cols.count, entries, n, row_size, col_size, provenance)


def per_clause_counts(mat: KikuchiMatrix) -> Counter[int]:
    if mat.provenance is None:
        raise InputError("matrix carries no provenance")
    return Counter(mat.provenance.values())


def even_count_floor(n: int, q: int, ell: int, member_size: int) -> int:
    """Guaranteed per-clause entry count for the even-arity build."""
    half = math.comb(q, q // 2)
    return half * _comb0(n - q, ell - q // 2) - member_size * half * half * _comb0(
        n - 2 * q, ell - q
    )


# ---------------------------------------------------------------------------
# The 3-XOR pipeline over two copies of [n]
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HalfClauseSet:
    """Pairs (v in first copy, w in second copy) witnessed by derived clauses
    of one left member."""

    owner: int
    pairs: frozenset[tuple[int, int]]

    @cached_property
    def by_first(self) -> dict[int, frozenset[int]]:
        grouped: dict[int, set[int]] = {}
        for v, w in self.pairs:
            grouped.setdefault(v, set()).add(w)
        return {v: frozenset(ws) for v, ws in grouped.items()}


def half_clauses(family: MatchingFamily, part: Partition, i: int) -> HalfClauseSet:
    """All (v, w) with v in C, w in C' for clauses (u,C) of H_i and (u,C') of
    any right-side member sharing the vertex u."""
    if i not in part.left:
        raise InputError(f"member {i} is not on the left side")
    if family.q != 3:
        raise InputError("half clauses are defined for 3-uniform families")
    lookups = family.vertex_to_edge_maps()
    mine = lookups[i - 1]
    pairs: set[tuple[int, int]] = set()
    for u, edge in mine.items():
        c_left = [v for v in edge if v != u]
        for j in part.right:
            other = lookups[j - 1].get(u)
            if other is None:
                continue
            c_right = [w for w in other if w != u]
            pairs.update((v, w) for v in c_left for w in c_right)
    return HalfClauseSet(owner=i, pairs=frozenset(pairs))


def _contained_half_clauses(first: set[int], second: set[int], half: HalfClauseSet, stop: int) -> int:
    count = 0
    for v in first:
        adj = half.by_first.get(v)
        if not adj:
            continue
        for w in second:
            if w in adj:
                count += 1
                if count >= stop:
                    return count
    return count


def build_clause_kikuchi(
    c_left: tuple[int, int],
    c_right: tuple[int, int],
    ell: int,
    half: HalfClauseSet,
    n: int,
) -> KikuchiMatrix:
    """Per-derived-clause matrix over ell-subsets of two copies of [n].

    Entry (S,T)=1 when S ^ T equals the clause's four lifted vertices, S and T
    each hold one vertex from each side, and neither S nor T contains a second
    half clause of the owner.
    """
    if len(set(c_left)) != 2 or len(set(c_right)) != 2:
        raise InputError("derived clause sides must be 2-element sets")
    if ell < 2:
        raise InputError(f"ell={ell} below 2: clause matrices are undefined")
    indexer = SubsetIndexer(2 * n, ell)
    core = [v - 1 for v in c_left] + [n + w - 1 for w in c_right]
    rest = [e for e in range(2 * n) if e not in set(core)]
    entries: dict[tuple[int, int], int] = {}
    for q_part in combinations(rest, ell - 2):
        q_first = {e + 1 for e in q_part if e < n}
        q_second = {e - n + 1 for e in q_part if e >= n}
        ok: dict[tuple[int, int], bool] = {}
        for v in c_left:
            for w in c_right:
                ok[(v, w)] = (
                    _contained_half_clauses(q_first | {v}, q_second | {w}, half, 2) <= 1
                )
        for v in c_left:
            v_bar = c_left[0] if v == c_left[1] else c_left[1]
            for w in c_right:
                w_bar = c_right[0] if w == c_right[1] else c_right[1]
                if not (ok[(v, w)] and ok[(v_bar, w_bar)]):
                    continue
                s_rank = indexer.rank([v - 1, n + w - 1, *q_part])
                t_rank = indexer.rank([v_bar - 1, n + w_bar - 1, *q_part])
                entries[(s_rank, t_rank)] = 1
    return KikuchiMatrix(indexer.count, indexer.count, entries, 2 * n, ell, ell)


def clause_entry_target(n: int, ell: int) -> int:
    """The common entry count every derived clause is equalized to."""
    return 2 * _comb0(2 * n - 4, ell - 2)


def counting_margin_holds(n: int, k: int, ell: int) -> bool:
    """True when the bad-set bound guarantees clause matrices keep at least
    half of their entries: 4nk C(2n-6, ell-4) + 16k C(2n-5, ell-3) <= C(2n-4, ell-2)/2."""
    lhs = 4 * n * k * _comb0(2 * n - 6, ell - 4) + 16 * k * _comb0(2 * n - 5, ell - 3)
    return 2 * lhs <= _comb0(2 * n - 4, ell - 2)


def equalize(mat: KikuchiMatrix, target: int) -> KikuchiMatrix:
    """Keep exactly ``target`` entries, the smallest in (row, col) order."""
    if target < 0:
        raise InputError("target entry count must be nonnegative")
    if mat.nnz < target:
        raise InfeasibilityError(
            f"matrix has {mat.nnz} entries, cannot equalize to {target}",
            deficit=target - mat.nnz,
        )
    keep = sorted(mat.entries)[:target]
    entries = {key: mat.entries[key] for key in keep}
    provenance = None
    if mat.provenance is not None:
        provenance = {key: mat.provenance[key] for key in keep if key in mat.provenance}
    return KikuchiMatrix(
        row_count=mat.row_count,
        col_count=mat.col_count,
        entries=entries,
        universe=mat.universe,
        row_subset_size=mat.row_subset_size,
        col_subset_size=mat.col_subset_size,
        provenance=provenance,
    )


@dataclass(frozen=True)
class ClauseAudit:
    clause: DerivedClause
    raw_entries: int
    kept_entries: int


@dataclass(frozen=True)
class AssembledKikuchi:
    """Signed aggregate of equalized per-clause matrices plus its audit."""

    matrix: KikuchiMatrix
    entry_target: int
    subset_count: int
    audits: tuple[ClauseAudit, ...]


def member_matrix(
    family: MatchingFamily,
    part: Partition,
    i: int,
    ell: int,
    derived: DerivedFourXor | None = None,
) -> KikuchiMatrix:
    """Unsigned aggregate of the raw (un-equalized) clause matrices of one
    left member; its rows and columns stay sparse when pair degrees are low."""
    if derived is None:
        derived = derive_4xor(family, part)
    half = half_clauses(family, part, i)
    parts = []
    for cl in derived.generic:
        if cl.i != i:
            continue
        parts.append((1, build_clause_kikuchi(cl.c_left, cl.c_right, ell, half, family.n)))
    indexer = SubsetIndexer(2 * family.n, ell)
    return KikuchiMatrix(
        indexer.count, indexer.count, aggregate_matrices(parts), 2 * family.n, ell, ell
    )


def assemble_kikuchi(
    family: MatchingFamily,
    part: Partition,
    signs,
    ell: int,
    k_ratio_limit: float = 2.0,
    derived: DerivedFourXor | None = None,
) -> AssembledKikuchi:
    """Sum b_i b_j times the equalized matrix of every generic derived clause.

    Raises InfeasibilityError (carrying the offending clause) when any clause
    matrix has fewer entries than the common target, which signals parameters
    outside the counting regime.
    """
    signs = tuple(signs)
    if len(signs) != family.k:
        raise InputError("need one sign per member")
    if k_ratio_limit > 0 and family.k > family.n / k_ratio_limit:
        raise InputError(
            f"k={family.k} exceeds n/{k_ratio_limit}={family.n / k_ratio_limit:.1f}; "
            "split the family into blocks before assembling"
        )
    if derived is None:
        derived = derive_4xor(family, part)
    n = family.n
    target = clause_entry_target(n, ell)
    parts: list[tuple[int, KikuchiMatrix]] = []
    audits: list[ClauseAudit] = []
    for i in sorted(part.left):
        mine = [cl for cl in derived.generic if cl.i == i]
        if not mine:
            continue
        half = half_clauses(family, part, i)
        for cl in sorted(mine, key=lambda c: (c.j, c.u)):
            raw = build_clause_kikuchi(cl.c_left, cl.c_right, ell, half, n)
            if raw.nnz < target:
                raise InfeasibilityError(
                    f"derived clause {cl} yields {raw.nnz} < {target} entries; "
                    f"ell={ell} is outside the counting regime",
                    deficit=target - raw.nnz,
                    clause=cl,
                )
            kept = equalize(raw, target)
            parts.append((signs[cl.i - 1] * signs[cl.j - 1], kept))
            audits.append(ClauseAudit(clause=cl, raw_entries=raw.nnz, kept_entries=kept.nnz))
    indexer = SubsetIndexer(2 * n, ell)
    matrix = KikuchiMatrix(
        indexer.count, indexer.count, aggregate_matrices(parts), 2 * n, ell, ell
    )
    return AssembledKikuchi(
        matrix=matrix, entry_target=target, subset_count=indexer.count, audits=tuple(audits)
    )


# ---------------------------------------------------------------------------
# Lifted assignments and exact quadratic forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LiftedAssignment:
    """z_S = prod over first-copy elements of S times prod over second-copy
    elements, for every ell-subset S of the doubled vertex set."""

    values: np.ndarray
    universe: int
    subset_size: int


def lift(x, ell: int) -> LiftedAssignment:
    xt = validate_assignment(x, len(tuple(x)))
    n = len(xt)
    indexer = SubsetIndexer(2 * n, ell)
    values = np.empty(indexer.count, dtype=np.int8)
    for r in range(indexer.count):
        values[r] = _lift_value(xt, indexer.unrank(r), n)
    return LiftedAssignment(values=values, universe=2 * n, subset_size=ell)


def _lift_value(x: tuple[int, ...], elements: tuple[int, ...], n: int) -> int:
    prod = 1
    for e in elements:
        prod *= x[e] if e < n else x[e - n]
    return prod


def quadratic_form(mat: KikuchiMatrix, x) -> int:
    """Exact integer z^T M z (or y^T M y for single-copy universes).

    ``x`` is the base assignment; subset values are derived on demand, so the
    full lifted vector is never materialized.
    """
    if mat.universe is None or mat.row_subset_size is None:
        raise InputError("matrix lacks subset metadata; cannot take quadratic form")
    xt = validate_assignment(x, len(tuple(x)))
    n = len(xt)
    if mat.universe not in (n, 2 * n):
        raise InputError(f"assignment length {n} does not match universe {mat.universe}")
    rows = SubsetIndexer(mat.universe, mat.row_subset_size)
    cols = SubsetIndexer(mat.universe, mat.col_subset_size)
    memo_r: dict[int, int] = {}
    memo_c: dict[int, int] = {}
    base = n if mat.universe == 2 * n else mat.universe
    total = 0
    for (r, c), w in mat.entries.items():
        zr = memo_r.get(r)
        if zr is None:
            zr = memo_r[r] = _lift_value(xt, rows.unrank(r), base)
        zc = memo_c.get(c)
        if zc is None:
            zc = memo_c[c] = _lift_value(xt, cols.unrank(c), base)
        total += w * zr * zc
    return total


def _comb0(n: int, r: int) -> int:
    if r < 0 or n < 0 or r > n:
        return 0
    return math.comb(n, r)
