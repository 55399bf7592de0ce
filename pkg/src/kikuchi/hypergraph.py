"""Uniform hypergraphs, matching families, and the greedy pair decomposition.

Vertices are 1-based (``1..n``).  A family's "union degree" of a vertex set Q
is the sum of per-member degrees, i.e. the union is treated as a multiset;
members of a family may overlap even when each is individually a matching.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

from .errors import InputError

Edge = tuple[int, ...]
Pair = tuple[int, int]


@dataclass(frozen=True)
class Hypergraph:
    """A q-uniform hypergraph on vertices 1..n with strictly sorted edges."""

    n: int
    edges: tuple[Edge, ...]
    q: int

    def __post_init__(self):
        if self.n <= 0:
            raise InputError("vertex count must be positive")
        if self.q <= 0:
            raise InputError("uniformity must be positive")
        for e in self.edges:
            if len(e) != self.q:
                raise InputError(f"edge {e} has size {len(e)}, expected {self.q}")
            if any(not 1 <= v <= self.n for v in e):
                raise InputError(f"edge {e} has a vertex outside 1..{self.n}")
            if any(a >= b for a, b in zip(e, e[1:])):
                raise InputError(f"edge {e} is not strictly increasing")

    @classmethod
    def from_edges(cls, n: int, edges, q: int | None = None) -> "Hypergraph":
        norm = tuple(tuple(sorted(e)) for e in edges)
        if q is None:
            if not norm:
                raise InputError("cannot infer uniformity from an empty edge list")
            q = len(norm[0])
        return cls(n=n, edges=norm, q=q)

    def degree(self, query) -> int:
        qset = _validated_subset(query, self.n)
        return sum(1 for e in self.edges if qset.issubset(e))

    def is_matching(self) -> bool:
        seen: set[int] = set()
        for e in self.edges:
            if any(v in seen for v in e):
                return False
            seen.update(e)
        return True


@dataclass(frozen=True)
class MatchingFamily:
    """Hypergraphs H_1..H_k, one matching per message bit, on shared vertices."""

    n: int
    members: tuple[Hypergraph, ...]

    def __post_init__(self):
        if not self.members:
            raise InputError("a family needs at least one member")
        q = self.members[0].q
        for idx, h in enumerate(self.members, start=1):
            if h.n != self.n:
                raise InputError(f"member {idx} has n={h.n}, family has n={self.n}")
            if h.q != q:
                raise InputError("members must share one uniformity")
            if not h.is_matching():
                raise InputError(f"member {idx} is not a matching")

    @classmethod
    def from_edge_lists(cls, n: int, edge_lists, q: int) -> "MatchingFamily":
        return cls(n, tuple(Hypergraph.from_edges(n, el, q) for el in edge_lists))

    @property
    def k(self) -> int:
        return len(self.members)

    @property
    def q(self) -> int:
        return self.members[0].q

    @cached_property
    def m(self) -> int:
        return sum(len(h.edges) for h in self.members)

    def degree(self, query) -> int:
        return sum(h.degree(query) for h in self.members)

    def vertex_to_edge_maps(self) -> list[dict[int, Edge]]:
        """Per member, map each covered vertex to its unique edge."""
        out = []
        for h in self.members:
            lookup: dict[int, Edge] = {}
            for e in h.edges:
                for v in e:
                    lookup[v] = e
            out.append(lookup)
        return out


def degree(obj: Hypergraph | MatchingFamily, query) -> int:
    """Number of edges containing ``query`` (summed over members for a family)."""
    return obj.degree(query)


BipartiteEdge = tuple[int, Pair]  # (left vertex w, right vertex {u,v})


@dataclass(frozen=True)
class DecompositionResult:
    """Residual family plus the bipartite graphs absorbing heavy-pair clauses.

    ``heavy_pairs`` lists, in selection order, the pairs that were contracted;
    it is the right vertex set of every ``bipartite`` member.
    """

    residual: MatchingFamily
    bipartite: tuple[tuple[BipartiteEdge, ...], ...]
    heavy_pairs: tuple[Pair, ...]
    threshold: int

    @property
    def removed_total(self) -> int:
        return sum(len(g) for g in self.bipartite)


def decompose(family: MatchingFamily, d: int) -> DecompositionResult:
    """Split ``family`` so no vertex pair stays in more than ``d`` clauses.

    Repeatedly picks the smallest (lexicographic) pair whose union degree
    exceeds ``d``, removes every residual clause containing it, and records
    each removed clause ``{u,v,w}`` as the bipartite edge ``(w, {u,v})`` of its
    member.  Pair degrees are maintained incrementally; the result matches a
    full recomputation because removal only ever decreases degrees.
    """
    if family.q != 3:
        raise InputError(f"decomposition needs a 3-uniform family, got q={family.q}")
    if d < 1:
        raise InputError("threshold d must be at least 1")

    alive: list[list[bool]] = [[True] * len(h.edges) for h in family.members]
    pair_deg: Counter[Pair] = Counter()
    incidence: dict[Pair, list[tuple[int, int]]] = {}
    for mi, h in enumerate(family.members):
        for ei, e in enumerate(h.edges):
            for p in combinations(e, 2):
                pair_deg[p] += 1
                incidence.setdefault(p, []).append((mi, ei))

    graphs: list[list[BipartiteEdge]] = [[] for _ in family.members]
    selected: list[Pair] = []
    while True:
        heavy = [p for p, c in pair_deg.items() if c > d]
        if not heavy:
            break
        p = min(heavy)
        selected.append(p)
        for mi, ei in incidence[p]:
            if not alive[mi][ei]:
                continue
            alive[mi][ei] = False
            edge = family.members[mi].edges[ei]
            for other in combinations(edge, 2):
                pair_deg[other] -= 1
                if pair_deg[other] == 0:
                    del pair_deg[other]
            (w,) = [v for v in edge if v not in p]
            graphs[mi].append((w, p))

    residual = MatchingFamily(
        family.n,
        tuple(
            Hypergraph(
                h.n,
                tuple(e for ei, e in enumerate(h.edges) if alive[mi][ei]),
                h.q,
            )
            for mi, h in enumerate(family.members)
        ),
    )
    return DecompositionResult(
        residual=residual,
        bipartite=tuple(tuple(g) for g in graphs),
        heavy_pairs=tuple(selected),
        threshold=d,
    )


def check_decomposition(family: MatchingFamily, result: DecompositionResult) -> list[str]:
    """Re-verify each clause of the decomposition contract independently.

    Returns a list of human-readable violations (empty when all five
    properties hold): bipartite shape, residual containment, one-to-one
    correspondence, post-degree, and matching preservation.
    """
    problems: list[str] = []
    pair_set = set(result.heavy_pairs)
    d = result.threshold

    for mi, g in enumerate(result.bipartite, start=1):
        for w, p in g:
            if not 1 <= w <= family.n:
                problems.append(f"G_{mi}: left vertex {w} outside 1..{family.n}")
            if p not in pair_set:
                problems.append(f"G_{mi}: right vertex {p} not a recorded heavy pair")

    for mi, (orig, res) in enumerate(zip(family.members, result.residual.members), start=1):
        orig_edges = Counter(orig.edges)
        res_edges = Counter(res.edges)
        if res_edges - orig_edges:
            problems.append(f"H'_{mi} is not a subset of H_{mi}")
        removed = orig_edges - res_edges
        mapped = Counter(tuple(sorted((w,) + p)) for w, p in result.bipartite[mi - 1])
        if removed != mapped:
            problems.append(f"member {mi}: G_{mi} edges do not match removed clauses")
        if len(orig.edges) != len(res.edges) + len(result.bipartite[mi - 1]):
            problems.append(f"member {mi}: |H_i| != |H'_i| + |G_i|")

    for u, v in combinations(range(1, family.n + 1), 2):
        if result.residual.degree((u, v)) > d:
            problems.append(f"residual pair degree of {{{u},{v}}} exceeds {d}")
            break

    for mi, res in enumerate(result.residual.members, start=1):
        if not res.is_matching():
            problems.append(f"H'_{mi} is not a matching")
    for mi, g in enumerate(result.bipartite, start=1):
        lefts = [w for w, _ in g]
        rights = [p for _, p in g]
        if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
            problems.append(f"G_{mi} is not a bipartite matching")

    return problems


@dataclass(frozen=True)
class PairCopy:
    """One duplicated occurrence of a heavy pair with its share of edges."""

    pair: Pair
    copy_index: int
    edges: tuple[tuple[int, int], ...]  # (member index 0-based, left vertex)


def duplicate_heavy_pairs(result: DecompositionResult) -> tuple[PairCopy, ...]:
    """Split each heavy pair into copies carrying between d and 2d edges.

    Every selected pair absorbed at least d+1 clauses, so a partition of its
    edge list into chunks of size in [d, 2d] always exists; the final two
    chunks are rebalanced when the tail falls short of d.
    """
    d = result.threshold
    per_pair: dict[Pair, list[tuple[int, int]]] = {p: [] for p in result.heavy_pairs}
    for mi, g in enumerate(result.bipartite):
        for w, p in g:
            per_pair[p].append((mi, w))

    copies: list[PairCopy] = []
    for p in result.heavy_pairs:
        edges = per_pair[p]
        if len(edges) < d:
            raise InputError(f"pair {p} carries {len(edges)} < d edges; not from decompose?")
        chunks = [edges[i : i + 2 * d] for i in range(0, len(edges), 2 * d)]
        if len(chunks) > 1 and len(chunks[-1]) < d:
            merged = chunks[-2] + chunks[-1]
            half = len(merged) // 2
            chunks[-2:] = [merged[:half], merged[half:]]
        for ci, chunk in enumerate(chunks):
            if not d <= len(chunk) <= 2 * d:
                raise InputError(f"pair {p}: chunk of size {len(chunk)} outside [d, 2d]")
            copies.append(PairCopy(pair=p, copy_index=ci, edges=tuple(chunk)))
    return copies


def suggest_pair_threshold(n: int, eps: float, delta: float, c: float = 1.0) -> int:
    """Heuristic threshold ceil(c * ln(n) / (eps^2 * delta^2)), at least 1."""
    if n < 2 or eps <= 0 or delta <= 0 or c <= 0:
        raise InputError("need n >= 2 and positive eps, delta, c")
    return max(1, math.ceil(c * math.log(n) / (eps * eps * delta * delta)))


def family_to_text(family: MatchingFamily) -> str:
    """Serialize as ``n k q`` header plus per-member blocks ``i |H_i|``."""
    lines = [f"{family.n} {family.k} {family.q}"]
    for i, h in enumerate(family.members, start=1):
        lines.append(f"{i} {len(h.edges)}")
        for e in h.edges:
            lines.append(" ".join(str(v) for v in e))
    return "\n".join(lines) + "\n"


def family_from_text(text: str) -> MatchingFamily:
    lines = text.splitlines()
    pos = 0

    def next_line() -> tuple[int, str]:
        nonlocal pos
        while pos < len(lines) and not lines[pos].strip():
            pos += 1
        if pos >= len(lines):
            raise InputError(f"line {len(lines) + 1}: unexpected end of input")
        pos += 1
        return pos, lines[pos - 1]

    def parse_ints(lineno: int, raw: str, count: int | None = None) -> list[int]:
        try:
            vals = [int(tok) for tok in raw.split()]
        except ValueError:
            raise InputError(f"line {lineno}: expected integers, got {raw!r}") from None
        if count is not None and len(vals) != count:
            raise InputError(f"line {lineno}: expected {count} integers, got {len(vals)}")
        return vals

    lineno, raw = next_line()
    n, k, q = parse_ints(lineno, raw, 3)
    members = []
    for i in range(1, k + 1):
        lineno, raw = next_line()
        idx, size = parse_ints(lineno, raw, 2)
        if idx != i:
            raise InputError(f"line {lineno}: expected member index {i}, got {idx}")
        if size < 0:
            raise InputError(f"line {lineno}: negative member size")
        edges = []
        for _ in range(size):
            lineno, raw = next_line()
            verts = parse_ints(lineno, raw, q)
            if sorted(set(verts)) != sorted(verts):
                raise InputError(f"line {lineno}: repeated vertex in edge")
            edges.append(tuple(sorted(verts)))
        try:
            members.append(Hypergraph(n, tuple(edges), q))
        except InputError as exc:
            raise InputError(f"member {i}: {exc}") from None
    return MatchingFamily(n, tuple(members))


def _validated_subset(query, n: int) -> frozenset[int]:
    qset = frozenset(query)
    for v in qset:
        if not 1 <= v <= n:
            raise InputError(f"vertex {v} outside 1..{n}")
    return qset
