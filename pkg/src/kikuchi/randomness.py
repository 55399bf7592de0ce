"""Seeded random-instance generation.

All randomness flows from one root seed through named substreams, so changing
how one mode draws (partitions, signs, instances) never perturbs the others.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .errors import InputError
from .hypergraph import Hypergraph, MatchingFamily


def substream(root_seed: int, name: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{root_seed}:{name}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "big"))


def random_matching(rng: np.random.Generator, n: int, q: int, edges: int) -> Hypergraph:
    if edges * q > n:
        raise InputError(f"{edges} disjoint {q}-sets do not fit in {n} vertices")
    perm = [int(v) + 1 for v in rng.permutation(n)]
    chosen = [tuple(sorted(perm[i * q : (i + 1) * q])) for i in range(edges)]
    return Hypergraph(n, tuple(chosen), q)


def random_matching_family(
    rng: np.random.Generator,
    n: int,
    k: int,
    q: int,
    max_edges: int | None = None,
    min_edges: int = 1,
    shared_pair_members: int = 0,
) -> MatchingFamily:
    """Independent random matchings, optionally sharing one planted pair.

    With ``shared_pair_members`` = t > 0 (q = 3 only), the first t members each
    receive a clause {u, v, w_i} through one common pair {u, v}, driving that
    pair's union degree to t.
    """
    cap = n // q
    if max_edges is None:
        max_edges = cap
    max_edges = min(max_edges, cap)
    if min_edges > max_edges:
        raise InputError(f"min_edges={min_edges} exceeds feasible max {max_edges}")

    planted: list[tuple[int, ...] | None] = [None] * k
    if shared_pair_members > 0:
        if q != 3:
            raise InputError("pair planting is defined for 3-uniform families")
        if shared_pair_members > k or 2 + shared_pair_members > n:
            raise InputError("not enough members or vertices to plant the pair")
        verts = [int(v) + 1 for v in rng.permutation(n)]
        u, v = sorted(verts[:2])
        for t in range(shared_pair_members):
            planted[t] = tuple(sorted((u, v, verts[2 + t])))

    members = []
    for i in range(k):
        reserved = set(planted[i]) if planted[i] else set()
        pool = [w for w in range(1, n + 1) if w not in reserved]
        perm = [pool[int(j)] for j in rng.permutation(len(pool))]
        room = len(pool) // q
        want = int(rng.integers(min_edges, max_edges + 1))
        count = min(max(want - (1 if planted[i] else 0), 0), room)
        edges = [tuple(sorted(perm[t * q : (t + 1) * q])) for t in range(count)]
        if planted[i]:
            edges.append(planted[i])
        members.append(Hypergraph(n, tuple(sorted(edges)), q))
    return MatchingFamily(n, tuple(members))


def random_bipartite_matchings(
    rng: np.random.Generator, n: int, pair_count: int, k: int, max_edges: int
) -> tuple[tuple[tuple[int, int], ...], list[list[tuple[int, tuple[int, int]]]]]:
    """Random bipartite matchings between [n] and a synthetic pair set."""
    if pair_count < 1 or n < 2:
        raise InputError("need at least one pair and two vertices")
    pairs = []
    seen = set()
    while len(pairs) < pair_count:
        a, b = rng.choice(np.arange(1, n + 1), size=2, replace=False)
        p = (min(int(a), int(b)), max(int(a), int(b)))
        if p not in seen:
            seen.add(p)
            pairs.append(p)
    members = []
    cap = min(max_edges, n, pair_count)
    for _ in range(k):
        count = int(rng.integers(0, cap + 1))
        lefts = [int(v) + 1 for v in rng.permutation(n)[:count]]
        rights = [pairs[int(j)] for j in rng.permutation(pair_count)[:count]]
        members.append(list(zip(lefts, rights)))
    return tuple(pairs), members
