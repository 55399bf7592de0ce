"""Locally decodable code fixtures and the reductions built on them.

Messages are k-bit integers (bit i-1 carries message bit i); codewords are
0/1 coordinate vectors.  Linear codes carry an explicit generator matrix and
expose per-coordinate message masks so exhaustive message loops vectorize.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product

import numpy as np

from .errors import CapacityError, ContractViolationError, InputError
from .hypergraph import (
    DecompositionResult,
    Edge,
    Hypergraph,
    MatchingFamily,
    decompose,
    duplicate_heavy_pairs,
)
from .matrices import member_matrix
from .spectral import dense_cap
from .subsets import SubsetIndexer
from .xor import Partition, XorInstance, derive_4xor

EXACT_MESSAGE_CAP = 16
FIXTURE_CAP = 12


@dataclass(frozen=True)
class LinearCode:
    """Code b -> b G over the two-element field, rows indexed by message bits."""

    generator: np.ndarray  # shape (k, n), entries 0/1

    def __post_init__(self):
        g = np.asarray(self.generator)
        if g.ndim != 2 or not np.isin(g, (0, 1)).all():
            raise InputError("generator must be a 2-D 0/1 matrix")

    @property
    def k(self) -> int:
        return self.generator.shape[0]

    @property
    def n(self) -> int:
        return self.generator.shape[1]

    @cached_property
    def column_masks(self) -> tuple[int, ...]:
        masks = []
        for v in range(self.n):
            mask = 0
            for i in range(self.k):
                if self.generator[i, v]:
                    mask |= 1 << i
            masks.append(mask)
        return tuple(masks)

    def encode_int(self, message: int) -> tuple[int, ...]:
        return tuple(_parity(message & m) for m in self.column_masks)

    def clause_mask(self, clause) -> int:
        mask = 0
        for v in clause:
            mask ^= self.column_masks[v - 1]
        return mask


@dataclass(frozen=True)
class BlackBoxCode:
    """Arbitrary encoder; only evaluable, never reduced structurally."""

    k: int
    n: int
    encode: Callable[[int], tuple[int, ...]]

    def encode_int(self, message: int) -> tuple[int, ...]:
        word = tuple(self.encode(message))
        if len(word) != self.n or any(b not in (0, 1) for b in word):
            raise InputError("encoder returned a malformed codeword")
        return word


Code = LinearCode | BlackBoxCode


@dataclass(frozen=True)
class NormalLdc:
    """A code plus one matching per message bit and its bias parameters.

    ``weak`` relaxes the per-member size floor delta*n to the aggregate floor
    delta*n*k on the total matching size.
    """

    code: Code
    matchings: MatchingFamily
    epsilon: Fraction
    delta: Fraction
    weak: bool = False

    def __post_init__(self):
        if self.matchings.n != self.code.n:
            raise InputError("matchings and code disagree on the blocklength")
        if not 0 < self.epsilon <= Fraction(1, 2) or not 0 < self.delta <= Fraction(1, 2):
            raise InputError("epsilon and delta must lie in (0, 1/2]")

    @property
    def k(self) -> int:
        return self.matchings.k

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def q(self) -> int:
        return self.matchings.q


def codeword_signs(code: Code, message: int) -> tuple[int, ...]:
    """Codeword in the multiplicative convention: bit 0 -> +1, bit 1 -> -1."""
    return tuple(1 - 2 * b for b in code.encode_int(message))


def hadamard_fixture(k: int) -> NormalLdc:
    """The inner-product code on 2^k coordinates with its bit-flip matchings.

    Coordinate v corresponds to the point a = v-1; matching i pairs a with
    a plus the i-th unit vector, so every clause decodes exactly.
    """
    if not 1 <= k <= FIXTURE_CAP:
        raise CapacityError(f"fixture cap is k <= {FIXTURE_CAP}, got {k}")
    n = 1 << k
    gen = np.zeros((k, n), dtype=np.uint8)
    for a in range(n):
        for i in range(k):
            gen[i, a] = (a >> i) & 1
    members = []
    for i in range(k):
        edges = tuple(
            (a + 1, (a | (1 << i)) + 1) for a in range(n) if not (a >> i) & 1
        )
        members.append(Hypergraph(n, edges, 2))
    return NormalLdc(
        code=LinearCode(gen),
        matchings=MatchingFamily(n, tuple(members)),
        epsilon=Fraction(1, 2),
        delta=Fraction(1, 2),
    )


def pad_to_next_arity(ldc: NormalLdc) -> NormalLdc:
    """Append n constant coordinates and give each clause its own one.

    Clause parities are unchanged (the new coordinates carry the identity
    value), matchings stay matchings, the blocklength doubles, so the density
    parameter halves while the bias is preserved.
    """
    n = ldc.n
    for idx, h in enumerate(ldc.matchings.members, start=1):
        if len(h.edges) > n:
            raise InputError(f"member {idx} has more clauses than padding coordinates")
    members = []
    for h in ldc.matchings.members:
        ordered = sorted(h.edges)
        members.append(
            Hypergraph(
                2 * n,
                tuple(e + (n + pos,) for pos, e in enumerate(ordered, start=1)),
                h.q + 1,
            )
        )
    if isinstance(ldc.code, LinearCode):
        gen = np.hstack(
            [ldc.code.generator, np.zeros((ldc.code.k, n), dtype=ldc.code.generator.dtype)]
        )
        code: Code = LinearCode(gen)
    else:
        inner = ldc.code

        def padded_encode(message: int, _inner=inner, _n=n) -> tuple[int, ...]:
            return tuple(_inner.encode_int(message)) + (0,) * _n

        code = BlackBoxCode(k=inner.k, n=2 * n, encode=padded_encode)
    return NormalLdc(
        code=code,
        matchings=MatchingFamily(2 * n, tuple(members)),
        epsilon=ldc.epsilon,
        delta=ldc.delta / 2,
        weak=ldc.weak,
    )


@dataclass(frozen=True)
class ClauseBias:
    member: int
    clause: Edge
    bias: Fraction  # probability of agreeing with the member's message bit


@dataclass(frozen=True)
class NormalVerification:
    per_clause: tuple[ClauseBias, ...]
    bias_ok: bool
    sizes_ok: bool
    mode: str

    @property
    def passed(self) -> bool:
        return self.bias_ok and self.sizes_ok


def _message_parities(code: Code, messages: np.ndarray, clause) -> np.ndarray:
    if isinstance(code, LinearCode):
        mask = code.clause_mask(clause)
        return (np.bitwise_count(messages & np.uint64(mask)) & np.uint64(1)).astype(np.uint8)
    out = np.empty(len(messages), dtype=np.uint8)
    for pos, msg in enumerate(messages):
        word = code.encode_int(int(msg))
        acc = 0
        for v in clause:
            acc ^= word[v - 1]
        out[pos] = acc
    return out


def verify_normal(
    ldc: NormalLdc,
    mode: str = "exact",
    samples: int | None = None,
    rng: np.random.Generator | None = None,
) -> NormalVerification:
    """Per-clause decoding bias, exact over all messages or sampled.

    Passes when every clause's bias reaches 1/2 + epsilon and the matching
    sizes meet the (weak or per-member) density floor.
    """
    k = ldc.k
    if mode == "exact":
        if k > EXACT_MESSAGE_CAP:
            raise CapacityError(f"exact verification caps at k <= {EXACT_MESSAGE_CAP}")
        messages = np.arange(1 << k, dtype=np.uint64)
        denom = 1 << k
        label = "exact"
    elif mode == "sample":
        if not samples or samples < 1:
            raise InputError("sampled verification needs a positive sample count")
        rng = rng if rng is not None else np.random.default_rng(0)
        messages = rng.integers(0, 1 << k, size=samples, dtype=np.uint64)
        denom = samples
        label = f"sampled:{samples}"
    else:
        raise InputError(f"unknown verification mode {mode!r}")

    per_clause = []
    threshold = Fraction(1, 2) + ldc.epsilon
    bias_ok = True
    for i, h in enumerate(ldc.matchings.members, start=1):
        bit = ((messages >> np.uint64(i - 1)) & np.uint64(1)).astype(np.uint8)
        for clause in h.edges:
            parity = _message_parities(ldc.code, messages, clause)
            agree = int((parity == bit).sum())
            bias = Fraction(agree, denom)
            per_clause.append(ClauseBias(member=i, clause=clause, bias=bias))
            if bias < threshold:
                bias_ok = False

    if ldc.weak:
        sizes_ok = Fraction(ldc.matchings.m) >= ldc.delta * ldc.n * k
    else:
        sizes_ok = all(
            Fraction(len(h.edges)) >= ldc.delta * ldc.n for h in ldc.matchings.members
        )
    return NormalVerification(
        per_clause=tuple(per_clause), bias_ok=bias_ok, sizes_ok=sizes_ok, mode=label
    )


def instance_from_ldc(ldc: NormalLdc, signs) -> XorInstance:
    """The signed XOR instance whose groups are the decoder's matchings."""
    return XorInstance.from_family(ldc.matchings, signs)


# ---------------------------------------------------------------------------
# General alphabets: character search over a product code
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneralAlphabetCode:
    """Code into an alphabet of short bit strings with per-clause decoders."""

    k: int
    n: int
    symbol_bits: int
    alphabet: tuple[int, ...]
    encode: Callable[[int], tuple[int, ...]]
    decoders: dict[tuple[int, Edge], Callable]

    def __post_init__(self):
        if len(set(self.alphabet)) > (1 << self.symbol_bits):
            raise InputError("alphabet larger than its bit width allows")
        if any(not 0 <= s < (1 << self.symbol_bits) for s in self.alphabet):
            raise InputError("alphabet symbol outside its bit width")

    def symbols(self, message: int) -> tuple[int, ...]:
        word = tuple(self.encode(message))
        if len(word) != self.n:
            raise InputError("encoder returned a malformed symbol word")
        return word


@dataclass(frozen=True)
class CharacterClause:
    member: int
    clause: Edge
    bit_subsets: tuple[int, ...]  # one bit-selection mask per queried symbol
    flip: int
    advantage: Fraction  # achieved bias minus 1/2
    new_clause: Edge


@dataclass(frozen=True)
class AlphabetReduction:
    blocklength: int
    matchings: MatchingFamily
    clauses: tuple[CharacterClause, ...]
    code: BlackBoxCode


def reduced_coordinate(v: int, subset_mask: int, flip: int, symbol_bits: int) -> int:
    """1-based coordinate of (symbol v, character mask, flip bit)."""
    return (v - 1) * (1 << (symbol_bits + 1)) + subset_mask * 2 + flip + 1


def decoder_bias(
    code: GeneralAlphabetCode, i: int, clause: Edge, messages=None
) -> Fraction:
    """Exact probability that the clause's decoder returns message bit i."""
    decoder = code.decoders[(i, clause)]
    msgs = range(1 << code.k) if messages is None else messages
    agree = 0
    total = 0
    for msg in msgs:
        symbols = code.symbols(msg)
        total += 1
        if decoder(tuple(symbols[v - 1] for v in clause)) == (msg >> (i - 1)) & 1:
            agree += 1
    return Fraction(agree, total)


def alphabet_reduce(
    code: GeneralAlphabetCode,
    matchings: MatchingFamily,
    eps: Fraction,
    messages=None,
) -> AlphabetReduction:
    """Replace each symbol clause by a parity clause over character bits.

    For every clause the search scans all tuples of per-symbol bit subsets
    (with an optional global flip) and keeps the one with the largest exact
    bias over the message space.  When the input clause had bias at least
    1/2 + eps/2, the best character is guaranteed to reach an advantage of
    eps / (2^q |Sigma|^{q/2}); falling short raises a contract violation.
    """
    if code.k > FIXTURE_CAP:
        raise CapacityError(f"exact search caps at k <= {FIXTURE_CAP}")
    if code.symbol_bits > 3:
        raise CapacityError("symbol width caps at 3 bits")
    if matchings.n != code.n:
        raise InputError("matchings and code disagree on the symbol count")
    q = matchings.q
    bits = code.symbol_bits
    msg_list = np.arange(1 << code.k, dtype=np.uint64) if messages is None else np.asarray(
        sorted(messages), dtype=np.uint64
    )
    total = len(msg_list)
    if total == 0:
        raise InputError("empty message set")
    symbol_table = np.array(
        [code.symbols(int(msg)) for msg in msg_list], dtype=np.uint8
    )  # (messages, n)

    # advantage^2 >= eps^2 / (4^q |Sigma|^q), compared exactly in squares
    target_sq = Fraction(eps, 1) ** 2 / Fraction(4**q * len(code.alphabet) ** q)

    new_members: list[list[Edge]] = [[] for _ in range(matchings.k)]
    records: list[CharacterClause] = []
    for i, h in enumerate(matchings.members, start=1):
        bit = ((msg_list >> np.uint64(i - 1)) & np.uint64(1)).astype(np.uint8)
        for clause in h.edges:
            # parity of each bit subset of each queried symbol, per message
            per_pos = []
            for v in clause:
                col = symbol_table[:, v - 1]
                per_pos.append(
                    [
                        (np.bitwise_count(col & np.uint8(s)) & 1).astype(np.uint8)
                        for s in range(1 << bits)
                    ]
                )
            best: tuple[Fraction, tuple[int, ...], int] | None = None
            for subsets in product(range(1 << bits), repeat=q):
                parity = per_pos[0][subsets[0]].copy()
                for pos in range(1, q):
                    parity ^= per_pos[pos][subsets[pos]]
                agree = int((parity == bit).sum())
                flip = 0
                if 2 * agree < total:
                    agree = total - agree
                    flip = 1
                advantage = Fraction(agree, total) - Fraction(1, 2)
                if best is None or advantage > best[0]:
                    best = (advantage, subsets, flip)
            advantage, subsets, flip = best
            if advantage * advantage < target_sq:
                raise ContractViolationError(
                    f"clause {clause} of member {i}: best character advantage "
                    f"{advantage} misses the guaranteed floor; the input bias "
                    "premise did not hold"
                )
            new_clause = tuple(
                reduced_coordinate(v, s, flip if pos == 0 else 0, bits)
                for pos, (v, s) in enumerate(zip(clause, subsets))
            )
            records.append(
                CharacterClause(
                    member=i,
                    clause=clause,
                    bit_subsets=subsets,
                    flip=flip,
                    advantage=advantage,
                    new_clause=tuple(sorted(new_clause)),
                )
            )
            new_members[i - 1].append(tuple(sorted(new_clause)))

    blocklength = code.n * (1 << (bits + 1))
    family = MatchingFamily(
        blocklength,
        tuple(Hypergraph(blocklength, tuple(edges), q) for edges in new_members),
    )

    def encode_reduced(message: int, _code=code, _bits=bits) -> tuple[int, ...]:
        symbols = _code.symbols(message)
        out = []
        for v in range(1, _code.n + 1):
            sym = symbols[v - 1]
            for mask in range(1 << _bits):
                inner = _parity(sym & mask)
                out.extend((inner, inner ^ 1))
        return tuple(out)

    return AlphabetReduction(
        blocklength=blocklength,
        matchings=family,
        clauses=tuple(records),
        code=BlackBoxCode(k=code.k, n=blocklength, encode=encode_reduced),
    )


# ---------------------------------------------------------------------------
# Weak-LDC reduction for linear codes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeakLdcCode:
    """A 2-query weak LDC produced by the reduction (or wrapped directly)."""

    kind: str  # "pair-contraction", "subset-xor", or "native"
    blocklength: int
    k: int
    left_members: tuple[int, ...]
    matchings: tuple[tuple[tuple[int, int], ...], ...]  # per left member
    delta: Fraction
    verified: bool

    @property
    def matching_total(self) -> int:
        return sum(len(m) for m in self.matchings)


@dataclass(frozen=True)
class WldcReductionResult:
    pair_code: WeakLdcCode
    subset_code: WeakLdcCode
    pair_branch_holds: bool
    residual_branch_holds: bool
    heavy_pair_count: int
    threshold: int

    @property
    def favored(self) -> WeakLdcCode:
        return self.pair_code if self.pair_branch_holds else self.subset_code


def weak_2ldc_blocklength_check(code: WeakLdcCode) -> bool:
    """Exact test of n >= 2^(delta k); false would contradict the known
    blocklength theorem for verified linear weak 2-LDCs."""
    if not code.verified:
        raise InputError("refusing the blocklength check on an unverified code")
    exponent = code.delta * code.k
    p, q = exponent.numerator, exponent.denominator
    return code.blocklength**q >= 2**p


def as_weak_2ldc(ldc: NormalLdc) -> WeakLdcCode:
    """Wrap a verified exact 2-query fixture in the weak-LDC record shape."""
    if ldc.q != 2 or not isinstance(ldc.code, LinearCode):
        raise InputError("only linear 2-query fixtures can be wrapped")
    members = tuple(range(1, ldc.k + 1))
    matchings = tuple(tuple(h.edges) for h in ldc.matchings.members)
    verified = all(
        _edges_decode_exactly(ldc.code.column_masks, ldc.k, members, matchings)
    )
    return WeakLdcCode(
        kind="native",
        blocklength=ldc.n,
        k=ldc.k,
        left_members=members,
        matchings=matchings,
        delta=Fraction(ldc.matchings.m, ldc.n * ldc.k),
        verified=verified,
    )


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


def _compress_mask(mask: int, positions: tuple[int, ...]) -> int:
    out = 0
    for j, pos in enumerate(positions):
        if (mask >> (pos - 1)) & 1:
            out |= 1 << j
    return out


def _edges_decode_exactly(column_masks, k_left, left_members, matchings):
    """Yield, per left member, whether all its edges decode bit i for every
    message of the restricted code (exhaustive enumeration)."""
    msgs = np.arange(1 << k_left, dtype=np.uint64)
    for idx, (i, edges) in enumerate(zip(left_members, matchings)):
        bit = ((msgs >> np.uint64(idx)) & np.uint64(1)).astype(np.uint8)
        ok = True
        for u, v in edges:
            mask = column_masks[u - 1] ^ column_masks[v - 1]
            parity = (np.bitwise_count(msgs & np.uint64(mask)) & np.uint64(1)).astype(np.uint8)
            if not (parity == bit).all():
                ok = False
                break
        yield ok


def _greedy_matching(edges):
    used: set = set()
    chosen = []
    for a, b in sorted(edges):
        if a in used or b in used:
            continue
        chosen.append((a, b))
        used.add(a)
        used.add(b)
    return chosen


def _max_degree(edges) -> int:
    from collections import Counter

    deg: Counter = Counter()
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    return max(deg.values(), default=0)


def _partition_candidates(k: int, seed: int, tries: int):
    """Deterministic left-side candidates, each of size >= k/2."""
    rng = np.random.default_rng(seed)
    masks = [(1 << ((k + 1) // 2)) - 1]  # first half
    masks.append(sum(1 << i for i in range(0, k, 2)))  # alternating
    masks.extend(int(rng.integers(1, 1 << k)) for _ in range(tries))
    seen = set()
    for mask in masks:
        left = tuple(i for i in range(1, k + 1) if (mask >> (i - 1)) & 1)
        if len(left) * 2 < k:
            left = tuple(i for i in range(1, k + 1) if i not in left)
        if left and left not in seen:
            seen.add(left)
            yield left


def weak_ldc_reduction(
    ldc: NormalLdc, d: int, ell: int, seed: int = 0, partition_tries: int = 16
) -> WldcReductionResult:
    """Produce the two derived 2-query weak LDCs of a linear exact 3-query code.

    The pair-contraction code lives on the original coordinates and decodes
    through shared heavy pairs with the right side hardcoded to zero; the
    subset-xor code lives on ranked subsets of two copies of the coordinates
    and decodes through the clause-membership matrices of the residual family.
    Every emitted clause is verified to decode exactly for all messages of the
    restricted code; the greedy matchings satisfy |M| >= |E| / (2 max-degree).
    """
    if not isinstance(ldc.code, LinearCode):
        raise InputError(
            "the reduction needs a linear code: it hardcodes right-side message "
            "bits to zero, and only exact (linear) decoding survives hardcoding"
        )
    if ldc.k > FIXTURE_CAP:
        raise CapacityError(f"reduction caps at k <= {FIXTURE_CAP}")
    if ldc.q != 3:
        raise InputError(f"the reduction expects a 3-query code, got q={ldc.q}")
    verification = verify_normal(ldc, mode="exact")
    if any(cb.bias != 1 for cb in verification.per_clause):
        raise InputError("input clauses must decode exactly (bias 1) for all messages")

    family = ldc.matchings
    n, k = family.n, family.k
    dec = decompose(family, d)
    sum_pairs = dec.removed_total
    sum_residual = dec.residual.m
    floor = ldc.delta * n * k / 2
    pair_branch = Fraction(sum_pairs) >= floor
    residual_branch = Fraction(sum_residual) >= floor

    pair_code = _build_pair_contraction_code(ldc, dec, seed, partition_tries)
    subset_code = _build_subset_xor_code(ldc, dec, d, ell, seed, partition_tries)
    return WldcReductionResult(
        pair_code=pair_code,
        subset_code=subset_code,
        pair_branch_holds=pair_branch,
        residual_branch_holds=residual_branch,
        heavy_pair_count=len(dec.heavy_pairs),
        threshold=d,
    )


def _build_pair_contraction_code(
    ldc: NormalLdc, dec: DecompositionResult, seed: int, tries: int
) -> WeakLdcCode:
    n, k = ldc.n, ldc.k
    copies = duplicate_heavy_pairs(dec) if dec.heavy_pairs else ()
    best: tuple[int, tuple[int, ...], list[list[tuple[int, int]]]] | None = None
    for left in _partition_candidates(k, seed, tries):
        left_set = set(left)
        edge_sets: list[set[tuple[int, int]]] = [set() for _ in left]
        for copy in copies:
            for pos, i in enumerate(left):
                lefts = [w for mi, w in copy.edges if mi + 1 == i]
                rights = [w for mi, w in copy.edges if mi + 1 not in left_set]
                for u in lefts:
                    for v in rights:
                        if u != v:
                            edge_sets[pos].add((min(u, v), max(u, v)))
        matchings = []
        score = 0
        for edges in edge_sets:
            chosen = _greedy_matching(edges)
            if edges:
                assert len(chosen) * 2 * _max_degree(edges) >= len(edges)
            matchings.append(chosen)
            score += len(chosen)
        if best is None or score > best[0]:
            best = (score, left, matchings)
    _, left, matchings = best
    column_masks = [
        _compress_mask(m, left) for m in ldc.code.column_masks
    ]
    verified = all(_edges_decode_exactly(column_masks, len(left), left, matchings))
    return WeakLdcCode(
        kind="pair-contraction",
        blocklength=n,
        k=len(left),
        left_members=left,
        matchings=tuple(tuple(m) for m in matchings),
        delta=Fraction(sum(len(m) for m in matchings), n * len(left)),
        verified=verified,
    )


def _build_subset_xor_code(
    ldc: NormalLdc, dec: DecompositionResult, d: int, ell: int, seed: int, tries: int
) -> WeakLdcCode:
    residual = dec.residual
    n, k = residual.n, residual.k
    indexer = SubsetIndexer(2 * n, ell)
    if indexer.count > dense_cap():
        raise CapacityError(
            f"subset code blocklength {indexer.count} exceeds the dense cap"
        )
    best: tuple[int, tuple[int, ...], list[list[tuple[int, int]]]] | None = None
    for left in _partition_candidates(k, seed, tries):
        part = Partition(k, frozenset(left))
        derived = derive_4xor(residual, part)
        matchings = []
        score = 0
        for i in left:
            mat = member_matrix(residual, part, i, ell, derived)
            edges = {(min(r, c), max(r, c)) for r, c in mat.entries}
            if edges:
                maxdeg = _max_degree(edges)
                assert maxdeg <= 2 * d, "member matrix degree exceeded twice the pair bound"
                chosen = _greedy_matching(edges)
                assert len(chosen) * 2 * maxdeg >= len(edges)
            else:
                chosen = []
            matchings.append(chosen)
            score += len(chosen)
        if best is None or score > best[0]:
            best = (score, left, matchings)
    _, left, rank_matchings = best
    # coordinates are 1-based ranks; decode masks xor the base columns of
    # every element of the subset (both copies hit the same base column)
    base = ldc.code.column_masks
    subset_masks: dict[int, int] = {}

    def mask_of(rank: int) -> int:
        cached = subset_masks.get(rank)
        if cached is None:
            mask = 0
            for e in indexer.unrank(rank):
                mask ^= base[e % n]
            cached = subset_masks[rank] = mask
        return cached

    matchings = tuple(
        tuple((r + 1, c + 1) for r, c in member) for member in rank_matchings
    )
    column = {
        coord: mask_of(coord - 1)
        for member in matchings
        for edge in member
        for coord in edge
    }
    compressed = {
        coord: _compress_mask(mask, left) for coord, mask in column.items()
    }
    msgs = np.arange(1 << len(left), dtype=np.uint64)
    verified = True
    for idx, member in enumerate(matchings):
        bit = ((msgs >> np.uint64(idx)) & np.uint64(1)).astype(np.uint8)
        for u, v in member:
            mask = compressed[u] ^ compressed[v]
            parity = (np.bitwise_count(msgs & np.uint64(mask)) & np.uint64(1)).astype(np.uint8)
            if not (parity == bit).all():
                verified = False
    return WeakLdcCode(
        kind="subset-xor",
        blocklength=indexer.count,
        k=len(left),
        left_members=left,
        matchings=matchings,
        delta=Fraction(sum(len(m) for m in matchings), max(indexer.count * len(left), 1)),
        verified=verified,
    )
