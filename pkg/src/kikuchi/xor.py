"""Signed XOR polynomials over {-1,+1} variables and their exact oracles.

An instance groups its constraints by the matching that produced them; all
constraints of group i share the sign ``signs[i-1]``.  Evaluation keeps exact
integer numerators, dividing by the constraint count only at the end.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations

import numpy as np

from .errors import CapacityError, InputError
from .hypergraph import Edge, MatchingFamily, family_from_text, family_to_text

Assignment = tuple[int, ...]  # entries in {-1, +1}

BRUTE_FORCE_CAP = 24
EXHAUSTIVE_SIGN_CAP = 16


@dataclass(frozen=True)
class XorInstance:
    n: int
    groups: tuple[tuple[Edge, ...], ...]
    signs: tuple[int, ...]
    arity: int

    def __post_init__(self):
        if len(self.groups) != len(self.signs):
            raise InputError("need one sign per constraint group")
        if any(s not in (-1, 1) for s in self.signs):
            raise InputError("signs must be +1 or -1")
        for g in self.groups:
            for e in g:
                if len(e) != self.arity:
                    raise InputError(f"constraint {e} has arity {len(e)} != {self.arity}")
                if any(not 1 <= v <= self.n for v in e) or len(set(e)) != len(e):
                    raise InputError(f"constraint {e} is not a subset of 1..{self.n}")

    @classmethod
    def from_family(cls, family: MatchingFamily, signs) -> "XorInstance":
        return cls(
            n=family.n,
            groups=tuple(h.edges for h in family.members),
            signs=tuple(signs),
            arity=family.q,
        )

    @property
    def k(self) -> int:
        return len(self.groups)

    @cached_property
    def m(self) -> int:
        return sum(len(g) for g in self.groups)

    def family(self) -> MatchingFamily:
        return MatchingFamily.from_edge_lists(self.n, self.groups, self.arity)

    @cached_property
    def digest(self) -> str:
        return hashlib.sha256(instance_to_text(self).encode()).hexdigest()[:16]


def validate_assignment(x, n: int) -> Assignment:
    xt = tuple(x)
    if len(xt) != n:
        raise InputError(f"assignment has length {len(xt)}, expected {n}")
    if any(v not in (-1, 1) for v in xt):
        raise InputError("assignment entries must be +1 or -1")
    return xt


def evaluate_unnormalized(inst: XorInstance, x) -> int:
    """Exact integer value of sum_i b_i sum_C prod_{v in C} x_v."""
    xt = validate_assignment(x, inst.n)
    total = 0
    for sign, group in zip(inst.signs, inst.groups):
        for e in group:
            prod = 1
            for v in e:
                prod *= xt[v - 1]
            total += sign * prod
    return total


def evaluate(inst: XorInstance, x) -> Fraction:
    """Normalized value (1/m) * sum_i b_i sum_C prod x_v, exact."""
    if inst.m == 0:
        raise InputError("cannot evaluate an instance with no constraints")
    return Fraction(evaluate_unnormalized(inst, x), inst.m)


@dataclass(frozen=True)
class BruteForceResult:
    value: Fraction  # max of the normalized polynomial
    best_total: int  # max of the unnormalized polynomial
    assignment: Assignment

    @property
    def constraint_fraction(self) -> Fraction:
        """Max fraction of satisfied constraints: 1/2 + value/2."""
        return Fraction(1, 2) + self.value / 2


def _parity_per_assignment(n: int, mask: int) -> np.ndarray:
    """Parity of popcount(a & mask) for every assignment index a in 0..2^n-1."""
    a = np.arange(1 << n, dtype=np.uint64)
    return (np.bitwise_count(a & np.uint64(mask)) & np.uint64(1)).astype(np.int64)


def assignment_from_index(index: int, n: int) -> Assignment:
    """Bit v-1 of ``index`` set means x_v = -1."""
    return tuple(-1 if (index >> (v - 1)) & 1 else 1 for v in range(1, n + 1))


def brute_force_val(inst: XorInstance, cap: int = BRUTE_FORCE_CAP) -> BruteForceResult:
    """Maximize the instance polynomial over all 2^n assignments, exactly."""
    if inst.m == 0:
        raise InputError("cannot maximize an instance with no constraints")
    if inst.n > cap:
        raise CapacityError(f"n={inst.n} exceeds brute-force cap {cap}")
    totals = np.zeros(1 << inst.n, dtype=np.int64)
    for sign, group in zip(inst.signs, inst.groups):
        for e in group:
            mask = 0
            for v in e:
                mask |= 1 << (v - 1)
            totals += sign * (1 - 2 * _parity_per_assignment(inst.n, mask))
    idx = int(np.argmax(totals))
    best = int(totals[idx])
    return BruteForceResult(
        value=Fraction(best, inst.m),
        best_total=best,
        assignment=assignment_from_index(idx, inst.n),
    )


def brute_force_bipartite_val(n: int, pairs, members_edges, signs) -> int:
    """Exact max of sum_i b_i sum_{(w,p) in G_i} x_w y_p over both sign blocks.

    For fixed x the optimal y is the sign of each column sum, so only the
    2^n left assignments are enumerated.
    """
    pair_list = list(pairs)
    signs = tuple(signs)
    if len(signs) != len(members_edges):
        raise InputError("need one sign per bipartite member")
    if n > BRUTE_FORCE_CAP:
        raise CapacityError(f"n={n} exceeds brute-force cap {BRUTE_FORCE_CAP}")
    if not pair_list:
        return 0
    col_index = {p: j for j, p in enumerate(pair_list)}
    weights = np.zeros((n, len(pair_list)), dtype=np.int64)
    for sign, g in zip(signs, members_edges):
        for w, p in g:
            weights[w - 1, col_index[p]] += sign
    best = 0
    for a in range(1 << n):
        x = np.fromiter(
            ((-1 if (a >> i) & 1 else 1) for i in range(n)), dtype=np.int64, count=n
        )
        best = max(best, int(np.abs(x @ weights).sum()))
    return best


@dataclass(frozen=True)
class Partition:
    """A split of group indices 1..k into a left and right side."""

    k: int
    left: frozenset[int]

    def __post_init__(self):
        if any(not 1 <= i <= self.k for i in self.left):
            raise InputError("left side contains an index outside 1..k")

    @property
    def right(self) -> frozenset[int]:
        return frozenset(range(1, self.k + 1)) - self.left


def enumerate_partitions(k: int, mode: str = "independent"):
    """All partitions under the chosen distribution, in deterministic order.

    ``independent``: every one of the 2^k left subsets (each index joins the
    left side independently).  ``balanced``: all equal-size splits (k even).
    """
    if mode == "independent":
        for t in range(1 << k):
            yield Partition(k, frozenset(i for i in range(1, k + 1) if (t >> (i - 1)) & 1))
    elif mode == "balanced":
        if k % 2 != 0:
            raise InputError("balanced partitions need even k")
        for left in combinations(range(1, k + 1), k // 2):
            yield Partition(k, frozenset(left))
    else:
        raise InputError(f"unknown partition mode {mode!r}")


def partition_count(k: int, mode: str = "independent") -> int:
    if mode == "independent":
        return 1 << k
    if mode == "balanced":
        if k % 2 != 0:
            raise InputError("balanced partitions need even k")
        from math import comb

        return comb(k, k // 2)
    raise InputError(f"unknown partition mode {mode!r}")


def random_partition(k: int, rng: np.random.Generator, mode: str = "independent") -> Partition:
    if mode == "independent":
        mask = int(rng.integers(0, 1 << k))
        return Partition(k, frozenset(i for i in range(1, k + 1) if (mask >> (i - 1)) & 1))
    if mode == "balanced":
        if k % 2 != 0:
            raise InputError("balanced partitions need even k")
        chosen = rng.choice(np.arange(1, k + 1), size=k // 2, replace=False)
        return Partition(k, frozenset(int(v) for v in chosen))
    raise InputError(f"unknown partition mode {mode!r}")


@dataclass(frozen=True)
class DerivedClause:
    """One cross-partition cancellation: (u,C) in H_i, (u,C') in H_j."""

    i: int
    j: int
    u: int
    c_left: tuple[int, int]
    c_right: tuple[int, int]

    @property
    def overlap(self) -> int:
        return len(set(self.c_left) & set(self.c_right))

    @property
    def monomial(self) -> tuple[int, ...]:
        """Support of x_C * x_{C'} after cancelling squares."""
        return tuple(sorted(set(self.c_left) ^ set(self.c_right)))


@dataclass(frozen=True)
class DerivedFourXor:
    """The cross-partition instance; degenerate clauses are kept separately.

    ``generic`` clauses have disjoint C, C' (true 4-variable monomials);
    ``degenerate`` ones share 1 vertex (2-variable monomial) or are constant.
    """

    partition: Partition
    generic: tuple[DerivedClause, ...]
    degenerate: tuple[DerivedClause, ...]

    @property
    def clauses(self) -> tuple[DerivedClause, ...]:
        return self.generic + self.degenerate


def derive_4xor(family: MatchingFamily, part: Partition) -> DerivedFourXor:
    """Enumerate all cross-partition derived clauses of a 3-uniform family."""
    if family.q != 3:
        raise InputError(f"derivation needs a 3-uniform family, got q={family.q}")
    if part.k != family.k:
        raise InputError("partition size does not match family size")
    lookups = family.vertex_to_edge_maps()
    left = sorted(part.left)
    right = sorted(part.right)
    generic: list[DerivedClause] = []
    degenerate: list[DerivedClause] = []
    for u in range(1, family.n + 1):
        holders_left = [(i, lookups[i - 1][u]) for i in left if u in lookups[i - 1]]
        if not holders_left:
            continue
        holders_right = [(j, lookups[j - 1][u]) for j in right if u in lookups[j - 1]]
        for i, ei in holders_left:
            c_left = tuple(v for v in ei if v != u)
            for j, ej in holders_right:
                c_right = tuple(v for v in ej if v != u)
                clause = DerivedClause(i=i, j=j, u=u, c_left=c_left, c_right=c_right)
                (generic if clause.overlap == 0 else degenerate).append(clause)
    return DerivedFourXor(partition=part, generic=tuple(generic), degenerate=tuple(degenerate))


def evaluate_derived(derived: DerivedFourXor, signs, x) -> int:
    """Exact integer value of the derived polynomial at x (all clauses)."""
    signs = tuple(signs)
    total = 0
    for cl in derived.clauses:
        prod = 1
        for v in cl.monomial:
            prod *= x[v - 1]
        total += signs[cl.i - 1] * signs[cl.j - 1] * prod
    return total


@dataclass(frozen=True)
class CauchySchwarzAudit:
    lhs: int
    rhs: Fraction
    expectation: Fraction
    holds: bool


def cauchy_schwarz_audit(
    family: MatchingFamily, signs, x, exhaustive: bool = True
) -> CauchySchwarzAudit:
    """Check 9 f(x)^2 <= 3nm + 4n E_{(L,R)} f_{L,R}(x) with an exact expectation.

    The expectation is over independent-inclusion partitions, enumerated in
    full (2^k terms) when ``exhaustive``; the inequality is guaranteed
    pointwise in x, so a failure indicates a bug, not bad luck.
    """
    if not exhaustive:
        raise InputError("only the exhaustive audit is exact; use it")
    k = family.k
    if k > EXHAUSTIVE_SIGN_CAP:
        raise CapacityError(f"k={k} exceeds exhaustive partition cap {EXHAUSTIVE_SIGN_CAP}")
    inst = XorInstance.from_family(family, signs)
    xt = validate_assignment(x, family.n)
    f_val = evaluate_unnormalized(inst, xt)
    total = 0
    for part in enumerate_partitions(k, "independent"):
        total += evaluate_derived(derive_4xor(family, part), signs, xt)
    expectation = Fraction(total, 1 << k)
    lhs = 9 * f_val * f_val
    rhs = 3 * family.n * family.m + 4 * family.n * expectation
    return CauchySchwarzAudit(lhs=lhs, rhs=rhs, expectation=expectation, holds=lhs <= rhs)


def instance_to_text(inst: XorInstance) -> str:
    """Hypergraph text format plus one trailing line of +/- signs."""
    fam_text = family_to_text(inst.family())
    sign_line = " ".join("+" if s == 1 else "-" for s in inst.signs)
    return fam_text + sign_line + "\n"


def instance_from_text(text: str) -> XorInstance:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise InputError("line 1: empty instance")
    sign_line = lines[-1].split()
    body = "\n".join(lines[:-1]) + "\n"
    family = family_from_text(body)
    if len(sign_line) != family.k:
        raise InputError(f"line {len(lines)}: expected {family.k} signs, got {len(sign_line)}")
    signs = []
    for tok in sign_line:
        if tok == "+":
            signs.append(1)
        elif tok == "-":
            signs.append(-1)
        else:
            raise InputError(f"line {len(lines)}: sign must be + or -, got {tok!r}")
    return XorInstance.from_family(family, signs)


def enumerate_sign_vectors(k: int):
    """All 2^k sign vectors; bit i-1 of the index set means signs[i-1] = -1."""
    for t in range(1 << k):
        yield tuple(-1 if (t >> i) & 1 else 1 for i in range(k))


def random_signs(k: int, rng: np.random.Generator) -> tuple[int, ...]:
    return tuple(int(v) for v in rng.choice(np.array([-1, 1]), size=k))
