"""Named property suites behind ``kikuchi verify`` and the acceptance tests.

Each suite re-checks one structural lemma on randomized inputs and returns a
verdict with the number of individual checks performed.  Sizes are parameters
so the CLI can run quick versions while the acceptance suite scales them up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibilityError
from .hypergraph import check_decomposition, decompose
from .ldc import (
    codeword_signs,
    hadamard_fixture,
    instance_from_ldc,
    pad_to_next_arity,
    verify_normal,
)
from .matrices import (
    assemble_kikuchi,
    build_clause_kikuchi,
    build_even_kikuchi,
    clause_entry_target,
    counting_margin_holds,
    even_count_floor,
    half_clauses,
    member_matrix,
    per_clause_counts,
    quadratic_form,
)
from .randomness import random_bipartite_matchings, random_matching_family, substream
from .refuter import binomial_ratio
from .spectral import khintchine_audit
from .xor import (
    derive_4xor,
    evaluate_derived,
    evaluate_unnormalized,
    random_partition,
    random_signs,
)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    checks: int
    detail: str = ""


def suite_decomposition(seed: int = 0, trials: int = 40) -> SuiteResult:
    rng = substream(seed, "suite:decomposition")
    checks = 0
    for t in range(trials):
        n = int(rng.integers(9, 21))
        k = int(rng.integers(1, 6))
        planted = int(rng.integers(0, min(k, n - 2) + 1))
        family = random_matching_family(
            rng, n, k, 3, max_edges=n // 3, shared_pair_members=planted
        )
        d = int(rng.integers(1, 4))
        result = decompose(family, d)
        problems = check_decomposition(family, result)
        if problems:
            return SuiteResult(
                "decomposition", False, checks, f"trial {t}: {problems[0]}"
            )
        checks += 1
    return SuiteResult("decomposition", True, checks)


def suite_counting(seed: int = 0, trials: int = 20) -> SuiteResult:
    """Clause matrices keep at least half their raw entries whenever the
    bad-set inequality holds (checked over every derived clause)."""
    rng = substream(seed, "suite:counting")
    checks = 0
    grids = [(2, 10, 4), (2, 14, 4), (3, 20, 1), (3, 24, 1), (4, 44, 1)]
    for t in range(trials):
        ell, n_min, k_max = grids[t % len(grids)]
        n = int(rng.integers(n_min, n_min + 5))
        k = int(rng.integers(1, k_max + 1))
        if not counting_margin_holds(n, k, ell):
            continue
        family = random_matching_family(rng, n, k, 3, max_edges=max(2, n // 6))
        part = random_partition(k, rng)
        derived = derive_4xor(family, part)
        target = clause_entry_target(family.n, ell)
        for cl in derived.generic:
            half = half_clauses(family, part, cl.i)
            raw = build_clause_kikuchi(cl.c_left, cl.c_right, ell, half, family.n)
            checks += 1
            if raw.nnz < target:
                return SuiteResult(
                    "counting",
                    False,
                    checks,
                    f"clause {cl}: {raw.nnz} < {target} at n={n}, k={k}, ell={ell}",
                )
    return SuiteResult("counting", True, checks)


def suite_degree(seed: int = 0, trials: int = 20) -> SuiteResult:
    """Row/column l1 norms of the per-member aggregates stay below twice the
    observed pair degree."""
    rng = substream(seed, "suite:degree")
    checks = 0
    for t in range(trials):
        n = int(rng.integers(8, 15))
        k = int(rng.integers(2, 5))
        planted = int(rng.integers(0, min(k, n - 2) + 1))
        family = random_matching_family(
            rng, n, k, 3, max_edges=n // 3, shared_pair_members=planted
        )
        d = max(
            (
                family.degree((u, v))
                for u in range(1, n + 1)
                for v in range(u + 1, n + 1)
            ),
            default=0,
        )
        if d == 0:
            continue
        part = random_partition(k, rng)
        ell = 2 if t % 2 == 0 else 3
        for i in sorted(part.left):
            mat = member_matrix(family, part, i, ell)
            checks += 1
            if mat.row_l1_max() > 2 * d or mat.col_l1_max() > 2 * d:
                return SuiteResult(
                    "degree",
                    False,
                    checks,
                    f"member {i}: l1 row/col {mat.row_l1_max()}/{mat.col_l1_max()} > 2d={2 * d}",
                )
    return SuiteResult("degree", True, checks)


def suite_identity(seed: int = 0, trials: int = 30) -> SuiteResult:
    """target * f_LR(x) equals the quadratic form of the assembled matrix,
    exactly, on tuples without degenerate derived clauses."""
    rng = substream(seed, "suite:identity")
    checks = 0
    attempts = 0
    while checks < trials and attempts < 60 * trials:
        attempts += 1
        n = int(rng.integers(6, 11))
        k = int(rng.integers(2, 4))
        ell = 2 if attempts % 2 == 0 else 3
        family = random_matching_family(rng, n, k, 3, max_edges=2)
        part = random_partition(k, rng)
        derived = derive_4xor(family, part)
        if derived.degenerate or not derived.generic:
            continue
        signs = random_signs(k, rng)
        x = tuple(int(v) for v in rng.choice([-1, 1], size=n))
        try:
            assembled = assemble_kikuchi(family, part, signs, ell, derived=derived)
        except InfeasibilityError:
            continue
        lhs = assembled.entry_target * evaluate_derived(derived, signs, x)
        rhs = quadratic_form(assembled.matrix, x)
        checks += 1
        if lhs != rhs:
            return SuiteResult(
                "identity", False, checks, f"D*f={lhs} != z'Az={rhs} at n={n}, ell={ell}"
            )
    if checks < trials:
        return SuiteResult("identity", False, checks, "could not draw enough tuples")
    return SuiteResult("identity", True, checks)


def suite_sandwich(n_cap: int = 40) -> SuiteResult:
    checks = 0
    for q in range(1, 5):
        for n in range(2 * q, n_cap + 1):
            for ell in range(q, n // 2 + 1):
                res = binomial_ratio(n, ell, q)
                checks += 1
                value = float(res.ratio)
                if not (res.lower - 1e-12 <= value <= res.upper + 1e-12):
                    return SuiteResult(
                        "sandwich", False, checks, f"violated at n={n}, ell={ell}, q={q}"
                    )
    return SuiteResult("sandwich", True, checks)


def suite_even_uniformity(seed: int = 0, trials: int = 20) -> SuiteResult:
    """Per-clause entry counts agree inside each member and clear the floor
    C(q, q/2) C(n-q, ell-q/2) - |H_i| C(q, q/2)^2 C(n-2q, ell-q)."""
    rng = substream(seed, "suite:even")
    checks = 0
    for t in range(trials):
        q = 2 if t % 2 == 0 else 4
        n = int(rng.integers(4 * q, 17))
        k = int(rng.integers(1, 4))
        ell = int(rng.integers(q // 2, q // 2 + 3))
        family = random_matching_family(rng, n, k, q, max_edges=n // q)
        for h in family.members:
            mat = build_even_kikuchi(h, ell)
            counts = per_clause_counts(mat)
            per_clause = [counts.get(ci, 0) for ci in range(len(h.edges))]
            if not per_clause:
                continue
            checks += 1
            if len(set(per_clause)) != 1:
                return SuiteResult(
                    "even-uniformity", False, checks, f"counts differ: {per_clause}"
                )
            floor = even_count_floor(n, q, ell, len(h.edges))
            if per_clause[0] < floor:
                return SuiteResult(
                    "even-uniformity",
                    False,
                    checks,
                    f"count {per_clause[0]} below floor {floor} at n={n}, q={q}, ell={ell}",
                )
    return SuiteResult("even-uniformity", True, checks)


def suite_khintchine(seed: int = 0, samples: int = 100) -> SuiteResult:
    rng = substream(seed, "suite:khintchine")
    checks = 0
    for t in range(3):
        n = int(rng.integers(20, 60))
        pair_count = int(rng.integers(4, min(n, 20)))
        k = int(rng.integers(2, 7))
        pairs, members = random_bipartite_matchings(rng, n, pair_count, k, max_edges=8)
        col = {p: j for j, p in enumerate(pairs)}
        mats = []
        for g in members:
            a = np.zeros((n, len(pairs)))
            for w, p in g:
                a[w - 1, col[p]] = 1.0
            mats.append(a)
        record = khintchine_audit(mats, samples=samples, rng=rng)
        checks += 1
        if record.violation:
            return SuiteResult(
                "khintchine",
                False,
                checks,
                f"mean {record.empirical_mean:.4f} > 1.05 * {record.bound:.4f}",
            )
    return SuiteResult("khintchine", True, checks)


def suite_ldc(k: int = 4) -> SuiteResult:
    checks = 0
    fixture = hadamard_fixture(k)
    report = verify_normal(fixture, mode="exact")
    checks += len(report.per_clause)
    if not report.passed or any(cb.bias != 1 for cb in report.per_clause):
        return SuiteResult("ldc", False, checks, "base fixture bias not exactly 1")
    padded = pad_to_next_arity(fixture)
    report = verify_normal(padded, mode="exact")
    checks += len(report.per_clause)
    if not report.passed or any(cb.bias != 1 for cb in report.per_clause):
        return SuiteResult("ldc", False, checks, "padded fixture bias not exactly 1")
    for message in range(1 << k):
        signs = tuple(
            -1 if (message >> (i - 1)) & 1 else 1 for i in range(1, k + 1)
        )
        inst = instance_from_ldc(padded, signs)
        # the encoding of the matching message satisfies every constraint
        value = evaluate_unnormalized(inst, codeword_signs(padded.code, message))
        checks += 1
        if value != inst.m:
            return SuiteResult("ldc", False, checks, f"message {message} not satisfying")
    return SuiteResult("ldc", True, checks)


ALL_SUITES = {
    "decomposition": suite_decomposition,
    "counting": suite_counting,
    "degree": suite_degree,
    "identity": suite_identity,
    "sandwich": suite_sandwich,
    "even-uniformity": suite_even_uniformity,
    "khintchine": suite_khintchine,
    "ldc": suite_ldc,
}


def run_suites(names=None, seed: int = 0) -> list[SuiteResult]:
    selected = list(ALL_SUITES) if not names else list(names)
    results = []
    for name in selected:
        if name not in ALL_SUITES:
            raise KeyError(name)
        fn = ALL_SUITES[name]
        if name in ("sandwich", "ldc"):
            results.append(fn())
        else:
            results.append(fn(seed=seed))
    return results
