"""End-to-end refutation pipelines.

Three certificate producers live here: the cross-partition pipeline for
3-uniform families, the direct even-arity pipeline, and the combined
decompose-then-refute pipeline that splits heavy pairs into a bipartite
instance first.  Each returns a :class:`RefutationCertificate` whose ``sound``
flag is True only when every expectation inside was enumerated exactly.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .certificates import RefutationCertificate
from .errors import CapacityError, InfeasibilityError, InputError
from .hypergraph import MatchingFamily, decompose, suggest_pair_threshold
from .matrices import (
    KikuchiMatrix,
    aggregate_matrices,
    assemble_kikuchi,
    build_even_kikuchi,
    clause_entry_target,
    per_clause_counts,
    suggest_subset_size,
)
from .spectral import refute_2xor, spectral_norm_upper
from .subsets import SubsetIndexer
from .xor import (
    EXHAUSTIVE_SIGN_CAP,
    XorInstance,
    brute_force_val,
    derive_4xor,
    enumerate_partitions,
    enumerate_sign_vectors,
    random_partition,
    random_signs,
)

__all__ = [
    "refute_3xor",
    "refute_even_q",
    "refute_via_decomposition",
    "expectation_over_signs",
    "binomial_ratio",
    "BinomialRatioResult",
    "SignExpectationSummary",
    "suggest_pair_threshold",
    "suggest_subset_size",
]


def _instance_digest(family: MatchingFamily, signs) -> str:
    return XorInstance.from_family(family, signs).digest


def _max_pair_degree(family: MatchingFamily) -> tuple[int, tuple[int, int] | None]:
    counts: Counter[tuple[int, int]] = Counter()
    for h in family.members:
        for e in h.edges:
            for p in combinations(e, 2):
                counts[p] += 1
    if not counts:
        return 0, None
    pair, deg = max(counts.items(), key=lambda kv: (kv[1], kv[0]))
    return deg, pair


def _cross_coefficient(k: int, distribution: str) -> float:
    # 1 / Pr[i in L, j in R] for an ordered pair i != j
    if distribution == "independent":
        return 4.0
    if distribution == "balanced":
        if k % 2 != 0:
            raise InputError("balanced partitions need even k")
        if k < 2:
            raise InputError("balanced partitions need k >= 2")
        return 4.0 * (k - 1) / k
    raise InputError(f"unknown partition distribution {distribution!r}")


def refute_3xor(
    family: MatchingFamily,
    signs,
    ell: int,
    partition_mode: str = "exhaustive",
    *,
    samples: int | None = None,
    rng: np.random.Generator | None = None,
    d: int | None = None,
    spectral_mode: str = "dense",
    distribution: str = "independent",
    k_ratio_limit: float = 2.0,
) -> RefutationCertificate:
    """Bound the unnormalized value of a 3-uniform signed family.

    Chains the Cauchy-Schwarz step with the per-partition spectral bound:
    val^2 <= (3nm + coeff * n * E[(N/D)||A|| + degenerate]) / 9.  With
    ``partition_mode="exhaustive"`` the expectation runs over every partition
    of the chosen distribution and the certificate is sound; ``"sample"``
    replaces it by a sample mean and flags the certificate unsound.
    """
    signs = tuple(signs)
    if family.q != 3:
        raise InputError(f"pipeline needs a 3-uniform family, got q={family.q}")
    if len(signs) != family.k:
        raise InputError("need one sign per member")
    n, k, m = family.n, family.k, family.m
    observed_d, heavy = _max_pair_degree(family)
    if d is not None and observed_d > d:
        raise InputError(f"pair {heavy} appears in {observed_d} > d={d} clauses")
    digest = _instance_digest(family, signs)
    if m == 0:
        return RefutationCertificate(
            instance_digest=digest,
            target="f-unnormalized",
            bound=0.0,
            components=(("trivial_term", 0.0), ("partition_expectation_bound", 0.0)),
            formula="sqrt((3*n*m + coeff*n*E)/9)",
            partition_mode="exhaustive:empty",
        )

    if partition_mode == "exhaustive":
        if k > EXHAUSTIVE_SIGN_CAP:
            raise CapacityError(f"k={k} exceeds exhaustive partition cap {EXHAUSTIVE_SIGN_CAP}")
        partitions = list(enumerate_partitions(k, distribution))
        mode_label = f"exhaustive:{distribution}"
        sound = True
    elif partition_mode == "sample":
        if not samples or samples < 1:
            raise InputError("sampled partition mode needs a positive sample count")
        rng = rng if rng is not None else np.random.default_rng(0)
        partitions = [random_partition(k, rng, distribution) for _ in range(samples)]
        mode_label = f"sampled:{samples}:{distribution}"
        sound = False
    else:
        raise InputError(f"unknown partition mode {partition_mode!r}")

    indexer = SubsetIndexer(2 * n, ell)
    target = clause_entry_target(n, ell)
    total_bound = 0.0
    total_degenerate = 0
    slack = 0.0
    for part in partitions:
        derived = derive_4xor(family, part)
        assembled = assemble_kikuchi(
            family, part, signs, ell, k_ratio_limit=k_ratio_limit, derived=derived
        )
        norm = spectral_norm_upper(assembled.matrix, mode=spectral_mode)
        slack = max(slack, norm.slack)
        total_bound += (indexer.count / target) * norm.value + len(derived.degenerate)
        total_degenerate += len(derived.degenerate)

    expectation_bound = total_bound / len(partitions)
    coeff = _cross_coefficient(k, distribution)
    rhs = 3.0 * n * m + coeff * n * expectation_bound
    bound = math.sqrt(rhs) / 3.0
    return RefutationCertificate(
        instance_digest=digest,
        target="f-unnormalized",
        bound=bound,
        components=(
            ("trivial_term", float(3 * n * m)),
            ("cross_coefficient", coeff),
            ("partition_expectation_bound", expectation_bound),
            ("partition_count", float(len(partitions))),
            ("subset_count", float(indexer.count)),
            ("entry_target", float(target)),
            ("degenerate_mean", total_degenerate / len(partitions)),
            ("observed_pair_degree", float(observed_d)),
        ),
        formula="sqrt((3*n*m + coeff*n*E)/9)",
        partition_mode=mode_label,
        sound=sound,
        slack=slack,
    )


def _equalize_per_clause(mat: KikuchiMatrix, target: int) -> KikuchiMatrix:
    if mat.provenance is None:
        raise InputError("per-clause equalization needs provenance")
    grouped: dict[int, list[tuple[int, int]]] = {}
    for key, clause in mat.provenance.items():
        grouped.setdefault(clause, []).append(key)
    keep: dict[tuple[int, int], int] = {}
    provenance: dict[tuple[int, int], int] = {}
    for clause, keys in grouped.items():
        for key in sorted(keys)[:target]:
            keep[key] = mat.entries[key]
            provenance[key] = clause
    return KikuchiMatrix(
        row_count=mat.row_count,
        col_count=mat.col_count,
        entries=keep,
        universe=mat.universe,
        row_subset_size=mat.row_subset_size,
        col_subset_size=mat.col_subset_size,
        provenance=provenance,
    )


def refute_even_q(
    family: MatchingFamily, signs, ell: int, spectral_mode: str = "dense"
) -> RefutationCertificate:
    """Bound the normalized value of an even-arity family by N/(m D) ||A||.

    The per-clause entry count is verified to be uniform inside each member
    (a structural theorem); members whose count exceeds the family-wide
    minimum are equalized down so a single D applies to every clause.
    """
    signs = tuple(signs)
    q = family.q
    if q % 2 != 0:
        raise InputError(f"even-arity pipeline got q={q}")
    if len(signs) != family.k:
        raise InputError("need one sign per member")
    if family.m == 0:
        raise InputError("family has no constraints; normalization undefined")
    if ell < q // 2:
        raise InputError(f"ell={ell} below q/2={q // 2}")

    members: list[KikuchiMatrix] = []
    counts_by_member: list[int | None] = []  # None for empty members
    for h in family.members:
        mat = build_even_kikuchi(h, ell)
        counts = per_clause_counts(mat)
        per_clause = [counts.get(ci, 0) for ci in range(len(h.edges))]
        if per_clause and len(set(per_clause)) != 1:
            raise InputError(
                f"per-clause entry counts differ inside one member: {sorted(set(per_clause))}"
            )
        members.append(mat)
        counts_by_member.append(per_clause[0] if per_clause else None)
    entry_count = min(c for c in counts_by_member if c is not None)
    if entry_count == 0:
        raise InfeasibilityError(
            f"per-clause entry count is 0 at ell={ell}; parameters outside the counting regime",
            deficit=1,
        )
    members = [
        _equalize_per_clause(mat, entry_count)
        if cnt is not None and cnt > entry_count
        else mat
        for mat, cnt in zip(members, counts_by_member)
    ]

    indexer = SubsetIndexer(family.n, ell)
    combined = KikuchiMatrix(
        row_count=indexer.count,
        col_count=indexer.count,
        entries=aggregate_matrices(
            (signs[i], mat) for i, mat in enumerate(members)
        ),
        universe=family.n,
        row_subset_size=ell,
        col_subset_size=ell,
    )
    norm = spectral_norm_upper(combined, mode=spectral_mode)
    bound = indexer.count / (family.m * entry_count) * norm.value
    return RefutationCertificate(
        instance_digest=_instance_digest(family, signs),
        target="psi-normalized",
        bound=bound,
        components=(
            ("subset_count", float(indexer.count)),
            ("entry_count", float(entry_count)),
            ("total_constraints", float(family.m)),
            ("norm", norm.value),
        ),
        formula="N/(m*D) * norm",
        slack=norm.slack,
    )


def refute_via_decomposition(
    family: MatchingFamily,
    signs,
    d: int,
    ell: int,
    partition_mode: str = "exhaustive",
    *,
    samples: int | None = None,
    rng: np.random.Generator | None = None,
    spectral_mode: str = "dense",
    distribution: str = "independent",
    k_ratio_limit: float = 2.0,
) -> RefutationCertificate:
    """Split heavy pairs out, certify both halves, and recombine.

    m * val(psi) <= val(residual 3-XOR) + val(bipartite 2-XOR), via the
    one-to-one correspondence between removed clauses and bipartite edges.
    """
    signs = tuple(signs)
    if family.m == 0:
        raise InputError("family has no constraints; normalization undefined")
    dec = decompose(family, d)
    cert_pairs = refute_2xor(
        family.n, dec.heavy_pairs, dec.bipartite, signs, mode=spectral_mode
    )
    cert_residual = refute_3xor(
        dec.residual,
        signs,
        ell,
        partition_mode,
        samples=samples,
        rng=rng,
        d=d,
        spectral_mode=spectral_mode,
        distribution=distribution,
        k_ratio_limit=k_ratio_limit,
    )
    m = family.m
    bound = (cert_residual.bound + cert_pairs.bound) / m
    components = [
        ("residual_bound", cert_residual.bound),
        ("bipartite_bound", cert_pairs.bound),
        ("total_constraints", float(m)),
        ("threshold_d", float(d)),
        ("heavy_pair_count", float(len(dec.heavy_pairs))),
    ]
    components += [(f"residual.{k_}", v) for k_, v in cert_residual.components]
    components += [(f"bipartite.{k_}", v) for k_, v in cert_pairs.components]
    return RefutationCertificate(
        instance_digest=_instance_digest(family, signs),
        target="psi-normalized",
        bound=bound,
        components=tuple(components),
        formula="(residual_bound + bipartite_bound) / m",
        partition_mode=cert_residual.partition_mode,
        sound=cert_residual.sound,
        slack=max(cert_residual.slack, cert_pairs.slack),
    )


@dataclass(frozen=True)
class SignExpectationSummary:
    """Per-sign-vector bounds, their mean, and the LDC contradiction test."""

    pipeline: str
    sign_mode: str
    per_sign: tuple[tuple[tuple[int, ...], float, Fraction | None], ...]
    mean_bound: float
    min_bound: float
    max_bound: float
    mean_value: Fraction | None
    all_sound: bool
    declared_epsilon: float | None
    would_contradict_ldc: bool | None


_PIPELINES = {"3xor", "even", "combine"}


def expectation_over_signs(
    pipeline: str,
    family: MatchingFamily,
    params: dict,
    sign_mode: str = "exhaustive",
    *,
    samples: int | None = None,
    rng: np.random.Generator | None = None,
    with_brute_force: bool = False,
    brute_cap: int = 24,
    epsilon: float | None = None,
) -> SignExpectationSummary:
    """Average the certified bound over sign vectors, on the normalized scale.

    With a declared epsilon, flags whether the average bound dips below
    2*epsilon; that never happens for a genuine normal LDC family, so the
    flag doubles as a refutation of the declared parameters.
    """
    if pipeline not in _PIPELINES:
        raise InputError(f"unknown pipeline {pipeline!r}; expected one of {sorted(_PIPELINES)}")
    k = family.k
    if sign_mode == "exhaustive":
        if k > EXHAUSTIVE_SIGN_CAP:
            raise CapacityError(f"k={k} exceeds exhaustive sign cap {EXHAUSTIVE_SIGN_CAP}")
        vectors = list(enumerate_sign_vectors(k))
        exhaustive = True
    elif sign_mode == "sample":
        if not samples or samples < 1:
            raise InputError("sampled sign mode needs a positive sample count")
        rng = rng if rng is not None else np.random.default_rng(0)
        vectors = [random_signs(k, rng) for _ in range(samples)]
        exhaustive = False
    else:
        raise InputError(f"unknown sign mode {sign_mode!r}")

    per_sign = []
    all_sound = exhaustive
    values: list[Fraction] = []
    for signs in vectors:
        if pipeline == "3xor":
            cert = refute_3xor(family, signs, **params)
            psi_bound = cert.bound / family.m if family.m else 0.0
        elif pipeline == "even":
            cert = refute_even_q(family, signs, **params)
            psi_bound = cert.bound
        else:
            cert = refute_via_decomposition(family, signs, **params)
            psi_bound = cert.bound
        all_sound = all_sound and cert.sound
        value: Fraction | None = None
        if with_brute_force and family.n <= brute_cap and family.m > 0:
            value = brute_force_val(XorInstance.from_family(family, signs), cap=brute_cap).value
            values.append(value)
        per_sign.append((signs, psi_bound, value))

    bounds = [b for _, b, _ in per_sign]
    mean_bound = sum(bounds) / len(bounds)
    mean_value = sum(values, Fraction(0)) / len(values) if values else None
    return SignExpectationSummary(
        pipeline=pipeline,
        sign_mode=sign_mode if exhaustive else f"sampled:{samples}",
        per_sign=tuple(per_sign),
        mean_bound=mean_bound,
        min_bound=min(bounds),
        max_bound=max(bounds),
        mean_value=mean_value,
        all_sound=all_sound,
        declared_epsilon=epsilon,
        would_contradict_ldc=(mean_bound < 2 * epsilon) if epsilon is not None else None,
    )


@dataclass(frozen=True)
class BinomialRatioResult:
    ratio: Fraction
    lower: float
    upper: float
    within: bool


def binomial_ratio(n: int, ell: int, q: int) -> BinomialRatioResult:
    """Exact C(n-2q, ell-q) / C(n, ell) with its two-sided envelope.

    Requires n/2 >= ell >= q >= 1; the ratio then sits between
    e^{-3q} (ell/n)^q and e^{3q} (ell/n)^q.
    """
    if q < 1 or ell < q or 2 * ell > n:
        raise InputError(f"need n/2 >= ell >= q >= 1, got n={n}, ell={ell}, q={q}")
    ratio = Fraction(math.comb(n - 2 * q, ell - q), math.comb(n, ell))
    base = (ell / n) ** q
    lower = math.exp(-3 * q) * base
    upper = math.exp(3 * q) * base
    return BinomialRatioResult(
        ratio=ratio, lower=lower, upper=upper, within=lower <= float(ratio) <= upper
    )
