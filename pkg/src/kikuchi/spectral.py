"""Spectral-norm upper bounds and the sampled matrix-concentration check.

Certificates only ever use upper bounds: a full symmetric eigensolve of
M^T M (inflated by a tiny slack) at desk scale, or sqrt(||M||_1 ||M||_inf)
at any scale.  Power iteration is exposed purely as a lower-bound diagnostic.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass

import numpy as np

from .certificates import RefutationCertificate
from .errors import CapacityError, InputError
from .matrices import KikuchiMatrix

DEFAULT_DENSE_CAP = 5000
DENSE_SLACK = 1e-9
KHINTCHINE_TOLERANCE = 1.05


def dense_cap() -> int:
    raw = os.environ.get("KIKUCHI_DENSE_CAP")
    if raw is None:
        return DEFAULT_DENSE_CAP
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"KIKUCHI_DENSE_CAP must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class SpectralBound:
    value: float
    method: str  # "dense-exact" or "l1-linf-product"
    slack: float


def _as_dense(mat: KikuchiMatrix | np.ndarray, cap: int) -> np.ndarray:
    if isinstance(mat, np.ndarray):
        if max(mat.shape) > cap:
            raise CapacityError(
                f"matrix of shape {mat.shape} exceeds dense cap {cap}; "
                "use the l1-linf product bound"
            )
        return np.asarray(mat, dtype=np.float64)
    return mat.to_dense(cap)


def _largest_singular_value(dense: np.ndarray) -> float:
    if dense.size == 0 or not dense.any():
        return 0.0
    # eigensolve the smaller Gram matrix
    gram = dense.T @ dense if dense.shape[1] <= dense.shape[0] else dense @ dense.T
    top = float(np.linalg.eigvalsh(gram)[-1])
    return math.sqrt(max(top, 0.0))


def spectral_norm_upper(
    mat: KikuchiMatrix | np.ndarray, mode: str = "dense", cap: int | None = None
) -> SpectralBound:
    """Upper bound on the largest singular value.

    ``dense`` inflates the eigensolve result by 1 + 1e-9 and requires the
    larger dimension to fit under the dense cap (env KIKUCHI_DENSE_CAP);
    ``product`` returns sqrt of the max column sum times max row sum, a valid
    bound at any size.
    """
    if mode == "dense":
        if isinstance(mat, KikuchiMatrix) and mat.nnz == 0:
            return SpectralBound(0.0, "dense-exact", DENSE_SLACK)
        limit = cap if cap is not None else dense_cap()
        dense = _as_dense(mat, limit)
        value = _largest_singular_value(dense) * (1.0 + DENSE_SLACK)
        return SpectralBound(value, "dense-exact", DENSE_SLACK)
    if mode == "product":
        if isinstance(mat, np.ndarray):
            row = float(np.abs(mat).sum(axis=1).max(initial=0.0))
            col = float(np.abs(mat).sum(axis=0).max(initial=0.0))
        else:
            row = float(mat.row_l1_max())
            col = float(mat.col_l1_max())
        return SpectralBound(math.sqrt(row * col), "l1-linf-product", 0.0)
    raise InputError(f"unknown spectral mode {mode!r}")


def power_iteration_estimate(
    mat: KikuchiMatrix | np.ndarray, iterations: int = 60, seed: int = 0
) -> float:
    """Deterministic lower estimate of the largest singular value.

    Never used inside certificates; it cannot certify an upper bound.
    """
    dense = mat if isinstance(mat, np.ndarray) else mat.to_dense()
    dense = np.asarray(dense, dtype=np.float64)
    if dense.size == 0 or not dense.any():
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dense.shape[1])
    norm = np.linalg.norm(v)
    if norm == 0:
        return 0.0
    v /= norm
    for _ in range(iterations):
        w = dense.T @ (dense @ v)
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0
        v = w / norm
    return float(np.linalg.norm(dense @ v))


def _bipartite_member_matrices(n: int, pairs, members_edges) -> list[np.ndarray]:
    pair_list = list(pairs)
    col_index = {p: j for j, p in enumerate(pair_list)}
    mats = []
    for g in members_edges:
        a = np.zeros((n, max(len(pair_list), 1)), dtype=np.float64)
        seen_left: set[int] = set()
        seen_right: set = set()
        for w, p in g:
            if not 1 <= w <= n:
                raise InputError(f"left vertex {w} outside 1..{n}")
            if p not in col_index:
                raise InputError(f"pair {p} missing from the right vertex set")
            if w in seen_left or p in seen_right:
                raise InputError("bipartite member is not a matching")
            seen_left.add(w)
            seen_right.add(p)
            a[w - 1, col_index[p]] = 1.0
        mats.append(a)
    return mats


def _bipartite_digest(n: int, pairs, members_edges, signs) -> str:
    canon = repr((n, tuple(pairs), tuple(tuple(g) for g in members_edges), tuple(signs)))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def refute_2xor(n: int, pairs, members_edges, signs, mode: str = "dense") -> RefutationCertificate:
    """Certify the bipartite instance: value <= sqrt(n |P|) ||sum b_i A_i||.

    Each member must be a bipartite matching between [n] and the pair set.
    An empty pair set yields the vacuous certificate 0.
    """
    signs = tuple(signs)
    pairs = tuple(pairs)
    if len(signs) != len(members_edges):
        raise InputError("need one sign per bipartite member")
    if any(s not in (-1, 1) for s in signs):
        raise InputError("signs must be +1 or -1")
    digest = _bipartite_digest(n, pairs, members_edges, signs)
    if not pairs or all(len(g) == 0 for g in members_edges):
        return RefutationCertificate(
            instance_digest=digest,
            target="bipartite-2xor",
            bound=0.0,
            components=(("scale", 0.0), ("norm", 0.0), ("pair_count", float(len(pairs)))),
            formula="sqrt(n*|P|) * norm",
        )
    mats = _bipartite_member_matrices(n, pairs, members_edges)
    signed = sum(s * a for s, a in zip(signs, mats))
    norm = spectral_norm_upper(signed, mode=mode)
    scale = math.sqrt(n * len(pairs))
    return RefutationCertificate(
        instance_digest=digest,
        target="bipartite-2xor",
        bound=scale * norm.value,
        components=(
            ("scale", scale),
            ("norm", norm.value),
            ("pair_count", float(len(pairs))),
        ),
        formula="sqrt(n*|P|) * norm",
        slack=norm.slack,
    )


@dataclass(frozen=True)
class KhintchineRecord:
    empirical_mean: float
    bound: float
    sigma_sq: float
    samples: int
    violation: bool


def khintchine_audit(
    matrices, samples: int, rng: np.random.Generator | None = None
) -> KhintchineRecord:
    """Sample mean of ||sum b_i A_i|| against sqrt(2 sigma^2 log(d1+d2)).

    The population mean provably sits below the bound; the 1.05 factor on the
    violation flag absorbs sampling noise.
    """
    if samples < 1:
        raise InputError("need at least one sample")
    rng = rng if rng is not None else np.random.default_rng(0)
    cap = dense_cap()
    dense = [_as_dense(a, cap) for a in matrices]
    if not dense:
        raise InputError("need at least one matrix")
    shape = dense[0].shape
    if any(a.shape != shape for a in dense):
        raise InputError("matrices must share one shape")
    d1, d2 = shape
    sigma_sq = max(
        _largest_singular_value_sym(sum(a @ a.T for a in dense)),
        _largest_singular_value_sym(sum(a.T @ a for a in dense)),
    )
    bound = math.sqrt(2.0 * sigma_sq * math.log(d1 + d2))
    total = 0.0
    for _ in range(samples):
        signs = rng.choice(np.array([-1.0, 1.0]), size=len(dense))
        combined = sum(s * a for s, a in zip(signs, dense))
        total += _largest_singular_value(combined)
    mean = total / samples
    return KhintchineRecord(
        empirical_mean=mean,
        bound=bound,
        sigma_sq=sigma_sq,
        samples=samples,
        violation=mean > KHINTCHINE_TOLERANCE * bound,
    )


def _largest_singular_value_sym(gram: np.ndarray) -> float:
    if gram.size == 0 or not gram.any():
        return 0.0
    return float(max(np.linalg.eigvalsh(gram)[-1], 0.0))
