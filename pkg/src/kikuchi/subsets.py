"""Ranking and unranking of fixed-size subsets in colexicographic order.

The rank of a sorted subset ``s_0 < s_1 < ... < s_{t-1}`` of ``{0..u-1}`` is
``sum(comb(s_j, j + 1))``, the classical combinatorial number system.  Ranks
run over ``0 .. comb(u, t) - 1`` and ``rank``/``unrank`` are mutually inverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import comb

from .errors import InputError


@dataclass(frozen=True)
class SubsetIndexer:
    """Bijection between t-element subsets of {0..universe-1} and ranks."""

    universe: int
    subset_size: int

    def __post_init__(self):
        if self.universe < 0 or self.subset_size < 0:
            raise InputError("universe and subset size must be nonnegative")
        if self.subset_size > self.universe:
            raise InputError(
                f"subset size {self.subset_size} exceeds universe {self.universe}"
            )

    @cached_property
    def count(self) -> int:
        return comb(self.universe, self.subset_size)

    def rank(self, subset) -> int:
        elems = sorted(subset)
        if len(elems) != self.subset_size:
            raise InputError(
                f"expected subset of size {self.subset_size}, got {len(elems)}"
            )
        r = 0
        prev = -1
        for j, s in enumerate(elems):
            if s == prev:
                raise InputError("subset elements must be distinct")
            if not 0 <= s < self.universe:
                raise InputError(f"element {s} outside universe 0..{self.universe - 1}")
            prev = s
            r += comb(s, j + 1)
        return r

    def unrank(self, rank: int) -> tuple[int, ...]:
        if not 0 <= rank < self.count:
            raise InputError(f"rank {rank} outside 0..{self.count - 1}")
        out = []
        r = rank
        hi = self.universe
        for j in range(self.subset_size, 0, -1):
            # largest v < hi with comb(v, j) <= r
            lo = j - 1
            top = hi - 1
            while lo < top:
                mid = (lo + top + 1) // 2
                if comb(mid, j) <= r:
                    lo = mid
                else:
                    top = mid - 1
            out.append(lo)
            r -= comb(lo, j)
            hi = lo
        out.reverse()
        return tuple(out)

    def subsets(self):
        """Iterate all subsets in colex (= rank) order."""
        for r in range(self.count):
            yield self.unrank(r)
