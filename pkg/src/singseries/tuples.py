"""k-tuples of positive integers: residue statistics, discriminant, enumeration."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

from .errors import BoundsError, DegenerateInputError


@dataclass(frozen=True)
class KTuple:
    entries: tuple[int, ...]

    def __init__(self, entries: Sequence[int]):
        entries = tuple(int(e) for e in entries)
        if not entries:
            raise BoundsError("a k-tuple needs k >= 1 entries")
        if min(entries) < 1:
            raise BoundsError(f"tuple entries must be positive: {entries}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def parse(cls, text: str) -> "KTuple":
        return cls(int(t) for t in text.replace(" ", "").split(",") if t)

    @property
    def k(self):
        return len(self.entries)

    @property
    def height(self):
        """|h| = max entry."""
        return max(self.entries)

    @cached_property
    def is_distinct(self):
        return len(set(self.entries)) == len(self.entries)

    def shifted(self, t):
        return KTuple(e + t for e in self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __str__(self):
        return ",".join(map(str, self.entries))


def _entries(h):
    return h.entries if isinstance(h, KTuple) else tuple(h)


def nu_p(h, p: int) -> int:
    """Number of distinct residues of the entries modulo p."""
    entries = _entries(h)
    if p <= 64:
        mask = 0
        for e in entries:
            mask |= 1 << (e % p)
        return mask.bit_count()
    res = sorted(e % p for e in entries)
    return 1 + sum(1 for a, b in zip(res, res[1:]) if a != b)


def discriminant_delta(h) -> int:
    """|prod_{i<j} (h_i - h_j)|, exact."""
    entries = _entries(h)
    if len(set(entries)) != len(entries):
        raise DegenerateInputError(f"repeated entries in {entries}")
    out = 1
    for i, a in enumerate(entries):
        for b in entries[i + 1:]:
            out *= a - b
    return abs(out)


def delta_primes(h) -> list[int]:
    """Primes dividing Delta(h), found from the pairwise differences."""
    from .numeric import prime_factors

    entries = _entries(h)
    found = set()
    for i, a in enumerate(entries):
        for b in entries[i + 1:]:
            found.update(prime_factors(a - b))
    return sorted(found)


def count_distinct(k, h):
    """h*_k = h (h-1) ... (h-k+1)."""
    return math.perm(h, k)


def _unrank(index, k, h):
    """The index-th distinct k-tuple over [1, h] in lexicographic order."""
    pool = list(range(1, h + 1))
    out = []
    for pos in range(k):
        block = math.perm(h - pos - 1, k - pos - 1)
        q, index = divmod(index, block)
        out.append(pool.pop(q))
    return out


def enumerate_distinct(k: int, h: int, start: int = 0, stop: int | None = None) -> Iterator[KTuple]:
    """Ordered k-tuples with distinct entries in [1, h], lexicographically.

    ``start``/``stop`` select the sub-stream of lexicographic indices
    ``[start, stop)`` so the enumeration can be sharded.
    """
    if k < 1:
        raise BoundsError("k must be >= 1")
    if h < k:
        raise BoundsError(f"no distinct {k}-tuples with entries <= {h}")
    total = count_distinct(k, h)
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return
    cur = _unrank(start, k, h)
    for _ in range(stop - start):
        yield KTuple(cur)
        cur = _next_distinct(cur, h)
        if cur is None:
            return


def _next_distinct(cur, h):
    k = len(cur)
    used = set(cur)
    for pos in range(k - 1, -1, -1):
        used.discard(cur[pos])
        for cand in range(cur[pos] + 1, h + 1):
            if cand not in used:
                nxt = cur[:pos] + [cand]
                used.add(cand)
                rest = [v for v in range(1, h + 1) if v not in used][: k - pos - 1]
                return nxt + rest
    return None


def shard_ranges(total, shards):
    """Split [0, total) into `shards` contiguous ranges in fixed order."""
    shards = max(1, int(shards))
    step, extra = divmod(total, shards)
    out, lo = [], 0
    for i in range(shards):
        hi = lo + step + (1 if i < extra else 0)
        out.append((lo, hi))
        lo = hi
    return out
