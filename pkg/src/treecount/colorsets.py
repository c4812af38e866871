"""Dense indexing of color subsets via the colexicographic combinatorial number system."""

from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

MAX_COLORS = 16


def _check(s, k):
    if not 0 <= s <= k <= MAX_COLORS:
        raise ValueError(f"need 0 <= s <= k <= {MAX_COLORS}, got s={s}, k={k}")


def subset_rank(mask, k):
    """Colex rank of the subset encoded by bitmask ``mask`` among subsets of {0..k-1} of its size."""
    if mask < 0 or mask >> k:
        raise ValueError(f"mask {mask:#x} has bits outside 0..{k - 1}")
    rank = 0
    i = 0
    bit = 0
    while mask:
        if mask & 1:
            i += 1
            rank += comb(bit, i)
        mask >>= 1
        bit += 1
    return rank


def subset_unrank(rank, s, k):
    """Inverse of :func:`subset_rank` for ``s``-subsets of {0..k-1}."""
    _check(s, k)
    if not 0 <= rank < comb(k, s):
        raise ValueError(f"rank {rank} outside [0, C({k},{s}))")
    mask = 0
    top = k - 1
    for i in range(s, 0, -1):
        # largest element a with C(a, i) <= rank
        while comb(top, i) > rank:
            top -= 1
        mask |= 1 << top
        rank -= comb(top, i)
        top -= 1
    return mask


@lru_cache(maxsize=None)
def masks_by_rank(s, k):
    """All ``s``-subset bitmasks of {0..k-1}, position = colex rank."""
    _check(s, k)
    out = np.empty(comb(k, s), dtype=np.int64)
    for combo in combinations(range(k), s):
        mask = sum(1 << c for c in combo)
        out[subset_rank(mask, k)] = mask
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def split_table(k, a, p):
    """Index arrays enumerating every disjoint split of an (a+p)-subset.

    Returns ``(active_rank, passive_rank, starts)``: the splits of the subset
    with colex rank ``r`` occupy ``starts[r]:starts[r + 1]`` in the first two
    arrays, ordered by the active subset's rank within the union.
    """
    s = a + p
    _check(s, k)
    n_sets = comb(k, s)
    per_set = comb(s, a)
    active = np.empty(n_sets * per_set, dtype=np.intp)
    passive = np.empty(n_sets * per_set, dtype=np.intp)
    rank_a = {int(m): r for r, m in enumerate(masks_by_rank(a, k))}
    rank_p = {int(m): r for r, m in enumerate(masks_by_rank(p, k))}
    pos = 0
    for mask in masks_by_rank(s, k):
        bits = [b for b in range(k) if mask >> b & 1]
        for sub in combinations(bits, a):
            ma = sum(1 << b for b in sub)
            active[pos] = rank_a[ma]
            passive[pos] = rank_p[int(mask) ^ ma]
            pos += 1
    starts = np.arange(0, n_sets * per_set + 1, per_set, dtype=np.intp)
    for arr in (active, passive, starts):
        arr.setflags(write=False)
    return active, passive, starts
