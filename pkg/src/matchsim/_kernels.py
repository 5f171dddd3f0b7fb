"""Compiled inner loops for deferred acceptance and truncation search.

Preferences are passed as dense arrays:

* ``prop_prefs[p, i]`` is proposer ``p``'s ``i``-th choice (padded with -1),
  ``prop_len[p]`` the length of that list;
* ``rank[r, p]`` is the position of ``p`` in recipient ``r``'s list, or ``n``
  when ``p`` is not listed.

A truncated report by one recipient is expressed as ``(dev_r, cutoff)``:
recipient ``dev_r`` treats every proposer with ``rank >= cutoff`` as unlisted.
No copy of the market is made for a deviation test.
"""
import numpy as np
from numba import njit

NO_DEVIATOR = -1


@njit(cache=True)
def run_da(prop_prefs, prop_len, rank, dev_r, cutoff, prop_match, rec_match, next_idx, queue):
    """Proposer-proposing DA with a FIFO queue of free proposers.

    Fills ``prop_match``/``rec_match`` in place (-1 = unmatched) and returns
    the number of proposals made.
    """
    n = prop_len.shape[0]
    for i in range(n):
        prop_match[i] = -1
        rec_match[i] = -1
        next_idx[i] = 0
    head = 0
    tail = 0
    for p in range(n):
        if prop_len[p] > 0:
            queue[tail] = p
            tail += 1
    size = tail
    tail = tail % n
    proposals = 0
    while size > 0:
        p = queue[head]
        head = (head + 1) % n
        size -= 1
        while next_idx[p] < prop_len[p]:
            r = prop_prefs[p, next_idx[p]]
            next_idx[p] += 1
            proposals += 1
            rk = rank[r, p]
            limit = cutoff if r == dev_r else n
            if rk >= limit:
                continue
            cur = rec_match[r]
            if cur == -1:
                rec_match[r] = p
                prop_match[p] = r
                break
            if rk < rank[r, cur]:
                rec_match[r] = p
                prop_match[p] = r
                prop_match[cur] = -1
                queue[tail] = cur
                tail = (tail + 1) % n
                size += 1
                break
    return proposals


@njit(cache=True)
def count_deviators(prop_prefs, prop_len, rank, rec_len, prune):
    """Truncation search for every recipient.

    Returns ``(kept_length, truthful_rank, deviation_rank)`` per recipient.
    ``kept_length`` is the length of the first successful truncation tried
    (lengths ``L-1`` down to ``1``), or -1. Ranks are positions in the true
    list; an unmatched recipient gets her list length.

    With ``prune`` set, truncations that still list the truthful partner are
    skipped: they leave the proposer-optimal matching unchanged.
    """
    n = prop_len.shape[0]
    prop_match = np.empty(n, dtype=np.int64)
    rec_match = np.empty(n, dtype=np.int64)
    next_idx = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    run_da(prop_prefs, prop_len, rank, -1, n, prop_match, rec_match, next_idx, queue)
    truthful = rec_match.copy()

    kept = np.full(n, NO_DEVIATOR, dtype=np.int64)
    before = np.empty(n, dtype=np.int64)
    after = np.empty(n, dtype=np.int64)
    for r in range(n):
        length = rec_len[r]
        old = truthful[r]
        old_rank = rank[r, old] if old >= 0 else length
        before[r] = old_rank
        after[r] = old_rank
        start = length - 1
        if prune and old_rank < start:
            start = old_rank
        for t in range(start, 0, -1):
            run_da(prop_prefs, prop_len, rank, r, t, prop_match, rec_match, next_idx, queue)
            new = rec_match[r]
            if new >= 0 and rank[r, new] < old_rank:
                kept[r] = t
                after[r] = rank[r, new]
                break
    return kept, before, after
