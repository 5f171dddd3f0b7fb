"""Proposer-proposing deferred acceptance on incomplete strict lists."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from . import _kernels
from .prefgen import Market

ORACLE_MAX_N = 6


@dataclass(frozen=True)
class Matching:
    """Partial one-to-one assignment; ``None`` marks an unmatched agent."""

    proposer_to_recipient: tuple[Optional[int], ...]
    recipient_to_proposer: tuple[Optional[int], ...]
    proposals: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        for p, r in enumerate(self.proposer_to_recipient):
            if r is not None and self.recipient_to_proposer[r] != p:
                raise ValueError(f"maps disagree at proposer {p}")
        for r, p in enumerate(self.recipient_to_proposer):
            if p is not None and self.proposer_to_recipient[p] != r:
                raise ValueError(f"maps disagree at recipient {r}")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Matching":
        p2r: list[Optional[int]] = [None] * n
        r2p: list[Optional[int]] = [None] * n
        for p, r in pairs:
            if p2r[p] is not None or r2p[r] is not None:
                raise ValueError(f"agent matched twice in pair ({p}, {r})")
            p2r[p], r2p[r] = r, p
        return cls(tuple(p2r), tuple(r2p))

    def pairs(self) -> list[tuple[int, int]]:
        return [(p, r) for p, r in enumerate(self.proposer_to_recipient) if r is not None]

    def __len__(self) -> int:
        return sum(r is not None for r in self.proposer_to_recipient)


def _from_arrays(prop_match: np.ndarray, proposals: int) -> Matching:
    n = len(prop_match)
    p2r: list[Optional[int]] = [None] * n
    r2p: list[Optional[int]] = [None] * n
    for p, r in enumerate(prop_match.tolist()):
        if r >= 0:
            p2r[p], r2p[r] = r, p
    return Matching(tuple(p2r), tuple(r2p), proposals)


def deferred_acceptance(market: Market) -> Matching:
    """Proposer-optimal stable matching for the reported lists.

    A proposal to a recipient who does not list the proposer is rejected
    and uses up that entry of the proposer's list.
    """
    prop_prefs, prop_len, rank, _ = market.arrays
    n = market.n
    prop_match = np.empty(n, dtype=np.int64)
    rec_match = np.empty(n, dtype=np.int64)
    scratch = np.empty(n, dtype=np.int64), np.empty(n, dtype=np.int64)
    proposals = _kernels.run_da(prop_prefs, prop_len, rank, -1, n, prop_match, rec_match, *scratch)
    return _from_arrays(prop_match, int(proposals))


class RankTable:
    """O(1) rank lookups for one side; unlisted agents rank at ``len(list)``."""

    def __init__(self, prefs):
        self._ranks = [{a: i for i, a in enumerate(pref)} for pref in prefs]
        self._lengths = [len(pref) for pref in prefs]

    def rank(self, agent: int, other: Optional[int]) -> int:
        """Position of ``other`` in ``agent``'s list; unmatched or unlisted is last."""
        if other is None:
            return self._lengths[agent]
        return self._ranks[agent].get(other, self._lengths[agent] + 1)

    def lists(self, agent: int, other: int) -> bool:
        return other in self._ranks[agent]


def blocking_pairs(market: Market, matching: Matching) -> list[tuple[int, int]]:
    """All mutually listed pairs that strictly prefer each other to their match."""
    prop_rank = RankTable(market.proposer_prefs)
    rec_rank = RankTable(market.recipient_prefs)
    out = []
    for p, pref in enumerate(market.proposer_prefs):
        current = prop_rank.rank(p, matching.proposer_to_recipient[p])
        for i, r in enumerate(pref):
            if i >= current:
                break
            if not rec_rank.lists(r, p):
                continue
            if rec_rank.rank(r, p) < rec_rank.rank(r, matching.recipient_to_proposer[r]):
                out.append((p, r))
    return out


def is_individually_rational(market: Market, matching: Matching) -> bool:
    return all(
        r in market.proposer_prefs[p] and p in market.recipient_prefs[r]
        for p, r in matching.pairs()
    )


def is_stable(market: Market, matching: Matching) -> bool:
    """No blocking pair and every matched pair mutually listed."""
    return is_individually_rational(market, matching) and not blocking_pairs(market, matching)


def enumerate_stable_matchings(market: Market, max_n: int = ORACLE_MAX_N) -> set[Matching]:
    """Every stable matching, by brute force over partial assignments.

    Only mutually listed pairs are candidates, so the search is over
    injective partial maps from proposers to acceptable recipients.
    """
    n = market.n
    if n > max_n:
        raise ValueError(f"n={n} exceeds the enumeration bound {max_n}")
    options = [
        [r for r in pref if p in market.recipient_prefs[r]]
        for p, pref in enumerate(market.proposer_prefs)
    ]
    found: set[Matching] = set()
    assignment: list[Optional[int]] = [None] * n
    taken = [False] * n

    def extend(p: int) -> None:
        if p == n:
            m = Matching.from_pairs(n, [(q, r) for q, r in enumerate(assignment) if r is not None])
            if not blocking_pairs(market, m):
                found.add(m)
            return
        extend(p + 1)
        for r in options[p]:
            if not taken[r]:
                taken[r] = True
                assignment[p] = r
                extend(p + 1)
                assignment[p] = None
                taken[r] = False

    extend(0)
    return found
