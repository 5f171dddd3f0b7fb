"""Counting recipients who gain from misreporting.

Only recipients are searched: truthful reporting is dominant for the
proposing side, and any successful recipient manipulation can be realised
by a truncation of her true list.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import _kernels
from .matching import RankTable, deferred_acceptance
from .prefgen import Market, PrefList

ORACLE_MAX_N = 4


@dataclass(frozen=True)
class Deviation:
    """A recipient's first successful truncation.

    ``length`` is the number of entries kept; ranks are positions in her
    true list (before = truthful partner, after = partner under the report).
    """

    recipient: int
    length: int
    rank_before: int
    rank_after: int

    @property
    def improvement(self) -> int:
        return self.rank_before - self.rank_after


@dataclass(frozen=True)
class DeviationReport:
    n: int
    per_recipient: dict[int, Deviation] = field(default_factory=dict)

    @property
    def deviator_count(self) -> int:
        return len(self.per_recipient)

    @property
    def ratio(self) -> float:
        return self.deviator_count / self.n


def truncations(pref: Sequence[int]) -> tuple[PrefList, ...]:
    """Prefixes of lengths ``L-1, L-2, ..., 1``."""
    pref = tuple(pref)
    if not pref:
        raise ValueError("cannot truncate an empty list")
    return tuple(pref[:t] for t in range(len(pref) - 1, 0, -1))


def _partner_rank(market: Market, recipient: int, report: Sequence[int]) -> int:
    """True-list rank of the recipient's partner when she submits ``report``."""
    partner = deferred_acceptance(market.with_recipient_list(recipient, report)).recipient_to_proposer[recipient]
    return RankTable(market.recipient_prefs).rank(recipient, partner)


def _truthful_rank(market: Market, recipient: int) -> int:
    partner = deferred_acceptance(market).recipient_to_proposer[recipient]
    return RankTable(market.recipient_prefs).rank(recipient, partner)


def is_useful_deviation(market: Market, recipient: int, report: Sequence[int]) -> bool:
    """True if the truncated report gets the recipient a strictly better partner.

    Better is judged by her true list; ending unmatched never counts.
    """
    true_list = market.recipient_prefs[recipient]
    report = tuple(report)
    if report != true_list[: len(report)]:
        raise ValueError(f"{list(report)} is not a prefix of recipient {recipient}'s list")
    return _partner_rank(market, recipient, report) < _truthful_rank(market, recipient)


def count_deviators(market: Market, prune: bool = True) -> DeviationReport:
    """Number of recipients holding at least one useful truncation.

    For each recipient the truncations are tried longest first and the
    search stops at the first success. DA is rerun from scratch for every
    test. ``prune`` skips truncations that still list her truthful partner;
    those cannot change the outcome, so the result is the same either way.
    """
    prop_prefs, prop_len, rank, rec_len = market.arrays
    kept, before, after = _kernels.count_deviators(prop_prefs, prop_len, rank, rec_len, prune)
    per = {
        r: Deviation(r, int(kept[r]), int(before[r]), int(after[r]))
        for r in range(market.n)
        if kept[r] != _kernels.NO_DEVIATOR
    }
    return DeviationReport(market.n, per)


def _reports(pref: PrefList):
    """Every strict ordering of every non-empty subset of ``pref``."""
    for size in range(1, len(pref) + 1):
        for subset in itertools.combinations(pref, size):
            yield from itertools.permutations(subset)


def brute_force_deviators(market: Market, max_n: int = ORACLE_MAX_N, max_len: int = 4) -> int:
    """Recipients with any useful misreport, over all possible reports."""
    if market.n > max_n:
        raise ValueError(f"n={market.n} exceeds the oracle bound {max_n}")
    longest = max(len(p) for p in market.recipient_prefs)
    if longest > max_len:
        raise ValueError(f"recipient list of length {longest} exceeds the oracle bound {max_len}")
    truthful = deferred_acceptance(market)
    ranks = RankTable(market.recipient_prefs)
    count = 0
    for r, pref in enumerate(market.recipient_prefs):
        baseline = ranks.rank(r, truthful.recipient_to_proposer[r])
        if any(_partner_rank(market, r, report) < baseline for report in _reports(pref)):
            count += 1
    return count


def replay(market: Market, deviation: Deviation) -> Optional[int]:
    """Partner the recipient gets when submitting the recorded truncation."""
    report = market.recipient_prefs[deviation.recipient][: deviation.length]
    return deferred_acceptance(market.with_recipient_list(deviation.recipient, report)).recipient_to_proposer[deviation.recipient]
