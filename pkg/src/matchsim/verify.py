"""Brute-force oracle checks over many small seeded markets."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

from .deviation import brute_force_deviators, count_deviators
from .matching import RankTable, deferred_acceptance, enumerate_stable_matchings, is_stable
from .prefgen import Market, generate_market
from .sweep import stable_hash

RHOS = (0.05, 1.0, 3.0)


@dataclass
class OracleResult:
    name: str
    cases: int = 0
    failures: list[Market] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def smallest_failure(self) -> Market | None:
        """Failing market with the fewest agents and shortest lists."""
        if not self.failures:
            return None
        return min(self.failures, key=lambda m: (m.n, sum(map(len, m.proposer_prefs))))

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: {len(self.failures)} failures in {self.cases} markets"


def small_markets(cases: int, max_n: int, max_k: int, seed: int = 0, min_n: int = 1) -> Iterator[Market]:
    """Deterministic stream of random markets with n <= max_n, k <= max_k."""
    for i in range(cases):
        h = stable_hash(seed, i)
        n = min_n + h % (max_n - min_n + 1)
        k = 1 + (h >> 16) % max_k
        rho = RHOS[(h >> 32) % len(RHOS)]
        yield generate_market(n, k, rho, stable_hash(h, 1))


def proposer_reports(pref):
    """All orderings of all subsets of a list, the empty list included."""
    for size in range(len(pref) + 1):
        for subset in itertools.combinations(pref, size):
            yield from itertools.permutations(subset)


def check_stability(markets) -> OracleResult:
    result = OracleResult("stability")
    for m in markets:
        result.cases += 1
        if not is_stable(m, deferred_acceptance(m)):
            result.failures.append(m)
    return result


def check_proposer_optimality(markets) -> OracleResult:
    result = OracleResult("proposer optimality")
    for m in markets:
        result.cases += 1
        da = deferred_acceptance(m)
        ranks = RankTable(m.proposer_prefs)
        stable = enumerate_stable_matchings(m)
        ok = da in stable and all(
            ranks.rank(p, da.proposer_to_recipient[p]) <= ranks.rank(p, other.proposer_to_recipient[p])
            for other in stable
            for p in range(m.n)
        )
        if not ok:
            result.failures.append(m)
    return result


def check_proposer_truthfulness(markets) -> OracleResult:
    result = OracleResult("proposer truthfulness")
    for m in markets:
        result.cases += 1
        truthful = deferred_acceptance(m)
        ranks = RankTable(m.proposer_prefs)
        gained = any(
            ranks.rank(p, deferred_acceptance(m.with_proposer_list(p, report)).proposer_to_recipient[p])
            < ranks.rank(p, truthful.proposer_to_recipient[p])
            for p, pref in enumerate(m.proposer_prefs)
            for report in proposer_reports(pref)
        )
        if gained:
            result.failures.append(m)
    return result


def check_truncation_sufficiency(markets) -> OracleResult:
    result = OracleResult("truncation sufficiency")
    for m in markets:
        result.cases += 1
        if brute_force_deviators(m) != count_deviators(m).deviator_count:
            result.failures.append(m)
    return result


def run_all(oracle_n: int = 4, cases: int = 1000, seed: int = 0) -> list[OracleResult]:
    """The oracle suites at their bounds; ``oracle_n`` caps the brute-force sizes."""
    return [
        check_stability(small_markets(cases, 50, 20, seed)),
        check_proposer_optimality(small_markets(cases, min(oracle_n + 1, 5), 5, seed + 1)),
        check_proposer_truthfulness(small_markets(cases, oracle_n, 3, seed + 2)),
        check_truncation_sufficiency(small_markets(cases, oracle_n, 3, seed + 3)),
    ]
