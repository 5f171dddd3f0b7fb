"""Random market generation with correlated preferences.

Agents on each side carry a popularity weight ``exp(-rho * j / n)`` for
index ``j``; ``rho = 0`` is uniform and larger values concentrate demand on
low indices. Proposers draw ``min(k, n)`` recipients sequentially without
replacement, proportional to the remaining weights. Each recipient then
ranks exactly the proposers that listed her, again drawing sequentially
with probability proportional to the proposers' weights.

Weighted sequential sampling is done with an exponential race: every
candidate ``j`` draws ``E_j ~ Exp(1)`` and candidates are sorted by
``E_j / w_j``. The smallest key is ``j`` with probability ``w_j / sum(w)``
and, by memorylessness, the same holds for the remaining candidates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

PrefList = tuple[int, ...]


def _check_list(pref: Sequence[int], n: int, where: str) -> PrefList:
    pref = tuple(int(x) for x in pref)
    if len(set(pref)) != len(pref):
        raise ValueError(f"{where}: duplicate entries in {list(pref)}")
    for x in pref:
        if not 0 <= x < n:
            raise ValueError(f"{where}: agent {x} out of range [0, {n})")
    return pref


@dataclass(frozen=True)
class Market:
    """A one-to-one market with ``n`` proposers and ``n`` recipients.

    Lists are strict and possibly incomplete; an agent prefers being
    unmatched to any agent missing from its list. ``k``, ``rho`` and
    ``weights`` record how the market was generated and are ``None`` for
    hand-built markets.
    """

    n: int
    proposer_prefs: tuple[PrefList, ...]
    recipient_prefs: tuple[PrefList, ...]
    k: int | None = None
    rho: float | None = None
    weights: tuple[float, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("market size must be at least 1")
        if len(self.proposer_prefs) != self.n or len(self.recipient_prefs) != self.n:
            raise ValueError(f"expected {self.n} lists per side")
        object.__setattr__(
            self,
            "proposer_prefs",
            tuple(_check_list(p, self.n, f"proposer {i}") for i, p in enumerate(self.proposer_prefs)),
        )
        object.__setattr__(
            self,
            "recipient_prefs",
            tuple(_check_list(r, self.n, f"recipient {i}") for i, r in enumerate(self.recipient_prefs)),
        )

    @classmethod
    def from_lists(cls, proposer_prefs, recipient_prefs) -> "Market":
        return cls(len(proposer_prefs), tuple(map(tuple, proposer_prefs)), tuple(map(tuple, recipient_prefs)))

    def with_recipient_list(self, recipient: int, report: Sequence[int]) -> "Market":
        """Copy of the market with one recipient's list replaced."""
        prefs = list(self.recipient_prefs)
        prefs[recipient] = tuple(report)
        return Market(self.n, self.proposer_prefs, tuple(prefs), self.k, self.rho, self.weights)

    def with_proposer_list(self, proposer: int, report: Sequence[int]) -> "Market":
        prefs = list(self.proposer_prefs)
        prefs[proposer] = tuple(report)
        return Market(self.n, tuple(prefs), self.recipient_prefs, self.k, self.rho, self.weights)

    def is_mutual(self) -> bool:
        """True if recipient r lists p exactly when p lists r."""
        applied = {(p, r) for p, pref in enumerate(self.proposer_prefs) for r in pref}
        listed = {(p, r) for r, pref in enumerate(self.recipient_prefs) for p in pref}
        return applied == listed

    # Dense views used by the compiled kernels.

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """``(prop_prefs, prop_len, rank, rec_len)`` as int64 arrays."""
        n = self.n
        width = max(1, max(len(p) for p in self.proposer_prefs))
        prop_prefs = np.full((n, width), -1, dtype=np.int64)
        prop_len = np.zeros(n, dtype=np.int64)
        for p, pref in enumerate(self.proposer_prefs):
            prop_prefs[p, : len(pref)] = pref
            prop_len[p] = len(pref)
        rank = np.full((n, n), n, dtype=np.int64)
        rec_len = np.zeros(n, dtype=np.int64)
        for r, pref in enumerate(self.recipient_prefs):
            rank[r, list(pref)] = np.arange(len(pref))
            rec_len[r] = len(pref)
        for a in (prop_prefs, prop_len, rank, rec_len):
            a.flags.writeable = False
        return prop_prefs, prop_len, rank, rec_len

    def to_text(self) -> str:
        """Debug format, one line per agent: ``P0: 3 1 4`` then ``R0: ...``."""
        lines = [f"P{i}: " + " ".join(map(str, p)) for i, p in enumerate(self.proposer_prefs)]
        lines += [f"R{i}: " + " ".join(map(str, r)) for i, r in enumerate(self.recipient_prefs)]
        return "\n".join(line.rstrip() for line in lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Market":
        sides: dict[str, dict[int, PrefList]] = {"P": {}, "R": {}}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            head, sep, rest = line.partition(":")
            head = head.strip()
            if not sep or head[:1] not in sides or not head[1:].isdigit():
                raise ValueError(f"line {lineno}: expected 'P<i>: ...' or 'R<i>: ...'")
            sides[head[0]][int(head[1:])] = tuple(int(x) for x in rest.split())
        n = len(sides["P"])
        for key, side in sides.items():
            if sorted(side) != list(range(n)):
                raise ValueError(f"{key} lines must be numbered 0..{n - 1}")
        return cls.from_lists(
            [sides["P"][i] for i in range(n)], [sides["R"][i] for i in range(n)]
        )


def popularity_weights(n: int, rho: float) -> np.ndarray:
    """Weights ``exp(-rho * j / n)``, non-increasing in ``j``."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    rho = float(rho)
    if not math.isfinite(rho) or rho < 0:
        raise ValueError(f"rho must be a finite non-negative number, got {rho}")
    return np.exp(-rho * np.arange(n) / n)


def _check_weights(weights, n: int) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n,):
        raise ValueError(f"expected {n} weights, got shape {w.shape}")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ValueError("weights must be finite and strictly positive")
    return w


def sample_proposer_prefs(n: int, k: int, weights, rng: np.random.Generator) -> list[PrefList]:
    """Each proposer lists ``min(k, n)`` distinct recipients, best first."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    w = _check_weights(weights, n)
    keys = rng.standard_exponential((n, n)) / w
    order = np.argsort(keys, axis=1, kind="stable")[:, : min(k, n)]
    return [tuple(row) for row in order.tolist()]


def derive_recipient_prefs(proposer_prefs: Sequence[Sequence[int]], proposer_weights, rng: np.random.Generator) -> list[PrefList]:
    """Recipients rank exactly the proposers who listed them.

    One key is drawn per application, in (recipient, proposer) order, so the
    result depends only on the proposer lists and the rng state.
    """
    n = len(proposer_prefs)
    w = _check_weights(proposer_weights, n)
    applicants: list[list[int]] = [[] for _ in range(n)]
    for p, pref in enumerate(proposer_prefs):
        for r in pref:
            applicants[r].append(p)
    rec = np.fromiter((r for r in range(n) for _ in applicants[r]), dtype=np.int64)
    prop = np.fromiter((p for r in range(n) for p in sorted(applicants[r])), dtype=np.int64)
    keys = rng.standard_exponential(len(prop)) / w[prop]
    order = np.lexsort((keys, rec))
    out: list[list[int]] = [[] for _ in range(n)]
    for r, p in zip(rec[order].tolist(), prop[order].tolist()):
        out[r].append(p)
    return [tuple(x) for x in out]


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 stream for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def generate_market(n: int, k: int, rho: float, seed: int) -> Market:
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    weights = popularity_weights(n, rho)
    rng = make_rng(seed)
    proposers = sample_proposer_prefs(n, k, weights, rng)
    recipients = derive_recipient_prefs(proposers, weights, rng)
    return Market(n, tuple(proposers), tuple(recipients), k=k, rho=float(rho), weights=tuple(weights.tolist()))
