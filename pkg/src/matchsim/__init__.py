"""Simulation of truncation manipulation under deferred acceptance."""
from .deviation import DeviationReport, brute_force_deviators, count_deviators, is_useful_deviation, truncations
from .matching import Matching, deferred_acceptance, enumerate_stable_matchings, is_stable
from .prefgen import Market, derive_recipient_prefs, generate_market, popularity_weights, sample_proposer_prefs
from .sweep import AggregateRow, SweepConfig, SweepRow, aggregate, run_cell, run_sweep

__all__ = [
    "AggregateRow", "DeviationReport", "Market", "Matching", "SweepConfig", "SweepRow",
    "aggregate", "brute_force_deviators", "count_deviators", "deferred_acceptance",
    "derive_recipient_prefs", "enumerate_stable_matchings", "generate_market",
    "is_stable", "is_useful_deviation", "popularity_weights", "run_cell", "run_sweep",
    "sample_proposer_prefs", "truncations",
]
