"""Experiment grid over (n, k, rho, trial) with reproducible per-cell seeds.

Each cell's seed is derived from the master seed and the cell coordinates
with a fixed 64-bit mix, so the output does not depend on how cells are
scheduled across workers::

    mix(z):  z += 0x9E3779B97F4A7C15
             z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
             z = (z ^ (z >> 27)) * 0x94D049BB133111EB
             return z ^ (z >> 31)                     (all mod 2**64)

    cell_seed = fold(mix, [master_seed, n, k, bits(rho), trial]),
    fold:     h = 0; for w in words: h = mix(h ^ w)

``bits(rho)`` is the IEEE-754 binary64 pattern of rho (with -0.0 read as
0.0). The cell seed feeds a PCG64 generator.
"""
from __future__ import annotations

import configparser
import itertools
import math
import os
import statistics
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .deviation import count_deviators
from .prefgen import generate_market

MASK64 = (1 << 64) - 1

DEFAULT_LADDER = (5, 10, 20, 35, 50, 75, 100, 150, 200, 300, 400)
# Continuation used when a ladder range reaches beyond 400.
_LADDER_TAIL = (500, 600, 700, 800, 900, 1000)

DEFAULT_TRIALS = 50

ProgressSink = Callable[[int, int], None]


def mix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stable_hash(*words: int) -> int:
    h = 0
    for w in words:
        h = mix64(h ^ (w & MASK64))
    return h


def float_bits(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(x) + 0.0))[0]


def cell_seed(master_seed: int, n: int, k: int, rho: float, trial: int) -> int:
    return stable_hash(master_seed, n, k, float_bits(rho), trial)


def ladder(lo: int, hi: int) -> list[int]:
    """Default n ladder clipped to ``[lo, hi]``, endpoints always included."""
    if lo > hi:
        raise ValueError(f"empty range {lo}:{hi}")
    values = {v for v in DEFAULT_LADDER + _LADDER_TAIL if lo <= v <= hi}
    values.update((lo, hi))
    return sorted(values)


def parse_int_grid(text: str) -> list[int]:
    """``a,b,c`` or ``a:b:ladder`` or ``a:b:step``."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"bad range {text!r}, expected a:b:ladder or a:b:step")
        lo, hi = int(parts[0]), int(parts[1])
        if parts[2] == "ladder":
            return ladder(lo, hi)
        step = int(parts[2])
        if step < 1:
            raise ValueError(f"step must be positive in {text!r}")
        return list(range(lo, hi + 1, step))
    return [int(x) for x in text.split(",") if x.strip()]


def parse_float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


@dataclass(frozen=True)
class SweepConfig:
    n_values: tuple[int, ...] = DEFAULT_LADDER
    k_values: tuple[int, ...] = (10, 15, 20, 40)
    rho_values: tuple[float, ...] = (0.05, 1.0, 3.0)
    trials: int = DEFAULT_TRIALS
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        for name in ("n_values", "k_values", "rho_values"):
            values = tuple(getattr(self, name))
            if not values:
                raise ValueError(f"{name} must not be empty")
            object.__setattr__(self, name, values)
        if any(n < 1 for n in self.n_values):
            raise ValueError("every n must be at least 1")
        if any(k < 1 for k in self.k_values):
            raise ValueError("every k must be at least 1")
        if any(not math.isfinite(r) or r < 0 for r in self.rho_values):
            raise ValueError("every rho must be finite and non-negative")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    @classmethod
    def from_file(cls, path, **overrides) -> "SweepConfig":
        """Read the ``[sweep]`` section of an INI-style file.

        Keys: ``n`` (grid syntax), ``k``, ``rho``, ``trials``, ``seed``,
        ``workers``. Keyword overrides that are not None win.
        """
        parser = configparser.ConfigParser()
        with open(path, encoding="utf-8") as f:
            parser.read_file(f)
        if not parser.has_section("sweep"):
            raise ValueError(f"{path}: missing [sweep] section")
        sec = parser["sweep"]
        unknown = set(sec) - {"n", "k", "rho", "trials", "seed", "workers"}
        if unknown:
            raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
        kwargs = {}
        if "n" in sec:
            kwargs["n_values"] = tuple(parse_int_grid(sec["n"]))
        if "k" in sec:
            kwargs["k_values"] = tuple(parse_int_grid(sec["k"]))
        if "rho" in sec:
            kwargs["rho_values"] = tuple(parse_float_list(sec["rho"]))
        if "trials" in sec:
            kwargs["trials"] = sec.getint("trials")
        if "seed" in sec:
            kwargs["master_seed"] = sec.getint("seed")
        if "workers" in sec:
            kwargs["workers"] = sec.getint("workers")
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)

    def cells(self) -> list[tuple[int, int, float, int]]:
        """Cells in canonical (n, k, rho, trial) order."""
        return list(
            itertools.product(
                sorted(set(self.n_values)),
                sorted(set(self.k_values)),
                sorted(set(self.rho_values)),
                range(self.trials),
            )
        )


@dataclass(frozen=True)
class SweepRow:
    n: int
    k: int
    rho: float
    trial: int
    seed: int
    D: int
    ratio: float = field(init=False)

    def __post_init__(self):
        if not 0 <= self.D <= self.n:
            raise ValueError(f"D={self.D} outside [0, {self.n}]")
        object.__setattr__(self, "ratio", self.D / self.n)

    @property
    def key(self):
        return (self.n, self.k, self.rho, self.trial)


@dataclass(frozen=True)
class AggregateRow:
    n: int
    k: int
    rho: float
    trials: int
    mean_ratio: float
    stderr: float


def run_cell(n: int, k: int, rho: float, trial: int, master_seed: int) -> SweepRow:
    seed = cell_seed(master_seed, n, k, rho, trial)
    market = generate_market(n, k, rho, seed)
    return SweepRow(n, k, float(rho), trial, seed, count_deviators(market).deviator_count)


def _run_cell_args(args) -> SweepRow:
    return run_cell(*args)


def run_sweep(config: SweepConfig, progress: Optional[ProgressSink] = None) -> list[SweepRow]:
    """Run every cell of the grid; rows come back in canonical order."""
    jobs = [(n, k, rho, t, config.master_seed) for n, k, rho, t in config.cells()]
    total = len(jobs)
    rows: list[SweepRow] = []

    def collect(results: Iterable[SweepRow]) -> None:
        for row in results:
            rows.append(row)
            if progress is not None:
                progress(len(rows), total)

    if config.workers == 1 or total == 1:
        collect(map(_run_cell_args, jobs))
    else:
        chunk = max(1, total // (config.workers * 8))
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            collect(pool.map(_run_cell_args, jobs, chunksize=chunk))
    rows.sort(key=lambda r: r.key)
    return rows


def aggregate(rows: Sequence[SweepRow]) -> list[AggregateRow]:
    """Mean and standard error of D/n per (n, k, rho)."""
    if not rows:
        raise ValueError("cannot aggregate an empty set of rows")
    groups: dict[tuple[int, int, float], list[float]] = {}
    for row in sorted(rows, key=lambda r: r.key):
        groups.setdefault((row.n, row.k, row.rho), []).append(row.ratio)
    out = []
    for (n, k, rho), ratios in groups.items():
        mean = statistics.fmean(ratios)
        se = statistics.stdev(ratios) / math.sqrt(len(ratios)) if len(ratios) > 1 else 0.0
        out.append(AggregateRow(n, k, rho, len(ratios), mean, se))
    return out


def default_workers() -> int:
    return os.cpu_count() or 1
