"""Negative-binomial frequency-count simulation and replication studies.

Counts are drawn through the gamma-Poisson mixture, so a class with
dispersion ``size`` and success probability ``prob`` contributes a count
with mean ``size * (1 - prob) / prob``.  High ``prob`` therefore means
sparse counts with heavy singleton mass, the regime these estimators target.

Each replication owns a counter-based Philox stream keyed by
``(seed, replication_index)``, which makes every draw reproducible and
independent of execution order: serial and parallel studies aggregate the
same per-replication results in index order, bit for bit.
"""

from __future__ import annotations

import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RatiorichError
from .freqtab import FrequencyTable
from .procedure import ProcedureOptions, estimate_richness

__all__ = [
    "SimConfig",
    "SimulatedTable",
    "StudySummary",
    "simulate_nb_counts",
    "replication_study",
]


@dataclass(frozen=True)
class SimConfig:
    """Design of one replication study."""

    c_true: int
    prob: float
    size: float
    replications: int
    seed: int
    workers: int = 1

    def __post_init__(self) -> None:
        if self.c_true <= 0:
            raise DomainError("c_true must be positive")
        if not 0.0 < self.prob < 1.0:
            raise DomainError("prob must lie strictly between 0 and 1")
        if self.size <= 0.0:
            raise DomainError("size must be positive")
        if self.replications <= 0:
            raise DomainError("replications must be positive")
        if self.seed < 0:
            raise DomainError("seed must be non-negative")
        if self.workers < 1:
            raise DomainError("workers must be at least 1")


@dataclass(frozen=True)
class SimulatedTable:
    """One simulated table plus the true number of unobserved classes."""

    table: FrequencyTable
    f0_true: int
    replication_index: int


@dataclass(frozen=True)
class StudySummary:
    """Aggregates over a replication study.

    Failed replications (tables without enough structure, or no estimate)
    are excluded from the moment summaries but counted in ``failures`` and
    in the denominator of ``pct_inferred_nb``.  ``degenerate`` flags
    summaries with fewer than two successful replications, where the
    empirical spread is reported as zero.
    """

    pct_inferred_nb: float
    mean_se_hat: float
    empirical_se: float
    mean_c_hat: float
    failures: int
    replications: int
    degenerate: bool


def simulate_nb_counts(config: SimConfig, replication_index: int) -> SimulatedTable:
    """Draw one frequency table of ``c_true`` negative-binomial counts.

    Deterministic in ``(config.seed, replication_index)``.
    """
    if replication_index < 0:
        raise DomainError("replication_index must be non-negative")
    key = np.array([config.seed, replication_index], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    scale = (1.0 - config.prob) / config.prob
    means = rng.gamma(shape=config.size, scale=scale, size=config.c_true)
    draws = rng.poisson(means)
    counts = np.bincount(draws)
    entries = {j: int(counts[j]) for j in range(1, len(counts)) if counts[j] > 0}
    table = FrequencyTable.from_entries(entries)
    return SimulatedTable(table=table, f0_true=int(counts[0]), replication_index=replication_index)


def _run_replication(config: SimConfig, options: ProcedureOptions | None, index: int):
    sim = simulate_nb_counts(config, index)
    try:
        estimate = estimate_richness(sim.table, options)
    except RatiorichError:
        return None
    inferred_nb = (
        estimate.classification is not None
        and estimate.classification.label == "negative-binomial"
    )
    return (estimate.c_hat, estimate.se, inferred_nb)


def replication_study(config: SimConfig, options: ProcedureOptions | None = None) -> StudySummary:
    """Run the estimator over ``config.replications`` simulated tables.

    Aggregation is order-independent: results are collected per replication
    index and reduced in index order, so serial and parallel runs agree
    exactly.
    """
    runner = functools.partial(_run_replication, config, options)
    indices = range(config.replications)
    if config.workers > 1:
        chunksize = max(1, config.replications // (config.workers * 8))
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(runner, indices, chunksize=chunksize))
    else:
        results = [runner(i) for i in indices]

    c_hats = np.array([r[0] for r in results if r is not None], dtype=float)
    se_hats = np.array([r[1] for r in results if r is not None], dtype=float)
    nb_count = sum(1 for r in results if r is not None and r[2])
    failures = sum(1 for r in results if r is None)
    successes = len(c_hats)

    degenerate = successes < 2
    return StudySummary(
        pct_inferred_nb=100.0 * nb_count / config.replications,
        mean_se_hat=float(np.mean(se_hats)) if successes else float("nan"),
        empirical_se=float(np.std(c_hats, ddof=1)) if successes >= 2 else 0.0,
        mean_c_hat=float(np.mean(c_hats)) if successes else float("nan"),
        failures=failures,
        replications=config.replications,
        degenerate=degenerate,
    )
