"""Analytic tail bounds, Monte Carlo estimators, and the scaling harness."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .geometry import build_percolated_rgg, build_rgg, sample_points
from .matching import BipartiteGraph, hall_violator
from .process import trivial_lower_bound
from .rng import subseed, substream

__all__ = [
    "TailBound",
    "chernoff_upper",
    "chernoff_lower",
    "wilson_interval",
    "pm_probability",
    "ExperimentRecord",
    "SweepConfig",
    "radius_for_regime",
    "scaling_experiment",
    "write_records_csv",
    "CSV_COLUMNS",
]


def _H(x: float) -> float:
    """x ln x - x + 1, extended by the limits H(0) = 1 and H(1) = 0."""
    if x < 0:
        raise ConfigError(f"H undefined for x = {x}")
    if x == 0.0:
        return 1.0
    return x * math.log(x) - x + 1.0


@dataclass(frozen=True)
class TailBound:
    mu: float
    k: float
    bound: float

    def __post_init__(self):
        if not (0.0 <= self.bound <= 1.0):
            raise ConfigError(f"bound {self.bound} outside [0, 1]")


def chernoff_upper(mu: float, k: float) -> TailBound:
    """P(Z >= k) <= exp(-mu H(k/mu)) for Poisson/Binomial Z with mean mu,
    valid for k >= mu."""
    if mu <= 0:
        raise ConfigError(f"mu must be positive, got {mu}")
    if k < mu:
        raise ConfigError(f"upper tail needs k >= mu (k={k}, mu={mu})")
    return TailBound(mu=mu, k=k, bound=min(1.0, math.exp(-mu * _H(k / mu))))


def chernoff_lower(mu: float, k: float) -> TailBound:
    """P(Z <= k) <= exp(-mu H(k/mu)), valid for k <= mu."""
    if mu <= 0:
        raise ConfigError(f"mu must be positive, got {mu}")
    if k > mu:
        raise ConfigError(f"lower tail needs k <= mu (k={k}, mu={mu})")
    return TailBound(mu=mu, k=k, bound=min(1.0, math.exp(-mu * _H(k / mu))))


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """Wilson score interval; stable near proportions of 0 and 1."""
    if trials < 1:
        raise ConfigError("need at least one trial")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _random_bipartite_has_pm(t: int, p: float, gen: np.random.Generator) -> bool:
    rows = gen.random((t, t)) < p
    adj = [list(np.nonzero(rows[i])[0]) for i in range(t)]
    b = BipartiteGraph(n_left=t, n_right=t, adj=adj)
    return hall_violator(b) is None


def pm_probability(t: int, p: float, trials: int, seed: int = 0):
    """Monte Carlo estimate of P(random t x t bipartite graph with edge
    probability p has a perfect matching), with a 95% Wilson interval.

    Returns (estimate, (lo, hi), successes).
    """
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    gen = substream(seed, "pm-trials")
    wins = 0
    for _ in range(trials):
        if _random_bipartite_has_pm(t, p, gen):
            wins += 1
    return wins / trials, wilson_interval(wins, trials), wins


CSV_COLUMNS = ["n", "r", "p", "seed", "strategy", "rounds", "lower_bound",
               "theory_value", "ratio", "all_acquainted", "wall_time_ms"]


@dataclass
class ExperimentRecord:
    n: int
    r: float
    p: float
    seed: int
    strategy: str
    rounds: int
    lower_bound: int
    theory_value: float
    ratio: float
    all_acquainted: bool
    wall_time_ms: float
    error: str = ""

    def row(self) -> list:
        return [self.n, repr(self.r), repr(self.p), self.seed, self.strategy,
                self.rounds, self.lower_bound, repr(self.theory_value),
                repr(self.ratio), str(self.all_acquainted).lower(),
                repr(self.wall_time_ms)]


def radius_for_regime(regime: str, n: int, K: float = 100.0, p: float = 1.0) -> float:
    """Radius shorthands: dense pi*n*r^2 = K ln n; sparse pi*n*r^2 = ln n +
    2 ln ln n; percolated p*n*r^2 = K ln n."""
    logn = math.log(n)
    if regime == "dense":
        return math.sqrt(K * logn / (math.pi * n))
    if regime == "sparse":
        return math.sqrt((logn + 2.0 * math.log(logn)) / (math.pi * n))
    if regime == "percolated":
        return math.sqrt(K * logn / (p * n))
    raise ConfigError(f"unknown regime {regime!r}")


@dataclass
class SweepConfig:
    regime: str                      # dense | percolated
    ns: list[int]
    seeds: int = 3
    K: float = 100.0
    p: float = 1.0
    strategy: str = ""               # default picked from the regime
    c_cell: float = 3.0
    k: int | None = None             # percolated local budget override
    engine: str = "auto"
    extra: dict = field(default_factory=dict)

    def strategy_name(self) -> str:
        if self.strategy:
            return self.strategy
        return "dense" if self.regime == "dense" else "percolated"


def _run_one(cfg: SweepConfig, n: int, seed: int) -> ExperimentRecord:
    from .strategies import DenseStrategy, PercolatedStrategy

    t0 = time.perf_counter()
    r = radius_for_regime(cfg.regime, n, K=cfg.K, p=cfg.p)
    pts = sample_points(n, subseed(seed, "sweep-points", n))
    if cfg.regime == "percolated" and cfg.p < 1.0:
        g = build_percolated_rgg(pts, r, cfg.p, subseed(seed, "sweep-coins", n))
    else:
        g = build_rgg(pts, r)
    lower = trivial_lower_bound(g)
    name = cfg.strategy_name()
    if name == "dense":
        strat = DenseStrategy(c_cell=cfg.c_cell, engine=cfg.engine).fit(g)
        theory = float(strat.m_ ** 2)
    elif name == "percolated":
        strat = PercolatedStrategy(c_cell=cfg.c_cell, k=cfg.k, seed=seed,
                                   engine=cfg.engine).fit(g)
        theory = float(strat.m_ ** 2 * strat.k_)
    else:
        raise ConfigError(f"unknown sweep strategy {name!r}")
    rounds = strat.report_.rounds
    ms = (time.perf_counter() - t0) * 1000.0
    return ExperimentRecord(n=n, r=r, p=cfg.p if cfg.regime == "percolated" else 1.0,
                            seed=seed, strategy=name, rounds=rounds, lower_bound=lower,
                            theory_value=theory, ratio=rounds / theory,
                            all_acquainted=True, wall_time_ms=ms)


def scaling_experiment(cfg: SweepConfig, out_path: str | Path | None = None,
                       progress=None) -> list[ExperimentRecord]:
    """Run the sweep; per-run failures become records with error set, not
    crashes, and partial results are still flushed to the CSV."""
    records: list[ExperimentRecord] = []
    for n in cfg.ns:
        for seed in range(cfg.seeds):
            try:
                rec = _run_one(cfg, n, seed)
            except Exception as exc:  # noqa: BLE001 - per-run isolation is the contract
                rec = ExperimentRecord(
                    n=n, r=radius_for_regime(cfg.regime, n, K=cfg.K, p=cfg.p),
                    p=cfg.p, seed=seed, strategy=cfg.strategy_name(), rounds=0,
                    lower_bound=0, theory_value=1.0, ratio=0.0,
                    all_acquainted=False, wall_time_ms=0.0,
                    error=f"{type(exc).__name__}: {exc}")
            records.append(rec)
            if progress is not None:
                progress(rec)
    if out_path is not None:
        write_records_csv(records, out_path)
    return records


def write_records_csv(records: list[ExperimentRecord], out_path: str | Path):
    out_path = Path(out_path)
    with out_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(rec.row())
