"""Monte Carlo reproduction of the passage-time growth constants.

For i.i.d. exponential or geometric births on an ``n x floor(beta n)``
rectangle the scaled passage value converges to an explicit constant; these
experiments estimate the finite-size mean and the tail exceedance rates.
Replicas are embarrassingly parallel: every draw is addressed by
``(seed, replica, row, col)``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .duality import EXPONENTIAL, GEOMETRIC, DistSpec
from .lpp import passage_value
from .streams import stream_base, uniform_grid

THREADS_ENV = "BROKENLINES_THREADS"


@dataclass(frozen=True)
class LlnConfig:
    n: int
    beta: float
    dist: DistSpec
    replicas: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1 or self.replicas < 1:
            raise ValueError("need n >= 1 and replicas >= 1")
        if self.m < 1:
            raise ValueError("beta * n must be at least 1")

    @property
    def m(self) -> int:
        return int(math.floor(self.beta * self.n))


@dataclass(frozen=True)
class LlnReport:
    config: LlnConfig
    samples: tuple[float, ...]
    mean: float
    stddev: float
    target: float
    abs_error: float
    boundary_params: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "n": self.config.n,
            "beta": self.config.beta,
            "dist": self.config.dist.token(),
            "replicas": self.config.replicas,
            "seed": self.config.seed,
            "samples": list(self.samples),
            "mean": self.mean,
            "stddev": self.stddev,
            "target": self.target,
            "abs_error": self.abs_error,
            "boundary_params": list(self.boundary_params),
        }


def lln_target(dist: DistSpec, beta: float) -> float:
    """Limit of (passage value)/n on the ``n x floor(beta n)`` rectangle."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if dist.kind == EXPONENTIAL:
        return (1.0 + math.sqrt(beta)) ** 2 / dist.rate
    if dist.kind == GEOMETRIC:
        lam = dist.lam
        return (1.0 + math.sqrt(beta * lam)) ** 2 / (1.0 - lam) - 1.0
    raise ValueError("growth constants exist for exponential and geometric births only")


def reversible_boundary_params(dist: DistSpec, beta: float) -> tuple[float, float]:
    """Boundary laws that make the stationary comparison field reversible.

    For exponential births the two inflow rates splitting the birth rate;
    for geometric births the two parameters whose product is the birth one.
    """
    if dist.kind == EXPONENTIAL:
        a = dist.rate
        return (a / (1.0 + math.sqrt(beta)), a / (1.0 + beta ** -0.5))
    if dist.kind == GEOMETRIC:
        lam = dist.lam
        lam_up = (lam + math.sqrt(beta * lam)) / (1.0 + math.sqrt(beta * lam))
        return (lam_up, lam / lam_up)
    raise ValueError("boundary parameters exist for exponential and geometric births only")


def replica_passage(dist: DistSpec, n: int, m: int, seed: int, replica: int) -> float:
    """Passage value of one i.i.d. birth matrix, addressed by (seed, replica)."""
    base = stream_base(seed, replica)
    u = uniform_grid(base, n, m)
    births = np.asarray(dist.from_uniform(u), dtype=float)
    return passage_value(births)


def _resolve_threads(threads: int | None, replicas: int) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or "1")
    return max(1, min(threads, replicas))


def _run_replicas(dist, n, m, seed, replicas, threads) -> list[float]:
    workers = _resolve_threads(threads, replicas)
    if workers == 1:
        return [replica_passage(dist, n, m, seed, r) for r in range(replicas)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(
            pool.map(lambda r: replica_passage(dist, n, m, seed, r), range(replicas))
        )


def lln_experiment(config: LlnConfig, threads: int | None = None) -> LlnReport:
    """Estimate the scaled passage value over independent replicas."""
    values = _run_replicas(
        config.dist, config.n, config.m, config.seed, config.replicas, threads
    )
    samples = tuple(v / config.n for v in values)
    mean = float(np.mean(samples))
    stddev = float(np.std(samples, ddof=1)) if len(samples) > 1 else 0.0
    target = lln_target(config.dist, config.beta)
    return LlnReport(
        config=config,
        samples=samples,
        mean=mean,
        stddev=stddev,
        target=target,
        abs_error=abs(mean - target),
        boundary_params=reversible_boundary_params(config.dist, config.beta),
    )


@dataclass(frozen=True)
class ConcentrationReport:
    ns: tuple[int, ...]
    delta: float
    dist: DistSpec
    beta: float
    replicas: int
    seed: int
    rates: tuple[float, ...]
    exceed_counts: tuple[int, ...]
    slope: float

    def to_dict(self) -> dict:
        return {
            "ns": list(self.ns),
            "delta": self.delta,
            "dist": self.dist.token(),
            "beta": self.beta,
            "replicas": self.replicas,
            "seed": self.seed,
            "rates": list(self.rates),
            "exceed_counts": list(self.exceed_counts),
            "loglinear_slope": self.slope,
        }


def concentration_scan(
    ns: list[int],
    delta: float,
    dist: DistSpec,
    beta: float,
    replicas: int,
    seed: int = 0,
    threads: int | None = None,
) -> ConcentrationReport:
    """Empirical exceedance rate of |G/n - target| > delta per size.

    The deviation probability decays exponentially in ``n``; the report
    includes the slope of a log-linear fit through the nonzero rates.
    """
    if replicas < 1:
        raise ValueError("need at least one replica")
    target = lln_target(dist, beta)
    rates = []
    counts = []
    for idx, n in enumerate(ns):
        m = int(math.floor(beta * n))
        values = _run_replicas(dist, n, m, stream_base(seed, idx, n), replicas, threads)
        exceed = sum(1 for v in values if abs(v / n - target) > delta)
        counts.append(exceed)
        rates.append(exceed / replicas)
    positive = [(n, r) for n, r in zip(ns, rates) if r > 0]
    if len(positive) >= 2:
        xs = np.array([n for n, _ in positive], dtype=float)
        ys = np.log(np.array([r for _, r in positive]))
        slope = float(np.polyfit(xs, ys, 1)[0])
    else:
        slope = float("nan")
    return ConcentrationReport(
        ns=tuple(ns),
        delta=delta,
        dist=dist,
        beta=beta,
        replicas=replicas,
        seed=seed,
        rates=tuple(rates),
        exceed_counts=tuple(counts),
        slope=slope,
    )
