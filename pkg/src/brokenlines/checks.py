"""Statistical checks shared by the distributional test reports.

Each report aggregates named sub-checks; the per-check thresholds are
Bonferroni-corrected so a whole report rejects a true hypothesis with
probability at most its significance level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as spstats


@dataclass(frozen=True)
class Check:
    name: str
    statistic: float
    threshold: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "test": self.name,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class TestReport:
    test: str
    params: dict
    seed: int
    nsamples: int
    significance: float
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> tuple[Check, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def to_dict(self) -> dict:
        return {
            "test": self.test,
            "params": self.params,
            "seed": self.seed,
            "nsamples": self.nsamples,
            "significance": self.significance,
            "pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def ks_statistic(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov distance (tie-safe)."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))

def ks_threshold(n: int, m: int, alpha: float) -> float:
    """Asymptotic two-sample critical distance at level ``alpha``."""
    c = math.sqrt(-math.log(alpha / 2.0) / 2.0)
    return c * math.sqrt((n + m) / (n * m))


def ks_check(name: str, a: np.ndarray, b: np.ndarray, alpha: float) -> Check:
    d = ks_statistic(a, b)
    crit = ks_threshold(len(a), len(b), alpha)
    return Check(name, d, crit, d <= crit)


def mean_z_check(name: str, a: np.ndarray, b: np.ndarray, alpha: float) -> Check:
    """Welch z-test that two samples share a mean."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    se = math.sqrt(a.var(ddof=1) / a.size + b.var(ddof=1) / b.size)
    z = abs(float(a.mean() - b.mean())) / se if se > 0 else 0.0
    crit = float(spstats.norm.isf(alpha / 2.0))
    return Check(name, z, crit, z <= crit)


def correlation_check(name: str, a: np.ndarray, b: np.ndarray, alpha: float) -> Check:
    """z-test that the sample correlation of two streams is zero."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    sa, sb = a.std(), b.std()
    if sa == 0 or sb == 0:
        return Check(name, 0.0, 1.0, True)
    r = float(np.mean((a - a.mean()) * (b - b.mean())) / (sa * sb))
    z = abs(r) * math.sqrt(a.size)
    crit = float(spstats.norm.isf(alpha / 2.0))
    return Check(name, z, crit, z <= crit)


def chi2_homogeneity_check(
    name: str,
    a: np.ndarray,
    b: np.ndarray,
    alpha: float,
    min_expected: float = 5.0,
) -> Check:
    """Chi-square test that two integer samples follow one law.

    Counts are pooled from the upper tail until every cell's expected count
    reaches ``min_expected``.  The statistic reported is ``1 - p``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    top = int(max(a.max(initial=0), b.max(initial=0)))
    ca = np.bincount(a.astype(int), minlength=top + 1).astype(float)
    cb = np.bincount(b.astype(int), minlength=top + 1).astype(float)
    total = ca + cb
    scale = min(ca.sum(), cb.sum()) / (ca.sum() + cb.sum())
    # merge tail bins upward until each kept bin is well populated
    keep = len(total)
    while keep > 1 and total[keep - 1 :].sum() * scale < min_expected:
        keep -= 1
    ca = np.concatenate([ca[: keep - 1], [ca[keep - 1 :].sum()]])
    cb = np.concatenate([cb[: keep - 1], [cb[keep - 1 :].sum()]])
    mask = (ca + cb) > 0
    table = np.vstack([ca[mask], cb[mask]])
    if table.shape[1] < 2:
        return Check(name, 0.0, 1.0 - alpha, True)
    _, p, _, _ = spstats.chi2_contingency(table)
    return Check(name, 1.0 - float(p), 1.0 - alpha, bool(p >= alpha))
