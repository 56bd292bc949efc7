"""Nonparametric method ranking: Kruskal-Wallis omnibus test and Dunn's
pairwise post-hoc test, both on midranks with tie correction.

The rank machinery is implemented here; only the chi-square and normal tail
functions come from scipy.special / math.erfc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc


class StatsError(ValueError):
    """Invalid test input."""


@dataclass(frozen=True)
class KruskalResult:
    statistic: float
    p_value: float


@dataclass(frozen=True, eq=False)
class DunnResult:
    z: np.ndarray          # (k, k) pairwise statistics, antisymmetric
    p: np.ndarray          # (k, k) two-sided p-values, symmetric
    adjustment: str


@dataclass(frozen=True, eq=False)
class TestReport:
    """Omnibus + post-hoc results for one metric across methods."""

    groups: tuple[str, ...]
    kruskal: KruskalResult
    dunn: DunnResult

    def to_dict(self) -> dict:
        return {
            "groups": list(self.groups),
            "kruskal": {"H": self.kruskal.statistic, "p": self.kruskal.p_value},
            "dunn": {
                "z": self.dunn.z.tolist(),
                "p": self.dunn.p.tolist(),
                "adjustment": self.dunn.adjustment,
            },
        }


def _check_groups(groups) -> list[np.ndarray]:
    gs = [np.asarray(g, dtype=float).ravel() for g in groups]
    if len(gs) < 2:
        raise StatsError("need at least two groups")
    for g in gs:
        if g.size == 0:
            raise StatsError("groups must be non-empty")
        if not np.all(np.isfinite(g)):
            raise StatsError("group values must be finite")
    return gs


def midranks(pooled: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    x = np.asarray(pooled, dtype=float)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(x.size)
    sx = x[order]
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _tie_sum(pooled: np.ndarray) -> float:
    _, counts = np.unique(pooled, return_counts=True)
    c = counts.astype(float)
    return float(((c**3) - c).sum())


def chi2_sf(x: float, df: int) -> float:
    """Upper tail of the chi-square distribution."""
    if x <= 0:
        return 1.0
    return float(gammaincc(df / 2.0, x / 2.0))


def normal_sf(z: float) -> float:
    """Upper tail of the standard normal distribution."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def kruskal_wallis(groups) -> KruskalResult:
    """Tie-corrected Kruskal-Wallis H and its chi-square p-value.

    Parameters
    ----------
    groups : sequence of 1-D samples (at least two, each non-empty).
    """
    gs = _check_groups(groups)
    sizes = [g.size for g in gs]
    pooled = np.concatenate(gs)
    n = pooled.size
    ranks = midranks(pooled)
    h = 0.0
    start = 0
    for size in sizes:
        r = ranks[start : start + size]
        h += r.sum() ** 2 / size
        start += size
    h = 12.0 / (n * (n + 1)) * h - 3.0 * (n + 1)
    correction = 1.0 - _tie_sum(pooled) / (n**3 - n)
    if correction <= 0.0:
        return KruskalResult(0.0, 1.0)  # every observation identical
    h /= correction
    h = max(h, 0.0)
    return KruskalResult(float(h), chi2_sf(h, len(gs) - 1))


def dunn_test(groups, adjustment: str = "none") -> DunnResult:
    """Pairwise rank-mean comparisons after Kruskal-Wallis.

    ``z[i, j]`` compares group i against group j with the tie-corrected
    standard error; p-values are two-sided, optionally Bonferroni-adjusted.
    """
    if adjustment not in ("none", "bonferroni"):
        raise StatsError("adjustment must be 'none' or 'bonferroni'")
    gs = _check_groups(groups)
    k = len(gs)
    sizes = np.array([g.size for g in gs], dtype=float)
    pooled = np.concatenate(gs)
    n = pooled.size
    ranks = midranks(pooled)
    mean_rank = np.empty(k)
    start = 0
    for i, size in enumerate(sizes.astype(int)):
        mean_rank[i] = ranks[start : start + size].mean()
        start += size
    base_var = n * (n + 1) / 12.0 - _tie_sum(pooled) / (12.0 * (n - 1)) if n > 1 else 0.0
    z = np.zeros((k, k))
    p = np.ones((k, k))
    m = k * (k - 1) // 2
    for i in range(k):
        for j in range(i + 1, k):
            se = math.sqrt(max(base_var, 0.0) * (1.0 / sizes[i] + 1.0 / sizes[j]))
            zij = 0.0 if se == 0.0 else (mean_rank[i] - mean_rank[j]) / se
            pij = 2.0 * normal_sf(abs(zij))
            if adjustment == "bonferroni":
                pij = min(1.0, pij * m)
            z[i, j], z[j, i] = zij, -zij
            p[i, j] = p[j, i] = min(pij, 1.0)
    for arr in (z, p):
        arr.setflags(write=False)
    return DunnResult(z, p, adjustment)


def compare_methods(named_groups: dict, adjustment: str = "none") -> TestReport:
    """Run the omnibus test and the post-hoc ranking over named samples."""
    names = tuple(named_groups.keys())
    groups = [named_groups[name] for name in names]
    return TestReport(names, kruskal_wallis(groups), dunn_test(groups, adjustment))
