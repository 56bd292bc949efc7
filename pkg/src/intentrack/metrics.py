"""Per-step performance indices and simple pooled aggregation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Aggregate:
    n: int
    mean: float
    std: float     # population (divide by n)
    median: float
    q1: float
    q3: float


def prediction_error(means: np.ndarray, reference: np.ndarray) -> float | None:
    """Mean Euclidean distance between forecast means and the reference
    positions over the available horizon; None when no future is left."""
    ref = np.asarray(reference, dtype=float)
    if ref.size == 0:
        return None
    q = min(len(means), len(ref))
    if q == 0:
        return None
    diff = np.asarray(means)[:q] - ref[:q]
    return float(np.linalg.norm(diff, axis=1).mean())


def true_goal_prob(goal_post: np.ndarray, true_goal_id: int) -> float:
    return float(goal_post[true_goal_id])


def alpha_error(alpha_hat: float, alpha_star: float) -> float:
    return abs(float(alpha_hat) - float(alpha_star))


def aggregate(values) -> Aggregate:
    """Pooled summary of a sample; order-invariant. NaNs are excluded."""
    v = np.asarray(list(values), dtype=float)
    v = np.sort(v[~np.isnan(v)])  # fixed summation order: bitwise order-invariant
    if v.size == 0:
        return Aggregate(0, float("nan"), float("nan"), float("nan"), float("nan"), float("nan"))
    q1, med, q3 = np.percentile(v, [25.0, 50.0, 75.0])
    return Aggregate(
        n=int(v.size),
        mean=float(v.mean()),
        std=float(v.std()),
        median=float(med),
        q1=float(q1),
        q3=float(q3),
    )
