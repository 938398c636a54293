"""Seeded synthetic instances for experiments and tests, plus ROC helpers."""

from __future__ import annotations

import numpy as np

from .path import Path

__all__ = [
    "spiked_covariance",
    "planted_regression",
    "gaussian_frame",
    "orthonormal_frame",
    "roc_points",
    "roc_auc",
]


def spiked_covariance(n: int, strength: float, rng: np.random.Generator):
    """Noise Gram matrix plus a rank-one spike with a two-tier support.

    The spike vector has n//3 entries equal to 1, the next n//3 decaying
    as 1/j, and the rest zero; the base is U'U with U uniform on [0, 1).
    Returns ``(sigma, support)`` where support indexes the nonzero spike
    entries.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    u = rng.uniform(0.0, 1.0, size=(n, n))
    m1, m2 = n // 3, 2 * (n // 3)
    v = np.zeros(n)
    v[:m1] = 1.0
    v[m1:m2] = 1.0 / np.arange(1, m2 - m1 + 1)
    sigma = u.T @ u + strength * np.outer(v, v)
    sigma = 0.5 * (sigma + sigma.T)
    return sigma, tuple(range(m2))


def planted_regression(
    n: int,
    p: int,
    k: int,
    noise: float,
    rng: np.random.Generator,
):
    """Gaussian design with a sparse planted coefficient vector.

    Coefficient magnitudes are drawn uniformly from [1, 2] with random
    signs so the support is well separated from zero.  Returns
    ``(X, y, support)``.
    """
    if not 1 <= k <= n:
        raise ValueError("k must be between 1 and n")
    X = rng.standard_normal((p, n))
    support = np.sort(rng.choice(n, size=k, replace=False))
    w = np.zeros(n)
    w[support] = rng.uniform(1.0, 2.0, size=k) * rng.choice([-1.0, 1.0], size=k)
    y = X @ w + noise * rng.standard_normal(p)
    return X, y, tuple(int(i) for i in support)


def gaussian_frame(p: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """p x m matrix with iid N(0, 1/p) entries (columns near unit norm)."""
    return rng.standard_normal((p, m)) / np.sqrt(p)


def orthonormal_frame(p: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """p x m matrix with exactly orthonormal columns (requires p >= m)."""
    if p < m:
        raise ValueError("p must be at least m")
    q, _ = np.linalg.qr(rng.standard_normal((p, m)))
    return q[:, :m]


def roc_points(path: Path, support, n: int) -> np.ndarray:
    """(false positive rate, true positive rate) per path point, with endpoints."""
    true = set(int(i) for i in support)
    negatives = n - len(true)
    pts = [(0.0, 0.0)]
    for pt in path.points:
        sel = set(pt.indices)
        tp = len(sel & true) / max(1, len(true))
        fp = len(sel - true) / max(1, negatives)
        pts.append((fp, tp))
    pts.append((1.0, 1.0))
    arr = np.array(sorted(pts))
    return arr


def roc_auc(path: Path, support, n: int) -> float:
    """Area under the selection-path ROC curve."""
    pts = roc_points(path, support, n)
    return float(np.trapezoid(pts[:, 1], pts[:, 0]))
