"""Small statistical helpers: intervals, bootstrap, median CIs, line fits."""
from __future__ import annotations

import numpy as np
from scipy import stats as sps


def wilson_interval(successes: int, n: int, level: float = 0.99) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("need n > 0")
    z = sps.norm.ppf(0.5 + level / 2.0)
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def binomial_se(p: float, n: int) -> float:
    return float(np.sqrt(max(p * (1.0 - p), 1e-300) / n))


def bootstrap_ci(values, statistic, n_boot: int, level: float, rng: np.random.Generator):
    """Percentile bootstrap CI of ``statistic`` over resamples of ``values``."""
    values = np.asarray(values)
    n = len(values)
    stats_ = np.empty(n_boot)
    for b in range(n_boot):
        stats_[b] = statistic(values[rng.integers(0, n, size=n)])
    alpha = (1.0 - level) / 2.0
    return float(np.quantile(stats_, alpha)), float(np.quantile(stats_, 1.0 - alpha))


def quantile_ci(samples, q: float = 0.5, level: float = 0.99) -> tuple[float, float, float]:
    """(estimate, lo, hi) for a quantile, via binomial order statistics.

    Conservative distribution-free interval; degenerates to the sample range
    for very small samples.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    if n == 0:
        raise ValueError("empty sample")
    est = float(np.quantile(x, q))
    lo_idx = int(sps.binom.ppf((1.0 - level) / 2.0, n, q))
    hi_idx = int(sps.binom.ppf(0.5 + level / 2.0, n, q))
    lo_idx = min(max(lo_idx, 0), n - 1)
    hi_idx = min(max(hi_idx, lo_idx), n - 1)
    return est, float(x[lo_idx]), float(x[hi_idx])


def fit_line(x, y, level: float = 0.99):
    """Least-squares line fit; returns (slope, intercept, slope_ci)."""
    res = sps.linregress(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    dof = max(len(np.asarray(x)) - 2, 1)
    tcrit = sps.t.ppf(0.5 + level / 2.0, dof)
    half = tcrit * res.stderr
    return res.slope, res.intercept, (res.slope - half, res.slope + half)
