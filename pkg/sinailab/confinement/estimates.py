# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Monte Carlo results and exponential rate fits."""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

__all__ = [
    "McEstimate",
    "RateFit",
    "ZeroHitsError",
    "binomial_estimate",
    "replicate_estimate",
    "fit_rate",
]


class ZeroHitsError(RuntimeError):
    """A Monte Carlo cell produced no hits, so its logarithm is undefined."""


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo estimate of a probability.

    Args:
        estimate (float): Point estimate.
        std_error (float): Standard error of the estimate.
        n_samples (int): Number of sampled paths (particles times replicates
            for splitting estimates).
        seed (dict): Random stream the estimate was drawn from.
        meta (dict): Event description.
        log_estimate (float): log(estimate), kept separately because splitting
            estimates can underflow.
        log_std_error (float): Standard error of log(estimate), delta method.
        hits (int): Number of successful paths for plain estimates.

    """

    estimate: float
    std_error: float
    n_samples: int
    seed: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)
    log_estimate: float = None
    log_std_error: float = None
    hits: int = None

    def __post_init__(self):
        if self.n_samples <= 0:
            raise ValueError(f"n_samples must be positive, got {self.n_samples}")
        if self.log_estimate is None:
            log_p = np.log(self.estimate) if self.estimate > 0 else -np.inf
            object.__setattr__(self, "log_estimate", float(log_p))
        if self.log_std_error is None:
            rel = self.std_error / self.estimate if self.estimate > 0 else np.inf
            object.__setattr__(self, "log_std_error", float(rel))

    def to_dict(self):
        return {
            "estimate": float(self.estimate),
            "std_error": float(self.std_error),
            "n_samples": int(self.n_samples),
            "seed": self.seed,
            "meta": self.meta,
            "log_estimate": float(self.log_estimate),
            "log_std_error": float(self.log_std_error),
            "hits": None if self.hits is None else int(self.hits),
        }


def binomial_estimate(hits, n, seed=None, meta=None):
    p = hits / n
    return McEstimate(
        estimate=p,
        std_error=float(np.sqrt(p * (1.0 - p) / n)),
        n_samples=int(n),
        seed=seed or {},
        meta=meta or {},
        hits=int(hits),
    )


def replicate_estimate(log_values, n_per_replicate, seed=None, meta=None):
    """Combine independent unbiased replicates given by their logarithms."""
    log_values = np.asarray(log_values, dtype=np.float64)
    r = len(log_values)
    if np.all(np.isneginf(log_values)):
        return McEstimate(0.0, 0.0, n_per_replicate * r, seed or {}, meta or {}, -np.inf, np.inf, 0)
    log_mean = float(logsumexp(log_values) - np.log(r))
    ratios = np.exp(log_values - log_mean)
    rel_se = float(np.std(ratios, ddof=1) / np.sqrt(r)) if r > 1 else np.inf
    return McEstimate(
        estimate=float(np.exp(log_mean)),
        std_error=float(np.exp(log_mean) * rel_se),
        n_samples=int(n_per_replicate * r),
        seed=seed or {},
        meta=meta or {},
        log_estimate=log_mean,
        log_std_error=rel_se,
    )


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit of log P against a scale parameter.

    Args:
        slope (float): Fitted slope.
        intercept (float): Fitted intercept.
        slope_std_error (float): Standard error of the slope.
        grid (list): Scale parameters (t or M).
        estimates (list): One McEstimate per grid point.
        target (float): Theoretical slope, if any.
        variable (str): Name of the scale parameter.

    """

    slope: float
    intercept: float
    slope_std_error: float
    grid: list
    estimates: list
    target: float = None
    variable: str = "t"

    @property
    def relative_error(self):
        if self.target is None or self.target == 0:
            return None
        return abs(self.slope - self.target) / abs(self.target)

    def within(self, rel_tol):
        return self.relative_error is not None and self.relative_error <= rel_tol

    def to_dict(self):
        return {
            "slope": float(self.slope),
            "intercept": float(self.intercept),
            "slope_std_error": float(self.slope_std_error),
            "grid": [float(x) for x in self.grid],
            "estimates": [e.to_dict() for e in self.estimates],
            "target": None if self.target is None else float(self.target),
            "variable": self.variable,
            "relative_error": self.relative_error,
        }


def fit_rate(grid, estimates, target=None, variable="t"):
    """Weighted least squares of log-estimates on the grid.

    Args:
        grid (array-like): Scale parameters.
        estimates (list): McEstimate per grid point.
        target (float): Theoretical slope to attach.
        variable (str): Name of the scale parameter.

    Returns:
        RateFit: The fit.

    """
    grid = np.asarray(grid, dtype=np.float64)
    if len(grid) != len(estimates) or len(grid) < 2:
        raise ValueError("need at least two grid points with one estimate each")
    for x, est in zip(grid, estimates):
        if not np.isfinite(est.log_estimate):
            raise ZeroHitsError(
                f"no hits at {variable}={x:g} with {est.n_samples} samples; "
                "increase the sample size or use the splitting estimator"
            )
    y = np.array([e.log_estimate for e in estimates])
    sigma = np.array([e.log_std_error for e in estimates])
    if np.all(sigma > 0) and np.all(np.isfinite(sigma)):
        weights = 1.0 / sigma
    else:
        weights = np.ones_like(y)
    if len(grid) == 2:
        slope = (y[1] - y[0]) / (grid[1] - grid[0])
        intercept = y[0] - slope * grid[0]
        var = (sigma[0] ** 2 + sigma[1] ** 2) / (grid[1] - grid[0]) ** 2
        slope_se = float(np.sqrt(var)) if np.all(np.isfinite(sigma)) else np.inf
    else:
        coeffs, cov = np.polyfit(grid, y, 1, w=weights, cov="unscaled")
        slope, intercept = coeffs
        slope_se = float(np.sqrt(cov[0, 0]))
    return RateFit(
        slope=float(slope),
        intercept=float(intercept),
        slope_std_error=slope_se,
        grid=grid.tolist(),
        estimates=list(estimates),
        target=target,
        variable=variable,
    )
