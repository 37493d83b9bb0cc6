# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Site probabilities and step potentials of Sinai's walk."""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import stats

from sinailab.env.paths import GridPath
from sinailab.utils import RandomStream

__all__ = [
    "StepPotential",
    "EnvDistribution",
    "potential_from_probs",
    "potential_from_values",
    "sample_env",
]

# sites per counter block when drawing an environment
_SITE_BLOCK = 1024

ENV_KINDS = ("brownian", "iid-log-odds")
LOG_ODDS_LAWS = ("two-point", "truncated-gaussian")


@dataclass(frozen=True, eq=False)
class StepPotential:
    """Step potential V built from site probabilities.

    The walk at site k steps right with probability p_k. The potential is
    pinned by V(0) = 0 and V(k) - V(k - 1) = log((1 - p_k) / p_k) for every
    site k carrying a probability, so V is defined on first_site - 1 .. last_site.

    Args:
        first_site (int): Site of probs[0] (at most 1).
        probs (ndarray): Right-step probabilities of consecutive sites.

    """

    first_site: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64)
        if probs.ndim != 1 or len(probs) == 0:
            raise ValueError("probs must be a non-empty sequence")
        if not np.all((probs > 0.0) & (probs < 1.0)):
            bad = probs[~((probs > 0.0) & (probs < 1.0))]
            raise ValueError(f"site probabilities must lie in (0, 1), got {bad[:5]}")
        first_site = int(self.first_site)
        if first_site > 1 or first_site + len(probs) - 1 < 0:
            raise ValueError(
                f"sites {first_site}..{first_site + len(probs) - 1} "
                "do not reach the origin"
            )
        probs.setflags(write=False)
        object.__setattr__(self, "first_site", first_site)
        object.__setattr__(self, "probs", probs)

    @property
    def last_site(self):
        return self.first_site + len(self.probs) - 1

    @property
    def left_n(self):
        """Number of potential sites left of the origin."""
        return 1 - self.first_site

    @property
    def right_n(self):
        return self.last_site

    @property
    def log_odds(self):
        return np.log1p(-self.probs) - np.log(self.probs)

    @property
    def values(self):
        cum = np.concatenate([[0.0], np.cumsum(self.log_odds)])
        return cum - cum[self.left_n]

    @property
    def sites(self):
        return np.arange(self.first_site - 1, self.last_site + 1)

    def V(self, k):
        return self.values[np.asarray(k) + self.left_n]

    def prob(self, k):
        return self.probs[np.asarray(k) - self.first_site]

    def as_path(self):
        """The potential as a unit-spaced GridPath (linear between sites)."""
        values = self.values.copy()
        values[self.left_n] = 0.0
        return GridPath(1.0, self.left_n, self.right_n, values)

    def __repr__(self):
        return f"StepPotential(sites={self.first_site}..{self.last_site})"


def potential_from_probs(probs, first_site=1):
    """Build the step potential of a sequence of site probabilities.

    Args:
        probs (array-like): p_k for consecutive sites.
        first_site (int): Site of probs[0]; 1 gives the one-sided potential on 0..n.

    Returns:
        StepPotential: The potential.

    """
    return StepPotential(first_site, probs)


def potential_from_values(values, origin):
    """Inverse construction: the probabilities whose potential is `values`.

    Args:
        values (array-like): V on consecutive sites, values[origin] = 0.
        origin (int): Index of site 0 in `values`.

    """
    values = np.asarray(values, dtype=np.float64)
    if values[origin] != 0.0:
        raise ValueError("potential must vanish at the origin")
    log_odds = np.diff(values)
    probs = 1.0 / (1.0 + np.exp(log_odds))
    return StepPotential(1 - origin, probs)


@dataclass(frozen=True)
class EnvDistribution:
    """Law of the environment.

    kind="brownian" draws standard Gaussian log-odds, so V is a Gaussian
    random walk. kind="iid-log-odds" draws log-odds from `law`, rescaled to
    mean 0 and variance 1.

    Args:
        kind (str): "brownian" or "iid-log-odds".
        law (str): "two-point" or "truncated-gaussian" for iid-log-odds.
        cutoff (float): Truncation point of the truncated Gaussian, in units
            of its underlying standard deviation.

    """

    kind: str = "iid-log-odds"
    law: str = "two-point"
    cutoff: float = 2.0

    def __post_init__(self):
        if self.kind not in ENV_KINDS:
            raise ValueError(f"unknown environment kind {self.kind!r}, use {ENV_KINDS}")
        if self.kind == "iid-log-odds" and self.law not in LOG_ODDS_LAWS:
            raise ValueError(f"unknown log-odds law {self.law!r}, use {LOG_ODDS_LAWS}")
        if not self.cutoff > 0:
            raise ValueError(f"cutoff must be positive, got {self.cutoff}")

    def sample_log_odds(self, gen, size):
        if self.kind == "brownian":
            return gen.standard_normal(size)
        if self.law == "two-point":
            return np.where(gen.random(size) < 0.5, -1.0, 1.0)
        c = self.cutoff
        scale = 1.0 / np.sqrt(stats.truncnorm.var(-c, c))
        return stats.truncnorm.rvs(-c, c, scale=scale, size=size, random_state=gen)


def sample_env(dist, n, rng):
    """Sample site probabilities on -n..n and return their potential.

    Sites are drawn in counter blocks indexed by site, so enlarging n keeps the
    values already drawn for the inner sites.

    Args:
        dist (EnvDistribution): Environment law.
        n (int): Sites per side.
        rng (RandomStream): Random stream.

    Returns:
        StepPotential: Potential on -n-1..n.

    """
    if int(n) < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    n = int(n)
    if not isinstance(rng, RandomStream):
        raise ValueError("sample_env needs a RandomStream for site-indexed draws")
    n_blocks = -(-(n + 1) // _SITE_BLOCK)
    right = np.concatenate(
        [dist.sample_log_odds(rng.generator(2 * b), _SITE_BLOCK) for b in range(n_blocks)]
    )[: n + 1]
    left = np.concatenate(
        [dist.sample_log_odds(rng.generator(2 * b + 1), _SITE_BLOCK) for b in range(n_blocks)]
    )[:n]
    # right[j] is site j, left[j] is site -j - 1
    log_odds = np.concatenate([left[::-1], right])
    probs = 1.0 / (1.0 + np.exp(log_odds))
    logging.debug(f"Sampled {len(probs)} sites from {dist}.")
    return StepPotential(-n, probs)
