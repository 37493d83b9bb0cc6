# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""The hitting time T that paces the walk inside its diffusion.

Run in a step potential, the diffusion crosses from one integer site to a
neighbour after times that are i.i.d. copies of T, the first hitting time
of 1 by reflected Brownian motion (equivalently the exit time of (-1, 1)),
and the sites it visits form Sinai's walk. T is sampled by inverting its
survival function; the embedding is checked with a lattice diffusion that
is skewed at the integer sites.
"""

import logging

import numpy as np
from joblib import Parallel, delayed
from numba import njit
from scipy import stats

from sinailab.confinement.kernels import exit_time_survival
from sinailab.utils import as_stream
from sinailab.walk.walk import _CHUNK, WindowExceededError, _walk_chunk

__all__ = [
    "HittingTimeSampler",
    "sample_T",
    "tail_slope",
    "inverse_tail_check",
    "embedded_walk",
    "embedding_check",
]

TAIL_RATE = np.pi ** 2 / 8


class HittingTimeSampler(object):
    """Inverse-CDF sampler of T.

    The survival S(t) = P(T > t) is tabulated on a geometric grid of
    [t_min, t_max]; draws are interpolated in log S. Beyond t_max the
    leading term (4 / pi) exp(-pi^2 t / 8) of the series is inverted
    exactly.

    Args:
        t_min (float): Smallest tabulated time.
        t_max (float): Largest tabulated time.
        n_table (int): Table size.

    """

    def __init__(self, t_min=1e-3, t_max=40.0, n_table=4000):
        if not 0 < t_min < t_max:
            raise ValueError(f"need 0 < t_min < t_max, got {t_min}, {t_max}")
        self.t = np.geomspace(t_min, t_max, int(n_table))
        survival = exit_time_survival(self.t)
        # the table is decreasing; round-off near t_min can leave S = 1
        keep = np.concatenate([[True], np.diff(survival) < 0])
        self.t, self.survival = self.t[keep], survival[keep]
        self.log_survival = np.log(self.survival)

    def cdf(self, t):
        return 1.0 - exit_time_survival(np.maximum(np.asarray(t, dtype=np.float64), 0.0))

    def invert(self, u):
        """T with P(T > T(u)) = u, for u in (0, 1)."""
        u = np.asarray(u, dtype=np.float64)
        log_u = np.log(u)
        out = np.interp(log_u, self.log_survival[::-1], self.t[::-1])
        tail = u < self.survival[-1]
        out[tail] = np.log(4.0 / (np.pi * u[tail])) / TAIL_RATE
        return out

    def sample(self, gen, size):
        # 1 - random() lies in (0, 1]
        return self.invert(1.0 - gen.random(size))

    def __repr__(self):
        return f"HittingTimeSampler(t=[{self.t[0]:g}, {self.t[-1]:g}], n={len(self.t)})"


def sample_T(sampler, rng, size=None, block_size=100000):
    """Draw T; block b of the draws uses generator(b).

    Args:
        sampler (HittingTimeSampler): Table.
        rng (RandomStream or int): Random stream.
        size (int): Number of draws; None for a single float.

    Returns:
        float or ndarray: Draws.

    """
    stream = as_stream(rng, "hitting")
    n = 1 if size is None else int(size)
    n_blocks = -(-n // block_size)
    draws = np.concatenate(
        [
            sampler.sample(stream.generator(b), min(block_size, n - b * block_size))
            for b in range(n_blocks)
        ]
    )
    return float(draws[0]) if size is None else draws


def tail_slope(samples, t_grid=None):
    """Slope of log P(T > t) over t_grid from samples, with target -pi^2 / 8.

    Returns:
        dict: Slope, target, relative error and the empirical survival.

    """
    t_grid = np.linspace(2.0, 6.0, 9) if t_grid is None else np.asarray(t_grid, dtype=np.float64)
    samples = np.sort(np.asarray(samples, dtype=np.float64))
    tail = 1.0 - np.searchsorted(samples, t_grid, side="right") / len(samples)
    if np.any(tail <= 0):
        raise ValueError(
            f"no samples beyond t={t_grid[tail <= 0][0]:g}; draw more or shorten t_grid"
        )
    slope = float(np.polyfit(t_grid, np.log(tail), 1)[0])
    return {
        "slope": slope,
        "target": -TAIL_RATE,
        "relative_error": abs(slope + TAIL_RATE) / TAIL_RATE,
        "t": t_grid.tolist(),
        "survival": tail.tolist(),
    }


def inverse_tail_check(samples, x_grid=None, c=2.0):
    """Empirical P(1/T > x) against the bound c exp(-x / 2)."""
    x_grid = np.arange(1.0, 13.0) if x_grid is None else np.asarray(x_grid, dtype=np.float64)
    inv = 1.0 / np.asarray(samples, dtype=np.float64)
    emp = np.array([np.mean(inv > x) for x in x_grid])
    bound = c * np.exp(-x_grid / 2.0)
    return {
        "x": x_grid.tolist(),
        "empirical": emp.tolist(),
        "bound": bound.tolist(),
        "passed": bool(np.all(emp <= bound)),
    }


@njit(cache=True)
def _lattice_chunk(probs, first_site, m, u, lat, k0, steps, hits, positions, times):
    n = len(positions)
    for j in range(len(u)):
        if hits >= n:
            return lat, k0, steps, hits, 0
        if lat % m == 0:
            k = lat // m
            if k < first_site or k - first_site >= len(probs):
                return lat, k0, steps, hits, 1
            p = probs[k - first_site]
        else:
            p = 0.5
        if u[j] < p:
            lat += 1
        else:
            lat -= 1
        steps += 1
        if abs(lat - m * k0) == m:
            k0 = lat // m
            positions[hits] = k0
            times[hits] = steps / (m * m)
            hits += 1
            steps = 0
    return lat, k0, steps, hits, 0


def embedded_walk(pot, n_steps, rng, m=16):
    """Sites and crossing times of a lattice diffusion in the potential.

    The lattice walk has spacing 1 / m and time step 1 / m^2. Off the
    integers it is symmetric; at site k it steps right with probability
    p_k, so it leaves (k - 1, k + 1) through k + 1 with probability p_k.

    Args:
        pot (StepPotential): Environment.
        n_steps (int): Number of integer crossings.
        rng (RandomStream or int): Random stream; chunk c uses generator(c).
        m (int): Lattice refinement.

    Returns:
        tuple: (sites X(t_1), .., X(t_n), increments t_k - t_{k-1}).

    """
    stream = as_stream(rng, "embedded")
    probs = np.ascontiguousarray(pot.probs)
    positions = np.zeros(int(n_steps), dtype=np.int64)
    times = np.zeros(int(n_steps))
    lat, k0, steps, hits, chunk = 0, 0, 0, 0, 0
    while hits < n_steps:
        u = stream.generator(chunk).random(_CHUNK)
        lat, k0, steps, hits, status = _lattice_chunk(
            probs, pot.first_site, m, u, lat, k0, steps, hits, positions, times
        )
        if status:
            raise WindowExceededError(
                f"embedded walk reached site {lat // m} outside "
                f"{pot.first_site}..{pot.last_site} after {hits} crossings"
            )
        chunk += 1
    return positions, times


def _direct_position(pot, n, stream):
    probs = np.ascontiguousarray(pot.probs)
    out = np.zeros(1, dtype=np.int64)
    head = np.zeros(1, dtype=np.int64)
    ckpt = np.array([n], dtype=np.int64)
    pos, done, ci, chunk = 0, 0, 0, 0
    while ci < 1:
        u = stream.generator(chunk).random(min(_CHUNK, n - done))
        pos, done, ci, status = _walk_chunk(probs, pot.first_site, pos, done, u, ckpt, ci, out, head)
        if status:
            raise WindowExceededError(f"walk reached site {pos} outside {pot.first_site}..{pot.last_site}")
        chunk += 1
    return int(out[0])


def _replica(pot, n, stream, r, m):
    direct = _direct_position(pot, n, stream.substream(f"direct/{r}"))
    sites, times = embedded_walk(pot, n, stream.substream(f"embedded/{r}"), m)
    return direct, int(sites[-1]), float(times[0]), float(times.mean())


def embedding_check(pot, n=1000, n_replicas=2000, rng=None, m=16, n_bins=10, n_jobs=1):
    """Compare S(n) of the walk with the site of the embedded diffusion.

    Positions after n steps are binned on pooled quantiles and compared by
    a chi-square test of homogeneity. The first crossing time of every
    replica is compared with the law of T by a Kolmogorov-Smirnov test.

    Returns:
        dict: chi-square p-value, KS p-value and the mean crossing time.

    """
    stream = as_stream(rng, "embedding")
    rows = Parallel(n_jobs=n_jobs)(
        delayed(_replica)(pot, int(n), stream, r, m) for r in range(int(n_replicas))
    )
    direct = np.array([row[0] for row in rows])
    embedded = np.array([row[1] for row in rows])
    pooled = np.concatenate([direct, embedded])
    edges = np.unique(np.quantile(pooled, np.linspace(0.0, 1.0, n_bins + 1)))
    edges[-1] += 1
    table = np.stack([np.histogram(direct, edges)[0], np.histogram(embedded, edges)[0]])
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        p_chi2 = 1.0
    else:
        p_chi2 = float(stats.chi2_contingency(table)[1])
    first = np.array([row[2] for row in rows])
    sampler = HittingTimeSampler()
    p_ks = float(stats.kstest(first, sampler.cdf).pvalue)
    mean_time = float(np.mean([row[3] for row in rows]))
    logging.info(
        f"Embedding: chi-square p = {p_chi2:.3g}, KS p = {p_ks:.3g}, "
        f"mean crossing time {mean_time:.4f}"
    )
    return {
        "chi2_p": p_chi2,
        "ks_p": p_ks,
        "mean_time": mean_time,
        "n": int(n),
        "n_replicas": int(n_replicas),
        "passed": p_chi2 > 0.01,
    }
