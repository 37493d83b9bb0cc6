# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Exponential tightness of the rescaled process of wells.

The probability that m(x_B / M) leaves Q_a is dominated by the first strip,
that is by |x_B(h)| > a M for some h <= 1. On the positive side this needs
the reflected right wing R = B - min B to stay below 1 up to time a M, an
event of probability P(T > a M) for the exit time T of (-1, 1). So

    P(x_B(h) > a M for some h <= 1) = P(T > a M) * P(event | R < 1 on [0, a M]),

and the conditional factor is estimated from right wings drawn by
sequential splitting under the constraint R < 1, with path histories
resampled together with the particles. Each conditioned wing is continued by
free Brownian motion, joined to an independent left wing, and its process of
wells is tested against the strip bound. Symmetry doubles the result.
"""

import logging

import numpy as np
from joblib import Parallel, delayed

from sinailab.confinement.engine import multinomial_resample
from sinailab.confinement.estimates import McEstimate, fit_rate
from sinailab.confinement.kernels import exit_time_survival
from sinailab.env.paths import GridPath
from sinailab.occupation.measure import occupation, tightness_set_check
from sinailab.occupation.step import StepFunction
from sinailab.utils import as_stream
from sinailab.wells.wells import wells_process

__all__ = ["wells_function", "outside_tightness_set", "mc_tightness"]


def wells_function(wp, scale=1.0):
    """The process of wells h -> x(h) / scale as a StepFunction, 0 after max_depth."""
    times = list(wp.depths)
    levels = list(np.asarray(wp.locations) / scale)
    if len(times) and np.isfinite(wp.max_depth):
        times.append(wp.max_depth)
        levels.append(0.0)
    return StepFunction(times, levels, 0.0)


def outside_tightness_set(wp, M, a, horizon=1.0):
    """Whether m(x / M) restricted to [0, horizon] leaves Q_a."""
    mu = occupation(wells_function(wp, M), horizon)
    return not tightness_set_check(mu, a)


def _conditioned_wing(length, n, gen, dt, stage_time):
    """Right wings with R < 1 on [0, length], by splitting with histories.

    Returns:
        ndarray: (n, steps + 1) values of the surviving, resampled wings, or
            None if every particle died.

    """
    steps = max(1, int(np.ceil(length / dt - 1e-9)))
    dt = length / steps
    stage = max(1, int(round(stage_time / dt)))
    hist = np.zeros((n, steps + 1))
    b = np.zeros(n)
    m = np.zeros(n)
    alive = np.ones(n, dtype=bool)
    sq = np.sqrt(dt)
    for s in range(steps):
        bn = b + sq * gen.standard_normal(n)
        d = bn - b
        mx = 0.5 * (b + bn + np.sqrt(d * d - 2.0 * dt * np.log(gen.random(n))))
        mn = 0.5 * (b + bn - np.sqrt(d * d - 2.0 * dt * np.log(gen.random(n))))
        m_new = np.minimum(m, mn)
        # same conservative cell bound as the confinement engine
        alive &= mx - m_new < 1.0
        b, m = bn, m_new
        hist[:, s + 1] = b
        if (s + 1) % stage == 0 or s + 1 == steps:
            n_alive = int(alive.sum())
            if n_alive == 0:
                return None
            idx = np.nonzero(alive)[0][multinomial_resample(n_alive, n, gen)]
            hist, b, m = hist[idx], b[idx], m[idx]
            alive = np.ones(n, dtype=bool)
    return hist


def _replicate(stream, replicate, M, a, n, dt, stage_time, extension):
    gen = stream.generator(replicate)
    wings = _conditioned_wing(a * M, n, gen, dt, stage_time)
    if wings is None:
        return np.nan, 0
    steps = wings.shape[1] - 1
    dt = a * M / steps
    n_ext = int(np.ceil(extension / dt))
    outside, unresolved = 0, 0
    for wing in wings:
        right = np.concatenate(
            [wing, wing[-1] + np.cumsum(np.sqrt(dt) * gen.standard_normal(n_ext))]
        )
        left = np.cumsum(np.sqrt(dt) * gen.standard_normal(n_ext))
        values = np.concatenate([left[::-1], right])
        wp = wells_process(GridPath(dt, n_ext, len(right) - 1, values))
        if wp.resolved_depth < 1.0:
            unresolved += 1
        outside += outside_tightness_set(wp, M, a)
    return outside / n, unresolved


def mc_tightness(
    a=2.0,
    M_grid=(2, 3, 4, 5, 6, 7, 8),
    n_particles=1000,
    rng=None,
    n_replicates=8,
    dt=0.01,
    stage_time=0.25,
    extension=16.0,
    n_jobs=1,
):
    """Fit the decay in M of P(m(x_B / M) outside Q_a).

    Args:
        a (float): Strip bound.
        M_grid (list): Scales.
        n_particles (int): Conditioned wings per replicate.
        rng (RandomStream or int): Random stream; scale k uses substream k.
        n_replicates (int): Independent splitting replicates per scale.
        dt (float): Grid step of the wings.
        stage_time (float): Resampling period.
        extension (float): Free continuation of the right wing and length of
            the left wing.
        n_jobs (int): Parallel workers.

    Returns:
        RateFit: Slope in M with target -a pi^2 / 8.

    """
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    if n_replicates < 2:
        raise ValueError(f"need at least two replicates, got {n_replicates}")
    stream = as_stream(rng, "tightness")
    estimates = []
    for k, M in enumerate(M_grid):
        sub = stream.substream(k)
        results = Parallel(n_jobs=n_jobs)(
            delayed(_replicate)(sub, r, M, a, n_particles, dt, stage_time, extension)
            for r in range(n_replicates)
        )
        fractions = np.array([r[0] for r in results])
        unresolved = sum(r[1] for r in results)
        if unresolved:
            logging.warning(
                f"M={M}: {unresolved} sampled paths do not resolve depth 1; "
                "increase the extension"
            )
        fractions = np.nan_to_num(fractions, nan=0.0)
        survival = exit_time_survival(a * M)
        p_hat = float(fractions.mean())
        se = float(fractions.std(ddof=1) / np.sqrt(n_replicates))
        est = McEstimate(
            estimate=2.0 * survival * p_hat,
            std_error=2.0 * survival * se,
            n_samples=n_particles * n_replicates,
            seed=sub.to_dict(),
            meta={"M": M, "a": a, "survival": survival, "conditional": p_hat},
        )
        logging.info(
            f"M={M}: P(R < 1) = {survival:.4g}, conditional fraction {p_hat:.4g}, "
            f"log P = {est.log_estimate:.4f}"
        )
        estimates.append(est)
    return fit_rate(M_grid, estimates, target=-a * np.pi ** 2 / 8, variable="M")
