# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Probability that the process of wells does not move between two depths."""

import logging

import numpy as np
from joblib import Parallel, delayed

from sinailab.confinement.estimates import binomial_estimate
from sinailab.env.paths import sample_brownian
from sinailab.utils import as_stream
from sinailab.wells.wells import wells_process

__all__ = ["jump_prob_exact", "mc_jump_prob"]


def jump_prob_exact(ratio):
    """P(x_B(1) = x_B(ratio)) = ratio^-2 (5 - 2 exp(1 - ratio)) / 3.

    Args:
        ratio (float): Depth ratio, at least 1.

    Returns:
        float: Probability.

    """
    if not ratio >= 1:
        raise ValueError(
            f"ratio must be at least 1, got {ratio}; reduce with x_B(ch) = c^2 x_B(h)"
        )
    return float((5.0 - 2.0 * np.exp(1.0 - ratio)) / (3.0 * ratio * ratio))


def _count_block(stream, block, block_size, s, t, dt, n_cells):
    gen = stream.generator(block)
    hits = 0
    unresolved = 0
    for _ in range(block_size):
        path = sample_brownian(dt, n_cells, n_cells, gen)
        wp = wells_process(path)
        if wp.resolved_depth < t:
            unresolved += 1
        x = wp(np.array([s, t]))
        hits += int(x[0] == x[1])
    return hits, unresolved


def mc_jump_prob(
    s,
    t,
    n_samples,
    rng,
    dt=None,
    length_factor=12.0,
    block_size=1000,
    n_jobs=1,
):
    """Monte Carlo estimate of P(x_B(s) = x_B(t)) over Brownian environments.

    Args:
        s (float): Smaller depth.
        t (float): Larger depth.
        n_samples (int): Number of environments.
        rng (RandomStream or int): Random stream.
        dt (float): Grid spacing, defaults to 0.01 s^2.
        length_factor (float): Each wing spans length_factor * t^2.
        block_size (int): Environments per random block.
        n_jobs (int): Parallel workers; the result does not depend on it.

    Returns:
        McEstimate: Binomial estimate.

    """
    if not 0 < s <= t:
        raise ValueError(f"need 0 < s <= t, got s={s}, t={t}")
    stream = as_stream(rng, "jumpprob")
    dt = 0.01 * s * s if dt is None else dt
    n_cells = int(np.ceil(length_factor * t * t / dt))
    n_blocks = -(-int(n_samples) // block_size)
    sizes = [min(block_size, int(n_samples) - b * block_size) for b in range(n_blocks)]
    logging.info(
        f"Sampling {n_samples} environments in {n_blocks} blocks "
        f"({2 * n_cells + 1} grid points each)."
    )
    results = Parallel(n_jobs=n_jobs)(
        delayed(_count_block)(stream, b, sizes[b], s, t, dt, n_cells)
        for b in range(n_blocks)
    )
    hits = sum(r[0] for r in results)
    unresolved = sum(r[1] for r in results)
    if unresolved > 0:
        logging.warning(
            f"{unresolved} environments did not resolve depth {t}; "
            "increase length_factor."
        )
    return binomial_estimate(
        hits,
        int(n_samples),
        seed=stream.to_dict(),
        meta={"s": s, "t": t, "dt": dt, "n_cells": n_cells, "unresolved": unresolved},
    )
