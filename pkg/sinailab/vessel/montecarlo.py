# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Monte Carlo probability that B(M .) falls in a vessel.

The two wings of a two-sided Brownian motion are independent, so the
probability is the product of one program per wing. The blocks of a wing
become consecutive segments of the engine, in real time.
"""

import logging

import numpy as np

from sinailab.confinement.engine import Program, Segment
from sinailab.confinement.estimates import McEstimate, fit_rate
from sinailab.confinement.montecarlo import estimate
from sinailab.utils import as_stream
from sinailab.vessel.spec import vessel_rate_target

__all__ = ["DEFAULT_BAND", "vessel_program", "default_M_grid", "mc_vessel_prob"]

# relative width of the band around -I accepted for the fitted slope
DEFAULT_BAND = 0.35

# largest log-cost h^2 / (2 d) of climbing a barrier in the smallest M
MAX_CLIMB = 3.0

# forecast probabilities below this are refused
MIN_LOG_PROB = -700.0


def vessel_program(vspec, side, M, dt=0.01):
    """Engine program of one wing of B(M .) in the vessel.

    Args:
        vspec (VesselSpec): Vessel.
        side (int): +1 or -1.
        M (float): Scale.
        dt (float): Grid step in real time.

    Returns:
        Program: Segments in time order, or None if the wing has no blocks.

    """
    blocks = vspec.side_blocks(side)
    if not blocks:
        return None
    segments = []
    t = 0.0
    for block in blocks:
        if block.t0 > t + 1e-12:
            segments.append(Segment(M * (block.t0 - t), "raw", name="free"))
        end_lo, end_hi = block.end_window
        segments.append(
            Segment(
                M * block.duration,
                "reflected" if block.reflected else "raw",
                lo=block.lo,
                hi=block.hi,
                vis_lo=block.vis_lo,
                vis_hi=block.vis_hi,
                cap=block.cap,
                set_anchor=block.anchor,
                reset_min=block.reset,
                end_lo=end_lo,
                end_hi=end_hi,
                name=block.name,
            )
        )
        t = block.t1
    return Program(segments, start=0.0, dt=dt)


def default_M_grid(vspec, n_points=3):
    """Scales M, 2M, 4M, .. with M large enough to climb every barrier.

    A barrier of height h over a block of length d is reached in time M d
    with probability about exp(-h^2 / (2 M d)); M is the smallest multiple
    of 50 that keeps this exponent below MAX_CLIMB for every barrier.
    """
    need = max(
        b.h ** 2 / (2 * MAX_CLIMB * b.duration) for b in vspec.blocks() if b.vis_hi is not None
    )
    M = 50 * int(np.ceil(need / 50))
    return [M * 2 ** k for k in range(n_points)]


def mc_vessel_prob(
    vspec,
    M_grid=None,
    n_samples=1000,
    rng=None,
    dt=0.01,
    band=DEFAULT_BAND,
    **kwargs,
):
    """Fit M^-1 log P(B(M .) in the vessel) over M_grid.

    Args:
        vspec (VesselSpec): Vessel.
        M_grid (list): Scales; defaults to default_M_grid(vspec).
        n_samples (int): Paths or particles per wing and scale.
        rng (RandomStream or int): Random stream; scale k uses substream
            2 k for the right wing and 2 k + 1 for the left wing.
        dt (float): Grid step in real time.
        band (float): Accepted relative deviation of the slope from -I.
        **kwargs: Passed to sinailab.confinement.estimate.

    Returns:
        tuple: (RateFit with target -I, dict with the exact vessel rate,
            I, the band and whether the slope lies in it).

    """
    M_grid = default_M_grid(vspec) if M_grid is None else [float(M) for M in M_grid]
    if len(M_grid) < 2:
        raise ValueError(f"need at least two scales, got {M_grid}")
    target = vessel_rate_target(vspec)
    if target["rate"] * max(M_grid) < MIN_LOG_PROB:
        raise ValueError(
            f"the vessel probability at M={max(M_grid):g} is about "
            f"exp({target['rate'] * max(M_grid):.1f}), below exp({MIN_LOG_PROB:g}); "
            "use smaller scales or a cheaper spec"
        )
    costs = {side: -sum(b.cost() for b in vspec.side_blocks(side)) for side in (1, -1)}
    stream = as_stream(rng, "vessel")
    estimates = []
    for k, M in enumerate(M_grid):
        log_p, var, n = 0.0, 0.0, 0
        wings = {}
        for j, side in enumerate((1, -1)):
            program = vessel_program(vspec, side, M, dt)
            if program is None:
                continue
            meta = {"M": M, "side": side}
            est = estimate(
                program, n_samples, stream.substream(2 * k + j),
                forecast=np.exp(costs[side] * M), meta=meta, **kwargs,
            )
            wings[side] = est.to_dict()
            log_p += est.log_estimate
            var += est.log_std_error ** 2
            n += est.n_samples
        est = McEstimate(
            estimate=float(np.exp(log_p)),
            std_error=float(np.exp(log_p) * np.sqrt(var)),
            n_samples=n,
            seed=stream.to_dict(),
            meta={"M": M, "wings": wings},
            log_estimate=float(log_p),
            log_std_error=float(np.sqrt(var)),
        )
        logging.info(
            f"vessel M={M:g}: log P = {est.log_estimate:.3f} +- {est.log_std_error:.3g}, "
            f"exact rate predicts {target['rate'] * M:.3f}"
        )
        estimates.append(est)
    fit = fit_rate(M_grid, estimates, target=-target["I"], variable="M")
    summary = {
        "exact_rate": target["rate"],
        "I": target["I"],
        "band": band,
        "within_band": fit.within(band),
        "blocks": target["blocks"],
    }
    return fit, summary
