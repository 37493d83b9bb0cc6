# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Monte Carlo decay rates of confinement events and path blocks."""

import logging

import numpy as np

from sinailab.confinement.engine import Program, Segment, run_plain, run_splitting
from sinailab.confinement.estimates import McEstimate, fit_rate
from sinailab.confinement.kernels import (
    confinement_event_prob,
    reflected_confinement_prob,
)
from sinailab.utils import as_stream

__all__ = [
    "EVENTS",
    "BLOCK_KINDS",
    "DEFAULT_M_GRIDS",
    "event_program",
    "event_target",
    "event_exact",
    "estimate",
    "mc_event_prob",
    "mc_rate",
    "mc_floor_ratio",
    "block_program",
    "block_cost_rate",
    "block_target",
    "mc_block_cost",
]

EVENTS = ("a", "b", "c")
BLOCK_KINDS = ("C", "H", "HR", "B", "RC", "RB", "Gamma")

# expected hit count below which plain Monte Carlo is replaced by splitting
MIN_EXPECTED_HITS = 100

# climbing a barrier of height h in time d costs about h^2 / (2 d), which
# swamps the linear rate unless M is large
DEFAULT_M_GRIDS = {
    "C": [2, 3, 4, 5, 6],
    "H": [50, 100, 200],
    "HR": [50, 100, 200],
    "B": [50, 100, 200],
    "RC": [2, 3, 4, 5, 6],
    "RB": [50, 100, 200],
    "Gamma": [50, 100, 200],
}


def event_program(event, t, h=1.0, eps=0.1, w=0.0, z=None, K=1.0, dt=1e-3):
    """Program of a confinement event over [0, t].

    (a) B stays in [0, h] and ends in [eps h, (1 - eps) h], from z.
    (b) R = B - running min stays in [0, h] and ends in [0, (1 - eps) h],
        from R(0) = w.
    (c) as (b), and the running minimum of B stays >= -K.
    """
    if event not in EVENTS:
        raise ValueError(f"unknown event {event!r}, use {EVENTS}")
    if not 0 <= eps < 0.5:
        raise ValueError(f"eps must lie in [0, 1/2), got {eps}")
    if event == "a":
        z = h / 2 if z is None else z
        seg = Segment(t, "raw", lo=0.0, hi=h, end_lo=eps * h, end_hi=(1 - eps) * h, name="a")
        return Program([seg], start=z, dt=dt)
    floor = -K if event == "c" else -np.inf
    seg = Segment(
        t, "reflected", lo=0.0, hi=h, floor=floor, end_hi=(1 - eps) * h, name=event
    )
    return Program([seg], start=w, start_min=0.0, dt=dt)


def event_target(event, h=1.0):
    """Large-t slope of log P for the event."""
    if event == "b":
        return -np.pi ** 2 / (8 * h * h)
    return -np.pi ** 2 / (2 * h * h)


def event_exact(event, t, h=1.0, eps=0.1, w=0.0, z=None):
    """Exact probability of events (a) and (b); None for (c)."""
    if event == "a":
        z = h / 2 if z is None else z
        return float(confinement_event_prob(t, z, eps * h, (1 - eps) * h, h))
    if event == "b":
        return float(reflected_confinement_prob(t, w, (1 - eps) * h, h))
    return None


def estimate(
    program,
    n_samples,
    rng,
    forecast=None,
    method="auto",
    n_replicates=8,
    stage_time=0.25,
    block_size=10000,
    n_jobs=1,
    meta=None,
):
    """Estimate P(program) by plain Monte Carlo or splitting.

    Args:
        program (Program): Event.
        n_samples (int): Paths (plain) or particles per replicate (splitting).
        rng (RandomStream or int): Random stream.
        forecast (float): Forecast probability for method="auto".
        method (str): "auto", "plain" or "splitting".
        n_replicates (int): Splitting replicates.
        stage_time (float): Splitting stage length.
        block_size (int): Paths per plain block.
        n_jobs (int): Parallel workers.
        meta (dict): Event description.

    Returns:
        McEstimate: The estimate.

    """
    if method == "auto":
        expected = n_samples * (forecast if forecast is not None else 1.0)
        method = "plain" if expected >= MIN_EXPECTED_HITS else "splitting"
        logging.debug(f"Forecast {expected:.3g} hits, using {method} Monte Carlo.")
    if method == "plain":
        return run_plain(program, n_samples, rng, block_size, n_jobs, meta)
    if method == "splitting":
        return run_splitting(program, n_samples, rng, n_replicates, stage_time, n_jobs, meta)
    raise ValueError(f"unknown method {method!r}, use auto, plain or splitting")


def mc_event_prob(event, t, n_samples, rng, h=1.0, eps=0.1, w=0.0, z=None, K=1.0,
                  dt=1e-3, **kwargs):
    """Monte Carlo probability of one confinement event at time t."""
    program = event_program(event, t, h, eps, w, z, K, dt)
    exact = event_exact("b" if event == "c" else event, t, h, eps, w, z)
    meta = {"event": event, "t": t, "h": h, "eps": eps, "w": w, "z": z, "K": K}
    return estimate(program, n_samples, rng, forecast=exact, meta=meta, **kwargs)


def mc_rate(event, t_grid, n_samples, rng, h=1.0, eps=0.1, w=0.0, z=None, K=1.0,
            dt=1e-3, **kwargs):
    """Fit the decay rate of a confinement event over t_grid.

    Args:
        event (str): "a", "b" or "c".
        t_grid (array-like): Increasing times.
        n_samples (int): Paths or particles per grid point.
        rng (RandomStream or int): Random stream; point k uses substream k.
        h (float): Interval width.
        eps (float): Terminal margin.
        w (float): Start of R for (b) and (c).
        z (float): Start of B for (a), defaults to h / 2.
        K (float): Floor depth for (c).
        dt (float): Grid step.

    Returns:
        RateFit: Fitted slope with the large-t target.

    """
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be increasing")
    stream = as_stream(rng, f"confine/{event}")
    estimates = []
    for k, t in enumerate(t_grid):
        est = mc_event_prob(
            event, t, n_samples, stream.substream(k), h, eps, w, z, K, dt, **kwargs
        )
        logging.info(
            f"event {event} t={t:g}: P = {est.estimate:.4g} "
            f"(log {est.log_estimate:.4f} +- {est.log_std_error:.3g})"
        )
        estimates.append(est)
    return fit_rate(t_grid, estimates, target=event_target(event, h), variable="t")


def mc_floor_ratio(t_grid, n_samples, rng, h=1.0, eps=0.1, K=1.0, dt=1e-3, **kwargs):
    """Slope of log(P_c / P_b) over t_grid, with target -3 pi^2 / 8."""
    stream = as_stream(rng, "confine/ratio")
    ratios = []
    for k, t in enumerate(t_grid):
        pb = mc_event_prob("b", t, n_samples, stream.substream(2 * k), h, eps, 0.0, None, K, dt, **kwargs)
        pc = mc_event_prob("c", t, n_samples, stream.substream(2 * k + 1), h, eps, 0.0, None, K, dt, **kwargs)
        log_ratio = pc.log_estimate - pb.log_estimate
        ratios.append(
            McEstimate(
                estimate=float(np.exp(log_ratio)),
                std_error=float(np.exp(log_ratio) * np.hypot(pc.log_std_error, pb.log_std_error)),
                n_samples=pb.n_samples + pc.n_samples,
                seed=stream.to_dict(),
                meta={"t": float(t), "K": K, "b": pb.to_dict(), "c": pc.to_dict()},
                log_estimate=float(log_ratio),
                log_std_error=float(np.hypot(pc.log_std_error, pb.log_std_error)),
            )
        )
    target = event_target("c", h) - event_target("b", h)
    return fit_rate(t_grid, ratios, target=target, variable="t")


def block_program(kind, M, x=0.0, y=1.0, h=1.0, h2=2.0, eps=0.1, delta=0.05,
                  z=0.0, z2=0.0, dt=0.01):
    """Program of B(M .) in one block, in real time.

    C(x, y, h) runs on [x(1 + delta), y(1 - delta)] in [-eps^2 h, h];
    H(y, h) on [y(1 - delta), y] in [-eps h, h], visiting below
    -eps h + eps^2 h; HR(y, h) keeps R in [0, h] and visits 0; B(y, h2) on
    [y, y(1 + delta)] in [-eps^2 h2, h2 (1 + eps)], visiting above h2. RC and
    RB are C and B for R. Gamma chains RC, HR, RB with
    f - f(x(1 + delta)) <= eps^2 throughout.

    Args:
        kind (str): One of BLOCK_KINDS.
        M (float): Scale.
        x (float): Left time.
        y (float): Right time.
        h (float): Height (h1 for Gamma).
        h2 (float): Barrier height for B, RB and Gamma.
        eps (float): Margin.
        delta (float): Relative block length.
        z (float): Start of f, or of R for reflected kinds.
        z2 (float): Start of f for Gamma (R starts at z).
        dt (float): Grid step.

    """
    if kind not in BLOCK_KINDS:
        raise ValueError(f"unknown block kind {kind!r}, use {BLOCK_KINDS}")
    if not 0 <= x < y:
        raise ValueError(f"need 0 <= x < y, got x={x}, y={y}")
    if kind in ("B", "RB", "Gamma") and not h < h2:
        raise ValueError(f"need h < h2, got h={h}, h2={h2}")
    conf = M * (y * (1 - delta) - x * (1 + delta))
    short = M * delta * y
    if kind in ("C", "RC", "Gamma") and not conf > 0:
        raise ValueError(f"confinement stretch is empty for x={x}, y={y}, delta={delta}")
    if kind == "C":
        segs = [Segment(conf, "raw", lo=-eps ** 2 * h, hi=h, name="C")]
    elif kind == "H":
        segs = [Segment(short, "raw", lo=-eps * h, hi=h, vis_lo=-eps * h + eps ** 2 * h, name="H")]
    elif kind == "HR":
        segs = [Segment(short, "reflected", lo=0.0, hi=h, vis_lo=0.0, name="HR")]
    elif kind == "B":
        segs = [Segment(short, "raw", lo=-eps ** 2 * h2, hi=h2 * (1 + eps), vis_hi=h2, name="B")]
    elif kind == "RC":
        segs = [Segment(conf, "reflected", lo=0.0, hi=h, name="RC")]
    elif kind == "RB":
        segs = [Segment(short, "reflected", lo=0.0, hi=h2 * (1 + eps), vis_hi=h2, name="RB")]
    else:
        cap = eps ** 2
        segs = [
            Segment(conf, "reflected", lo=0.0, hi=h, cap=cap, set_anchor=True, name="RC"),
            Segment(short, "reflected", lo=0.0, hi=h, vis_lo=0.0, cap=cap, name="HR"),
            Segment(short, "reflected", lo=0.0, hi=h2 * (1 + eps), vis_hi=h2, cap=cap, name="RB"),
        ]
    if kind in ("HR", "RC", "RB"):
        return Program(segs, start=z, start_min=0.0, dt=dt)
    if kind == "Gamma":
        return Program(segs, start=z2, start_min=z2 - z, dt=dt)
    return Program(segs, start=z, dt=dt)


def block_cost_rate(kind, h, eps):
    """Decay rate per unit time of a single block of height h.

    The effective width of the allowed strip is h (1 + eps^2) for C,
    h (1 + eps) for H and h (1 + eps + eps^2) for B; reflected blocks pay
    pi^2 / 8 instead of pi^2 / 2.
    """
    two = np.pi ** 2 / (2 * h * h)
    one = np.pi ** 2 / (8 * h * h)
    rates = {
        "C": two / (1 + eps ** 2) ** 2,
        "H": two / (1 + eps) ** 2,
        "B": two / (1 + eps + eps ** 2) ** 2,
        "RC": one,
        "HR": one,
        "RB": one / (1 + eps) ** 2,
    }
    if kind not in rates:
        raise ValueError(f"no single-block cost for kind {kind!r}")
    return rates[kind]


def block_target(kind, x=0.0, y=1.0, h=1.0, h2=2.0, eps=0.1, delta=0.05):
    """Limit of M^-1 log P(B(M .) in block)."""
    if kind not in BLOCK_KINDS:
        raise ValueError(f"unknown block kind {kind!r}, use {BLOCK_KINDS}")
    conf = y - x - delta * (x + y)
    short = delta * y
    if kind in ("C", "RC"):
        return -block_cost_rate(kind, h, eps) * conf
    if kind in ("H", "HR"):
        return -block_cost_rate(kind, h, eps) * short
    if kind in ("B", "RB"):
        return -block_cost_rate(kind, h2, eps) * short
    return -(
        block_cost_rate("RC", h, eps) * conf
        + block_cost_rate("HR", h, eps) * short
        + block_cost_rate("RB", h2, eps) * short
    )


def mc_block_cost(kind, n_samples, rng, M_grid=None, x=0.0, y=1.0, h=1.0, h2=2.0,
                  eps=0.1, delta=0.05, z=0.0, z2=0.0, dt=0.01, **kwargs):
    """Fit M^-1 log P(B(M .) in block) over M_grid.

    Returns:
        RateFit: Slope in M with the closed-form target.

    """
    M_grid = DEFAULT_M_GRIDS[kind] if M_grid is None else M_grid
    target = block_target(kind, x, y, h, h2, eps, delta)
    stream = as_stream(rng, f"blocks/{kind}")
    estimates = []
    for k, M in enumerate(M_grid):
        program = block_program(kind, M, x, y, h, h2, eps, delta, z, z2, dt)
        meta = {"kind": kind, "M": M, "x": x, "y": y, "h": h, "h2": h2,
                "eps": eps, "delta": delta}
        est = estimate(program, n_samples, stream.substream(k),
                       forecast=np.exp(target * M), meta=meta, **kwargs)
        logging.info(f"block {kind} M={M}: log P = {est.log_estimate:.4f}")
        estimates.append(est)
    return fit_rate(M_grid, estimates, target=target, variable="M")
