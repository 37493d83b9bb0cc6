# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Monte Carlo engine for Brownian paths passing a sequence of constraints.

A Program is a list of Segments run one after another. On a segment the
observed process Y is either the path f itself (mode "raw") or f minus its
running minimum (mode "reflected"). Paths are advanced on a grid of step
dt; inside every cell the minimum and maximum of the Brownian bridge are
drawn exactly, so interval constraints are checked between grid points as
well. Their order inside the cell is not drawn: the reflected process is
bounded by the cell maximum minus the updated running minimum, which can
only kill a path that the exact order would keep.

Two estimators share the kernel: plain Monte Carlo over fixed blocks of
paths, and sequential splitting, where surviving particles are resampled
multinomially at stage boundaries and the estimate is the product of the
stage survival fractions.
"""

import logging
from dataclasses import asdict, dataclass, field

import numpy as np
from joblib import Parallel, delayed
from numba import njit

from sinailab.confinement.estimates import binomial_estimate, replicate_estimate
from sinailab.utils import as_stream

__all__ = ["Segment", "Program", "multinomial_resample", "run_plain", "run_splitting"]

MODES = ("raw", "reflected")

# survivor fraction below which a splitting stage is reported
LOW_SURVIVAL = 0.05

# random numbers drawn per kernel call, per kind
CHUNK_CELLS = 1 << 21


@dataclass(frozen=True)
class Segment:
    """Constraints of the observed process Y over a stretch of time.

    Args:
        dur (float): Duration.
        mode (str): "raw" (Y = f) or "reflected" (Y = f - running min).
        lo (float): Y stays >= lo.
        hi (float): Y stays <= hi.
        vis_lo (float): Y must reach vis_lo or below, if given.
        vis_hi (float): Y must reach vis_hi or above, if given.
        floor (float): Running minimum of f stays >= floor.
        cap (float): f - anchor stays <= cap.
        set_anchor (bool): Anchor := f at the start of the segment.
        reset_min (bool): Running min := f at the start of the segment.
        end_lo (float): Y at the end >= end_lo.
        end_hi (float): Y at the end <= end_hi.
        name (str): Label for reports.

    """

    dur: float
    mode: str = "raw"
    lo: float = -np.inf
    hi: float = np.inf
    vis_lo: float = None
    vis_hi: float = None
    floor: float = -np.inf
    cap: float = np.inf
    set_anchor: bool = False
    reset_min: bool = False
    end_lo: float = -np.inf
    end_hi: float = np.inf
    name: str = ""

    def __post_init__(self):
        if not self.dur > 0:
            raise ValueError(f"segment duration must be positive, got {self.dur}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}, use {MODES}")
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got {self.lo}, {self.hi}")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Program:
    """Segments run in order from f = start with running minimum start_min.

    Args:
        segments (list): Segments.
        start (float): Initial value of f.
        start_min (float): Initial running minimum (defaults to start).
        dt (float): Largest grid step.

    """

    segments: list = field(default_factory=list)
    start: float = 0.0
    start_min: float = None
    dt: float = 0.01

    def __post_init__(self):
        if len(self.segments) == 0:
            raise ValueError("a program needs at least one segment")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.start_min is not None and self.start_min > self.start:
            raise ValueError("running minimum cannot exceed the start value")

    @property
    def duration(self):
        return float(sum(s.dur for s in self.segments))

    def steps(self, segment):
        return max(1, int(np.ceil(segment.dur / self.dt - 1e-9)))


def multinomial_resample(n_alive, n, gen):
    """Indices of n offspring drawn uniformly from n_alive survivors."""
    counts = gen.multinomial(n, np.full(n_alive, 1.0 / n_alive))
    return np.repeat(np.arange(n_alive), counts)


@njit(cache=True)
def _advance(f, m, anchor, vlo, vhi, alive, z, u_min, u_max, dt, reflected,
             lo, hi, vis_lo, vis_hi, floor, cap):
    sq = np.sqrt(dt)
    n_steps, n = z.shape
    for s in range(n_steps):
        for p in range(n):
            if not alive[p]:
                continue
            a = f[p]
            b = a + sq * z[s, p]
            d = b - a
            mn = 0.5 * (a + b - np.sqrt(d * d - 2.0 * dt * np.log(u_min[s, p])))
            mx = 0.5 * (a + b + np.sqrt(d * d - 2.0 * dt * np.log(u_max[s, p])))
            m_old = m[p]
            m_new = min(m_old, mn)
            if reflected:
                y_min = mn - m_old if mn > m_old else 0.0
                # as if the cell minimum came before its maximum
                y_max = mx - m_new
            else:
                y_min = mn
                y_max = mx
            if y_min < lo or y_max > hi or m_new < floor or mx - anchor[p] > cap:
                alive[p] = False
                continue
            if y_min <= vis_lo:
                vlo[p] = True
            if y_max >= vis_hi:
                vhi[p] = True
            f[p] = b
            m[p] = m_new


class _Population(object):
    """Particle state: path value, running min, anchor and visit flags."""

    def __init__(self, n, start, start_min):
        self.f = np.full(n, float(start))
        self.m = np.full(n, float(start if start_min is None else start_min))
        self.anchor = np.full(n, float(start))
        self.vlo = np.zeros(n, dtype=np.bool_)
        self.vhi = np.zeros(n, dtype=np.bool_)
        self.alive = np.ones(n, dtype=np.bool_)

    def begin(self, seg):
        if seg.set_anchor:
            self.anchor[:] = self.f
        if seg.reset_min:
            self.m[:] = self.f
        self.vlo[:] = False
        self.vhi[:] = False

    def advance(self, seg, dt, z, u_min, u_max):
        _advance(
            self.f, self.m, self.anchor, self.vlo, self.vhi, self.alive,
            z, u_min, u_max, dt, seg.mode == "reflected",
            seg.lo, seg.hi,
            -np.inf if seg.vis_lo is None else seg.vis_lo,
            np.inf if seg.vis_hi is None else seg.vis_hi,
            seg.floor, seg.cap,
        )

    def finish(self, seg):
        y = self.f - self.m if seg.mode == "reflected" else self.f
        ok = (y >= seg.end_lo) & (y <= seg.end_hi)
        if seg.vis_lo is not None:
            ok &= self.vlo
        if seg.vis_hi is not None:
            ok &= self.vhi
        self.alive &= ok

    def select(self, idx):
        for name in ("f", "m", "anchor", "vlo", "vhi", "alive"):
            setattr(self, name, getattr(self, name)[idx].copy())


def _simulate(program, n, gen, stage_time=None):
    """Run n particles through the program.

    Without stage_time every path runs independently and the number of
    survivors is returned. With stage_time the population is resampled at
    every stage boundary and the log of the splitting estimate is returned.
    """
    pop = _Population(n, program.start, program.start_min)
    log_p = 0.0
    for seg in program.segments:
        pop.begin(seg)
        steps = program.steps(seg)
        dt = seg.dur / steps
        chunk = steps if stage_time is None else max(1, int(round(stage_time / dt)))
        done = 0
        while done < steps:
            k = min(chunk, steps - done)
            for sub in range(0, k, max(1, CHUNK_CELLS // n)):
                j = min(max(1, CHUNK_CELLS // n), k - sub)
                z = gen.standard_normal((j, n))
                u_min = gen.random((j, n))
                u_max = gen.random((j, n))
                pop.advance(seg, dt, z, u_min, u_max)
            done += k
            if done == steps:
                pop.finish(seg)
            if stage_time is None:
                continue
            n_alive = int(pop.alive.sum())
            if n_alive == 0:
                logging.debug(f"All particles died in segment {seg.name!r}.")
                return -np.inf
            if n_alive < LOW_SURVIVAL * n:
                logging.debug(
                    f"Only {n_alive} of {n} particles survived a stage of {seg.name!r}."
                )
            log_p += np.log(n_alive / n)
            alive_idx = np.nonzero(pop.alive)[0]
            pop.select(alive_idx[multinomial_resample(n_alive, n, gen)])
    if stage_time is None:
        return int(pop.alive.sum())
    return log_p


def _plain_block(program, stream, block, size):
    return _simulate(program, size, stream.generator(block))


def run_plain(program, n_samples, rng, block_size=10000, n_jobs=1, meta=None):
    """Plain Monte Carlo estimate of P(path passes the program).

    Args:
        program (Program): Constraints.
        n_samples (int): Number of paths.
        rng (RandomStream or int): Random stream; block b uses generator(b).
        block_size (int): Paths per block.
        n_jobs (int): Parallel workers; the result does not depend on it.
        meta (dict): Event description.

    Returns:
        McEstimate: Binomial estimate with integer hit count.

    """
    stream = as_stream(rng, "plain")
    n_samples = int(n_samples)
    n_blocks = -(-n_samples // block_size)
    sizes = [min(block_size, n_samples - b * block_size) for b in range(n_blocks)]
    hits = Parallel(n_jobs=n_jobs)(
        delayed(_plain_block)(program, stream, b, sizes[b]) for b in range(n_blocks)
    )
    meta = dict(meta or {}, method="plain", dt=program.dt)
    return binomial_estimate(sum(hits), n_samples, stream.to_dict(), meta)


def _splitting_replicate(program, stream, replicate, n_particles, stage_time):
    return _simulate(program, n_particles, stream.generator(replicate), stage_time)


def run_splitting(
    program,
    n_particles,
    rng,
    n_replicates=8,
    stage_time=0.25,
    n_jobs=1,
    meta=None,
):
    """Splitting estimate of P(path passes the program).

    Args:
        program (Program): Constraints.
        n_particles (int): Particles per replicate.
        rng (RandomStream or int): Random stream; replicate r uses generator(r).
        n_replicates (int): Independent replicates, combined for the error.
        stage_time (float): Resampling period within segments.
        n_jobs (int): Parallel workers; the result does not depend on it.
        meta (dict): Event description.

    Returns:
        McEstimate: Estimate with log_estimate and its standard error.

    """
    if n_replicates < 2:
        raise ValueError(f"need at least two replicates, got {n_replicates}")
    stream = as_stream(rng, "splitting")
    log_values = Parallel(n_jobs=n_jobs)(
        delayed(_splitting_replicate)(program, stream, r, int(n_particles), stage_time)
        for r in range(int(n_replicates))
    )
    meta = dict(
        meta or {},
        method="splitting",
        dt=program.dt,
        stage_time=stage_time,
        n_replicates=int(n_replicates),
    )
    return replicate_estimate(log_values, int(n_particles), stream.to_dict(), meta)
