# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Sinai's walk in a step potential.

The walk is simulated step by step to n_max = ceil(e^{a_max}) and its
position is stored on the geometric schedule n_j = ceil(e^{a_max t_j}),
t_j = 0, step, .., 1. Uniforms come from the counter-based stream in fixed
chunks, so a trajectory depends on the seed only.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from numba import njit
from scipy.integrate import trapezoid

from sinailab.occupation.step import StepFunction
from sinailab.utils import as_stream
from sinailab.wells.wells import wells_process

__all__ = [
    "WindowExceededError",
    "WalkTrajectory",
    "LocalizationStats",
    "LOCALIZATION_THRESHOLD",
    "checkpoint_schedule",
    "required_width",
    "simulate_walk",
    "simulate_replicas",
    "rescaled_path",
    "weighted_integral",
    "localization_stats",
    "localization_summary",
]

# uniforms per chunk of the walk kernel
_CHUNK = 1 << 20

# sites per side per (log n)^2
WIDTH_MARGIN = 4.0

# pilot-calibrated bound on the median of |S(n) - x_V(log n)| / (log n)^2
LOCALIZATION_THRESHOLD = 0.5


class WindowExceededError(RuntimeError):
    """The walk reached a site without a transition probability."""


@dataclass(frozen=True, eq=False)
class WalkTrajectory:
    """Positions of one walk on its checkpoint schedule.

    Args:
        n (ndarray): Strictly increasing checkpoint times.
        positions (ndarray): S(n) at the checkpoints.
        a_max (float): Scale of the schedule, n[-1] = ceil(e^{a_max}).
        head (ndarray): S(0), S(1), .. for the first raw steps.
        seed (dict): Random stream of the walk.
        env_seed (dict): Random stream of the environment, if known.

    """

    n: np.ndarray
    positions: np.ndarray
    a_max: float
    head: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=np.int64))
    seed: dict = field(default_factory=dict)
    env_seed: dict = field(default_factory=dict)

    def __post_init__(self):
        n = np.asarray(self.n, dtype=np.int64)
        positions = np.asarray(self.positions, dtype=np.int64)
        if len(n) != len(positions):
            raise ValueError("checkpoint times and positions differ in length")
        if np.any(np.diff(n) <= 0):
            raise ValueError("checkpoint times must be strictly increasing")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "head", np.asarray(self.head, dtype=np.int64))

    @property
    def max_time(self):
        return int(self.n[-1])

    @property
    def t(self):
        """Checkpoint times on the scale of the schedule, log(n) / a_max."""
        return np.log(self.n) / self.a_max

    def is_legal(self):
        """Consecutive raw positions in the stored head differ by one."""
        return bool(np.all(np.abs(np.diff(self.head)) == 1))

    def position_at(self, n):
        """S at the checkpoint closest to n on the log scale."""
        k = int(np.argmin(np.abs(np.log(self.n) - np.log(n))))
        return int(self.n[k]), int(self.positions[k])

    def to_rows(self):
        return [
            {"t": float(t), "n": int(n), "S": int(s)}
            for t, n, s in zip(self.t, self.n, self.positions)
        ]


def checkpoint_schedule(a_max, step=0.01):
    """n_j = ceil(e^{a_max t_j}) for t_j = 0, step, .., 1, without repeats."""
    if not a_max > 0:
        raise ValueError(f"a_max must be positive, got {a_max}")
    if not 0 < step <= 1:
        raise ValueError(f"step must lie in (0, 1], got {step}")
    t = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    n = np.ceil(np.exp(a_max * t) - 1e-9).astype(np.int64)
    return np.unique(np.maximum(n, 1))


def required_width(n_max, margin=WIDTH_MARGIN):
    """Sites per side needed for a walk of n_max steps."""
    return int(np.ceil(margin * np.log(max(n_max, 2)) ** 2))


@njit(cache=True)
def _walk_chunk(probs, first_site, pos, done, u, ckpt, ci, out, head):
    last_site = first_site + len(probs) - 1
    n_head = len(head)
    for j in range(len(u)):
        if ci >= len(ckpt):
            return pos, done, ci, 0
        if pos < first_site or pos > last_site:
            return pos, done, ci, 1
        if u[j] < probs[pos - first_site]:
            pos += 1
        else:
            pos -= 1
        done += 1
        if done < n_head:
            head[done] = pos
        while ci < len(ckpt) and ckpt[ci] == done:
            out[ci] = pos
            ci += 1
    return pos, done, ci, 0


def simulate_walk(pot, a_max, rng, step=0.01, margin=WIDTH_MARGIN, head_length=1000,
                  env_seed=None):
    """Run Sinai's walk in a step potential up to n_max = ceil(e^{a_max}).

    Args:
        pot (StepPotential): Environment.
        a_max (float): Scale; n_max = ceil(e^{a_max}).
        rng (RandomStream or int): Random stream; chunk c uses generator(c).
        step (float): Spacing of the checkpoint schedule in t = log(n) / a_max.
        margin (float): Required sites per side in units of (log n_max)^2.
        head_length (int): Raw steps kept for the legality check.
        env_seed (dict): Stream of the environment, stored with the result.

    Returns:
        WalkTrajectory: Checkpointed trajectory.

    Raises:
        ValueError: If the potential is narrower than the required width.
        WindowExceededError: If the walk still reaches the end of the potential.

    """
    ckpt = checkpoint_schedule(a_max, step)
    n_max = int(ckpt[-1])
    need = required_width(n_max, margin)
    if min(pot.left_n, pot.right_n) < need:
        raise ValueError(
            f"potential has {min(pot.left_n, pot.right_n)} sites on its short side, "
            f"a walk of {n_max} steps needs {need}"
        )
    stream = as_stream(rng, "walk")
    probs = np.ascontiguousarray(pot.probs)
    out = np.zeros(len(ckpt), dtype=np.int64)
    head = np.zeros(min(head_length, n_max) + 1, dtype=np.int64)
    pos, done, ci, chunk = 0, 0, 0, 0
    # S(0) = 0 is never a checkpoint since n_j >= 1
    while ci < len(ckpt):
        u = stream.generator(chunk).random(min(_CHUNK, n_max - done))
        pos, done, ci, status = _walk_chunk(probs, pot.first_site, pos, done, u, ckpt, ci, out, head)
        if status:
            raise WindowExceededError(
                f"walk reached site {pos} outside {pot.first_site}..{pot.last_site} "
                f"after {done} steps; use at least {max(need, abs(pos) + 1)} sites per side"
            )
        chunk += 1
    logging.debug(f"Walk of {n_max} steps ends at {pos}.")
    return WalkTrajectory(ckpt, out, float(a_max), head, stream.to_dict(), env_seed or {})


def simulate_replicas(pot, a_max, rng, n_replicas, n_jobs=1, **kwargs):
    """Independent walks in one environment; replica r uses substream r."""
    stream = as_stream(rng, "walk")
    return Parallel(n_jobs=n_jobs)(
        delayed(simulate_walk)(pot, a_max, stream.substream(r), **kwargs)
        for r in range(int(n_replicas))
    )


def _scale(a):
    if not a > np.e:
        raise ValueError(f"a must exceed e, got {a}")
    return a * a * np.log(np.log(a))


def _check_scale(traj, a):
    if a > traj.a_max * (1 + 1e-12):
        raise ValueError(f"a={a} exceeds the trajectory scale a_max={traj.a_max}")


def rescaled_path(traj, a):
    """t -> S(ceil(e^{a t})) / (a^2 log log a) on [0, 1] as a step function.

    The value on (t_k, t_{k+1}] is the position at the checkpoint of t_{k+1},
    t_k = log(n_k) / a.

    Args:
        traj (WalkTrajectory): Trajectory with a_max >= a.
        a (float): Scale, larger than e.

    Returns:
        StepFunction: Rescaled path with horizon 1.

    """
    scale = _scale(a)
    _check_scale(traj, a)
    t = np.log(traj.n) / a
    keep = t <= 1.0 + 1e-12
    t, s = t[keep], traj.positions[keep] / scale
    return StepFunction(t[1:], s[1:], float(s[0]), 1.0)


def weighted_integral(traj, a, r):
    """Trapezoid value of int_0^1 t^r S(e^{a t}) dt / (a^2 log log a).

    Args:
        traj (WalkTrajectory): Trajectory with a_max >= a.
        a (float): Scale, larger than e.
        r (float): Exponent, r >= 0.

    Returns:
        float: The integral on the checkpoint grid.

    """
    if not r >= 0:
        raise ValueError(f"r must be non-negative, got {r}")
    scale = _scale(a)
    _check_scale(traj, a)
    t = np.log(traj.n) / a
    keep = t <= 1.0 + 1e-12
    t, s = t[keep], traj.positions[keep].astype(np.float64)
    if t[-1] < 1.0:
        t, s = np.append(t, 1.0), np.append(s, s[-1])
    return float(trapezoid(t ** r * s, t) / scale)


@dataclass(frozen=True)
class LocalizationStats:
    """|S(n) - x_V(log n)| of one walk on a grid of log-times.

    Args:
        t (ndarray): Requested log-times.
        n (ndarray): Checkpoint used for each t.
        positions (ndarray): S(n).
        bottoms (ndarray): x_V(log n).
        resolved_depth (float): Depth up to which x_V is certified.

    """

    t: np.ndarray
    n: np.ndarray
    positions: np.ndarray
    bottoms: np.ndarray
    resolved_depth: float

    @property
    def deviation(self):
        return np.abs(self.positions - self.bottoms)

    @property
    def normalized(self):
        """Deviation over (log n)^2."""
        return self.deviation / np.maximum(np.log(self.n), 1.0) ** 2

    def to_rows(self):
        return [
            {"t": float(t), "n": int(n), "S": int(s), "x_V": float(x), "deviation": float(d)}
            for t, n, s, x, d in zip(self.t, self.n, self.positions, self.bottoms, self.deviation)
        ]


def localization_stats(traj, pot, t_grid, wp=None):
    """Distance of the walk to the bottom of its current well.

    For each t, n is the checkpoint closest to e^t and the deviation is
    |S(n) - x_V(log n)| with x_V the process of wells of the potential.

    Args:
        traj (WalkTrajectory): Walk in pot.
        pot (StepPotential): Its environment.
        t_grid (array-like): Log-times, at most log(n_max).
        wp (WellProcess): Process of wells of pot, to reuse across walks.

    Returns:
        LocalizationStats: Per-t positions, bottoms and deviations.

    """
    t_grid = np.asarray(t_grid, dtype=np.float64)
    log_n = np.log(traj.n)
    if np.any(t_grid < 0) or np.any(t_grid > log_n[-1] + 1e-9):
        raise ValueError(
            f"t_grid must lie in [0, {log_n[-1]:.4g}], the span of the checkpoints"
        )
    k = np.array([int(np.argmin(np.abs(log_n - t))) for t in t_grid])
    gap = np.abs(log_n[k] - t_grid)
    spacing = np.max(np.diff(log_n)) if len(log_n) > 1 else 0.0
    if np.any(gap > spacing + 1e-9):
        raise ValueError("checkpoint schedule does not cover t_grid")
    wp = wells_process(pot.as_path()) if wp is None else wp
    depths = log_n[k]
    if wp.resolved_depth < depths.max():
        logging.warning(
            f"Wells of the potential are resolved up to depth {wp.resolved_depth:.4g}, "
            f"localization needs {depths.max():.4g}; widen the environment."
        )
    return LocalizationStats(
        t_grid, traj.n[k], traj.positions[k], wp(depths), float(wp.resolved_depth)
    )


def localization_summary(stats, threshold=LOCALIZATION_THRESHOLD):
    """Median and quartiles of the normalized deviation across environments.

    Args:
        stats (list): LocalizationStats on a common t_grid.
        threshold (float): Bound on the median at the last t.

    Returns:
        dict: Per-t quantiles and whether the last median is below threshold.

    """
    if len(stats) == 0:
        raise ValueError("need at least one localization record")
    table = np.stack([s.normalized for s in stats])
    q1, median, q3 = np.quantile(table, [0.25, 0.5, 0.75], axis=0)
    return {
        "t": stats[0].t.tolist(),
        "median": median.tolist(),
        "q1": q1.tolist(),
        "q3": q3.tolist(),
        "threshold": threshold,
        "passed": bool(median[-1] <= threshold),
        "n_environments": len(stats),
    }
