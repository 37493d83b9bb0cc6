# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Graph occupation measures of step functions."""

import logging
from dataclasses import dataclass

import numpy as np

from sinailab.occupation.step import StepFunction
from sinailab.utils import read_csv, read_json, write_csv, write_json

__all__ = [
    "OccupationMeasure",
    "Envelopes",
    "NotInMError",
    "occupation",
    "envelopes",
    "rescale_measure",
    "z_process",
    "in_neighborhood",
    "tightness_set_check",
    "write_measure",
    "read_measure",
]


class NotInMError(ValueError):
    """The measure is not supported on the graphs of a valid envelope pair."""


@dataclass(frozen=True, eq=False)
class OccupationMeasure:
    """A measure made of horizontal strips.

    Each segment (t0, t1, level) carries Lebesgue measure on (t0, t1] at
    height `level`. The segments tile [0, total_horizon], so the time
    projection is Lebesgue measure.

    Args:
        segments (ndarray): Array of shape (K, 3) with rows (t0, t1, level).
        total_horizon (float): Right end of the time range.

    """

    segments: np.ndarray
    total_horizon: float

    def __post_init__(self):
        seg = np.array(self.segments, dtype=np.float64).reshape(-1, 3)
        horizon = float(self.total_horizon)
        if not horizon > 0:
            raise ValueError(f"total_horizon must be positive, got {horizon}")
        if len(seg) == 0:
            raise ValueError("a measure needs at least one segment")
        if seg[0, 0] != 0.0 or seg[-1, 1] != horizon:
            raise ValueError(
                f"segments must tile [0, {horizon}], got [{seg[0, 0]}, {seg[-1, 1]}]"
            )
        if np.any(seg[:, 1] <= seg[:, 0]) or np.any(seg[1:, 0] != seg[:-1, 1]):
            raise ValueError("segments must be contiguous with positive length")
        seg.setflags(write=False)
        object.__setattr__(self, "segments", seg)
        object.__setattr__(self, "total_horizon", horizon)

    @property
    def t0(self):
        return self.segments[:, 0]

    @property
    def t1(self):
        return self.segments[:, 1]

    @property
    def levels(self):
        return self.segments[:, 2]

    @property
    def mass(self):
        return float(np.sum(self.t1 - self.t0))

    def __len__(self):
        return len(self.segments)

    def mass_of(self, t_lo, t_hi, level_test):
        """Mass of (t_lo, t_hi) x {levels passing level_test}."""
        overlap = np.clip(np.minimum(self.t1, t_hi) - np.maximum(self.t0, t_lo), 0.0, None)
        return float(np.sum(overlap[level_test(self.levels)]))

    def restrict(self, horizon):
        """The measure on [0, horizon]."""
        horizon = min(float(horizon), self.total_horizon)
        keep = self.t0 < horizon
        seg = self.segments[keep].copy()
        seg[-1, 1] = horizon
        return OccupationMeasure(seg, horizon)

    def with_levels(self, levels):
        seg = self.segments.copy()
        seg[:, 2] = levels
        return OccupationMeasure(seg, self.total_horizon)

    def as_function(self):
        """The step function whose occupation measure this is."""
        seg = self.segments
        return StepFunction(seg[1:, 0], seg[1:, 2], seg[0, 2], self.total_horizon)

    def to_rows(self):
        return [
            {"t0": float(a), "t1": float(b), "level": float(v)} for a, b, v in self.segments
        ]

    def to_dict(self):
        return {"total_horizon": self.total_horizon, "segments": self.segments.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d["segments"], d["total_horizon"])

    def __repr__(self):
        return f"OccupationMeasure({len(self)} segments, horizon={self.total_horizon})"


@dataclass(frozen=True)
class Envelopes:
    """Minimal left-continuous envelopes of a measure in M.

    Args:
        f (StepFunction): Upper envelope, nondecreasing and nonnegative.
        g (StepFunction): Lower envelope in absolute value.
        s_plus (float): Supremum of the time support in the upper half plane.
        s_minus (float): Same for the lower half plane.

    """

    f: StepFunction
    g: StepFunction
    s_plus: float
    s_minus: float

    def __iter__(self):
        return iter((self.f, self.g, self.s_plus, self.s_minus))


def occupation(phi, horizon):
    """Graph occupation measure of a step function on [0, horizon].

    Args:
        phi (StepFunction or StepSpec): Function.
        horizon (float): Time horizon (> 0).

    Returns:
        OccupationMeasure: One segment per level set piece.

    """
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    if not isinstance(phi, StepFunction):
        phi = phi.phi()
    return OccupationMeasure(phi.pieces(horizon), horizon)


def envelopes(mu):
    """Envelopes f, g and extents s_plus, s_minus of a segment measure.

    A segment that reaches the horizon is read as extending forever, so its
    side gets an infinite extent.

    Args:
        mu (OccupationMeasure): Measure in M.

    Returns:
        Envelopes: (f, g, s_plus, s_minus).

    Raises:
        NotInMError: If the support does not lie on the two envelope graphs.

    """
    f_times, f_levels, g_times, g_levels = [], [], [], []
    f_now = g_now = 0.0
    s_plus = s_minus = 0.0
    for t0, t1, level in mu.segments:
        open_end = np.inf if t1 == mu.total_horizon else t1
        if level > 0:
            if level < f_now:
                raise NotInMError(
                    f"positive level {level} at t={t0} below the earlier level {f_now}"
                )
            if level > f_now:
                f_times.append(t0)
                f_levels.append(level)
                f_now = level
            s_plus = open_end
        elif level < 0:
            if -level < g_now:
                raise NotInMError(
                    f"negative level {level} at t={t0} above the earlier level {-g_now}"
                )
            if -level > g_now:
                g_times.append(t0)
                g_levels.append(-level)
                g_now = -level
        else:
            if f_now > 0 and g_now > 0:
                raise NotInMError(f"zero level at t={t0} after both envelopes left 0")
        if level < 0:
            s_minus = open_end
    f = StepFunction(f_times, f_levels, 0.0, mu.total_horizon)
    g = StepFunction(g_times, g_levels, 0.0, mu.total_horizon)
    return Envelopes(f, g, float(s_plus), float(s_minus))


def rescale_measure(mu, a):
    """mu_a(H x X) = a mu(H / a x X / a^2).

    Args:
        mu (OccupationMeasure): Measure.
        a (float): Scale (> 0).

    Returns:
        OccupationMeasure: Segments (a t0, a t1, a^2 level).

    """
    if not a > 0:
        raise ValueError(f"scale must be positive, got {a}")
    seg = mu.segments.copy()
    seg[:, :2] *= a
    seg[:, 2] *= a * a
    return OccupationMeasure(seg, mu.total_horizon * a)


def z_process(wp, a):
    """Z_a(s) = x(s a) / (a^2 log log a) of a process of wells.

    Args:
        wp (WellProcess): Process of wells.
        a (float): Scale (> e).

    Returns:
        StepFunction: Z_a, dropping back to 0 after max_depth / a.

    """
    if not a > np.e:
        raise ValueError(f"scale must exceed e so that log log a > 0, got {a}")
    norm = a * a * np.log(np.log(a))
    times = list(np.asarray(wp.depths) / a)
    levels = list(np.asarray(wp.locations) / norm)
    if len(times) and np.isfinite(wp.max_depth):
        times.append(wp.max_depth / a)
        levels.append(0.0)
    return StepFunction(times, levels, 0.0)


def in_neighborhood(nu, spec, eps):
    """Membership of nu in the open set U(h, x, eps).

    Args:
        nu (OccupationMeasure): Measure.
        spec (StepSpec): Center.
        eps (float): Radius in (0, mesh / 2).

    Returns:
        bool: True if every index carries mass strictly beyond x_i near h_i.

    """
    if not 0 < eps < spec.mesh / 2:
        raise ValueError(f"eps must lie in (0, {spec.mesh / 2}), got {eps}")
    for h, x in zip(spec.h, spec.x):
        if x > 0:
            mass = nu.mass_of(h - eps, h + eps, lambda v, x=x: v > x)
        else:
            mass = nu.mass_of(h - eps, h + eps, lambda v, x=x: v < x)
        if not mass > 0:
            logging.debug(f"No mass beyond x={x:g} near h={h:g}.")
            return False
    return True


def tightness_set_check(mu, a):
    """Whether supp(mu) lies in the union of [k-1, k] x [-a k^3, a k^3]."""
    if not a > 0:
        raise ValueError(f"bound must be positive, got {a}")
    k = np.floor(mu.t0) + 1.0
    return bool(np.all(np.abs(mu.levels) <= a * k ** 3))


def write_measure(mu, path):
    """Write segments to CSV, or to JSON with the horizon when path ends in .json."""
    if str(path).endswith(".json"):
        write_json(mu.to_dict(), path)
    else:
        write_csv(mu.to_rows(), path, fieldnames=["t0", "t1", "level"])


def read_measure(path, total_horizon=None):
    if str(path).endswith(".json"):
        return OccupationMeasure.from_dict(read_json(path))
    rows, _ = read_csv(path, dict_reader=True)
    seg = [(float(r["t0"]), float(r["t1"]), float(r["level"])) for r in rows]
    horizon = seg[-1][1] if total_horizon is None else total_horizon
    return OccupationMeasure(seg, horizon)
