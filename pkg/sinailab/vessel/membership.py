# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Membership of grid paths in a vessel, and a path that is always a member."""

import logging
from dataclasses import dataclass, field

import numpy as np

from sinailab.env.paths import GridPath

__all__ = [
    "BlockCheck",
    "MembershipReport",
    "Wing",
    "vessel_membership",
    "witness_margin",
    "construct_witness",
]

# slack for round-off in the interpolated values
_TOL = 1e-12


@dataclass(frozen=True)
class BlockCheck:
    name: str
    side: int
    passed: bool
    reason: str = ""

    def to_dict(self):
        return {
            "name": self.name,
            "side": self.side,
            "passed": self.passed,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class MembershipReport:
    """Outcome of every block check.

    Args:
        checks (list): BlockCheck per block and per eps^2 cap stretch.

    """

    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self):
        for c in self.checks:
            if not c.passed:
                return c
        return None

    def __bool__(self):
        return self.passed

    def to_dict(self):
        failure = self.first_failure
        return {
            "passed": self.passed,
            "first_failure": None if failure is None else failure.to_dict(),
            "checks": [c.to_dict() for c in self.checks],
        }


class Wing(object):
    """One side of a grid path as a function of the distance from 0.

    Args:
        path (GridPath): Path.
        side (int): +1 for t >= 0, -1 for t <= 0.

    """

    def __init__(self, path, side):
        self.values = np.asarray(path.side(side), dtype=np.float64)
        self.dt = path.dt
        self.length = (len(self.values) - 1) * self.dt
        self.times = np.arange(len(self.values)) * self.dt

    def __call__(self, t):
        return np.interp(t, self.times, self.values)

    def nodes(self, t0, t1, extra=()):
        """Times in [t0, t1] where a piecewise-linear extremum can sit, and values."""
        k0 = int(np.floor(t0 / self.dt)) + 1
        k1 = int(np.ceil(t1 / self.dt)) - 1
        inner = self.times[max(k0, 0) : min(k1, len(self.times) - 1) + 1]
        ts = np.unique(np.concatenate([[t0, t1], inner, np.asarray(extra, dtype=np.float64)]))
        ts = ts[(ts >= t0) & (ts <= t1)]
        return ts, self(ts)

    def reflected(self, z, t0, t1):
        """f - min_[z, t] f at the nodes of [t0, t1], reflection started at z."""
        ts, vs = self.nodes(z, t1, extra=(t0,))
        r = vs - np.minimum.accumulate(vs)
        keep = ts >= t0
        return ts[keep], r[keep]

    def rise(self, t0, t1):
        """sup{f(t) - f(s): t0 <= s <= t <= t1}."""
        if t1 <= t0:
            return 0.0
        _, vs = self.nodes(t0, t1)
        return float(np.max(vs - np.minimum.accumulate(vs)))


def _check_block(block, ys):
    name = block.name
    lo, hi = block.lo, block.hi
    if ys.min() < lo - _TOL:
        return BlockCheck(name, block.side, False, f"goes down to {ys.min():.6g} < {lo:.6g}")
    if ys.max() > hi + _TOL:
        return BlockCheck(name, block.side, False, f"goes up to {ys.max():.6g} > {hi:.6g}")
    if block.vis_lo is not None and ys.min() > block.vis_lo + _TOL:
        return BlockCheck(
            name, block.side, False, f"never visits {block.vis_lo:.6g} (min {ys.min():.6g})"
        )
    if block.vis_hi is not None and ys.max() < block.vis_hi - _TOL:
        return BlockCheck(
            name, block.side, False, f"never visits {block.vis_hi:.6g} (max {ys.max():.6g})"
        )
    end_lo, end_hi = block.end_window
    if not end_lo - _TOL <= ys[-1] <= end_hi + _TOL:
        return BlockCheck(
            name, block.side, False,
            f"ends at {ys[-1]:.6g} outside [{end_lo:.6g}, {end_hi:.6g}]",
        )
    return BlockCheck(name, block.side, True)


def vessel_membership(path, vspec):
    """Check every block of every event of the vessel on a grid path.

    Args:
        path (GridPath): Environment path.
        vspec (VesselSpec): Vessel.

    Returns:
        MembershipReport: Per-block outcomes; truthy if the path is a member.

    """
    checks = []
    for side in (1, -1):
        blocks = vspec.side_blocks(side)
        if not blocks:
            continue
        wing = Wing(path, side)
        if wing.length < vspec.extent(side) - 1e-9 * path.dt:
            raise ValueError(
                f"path covers {wing.length:g} on side {side:+d}, "
                f"the vessel needs {vspec.extent(side):g}"
            )
        z = start = None
        for block in blocks:
            if block.reset:
                z = block.t0
            if block.anchor:
                start = block.t0
            if block.reflected:
                _, ys = wing.reflected(z, block.t0, block.t1)
            else:
                _, ys = wing.nodes(block.t0, block.t1)
            checks.append(_check_block(block, ys))
            if block.kind == "RB":
                # f - f(w_i (1 + delta)) <= eps^2 over the whole event
                _, fs = wing.nodes(start, block.t1)
                excess = float(fs.max() - fs[0])
                ok = excess <= block.cap + _TOL
                reason = "" if ok else f"rises {excess:.6g} above f({start:g}), cap {block.cap:.6g}"
                checks.append(BlockCheck(f"E{block.event}:cap", side, ok, reason))
    report = MembershipReport(checks)
    if not report.passed:
        failure = report.first_failure
        logging.debug(f"Path fails {failure.name} on side {failure.side:+d}: {failure.reason}")
    return report


def witness_margin(vspec):
    """Margin by which the witness satisfies every constraint.

    This is eps^2 min(h_1, 1) / 4. The eps^2 cap of the reflected blocks does
    not scale with h, so for h_1 > 1 the margin stays at eps^2 / 4 instead of
    growing like eps^2 h_1 / 4.
    """
    return vspec.eps ** 2 * min(float(vspec.spec.h[0]), 1.0) / 4


def _owned(blocks, dt, n):
    """Grid index ranges [a, b] owned by each block (t0 <= k dt < t1)."""
    out = []
    for block in blocks:
        a = int(np.ceil(block.t0 / dt - 1e-9))
        b = int(np.ceil(block.t1 / dt - 1e-9)) - 1
        out.append((a, min(b, n)))
    return out


def _witness_wing(vspec, side, dt, pad):
    blocks = vspec.side_blocks(side)
    extent = vspec.extent(side)
    n_blocks = int(np.ceil(extent / dt - 1e-9))
    n = n_blocks + max(4, int(np.ceil(pad * extent / dt)))
    v = np.zeros(n + 1)
    eps = vspec.eps
    e = 2 * witness_margin(vspec)
    ranges = _owned(blocks, dt, n)
    anchor = e
    for block, (a, b) in zip(blocks, ranges):
        if b - a < 3:
            raise ValueError(
                f"dt={dt:g} leaves fewer than four grid points in block {block.name}"
            )
        mid = (a + b) // 2
        idx = np.arange(a, b + 1)
        if block.kind == "C":
            v[idx] = e * idx / b if block.event == 0 else e
        elif block.kind == "H":
            bottom = -eps * block.h + eps ** 2 * block.h / 2
            v[idx] = np.interp(idx, [a, mid, b], [e, bottom, e])
        elif block.kind == "B":
            peak = block.h * (1 + eps / 2)
            v[idx] = np.interp(idx, [a, mid, b], [e, peak, e])
        elif block.kind == "RC":
            anchor = v[a - 1]
        elif block.kind == "HR":
            continue
        else:
            # RC and HR descend to the new bottom, RB climbs back to eps^2 / 2
            # above the anchor and ends e above the bottom
            bottom = anchor + eps ** 2 / 2 - block.h * (1 + eps / 2)
            start = [r for blk, r in zip(blocks, ranges) if blk.event == block.event][0][0]
            down = np.arange(start, a)
            v[down] = np.interp(down, [start, a - 1], [anchor, bottom])
            v[idx] = np.interp(idx, [a, mid, b], [bottom, anchor + eps ** 2 / 2, bottom + e])
    last = ranges[-1][1]
    top = v[last] + 4 * float(vspec.spec.h[-1])
    tail = np.arange(last, n + 1)
    v[tail] = np.interp(tail, [last, n], [v[last], top])
    return v


def construct_witness(vspec, dt=None, pad=0.1):
    """A piecewise-linear member of the vessel.

    Every block is realized on the grid points it owns: C is flat at a small
    level e, H dips to -eps h + eps^2 h / 2, B peaks at h (1 + eps / 2), and
    on the final run the path falls through RC and HR to a new bottom and
    RB climbs back to eps^2 / 2 above the value at the start of the event.
    Past the last block each wing climbs by 4 h_N. Every constraint holds
    with room at least witness_margin(vspec), which is capped at eps^2 / 4
    when h_1 > 1.

    Args:
        vspec (VesselSpec): Vessel.
        dt (float): Grid step; defaults to an eighth of the shortest block.
        pad (float): Length of the final climb relative to the extent.

    Returns:
        GridPath: The witness.

    """
    shortest = min(b.duration for b in vspec.blocks())
    dt = shortest / 8 if dt is None else float(dt)
    if not 0 < dt <= shortest / 5:
        raise ValueError(f"dt must lie in (0, {shortest / 5:g}] for this vessel, got {dt}")
    right = _witness_wing(vspec, 1, dt, pad)
    left = _witness_wing(vspec, -1, dt, pad)
    values = np.concatenate([left[::-1], right[1:]])
    path = GridPath(dt, len(left) - 1, len(right) - 1, values)
    logging.debug(f"Witness {path} for {vspec.spec}.")
    return path
