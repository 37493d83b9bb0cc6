# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""How the process of wells behaves on a member of a vessel.

For a member path the depths v_1 < .. < v_N at which x_f moves to the next
well sit in explicit brackets around h_1 .. h_N, and between two of them x_f
stays between x_i (1 - delta) and x_i. Together these put x_f in a small
Skorokhod neighbourhood of the target step function on [0, 2 h_N].
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from sinailab.occupation.tightness import wells_function
from sinailab.vessel.membership import Wing, vessel_membership
from sinailab.wells.wells import wells_process

__all__ = [
    "f_sharp",
    "VProfile",
    "v_profile",
    "SandwichCheck",
    "xvariation_check",
    "skorokhod_distance",
    "Closeness",
    "skorokhod_closeness",
]

_TOL = 1e-9


def f_sharp(path, x, y):
    """Largest rise of f between x and y, read in the direction from x to y.

    For x <= y this is sup{f(t) - f(s): x <= s <= t <= y}; for x > y it is
    sup{f(t) - f(s): y <= t <= s <= x}.

    Args:
        path (GridPath): Path.
        x (float): Start (signed time).
        y (float): End (signed time).

    Returns:
        float: The rise, 0 for x == y.

    """
    if not path.covers(x, y):
        raise ValueError(f"[{min(x, y):g}, {max(x, y):g}] is not covered by {path}")
    if x == y:
        return 0.0
    vs = path.window(x, y)
    if x > y:
        vs = vs[::-1]
    return float(np.max(vs - np.minimum.accumulate(vs)))


def _between(path, a, b):
    """Window of f between two signed times, in the order from a to b."""
    vs = path.window(a, b)
    return vs if a <= b else vs[::-1]


def _first_reach(path, level, end):
    """The point closest to 0 between 0 and end where f reaches level."""
    sign = 1 if end >= 0 else -1
    ts, vs = Wing(path, sign).nodes(0.0, abs(end))
    hit = np.nonzero(vs >= level - _TOL)[0]
    if len(hit) == 0:
        return None
    k = int(hit[0])
    if k == 0:
        return 0.0
    t0, t1 = ts[k - 1], ts[k]
    f0, f1 = vs[k - 1], vs[k]
    t = t1 if f1 == f0 else t0 + (level - f0) / (f1 - f0) * (t1 - t0)
    return sign * float(min(max(t, t0), t1))


@dataclass(frozen=True)
class VProfile:
    """Well depths of a path in a vessel.

    Args:
        v (list): v_1 .. v_{N+1}, the last one being 2 h_N.
        h_tilde (float): Highest value of f between 0 and x_1 delta (1 + delta).
        z1 (float): Closest point to 0 on the other side where f reaches
            h_tilde, or None if it never does.
        brackets (list): (lo, hi, lo_open) per index 1 .. N.
        inside (list): Whether each v_i lies in its bracket; None when the
            path is not a member and the brackets were not asserted.

    """

    v: list
    h_tilde: float
    z1: float
    brackets: list
    inside: list = None

    @property
    def passed(self):
        if self.inside is None:
            return None
        increasing = all(a < b for a, b in zip(self.v[:-1], self.v[1:]))
        return all(self.inside) and increasing

    def to_dict(self):
        return {
            "v": [float(v) for v in self.v],
            "h_tilde": self.h_tilde,
            "z1": self.z1,
            "brackets": [list(b) for b in self.brackets],
            "inside": self.inside,
            "passed": self.passed,
        }


def v_profile(path, vspec, membership=None):
    """Compute v_1 .. v_{N+1}, h_tilde and z1 and check the depth brackets.

    Args:
        path (GridPath): Environment path.
        vspec (VesselSpec): Vessel.
        membership (MembershipReport): Reuse a membership report of the path.

    Returns:
        VProfile: The depths; brackets are asserted only for members.

    """
    spec, d = vspec.spec, vspec.delta
    if membership is None:
        membership = vessel_membership(path, vspec)
    tail = set(spec.tail_indices)
    other = vspec.first_of_other_sign

    end1 = spec.x_at(1) * d * (1 + d)
    h_tilde = float(_between(path, 0.0, end1).max())
    far = spec.x_at(other) * d * (1 + d)
    z1 = _first_reach(path, h_tilde, far)
    if z1 is None:
        logging.debug(f"f never reaches {h_tilde:.6g} between 0 and {far:g}.")
        low = min(_between(path, far, end1))
    else:
        low = min(_between(path, z1, end1))
    v = [h_tilde - float(low)]

    for i in spec.indices[1:]:
        prev = spec.prev_same(i)
        if i == other:
            vi = f_sharp(path, spec.x_at(i - 1), spec.x_at(i) * d * (1 + d))
        elif prev in tail:
            q = spec.q
            side = spec.sign(q)
            z = abs(vspec.w(q)) * (1 + d)
            start = abs(spec.x_at(prev))
            _, r = Wing(path, side).reflected(z, start, start * (1 + d))
            vi = float(r.max())
        elif prev == i - 1:
            xp = spec.x_at(i - 1)
            vi = f_sharp(path, xp * (1 - d), xp * (1 + d))
        else:
            vi = f_sharp(path, spec.x_at(i - 1), spec.x_at(prev) * (1 + d))
        v.append(vi)
    v.append(2.0 * float(spec.h[-1]))

    brackets = []
    for i, (lo, hi) in zip(spec.indices, vspec.depth_brackets()):
        lo_open = i > 1 and spec.prev_same(i) in tail
        brackets.append((float(lo), float(hi), lo_open))
    inside = None
    if membership:
        inside = []
        for vi, (lo, hi, lo_open) in zip(v, brackets):
            above = vi > lo if lo_open else vi >= lo - _TOL
            inside.append(bool(above and vi <= hi + _TOL))
    return VProfile(v, h_tilde, z1, brackets, inside)


@dataclass(frozen=True)
class SandwichCheck:
    """Bounds on x_f over one depth range (lo, hi]."""

    lo: float
    hi: float
    x_lo: float
    x_hi: float
    values: list = field(default_factory=list)

    @property
    def passed(self):
        return all(self.x_lo - _TOL <= x <= self.x_hi + _TOL for x in self.values)

    def to_dict(self):
        return {
            "range": [self.lo, self.hi],
            "bounds": [self.x_lo, self.x_hi],
            "values": [float(x) for x in self.values],
            "passed": self.passed,
        }


def _values_on(wp, a, b):
    """Every value x_f takes on (a, b]."""
    ends = np.concatenate([wp.depths, [wp.max_depth]])
    inner = ends[(ends > a) & (ends < b)]
    return wp(np.concatenate([inner, [b]])).tolist()


def xvariation_check(path, vspec, profile=None, wp=None):
    """Check where x_f sits between consecutive well depths.

    |x_f(h)| <= delta (delta + 1) max(|x_alpha|, |x_beta|) on [0, v_1], and
    x_f(h) lies between x_i (1 - delta) and x_i on (v_i, v_{i+1}].

    Returns:
        list: SandwichCheck per range.

    """
    spec, d = vspec.spec, vspec.delta
    profile = v_profile(path, vspec) if profile is None else profile
    wp = wells_process(path, cap=False) if wp is None else wp
    v = profile.v
    if wp.resolved_depth < v[-1]:
        logging.warning(
            f"Wells are resolved up to depth {wp.resolved_depth:.4g} only, "
            f"the check needs {v[-1]:.4g}."
        )
    scale = max(abs(spec.x_at(spec.alpha)), abs(spec.x_at(spec.beta)))
    bound = d * (d + 1) * scale
    checks = [SandwichCheck(0.0, v[0], -bound, bound, [0.0] + _values_on(wp, 0.0, v[0]))]
    for i in spec.indices:
        x = spec.x_at(i)
        lo, hi = sorted((x * (1 - d), x))
        checks.append(SandwichCheck(v[i - 1], v[i], lo, hi, _values_on(wp, v[i - 1], v[i])))
    return checks


def _inner_jumps(fn, horizon):
    times = fn.jumps()[0]
    return times[(times > 0) & (times < horizon)]


def _matched(targets, sources, anchors, horizon):
    """Knots sending each target to the free source nearest to its anchor."""
    pairs = []
    last = 0.0
    for h, a in zip(targets, anchors):
        free = sources[sources > last]
        if len(free) == 0:
            break
        d = float(free[np.argmin(np.abs(free - a))])
        pairs.append((float(h), d))
        last = d
    if not pairs:
        return None
    ts = np.array([0.0] + [p[0] for p in pairs] + [horizon])
    ls = np.array([0.0] + [p[1] for p in pairs] + [horizon])
    if np.all(np.diff(ts) > 0) and np.all(np.diff(ls) > 0):
        return ts, ls
    return None


def _time_change_candidates(g, f, horizon, anchors=None):
    """Knots of piecewise-linear time changes of [0, horizon] to try."""
    candidates = [(np.array([0.0, horizon]), np.array([0.0, horizon]))]
    targets = _inner_jumps(g, horizon)
    sources = _inner_jumps(f, horizon)
    for anc in (targets, anchors):
        if anc is None:
            continue
        knots = _matched(targets, sources, anc, horizon)
        if knots is not None:
            candidates.append(knots)
    return candidates


def _sup_gap(phi, xf, ts, ls, horizon):
    """sup over [0, horizon] of |x(lambda(t)) - phi(t)| for knots (ts, ls)."""
    src = _inner_jumps(xf, horizon)
    breaks = np.concatenate(
        [[0.0, horizon], phi.times[(phi.times > 0) & (phi.times < horizon)], np.interp(src, ls, ts)]
    )
    breaks = np.unique(breaks)
    samples = np.concatenate([breaks, 0.5 * (breaks[:-1] + breaks[1:])])
    gap = np.abs(xf(np.interp(samples, ts, ls)) - phi(samples))
    return float(gap.max())


def skorokhod_distance(f, g, horizon, anchors=None):
    """Upper bound on the Skorokhod distance of two step functions on [0, horizon].

    The infimum over time changes is taken over the identity and
    piecewise-linear time changes that map the jumps of g, in order, onto
    the jumps of f nearest to them or nearest to the given anchors.

    Args:
        f (StepFunction): Function composed with the time change.
        g (StepFunction): Reference function.
        horizon (float): Right end of the interval.
        anchors (array-like): Expected positions of the jumps of f, one per
            jump of g inside (0, horizon).

    Returns:
        float: max(sup |lambda - id|, sup |f o lambda - g|) for the best candidate.

    """
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    best = np.inf
    for ts, ls in _time_change_candidates(g, f, horizon, anchors):
        shift = float(np.max(np.abs(ls - ts)))
        best = min(best, max(shift, _sup_gap(g, f, ts, ls, horizon)))
    return best


@dataclass(frozen=True)
class Closeness:
    """Distance of x_f to the target on [0, 2 h_N] with the supporting checks."""

    distance: float
    bound: float
    profile: VProfile
    sandwich: list = field(default_factory=list)

    @property
    def passed(self):
        return (
            self.distance <= self.bound + _TOL
            and bool(self.profile.passed)
            and all(c.passed for c in self.sandwich)
        )

    def to_dict(self):
        return {
            "distance": self.distance,
            "bound": self.bound,
            "passed": self.passed,
            "profile": self.profile.to_dict(),
            "sandwich": [c.to_dict() for c in self.sandwich],
        }


def skorokhod_closeness(path, vspec):
    """Distance between x_f of a member path and the target step function.

    Args:
        path (GridPath): Environment path, a member of the vessel.
        vspec (VesselSpec): Vessel.

    Returns:
        Closeness: Distance on [0, 2 h_N], the bound
            vspec.closeness_bound(), the depth profile and the sandwich checks.

    """
    membership = vessel_membership(path, vspec)
    if not membership:
        failure = membership.first_failure
        raise ValueError(
            f"path is not in the vessel: {failure.name} on side {failure.side:+d} "
            f"{failure.reason}"
        )
    spec = vspec.spec
    horizon = 2.0 * float(spec.h[-1])
    wp = wells_process(path, cap=False)
    profile = v_profile(path, vspec, membership)
    sandwich = xvariation_check(path, vspec, profile, wp)
    xf = wells_function(wp)
    # x_f moves to the well of index i at depth v_i
    anchors = [v for h, v in zip(spec.h, profile.v) if 0 < h < horizon]
    distance = skorokhod_distance(xf, spec.phi(), horizon, anchors)
    result = Closeness(distance, vspec.closeness_bound(), profile, sandwich)
    logging.info(
        f"Skorokhod distance {distance:.4g} (bound {result.bound:.4g}), "
        f"depths {np.round(profile.v, 4).tolist()}"
    )
    return result
