# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""The rate function I of occupation measures.

For envelopes (f, g) with extents s_plus and s_minus = inf,

    I = pi^2/2 int_(0, s_plus) t^-2 d(f + g) + pi^2/8 int_[s_plus, inf) t^-2 dg,

and when s_minus is finite the roles of (f, s_plus) and (g, s_minus) are
exchanged. Atoms sitting exactly at the extent belong to the pi^2/8 part.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from sinailab.occupation.measure import OccupationMeasure, envelopes, occupation
from sinailab.occupation.metric import lw_distance
from sinailab.occupation.step import StepFunction, StepSpec

__all__ = [
    "RateTerm",
    "RateValue",
    "RefinementError",
    "rate_of_spec",
    "rate_of_envelopes",
    "rate_of_measure",
    "rate",
    "in_K",
    "shrink",
    "step_approximate",
]

TWO_SIDED = np.pi ** 2 / 2
ONE_SIDED = np.pi ** 2 / 8

# relative slack of the I <= 1 test
K_RTOL = 1e-12


class RefinementError(RuntimeError):
    """Partition refinement did not reach the requested accuracy."""

    def __init__(self, message, gap):
        super().__init__(message)
        self.gap = gap


@dataclass(frozen=True)
class RateTerm:
    """Contribution coefficient * increment / t^2 of one jump.

    Args:
        time (float): Jump time h_i.
        increment (float): Jump size |x_i - x_{i^-}|.
        coefficient (float): pi^2/2 or pi^2/8.
        tail (bool): Whether the jump is in the final one-sided stretch.
        index (int): Index in the spec, if the term comes from one.

    """

    time: float
    increment: float
    coefficient: float
    tail: bool
    index: int = None

    @property
    def contribution(self):
        if self.increment == 0:
            return 0.0
        if self.time == 0:
            return np.inf
        return self.coefficient * self.increment / self.time ** 2

    def to_dict(self):
        return {
            "index": self.index,
            "time": self.time,
            "increment": self.increment,
            "coefficient": self.coefficient,
            "tail": self.tail,
            "contribution": self.contribution,
        }


@dataclass(frozen=True)
class RateValue:
    """I together with its per-jump breakdown."""

    breakdown: list = field(default_factory=list)

    @property
    def value(self):
        return float(sum(term.contribution for term in self.breakdown))

    def __float__(self):
        return self.value

    def to_dict(self):
        return {
            "value": self.value,
            "breakdown": [term.to_dict() for term in self.breakdown],
        }


def rate_of_spec(spec):
    """I of the occupation measure of Phi_{h,x}.

    Args:
        spec (StepSpec): Step specification.

    Returns:
        RateValue: pi^2/2 terms off the final run, pi^2/8 terms on it.

    """
    tail = set(spec.tail_indices)
    terms = []
    for i, inc in zip(spec.indices, spec.increments()):
        one_sided = i in tail
        terms.append(
            RateTerm(
                time=spec.h_at(i),
                increment=float(inc),
                coefficient=ONE_SIDED if one_sided else TWO_SIDED,
                tail=one_sided,
                index=i,
            )
        )
    return RateValue(terms)


def rate_of_envelopes(f, g, s_minus, s_plus):
    """I from the envelope pair and extents.

    Args:
        f (StepFunction): Upper envelope, nondecreasing, f(0) = 0.
        g (StepFunction): Lower envelope in absolute value, same conditions.
        s_minus (float): Extent of the lower half plane support.
        s_plus (float): Extent of the upper half plane support.

    Returns:
        RateValue: Infinite when an envelope jumps at t = 0.

    """
    for name, e in (("f", f), ("g", g)):
        if e.initial != 0.0:
            raise ValueError(f"{name}(0) must be 0, got {e.initial}")
        if not e.is_nondecreasing():
            raise ValueError(f"{name} must be nondecreasing")
    if np.isinf(s_minus) and np.isinf(s_plus):
        raise ValueError("at most one of s_minus, s_plus may be infinite")
    if np.isinf(s_minus):
        first, second, s = f, g, s_plus
    else:
        first, second, s = g, f, s_minus
    terms = []
    for t, size in zip(*first.jumps()):
        if t < s:
            terms.append(RateTerm(float(t), float(size), TWO_SIDED, False))
    for t, size in zip(*second.jumps()):
        one_sided = bool(t >= s)
        coefficient = ONE_SIDED if one_sided else TWO_SIDED
        terms.append(RateTerm(float(t), float(size), coefficient, one_sided))
    terms.sort(key=lambda term: term.time)
    value = RateValue(terms)
    if np.isinf(value.value):
        logging.warning("An envelope jumps at t = 0, the rate is infinite.")
    return value


def rate_of_measure(mu):
    """I of a segment measure through its envelopes."""
    env = envelopes(mu)
    return rate_of_envelopes(env.f, env.g, env.s_minus, env.s_plus)


def rate(obj):
    """I of a StepSpec, an OccupationMeasure, an Envelopes pair or a RateValue."""
    if isinstance(obj, RateValue):
        return obj.value
    if isinstance(obj, StepSpec):
        return rate_of_spec(obj).value
    if isinstance(obj, OccupationMeasure):
        return rate_of_measure(obj).value
    if hasattr(obj, "s_plus"):
        return rate_of_envelopes(obj.f, obj.g, obj.s_minus, obj.s_plus).value
    raise ValueError(f"cannot compute a rate for {type(obj).__name__}")


def in_K(obj):
    """Whether I(obj) <= 1."""
    return bool(rate(obj) <= 1.0 + K_RTOL)


def shrink(mu, eps):
    """Scale every level by (1 - eps), so that I(result) = (1 - eps) I(mu).

    Args:
        mu (OccupationMeasure or StepSpec): Measure or spec.
        eps (float): Factor in [0, 1).

    """
    if not 0 <= eps < 1:
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    if isinstance(mu, StepSpec):
        return StepSpec(mu.h, mu.x * (1.0 - eps))
    return mu.with_levels(mu.levels * (1.0 - eps))


def _values(e, times):
    """Right limits for step functions, plain values for continuous callables."""
    if isinstance(e, StepFunction):
        return e.right_limit(times)
    return np.array([float(e(t)) for t in times])


def _events(times, first, second, s):
    """Spec events (time, side, level) of the discretized envelopes.

    `first` is the envelope of the side whose extent is s, `second` the
    other. Side +1 is the side of `first`.
    """
    dF, dG = np.diff(first), np.diff(second)
    t0, t1 = times[:-1], times[1:]
    mid = 0.5 * (t0 + t1)
    events = []
    for k in range(len(dF)):
        f_time = None
        if dF[k] > 0 and t0[k] < s:
            f_time = t1[k] if t1[k] < s else mid[k]
            events.append((f_time, 1, first[k + 1]))
        if dG[k] > 0:
            g_time = mid[k] if f_time == t1[k] else t1[k]
            events.append((g_time, -1, second[k + 1]))
    events.sort()
    if np.isfinite(s) and s > 0:
        before = [e for e in events if e[0] < s]
        positive = [e for e in before if e[1] == 1]
        if not positive:
            raise ValueError(f"extent {s} is positive but its envelope vanishes before it")
        if before[-1][1] == -1:
            events.append((0.5 * (before[-1][0] + s), 1, positive[-1][2]))
        g_at_s = float(np.interp(s, times, second))
        if g_at_s > 0 and not any(e[0] == s and e[1] == -1 for e in events):
            events.append((s, -1, g_at_s))
        events.sort()
    return events


def _spec_from_grid(times, F, G, s_minus, s_plus):
    if np.isinf(s_minus):
        events = _events(times, F, G, s_plus)
        sign = 1.0
    else:
        events = _events(times, G, F, s_minus)
        sign = -1.0
    if not events:
        return StepSpec([], [])
    h = np.array([e[0] for e in events])
    x = np.array([sign * e[1] * e[2] for e in events])
    return StepSpec(h, x)


def _stieltjes(e, lo, hi):
    """int_(lo, hi] t^-2 de by parts, for continuous e constant after hi."""
    if hi <= lo:
        return 0.0
    tail, _ = integrate.quad(lambda t: float(e(t)) / t ** 3, lo, hi, limit=200)
    head = float(e(lo)) / lo ** 2 if lo > 0 else 0.0
    return float(e(hi)) / hi ** 2 - head + 2.0 * tail


def _exact_rate(f, g, s_minus, s_plus, horizon):
    if isinstance(f, StepFunction) and isinstance(g, StepFunction):
        return rate_of_envelopes(f, g, s_minus, s_plus).value
    if np.isinf(s_minus):
        first, second, s = f, g, s_plus
    else:
        first, second, s = g, f, s_minus
    cut = min(s, horizon)
    two = _stieltjes(first, 0.0, cut) + _stieltjes(second, 0.0, cut)
    one = _stieltjes(second, cut, horizon)
    return TWO_SIDED * two + ONE_SIDED * one


def step_approximate(
    f,
    g,
    delta,
    s_minus=np.inf,
    s_plus=np.inf,
    horizon=None,
    n_start=32,
    max_cells=1 << 18,
    reference=None,
):
    """Step specification whose rate and occupation measure are within delta of the input.

    Both envelopes are sampled on a partition of [0, horizon] and replaced by
    their lower Stieltjes step versions (jumps of the envelope over a cell
    moved to the right end of the cell). The partition is doubled until the
    rate gap and the local weak distance to the input measure both fall
    below delta. Marker indices with zero increment keep the extents of the
    input in the spec.

    Args:
        f (StepFunction or callable): Upper envelope, f(0) = 0.
        g (StepFunction or callable): Lower envelope, g(0) = 0.
        delta (float): Tolerance on the rate (> 0).
        s_minus (float): Extent of the lower side.
        s_plus (float): Extent of the upper side.
        horizon (float): Time after which both envelopes are constant.
        n_start (int): Cells of the first partition.
        max_cells (int): Partition budget.
        reference (OccupationMeasure): The input measure. Envelopes do not
            fix how the time is split between the two graphs, so it is
            required for continuous envelopes; for step envelopes it
            defaults to the occupation of the spec on their own jump times.

    Returns:
        StepSpec: The approximating spec.

    Raises:
        RefinementError: If the budget is exhausted; carries the achieved
            rate gap.

    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if np.isinf(s_minus) and np.isinf(s_plus):
        raise ValueError("at most one of s_minus, s_plus may be infinite")
    extent = s_plus if np.isinf(s_minus) else s_minus
    if horizon is None:
        if isinstance(f, StepFunction) and isinstance(g, StepFunction):
            horizon = float(max(np.concatenate([f.times, g.times, [1.0]])))
        else:
            raise ValueError("horizon is required for continuous envelopes")
    horizon = max(float(horizon), extent if np.isfinite(extent) else 0.0)
    target = _exact_rate(f, g, s_minus, s_plus, horizon)
    if not np.isfinite(target):
        raise ValueError("step approximation needs a finite rate")

    fixed = [horizon]
    if np.isfinite(extent):
        fixed.append(extent)
    if isinstance(f, StepFunction) and isinstance(g, StepFunction):
        fixed.extend(f.times.tolist() + g.times.tolist())
    fixed = np.array([t for t in fixed if t > 0])
    if reference is None:
        if not isinstance(f, StepFunction) or not isinstance(g, StepFunction):
            raise ValueError("a reference measure is required for continuous envelopes")
        times = np.unique(np.concatenate([[0.0], fixed]))
        exact = _spec_from_grid(times, _values(f, times), _values(g, times), s_minus, s_plus)
        reference = occupation(exact, horizon)

    n = int(n_start)
    gap = distance = np.inf
    while n <= max_cells:
        times = np.unique(np.concatenate([np.linspace(0.0, horizon, n + 1), fixed]))
        spec = _spec_from_grid(times, _values(f, times), _values(g, times), s_minus, s_plus)
        gap = abs(rate_of_spec(spec).value - target)
        if gap < delta:
            # the transport distance is only measured once the rate gap is met
            distance = lw_distance(occupation(spec, reference.total_horizon), reference)
        logging.debug(
            f"Partition with {len(times) - 1} cells: rate gap {gap:.3g}, "
            f"distance {distance:.3g}."
        )
        if gap < delta and distance < delta:
            logging.info(
                f"Step approximation with {spec.N} indices, rate gap {gap:.3g}, "
                f"distance {distance:.3g}."
            )
            return spec
        n *= 2
    raise RefinementError(
        f"rate gap {gap:.3g} or distance {distance:.3g} still above {delta} "
        f"after {max_cells} cells",
        gap,
    )
