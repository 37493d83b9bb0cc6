# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Exact transition kernels of Brownian motion killed outside (0, h).

All series are eigenfunction expansions in sin(n pi x / h), truncated once
the term bound exp(-n^2 pi^2 t / (2 h^2)) falls below `tol`. They are the
large-time representation; times with t / h^2 < MIN_SCALED_TIME are
rejected.
"""

import logging

import numpy as np
from scipy.special import erfc

__all__ = [
    "SeriesTruncationError",
    "q_kernel",
    "confinement_prob",
    "confinement_event_prob",
    "reflected_confinement_prob",
    "exit_time_survival",
    "fit_upper_constant",
    "fit_lower_constant",
    "fit_exit_constant",
]

SERIES_TOL = 1e-16
SERIES_N_MAX = 64
MIN_SCALED_TIME = 0.01

# below this time the exit-time survival uses the image series
IMAGE_SERIES_TIME = 0.25


class SeriesTruncationError(RuntimeError):
    """The eigenfunction series would need more than n_max terms."""


def _n_terms(scaled_time, tol, n_max):
    if not scaled_time > 0:
        raise ValueError(f"time must be positive, got scaled time {scaled_time}")
    needed = int(np.ceil(np.sqrt(2.0 * np.log(1.0 / tol) / (np.pi ** 2 * scaled_time))))
    if scaled_time < MIN_SCALED_TIME or needed > n_max:
        raise SeriesTruncationError(
            f"t / h^2 = {scaled_time:.3g} needs {needed} terms (n_max={n_max}); "
            "small times belong to the heat-kernel regime, which is not covered"
        )
    return max(needed, 1)


def _check_inside(name, value, h):
    value = np.asarray(value, dtype=np.float64)
    if np.any(value <= 0) or np.any(value >= h):
        raise ValueError(f"{name} must lie in (0, {h}), got {value}")
    return value


def q_kernel(t, x, y, h=1.0, tol=SERIES_TOL, n_max=SERIES_N_MAX):
    """Transition density Q^h(t, x, y) of Brownian motion killed outside (0, h).

    Q^h(t, x, y) = h^-1 Q^1(t / h^2, x / h, y / h) with
    Q^1(t, x, y) = 2 sum_n exp(-n^2 pi^2 t / 2) sin(n pi x) sin(n pi y).

    Args:
        t (float): Time (> 0).
        x (float or ndarray): Start in (0, h).
        y (float or ndarray): End in (0, h).
        h (float): Interval width.
        tol (float): Truncation tolerance of the term bound.
        n_max (int): Largest number of terms.

    Returns:
        float or ndarray: The density.

    """
    x = _check_inside("x", x, h) / h
    y = _check_inside("y", y, h) / h
    s = t / h ** 2
    n = np.arange(1, _n_terms(s, tol, n_max) + 1, dtype=np.float64)
    decay = np.exp(-(n ** 2) * np.pi ** 2 * s / 2.0)
    xs = np.sin(np.pi * np.multiply.outer(x, n))
    ys = np.sin(np.pi * np.multiply.outer(y, n))
    return 2.0 * np.sum(decay * xs * ys, axis=-1) / h


def confinement_prob(t, x, h=1.0, tol=SERIES_TOL, n_max=SERIES_N_MAX):
    """P_x(B[0, t] in (0, h)) = 4/pi sum_{n odd} exp(-n^2 pi^2 t / (2 h^2)) sin(n pi x / h) / n."""
    x = _check_inside("x", x, h) / h
    s = t / h ** 2
    n = np.arange(1, _n_terms(s, tol, n_max) + 1, 2, dtype=np.float64)
    decay = np.exp(-(n ** 2) * np.pi ** 2 * s / 2.0) / n
    return 4.0 / np.pi * np.sum(decay * np.sin(np.pi * np.multiply.outer(x, n)), axis=-1)


def confinement_event_prob(t, z, lo_end, hi_end, h=1.0, tol=SERIES_TOL, n_max=SERIES_N_MAX):
    """P_z(B stays in (0, h) on [0, t] and B(t) in [lo_end, hi_end]).

    Args:
        t (float): Time.
        z (float or ndarray): Start in (0, h).
        lo_end (float): Lower end of the terminal window.
        hi_end (float): Upper end of the terminal window.
        h (float): Interval width.

    Returns:
        float or ndarray: Probability.

    """
    if not 0 <= lo_end <= hi_end <= h:
        raise ValueError(f"need 0 <= lo_end <= hi_end <= {h}, got {lo_end}, {hi_end}")
    z = _check_inside("z", z, h) / h
    s = t / h ** 2
    n = np.arange(1, _n_terms(s, tol, n_max) + 1, dtype=np.float64)
    weight = (
        2.0
        / (n * np.pi)
        * np.exp(-(n ** 2) * np.pi ** 2 * s / 2.0)
        * (np.cos(n * np.pi * lo_end / h) - np.cos(n * np.pi * hi_end / h))
    )
    return np.sum(weight * np.sin(np.pi * np.multiply.outer(z, n)), axis=-1)


def reflected_confinement_prob(t, w, end_hi, h=1.0, **kwargs):
    """P_w(R stays in [0, h) on [0, t] and R(t) <= end_hi) for reflected motion R.

    R has the law of |B| started at w, so the event is a confinement of B in
    (-h, h), which is a width 2h interval event started at h + w.
    """
    if not 0 <= w < h:
        raise ValueError(f"w must lie in [0, {h}), got {w}")
    if not 0 <= end_hi <= h:
        raise ValueError(f"end_hi must lie in [0, {h}], got {end_hi}")
    return confinement_event_prob(t, h + w, h - end_hi, h + end_hi, 2.0 * h, **kwargs)


def exit_time_survival(t, tol=SERIES_TOL, n_max=SERIES_N_MAX):
    """P(T > t) for the exit time T of (-1, 1) by Brownian motion from 0.

    Args:
        t (float or ndarray): Times (>= 0).

    Returns:
        float or ndarray: Survival probabilities.

    """
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(t < 0):
        raise ValueError("times must be non-negative")
    out = np.ones_like(t)
    small = (t > 0) & (t < IMAGE_SERIES_TIME)
    large = t >= IMAGE_SERIES_TIME
    if np.any(small):
        k = np.arange(0, 16, dtype=np.float64)
        arg = np.divide.outer(2.0 * k + 1.0, np.sqrt(2.0 * t[small]))
        signs = (-1.0) ** k
        out[small] = 1.0 - 2.0 * np.sum(signs[:, None] * erfc(arg), axis=0)
    if np.any(large):
        out[large] = [confinement_prob(s, 1.0, 2.0, tol, n_max) for s in t[large]]
    return float(out[0]) if scalar else out


def fit_upper_constant(t_grid=None, n_lattice=41):
    """Smallest c with Q^1(t, x, y) <= c exp(-pi^2 t / 2) on a lattice, t >= 1."""
    t_grid = np.linspace(1.0, 4.0, 13) if t_grid is None else np.asarray(t_grid)
    if np.any(t_grid < 1.0):
        raise ValueError("the upper bound is stated for t / h^2 >= 1")
    pts = np.linspace(0.0, 1.0, n_lattice + 2)[1:-1]
    c = 0.0
    for t in t_grid:
        q = q_kernel(t, pts[:, None], pts[None, :])
        c = max(c, float(np.max(q * np.exp(np.pi ** 2 * t / 2.0))))
    logging.debug(f"Fitted upper kernel constant {c:.6g}.")
    return c


def fit_lower_constant(eps, t_grid=None, n_lattice=41):
    """Largest c with Q^1(t, x, y) >= c exp(-pi^2 t / 2) on [eps, 1 - eps]^2, t >= 1."""
    if not 0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    t_grid = np.linspace(1.0, 4.0, 13) if t_grid is None else np.asarray(t_grid)
    pts = np.linspace(eps, 1.0 - eps, n_lattice)
    c = np.inf
    for t in t_grid:
        q = q_kernel(t, pts[:, None], pts[None, :])
        c = min(c, float(np.min(q * np.exp(np.pi ** 2 * t / 2.0))))
    logging.debug(f"Fitted lower kernel constant {c:.6g} for eps={eps}.")
    return c


def fit_exit_constant(x_grid=None):
    """Smallest C with P(B[0, x] in (-1, 1)) <= C exp(-x pi^2 / 8) on a grid."""
    x_grid = np.linspace(0.25, 20.0, 80) if x_grid is None else np.asarray(x_grid)
    ratio = exit_time_survival(x_grid) * np.exp(x_grid * np.pi ** 2 / 8.0)
    return float(np.max(ratio))
