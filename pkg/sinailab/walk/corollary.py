# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""The variational problem behind the weighted integrals of the walk.

    sup { int_0^1 gamma f : f nondecreasing, f(0) = 0, int_0^1 t^-2 df <= A }

with A = 8 / pi^2. Writing int gamma f = int Gamma df with
Gamma(s) = int_s^1 gamma, the objective is linear in df, so the whole
budget goes to one jump at the maximiser s0 of s^2 Gamma(s). When t^3 gamma
is nondecreasing, s0 solves 2 Gamma(s) = s gamma(s) and the supremum is
(A / 2) s0^3 gamma(s0).
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad
from scipy.optimize import brentq, linprog

from sinailab.occupation.step import StepFunction

__all__ = [
    "BUDGET",
    "CorollaryResult",
    "power_weight",
    "corollary_target",
    "s0_target",
    "variational_sup",
]

BUDGET = 8.0 / np.pi ** 2


def power_weight(r):
    """gamma(t) = t^r."""
    if not r >= 0:
        raise ValueError(f"r must be non-negative, got {r}")
    return lambda t: np.power(t, r)


def corollary_target(r):
    """(4 / pi^2) (2 / (r + 3))^((r + 3) / (r + 1))."""
    return 4.0 / np.pi ** 2 * (2.0 / (r + 3)) ** ((r + 3) / (r + 1))


def s0_target(r):
    """(2 / (r + 3))^(1 / (r + 1))."""
    return (2.0 / (r + 3)) ** (1.0 / (r + 1))


@dataclass(frozen=True)
class CorollaryResult:
    """Solution of the variational problem.

    Args:
        lp_value (float): Optimum of the grid linear program.
        greedy_value (float): Best single jump on the grid.
        closed_form (float): (A / 2) s0^3 gamma(s0), or None when t^3 gamma
            is not nondecreasing.
        s0 (float): Root of 2 Gamma(s) = s gamma(s), or None.
        optimizer (StepFunction): The single-jump maximiser on the grid.
        monotone (bool): Whether t^3 gamma is nondecreasing on the grid.

    """

    lp_value: float
    greedy_value: float
    closed_form: float
    s0: float
    optimizer: StepFunction
    monotone: bool

    @property
    def agreement(self):
        """Largest gap between the available values."""
        values = [self.lp_value, self.greedy_value]
        if self.closed_form is not None:
            values.append(self.closed_form)
        return float(max(values) - min(values))

    def to_dict(self):
        return {
            "lp_value": self.lp_value,
            "greedy_value": self.greedy_value,
            "closed_form": self.closed_form,
            "s0": self.s0,
            "jump": {
                "at": float(self.optimizer.times[0]),
                "size": float(self.optimizer.levels[0]),
            },
            "monotone": self.monotone,
            "agreement": self.agreement,
        }


def _tail_integral(gamma, s):
    return quad(gamma, s, 1.0, epsabs=1e-14, epsrel=1e-12, limit=200)[0]


def variational_sup(gamma, n_grid=10000, budget=BUDGET):
    """Solve the variational problem for a weight gamma on (0, 1].

    Args:
        gamma (callable): Non-negative vectorized weight.
        n_grid (int): Number of candidate jump points k / n_grid.
        budget (float): A.

    Returns:
        CorollaryResult: LP, greedy and closed-form values with s0.

    """
    if int(n_grid) < 2:
        raise ValueError(f"n_grid must be at least 2, got {n_grid}")
    t = np.arange(1, int(n_grid) + 1) / int(n_grid)
    g = np.asarray(gamma(t), dtype=np.float64)
    if np.any(g < 0):
        raise ValueError("gamma must be non-negative")
    # Gamma(t_k) by quadrature on a grid ten times finer
    fine = np.linspace(0.0, 1.0, 10 * int(n_grid) + 1)
    gf = np.asarray(gamma(np.maximum(fine, 1e-300)), dtype=np.float64)
    cum = cumulative_trapezoid(gf, fine, initial=0.0)
    tail = (cum[-1] - cum)[10::10]

    res = linprog(
        -tail,
        A_ub=(t ** -2.0)[None, :],
        b_ub=[budget],
        bounds=(0, None),
        method="highs",
    )
    if res.status != 0:
        raise RuntimeError(f"linear program failed: {res.message}")
    lp_value = float(-res.fun)

    k = int(np.argmax(t * t * tail))
    greedy_value = float(budget * t[k] ** 2 * tail[k])
    optimizer = StepFunction([t[k]], [budget * t[k] ** 2], 0.0, 1.0)

    monotone = bool(np.all(np.diff(t ** 3 * g) >= -1e-12))
    s0 = closed = None
    if monotone:
        s0 = brentq(
            lambda s: 2.0 * _tail_integral(gamma, s) - s * float(gamma(s)),
            1e-9, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps,
        )
        closed = float(budget / 2.0 * s0 ** 3 * float(gamma(s0)))
    else:
        logging.warning("t^3 gamma(t) is not nondecreasing, the closed form is withheld.")
    result = CorollaryResult(lp_value, greedy_value, closed, s0, optimizer, monotone)
    logging.info(
        f"LP {lp_value:.8f}, greedy {greedy_value:.8f}, closed form {closed}, s0 {s0}"
    )
    return result
