# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Versioned table of acceptance targets.

Every check an experiment performs is looked up here by name, so a results
file can be judged without the experiment that produced it. The integer
criterion id groups checks that belong to the same acceptance criterion.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["TARGETS_VERSION", "Target", "CriterionResult", "TARGETS", "evaluate"]

TARGETS_VERSION = "1.0"

# how a measured value is compared with a target
#   rel: |m - v| <= tol |v|        abs: |m - v| <= tol
#   se:  |m - v| <= tol * se       max: m <= tol
#   min: m >= tol                  bool: m is true
KINDS = ("rel", "abs", "se", "max", "min", "bool")


@dataclass(frozen=True)
class Target:
    """One entry of the target table.

    Args:
        criterion (int): Acceptance criterion id.
        name (str): Check name, "<verb>.<quantity>".
        value (float): Target value; None for one-sided checks.
        tolerance (float): Tolerance in the units of `kind`.
        kind (str): Comparison kind.
        description (str): Short description for reports.

    """

    criterion: int
    name: str
    value: float
    tolerance: float
    kind: str
    description: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown target kind {self.kind!r}, use {KINDS}")


PI2 = np.pi ** 2

TARGETS = {
    t.name: t
    for t in [
        Target(0, "env.endpoint_variance", 1.0, 3.0, "se", "E B(1)^2"),
        Target(0, "env.log_odds_mean", 0.0, 3.0, "se", "mean of sampled log-odds"),
        Target(0, "env.log_odds_variance", 1.0, 3.0, "se", "variance of sampled log-odds"),
        Target(1, "wells.mismatches", None, 0.0, "max", "fast vs brute-force wells"),
        Target(1, "wells.x_scaling", None, None, "bool", "x_{cB}(ch) = c^2 x_B(h)"),
        Target(2, "jumpprob.prob", (5.0 - 2.0 / np.e) / 12.0, 3.0, "se",
               "P(x_B(1) = x_B(2))"),
        Target(3, "confine.a.slope", -PI2 / 2, 0.02, "rel", "MC slope of event (a)"),
        Target(3, "confine.a.exact", -PI2 / 2, 1e-3, "rel", "series slope of event (a), t >= 1"),
        Target(4, "confine.b.slope", -PI2 / 8, 0.05, "rel", "MC slope of event (b)"),
        Target(5, "confine.c.ratio", -3 * PI2 / 8, 0.2, "rel", "log(P_c / P_b) slope"),
        Target(6, "blocks.slope", None, 0.10, "rel", "block cost slope"),
        Target(6, "blocks.Gamma.slope", None, 0.15, "rel", "Gamma block cost slope"),
        Target(7, "rate.dual_path", None, 1e-9, "max", "|rate_of_spec - rate_of_envelopes|"),
        Target(7, "rate.scaling", None, 1e-12, "max", "|I(mu_a) - I(mu)| / I(mu)"),
        Target(7, "rate.shrink", None, 1e-12, "max", "|I(mu_eps) - (1 - eps) I(mu)| / I(mu)"),
        Target(8, "corollary.value", None, 1e-6, "abs", "LP, greedy and closed form"),
        Target(8, "corollary.s0", None, 1e-10, "abs", "maximiser s0"),
        Target(9, "vessel.witness", None, 1.0, "min", "witness membership fraction"),
        Target(9, "vessel.profile", None, 1.0, "min", "depth and x-variation checks"),
        Target(9, "vessel.band", None, 0.35, "rel", "MC slope against -I"),
        Target(9, "vessel.refinement", None, None, "bool", "gap shrinks as (delta, eps) halves"),
        Target(10, "tightness.slope", None, 0.2, "rel", "slope against -a pi^2 / 8"),
        Target(11, "walk.localization", None, 0.5, "max", "median |S(n) - x_V(log n)| / (log n)^2"),
        Target(12, "walk.hitting_mean", 1.0, 3.0, "se", "E T"),
        Target(12, "walk.hitting_tail", -PI2 / 8, 0.05, "rel", "slope of log P(T > t)"),
        Target(12, "walk.inverse_tail", None, None, "bool", "P(1/T > x) <= 2 exp(-x / 2)"),
        Target(12, "walk.embedding", None, 0.01, "min", "chi-square p of the embedding"),
    ]
}


@dataclass(frozen=True)
class CriterionResult:
    """Outcome of one check."""

    criterion: int
    name: str
    measured: float
    target: float
    tolerance: float
    kind: str
    deviation: float
    passed: bool
    label: str = ""

    def to_dict(self):
        return {
            "criterion": self.criterion,
            "name": self.name,
            "label": self.label,
            "measured": self.measured,
            "target": self.target,
            "tolerance": self.tolerance,
            "kind": self.kind,
            "deviation": self.deviation,
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            criterion=int(d["criterion"]),
            name=d["name"],
            measured=d["measured"],
            target=d["target"],
            tolerance=d["tolerance"],
            kind=d["kind"],
            deviation=d["deviation"],
            passed=bool(d["passed"]),
            label=d.get("label", ""),
        )


def evaluate(name, measured, std_error=None, value=None, tolerance=None, label=""):
    """Judge a measured value against the table entry `name`.

    Args:
        name (str): Table entry.
        measured (float or bool): Measured value.
        std_error (float): Standard error, required for kind "se".
        value (float): Overrides the table value (for targets that depend
            on the configuration).
        tolerance (float): Overrides the table tolerance.
        label (str): Free text distinguishing repeated checks.

    Returns:
        CriterionResult: The verdict.

    """
    if name not in TARGETS:
        raise ValueError(f"unknown target {name!r}")
    t = TARGETS[name]
    value = t.value if value is None else float(value)
    tol = t.tolerance if tolerance is None else float(tolerance)
    if t.kind == "bool":
        passed = bool(measured)
        return CriterionResult(t.criterion, name, passed, None, None, t.kind, None, passed, label)
    measured = float(measured)
    if t.kind in ("rel", "abs", "se") and value is None:
        raise ValueError(f"target {name!r} needs a value")
    if t.kind == "rel":
        deviation = abs(measured - value) / abs(value)
        passed = deviation <= tol
    elif t.kind == "abs":
        deviation = abs(measured - value)
        passed = deviation <= tol
    elif t.kind == "se":
        if std_error is None:
            raise ValueError(f"target {name!r} needs a standard error")
        # in units of standard errors
        if std_error > 0:
            deviation = abs(measured - value) / std_error
        else:
            deviation = 0.0 if measured == value else np.inf
        passed = deviation <= tol
    elif t.kind == "max":
        deviation = measured
        passed = measured <= tol
    else:
        deviation = measured
        passed = measured >= tol
    return CriterionResult(
        t.criterion, name, measured, value, tol, t.kind, float(deviation), bool(passed), label
    )
