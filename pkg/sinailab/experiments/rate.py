# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

import logging

import numpy as np

from sinailab.experiments.base import Experiment
from sinailab.occupation import StepSpec, mc_tightness, occupation, rescale_measure
from sinailab.rate import in_K, rate, rate_of_measure, rate_of_spec, shrink

__all__ = ["random_spec", "RateExperiment", "TightnessExperiment"]


def random_spec(gen, max_N=6):
    """A random element of the step class with 1 .. max_N jumps."""
    N = int(gen.integers(1, max_N + 1))
    h = np.cumsum(0.05 + gen.exponential(1.0, N))
    signs = np.where(gen.random(N) < 0.5, -1.0, 1.0)
    x = np.empty(N)
    for sign in (1.0, -1.0):
        idx = np.flatnonzero(signs == sign)
        x[idx] = sign * np.sort(0.05 + gen.exponential(1.0, len(idx)))
    return StepSpec(h, x)


class RateExperiment(Experiment):
    """Rate function through the spec and through the envelopes of its measure."""

    verb = "rate"

    def _run(self):
        config = self.config
        stream = self.rng.substream("specs")
        dual = scaling = shrinking = 0.0
        n_in_K = 0
        for i in range(config["n_specs"]):
            spec = random_spec(stream.generator(i), config["max_N"])
            mu = occupation(spec, config["horizon_factor"] * float(spec.h[-1]))
            by_spec = rate_of_spec(spec).value
            by_measure = rate_of_measure(mu).value
            gap = abs(by_spec - by_measure)
            dual = max(dual, gap)
            for a in config["scales"]:
                scaled = rate(rescale_measure(mu, a))
                scaling = max(scaling, abs(scaled - by_measure) / by_measure)
            for eps in config["eps_grid"]:
                shrunk = rate(shrink(mu, eps))
                shrinking = max(shrinking, abs(shrunk - (1 - eps) * by_measure) / by_measure)
                shrunk_spec = rate(shrink(spec, eps))
                shrinking = max(shrinking, abs(shrunk_spec - (1 - eps) * by_spec) / by_spec)
            n_in_K += int(in_K(spec))
            self.rows.append(
                {"spec": i, "N": spec.N, "rate_spec": repr(by_spec),
                 "rate_envelopes": repr(by_measure), "gap": gap}
            )
        logging.info(
            f"Max dual-path gap {dual:.3g}, scaling {scaling:.3g}, shrink {shrinking:.3g}; "
            f"{n_in_K} of {config['n_specs']} specs in K."
        )
        self.check("rate.dual_path", dual)
        self.check("rate.scaling", scaling)
        self.check("rate.shrink", shrinking)
        self.summary = {
            "n_specs": config["n_specs"],
            "dual_path_gap": dual,
            "scaling_gap": scaling,
            "shrink_gap": shrinking,
            "in_K": n_in_K,
        }


class TightnessExperiment(Experiment):
    """Decay of P(m(x_B / M) outside Q_a) in M."""

    verb = "tightness"

    def _run(self):
        config = self.config
        fit = mc_tightness(
            a=config["a"],
            M_grid=config["M_grid"],
            n_particles=config["n_particles"],
            rng=self.rng,
            n_replicates=config["n_replicates"],
            dt=config["dt"],
            stage_time=config["stage_time"],
            extension=config["extension"],
            n_jobs=self.n_jobs,
        )
        logging.info(f"Slope {fit.slope:.4f} +- {fit.slope_std_error:.3g}, target {fit.target:.4f}")
        self.check("tightness.slope", fit.slope, value=fit.target)
        for M, est in zip(fit.grid, fit.estimates):
            self.rows.append(
                {"M": M, "estimate": est.estimate, "std_error": est.std_error,
                 "log_estimate": est.log_estimate}
            )
        self.summary = {"fit": fit.to_dict()}
