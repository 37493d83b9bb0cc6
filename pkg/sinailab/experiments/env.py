# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

import logging

import numpy as np
from tqdm import tqdm

from sinailab.env import EnvDistribution, sample_brownian, sample_env
from sinailab.experiments.base import Experiment

__all__ = ["EnvExperiment"]


def _mean_and_se(x):
    return float(np.mean(x)), float(np.std(x, ddof=1) / np.sqrt(len(x)))


def _variance_and_se(x):
    centered = x - x.mean()
    var = float(np.mean(centered ** 2))
    m4 = float(np.mean(centered ** 4))
    return var, float(np.sqrt(max(m4 - var * var, 0.0) / len(x)))


class EnvExperiment(Experiment):
    """Moment checks of sampled Brownian paths and site environments."""

    verb = "env"

    def _run(self):
        config = self.config
        dt, n_cells, n_paths = config["dt"], config["n_cells"], config["n_paths"]
        horizon = n_cells * dt
        stream = self.rng.substream("brownian")
        right_end = np.empty(n_paths)
        left_end = np.empty(n_paths)
        saved = []
        for i in tqdm(range(n_paths), desc="[env]"):
            path = sample_brownian(dt, n_cells, n_cells, stream.generator(i))
            right_end[i], left_end[i] = path.values[-1], path.values[0]
            if i < config["n_saved"]:
                saved.append(path.values)
        for side, ends in (("right", right_end), ("left", left_end)):
            mean, se = _mean_and_se(ends ** 2 / horizon)
            self.check("env.endpoint_variance", mean, std_error=se, label=side)
            self.rows.append(
                {"quantity": f"{side} B({horizon:g})^2 / {horizon:g}", "estimate": mean,
                 "std_error": se, "target": 1.0}
            )

        dist = EnvDistribution(config["kind"], config["law"], config["cutoff"])
        pot = sample_env(dist, config["n_sites"], self.rng.substream("sites"))
        log_odds = pot.log_odds
        mean, se = _mean_and_se(log_odds)
        var, var_se = _variance_and_se(log_odds)
        self.check("env.log_odds_mean", mean, std_error=se)
        self.check("env.log_odds_variance", var, std_error=var_se)
        self.rows += [
            {"quantity": "log-odds mean", "estimate": mean, "std_error": se, "target": 0.0},
            {"quantity": "log-odds variance", "estimate": var, "std_error": var_se, "target": 1.0},
        ]
        logging.info(
            f"Mean B^2 / t = {np.mean(right_end ** 2) / horizon:.4f}, log-odds mean {mean:.4f}, "
            f"variance {var:.4f} over {len(log_odds)} sites."
        )

        self.summary = {
            "n_paths": n_paths,
            "horizon": horizon,
            "n_sites": len(log_odds),
            "distribution": {"kind": dist.kind, "law": dist.law, "cutoff": dist.cutoff},
        }
        if saved:
            self.paths["brownian/values"] = np.stack(saved)
            self.paths["brownian/dt"] = np.array(dt)
        self.paths["potential/values"] = pot.values
        self.paths["potential/probs"] = pot.probs
