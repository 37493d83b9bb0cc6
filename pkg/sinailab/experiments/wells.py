# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

import logging

import numpy as np
from tqdm import tqdm

from sinailab.env import sample_brownian
from sinailab.experiments.base import Experiment
from sinailab.wells import (
    enumerate_wells,
    jump_prob_exact,
    mc_jump_prob,
    wells_bruteforce,
    wells_process,
    x_scaling_check,
)

__all__ = ["WellsExperiment", "JumpprobExperiment"]


class WellsExperiment(Experiment):
    """Fast process of wells against the brute-force oracle."""

    verb = "wells"

    def _run(self):
        config = self.config
        depths = np.linspace(config["depth_max"] / config["n_depths"], config["depth_max"],
                             config["n_depths"])
        stream = self.rng.substream("paths")
        mismatches = 0
        n_compared = 0
        unresolved = 0
        scaling_failures = 0
        saved = []
        for i in tqdm(range(config["n_paths"]), desc="[wells]"):
            path = sample_brownian(config["dt"], config["n_cells"], config["n_cells"],
                                   stream.generator(i))
            wp = wells_process(path)
            # the oracle reads the path as the whole environment, so compare
            # only where the process is certified
            certified = depths[depths <= wp.max_depth]
            fast = wp(certified)
            wells = enumerate_wells(path, method="bruteforce")
            slow = np.array([wells_bruteforce(path, h, wells) for h in certified])
            bad = int(np.sum(fast != slow))
            mismatches += bad
            n_compared += len(certified)
            if bad:
                logging.warning(f"path {i}: {bad} depths disagree with the oracle")
            if wp.resolved_depth < depths[-1]:
                unresolved += 1
            if i < config["n_scaling"]:
                ok = all(x_scaling_check(path, c) for c in config["scales"])
                scaling_failures += int(not ok)
            if i < config["n_saved"]:
                saved.append(path.values)
            self.rows.append(
                {"path": i, "jumps": len(wp), "max_depth": wp.max_depth,
                 "resolved_depth": wp.resolved_depth, "mismatches": bad}
            )
        if unresolved:
            logging.warning(
                f"{unresolved} paths resolve less than depth {depths[-1]:g}; "
                "deeper points were not compared"
            )
        logging.info(f"{mismatches} mismatches in {n_compared} comparisons.")
        self.check("wells.mismatches", mismatches)
        self.check("wells.x_scaling", scaling_failures == 0)
        self.summary = {
            "comparisons": n_compared,
            "mismatches": mismatches,
            "unresolved_paths": unresolved,
            "scaling_failures": scaling_failures,
        }
        if saved:
            self.paths["brownian/values"] = np.stack(saved)
            self.paths["brownian/dt"] = np.array(config["dt"])


class JumpprobExperiment(Experiment):
    """Monte Carlo of P(x_B(s) = x_B(t)) against the closed form."""

    verb = "jumpprob"

    def _run(self):
        config = self.config
        s, t = config["s"], config["t"]
        est = mc_jump_prob(
            s,
            t,
            config["n_samples"],
            self.rng,
            dt=config["dt"],
            length_factor=config["length_factor"],
            block_size=config["block_size"],
            n_jobs=self.n_jobs,
        )
        exact = jump_prob_exact(t / s)
        logging.info(
            f"P(x_B({s:g}) = x_B({t:g})) = {est.estimate:.5f} +- {est.std_error:.5f}, "
            f"exact {exact:.5f}"
        )
        self.check("jumpprob.prob", est.estimate, std_error=est.std_error, value=exact)
        self.rows.append(
            {"s": s, "t": t, "estimate": est.estimate, "std_error": est.std_error,
             "exact": exact, "hits": est.hits, "n_samples": est.n_samples}
        )
        self.summary = {"estimate": est.to_dict(), "exact": exact}
