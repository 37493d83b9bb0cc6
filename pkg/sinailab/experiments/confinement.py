# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

import logging

import numpy as np

from sinailab.confinement import (
    event_exact,
    event_target,
    mc_block_cost,
    mc_floor_ratio,
    mc_rate,
)
from sinailab.experiments.base import Experiment

__all__ = ["ConfineExperiment", "BlocksExperiment"]


def _mc_kwargs(config, n_jobs):
    kwargs = {
        "method": config["method"],
        "n_replicates": config["n_replicates"],
        "n_jobs": n_jobs,
    }
    if config.get("stage_time") is not None:
        kwargs["stage_time"] = config["stage_time"]
    return kwargs


def _fit_rows(fit, **extra):
    rows = []
    for x, est in zip(fit.grid, fit.estimates):
        row = {fit.variable: x}
        row.update(extra)
        row.update(
            {"estimate": est.estimate, "std_error": est.std_error,
             "log_estimate": est.log_estimate, "log_std_error": est.log_std_error}
        )
        rows.append(row)
    return rows


class ConfineExperiment(Experiment):
    """Decay rates of the confinement events (a), (b) and the floor ratio (c)."""

    verb = "confine"

    def _run(self):
        config = self.config
        event, h, eps = config["event"], config["h"], config["eps"]
        t_grid = np.asarray(config["t_grid"], dtype=np.float64)
        kwargs = _mc_kwargs(config, self.n_jobs)
        if event == "c":
            fit = mc_floor_ratio(t_grid, config["n_samples"], self.rng, h=h, eps=eps,
                                 K=config["K"], dt=config["dt"], **kwargs)
            self.check("confine.c.ratio", fit.slope, value=fit.target)
            self.rows = _fit_rows(fit, event="c/b")
            self.summary = {"fit": fit.to_dict()}
            logging.info(f"Log-ratio slope {fit.slope:.4f}, target {fit.target:.4f}")
            return

        fit = mc_rate(event, t_grid, config["n_samples"], self.rng, h=h, eps=eps,
                      w=config["w"], z=config["z"], K=config["K"], dt=config["dt"], **kwargs)
        self.check(f"confine.{event}.slope", fit.slope, value=fit.target)
        exact = np.array([event_exact(event, t, h, eps, config["w"], config["z"]) for t in t_grid])
        self.rows = _fit_rows(fit, event=event)
        for row, p in zip(self.rows, exact):
            row["exact"] = p
            row["relative_deviation"] = abs(row["estimate"] - p) / p
        summary = {"fit": fit.to_dict(), "exact": exact.tolist()}
        if event == "a":
            # higher modes are damped by exp(-3 pi^2 t / (2 h^2)) relative to the first
            late = t_grid >= h * h
            if np.sum(late) >= 2:
                slope = float(np.polyfit(t_grid[late], np.log(exact[late]), 1)[0])
                self.check("confine.a.exact", slope, value=event_target("a", h))
                summary["exact_slope"] = slope
            else:
                logging.warning(f"need two grid points with t >= {h * h:g} for the series slope")
        logging.info(
            f"Event {event}: slope {fit.slope:.4f} +- {fit.slope_std_error:.3g}, "
            f"target {fit.target:.4f}"
        )
        self.summary = summary


class BlocksExperiment(Experiment):
    """Monte Carlo block costs against their closed forms."""

    verb = "blocks"

    def _run(self):
        config = self.config
        kwargs = _mc_kwargs(config, self.n_jobs)
        fits = {}
        for kind in config["kinds"]:
            fit = mc_block_cost(
                kind,
                config["n_samples"],
                self.rng,
                M_grid=config["M_grid"],
                x=config["x"],
                y=config["y"],
                h=config["h"],
                h2=config["h2"],
                eps=config["eps"],
                delta=config["delta"],
                dt=config["dt"],
                **kwargs,
            )
            name = "blocks.Gamma.slope" if kind == "Gamma" else "blocks.slope"
            self.check(name, fit.slope, value=fit.target, label=kind)
            self.rows += _fit_rows(fit, kind=kind)
            fits[kind] = fit.to_dict()
            logging.info(f"Block {kind}: slope {fit.slope:.4f}, target {fit.target:.4f}")
        self.summary = {"fits": fits}
