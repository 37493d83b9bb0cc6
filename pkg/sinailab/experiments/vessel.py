# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

import logging

import numpy as np
from tqdm import tqdm

from sinailab.experiments.base import Experiment
from sinailab.occupation import StepSpec
from sinailab.vessel import (
    InfeasibleGeometryError,
    VesselSpec,
    construct_witness,
    mc_vessel_prob,
    skorokhod_closeness,
    vessel_membership,
    vessel_rate_target,
)

__all__ = ["DEFAULT_LATTICE", "VesselExperiment"]

# (h, x) pairs covering one, two and three jumps and both sign orders
DEFAULT_LATTICE = [
    ([1.0], [1.0]),
    ([1.0], [-1.0]),
    ([1.0], [2.0]),
    ([1.0, 2.0], [1.0, -1.0]),
    ([1.0, 2.0], [-1.0, 1.0]),
    ([1.0, 2.0], [1.0, 3.0]),
    ([1.0, 2.0], [-1.0, -3.0]),
    ([1.0, 2.0], [2.0, -1.0]),
    ([1.0, 2.0, 3.0], [1.0, -1.0, 3.0]),
    ([1.0, 2.0, 3.0], [1.0, -1.0, -3.0]),
    ([1.0, 2.0, 3.0], [-1.0, 1.0, 3.0]),
    ([1.0, 2.0, 3.0], [1.0, 3.0, -1.0]),
]


def _rate_gap(vspec):
    target = vessel_rate_target(vspec)
    return abs(target["rate"] + target["I"]), target


class VesselExperiment(Experiment):
    """Witness membership, well-depth checks and the vessel probability."""

    verb = "vessel"

    def _run(self):
        config = self.config
        delta, eps = config["delta"], config["eps"]
        lattice = config["lattice"] or [{"h": h, "x": x} for h, x in DEFAULT_LATTICE]
        witnessed = closeness_ok = 0
        refinement_ok = True
        for k, entry in enumerate(tqdm(lattice, desc="[vessel]")):
            spec = StepSpec(entry["h"], entry["x"])
            row = {"spec": k, "h": spec.h.tolist(), "x": spec.x.tolist()}
            try:
                vspec = VesselSpec(spec, delta, eps)
                halved = [VesselSpec(spec, delta / m, eps / m) for m in (2, 4)]
            except InfeasibleGeometryError as e:
                logging.warning(f"spec {k} {spec}: {e}")
                row["status"] = "infeasible"
                self.rows.append(row)
                continue
            witness = construct_witness(vspec)
            member = vessel_membership(witness, vspec)
            row["member"] = member.passed
            if member:
                witnessed += 1
                closeness = skorokhod_closeness(witness, vspec)
                closeness_ok += int(closeness.passed)
                row.update(
                    {"distance": closeness.distance, "bound": closeness.bound,
                     "depths": [float(v) for v in closeness.profile.v],
                     "profile": bool(closeness.profile.passed),
                     "sandwich": all(c.passed for c in closeness.sandwich)}
                )
            else:
                failure = member.first_failure
                logging.warning(f"witness of spec {k} fails {failure.name}: {failure.reason}")
            gap, target = _rate_gap(vspec)
            # the first-order term of the gap dominates from one halving on
            half_gap, quarter_gap = (_rate_gap(v)[0] for v in halved)
            refinement_ok &= quarter_gap < half_gap
            row.update({"I": target["I"], "exact_rate": target["rate"],
                        "gap": gap, "half_gap": half_gap, "quarter_gap": quarter_gap,
                        "status": "ok"})
            self.rows.append(row)
            if k < config["n_saved"]:
                self.paths[f"witness/{k}/values"] = witness.values
                self.paths[f"witness/{k}/dt"] = np.array(witness.dt)

        n = len(lattice)
        logging.info(
            f"{witnessed} of {n} witnesses are members, {closeness_ok} pass the depth checks."
        )
        self.check("vessel.witness", witnessed / n)
        self.check("vessel.profile", closeness_ok / max(witnessed, 1))
        summary = {"n_specs": n, "witnessed": witnessed, "closeness_passed": closeness_ok}

        mc_index = config["mc_index"]
        if mc_index is not None:
            entry = lattice[mc_index]
            # E_0 barriers last |x| delta^2; the Monte Carlo vessel has its own delta, eps
            vspec = VesselSpec(StepSpec(entry["h"], entry["x"]), config["mc_delta"], config["mc_eps"])
            kwargs = {"method": config["method"], "n_replicates": config["n_replicates"],
                      "n_jobs": self.n_jobs}
            fit, mc_summary = mc_vessel_prob(
                vspec, config["M_grid"], config["n_samples"], self.rng.substream("mc"),
                dt=config["dt"], band=config["band"], **kwargs,
            )
            self.check("vessel.band", fit.slope, value=-mc_summary["I"],
                       tolerance=config["band"], label=f"spec {mc_index}")
            summary["mc"] = {"vessel": vspec.to_dict(), "fit": fit.to_dict(), **mc_summary}
            if config["mc_refine"]:
                finer = VesselSpec(vspec.spec, vspec.delta / 2, vspec.eps / 2)
                finer_fit, _ = mc_vessel_prob(
                    finer, config["M_grid"], config["n_samples"],
                    self.rng.substream("mc-refined"), dt=config["dt"], band=config["band"],
                    **kwargs,
                )
                I = mc_summary["I"]
                mc_gap, finer_mc_gap = abs(fit.slope + I), abs(finer_fit.slope + I)
                logging.info(f"MC gap to -I: {mc_gap:.4f} at (delta, eps), {finer_mc_gap:.4f} halved")
                refinement_ok &= finer_mc_gap < mc_gap
                summary["mc_refined"] = {"fit": finer_fit.to_dict(), "gap": finer_mc_gap}
        self.check("vessel.refinement", refinement_ok)
        self.summary = summary
