#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Run one sinailab experiment and write its artifacts."""

import argparse
import logging
import os
import sys

import yaml

import sinailab
import sinailab.experiments
from sinailab.experiments import (
    EXIT_CONFIG,
    EXIT_FAILURE,
    VERBS,
    ConfigError,
    apply_defaults,
    input_hash,
    validate_config,
)
from sinailab.utils import default_lab_dir, read_json, register_run
from sinailab.utils.types import (
    float_or_none,
    float_range,
    int_or_none,
    sci_int,
    str2bool,
)

# command line keys that are not part of an experiment config
_CLI_KEYS = ("verb", "config", "verbose", "outdir")


def get_parser():
    # options left out on the command line do not appear in the namespace,
    # so only the given ones override the config
    parser = argparse.ArgumentParser(
        description=(
            "Run a sinailab experiment " "(See detail in sinailab/bin/sinai_run.py)."
        ),
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("verb", type=str, choices=VERBS, help="experiment to run.")
    parser.add_argument(
        "--config",
        default=None,
        type=str,
        help=(
            "yaml format configuration file, or the manifest.json of an earlier run "
            "to reproduce it. if not provided, the schema defaults are used. (default=None)"
        ),
    )
    parser.add_argument(
        "--outdir",
        default=None,
        type=str,
        help="directory to save the artifacts. (default=$SINAI_LAB_DIR/<verb>)",
    )
    parser.add_argument("--seed", type=int, help="master seed.")
    parser.add_argument("--n-jobs", dest="n_jobs", type=int, help="number of parallel workers.")
    parser.add_argument(
        "--format", type=str, choices=["csv", "json"], help="per-point table format."
    )
    parser.add_argument(
        "--save-paths",
        dest="save_paths",
        type=str2bool,
        help="whether to archive sampled paths in paths.h5.",
    )
    parser.add_argument(
        "--samples", dest="n_samples", type=sci_int, help="samples per grid point."
    )
    parser.add_argument("--event", type=str, help="confinement event (a, b or c).")
    parser.add_argument(
        "--t-grid", dest="t_grid", type=float_range, help="times, start:stop:step."
    )
    parser.add_argument(
        "--M-grid", dest="M_grid", type=float_range, help="scales, start:stop:step."
    )
    parser.add_argument(
        "--kinds",
        type=lambda s: [k.strip() for k in s.split(",") if k.strip()],
        help="block kinds, comma separated.",
    )
    parser.add_argument("--method", type=str, help="auto, plain or splitting.")
    parser.add_argument(
        "--stage-time",
        dest="stage_time",
        type=float_or_none,
        help="splitting stage length. none picks it from the forecast rate.",
    )
    parser.add_argument("--z", type=float_or_none, help="start of event a. none is the midpoint.")
    parser.add_argument("--r", type=float_range, help="weight exponents.")
    parser.add_argument("--a", type=float, help="strip bound of the tightness set.")
    parser.add_argument("--delta", type=float, help="vessel block length.")
    parser.add_argument("--eps", type=float, help="margin parameter.")
    parser.add_argument(
        "--mc-index",
        dest="mc_index",
        type=int_or_none,
        help="lattice entry of the vessel Monte Carlo. none skips it.",
    )
    parser.add_argument(
        "--n-paths", dest="n_paths", type=sci_int, help="number of sampled paths."
    )
    parser.add_argument(
        "--n-envs", dest="n_envs", type=sci_int, help="number of environments."
    )
    parser.add_argument("--n-steps", dest="n_steps", type=sci_int, help="walk length.")
    parser.add_argument(
        "--n-draws", dest="n_draws", type=sci_int, help="hitting-time draws."
    )
    parser.add_argument(
        "--verbose",
        type=int,
        default=1,
        help="logging level. higher is more logging. (default=1)",
    )
    return parser


def load_config(path):
    """Load a yaml config; a manifest yields the config it echoes."""
    if path.endswith(".json"):
        config = read_json(path)
    else:
        with open(path) as f:
            config = yaml.load(f, Loader=yaml.Loader)
    if config is None:
        return {}
    if "artifacts" in config and "config" in config:
        logging.info(f"Reproducing the run described by {path}.")
        config = config["config"]
    return dict(config)


def main(argv=None):
    """Run experiment."""
    args = get_parser().parse_args(argv)

    # set logger
    if args.verbose > 1:
        logging.basicConfig(
            level=logging.DEBUG,
            stream=sys.stdout,
            format="%(asctime)s (%(module)s:%(lineno)d) %(levelname)s: %(message)s",
        )
    elif args.verbose > 0:
        logging.basicConfig(
            level=logging.INFO,
            stream=sys.stdout,
            format="%(asctime)s (%(module)s:%(lineno)d) %(levelname)s: %(message)s",
        )
    else:
        logging.basicConfig(
            level=logging.WARN,
            stream=sys.stdout,
            format="%(asctime)s (%(module)s:%(lineno)d) %(levelname)s: %(message)s",
        )
        logging.warning("Skip DEBUG/INFO messages")

    # load config
    config = {} if args.config is None else load_config(args.config)
    if config.get("verb", args.verb) != args.verb:
        logging.warning(f"config is for {config['verb']}, running {args.verb}")
    config.pop("version", None)
    config.update(
        {k: v for k, v in vars(args).items() if k not in _CLI_KEYS}
    )
    config["verb"] = args.verb
    if args.outdir is not None:
        config["outdir"] = args.outdir
    elif "outdir" not in config:
        config["outdir"] = os.path.join(default_lab_dir(), args.verb)
    config = apply_defaults(args.verb, config)
    try:
        validate_config(args.verb, config)
    except ConfigError as e:
        for message in e.errors:
            logging.error(message)
        sys.exit(EXIT_CONFIG)
    config["version"] = sinailab.__version__

    # check directory existence
    outdir = config["outdir"]
    if not os.path.exists(outdir):
        os.makedirs(outdir)

    # save config
    with open(os.path.join(outdir, "config.yml"), "w") as f:
        yaml.dump(config, f, Dumper=yaml.Dumper)
    for key, value in config.items():
        logging.info(f"{key} = {value}")

    # run experiment
    experiment_class = getattr(sinailab.experiments, f"{args.verb.capitalize()}Experiment")
    experiment = experiment_class(config=config)
    try:
        status = experiment.run()
    except Exception as e:
        logging.error(f"{type(e).__name__}: {e}")
        logging.debug("Traceback of the failure:", exc_info=True)
        status = EXIT_FAILURE

    register_run(outdir, args.verb, input_hash(config), status)
    sys.exit(status)


if __name__ == "__main__":
    main()
