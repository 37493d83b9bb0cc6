# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

import logging
import os
import platform
import tempfile

import numba
import numpy as np
import ot
import scipy

import sinailab
from sinailab.experiments.targets import TARGETS_VERSION, evaluate
from sinailab.utils import (
    RandomStream,
    content_hash,
    sha256_file,
    write_csv,
    write_hdf5,
    write_json,
)

__all__ = ["Experiment", "EXIT_OK", "EXIT_FAILURE", "EXIT_CONFIG", "EXIT_ACCEPTANCE", "input_hash"]

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_ACCEPTANCE = 3

# keys that do not change any output byte
_VOLATILE_KEYS = ("outdir", "n_jobs", "verbose", "config", "version")


def input_hash(config):
    """sha256 of the canonical JSON of the config keys that affect the results."""
    return content_hash({k: v for k, v in config.items() if k not in _VOLATILE_KEYS})


def library_versions():
    return {
        "sinailab": sinailab.__version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
        "pot": ot.__version__,
        "python": platform.python_version(),
    }


class Experiment(object):
    """Base class of the runnable experiments, one per CLI verb."""

    verb = None

    def __init__(self, config, outdir=None):
        """Initialize experiment.

        Args:
            config (dict): Config dict loaded from yaml format configuration file.
            outdir (str): Directory of the artifacts. Defaults to config["outdir"].

        """
        self.config = config
        self.outdir = config["outdir"] if outdir is None else outdir
        self.rng = RandomStream(config.get("seed", 0), self.verb)
        self.n_jobs = config.get("n_jobs", 1)
        self.criteria = []
        self.rows = []
        self.summary = {}
        self.paths = {}

    def run(self):
        """Run the experiment and write its artifacts.

        Returns:
            int: EXIT_OK, or EXIT_ACCEPTANCE if a check failed.

        """
        logging.info(f"Start {self.verb} experiment.")
        self._run()
        self.save()
        failed = [c for c in self.criteria if not c.passed]
        for c in self.criteria:
            level = logging.INFO if c.passed else logging.WARNING
            logging.log(
                level,
                f"[{c.criterion}] {c.name} {c.label}: measured {c.measured}, "
                f"target {c.target}, {'passed' if c.passed else 'FAILED'}",
            )
        logging.info(
            f"Finished {self.verb} experiment: {len(self.criteria) - len(failed)} of "
            f"{len(self.criteria)} checks passed."
        )
        return EXIT_ACCEPTANCE if failed else EXIT_OK

    def _run(self):
        """Fill self.criteria, self.rows, self.summary and self.paths."""
        raise NotImplementedError

    def check(self, name, measured, **kwargs):
        """Evaluate a check against the target table and record it."""
        result = evaluate(name, measured, **kwargs)
        self.criteria.append(result)
        return result

    def save(self):
        """Write results, the per-point table, the path archive and the manifest."""
        os.makedirs(self.outdir, exist_ok=True)
        artifacts = []

        results_path = os.path.join(self.outdir, "results.json")
        write_json(
            {
                "verb": self.verb,
                "targets_version": TARGETS_VERSION,
                "criteria": [c.to_dict() for c in self.criteria],
                "summary": self.summary,
            },
            results_path,
        )
        artifacts.append(results_path)

        if len(self.rows) > 0:
            fmt = self.config.get("format", "csv")
            table_path = os.path.join(self.outdir, f"{self.verb}.{fmt}")
            if fmt == "csv":
                fieldnames = []
                for row in self.rows:
                    fieldnames += [k for k in row if k not in fieldnames]
                write_csv(self.rows, table_path, fieldnames=fieldnames)
            else:
                write_json(self.rows, table_path)
            artifacts.append(table_path)

        if self.config.get("save_paths", False) and len(self.paths) > 0:
            h5_path = os.path.join(self.outdir, "paths.h5")
            fd, tmp_path = tempfile.mkstemp(dir=self.outdir, prefix=".paths.h5.")
            os.close(fd)
            os.remove(tmp_path)
            for name in sorted(self.paths):
                write_hdf5(tmp_path, name, self.paths[name])
            os.replace(tmp_path, h5_path)
            artifacts.append(h5_path)
            logging.info(f"Saved {len(self.paths)} path datasets to {h5_path}.")

        manifest = {
            "verb": self.verb,
            "config": {k: v for k, v in self.config.items() if k not in ("config", "verbose")},
            "input_hash": input_hash(self.config),
            "versions": library_versions(),
            "artifacts": {os.path.basename(p): sha256_file(p) for p in artifacts},
        }
        write_json(manifest, os.path.join(self.outdir, "manifest.json"))
        logging.info(f"Saved {len(artifacts)} artifacts and the manifest to {self.outdir}.")
