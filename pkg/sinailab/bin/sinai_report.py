#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Aggregate the results of sinailab runs into one table."""

import argparse
import logging
import os
import sys
from collections import defaultdict

from prettytable import PrettyTable

from sinailab.experiments import (
    EXIT_ACCEPTANCE,
    EXIT_OK,
    TARGETS,
    TARGETS_VERSION,
    CriterionResult,
)
from sinailab.utils import find_files, read_json, write_csv


def collect(run_dirs):
    """Criteria of every results.json found under run_dirs, keyed by criterion id.

    Args:
        run_dirs (list): Run directories or roots that contain several runs.

    Returns:
        dict: Criterion id -> list of (run directory, CriterionResult).

    """
    grouped = defaultdict(list)
    for run_dir in run_dirs:
        for path in find_files(run_dir, "results.json"):
            results = read_json(path)
            if results.get("targets_version") != TARGETS_VERSION:
                logging.warning(
                    f"{path} was judged with targets {results.get('targets_version')}, "
                    f"this report uses {TARGETS_VERSION}"
                )
            for item in results["criteria"]:
                grouped[int(item["criterion"])].append(
                    (os.path.dirname(path), CriterionResult.from_dict(item))
                )
    return dict(grouped)


def _fmt(value):
    if value is None:
        return "-"
    if isinstance(value, bool):
        return str(value)
    return f"{value:.6g}"


def make_table(grouped):
    """PrettyTable with one row per check, grouped by criterion id."""
    table = PrettyTable()
    table.field_names = [
        "criterion", "check", "label", "run", "measured", "target", "tolerance", "deviation", "result",
    ]
    table.align = "l"
    for criterion in sorted(grouped):
        for run_dir, c in grouped[criterion]:
            table.add_row(
                [
                    criterion,
                    c.name,
                    c.label,
                    run_dir,
                    _fmt(c.measured),
                    _fmt(c.target),
                    f"{_fmt(c.tolerance)} ({c.kind})",
                    _fmt(c.deviation),
                    "pass" if c.passed else "FAIL",
                ]
            )
    return table


def main(argv=None):
    """Run report generation."""
    parser = argparse.ArgumentParser(
        description=(
            "Merge sinailab results into one table "
            "(See detail in sinailab/bin/sinai_report.py)."
        )
    )
    parser.add_argument(
        "run_dirs", nargs="*", type=str, help="run directories or roots containing runs."
    )
    parser.add_argument(
        "--csv", default=None, type=str, help="also write the table to this csv file."
    )
    parser.add_argument(
        "--verbose",
        type=int,
        default=1,
        help="logging level. higher is more logging. (default=1)",
    )
    args = parser.parse_args(argv)

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

    grouped = collect(args.run_dirs)
    table = make_table(grouped)
    print(table)
    n_checks = sum(len(v) for v in grouped.values())
    n_failed = sum(not c.passed for v in grouped.values() for _, c in v)
    logging.info(
        f"{n_checks} checks in {len(grouped)} criteria, {n_failed} failed "
        f"(targets version {TARGETS_VERSION}, {len(TARGETS)} known checks)."
    )
    if args.csv is not None:
        rows = [
            {"run": run_dir, **c.to_dict()}
            for criterion in sorted(grouped)
            for run_dir, c in grouped[criterion]
        ]
        fieldnames = ["run"] + list(CriterionResult.__dataclass_fields__)
        write_csv(rows, args.csv, fieldnames=fieldnames)
    sys.exit(EXIT_ACCEPTANCE if n_failed else EXIT_OK)


if __name__ == "__main__":
    main()
