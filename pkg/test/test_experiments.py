# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

import os

import numpy as np
import pytest

from sinailab.experiments import (
    EXIT_OK,
    TARGETS,
    VERBS,
    ConfigError,
    CriterionResult,
    RateExperiment,
    Target,
    apply_defaults,
    evaluate,
    input_hash,
    load_schema,
    validate_config,
)
from sinailab.utils import read_json, sha256_file

PI2 = np.pi ** 2


@pytest.mark.parametrize(
    "name, measured, kwargs, passed",
    [
        ("confine.a.slope", -PI2 / 2 * 1.01, {}, True),
        ("confine.a.slope", -PI2 / 2 * 1.03, {}, False),
        ("walk.hitting_mean", 1.01, {"std_error": 0.005}, True),
        ("walk.hitting_mean", 1.02, {"std_error": 0.005}, False),
        ("walk.hitting_mean", 1.0, {"std_error": 0.0}, True),
        ("wells.mismatches", 0, {}, True),
        ("wells.mismatches", 1, {}, False),
        ("vessel.witness", 1.0, {}, True),
        ("vessel.witness", 0.9, {}, False),
        ("corollary.s0", 0.5 + 1e-11, {"value": 0.5}, True),
        ("blocks.slope", -1.05, {"value": -1.0}, True),
        ("blocks.slope", -1.05, {"value": -1.0, "tolerance": 0.01}, False),
    ],
)
def test_evaluate(name, measured, kwargs, passed):
    result = evaluate(name, measured, **kwargs)
    assert result.passed is passed
    assert result.criterion == TARGETS[name].criterion


def test_evaluate_bool_targets():
    result = evaluate("wells.x_scaling", True, label="c=2")
    assert result.passed and result.measured is True
    assert result.label == "c=2"
    assert not evaluate("vessel.refinement", False).passed


def test_evaluate_rejects_incomplete_input():
    with pytest.raises(ValueError):
        evaluate("no.such.check", 1.0)
    with pytest.raises(ValueError):
        evaluate("blocks.slope", -1.0)
    with pytest.raises(ValueError):
        evaluate("walk.hitting_mean", 1.0)
    with pytest.raises(ValueError):
        Target(0, "x", 1.0, 1.0, "median")


def test_criterion_result_round_trip():
    result = evaluate("confine.b.slope", -1.2, label="t=1..4")
    back = CriterionResult.from_dict(result.to_dict())
    assert back == result


def test_targets_are_named_by_verb():
    for name in TARGETS:
        assert name.split(".")[0] in VERBS


@pytest.mark.parametrize("verb", VERBS)
def test_schema_defaults_are_valid(verb):
    config = apply_defaults(verb, {"verb": verb, "outdir": "exp"})
    validate_config(verb, config)
    assert load_schema(verb)["properties"]["verb"]["const"] == verb


def test_apply_defaults_keeps_given_values():
    config = apply_defaults("rate", {"verb": "rate", "outdir": "exp", "n_specs": 3})
    assert config["n_specs"] == 3
    assert config["max_N"] == 6
    assert config["seed"] == 0


def test_config_errors_list_every_field():
    config = apply_defaults("rate", {"verb": "rate", "outdir": "exp"})
    config.update({"n_specs": 0, "seed": -1, "bogus": 1})
    with pytest.raises(ConfigError) as excinfo:
        validate_config("rate", config)
    assert len(excinfo.value.errors) == 3
    assert isinstance(excinfo.value, ValueError)


@pytest.mark.parametrize(
    "verb, update",
    [
        ("jumpprob", {"s": 3.0, "t": 2.0}),
        ("confine", {"t_grid": [2.0, 1.0]}),
        ("vessel", {"mc_index": 12}),
        ("vessel", {"lattice": [{"h": [1.0], "x": [1.0]}], "mc_index": 1}),
    ],
)
def test_cross_field_errors(verb, update):
    config = apply_defaults(verb, {"verb": verb, "outdir": "exp", **update})
    with pytest.raises(ConfigError):
        validate_config(verb, config)


def test_unknown_verb():
    with pytest.raises(ValueError):
        load_schema("sinai")


def test_input_hash_ignores_volatile_keys():
    config = apply_defaults("rate", {"verb": "rate", "outdir": "a"})
    moved = dict(config, outdir="b", n_jobs=4, version="9.9")
    assert input_hash(config) == input_hash(moved)
    assert input_hash(config) != input_hash(dict(config, seed=1))


def test_rate_experiment_writes_artifacts(tmp_path):
    outdir = str(tmp_path / "rate")
    config = apply_defaults("rate", {"verb": "rate", "outdir": outdir, "n_specs": 5})
    status = RateExperiment(config).run()
    assert status == EXIT_OK
    results = read_json(os.path.join(outdir, "results.json"))
    assert [c["name"] for c in results["criteria"]] == [
        "rate.dual_path", "rate.scaling", "rate.shrink"
    ]
    assert all(c["passed"] for c in results["criteria"])
    assert results["summary"]["n_specs"] == 5
    manifest = read_json(os.path.join(outdir, "manifest.json"))
    assert manifest["input_hash"] == input_hash(config)
    assert set(manifest["artifacts"]) == {"results.json", "rate.csv"}
    for name, digest in manifest["artifacts"].items():
        assert sha256_file(os.path.join(outdir, name)) == digest


def test_experiment_json_table(tmp_path):
    outdir = str(tmp_path / "rate")
    config = apply_defaults(
        "rate", {"verb": "rate", "outdir": outdir, "n_specs": 2, "format": "json"}
    )
    RateExperiment(config).run()
    rows = read_json(os.path.join(outdir, "rate.json"))
    assert [row["spec"] for row in rows] == [0, 1]
