# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Validation of experiment configs against the shipped JSON schemas."""

import json
import os

from jsonschema import Draft7Validator

from sinailab.experiments.vessel import DEFAULT_LATTICE

__all__ = ["VERBS", "ConfigError", "load_schema", "validate_config", "apply_defaults"]

VERBS = (
    "env",
    "wells",
    "rate",
    "confine",
    "blocks",
    "vessel",
    "walk",
    "corollary",
    "jumpprob",
    "tightness",
)

SCHEMA_DIR = os.path.join(os.path.dirname(__file__), "schemas")


class ConfigError(ValueError):
    """A config violates its schema; `errors` lists every offending field."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


def load_schema(verb):
    if verb not in VERBS:
        raise ValueError(f"unknown verb {verb!r}, use one of {VERBS}")
    with open(os.path.join(SCHEMA_DIR, f"{verb}.json"), "r") as f:
        return json.load(f)


def _increasing(values):
    return all(a < b for a, b in zip(values[:-1], values[1:]))


def _cross_field_errors(verb, config):
    """Constraints between fields that a JSON schema cannot express."""
    errors = []
    if verb == "jumpprob" and config.get("s", 0) > config.get("t", 0):
        errors.append(f"s: {config['s']} must not exceed t = {config['t']}")
    for key in ("t_grid", "M_grid"):
        values = config.get(key)
        if isinstance(values, list) and not _increasing(values):
            errors.append(f"{key}: {values} must be strictly increasing")
    if verb == "vessel" and config.get("mc_index") is not None:
        n_specs = len(config.get("lattice") or DEFAULT_LATTICE)
        if config["mc_index"] >= n_specs:
            errors.append(f"mc_index: {config['mc_index']} is not below the {n_specs} lattice specs")
    return errors


def validate_config(verb, config):
    """Check a config and raise ConfigError listing every violation.

    Args:
        verb (str): Experiment verb.
        config (dict): Merged config.

    """
    validator = Draft7Validator(load_schema(verb))
    errors = sorted(
        validator.iter_errors(config), key=lambda e: [str(p) for p in e.absolute_path]
    )
    messages = []
    for e in errors:
        where = ".".join(str(p) for p in e.absolute_path) or "<config>"
        messages.append(f"{where}: {e.message}")
    if not messages:
        messages = _cross_field_errors(verb, config)
    if messages:
        raise ConfigError(messages)


def apply_defaults(verb, config):
    """Fill the keys missing from `config` with the schema defaults.

    Returns:
        dict: A new config; explicitly given values are kept.

    """
    schema = load_schema(verb)
    merged = {
        key: prop["default"]
        for key, prop in schema["properties"].items()
        if "default" in prop
    }
    merged.update(config)
    return merged
