"""Experiment configuration: strict JSON schema and benchmark presets."""

from __future__ import annotations

import json
import math

import jsonschema

SCHEMA_VERSION = 1

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "model", "sites", "model_params", "seed",
                 "m_list", "tau_grid", "backend"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "model": {"enum": ["tfim", "fermi_hubbard"]},
        "sites": {"type": "integer", "minimum": 2},
        "model_params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "coupling": {"type": "number"},
                "field": {"type": "number"},
                "hopping": {"type": "number"},
                "interaction": {"type": "number"},
                "n_up": {"type": "integer", "minimum": 0},
                "n_down": {"type": "integer", "minimum": 0},
                "boundary": {"enum": ["open", "periodic"]},
                "observable_spins": {
                    "type": "array",
                    "items": {"enum": ["up", "down"]},
                    "minItems": 1,
                    "uniqueItems": True,
                },
            },
        },
        "seed": {"type": "integer"},
        "m_list": {
            "type": "array",
            "items": {"type": "integer", "minimum": 0},
            "minItems": 1,
        },
        "tau_grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["min", "max", "count"],
            "properties": {
                "min": {"type": "number", "minimum": 0},
                "max": {"type": "number", "exclusiveMinimum": 0},
                "count": {"type": "integer", "minimum": 2},
            },
        },
        "backend": {"enum": ["exact", "stepped"]},
        "windows": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "energy_sum": {
                    "type": "array", "items": {"type": "number"},
                    "minItems": 2, "maxItems": 2,
                },
                "second_gap": {
                    "type": "array", "items": {"type": "number"},
                    "minItems": 2, "maxItems": 2,
                },
            },
        },
        "tau_selection": {"enum": ["largest_tau", "min_slope"]},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "trajectory_csv": {"type": "string"},
                "estimates_json": {"type": "string"},
            },
        },
    },
}

DEFAULT_WINDOWS = {"energy_sum": [1.0, 8.0], "second_gap": [1.0, 6.0]}


class ConfigError(ValueError):
    pass


def validate_config(config: dict) -> dict:
    """Validate against the strict schema and fill optional defaults."""
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}") from exc
    cfg = json.loads(json.dumps(config))  # deep copy, keeps it JSON-pure
    if cfg["tau_grid"]["max"] <= cfg["tau_grid"]["min"]:
        raise ConfigError("tau_grid.max must exceed tau_grid.min")
    cfg.setdefault("windows", {})
    for key, default in DEFAULT_WINDOWS.items():
        cfg["windows"].setdefault(key, list(default))
    cfg.setdefault("tau_selection", "min_slope")
    cfg.setdefault("output", {})
    cfg["output"].setdefault("trajectory_csv", "trajectory.csv")
    cfg["output"].setdefault("estimates_json", "estimates.json")
    if cfg["model"] == "tfim":
        allowed = {"coupling", "field"}
    else:
        allowed = {"hopping", "interaction", "n_up", "n_down", "boundary",
                   "observable_spins"}
    extra = set(cfg["model_params"]) - allowed
    if extra:
        raise ConfigError(f"model_params keys {sorted(extra)} not valid for {cfg['model']}")
    return cfg


def load_config(path) -> dict:
    with open(path) as fh:
        return validate_config(json.load(fh))


def tfim_benchmark_config() -> dict:
    """TFIM benchmark: J=1, h=1, L=4, periodic chain."""
    return validate_config({
        "schema_version": SCHEMA_VERSION,
        "model": "tfim",
        "sites": 4,
        "model_params": {"coupling": 1.0, "field": 1.0},
        "seed": 42,
        "m_list": [1, 2],
        "tau_grid": {"min": 0.0, "max": 20.0, "count": 201},
        "backend": "exact",
        "windows": {"energy_sum": [6.0, 14.0], "second_gap": [2.0, 6.0]},
        "tau_selection": "min_slope",
        "output": {"trajectory_csv": "tfim_trajectory.csv",
                   "estimates_json": "tfim_estimates.json"},
    })


def fermi_hubbard_benchmark_config() -> dict:
    """Hubbard benchmark: t=1, U=sqrt(2), L=4 at half filling, open chain.

    The up-spin density observable is the one whose ground to first-excited
    matrix element is nonzero; the spin-summed density only couples the
    singlet ground state to higher singlets.
    """
    return validate_config({
        "schema_version": SCHEMA_VERSION,
        "model": "fermi_hubbard",
        "sites": 4,
        "model_params": {
            "hopping": 1.0,
            "interaction": math.sqrt(2.0),
            "n_up": 2,
            "n_down": 2,
            "boundary": "open",
            "observable_spins": ["up"],
        },
        "seed": 42,
        "m_list": [1, 2],
        "tau_grid": {"min": 0.0, "max": 20.0, "count": 201},
        "backend": "exact",
        "windows": {"energy_sum": [8.0, 18.0], "second_gap": [6.0, 14.0]},
        "tau_selection": "largest_tau",
        "output": {"trajectory_csv": "fermi_hubbard_trajectory.csv",
                   "estimates_json": "fermi_hubbard_estimates.json"},
    })


BENCHMARKS = {
    "tfim": tfim_benchmark_config,
    "fermi_hubbard": fermi_hubbard_benchmark_config,
}
