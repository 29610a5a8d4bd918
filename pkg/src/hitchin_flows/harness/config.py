"""Experiment configuration: JSON schema plus semantic checks."""

from __future__ import annotations

from dataclasses import dataclass, field

import jsonschema

from ..errors import ConfigInvalid

BASE_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "type": {"const": "surface"},
                "genus": {"type": "integer", "minimum": 2},
            },
            "required": ["type"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "type": {"const": "triangle"},
                "p": {"type": "integer", "minimum": 2},
                "q": {"type": "integer", "minimum": 2},
                "r": {"type": "integer", "minimum": 2},
            },
            "required": ["type", "p", "q", "r"],
            "additionalProperties": False,
        },
    ]
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "hitchin-flows experiment",
    "type": "object",
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "base": BASE_SCHEMA,
        "embed_n": {"type": "integer", "minimum": 2, "maximum": 8},
        "suite": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "id": {"type": "string"},
                    "tolerance": {"type": "number"},
                    "params": {"type": "object"},
                },
                "required": ["name"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["seed", "base", "suite"],
    "additionalProperties": False,
}

DEFAULTS = {"seed": 0, "base": {"type": "surface", "genus": 2}, "embed_n": 3, "suite": []}


@dataclass
class SuiteCall:
    name: str
    id: str
    tolerance: float
    params: dict = field(default_factory=dict)


@dataclass
class ExperimentConfig:
    seed: int
    base: dict
    embed_n: int
    suite: list


def _path(err):
    parts = [str(p) for p in err.absolute_path]
    return ".".join(parts) if parts else "<root>"


def validate_config(raw):
    """Parse a config dict; raise ``ConfigInvalid`` listing every problem found."""
    from .suites import SUITES

    diags = []
    validator = jsonschema.Draft202012Validator(SCHEMA)
    for err in sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path)):
        if err.validator == "required":
            missing = err.message.split("'")[1]
            diags.append(
                f"{_path(err)}: missing required field '{missing}' "
                f"(suggested default: {missing!s} = {DEFAULTS[missing]!r})"
            )
        elif err.validator == "oneOf" and _path(err) == "base":
            diags.append("base: expected {'type': 'surface'} or {'type': 'triangle', 'p', 'q', 'r'}")
        else:
            diags.append(f"{_path(err)}: {err.message}")
    if not isinstance(raw, dict):
        raise ConfigInvalid(diags or ["<root>: expected a JSON object"])

    base = raw.get("base")
    if isinstance(base, dict) and base.get("type") == "triangle":
        try:
            p, q, r = int(base["p"]), int(base["q"]), int(base["r"])
            if q * r + p * r + p * q >= p * q * r:
                diags.append(f"base: signature not hyperbolic: 1/{p} + 1/{q} + 1/{r} >= 1")
        except (KeyError, TypeError, ValueError, ZeroDivisionError):
            pass
    if isinstance(base, dict) and base.get("type") == "surface" and base.get("genus", 2) != 2:
        diags.append("base.genus: only genus 2 is built in")

    embed_n = raw.get("embed_n", DEFAULTS["embed_n"])
    calls = []
    suite = raw.get("suite") if isinstance(raw.get("suite"), list) else []
    for i, item in enumerate(suite):
        if not isinstance(item, dict) or not isinstance(item.get("name"), str):
            continue
        name = item["name"]
        where = f"suite.{i}"
        if name not in SUITES:
            diags.append(f"{where}.name: unknown suite {name!r} (see list-suites)")
            continue
        spec = SUITES[name]
        tol = item.get("tolerance", spec.tolerance)
        if isinstance(tol, (int, float)) and not tol > 0:
            diags.append(f"{where}.tolerance: must be > 0, got {tol!r}")
        params = item.get("params", {})
        if isinstance(params, dict):
            for key in params:
                if key not in spec.defaults:
                    diags.append(f"{where}.params.{key}: unknown parameter for suite {name!r}")
        if "surface" in spec.requires and isinstance(base, dict) and base.get("type") != "surface":
            diags.append(f"{where}: suite {name!r} needs a genus-2 surface base")
        if "n3" in spec.requires and embed_n != 3:
            diags.append(f"{where}: suite {name!r} needs embed_n = 3")
        if isinstance(params, dict) and isinstance(tol, (int, float)):
            merged = dict(spec.defaults)
            merged.update(params)
            calls.append(SuiteCall(name, item.get("id", f"{i}:{name}"), float(tol), merged))
    if diags:
        raise ConfigInvalid(diags)
    return ExperimentConfig(int(raw["seed"]), dict(raw["base"]), int(embed_n), calls)
