"""Python front end for the Johnson-equation lab."""

import csv
import io
import json

from . import _core
from ._core import (
    DomainError,
    NumericError,
    ValidationError,
    atom_field,
    builtin_names,
    gram_determinants,
    one_soliton,
)

__all__ = [
    "DomainError",
    "NumericError",
    "ValidationError",
    "atom_field",
    "builtin",
    "builtin_names",
    "gram_determinants",
    "one_soliton",
    "phase_shift",
    "run",
    "scenario_hash",
    "validate",
]


def _text(scenario):
    return scenario if isinstance(scenario, str) else json.dumps(scenario)


def builtin(name):
    """Built-in scenario as a dict."""
    return json.loads(_core.builtin_json(name))


def scenario_hash(scenario):
    return _core.scenario_hash(_text(scenario))


def validate(scenario):
    """(ok, report text) for a scenario dict or JSON string."""
    return _core.validate(_text(scenario))


def phase_shift(scenario, n, y=0.0, normalization="general"):
    return _core.phase_shift(_text(scenario), n, y, normalization)


def run(scenario, out_dir=".", workers=0, use_cache=False, write=False):
    """Evaluate a scenario. Returns (rows, summary) with rows as dicts of floats."""
    text, summary = _core.run(_text(scenario), out_dir, workers, use_cache, write)
    rows = []
    for r in csv.DictReader(io.StringIO(text)):
        rows.append({k: (v if k == "path" else float(v)) for k, v in r.items()})
    return rows, json.loads(summary)
