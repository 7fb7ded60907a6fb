"""Numerical laboratory for fibred partially hyperbolic skew-products.

Thin wrappers over the C++ core. Structured arguments and results travel as
JSON; the helpers below convert to and from plain dicts.
"""

import json as _json

from ._phlab import (  # noqa: F401
    FibredSystem,
    PhlabError,
    barycentre,
    centre_exponents as _centre_exponents,
    certify_bunching as _certify_bunching,
    classify as _classify,
    holonomy_translation,
    invariant_structure_tau,
    presets as _presets,
    run_config as _run_config,
    solve_beltrami as _solve_beltrami,
)

__all__ = [
    "FibredSystem",
    "PhlabError",
    "barycentre",
    "centre_exponents",
    "certify_bunching",
    "classify",
    "holonomy_translation",
    "invariant_structure_tau",
    "presets",
    "run",
    "solve_beltrami",
    "system",
]


def system(spec):
    """Build a FibredSystem from a dict or JSON string."""
    if isinstance(spec, dict):
        spec = _json.dumps(spec)
    return FibredSystem(spec)


def centre_exponents(spec, n_iter=100000, n_orbits=8, seed=1, workers=1):
    if isinstance(spec, dict):
        spec = _json.dumps(spec)
    return _json.loads(_centre_exponents(spec, n_iter, n_orbits, seed, workers))


def certify_bunching(spec, base_grid=8, fibre_grid=64):
    if isinstance(spec, dict):
        spec = _json.dumps(spec)
    return _json.loads(_certify_bunching(spec, base_grid, fibre_grid))


def classify(sys_obj, params=None, seed=1, workers=1):
    params_json = _json.dumps(params) if params else ""
    return _json.loads(_classify(sys_obj, params_json, seed, workers))


def solve_beltrami(n, mu, tol=1e-10):
    return _json.loads(_solve_beltrami(n, mu, tol))


def run(config):
    """Run a full experiment config (dict or JSON string); returns the report."""
    if isinstance(config, dict):
        config = _json.dumps(config)
    return _json.loads(_run_config(config))


def presets():
    """Bundled scenario configs as a name -> config dict."""
    return {name: _json.loads(cfg) for name, cfg in _presets()}
