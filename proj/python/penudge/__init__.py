"""Nudging data assimilation for the hydrostatic Navier-Stokes equations.

Fields are float64 arrays of shape (nz, nx, ny).
"""

import json

from ._core import (
    ConfigError,
    ConstraintError,
    Error,
    GateConstants,
    Grid,
    NumericalError,
    Observation,
    SymmetryError,
    axiom_constants,
    check_gates,
    div_constraint,
    load_config,
    norms,
    parse_config,
    project,
    run,
    smallest_passing_mu,
    spin_up,
)
from ._core import twin as _twin

__all__ = [
    "ConfigError",
    "ConstraintError",
    "Error",
    "GateConstants",
    "Grid",
    "NumericalError",
    "Observation",
    "SymmetryError",
    "axiom_constants",
    "check_gates",
    "div_constraint",
    "load_config",
    "norms",
    "parse_config",
    "project",
    "run",
    "smallest_passing_mu",
    "spin_up",
    "twin",
]


def twin(config, reference, mu=None, J=None, mode="exact"):
    """Twin experiment from a spun-up reference.

    Returns a dict of per-sample arrays plus the parsed run summary.
    """
    out = _twin(config, reference, mu=mu, J=J, mode=mode)
    out["summary"] = json.loads(out["summary"])
    return out
