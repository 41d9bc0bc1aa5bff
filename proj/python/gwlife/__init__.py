"""Galton-Watson processes in which individuals have random lifetimes."""

import json as _json

from ._core import (
    ConvergenceError,
    DomainError,
    IndeterminateError,
    Model,
    ModelError,
    classify,
    convergence_radius,
    extinction_probability,
    growth_constant,
    invariant_system,
    mean_total,
    mean_vector,
    radius_sequence,
    simulate,
    truncated_radius,
)


def load_model(spec):
    """Build a Model from a spec dict or JSON text."""
    if not isinstance(spec, str):
        spec = _json.dumps(spec)
    return Model(spec)


__all__ = [
    "ConvergenceError",
    "DomainError",
    "IndeterminateError",
    "Model",
    "ModelError",
    "classify",
    "convergence_radius",
    "extinction_probability",
    "growth_constant",
    "invariant_system",
    "load_model",
    "mean_total",
    "mean_vector",
    "radius_sequence",
    "simulate",
    "truncated_radius",
]
