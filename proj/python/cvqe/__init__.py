"""Guided-sampling subspace solver for the transverse-field Ising model."""

import json

from ._core import (
    IsingModel,
    Lattice,
    ProjectedHamiltonian,
    SampleSet,
    SolverError,
    StateVector,
    Subspace,
    SubspaceSolution,
    ValidationError,
    __version__,
    average_spin,
    census,
    config_keys,
    ensemble_census,
    evolve,
    exact_diagonalize,
    expand,
    expand_states,
    ground_state,
    parse_counts,
    project,
    sample,
)
from . import _core


def _setting(value):
    if isinstance(value, (list, tuple)):
        return ",".join(_setting(v) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _settings(settings):
    return {key: _setting(value) for key, value in settings.items()}


def info_report(samples, solution, model):
    """Entropies, I_B, I_Psi, K and R as a dict; R is None when undefined."""
    return json.loads(_core.info_report(samples, solution, model))


def run(**settings):
    """One pipeline run; keyword names are the config keys. Returns the record dict."""
    return json.loads(_core.run_json(_settings(settings)))


def sweep(**settings):
    """Every (size, coupling) point of a sweep, as record dicts ordered by index."""
    return [json.loads(line) for line in _core.sweep_json(_settings(settings))]
