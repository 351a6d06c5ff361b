"""Svetlichny-inequality analysis of communication-pattern graphs.

Exact coefficient tables, PP/TP graph classification, maximisation over
graph-constrained deterministic strategies, no-signalling parity mixtures and
GHZ measurement optimisation.
"""
from .coeffs import (
    CoefficientTable,
    evaluate,
    mermin_coeffs,
    svetlichny_coeffs,
    theory_bounds,
)
from .core import (
    CorrelationTable,
    ExactScalar,
    InputVector,
    OutcomeVector,
    parity,
    validate_table,
)
from .graphs import CommGraph, catalog, classify, dependency_sets, is_separable
from .nosignal import MixtureSpec, check_nosignalling, mixture_from_weights, parity_mixture
from .quantum import AngleSet, correlator, ghz, measurement_table, optimize_angles, quantum_value
from .strategies import (
    DeterministicStrategy,
    brute_force_max,
    eval_strategy,
    max_over_graph,
    parity_basis,
    strategy_to_table,
    tp_strategy,
)

__all__ = [
    "AngleSet",
    "CoefficientTable",
    "CommGraph",
    "CorrelationTable",
    "DeterministicStrategy",
    "ExactScalar",
    "InputVector",
    "MixtureSpec",
    "OutcomeVector",
    "brute_force_max",
    "catalog",
    "check_nosignalling",
    "classify",
    "correlator",
    "dependency_sets",
    "eval_strategy",
    "evaluate",
    "ghz",
    "is_separable",
    "max_over_graph",
    "measurement_table",
    "mermin_coeffs",
    "mixture_from_weights",
    "optimize_angles",
    "parity",
    "parity_basis",
    "parity_mixture",
    "quantum_value",
    "strategy_to_table",
    "svetlichny_coeffs",
    "theory_bounds",
    "tp_strategy",
    "validate_table",
]
