"""Bayesian model selection for congruence class network models."""

from ._core import (
    Error,
    Graph,
    NodeType,
    evidence,
    fit_prior,
    log_volume,
    posterior_probabilities,
    replica_seed,
    simulate,
)

__all__ = [
    "Error",
    "Graph",
    "NodeType",
    "evidence",
    "fit_prior",
    "log_volume",
    "posterior_probabilities",
    "replica_seed",
    "simulate",
]
