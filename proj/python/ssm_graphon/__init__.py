"""Graphon estimation with stochastic shape models."""

from ._core import (
    EmptyGraphError,
    Error,
    Graph,
    Graphon,
    InvariantError,
    ParseError,
    UndefinedMetricError,
    UnsupportedError,
    auc,
    default_bandwidth,
    degree_sequence,
    estimate,
    fit_histogram,
    fit_ssm,
    graphon_by_name,
    graphon_zoo,
    link_prediction_auc,
    load_edge_list,
    method_names,
    mse,
    simulate,
    write_edge_list,
)

__all__ = [
    "EmptyGraphError",
    "Error",
    "Graph",
    "Graphon",
    "InvariantError",
    "ParseError",
    "UndefinedMetricError",
    "UnsupportedError",
    "auc",
    "default_bandwidth",
    "degree_sequence",
    "estimate",
    "fit_histogram",
    "fit_ssm",
    "graphon_by_name",
    "graphon_zoo",
    "link_prediction_auc",
    "load_edge_list",
    "method_names",
    "mse",
    "simulate",
    "write_edge_list",
]
