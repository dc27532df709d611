"""Sybil-resilient top-K influence ranking."""

from ._core import (
    Graph,
    IoError,
    SeedingError,
    ValidationError,
    attack_eval,
    build_graph,
    edge_weight_entropy,
    edge_weight_sum,
    estimate_alpha_star,
    fit_power_law,
    load_graph,
    pagerank,
    prop1_closed_form,
    rank,
    relative_gaps,
    synthetic_graph,
    sybil_count_metric,
    sybil_topk_bound,
    wec,
)

__all__ = [
    "Graph",
    "IoError",
    "SeedingError",
    "ValidationError",
    "attack_eval",
    "build_graph",
    "edge_weight_entropy",
    "edge_weight_sum",
    "estimate_alpha_star",
    "fit_power_law",
    "load_graph",
    "pagerank",
    "prop1_closed_form",
    "rank",
    "relative_gaps",
    "synthetic_graph",
    "sybil_count_metric",
    "sybil_topk_bound",
    "wec",
]
