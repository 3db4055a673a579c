"""Streaming cut sparsifiers for hypergraphs.

Three engines (insertion-only, k-bounded deletions, fully dynamic) built from
linear l0 samplers, plus brute-force oracles for strengths and cuts.
"""
from .core import (Hypergraph, Partition, SparsifierReport, StreamUpdate, WeightedHypergraph,
                   compose, connected_components, contract, cut_value, make_edge,
                   verify_sparsifier)
from .errors import (DeletionBudgetExceeded, HypersparseError, IncompatibleSketches,
                     InvalidCut, InvalidEdge, MalformedInput, NoCut, NotASubgraph,
                     RecoveryFailure, StreamTooLong, TooLarge)
from .estimator import HypergraphSparsifier
from .oracle import (component_strength, compute_strengths, min_normalized_kcut,
                     reciprocal_strength_sum, simple_sparsify, static_sparsify)
from .stream import (BoundedEngine, DynamicEngine, EngineConfig, InsertionEngine, make_engine,
                     run_stream)

__version__ = "0.1.0"

__all__ = [
    "Hypergraph", "WeightedHypergraph", "Partition", "StreamUpdate", "SparsifierReport",
    "make_edge", "cut_value", "contract", "compose", "connected_components", "verify_sparsifier",
    "compute_strengths", "component_strength", "min_normalized_kcut", "reciprocal_strength_sum",
    "static_sparsify", "simple_sparsify",
    "EngineConfig", "InsertionEngine", "BoundedEngine", "DynamicEngine", "make_engine",
    "run_stream", "HypergraphSparsifier",
    "HypersparseError", "InvalidEdge", "InvalidCut", "NotASubgraph", "NoCut", "TooLarge",
    "IncompatibleSketches", "DeletionBudgetExceeded", "StreamTooLong", "RecoveryFailure",
    "MalformedInput",
]
