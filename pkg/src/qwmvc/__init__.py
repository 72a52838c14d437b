"""Quantum-walk heuristic for minimum vertex cover, with exact and classical baselines."""

__version__ = "0.1.0"

from .graph import Graph, EnsembleSpec, read_edgelist, write_edgelist  # noqa: E402
from .ctqw import t_opt, prob_out, spectral_decompose, decouple  # noqa: E402
from .heuristics import (  # noqa: E402
    CoverResult, FastVcParams, SaParams, fastvc_mvc, quantum_mvc, sa_mvc, two_approx_mvc,
    validate_cover,
)
from .exact import ExactResult, bnb_mvc, brute_force_mvc  # noqa: E402

__all__ = [
    "Graph", "EnsembleSpec", "read_edgelist", "write_edgelist",
    "t_opt", "prob_out", "spectral_decompose", "decouple",
    "CoverResult", "FastVcParams", "SaParams", "fastvc_mvc", "quantum_mvc", "sa_mvc",
    "two_approx_mvc", "validate_cover",
    "ExactResult", "bnb_mvc", "brute_force_mvc",
]
