"""Simulator of effective problem solving: optimal candidate ordering,
semantic memory, case retrieval and a four-state solver."""

from .engine import Engine, EngineConfig, Outcome, Problem, SolverState, TraceRecord, run
from .memory import ActivationParams, Association, Concept, MemoryGraph
from .retrieval import Case, RetrievalConfig, RetrievalResult, Taxonomy, retrieve, similarity
from .scheduler import Candidate, Schedule, expected_time, ratio, schedule, verify_optimal

__version__ = "0.1.0"

__all__ = [
    "ActivationParams",
    "Association",
    "Candidate",
    "Case",
    "Concept",
    "Engine",
    "EngineConfig",
    "MemoryGraph",
    "Outcome",
    "Problem",
    "RetrievalConfig",
    "RetrievalResult",
    "Schedule",
    "SolverState",
    "Taxonomy",
    "TraceRecord",
    "expected_time",
    "ratio",
    "retrieve",
    "run",
    "schedule",
    "similarity",
    "verify_optimal",
]
