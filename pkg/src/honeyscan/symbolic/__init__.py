from .artifacts import (
    AnalysisArtifacts,
    CallRecord,
    CallType,
    ExecutionPath,
    Feasibility,
    PathEnd,
)
from .engine import SymbolicEngine, check_feasibility, explore

__all__ = [
    "AnalysisArtifacts",
    "CallRecord",
    "CallType",
    "ExecutionPath",
    "Feasibility",
    "PathEnd",
    "SymbolicEngine",
    "check_feasibility",
    "explore",
]
