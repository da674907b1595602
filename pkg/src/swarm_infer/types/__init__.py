"""Type definitions for swarm-infer."""

from .errors import *
from .cnn import *
from .swarm import *
from .placement import *
from .results import *

__all__ = [
    # Error types
    "SwarmInferError",
    "ModelError",
    "SwarmError",
    "PlacementError",
    "SolverError",
    "OracleLimitError",
    "InputFileError",
    "ValidationError",
    "ErrorCategory",
    # CNN types
    "LayerDims",
    "LayerProfile",
    "ResidualEdge",
    "CnnModel",
    "ModelTemplate",
    "WidthProfile",
    # Swarm types
    "NodeBudgets",
    "RateModel",
    "RateModelKind",
    "UavNode",
    "SourceNode",
    "LinkMatrix",
    "Swarm",
    # Placement types
    "InferenceRequest",
    "Scenario",
    "Placement",
    "EdgeKind",
    "TransmissionEdge",
    "TransmissionPlan",
    "LatencyBreakdown",
    "ResourceUsage",
    "Violation",
    "ViolationKind",
    # Result and experiment types
    "SolveStatus",
    "SolveResult",
    "HeuristicParams",
    "AssignOutcome",
    "StreamResult",
    "ThresholdResult",
    "RequestLoad",
    "SweepKind",
    "SolverKind",
    "ScenarioParams",
    "SweepSpec",
    "SweepRow",
    "SharedDataPoint",
]
