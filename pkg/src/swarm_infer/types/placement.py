"""Requests, scenarios, placements and latency type definitions."""

import hashlib
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .cnn import CnnModel
from .swarm import Swarm


class InferenceRequest(BaseModel):
    """One classification request: a model, its image source and arrival slot."""
    model_config = ConfigDict(frozen=True)

    id: int = Field(ge=0)
    model: CnnModel
    source: int = Field(default=0, ge=0)
    input_bytes: Optional[int] = Field(default=None, ge=0)
    arrival: int = Field(default=0, ge=0)

    @property
    def image_bytes(self) -> int:
        """Bytes shipped from the source to the node running layer 1."""
        return self.model.input_bytes if self.input_bytes is None else self.input_bytes


class Scenario(BaseModel):
    """A swarm plus the requests to place on it."""
    model_config = ConfigDict(frozen=True)

    swarm: Swarm
    requests: List[InferenceRequest] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_requests(self) -> "Scenario":
        for position, request in enumerate(self.requests):
            if request.id != position:
                raise ValueError(
                    f"request ids must be 0..R-1 in order, got {request.id} at {position}"
                )
            if request.source >= self.swarm.n_sources:
                raise ValueError(
                    f"request {request.id} references unknown source {request.source}"
                )
        return self

    def arrival_order(self) -> List[int]:
        """Request ids sorted by arrival slot, then id."""
        return [r.id for r in sorted(self.requests, key=lambda r: (r.arrival, r.id))]


class Placement(BaseModel):
    """Layer-to-node assignment of one request."""
    model_config = ConfigDict(frozen=True)

    request_id: int = Field(ge=0)
    assignment: Dict[int, int] = Field(default_factory=dict)

    def node_of(self, layer: int) -> Optional[int]:
        return self.assignment.get(layer)

    def nodes_used(self) -> List[int]:
        return sorted(set(self.assignment.values()))

    def as_list(self, depth: int) -> List[int]:
        """Nodes in layer order; raises KeyError on a missing layer."""
        return [self.assignment[layer] for layer in range(1, depth + 1)]


class EdgeKind(str, Enum):
    """Kind of inter-node transfer."""
    PIPELINE = "pipeline"
    RESIDUAL = "residual"


class TransmissionEdge(BaseModel):
    """One inter-node transfer (an element of the support of gamma)."""
    model_config = ConfigDict(frozen=True)

    request_id: int
    from_node: int
    to_node: int
    target_layer: int
    stride: int
    payload_bytes: int
    kind: EdgeKind

    @property
    def source_layer(self) -> int:
        return self.target_layer - self.stride


class TransmissionPlan(BaseModel):
    """Every inter-node transfer implied by a set of placements."""
    model_config = ConfigDict(frozen=True)

    edges: List[TransmissionEdge] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.edges)


class LatencyBreakdown(BaseModel):
    """Objective value and its components, in seconds."""
    model_config = ConfigDict(frozen=True)

    source_time: float = 0.0
    processing_time_per_node: List[float] = Field(default_factory=list)
    transmission_time: float = 0.0
    total: float = 0.0

    @classmethod
    def from_components(
        cls,
        source_time: float,
        processing_time_per_node: List[float],
        transmission_time: float,
    ) -> "LatencyBreakdown":
        total = source_time + sum(processing_time_per_node) + transmission_time
        return cls(
            source_time=source_time,
            processing_time_per_node=list(processing_time_per_node),
            transmission_time=transmission_time,
            total=total,
        )

    @property
    def processing_time(self) -> float:
        return sum(self.processing_time_per_node)


class ResourceUsage(BaseModel):
    """Per-node memory (bytes) and compute (multiplications) in use."""

    memory: List[int]
    compute: List[int]

    @classmethod
    def empty(cls, n_nodes: int) -> "ResourceUsage":
        return cls(memory=[0] * n_nodes, compute=[0] * n_nodes)

    def reserve(self, node: int, memory: int, compute: int) -> None:
        self.memory[node] += memory
        self.compute[node] += compute

    def release(self, node: int, memory: int, compute: int) -> None:
        self.memory[node] -= memory
        self.compute[node] -= compute

    def remaining_compute(self, node: int, swarm: Swarm) -> int:
        return swarm.nodes[node].compute_budget - self.compute[node]

    def fingerprint(self) -> str:
        """Stable hash of the usage vectors."""
        payload = ",".join(map(str, self.memory)) + "|" + ",".join(map(str, self.compute))
        return hashlib.sha256(payload.encode()).hexdigest()


class ViolationKind(str, Enum):
    """Categories of model and placement invariant breaches."""
    BAD_STRIDE = "bad_stride"
    DUPLICATE_TARGET = "duplicate_target"
    PAYLOAD_MISMATCH = "payload_mismatch"
    BAD_LAYER_INDEX = "bad_layer_index"
    MEMORY = "memory"
    COMPUTE = "compute"
    MISSING_LAYER = "missing_layer"
    DUPLICATE_LAYER = "duplicate_layer"
    UNKNOWN_LAYER = "unknown_layer"
    UNKNOWN_NODE = "unknown_node"
    UNKNOWN_REQUEST = "unknown_request"


class Violation(BaseModel):
    """One invariant breach, with coordinates for JSON reports."""
    model_config = ConfigDict(frozen=True)

    kind: ViolationKind
    message: str
    node: Optional[int] = None
    request_id: Optional[int] = None
    layer: Optional[int] = None
    used: Optional[float] = None
    budget: Optional[float] = None
