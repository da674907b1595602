"""Solver outcomes, heuristic parameters and experiment type definitions."""

from enum import Enum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..config import config
from .cnn import ModelTemplate, WidthProfile
from .placement import LatencyBreakdown, Placement, TransmissionPlan
from .swarm import NodeBudgets, RateModel

SUM_TOLERANCE = 1e-9


class SolveStatus(str, Enum):
    """Outcome of an exact or oracle search."""
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"


class SolveResult(BaseModel):
    """Best joint placement found by a solver."""
    model_config = ConfigDict(frozen=True)

    status: SolveStatus
    placements: Optional[List[Placement]] = None
    breakdown: Optional[LatencyBreakdown] = None
    transmissions: TransmissionPlan = Field(default_factory=TransmissionPlan)
    nodes_explored: int = 0
    proven_optimal: bool = False

    @property
    def infeasible(self) -> bool:
        return self.status is SolveStatus.INFEASIBLE

    @property
    def total(self) -> Optional[float]:
        return self.breakdown.total if self.breakdown is not None else None


class HeuristicParams(BaseModel):
    """Weights of the DistInference ranking score."""
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(default_factory=lambda: config.solver.alpha, ge=0)
    beta: float = Field(default_factory=lambda: config.solver.beta, ge=0)

    @model_validator(mode="after")
    def _check_sum(self) -> "HeuristicParams":
        if abs(self.alpha + self.beta - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"alpha + beta must equal 1, got {self.alpha} + {self.beta}")
        return self


class AssignOutcome(BaseModel):
    """Result of placing one request online."""
    model_config = ConfigDict(frozen=True)

    request_id: int
    accepted: bool
    placement: Optional[Placement] = None
    latency: float = 0.0
    rejection_reason: Optional[str] = None

    @property
    def nodes_used(self) -> List[int]:
        return self.placement.nodes_used() if self.placement is not None else []


class StreamResult(BaseModel):
    """Outcome of folding DistInference over a request stream."""
    model_config = ConfigDict(frozen=True)

    outcomes: List[AssignOutcome]
    breakdown: LatencyBreakdown
    transmissions: TransmissionPlan = Field(default_factory=TransmissionPlan)
    rejections: int = 0
    shared_data: int = 0

    @property
    def accepted(self) -> int:
        return len(self.outcomes) - self.rejections

    @property
    def placements(self) -> List[Placement]:
        return [o.placement for o in self.outcomes if o.placement is not None]


class ThresholdResult(BaseModel):
    """Largest depth (or smallest swarm) meeting the zero-rejection condition."""
    model_config = ConfigDict(frozen=True)

    value: Optional[int] = None
    reached_cap: bool = False
    message: str = ""


class RequestLoad(BaseModel):
    """Number of requests originating at each source, each within [0, R].

    ``origins``, when given, lists the source of every request in order and
    must agree with ``counts``.
    """
    model_config = ConfigDict(frozen=True)

    counts: List[int]
    total: int = Field(ge=0)
    origins: List[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_bounds(self) -> "RequestLoad":
        for source, count in enumerate(self.counts):
            if not 0 <= count <= self.total:
                raise ValueError(f"source {source} request count {count} outside [0, {self.total}]")
        if self.origins:
            if len(self.origins) != self.total:
                raise ValueError(f"{len(self.origins)} origins for {self.total} requests")
            tally = [0] * len(self.counts)
            for origin in self.origins:
                if not 0 <= origin < len(self.counts):
                    raise ValueError(f"origin {origin} is not a source")
                tally[origin] += 1
            if tally != self.counts:
                raise ValueError("origins disagree with per-source counts")
        return self


class SweepKind(str, Enum):
    """Experiment families."""
    REQUESTS = "requests"
    LAYERS = "layers"
    UAVS = "uavs"
    ALPHABETA = "alphabeta"
    REJECTION_THRESHOLD = "rejection_threshold"
    MIN_UAVS = "min_uavs"
    SHARED_DATA = "shared_data"


class SolverKind(str, Enum):
    """Placement strategies."""
    EXACT = "exact"
    HEURISTIC = "heuristic"


class ScenarioParams(BaseModel):
    """Fixed parameters of a generated scenario."""
    model_config = ConfigDict(frozen=True)

    n_uavs: int = Field(default=5, ge=1)
    n_requests: int = Field(default=5, ge=0)
    depth: int = Field(default=5, ge=1)
    template: ModelTemplate = ModelTemplate.SEQUENTIAL
    budgets: NodeBudgets = Field(default_factory=NodeBudgets)
    rate_model: RateModel = Field(default_factory=RateModel)
    profile: WidthProfile = Field(default_factory=WidthProfile)
    area_size: float = Field(default_factory=lambda: config.swarm.area_size, gt=0)


class SweepSpec(BaseModel):
    """A sweep: one parameter varied over ``values`` for every seed."""
    model_config = ConfigDict(frozen=True)

    kind: SweepKind
    values: List[float] = Field(min_length=1)
    seeds: List[int] = Field(min_length=1)
    fixed: ScenarioParams = Field(default_factory=ScenarioParams)
    solvers: List[SolverKind] = Field(default_factory=lambda: [SolverKind.HEURISTIC])
    axis: SweepKind = SweepKind.LAYERS
    alpha: float = Field(default_factory=lambda: config.solver.alpha, ge=0, le=1)
    beta: float = Field(default_factory=lambda: config.solver.beta, ge=0, le=1)
    time_limit: float = Field(default_factory=lambda: config.solver.time_limit, gt=0)
    depth_cap: int = Field(default_factory=lambda: config.solver.depth_cap, ge=1)
    workers: int = Field(default=1, ge=1)
    output: Optional[Path] = None

    @field_validator("axis")
    @classmethod
    def _check_axis(cls, axis: SweepKind) -> SweepKind:
        if axis not in (SweepKind.LAYERS, SweepKind.REQUESTS):
            raise ValueError("axis must be 'layers' or 'requests'")
        return axis


class SweepRow(BaseModel):
    """One (swept value, seed, solver, template) measurement."""
    model_config = ConfigDict(frozen=True)

    swept_value: float
    seed: int
    solver: SolverKind
    template: ModelTemplate
    status: str = "ok"
    total: Optional[float] = None
    source_time: Optional[float] = None
    processing_time: Optional[float] = None
    transmission_time: Optional[float] = None
    rejections: Optional[int] = None
    accepted: Optional[int] = None
    shared_data: Optional[int] = None
    threshold: Optional[int] = None


SWEEP_COLUMNS = list(SweepRow.model_fields)


class SharedDataPoint(BaseModel):
    """Shared bytes of one placement under residual and sequential topologies."""
    model_config = ConfigDict(frozen=True)

    depth: int
    n_requests: int
    seed: int
    sequential: int
    residual: int
    crossing_shortcuts: int
    rejections: int = 0
