"""UAV swarm type definitions: node budgets, link rates, rate models."""

from enum import Enum
from typing import Any, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import config


class RateModelKind(str, Enum):
    """How link rates are produced for a generated swarm."""
    EXPLICIT = "explicit"
    UNIFORM = "uniform"
    DISTANCE = "distance"


class NodeBudgets(BaseModel):
    """Per-node resource budgets applied to every generated node."""
    model_config = ConfigDict(frozen=True)

    mem_budget: int = Field(default_factory=lambda: config.swarm.mem_budget, gt=0)
    compute_budget: int = Field(
        default_factory=lambda: config.swarm.compute_budget, gt=0
    )
    mult_per_sec: float = Field(default_factory=lambda: config.swarm.mult_per_sec, gt=0)


class RateModel(BaseModel):
    """Link rate model.

    ``distance``: rate = clamp(rate_ref * distance_ref / d, rate_min, rate_max),
    symmetric. ``uniform``: i.i.d. draw in [low, high] per ordered pair.
    ``explicit``: full matrices supplied by the caller.
    """
    model_config = ConfigDict(frozen=True)

    kind: RateModelKind = RateModelKind.DISTANCE
    rate_ref: float = Field(default_factory=lambda: config.swarm.rate_ref, gt=0)
    distance_ref: float = Field(default_factory=lambda: config.swarm.distance_ref, gt=0)
    rate_min: float = Field(default_factory=lambda: config.swarm.rate_min, gt=0)
    rate_max: float = Field(default_factory=lambda: config.swarm.rate_max, gt=0)
    low: float = Field(default=1.25e5, gt=0)
    high: float = Field(default=1.25e7, gt=0)
    node_rates: Optional[List[List[float]]] = None
    source_rates: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def _check_ranges(self) -> "RateModel":
        if self.rate_min > self.rate_max:
            raise ValueError("rate_min must not exceed rate_max")
        if self.low > self.high:
            raise ValueError("low must not exceed high")
        if self.kind is RateModelKind.EXPLICIT and (
            self.node_rates is None or self.source_rates is None
        ):
            raise ValueError("explicit rate model needs node_rates and source_rates")
        return self


class UavNode(BaseModel):
    """A compute node of the swarm."""
    model_config = ConfigDict(frozen=True)

    id: int = Field(ge=0)
    mem_budget: int = Field(gt=0)
    compute_budget: int = Field(gt=0)
    mult_per_sec: float = Field(gt=0)
    position: Tuple[float, float] = (0.0, 0.0)


class SourceNode(BaseModel):
    """An image source feeding requests into the swarm."""
    model_config = ConfigDict(frozen=True)

    id: int = Field(ge=0)
    position: Tuple[float, float] = (0.0, 0.0)


class LinkMatrix(BaseModel):
    """Node-to-node and source-to-node rates in bytes/second.

    ``node_rates[i][k]`` is the rate from node i to node k; the diagonal is
    unused and stored as 0. ``source_rates[s][i]`` is the rate from source s to
    node i.
    """
    model_config = ConfigDict(frozen=True)

    node_rates: List[List[float]]
    source_rates: List[List[float]]

    @model_validator(mode="after")
    def _check_rates(self) -> "LinkMatrix":
        n_nodes = len(self.node_rates)
        for i, row in enumerate(self.node_rates):
            if len(row) != n_nodes:
                raise ValueError(f"node_rates row {i} has {len(row)} entries, expected {n_nodes}")
            for k, rate in enumerate(row):
                if i != k and rate <= 0:
                    raise ValueError(f"node_rates[{i}][{k}] must be positive")
        for s, row in enumerate(self.source_rates):
            if len(row) != n_nodes:
                raise ValueError(f"source_rates row {s} has {len(row)} entries, expected {n_nodes}")
            if any(rate <= 0 for rate in row):
                raise ValueError(f"source_rates row {s} must be positive")
        return self


class Swarm(BaseModel):
    """Nodes, sources and the link rates between them, frozen for a run."""
    model_config = ConfigDict(frozen=True)

    nodes: List[UavNode]
    sources: List[SourceNode]
    links: LinkMatrix

    @model_validator(mode="before")
    @classmethod
    def _default_sources(cls, data: Any) -> Any:
        # Swarm files may list only nodes and rates
        if isinstance(data, dict) and "sources" not in data and "links" in data:
            links = data["links"]
            rows = links.get("source_rates", []) if isinstance(links, dict) else links.source_rates
            data = {**data, "sources": [{"id": s} for s in range(len(rows))]}
        return data

    @model_validator(mode="after")
    def _check_coverage(self) -> "Swarm":
        if not self.nodes:
            raise ValueError("swarm needs at least one node")
        for position, node in enumerate(self.nodes):
            if node.id != position:
                raise ValueError(f"node ids must be 0..N-1 in order, got {node.id} at {position}")
        for position, source in enumerate(self.sources):
            if source.id != position:
                raise ValueError(
                    f"source ids must be 0..S-1 in order, got {source.id} at {position}"
                )
        if len(self.links.node_rates) != len(self.nodes):
            raise ValueError("node_rates must cover every node pair")
        if len(self.links.source_rates) != len(self.sources):
            raise ValueError("source_rates must cover every (source, node) pair")
        return self

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_sources(self) -> int:
        return len(self.sources)
