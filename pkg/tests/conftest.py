"""Shared fixtures and scenario builders for the swarm-infer test suite."""

from typing import List, Optional, Sequence

import numpy as np
import pytest
import structlog

from swarm_infer.model import residual_blocks
from swarm_infer.types import (
    CnnModel,
    InferenceRequest,
    LayerProfile,
    LinkMatrix,
    Scenario,
    SourceNode,
    Swarm,
    UavNode,
)

# Micro-scenarios stay small enough for exhaustive enumeration
MICRO_SPACE_CAP = 5000


@pytest.fixture(autouse=True)
def reset_logging():
    """Drop any logging configuration a CLI test installed on captured streams."""
    yield
    structlog.reset_defaults()


def make_swarm(
    n_nodes: int,
    node_rate: float = 1e6,
    source_rates: Optional[Sequence[Sequence[float]]] = None,
    mem_budget: int = 10**9,
    compute_budget: int = 10**12,
    mult_per_sec: float = 1e6,
    node_rates: Optional[Sequence[Sequence[float]]] = None,
) -> Swarm:
    """Swarm with identical budgets and explicit rates (uniform unless given)."""
    if node_rates is None:
        node_rates = [
            [0.0 if i == k else node_rate for k in range(n_nodes)] for i in range(n_nodes)
        ]
    if source_rates is None:
        source_rates = [[1e6] * n_nodes]
    return Swarm(
        nodes=[
            UavNode(
                id=i,
                mem_budget=mem_budget,
                compute_budget=compute_budget,
                mult_per_sec=mult_per_sec,
            )
            for i in range(n_nodes)
        ],
        sources=[SourceNode(id=s) for s in range(len(source_rates))],
        links=LinkMatrix(
            node_rates=[list(row) for row in node_rates],
            source_rates=[list(row) for row in source_rates],
        ),
    )


def make_model(
    memory: Sequence[int],
    compute: Sequence[int],
    output: Sequence[int],
    input_bytes: int = 0,
    residual: bool = False,
    name: str = "test",
) -> CnnModel:
    layers = [
        LayerProfile(index=j, memory_bytes=m, multiplications=c, output_bytes=k)
        for j, (m, c, k) in enumerate(zip(memory, compute, output), start=1)
    ]
    return CnnModel(
        name=name,
        input_bytes=input_bytes,
        layers=layers,
        residual_edges=residual_blocks(layers) if residual else [],
    )


def make_micro_scenario(seed: int) -> Scenario:
    """Random scenario with at most 4 nodes, 5 layers per model and 2 requests."""
    rng = np.random.default_rng(seed)
    n_nodes = int(rng.integers(1, 5))
    n_requests = int(rng.integers(1, 3))
    n_sources = int(rng.integers(1, 3))
    depths = [int(rng.integers(1, 6)) for _ in range(n_requests)]
    while n_nodes ** sum(depths) > MICRO_SPACE_CAP:
        depths[depths.index(max(depths))] -= 1

    requests: List[InferenceRequest] = []
    for r, depth in enumerate(depths):
        layers = [
            LayerProfile(
                index=j,
                memory_bytes=int(rng.integers(1, 100)),
                multiplications=int(rng.integers(10**5, 10**7)),
                output_bytes=int(rng.integers(10**3, 10**6)),
            )
            for j in range(1, depth + 1)
        ]
        edges = residual_blocks(layers) if depth >= 3 and rng.random() < 0.5 else []
        model = CnnModel(
            name=f"micro-{seed}-{r}",
            input_bytes=int(rng.integers(10**4, 10**6)),
            layers=layers,
            residual_edges=edges,
        )
        requests.append(InferenceRequest(
            id=r,
            model=model,
            source=int(rng.integers(0, n_sources)),
            arrival=int(rng.integers(0, 3)),
        ))

    node_rates = rng.uniform(1e5, 1e7, size=(n_nodes, n_nodes))
    np.fill_diagonal(node_rates, 0.0)
    source_rates = rng.uniform(1e5, 1e7, size=(n_sources, n_nodes))
    nodes = [
        UavNode(
            id=i,
            mem_budget=int(rng.integers(60, 400)),
            compute_budget=int(rng.integers(10**7, 4 * 10**7)),
            mult_per_sec=float(rng.uniform(1e8, 1e9)),
        )
        for i in range(n_nodes)
    ]
    swarm = Swarm(
        nodes=nodes,
        sources=[SourceNode(id=s) for s in range(n_sources)],
        links=LinkMatrix(node_rates=node_rates.tolist(), source_rates=source_rates.tolist()),
    )
    return Scenario(swarm=swarm, requests=requests)


@pytest.fixture
def two_node_swarm() -> Swarm:
    return make_swarm(2)


@pytest.fixture
def three_layer_model() -> CnnModel:
    return make_model(
        memory=[10, 10, 10],
        compute=[10**6, 2 * 10**6, 3 * 10**6],
        output=[10**6, 5 * 10**5, 10**5],
        input_bytes=10**6,
    )


@pytest.fixture
def micro_seeds() -> List[int]:
    return list(range(200))
