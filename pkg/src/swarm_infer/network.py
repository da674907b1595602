"""UAV swarm generation and link rate lookup."""

import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import config
from .types.errors import SwarmError
from .types.swarm import (
    LinkMatrix,
    NodeBudgets,
    RateModel,
    RateModelKind,
    SourceNode,
    Swarm,
    UavNode,
)
from .utils.logging import get_logger
from .utils.validation import load_json_file

logger = get_logger(__name__)

Position = Tuple[float, float]


def distance_rate(distance: float, rate_model: RateModel) -> float:
    """Clamped inverse-distance rate; co-located endpoints get ``rate_max``."""
    if distance <= 0:
        return rate_model.rate_max
    rate = rate_model.rate_ref * rate_model.distance_ref / distance
    return min(max(rate, rate_model.rate_min), rate_model.rate_max)


def _distance(a: Position, b: Position) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def _distance_rates(
    node_positions: Sequence[Position],
    source_positions: Sequence[Position],
    rate_model: RateModel,
) -> Tuple[List[List[float]], List[List[float]]]:
    n = len(node_positions)
    node_rates = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for k in range(i + 1, n):
            rate = distance_rate(_distance(node_positions[i], node_positions[k]), rate_model)
            node_rates[i][k] = rate
            node_rates[k][i] = rate
    source_rates = [
        [distance_rate(_distance(src, pos), rate_model) for pos in node_positions]
        for src in source_positions
    ]
    return node_rates, source_rates


def _uniform_rates(
    n_nodes: int,
    n_sources: int,
    rate_model: RateModel,
    rng: np.random.Generator,
) -> Tuple[List[List[float]], List[List[float]]]:
    draws = rng.uniform(rate_model.low, rate_model.high, size=(n_nodes, n_nodes))
    np.fill_diagonal(draws, 0.0)
    source_draws = rng.uniform(rate_model.low, rate_model.high, size=(n_sources, n_nodes))
    return draws.tolist(), source_draws.tolist()


def build_swarm(
    n_nodes: int,
    n_sources: int = 1,
    budgets: Optional[NodeBudgets] = None,
    area_size: Optional[float] = None,
    rate_model: Optional[RateModel] = None,
    seed: int = 0,
) -> Swarm:
    """
    Generate a swarm with positions drawn uniformly in a square area.

    Identical arguments and seed yield an identical swarm.

    Raises:
        SwarmError: no nodes, no sources, non-positive area, or explicit
            matrices that do not match the node/source counts
    """
    budgets = budgets or NodeBudgets()
    rate_model = rate_model or RateModel()
    area_size = config.swarm.area_size if area_size is None else area_size

    if n_nodes < 1:
        raise SwarmError(f"Swarm needs at least one node, got {n_nodes}")
    if n_sources < 1:
        raise SwarmError(f"Swarm needs at least one source, got {n_sources}")
    if area_size <= 0:
        raise SwarmError(f"Area size must be positive, got {area_size}")

    rng = np.random.default_rng(seed)
    node_xy = rng.uniform(0.0, area_size, size=(n_nodes, 2))
    source_xy = rng.uniform(0.0, area_size, size=(n_sources, 2))
    node_positions = [(float(x), float(y)) for x, y in node_xy]
    source_positions = [(float(x), float(y)) for x, y in source_xy]

    if rate_model.kind is RateModelKind.DISTANCE:
        node_rates, source_rates = _distance_rates(node_positions, source_positions, rate_model)
    elif rate_model.kind is RateModelKind.UNIFORM:
        node_rates, source_rates = _uniform_rates(n_nodes, n_sources, rate_model, rng)
    else:
        node_rates = [list(row) for row in rate_model.node_rates or []]
        source_rates = [list(row) for row in rate_model.source_rates or []]
        if len(node_rates) != n_nodes or len(source_rates) != n_sources:
            raise SwarmError(
                "Explicit rate matrices do not match swarm size",
                context=f"nodes={n_nodes} sources={n_sources}",
            )
        for name, rows in (("node_rates", node_rates), ("source_rates", source_rates)):
            for i, row in enumerate(rows):
                if len(row) != n_nodes:
                    raise SwarmError(
                        f"Explicit {name} row {i} has {len(row)} entries, expected {n_nodes}",
                        context=f"nodes={n_nodes} sources={n_sources}",
                    )
        for i in range(n_nodes):
            node_rates[i][i] = 0.0

    nodes = [
        UavNode(
            id=i,
            mem_budget=budgets.mem_budget,
            compute_budget=budgets.compute_budget,
            mult_per_sec=budgets.mult_per_sec,
            position=node_positions[i],
        )
        for i in range(n_nodes)
    ]
    sources = [SourceNode(id=s, position=source_positions[s]) for s in range(n_sources)]

    logger.debug(
        "Built swarm",
        n_nodes=n_nodes,
        n_sources=n_sources,
        rate_model=rate_model.kind.value,
        seed=seed,
    )
    return Swarm(
        nodes=nodes,
        sources=sources,
        links=LinkMatrix(node_rates=node_rates, source_rates=source_rates),
    )


def _check_node(swarm: Swarm, node: int) -> None:
    if not 0 <= node < swarm.n_nodes:
        raise SwarmError(f"Unknown node id {node}", code="UNKNOWN_NODE")


def link_rate(swarm: Swarm, i: int, k: int) -> float:
    """
    Rate from node i to node k in bytes/second.

    Raises:
        SwarmError: unknown id, or i == k (co-located layers cost no time and
            must be special-cased by the caller)
    """
    _check_node(swarm, i)
    _check_node(swarm, k)
    if i == k:
        raise SwarmError(f"No link from node {i} to itself", code="SELF_LINK")
    return swarm.links.node_rates[i][k]


def source_rate(swarm: Swarm, s: int, i: int) -> float:
    """
    Rate from source s to node i in bytes/second.

    Raises:
        SwarmError: unknown source or node id
    """
    if not 0 <= s < swarm.n_sources:
        raise SwarmError(f"Unknown source id {s}", code="UNKNOWN_SOURCE")
    _check_node(swarm, i)
    return swarm.links.source_rates[s][i]


def scale_rates(swarm: Swarm, factor: float) -> Swarm:
    """Copy of ``swarm`` with every link and source rate multiplied by ``factor``."""
    if factor <= 0:
        raise SwarmError(f"Rate scale factor must be positive, got {factor}")
    links = LinkMatrix(
        node_rates=[[rate * factor for rate in row] for row in swarm.links.node_rates],
        source_rates=[[rate * factor for rate in row] for row in swarm.links.source_rates],
    )
    return swarm.model_copy(update={"links": links})


def load_swarm(path: Union[str, Path]) -> Swarm:
    return load_json_file(path, Swarm)
