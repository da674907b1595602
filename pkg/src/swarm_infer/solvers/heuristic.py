"""DistInference: online greedy per-layer placement with rejection.

Requests arrive one at a time. Each layer goes to the candidate node (one
that still fits the layer's memory and compute) with the lowest score

    alpha * t_hat + beta * inv_hat

where t is the incremental latency of placing the layer there (incoming
transfer plus processing) and inv is 1 / remaining compute budget. Both are
min-max normalized over the current candidates; the inv span is floored at
the least-loaded candidate's inv, so loads that differ by a sliver of the
budget stay near zero instead of stretching to the full 0..1 range. A request
with a layer that fits nowhere is rejected whole and its reservations are
rolled back.
"""

import csv
import io
import json
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, TextIO, Union

from pydantic import BaseModel, ConfigDict

from ..latency import (
    derive_transmissions,
    request_latency,
    shared_data,
    total_latency,
)
from ..model import ensure_valid_model
from ..types.errors import ValidationError
from ..types.placement import InferenceRequest, Placement, ResourceUsage, Scenario
from ..types.results import AssignOutcome, HeuristicParams, StreamResult
from ..types.swarm import Swarm
from ..utils.logging import get_logger

logger = get_logger(__name__)

OUTCOME_COLUMNS = ["request_id", "accepted", "latency", "nodes_used", "rejection_reason"]


class CandidateScore(BaseModel):
    """Raw and normalized ranking terms of one candidate node."""
    model_config = ConfigDict(frozen=True)

    node: int
    latency: float
    remaining_compute: int
    latency_norm: float
    compute_norm: float
    score: float


class SwarmState:
    """Live reservations of an online placement run.

    A single writer mutates the state; each ``dist_inference`` call either
    commits all of a request's reservations or none.
    """

    def __init__(self, swarm: Swarm) -> None:
        self.swarm = swarm
        self.usage = ResourceUsage.empty(swarm.n_nodes)
        self.accepted: List[AssignOutcome] = []
        self.rejected: List[AssignOutcome] = []

    def fingerprint(self) -> str:
        return self.usage.fingerprint()

    def record(self, outcome: AssignOutcome) -> None:
        (self.accepted if outcome.accepted else self.rejected).append(outcome)


def _min_max(values: Sequence[float], floor: float = 0.0) -> List[float]:
    """Scale to [0, 1] over the spread of ``values``, or over ``floor`` if wider."""
    low, high = min(values), max(values)
    span = max(high - low, floor)
    if span <= 0 or math.isinf(span):
        return [0.0 if value == low else 1.0 for value in values]
    return [(value - low) / span for value in values]


def condi1(state: SwarmState, node: int, layer: int, request: InferenceRequest) -> bool:
    """True when ``layer`` still fits node's memory and compute budgets."""
    profile = request.model.layer(layer)
    budget = state.swarm.nodes[node]
    return (
        state.usage.memory[node] + profile.memory_bytes <= budget.mem_budget
        and state.usage.compute[node] + profile.multiplications <= budget.compute_budget
    )


def incremental_latency(
    state: SwarmState,
    node: int,
    layer: int,
    request: InferenceRequest,
    partial: Dict[int, int],
) -> float:
    """
    Incoming transfer into ``node`` plus processing of ``layer`` there.

    Layer 1's predecessor is the image source. For later layers the pipeline
    input and any residual shortcut arrive in parallel, so the slower counts;
    co-located predecessors cost nothing.
    """
    swarm = state.swarm
    model = request.model
    seconds = 0.0
    if layer == 1:
        if request.image_bytes:
            seconds = request.image_bytes / swarm.links.source_rates[request.source][node]
    else:
        previous = partial[layer - 1]
        if previous != node:
            seconds = model.layer(layer - 1).output_bytes / swarm.links.node_rates[previous][node]
        shortcut = model.edge_into(layer)
        if shortcut is not None:
            origin = partial[shortcut.source]
            if origin != node:
                seconds = max(
                    seconds, shortcut.payload_bytes / swarm.links.node_rates[origin][node]
                )
    return seconds + model.layer(layer).multiplications / swarm.nodes[node].mult_per_sec


def score_candidates(
    state: SwarmState,
    candidates: Sequence[int],
    layer: int,
    request: InferenceRequest,
    params: HeuristicParams,
    partial: Optional[Dict[int, int]] = None,
) -> List[CandidateScore]:
    """
    Ranking terms for every candidate, in candidate order.

    Raises:
        ValidationError: ``candidates`` is empty
    """
    if not candidates:
        raise ValidationError(
            f"No candidate nodes for layer {layer}", request_id=request.id
        )
    partial = partial or {}
    latencies = [incremental_latency(state, node, layer, request, partial) for node in candidates]
    remaining = [state.usage.remaining_compute(node, state.swarm) for node in candidates]
    inverse = [1.0 / value if value > 0 else float("inf") for value in remaining]

    latency_norm = _min_max(latencies)
    # relative to the least-loaded candidate
    compute_norm = _min_max(inverse, floor=min(inverse))
    return [
        CandidateScore(
            node=node,
            latency=latencies[position],
            remaining_compute=remaining[position],
            latency_norm=latency_norm[position],
            compute_norm=compute_norm[position],
            score=params.alpha * latency_norm[position] + params.beta * compute_norm[position],
        )
        for position, node in enumerate(candidates)
    ]


def nrm_score(
    state: SwarmState,
    node: int,
    layer: int,
    request: InferenceRequest,
    params: HeuristicParams,
    candidates: Optional[Sequence[int]] = None,
    partial: Optional[Dict[int, int]] = None,
) -> float:
    """
    Score of ``node`` among ``candidates`` (default: every node passing condi1).

    Raises:
        ValidationError: the candidate set is empty or excludes ``node``
    """
    if candidates is None:
        candidates = [
            i for i in range(state.swarm.n_nodes) if condi1(state, i, layer, request)
        ]
    for entry in score_candidates(state, candidates, layer, request, params, partial):
        if entry.node == node:
            return entry.score
    raise ValidationError(
        f"Node {node} is not a candidate for layer {layer}", request_id=request.id
    )


def dist_inference(
    state: SwarmState, request: InferenceRequest, params: Optional[HeuristicParams] = None
) -> AssignOutcome:
    """
    Place every layer of ``request`` greedily, or reject it and roll back.

    Raises:
        ModelError: the request's model fails validation
    """
    ensure_valid_model(request.model, request.id)
    params = params or HeuristicParams()
    partial: Dict[int, int] = {}

    for layer in range(1, request.model.depth + 1):
        candidates = [
            node for node in range(state.swarm.n_nodes) if condi1(state, node, layer, request)
        ]
        if not candidates:
            for placed_layer, placed_node in partial.items():
                profile = request.model.layer(placed_layer)
                state.usage.release(placed_node, profile.memory_bytes, profile.multiplications)
            outcome = AssignOutcome(
                request_id=request.id,
                accepted=False,
                rejection_reason=f"layer {layer}: no node satisfies memory and compute budgets",
            )
            state.record(outcome)
            logger.info(
                "Request rejected", request_id=request.id, layer=layer, placed_layers=len(partial)
            )
            return outcome

        scores = score_candidates(state, candidates, layer, request, params, partial)
        chosen = min(scores, key=lambda entry: (entry.score, entry.node)).node
        profile = request.model.layer(layer)
        state.usage.reserve(chosen, profile.memory_bytes, profile.multiplications)
        partial[layer] = chosen

    placement = Placement(request_id=request.id, assignment=dict(partial))
    outcome = AssignOutcome(
        request_id=request.id,
        accepted=True,
        placement=placement,
        latency=request_latency(placement, request, state.swarm),
    )
    state.record(outcome)
    logger.debug(
        "Request placed",
        request_id=request.id,
        nodes_used=placement.nodes_used(),
        latency=outcome.latency,
    )
    return outcome


def run_stream(
    scenario: Scenario,
    params: Optional[HeuristicParams] = None,
    arrival_order: Optional[Sequence[int]] = None,
) -> StreamResult:
    """Fold DistInference over the requests in arrival order."""
    params = params or HeuristicParams()
    order = list(arrival_order) if arrival_order is not None else scenario.arrival_order()
    state = SwarmState(scenario.swarm)

    outcomes = [
        dist_inference(state, scenario.requests[request_id], params) for request_id in order
    ]

    placements = [o.placement for o in outcomes if o.placement is not None]
    accepted_requests = [scenario.requests[p.request_id] for p in placements]
    plan = derive_transmissions(placements, accepted_requests)
    breakdown = total_latency(placements, accepted_requests, scenario.swarm)
    rejections = sum(1 for o in outcomes if not o.accepted)

    logger.debug(
        "Stream finished",
        requests=len(outcomes),
        rejections=rejections,
        total=breakdown.total,
        alpha=params.alpha,
        beta=params.beta,
    )
    return StreamResult(
        outcomes=outcomes,
        breakdown=breakdown,
        transmissions=plan,
        rejections=rejections,
        shared_data=shared_data(plan, accepted_requests),
    )


def _outcome_record(outcome: AssignOutcome) -> Dict[str, object]:
    return {
        "request_id": outcome.request_id,
        "accepted": outcome.accepted,
        "latency": outcome.latency,
        "nodes_used": " ".join(str(node) for node in outcome.nodes_used),
        "rejection_reason": outcome.rejection_reason or "",
    }


def format_outcome_log(outcomes: Sequence[AssignOutcome], fmt: str = "csv") -> str:
    """Per-request outcome log as CSV or JSON text."""
    records = [_outcome_record(o) for o in outcomes]
    if fmt == "json":
        return json.dumps(records, indent=2) + "\n"
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=OUTCOME_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(records)
    return buffer.getvalue()


def write_outcome_log(
    outcomes: Sequence[AssignOutcome],
    target: Union[str, Path, TextIO],
    fmt: str = "csv",
) -> None:
    text = format_outcome_log(outcomes, fmt)
    if isinstance(target, (str, Path)):
        Path(target).write_text(text, encoding="utf-8")
    else:
        target.write(text)
