"""Latency objective, feasibility checks and shared-data accounting.

The objective for a set of placements is

    total = sum over requests of source time
          + sum over nodes of processing time
          + sum over (request, target layer) of the slowest incoming transfer

where a target layer receiving both its pipeline input and a residual shortcut
from other nodes waits for the slower of the two parallel transfers.
"""

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .network import link_rate, source_rate
from .types.errors import PlacementError
from .types.placement import (
    EdgeKind,
    InferenceRequest,
    LatencyBreakdown,
    Placement,
    ResourceUsage,
    Scenario,
    TransmissionEdge,
    TransmissionPlan,
    Violation,
    ViolationKind,
)
from .types.swarm import Swarm

Requests = Union[Sequence[InferenceRequest], Mapping[int, InferenceRequest]]


def _index_requests(requests: Requests) -> Dict[int, InferenceRequest]:
    if isinstance(requests, Mapping):
        return dict(requests)
    return {request.id: request for request in requests}


def _lookup(index: Mapping[int, InferenceRequest], request_id: int) -> InferenceRequest:
    try:
        return index[request_id]
    except KeyError:
        raise PlacementError(
            f"Placement references unknown request {request_id}", request_id=request_id
        ) from None


def _complete_nodes(placement: Placement, request: InferenceRequest) -> List[int]:
    nodes = []
    for layer in range(1, request.model.depth + 1):
        node = placement.node_of(layer)
        if node is None:
            raise PlacementError(
                "incomplete placement",
                context=f"layer {layer} of request {request.id} is not placed",
                request_id=request.id,
            )
        nodes.append(node)
    return nodes


def derive_transmissions(
    placements: Sequence[Placement], requests: Requests
) -> TransmissionPlan:
    """
    Every inter-node transfer implied by ``placements``.

    Pipeline edges carry layer j-1's output into layer j; residual edges carry
    layer (j - stride)'s output into layer j. Co-located endpoints yield no edge.

    Raises:
        PlacementError: a placed request is missing a layer
    """
    index = _index_requests(requests)
    edges: List[TransmissionEdge] = []
    for placement in sorted(placements, key=lambda p: p.request_id):
        request = _lookup(index, placement.request_id)
        model = request.model
        nodes = _complete_nodes(placement, request)

        for target in range(2, model.depth + 1):
            from_node, to_node = nodes[target - 2], nodes[target - 1]
            if from_node != to_node:
                edges.append(TransmissionEdge(
                    request_id=request.id,
                    from_node=from_node,
                    to_node=to_node,
                    target_layer=target,
                    stride=1,
                    payload_bytes=model.layer(target - 1).output_bytes,
                    kind=EdgeKind.PIPELINE,
                ))

        for shortcut in sorted(model.residual_edges, key=lambda e: e.target):
            from_node, to_node = nodes[shortcut.source - 1], nodes[shortcut.target - 1]
            if from_node != to_node:
                edges.append(TransmissionEdge(
                    request_id=request.id,
                    from_node=from_node,
                    to_node=to_node,
                    target_layer=shortcut.target,
                    stride=shortcut.stride,
                    payload_bytes=shortcut.payload_bytes,
                    kind=EdgeKind.RESIDUAL,
                ))

    edges.sort(key=lambda e: (e.request_id, e.target_layer, e.kind != EdgeKind.PIPELINE))
    return TransmissionPlan(edges=edges)


def source_time(placement: Placement, request: InferenceRequest, swarm: Swarm) -> float:
    """
    Seconds to ship the captured image to the node hosting layer 1.

    Raises:
        PlacementError: layer 1 is not placed
    """
    first = placement.node_of(1)
    if first is None:
        raise PlacementError(
            "Layer 1 is not placed", context="source time undefined", request_id=request.id
        )
    if request.image_bytes == 0:
        return 0.0
    return request.image_bytes / source_rate(swarm, request.source, first)


def processing_time(
    placements: Sequence[Placement], requests: Requests, swarm: Swarm
) -> List[float]:
    """Per-node seconds spent on the layers each node hosts."""
    index = _index_requests(requests)
    per_node = [0.0] * swarm.n_nodes
    for placement in sorted(placements, key=lambda p: p.request_id):
        request = _lookup(index, placement.request_id)
        for layer, node in sorted(placement.assignment.items()):
            per_node[node] += (
                request.model.layer(layer).multiplications / swarm.nodes[node].mult_per_sec
            )
    return per_node


def transmission_time(plan: TransmissionPlan, swarm: Swarm) -> float:
    """
    Seconds spent on inter-node transfers.

    Edges sharing a (request, target layer) run in parallel, so each target
    contributes its slowest incoming transfer.
    """
    slowest: Dict[Tuple[int, int], float] = {}
    for edge in plan.edges:
        key = (edge.request_id, edge.target_layer)
        seconds = edge.payload_bytes / link_rate(swarm, edge.from_node, edge.to_node)
        slowest[key] = max(slowest.get(key, 0.0), seconds)
    return sum(slowest[key] for key in sorted(slowest))


def total_latency(
    placements: Sequence[Placement], requests: Requests, swarm: Swarm
) -> LatencyBreakdown:
    """
    Evaluate the objective on ``placements`` with every component reported.

    Raises:
        PlacementError: a placed request is incomplete
    """
    index = _index_requests(requests)
    plan = derive_transmissions(placements, index)
    source = sum(
        source_time(p, _lookup(index, p.request_id), swarm)
        for p in sorted(placements, key=lambda p: p.request_id)
    )
    return LatencyBreakdown.from_components(
        source_time=source,
        processing_time_per_node=processing_time(placements, index, swarm),
        transmission_time=transmission_time(plan, swarm),
    )


def request_latency(placement: Placement, request: InferenceRequest, swarm: Swarm) -> float:
    """Latency contributed by one request alone."""
    return total_latency([placement], [request], swarm).total


def shared_data(plan: TransmissionPlan, requests: Requests) -> int:
    """Bytes crossing node boundaries, source-to-first-node images included."""
    index = _index_requests(requests)
    return sum(edge.payload_bytes for edge in plan.edges) + sum(
        request.image_bytes for request in index.values()
    )


def resource_usage(
    placements: Sequence[Placement], requests: Requests, swarm: Swarm
) -> ResourceUsage:
    """Cumulative memory and compute per node over all placements."""
    index = _index_requests(requests)
    usage = ResourceUsage.empty(swarm.n_nodes)
    for placement in placements:
        request = index.get(placement.request_id)
        if request is None:
            continue
        for layer, node in placement.assignment.items():
            if 1 <= layer <= request.model.depth and 0 <= node < swarm.n_nodes:
                profile = request.model.layer(layer)
                usage.reserve(node, profile.memory_bytes, profile.multiplications)
    return usage


def check_feasibility(
    placements: Sequence[Placement], requests: Requests, swarm: Swarm
) -> List[Violation]:
    """
    Budget and uniqueness breaches over all placements; empty means ok.

    Budgets are cumulative over every request placed on a node.
    """
    index = _index_requests(requests)
    violations: List[Violation] = []

    hosts: Dict[Tuple[int, int], int] = {}
    for placement in placements:
        request = index.get(placement.request_id)
        if request is None:
            violations.append(Violation(
                kind=ViolationKind.UNKNOWN_REQUEST,
                message=f"placement for unknown request {placement.request_id}",
                request_id=placement.request_id,
            ))
            continue
        for layer, node in sorted(placement.assignment.items()):
            if not 1 <= layer <= request.model.depth:
                violations.append(Violation(
                    kind=ViolationKind.UNKNOWN_LAYER,
                    message=f"request {request.id} has no layer {layer}",
                    request_id=request.id,
                    layer=layer,
                ))
                continue
            if not 0 <= node < swarm.n_nodes:
                violations.append(Violation(
                    kind=ViolationKind.UNKNOWN_NODE,
                    message=f"layer {layer} of request {request.id} on unknown node {node}",
                    request_id=request.id,
                    layer=layer,
                    node=node,
                ))
                continue
            hosts[(request.id, layer)] = hosts.get((request.id, layer), 0) + 1

    placed_requests = sorted({p.request_id for p in placements if p.request_id in index})
    for request_id in placed_requests:
        for layer in range(1, index[request_id].model.depth + 1):
            count = hosts.get((request_id, layer), 0)
            if count == 0:
                violations.append(Violation(
                    kind=ViolationKind.MISSING_LAYER,
                    message=f"layer {layer} of request {request_id} is not placed",
                    request_id=request_id,
                    layer=layer,
                ))
            elif count > 1:
                violations.append(Violation(
                    kind=ViolationKind.DUPLICATE_LAYER,
                    message=f"layer {layer} of request {request_id} placed {count} times",
                    request_id=request_id,
                    layer=layer,
                ))

    usage = resource_usage(placements, index, swarm)
    for node in swarm.nodes:
        if usage.memory[node.id] > node.mem_budget:
            violations.append(Violation(
                kind=ViolationKind.MEMORY,
                message=f"node {node.id} memory {usage.memory[node.id]} > {node.mem_budget}",
                node=node.id,
                used=usage.memory[node.id],
                budget=node.mem_budget,
            ))
        if usage.compute[node.id] > node.compute_budget:
            violations.append(Violation(
                kind=ViolationKind.COMPUTE,
                message=f"node {node.id} compute {usage.compute[node.id]} > {node.compute_budget}",
                node=node.id,
                used=usage.compute[node.id],
                budget=node.compute_budget,
            ))
    return violations


@dataclass(frozen=True)
class CompiledRequest:
    """Flat cost tables of one request; index 0 of per-layer tuples is unused."""
    depth: int
    source: int
    image_bytes: int
    memory: Tuple[int, ...]
    compute: Tuple[int, ...]
    output: Tuple[int, ...]
    shortcut: Tuple[Optional[Tuple[int, int]], ...]


@dataclass(frozen=True)
class CompiledScenario:
    """Scenario flattened into tuples for the search loops."""
    requests: Tuple[CompiledRequest, ...]
    n_nodes: int
    mem_budget: Tuple[int, ...]
    compute_budget: Tuple[int, ...]
    mult_per_sec: Tuple[float, ...]
    node_rates: Tuple[Tuple[float, ...], ...]
    source_rates: Tuple[Tuple[float, ...], ...]

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> "CompiledScenario":
        swarm = scenario.swarm
        compiled = []
        for request in scenario.requests:
            model = request.model
            shortcut: List[Optional[Tuple[int, int]]] = [None] * (model.depth + 1)
            for edge in model.residual_edges:
                shortcut[edge.target] = (edge.source, edge.payload_bytes)
            compiled.append(CompiledRequest(
                depth=model.depth,
                source=request.source,
                image_bytes=request.image_bytes,
                memory=(0, *(layer.memory_bytes for layer in model.layers)),
                compute=(0, *(layer.multiplications for layer in model.layers)),
                output=(0, *(layer.output_bytes for layer in model.layers)),
                shortcut=tuple(shortcut),
            ))
        return cls(
            requests=tuple(compiled),
            n_nodes=swarm.n_nodes,
            mem_budget=tuple(node.mem_budget for node in swarm.nodes),
            compute_budget=tuple(node.compute_budget for node in swarm.nodes),
            mult_per_sec=tuple(node.mult_per_sec for node in swarm.nodes),
            node_rates=tuple(tuple(row) for row in swarm.links.node_rates),
            source_rates=tuple(tuple(row) for row in swarm.links.source_rates),
        )

    def incoming_time(
        self, request: int, layer: int, node: int, placed: Sequence[int]
    ) -> float:
        """Transfer seconds into ``layer`` on ``node``; ``placed`` holds layers 1..layer-1."""
        spec = self.requests[request]
        if layer == 1:
            return spec.image_bytes / self.source_rates[spec.source][node]
        seconds = 0.0
        previous = placed[layer - 2]
        if previous != node:
            seconds = spec.output[layer - 1] / self.node_rates[previous][node]
        shortcut = spec.shortcut[layer]
        if shortcut is not None:
            source_layer, payload = shortcut
            origin = placed[source_layer - 1]
            if origin != node:
                seconds = max(seconds, payload / self.node_rates[origin][node])
        return seconds

    def processing(self, request: int, layer: int, node: int) -> float:
        return self.requests[request].compute[layer] / self.mult_per_sec[node]

    def layer_cost(self, request: int, layer: int, node: int, placed: Sequence[int]) -> float:
        """Incremental objective of putting ``layer`` on ``node``."""
        return self.processing(request, layer, node) + self.incoming_time(
            request, layer, node, placed
        )

    def evaluate(self, assignment: Sequence[Sequence[int]]) -> float:
        """Objective of a full joint assignment (one node list per request)."""
        total = 0.0
        for request, nodes in enumerate(assignment):
            for layer in range(1, self.requests[request].depth + 1):
                total += self.layer_cost(request, layer, nodes[layer - 1], nodes)
        return total

    def fits(self, assignment: Sequence[Sequence[int]]) -> bool:
        memory = [0] * self.n_nodes
        compute = [0] * self.n_nodes
        for request, nodes in enumerate(assignment):
            spec = self.requests[request]
            for layer, node in enumerate(nodes, start=1):
                memory[node] += spec.memory[layer]
                compute[node] += spec.compute[layer]
        return all(
            memory[i] <= self.mem_budget[i] and compute[i] <= self.compute_budget[i]
            for i in range(self.n_nodes)
        )


def placements_from_lists(assignment: Sequence[Sequence[int]]) -> List[Placement]:
    """Placement objects from one layer-ordered node list per request."""
    return [
        Placement(
            request_id=request,
            assignment={layer: node for layer, node in enumerate(nodes, start=1)},
        )
        for request, nodes in enumerate(assignment)
    ]
