"""Latency-optimal joint placement by depth-first branch-and-bound.

Decisions are (request, layer) pairs taken in arrival order and layer order.
Because every transfer into a layer depends only on where its predecessors
already sit, the incremental cost of a decision is exact, and the partial
cost plus the cheapest possible processing of the remaining layers is a valid
lower bound. ``solve_bruteforce`` enumerates the same decision space and is
the oracle for the search.
"""

import itertools
import math
import time
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from ..config import config
from ..latency import (
    CompiledScenario,
    derive_transmissions,
    placements_from_lists,
    total_latency,
)
from ..model import ensure_valid_model
from ..types.errors import OracleLimitError
from ..types.placement import Scenario
from ..types.results import SolveResult, SolveStatus
from ..utils.logging import get_logger

logger = get_logger(__name__)

TIE_TOLERANCE = 1e-9
DEADLINE_CHECK_EVERY = 1024

Decision = Tuple[int, int]


def _decision_order(scenario: Scenario) -> List[Decision]:
    return [
        (request_id, layer)
        for request_id in scenario.arrival_order()
        for layer in range(1, scenario.requests[request_id].model.depth + 1)
    ]


def _check_scenario(scenario: Scenario) -> None:
    for request in scenario.requests:
        ensure_valid_model(request.model, request.id)


def _unplaceable_layer(compiled: CompiledScenario, order: Sequence[Decision]) -> Optional[Decision]:
    """First decision whose layer fits on no node even when the swarm is empty."""
    for request, layer in order:
        spec = compiled.requests[request]
        if not any(
            spec.memory[layer] <= compiled.mem_budget[i]
            and spec.compute[layer] <= compiled.compute_budget[i]
            for i in range(compiled.n_nodes)
        ):
            return request, layer
    return None


def _min_processing(compiled: CompiledScenario, request: int, layer: int) -> float:
    return min(compiled.processing(request, layer, i) for i in range(compiled.n_nodes))


def root_lower_bound(scenario: Scenario) -> float:
    """Cheapest processing of every layer, ignoring budgets and transfers."""
    compiled = CompiledScenario.from_scenario(scenario)
    return sum(
        _min_processing(compiled, request, layer) for request, layer in _decision_order(scenario)
    )


def _result(
    scenario: Scenario,
    best: Optional[List[List[int]]],
    explored: int,
    completed: bool,
) -> SolveResult:
    if best is None:
        status = SolveStatus.INFEASIBLE if completed else SolveStatus.UNKNOWN
        return SolveResult(status=status, nodes_explored=explored)

    placements = placements_from_lists(best)
    return SolveResult(
        status=SolveStatus.OPTIMAL if completed else SolveStatus.FEASIBLE,
        placements=placements,
        breakdown=total_latency(placements, scenario.requests, scenario.swarm),
        transmissions=derive_transmissions(placements, scenario.requests),
        nodes_explored=explored,
        proven_optimal=completed,
    )


@dataclass
class _Frame:
    """One open decision on the search stack."""
    k: int
    cost: float
    candidates: List[Tuple[float, int]]
    index: int = 0
    applied: Optional[int] = None


class _BranchAndBound:
    """Mutable search state for one ``solve_exact`` call."""

    def __init__(
        self, compiled: CompiledScenario, order: Sequence[Decision], deadline: float
    ) -> None:
        self.compiled = compiled
        self.order = list(order)
        self.deadline = deadline

        # remaining[k]: cheapest processing of decisions k..end
        self.remaining = [0.0] * (len(self.order) + 1)
        for k in range(len(self.order) - 1, -1, -1):
            request, layer = self.order[k]
            self.remaining[k] = self.remaining[k + 1] + _min_processing(compiled, request, layer)

        self.memory = [0] * compiled.n_nodes
        self.compute = [0] * compiled.n_nodes
        self.placed = [[-1] * spec.depth for spec in compiled.requests]
        self.prefix: List[int] = []

        self.best_cost = math.inf
        self.best_key: Optional[Tuple[int, ...]] = None
        self.best: Optional[List[List[int]]] = None
        self.explored = 0
        self.timed_out = False

    def run(self) -> None:
        stack: List[_Frame] = []
        root = self._enter(0, 0.0)
        if root is not None:
            stack.append(root)
        while stack and not self.timed_out:
            frame = stack[-1]
            if frame.applied is not None:
                self._undo(frame, frame.applied)
            child = self._next_child(frame)
            if child is None:
                stack.pop()
                continue
            step, node = child
            self._apply(frame, node)
            entered = self._enter(frame.k + 1, frame.cost + step)
            if entered is not None:
                stack.append(entered)

    def _candidates(self, request: int, layer: int) -> List[Tuple[float, int]]:
        compiled = self.compiled
        spec = compiled.requests[request]
        placed = self.placed[request]
        candidates = []
        for node in range(compiled.n_nodes):
            if self.memory[node] + spec.memory[layer] > compiled.mem_budget[node]:
                continue
            if self.compute[node] + spec.compute[layer] > compiled.compute_budget[node]:
                continue
            candidates.append((compiled.layer_cost(request, layer, node, placed), node))
        candidates.sort()
        return candidates

    def _accept_leaf(self, cost: float) -> None:
        key = tuple(self.prefix)
        better = cost < self.best_cost - TIE_TOLERANCE
        tie_wins = (
            cost <= self.best_cost + TIE_TOLERANCE
            and self.best_key is not None
            and key < self.best_key
        )
        if better or tie_wins or self.best_key is None:
            self.best_cost = cost
            self.best_key = key
            self.best = [list(nodes) for nodes in self.placed]

    def _enter(self, k: int, cost: float) -> Optional[_Frame]:
        """Visit decision ``k``; a frame to expand, or None at a leaf or timeout."""
        self.explored += 1
        if self.explored % DEADLINE_CHECK_EVERY == 0 and time.monotonic() > self.deadline:
            self.timed_out = True
        if self.timed_out:
            return None
        if k == len(self.order):
            self._accept_leaf(cost)
            return None
        request, layer = self.order[k]
        return _Frame(k, cost, self._candidates(request, layer))

    def _next_child(self, frame: _Frame) -> Optional[Tuple[float, int]]:
        k = frame.k
        while frame.index < len(frame.candidates):
            step, node = frame.candidates[frame.index]
            frame.index += 1
            bound = frame.cost + step + self.remaining[k + 1]
            if bound > self.best_cost + TIE_TOLERANCE:
                # candidates are sorted by step, the rest are no better
                frame.index = len(frame.candidates)
                return None
            if self.best_key is not None and bound >= self.best_cost - TIE_TOLERANCE:
                # this branch can at best tie; only a lexicographically smaller key wins
                if (*self.prefix, node) > self.best_key[: k + 1]:
                    continue
            return step, node
        return None

    def _apply(self, frame: _Frame, node: int) -> None:
        request, layer = self.order[frame.k]
        spec = self.compiled.requests[request]
        self.placed[request][layer - 1] = node
        self.memory[node] += spec.memory[layer]
        self.compute[node] += spec.compute[layer]
        self.prefix.append(node)
        frame.applied = node

    def _undo(self, frame: _Frame, node: int) -> None:
        request, layer = self.order[frame.k]
        spec = self.compiled.requests[request]
        self.prefix.pop()
        self.memory[node] -= spec.memory[layer]
        self.compute[node] -= spec.compute[layer]
        self.placed[request][layer - 1] = -1
        frame.applied = None


def solve_exact(scenario: Scenario, time_limit: Optional[float] = None) -> SolveResult:
    """
    Latency-optimal joint placement of every request under the node budgets.

    Returns the incumbent with ``proven_optimal`` set when the search
    completes; when ``time_limit`` seconds elapse first the best incumbent is
    returned unproven. An instance in which some layer fits on no node, or no
    joint placement respects the budgets, yields status ``infeasible``.

    Raises:
        ModelError: a request's model fails validation
    """
    _check_scenario(scenario)
    time_limit = config.solver.time_limit if time_limit is None else time_limit
    compiled = CompiledScenario.from_scenario(scenario)
    order = _decision_order(scenario)

    blocked = _unplaceable_layer(compiled, order)
    if blocked is not None:
        logger.info(
            "Scenario infeasible: layer fits on no node",
            request_id=blocked[0],
            layer=blocked[1],
        )
        return _result(scenario, None, 0, completed=True)

    started = time.monotonic()
    search = _BranchAndBound(compiled, order, started + time_limit)
    search.run()
    completed = not search.timed_out

    logger.info(
        "Exact search finished",
        requests=len(scenario.requests),
        nodes=compiled.n_nodes,
        decisions=len(order),
        nodes_explored=search.explored,
        proven_optimal=completed and search.best is not None,
        total=None if search.best is None else search.best_cost,
        elapsed=round(time.monotonic() - started, 6),
    )
    return _result(scenario, search.best, search.explored, completed)


def oracle_space(scenario: Scenario) -> int:
    """Number of joint assignments: product over requests of N ** depth."""
    n_nodes = scenario.swarm.n_nodes
    return math.prod(n_nodes ** request.model.depth for request in scenario.requests)


def solve_bruteforce(scenario: Scenario, limit: Optional[int] = None) -> SolveResult:
    """
    Exhaustive oracle: try every joint assignment, keep the cheapest feasible.

    Raises:
        OracleLimitError: the assignment space exceeds ``limit``
        ModelError: a request's model fails validation
    """
    _check_scenario(scenario)
    limit = config.solver.oracle_limit if limit is None else limit
    space = oracle_space(scenario)
    if space > limit:
        raise OracleLimitError(space, limit)

    compiled = CompiledScenario.from_scenario(scenario)
    order = _decision_order(scenario)
    arrival = scenario.arrival_order()
    offsets = []
    position = 0
    for request in arrival:
        depth = compiled.requests[request].depth
        offsets.append((request, position, position + depth))
        position += depth

    best_cost = math.inf
    best: Optional[List[List[int]]] = None
    explored = 0
    assignment: List[List[int]] = [[] for _ in compiled.requests]
    for flat in itertools.product(range(compiled.n_nodes), repeat=len(order)):
        explored += 1
        for request, start, stop in offsets:
            assignment[request] = list(flat[start:stop])
        if not compiled.fits(assignment):
            continue
        cost = compiled.evaluate(assignment)
        if cost < best_cost - TIE_TOLERANCE:
            best_cost = cost
            best = [list(nodes) for nodes in assignment]

    logger.info(
        "Oracle enumeration finished",
        assignments=explored,
        total=None if best is None else best_cost,
    )
    return _result(scenario, best, explored, completed=True)
