"""Seeded scenario generation for experiments."""

from typing import List, Optional, Union

import numpy as np

from ..model import build_model_from_template, residual_blocks
from ..network import build_swarm
from ..types.cnn import ModelTemplate
from ..types.placement import InferenceRequest, Scenario
from ..types.results import RequestLoad, ScenarioParams
from ..utils.logging import get_logger

logger = get_logger(__name__)

# Request origins use a stream independent of the swarm's position draws
LOAD_STREAM = 1


def request_origins(n_requests: int, n_sources: int, seed: int) -> List[int]:
    """Source of each request, uniform over sources.

    Request r draws from its own stream, so the first R origins are the same
    whatever the total request count.
    """
    return [
        int(np.random.default_rng([seed, LOAD_STREAM, r]).integers(n_sources))
        for r in range(n_requests)
    ]


def draw_request_load(n_requests: int, n_sources: int, seed: int) -> RequestLoad:
    """Number of requests each source generates, with every request's origin."""
    origins = request_origins(n_requests, n_sources, seed)
    counts = np.bincount(np.asarray(origins, dtype=int), minlength=n_sources)
    return RequestLoad(counts=[int(c) for c in counts], total=n_requests, origins=origins)


def generate_scenario(
    n_uavs: int,
    n_requests: int,
    model_template: Union[ModelTemplate, str],
    depth: int,
    seed: int,
    params: Optional[ScenarioParams] = None,
) -> Scenario:
    """
    Build a swarm of ``n_uavs`` nodes, each also an image source, and
    ``n_requests`` requests for the same template model.

    Budgets, rate model, width profile and area come from ``params``; the
    counts, template and depth given here override it. Deterministic in
    (arguments, seed).

    Raises:
        SwarmError: n_uavs < 1
        ModelError: invalid depth for the template
    """
    params = params or ScenarioParams()
    model = build_model_from_template(model_template, depth, params.profile)
    swarm = build_swarm(
        n_uavs,
        n_sources=n_uavs,
        budgets=params.budgets,
        area_size=params.area_size,
        rate_model=params.rate_model,
        seed=seed,
    )

    load = draw_request_load(n_requests, swarm.n_sources, seed)
    requests = [
        InferenceRequest(id=r, model=model, source=load.origins[r], arrival=r)
        for r in range(n_requests)
    ]

    logger.debug(
        "Generated scenario",
        n_uavs=n_uavs,
        n_requests=n_requests,
        template=ModelTemplate(model_template).value,
        depth=depth,
        seed=seed,
    )
    return Scenario(swarm=swarm, requests=requests)


def scenario_from_params(params: ScenarioParams, seed: int) -> Scenario:
    return generate_scenario(
        params.n_uavs, params.n_requests, params.template, params.depth, seed, params
    )


def retopologize(scenario: Scenario, template: Union[ModelTemplate, str]) -> Scenario:
    """Same scenario with every model's shortcuts rebuilt for ``template``.

    Depths too shallow for a shortcut come back without edges.
    """
    template = ModelTemplate(template)
    requests = []
    for request in scenario.requests:
        edges = residual_blocks(request.model.layers) if template is ModelTemplate.RESIDUAL else []
        requests.append(
            request.model_copy(update={"model": request.model.with_residual_edges(edges)})
        )
    return Scenario(swarm=scenario.swarm, requests=requests)
