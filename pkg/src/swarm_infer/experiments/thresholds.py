"""Rejection threshold scans over model depth and swarm size."""

from typing import Optional, Union

from ..config import config
from ..model import MIN_RESIDUAL_DEPTH
from ..solvers.heuristic import run_stream
from ..types.cnn import ModelTemplate
from ..types.results import HeuristicParams, ScenarioParams, ThresholdResult
from ..utils.logging import get_logger
from .scenario import generate_scenario

logger = get_logger(__name__)

MAX_UAVS = 256
NO_DEPTH_THRESHOLD = "no threshold below cap"
NO_SWARM_THRESHOLD = "no swarm size below cap accepts every request"


def _rejections(
    n_uavs: int,
    n_requests: int,
    template: ModelTemplate,
    depth: int,
    seed: int,
    params: Optional[ScenarioParams],
    heuristic: Optional[HeuristicParams],
) -> int:
    scenario = generate_scenario(n_uavs, n_requests, template, depth, seed, params)
    return run_stream(scenario, heuristic).rejections


def find_rejection_threshold(
    n_requests: int,
    n_uavs: int,
    template: Union[ModelTemplate, str],
    seed: int,
    *,
    params: Optional[ScenarioParams] = None,
    heuristic: Optional[HeuristicParams] = None,
    depth_cap: Optional[int] = None,
) -> ThresholdResult:
    """
    Largest depth at which the request stream sees zero rejections.

    Depth is scanned upward from the template's minimum and the scan stops at
    the first rejection. ``value`` is 0 when even the minimum depth rejects.
    Reaching ``depth_cap`` without a rejection reports ``reached_cap``.
    """
    template = ModelTemplate(template)
    depth_cap = config.solver.depth_cap if depth_cap is None else depth_cap
    start = MIN_RESIDUAL_DEPTH if template is ModelTemplate.RESIDUAL else 1

    for depth in range(start, depth_cap + 1):
        rejected = _rejections(n_uavs, n_requests, template, depth, seed, params, heuristic)
        if rejected:
            value = depth - 1 if depth > start else 0
            logger.debug(
                "Rejection threshold found",
                n_uavs=n_uavs,
                n_requests=n_requests,
                template=template.value,
                first_rejecting_depth=depth,
                threshold=value,
            )
            return ThresholdResult(value=value)

    logger.info("Depth cap reached without rejection", depth_cap=depth_cap, n_uavs=n_uavs)
    return ThresholdResult(value=depth_cap, reached_cap=True, message=NO_DEPTH_THRESHOLD)


def find_min_uavs(
    n_requests: int,
    depth: int,
    template: Union[ModelTemplate, str],
    seed: int,
    *,
    params: Optional[ScenarioParams] = None,
    heuristic: Optional[HeuristicParams] = None,
    max_uavs: int = MAX_UAVS,
) -> ThresholdResult:
    """Smallest swarm that accepts every request at fixed ``depth``.

    Reconstruction of the "minimum UAVs to start accepting requests" curve:
    the depth scan turned around, with swarm size scanned upward instead.
    """
    template = ModelTemplate(template)
    for n_uavs in range(1, max_uavs + 1):
        if not _rejections(n_uavs, n_requests, template, depth, seed, params, heuristic):
            return ThresholdResult(value=n_uavs)

    logger.info("Swarm size cap reached with rejections", max_uavs=max_uavs, depth=depth)
    return ThresholdResult(reached_cap=True, message=NO_SWARM_THRESHOLD)
