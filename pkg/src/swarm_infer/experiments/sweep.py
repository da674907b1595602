"""Sweep harness: one scenario parameter varied over values and seeds."""

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

from ..latency import derive_transmissions, shared_data
from ..solvers.exact import solve_exact
from ..solvers.heuristic import run_stream
from ..types.cnn import ModelTemplate
from ..types.errors import SwarmInferError
from ..types.placement import Scenario
from ..types.results import (
    SWEEP_COLUMNS,
    HeuristicParams,
    ScenarioParams,
    SharedDataPoint,
    SolverKind,
    SweepKind,
    SweepRow,
    SweepSpec,
)
from ..utils.logging import get_logger
from ..utils.validation import load_json_file
from .scenario import generate_scenario, retopologize, scenario_from_params
from .thresholds import find_min_uavs, find_rejection_threshold

logger = get_logger(__name__)

Point = Tuple[SweepSpec, float, int, SolverKind]

THRESHOLD_KINDS = (SweepKind.REJECTION_THRESHOLD, SweepKind.MIN_UAVS, SweepKind.SHARED_DATA)


def load_sweep_spec(path: Union[str, Path]) -> SweepSpec:
    return load_json_file(path, SweepSpec)


def _params_for(spec: SweepSpec, value: float) -> Tuple[ScenarioParams, HeuristicParams]:
    fixed = spec.fixed
    heuristic = HeuristicParams(alpha=spec.alpha, beta=spec.beta)
    if spec.kind is SweepKind.REQUESTS:
        fixed = fixed.model_copy(update={"n_requests": int(value)})
    elif spec.kind is SweepKind.LAYERS:
        fixed = fixed.model_copy(update={"depth": int(value)})
    elif spec.kind is SweepKind.UAVS:
        fixed = fixed.model_copy(update={"n_uavs": int(value)})
    elif spec.kind is SweepKind.ALPHABETA:
        heuristic = HeuristicParams(alpha=value, beta=1.0 - value)
    return fixed, heuristic


def _exact_row(value: float, seed: int, scenario: Scenario, spec: SweepSpec) -> SweepRow:
    result = solve_exact(scenario, time_limit=spec.time_limit)
    row = SweepRow(
        swept_value=value,
        seed=seed,
        solver=SolverKind.EXACT,
        template=spec.fixed.template,
        status=result.status.value,
    )
    if result.breakdown is None:
        return row
    return row.model_copy(update={
        "total": result.breakdown.total,
        "source_time": result.breakdown.source_time,
        "processing_time": result.breakdown.processing_time,
        "transmission_time": result.breakdown.transmission_time,
        "rejections": 0,
        "accepted": len(scenario.requests),
        "shared_data": shared_data(result.transmissions, scenario.requests),
    })


def _heuristic_row(
    value: float,
    seed: int,
    scenario: Scenario,
    template: ModelTemplate,
    heuristic: HeuristicParams,
) -> SweepRow:
    result = run_stream(scenario, heuristic)
    return SweepRow(
        swept_value=value,
        seed=seed,
        solver=SolverKind.HEURISTIC,
        template=template,
        total=result.breakdown.total,
        source_time=result.breakdown.source_time,
        processing_time=result.breakdown.processing_time,
        transmission_time=result.breakdown.transmission_time,
        rejections=result.rejections,
        accepted=result.accepted,
        shared_data=result.shared_data,
    )


def shared_data_point(
    n_uavs: int,
    n_requests: int,
    depth: int,
    seed: int,
    params: Optional[ScenarioParams] = None,
    heuristic: Optional[HeuristicParams] = None,
) -> SharedDataPoint:
    """
    Shared bytes of one heuristic placement under both topologies.

    The stream is placed once on the residual scenario; the sequential figure
    is the same placement with the shortcuts removed, so the two values differ
    exactly by the shortcut payloads that cross nodes.
    """
    sequential = generate_scenario(
        n_uavs, n_requests, ModelTemplate.SEQUENTIAL, depth, seed, params
    )
    residual = retopologize(sequential, ModelTemplate.RESIDUAL)
    result = run_stream(residual, heuristic)
    placements = result.placements
    accepted_ids = {p.request_id for p in placements}

    residual_requests = [r for r in residual.requests if r.id in accepted_ids]
    sequential_requests = [r for r in sequential.requests if r.id in accepted_ids]
    residual_plan = derive_transmissions(placements, residual_requests)
    sequential_plan = derive_transmissions(placements, sequential_requests)

    return SharedDataPoint(
        depth=depth,
        n_requests=n_requests,
        seed=seed,
        sequential=shared_data(sequential_plan, sequential_requests),
        residual=shared_data(residual_plan, residual_requests),
        crossing_shortcuts=len(residual_plan) - len(sequential_plan),
        rejections=result.rejections,
    )


def compare_shared_data(
    depths: Iterable[int],
    request_counts: Iterable[int],
    seeds: Iterable[int],
    *,
    n_uavs: Optional[int] = None,
    params: Optional[ScenarioParams] = None,
    heuristic: Optional[HeuristicParams] = None,
) -> List[SharedDataPoint]:
    """Paired residual/sequential shared data for every (depth, requests, seed)."""
    params = params or ScenarioParams()
    n_uavs = params.n_uavs if n_uavs is None else n_uavs
    points = [
        shared_data_point(n_uavs, n_requests, depth, seed, params, heuristic)
        for depth in depths
        for n_requests in request_counts
        for seed in seeds
    ]
    logger.info(
        "Shared data comparison finished",
        points=len(points),
        residual_above=sum(1 for p in points if p.residual > p.sequential),
    )
    return points


def _shared_data_rows(value: float, seed: int, spec: SweepSpec) -> List[SweepRow]:
    fixed, heuristic = _params_for(spec, value)
    depth, n_requests = fixed.depth, fixed.n_requests
    if spec.axis is SweepKind.LAYERS:
        depth = int(value)
    else:
        n_requests = int(value)
    point = shared_data_point(fixed.n_uavs, n_requests, depth, seed, fixed, heuristic)
    return [
        SweepRow(
            swept_value=value,
            seed=seed,
            solver=SolverKind.HEURISTIC,
            template=template,
            shared_data=shared,
            rejections=point.rejections,
            accepted=n_requests - point.rejections,
        )
        for template, shared in (
            (ModelTemplate.SEQUENTIAL, point.sequential),
            (ModelTemplate.RESIDUAL, point.residual),
        )
    ]


def _threshold_row(value: float, seed: int, spec: SweepSpec) -> SweepRow:
    fixed, heuristic = _params_for(spec, value)
    if spec.kind is SweepKind.REJECTION_THRESHOLD:
        found = find_rejection_threshold(
            fixed.n_requests,
            int(value),
            fixed.template,
            seed,
            params=fixed,
            heuristic=heuristic,
            depth_cap=spec.depth_cap,
        )
    else:
        found = find_min_uavs(
            int(value), fixed.depth, fixed.template, seed, params=fixed, heuristic=heuristic
        )
    return SweepRow(
        swept_value=value,
        seed=seed,
        solver=SolverKind.HEURISTIC,
        template=fixed.template,
        status="cap" if found.reached_cap else "ok",
        threshold=found.value,
    )


def _run_point(point: Point) -> List[SweepRow]:
    spec, value, seed, solver = point
    try:
        if spec.kind is SweepKind.SHARED_DATA:
            return _shared_data_rows(value, seed, spec)
        if spec.kind in THRESHOLD_KINDS:
            return [_threshold_row(value, seed, spec)]

        fixed, heuristic = _params_for(spec, value)
        scenario = scenario_from_params(fixed, seed)
        if solver is SolverKind.EXACT:
            return [_exact_row(value, seed, scenario, spec)]
        return [_heuristic_row(value, seed, scenario, fixed.template, heuristic)]
    except (SwarmInferError, ValueError) as e:
        code = getattr(e, "code", None) or type(e).__name__
        logger.warning(
            "Sweep point failed",
            kind=spec.kind.value,
            swept_value=value,
            seed=seed,
            solver=solver.value,
            error=str(e),
        )
        return [
            SweepRow(
                swept_value=value,
                seed=seed,
                solver=solver,
                template=spec.fixed.template,
                status=f"error:{code}",
            )
        ]


def _points(spec: SweepSpec) -> List[Point]:
    # Threshold and shared-data kinds are defined by the heuristic alone
    solvers = [SolverKind.HEURISTIC] if spec.kind in THRESHOLD_KINDS else spec.solvers
    return [
        (spec, value, seed, solver)
        for value in spec.values
        for seed in spec.seeds
        for solver in solvers
    ]


def run_sweep(spec: SweepSpec) -> List[SweepRow]:
    """
    Run every (swept value, seed, solver) point of ``spec``.

    Points run in a process pool when ``spec.workers > 1``. Row order is
    fixed by (swept value, seed, solver, template) whatever the completion
    order. A failing point yields a row whose status names the error.
    """
    points = _points(spec)
    logger.info(
        "Sweep started",
        kind=spec.kind.value,
        points=len(points),
        workers=spec.workers,
    )

    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            batches = list(pool.map(_run_point, points))
    else:
        batches = [_run_point(point) for point in points]

    rows = [row for batch in batches for row in batch]
    logger.info(
        "Sweep finished",
        kind=spec.kind.value,
        rows=len(rows),
        failed=sum(1 for row in rows if row.status.startswith("error")),
    )
    return rows


def _csv_cell(value: object) -> str:
    if value is None:
        return ""
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def format_rows_csv(rows: Sequence[SweepRow]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({name: _csv_cell(getattr(row, name)) for name in SWEEP_COLUMNS})
    return buffer.getvalue()


def write_rows_csv(rows: Sequence[SweepRow], target: Union[str, Path, TextIO]) -> None:
    text = format_rows_csv(rows)
    if isinstance(target, (str, Path)):
        Path(target).write_text(text, encoding="utf-8")
    else:
        target.write(text)


def read_rows_csv(path: Union[str, Path]) -> List[SweepRow]:
    """Rows of a sweep CSV; empty cells read back as missing values."""
    with open(path, newline="", encoding="utf-8") as handle:
        records: List[Dict[str, Optional[str]]] = [
            {key: (cell if cell != "" else None) for key, cell in record.items()}
            for record in csv.DictReader(handle)
        ]
    return [SweepRow.model_validate(record) for record in records]
