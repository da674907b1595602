"""swarm-infer command-line entry point."""

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Callable, Dict, List, NoReturn, Optional, Sequence

from .config import Config
from .experiments import (
    compare_shared_data,
    find_min_uavs,
    find_rejection_threshold,
    format_rows_csv,
    generate_scenario,
    load_sweep_spec,
    plot_csv,
    run_sweep,
)
from .model import load_model, validate_model
from .network import load_swarm
from .solvers import run_stream, solve_bruteforce, solve_exact
from .solvers.heuristic import format_outcome_log
from .types.cnn import ModelTemplate
from .types.errors import InputFileError, SwarmInferError, ValidationError
from .types.placement import Scenario, Violation
from .types.results import HeuristicParams, ScenarioParams, SharedDataPoint
from .utils.logging import get_logger, setup_logging
from .utils.validation import load_json_file, parse_int_range, validate_weights, write_json_file

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2


class UsageError(Exception):
    """Raised instead of exiting when argument parsing fails."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _add_scenario_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("scenario")
    group.add_argument("--scenario", type=Path, help="scenario JSON file")
    group.add_argument("--uavs", type=int, default=5, help="generated swarm size")
    group.add_argument("--requests", type=int, default=5, help="generated request count")
    group.add_argument("--depth", type=int, default=5, help="generated model depth")
    group.add_argument(
        "--template",
        choices=[t.value for t in ModelTemplate],
        default=ModelTemplate.SEQUENTIAL.value,
    )
    group.add_argument("--save-scenario", type=Path, help="write the scenario used to this file")


def _add_weight_args(parser: argparse.ArgumentParser, defaults: Config) -> None:
    parser.add_argument("--alpha", type=float, default=defaults.solver.alpha)
    parser.add_argument("--beta", type=float, default=defaults.solver.beta)


def build_parser(defaults: Optional[Config] = None) -> argparse.ArgumentParser:
    defaults = defaults or Config.load()
    parser = _ArgumentParser(
        prog="swarm-infer",
        description="CNN layer placement and latency simulation for UAV swarms",
    )
    parser.add_argument("--seed", type=int, help="random seed (default: $SWARM_INFER_SEED or 0)")
    parser.add_argument(
        "--log-level", choices=["debug", "info", "warning", "error"], help="log level on stderr"
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    solve = sub.add_parser("solve", help="latency-optimal placement by branch-and-bound")
    _add_scenario_args(solve)
    solve.add_argument("--time-limit", type=float, default=defaults.solver.time_limit)
    solve.add_argument(
        "--oracle", action="store_true", help="enumerate every assignment instead"
    )
    solve.add_argument("--out", type=Path, help="SolveResult JSON (default: stdout)")

    heuristic = sub.add_parser("heuristic", help="online DistInference placement")
    _add_scenario_args(heuristic)
    _add_weight_args(heuristic, defaults)
    heuristic.add_argument("--out", type=Path, help="outcome log (default: stdout)")
    heuristic.add_argument("--format", choices=["csv", "json"], default="csv")

    sweep = sub.add_parser("sweep", help="run a sweep spec")
    sweep.add_argument("--spec", type=Path, required=True, help="sweep spec JSON file")
    sweep.add_argument("--out", type=Path, help="results CSV (default: spec output or stdout)")
    sweep.add_argument("--plot", action="store_true", help="also write an SVG next to the CSV")
    sweep.add_argument("--metric", default=None, help="plotted column")
    sweep.add_argument("--seeds", type=int, help="replace spec seeds with SEED..SEED+N-1")
    sweep.add_argument("--workers", type=int, help="override spec worker count")
    sweep.add_argument("--format", choices=["csv", "json"], default="csv")

    threshold = sub.add_parser("threshold", help="largest depth without rejections")
    threshold.add_argument("--requests", type=int, default=5)
    threshold.add_argument("--uavs", type=int, default=5)
    threshold.add_argument(
        "--template",
        choices=[t.value for t in ModelTemplate],
        default=ModelTemplate.SEQUENTIAL.value,
    )
    threshold.add_argument("--depth-cap", type=int, default=defaults.solver.depth_cap)
    threshold.add_argument(
        "--scan",
        choices=["depth", "uavs"],
        default="depth",
        help="'uavs' finds the smallest swarm accepting every request at --depth",
    )
    threshold.add_argument("--depth", type=int, default=5)
    _add_weight_args(threshold, defaults)
    threshold.add_argument("--out", type=Path)

    shared = sub.add_parser("shared-data", help="residual vs sequential shared bytes")
    shared.add_argument("--depths", default="3:20", help="a:b or a,b,c")
    shared.add_argument("--requests", default="1:20", help="a:b or a,b,c")
    shared.add_argument("--seeds", type=int, default=30, help="seed count starting at --seed")
    shared.add_argument("--uavs", type=int, default=5)
    _add_weight_args(shared, defaults)
    shared.add_argument("--out", type=Path)
    shared.add_argument("--format", choices=["csv", "json"], default="csv")

    validate = sub.add_parser("validate", help="check model, swarm or scenario files")
    validate.add_argument("--model", type=Path)
    validate.add_argument("--swarm", type=Path)
    validate.add_argument("--scenario", type=Path)

    return parser


def resolve_seed(explicit: Optional[int], defaults: Config) -> int:
    """``--seed`` first, then ``SWARM_INFER_SEED``, then 0."""
    if explicit is not None:
        return explicit
    return defaults.run.seed


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


def _scenario(args: argparse.Namespace, seed: int) -> Scenario:
    if args.scenario is not None:
        scenario = load_json_file(args.scenario, Scenario)
    else:
        scenario = generate_scenario(args.uavs, args.requests, args.template, args.depth, seed)
    if args.save_scenario is not None:
        write_json_file(args.save_scenario, scenario)
    return scenario


def _weights(args: argparse.Namespace) -> HeuristicParams:
    validate_weights(args.alpha, args.beta)
    return HeuristicParams(alpha=args.alpha, beta=args.beta)


def _cmd_solve(args: argparse.Namespace, seed: int) -> int:
    scenario = _scenario(args, seed)
    if args.oracle:
        result = solve_bruteforce(scenario)
    else:
        result = solve_exact(scenario, time_limit=args.time_limit)
    _emit(result.model_dump_json(indent=2) + "\n", args.out)
    return EXIT_OK if result.placements is not None else EXIT_FAILED


def _cmd_heuristic(args: argparse.Namespace, seed: int) -> int:
    params = _weights(args)
    scenario = _scenario(args, seed)
    result = run_stream(scenario, params)
    _emit(format_outcome_log(result.outcomes, args.format), args.out)
    logger.info(
        "Heuristic run finished",
        accepted=result.accepted,
        rejections=result.rejections,
        total=result.breakdown.total,
    )
    if scenario.requests and result.accepted == 0:
        return EXIT_FAILED
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace, seed: int) -> int:
    spec = load_sweep_spec(args.spec)
    update: Dict[str, object] = {}
    if args.seeds is not None:
        update["seeds"] = list(range(seed, seed + args.seeds))
    if args.workers is not None:
        update["workers"] = args.workers
    if update:
        spec = spec.model_validate({**spec.model_dump(), **update})

    out = args.out or spec.output
    if args.plot and out is None:
        raise ValidationError("--plot needs an output path (--out or spec output)")

    rows = run_sweep(spec)
    if args.format == "json":
        text = json.dumps([row.model_dump(mode="json") for row in rows], indent=2) + "\n"
    else:
        text = format_rows_csv(rows)
    _emit(text, out)

    if args.plot and out is not None:
        if args.format != "csv":
            raise ValidationError("--plot reads the CSV output; use --format csv")
        metric = args.metric or _default_metric(spec.kind.value)
        plot_csv(out, out.with_suffix(".svg"), metric, xlabel=spec.kind.value)

    failed = [row for row in rows if row.status.startswith("error")]
    return EXIT_FAILED if failed else EXIT_OK


def _default_metric(kind: str) -> str:
    if kind in ("rejection_threshold", "min_uavs"):
        return "threshold"
    if kind == "shared_data":
        return "shared_data"
    return "total"


def _cmd_threshold(args: argparse.Namespace, seed: int) -> int:
    params = _weights(args)
    if args.scan == "uavs":
        result = find_min_uavs(args.requests, args.depth, args.template, seed, heuristic=params)
    else:
        result = find_rejection_threshold(
            args.requests,
            args.uavs,
            args.template,
            seed,
            params=ScenarioParams(n_uavs=args.uavs, n_requests=args.requests),
            heuristic=params,
            depth_cap=args.depth_cap,
        )
    _emit(result.model_dump_json(indent=2) + "\n", args.out)
    return EXIT_OK


def _format_points(points: Sequence[SharedDataPoint], fmt: str) -> str:
    records = [point.model_dump() for point in points]
    if fmt == "json":
        return json.dumps(records, indent=2) + "\n"
    buffer = io.StringIO()
    writer = csv.DictWriter(
        buffer, fieldnames=list(SharedDataPoint.model_fields), lineterminator="\n"
    )
    writer.writeheader()
    writer.writerows(records)
    return buffer.getvalue()


def _cmd_shared_data(args: argparse.Namespace, seed: int) -> int:
    params = _weights(args)
    depths = parse_int_range(args.depths, "depths")
    request_counts = parse_int_range(args.requests, "requests")
    points = compare_shared_data(
        depths,
        request_counts,
        range(seed, seed + args.seeds),
        n_uavs=args.uavs,
        heuristic=params,
    )
    _emit(_format_points(points, args.format), args.out)
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace, seed: int) -> int:
    if args.model is None and args.swarm is None and args.scenario is None:
        raise UsageError("validate: give at least one of --model, --swarm, --scenario")

    violations: List[Violation] = []
    if args.model is not None:
        violations.extend(validate_model(load_model(args.model)))
    if args.swarm is not None:
        load_swarm(args.swarm)
    if args.scenario is not None:
        scenario = load_json_file(args.scenario, Scenario)
        for request in scenario.requests:
            violations.extend(
                v.model_copy(update={"request_id": request.id})
                for v in validate_model(request.model)
            )

    report = {
        "valid": not violations,
        "violations": [v.model_dump(mode="json") for v in violations],
    }
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return EXIT_FAILED if violations else EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, int], int]] = {
    "solve": _cmd_solve,
    "heuristic": _cmd_heuristic,
    "sweep": _cmd_sweep,
    "threshold": _cmd_threshold,
    "shared-data": _cmd_shared_data,
    "validate": _cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; returns 0 on success, 1 on usage errors, 2 on failed runs."""
    defaults = Config.load()
    parser = build_parser(defaults)
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    setup_logging(args.log_level)
    seed = resolve_seed(args.seed, defaults)
    print(f"seed={seed}", file=sys.stderr)
    logger.info(
        "Starting run",
        command=args.command,
        seed=seed,
        seed_source="flag" if args.seed is not None else (
            "env" if defaults.run.seed_from_env else "default"
        ),
    )

    try:
        return COMMANDS[args.command](args, seed)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except (InputFileError, ValidationError) as e:
        logger.error("Invalid input", **e.to_dict())
        print(f"error: {e}" + (f" ({e.context})" if e.context else ""), file=sys.stderr)
        return EXIT_USAGE
    except SwarmInferError as e:
        logger.error("Run failed", **e.to_dict())
        print(f"error: {e}" + (f" ({e.context})" if e.context else ""), file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
