"""Scenario generation, sweeps, threshold scans and summaries."""

from .scenario import (
    draw_request_load,
    generate_scenario,
    request_origins,
    retopologize,
    scenario_from_params,
)
from .summary import SummaryRow, plot_csv, spearman, summarize, trend_lines
from .sweep import (
    compare_shared_data,
    format_rows_csv,
    load_sweep_spec,
    read_rows_csv,
    run_sweep,
    shared_data_point,
    write_rows_csv,
)
from .thresholds import find_min_uavs, find_rejection_threshold

__all__ = [
    # Scenarios
    "draw_request_load",
    "request_origins",
    "generate_scenario",
    "scenario_from_params",
    "retopologize",
    # Sweeps
    "run_sweep",
    "load_sweep_spec",
    "compare_shared_data",
    "shared_data_point",
    "format_rows_csv",
    "write_rows_csv",
    "read_rows_csv",
    # Thresholds
    "find_rejection_threshold",
    "find_min_uavs",
    # Summaries
    "SummaryRow",
    "summarize",
    "spearman",
    "trend_lines",
    "plot_csv",
]
