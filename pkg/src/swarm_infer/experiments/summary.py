"""Aggregation of sweep rows over seeds, rank correlation and SVG charts."""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from pydantic import BaseModel, ConfigDict  # noqa: E402
from scipy import stats  # noqa: E402

from ..types.cnn import ModelTemplate  # noqa: E402
from ..types.errors import ValidationError  # noqa: E402
from ..types.results import SWEEP_COLUMNS, SolverKind, SweepRow  # noqa: E402
from ..utils.logging import get_logger  # noqa: E402
from .sweep import read_rows_csv  # noqa: E402

logger = get_logger(__name__)

METRICS = ("total", "source_time", "processing_time", "transmission_time",
           "rejections", "accepted", "shared_data", "threshold")

SVG_HASH_SALT = "swarm-infer"

Group = Tuple[SolverKind, ModelTemplate]


class SummaryRow(BaseModel):
    """Mean and sample standard deviation of one metric at one swept value."""
    model_config = ConfigDict(frozen=True)

    swept_value: float
    solver: SolverKind
    template: ModelTemplate
    metric: str
    samples: int
    mean: float
    std: float


def _check_metric(metric: str) -> None:
    if metric not in METRICS:
        raise ValidationError(
            f"Unknown metric '{metric}'", context=f"choose one of {', '.join(METRICS)}"
        )


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """
    Spearman rank correlation with average ranks for ties.

    Returns 0.0 when either side is constant.

    Raises:
        ValidationError: lengths differ or fewer than two points
    """
    if len(x) != len(y):
        raise ValidationError(f"Rank correlation needs equal lengths, got {len(x)} and {len(y)}")
    if len(x) < 2:
        raise ValidationError("Rank correlation needs at least two points")
    if np.ptp(np.asarray(x, dtype=float)) == 0 or np.ptp(np.asarray(y, dtype=float)) == 0:
        return 0.0
    return float(stats.spearmanr(x, y).statistic)


def summarize(rows: Sequence[SweepRow], metric: str = "total") -> List[SummaryRow]:
    """Per (solver, template, swept value) mean and std of ``metric`` over seeds.

    Rows with a missing metric (failed or infeasible points) are left out.
    """
    _check_metric(metric)
    samples: Dict[Tuple[SolverKind, ModelTemplate, float], List[float]] = {}
    for row in rows:
        value = getattr(row, metric)
        if value is None:
            continue
        samples.setdefault((row.solver, row.template, row.swept_value), []).append(float(value))

    summary = []
    for (solver, template, swept), values in sorted(
        samples.items(), key=lambda item: (item[0][0].value, item[0][1].value, item[0][2])
    ):
        data = np.asarray(values)
        summary.append(SummaryRow(
            swept_value=swept,
            solver=solver,
            template=template,
            metric=metric,
            samples=len(values),
            mean=float(data.mean()),
            std=float(data.std(ddof=1)) if len(values) > 1 else 0.0,
        ))

    for (solver, template), (xs, means) in trend_lines(summary).items():
        if len(xs) >= 2:
            logger.info(
                "Trend",
                metric=metric,
                solver=solver.value,
                template=template.value,
                points=len(xs),
                spearman=spearman(xs, means),
            )
    return summary


def trend_lines(summary: Sequence[SummaryRow]) -> Dict[Group, Tuple[List[float], List[float]]]:
    """Swept values and means per (solver, template), ordered by swept value."""
    lines: Dict[Group, Tuple[List[float], List[float]]] = {}
    for entry in sorted(summary, key=lambda s: s.swept_value):
        xs, means = lines.setdefault((entry.solver, entry.template), ([], []))
        xs.append(entry.swept_value)
        means.append(entry.mean)
    return lines


def plot_csv(
    csv_path: Union[str, Path],
    svg_path: Union[str, Path],
    metric: str = "total",
    xlabel: Optional[str] = None,
) -> None:
    """Render mean +/- std of ``metric`` against the swept value as an SVG line chart."""
    summary = summarize(read_rows_csv(csv_path), metric)

    plt.rcParams["svg.hashsalt"] = SVG_HASH_SALT
    fig, ax = plt.subplots(figsize=(6, 4))
    for solver, template in sorted({(s.solver, s.template) for s in summary},
                                   key=lambda g: (g[0].value, g[1].value)):
        points = sorted(
            (s for s in summary if s.solver is solver and s.template is template),
            key=lambda s: s.swept_value,
        )
        ax.errorbar(
            [p.swept_value for p in points],
            [p.mean for p in points],
            yerr=[p.std for p in points],
            marker="o",
            capsize=3,
            label=f"{solver.value} / {template.value}",
        )
    ax.set_xlabel(xlabel or SWEEP_COLUMNS[0])
    ax.set_ylabel(metric)
    ax.grid(True, alpha=0.3)
    if summary:
        ax.legend()
    fig.tight_layout()
    fig.savefig(svg_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug("Wrote chart", csv=str(csv_path), svg=str(svg_path), metric=metric)
