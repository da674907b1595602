"""Placement solvers: exact branch-and-bound and the DistInference heuristic."""

from .exact import root_lower_bound, solve_bruteforce, solve_exact
from .heuristic import (
    SwarmState,
    condi1,
    dist_inference,
    nrm_score,
    run_stream,
    score_candidates,
    write_outcome_log,
)

__all__ = [
    # Exact search
    "solve_exact",
    "solve_bruteforce",
    "root_lower_bound",
    # Online heuristic
    "SwarmState",
    "condi1",
    "nrm_score",
    "score_candidates",
    "dist_inference",
    "run_stream",
    "write_outcome_log",
]
