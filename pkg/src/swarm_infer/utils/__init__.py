"""Utility modules for swarm-infer."""

from .logging import setup_logging, get_logger
from .validation import load_json_file, parse_int_range, validate_weights, write_json_file

__all__ = [
    "setup_logging",
    "get_logger",
    "load_json_file",
    "write_json_file",
    "parse_int_range",
    "validate_weights",
]
