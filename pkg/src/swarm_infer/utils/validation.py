"""Input file loading and parameter validation utilities."""

import json
from pathlib import Path
from typing import List, Type, TypeVar, Union

import pydantic
from pydantic import BaseModel

from ..types.errors import InputFileError, ValidationError

M = TypeVar("M", bound=BaseModel)


def _field_path(loc: tuple) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def load_json_file(path: Union[str, Path], model_cls: Type[M]) -> M:
    """
    Load and validate a JSON document into ``model_cls``.

    Raises:
        InputFileError: naming the file and the first offending field
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputFileError(f"Cannot read {path}: {e.strerror}", path=str(path)) from e

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputFileError(
            f"Malformed JSON in {path} at line {e.lineno} column {e.colno}: {e.msg}",
            path=str(path),
        ) from e

    try:
        return model_cls.model_validate(data)
    except pydantic.ValidationError as e:
        first = e.errors()[0]
        field = _field_path(first["loc"])
        raise InputFileError(
            f"Invalid {model_cls.__name__} in {path}: field '{field}': {first['msg']}",
            path=str(path),
            field=field,
        ) from e


def write_json_file(path: Union[str, Path], model: BaseModel) -> None:
    """Write ``model`` as indented JSON."""
    Path(path).write_text(model.model_dump_json(indent=2) + "\n", encoding="utf-8")


def parse_int_range(text: str, parameter_name: str = "range") -> List[int]:
    """
    Parse ``"a:b"`` (inclusive) or ``"a,b,c"`` into a list of integers.

    Raises:
        ValidationError: on malformed or empty ranges
    """
    text = text.strip()
    try:
        if ":" in text:
            start_text, stop_text = text.split(":", 1)
            start, stop = int(start_text), int(stop_text)
            values = list(range(start, stop + 1))
        else:
            values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ValidationError(f"Invalid {parameter_name}: {text!r}") from e

    if not values:
        raise ValidationError(f"Invalid {parameter_name}: {text!r} is empty")
    return values


def validate_weights(alpha: float, beta: float) -> None:
    """Check the heuristic weights lie in [0, 1] and sum to 1."""
    if alpha < 0 or beta < 0:
        raise ValidationError(f"alpha and beta must be non-negative, got {alpha}, {beta}")
    if abs(alpha + beta - 1.0) > 1e-9:
        raise ValidationError(f"alpha + beta must equal 1, got {alpha + beta}")
