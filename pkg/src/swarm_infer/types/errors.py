"""Error types and categories for swarm-infer."""

import uuid
from enum import Enum
from typing import Any, Dict, Optional


class ErrorCategory(str, Enum):
    """Error categories for comprehensive error handling."""
    MODEL = "MODEL"
    NETWORK = "NETWORK"
    PLACEMENT = "PLACEMENT"
    SOLVER = "SOLVER"
    INPUT = "INPUT"
    VALIDATION = "VALIDATION"


class SwarmInferError(Exception):
    """Base error class for swarm-infer."""

    def __init__(
        self,
        message: str,
        category: ErrorCategory,
        code: Optional[str] = None,
        context: Optional[str] = None,
        request_id: Optional[int] = None,
    ) -> None:
        super().__init__(message)
        self.id = str(uuid.uuid4())
        self.category = category
        self.code = code
        self.context = context
        self.request_id = request_id

    def to_dict(self) -> Dict[str, Any]:
        """Convert error to dictionary for logging."""
        return {
            "id": self.id,
            "message": str(self),
            "category": self.category.value,
            "code": self.code,
            "context": self.context,
            "request_id": self.request_id,
        }


class ModelError(SwarmInferError):
    """CNN model construction errors."""

    def __init__(
        self,
        message: str,
        context: Optional[str] = None,
    ) -> None:
        super().__init__(message, ErrorCategory.MODEL, "MODEL_ERROR", context)


class SwarmError(SwarmInferError):
    """Swarm generation and link lookup errors."""

    def __init__(
        self,
        message: str,
        code: Optional[str] = None,
        context: Optional[str] = None,
    ) -> None:
        super().__init__(message, ErrorCategory.NETWORK, code or "SWARM_ERROR", context)


class PlacementError(SwarmInferError):
    """Placement evaluation errors."""

    def __init__(
        self,
        message: str,
        context: Optional[str] = None,
        request_id: Optional[int] = None,
    ) -> None:
        super().__init__(
            message, ErrorCategory.PLACEMENT, "PLACEMENT_ERROR", context, request_id
        )


class SolverError(SwarmInferError):
    """Solver errors."""

    def __init__(
        self,
        message: str,
        code: Optional[str] = None,
        context: Optional[str] = None,
    ) -> None:
        super().__init__(message, ErrorCategory.SOLVER, code or "SOLVER_ERROR", context)


class OracleLimitError(SolverError):
    """Brute-force search space exceeds the oracle guard."""

    def __init__(self, space: int, limit: int) -> None:
        super().__init__(
            "instance too large for oracle",
            code="ORACLE_LIMIT",
            context=f"{space} assignments exceed guard of {limit}",
        )
        self.space = space
        self.limit = limit


class InputFileError(SwarmInferError):
    """Malformed input files."""

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        field: Optional[str] = None,
    ) -> None:
        context = f"file={path}" if path else None
        if field:
            context = f"{context} field={field}" if context else f"field={field}"
        super().__init__(message, ErrorCategory.INPUT, "INPUT_ERROR", context)
        self.path = path
        self.field = field


class ValidationError(SwarmInferError):
    """Validation-related errors."""

    def __init__(
        self,
        message: str,
        context: Optional[str] = None,
        request_id: Optional[int] = None,
    ) -> None:
        super().__init__(
            message, ErrorCategory.VALIDATION, "VALIDATION_ERROR", context, request_id
        )
