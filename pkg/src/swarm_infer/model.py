"""CNN layer cost profiles and model templates."""

import json
from pathlib import Path
from typing import List, Optional, Sequence, Union

from .types.cnn import (
    CnnModel,
    LayerDims,
    LayerProfile,
    ModelTemplate,
    ResidualEdge,
    WidthProfile,
)
from .types.errors import ModelError
from .types.placement import Violation, ViolationKind
from .utils.logging import get_logger
from .utils.validation import load_json_file

logger = get_logger(__name__)

RESIDUAL_STRIDE = 2
MIN_RESIDUAL_DEPTH = 3


def layer_memory_bytes(dims: LayerDims) -> int:
    """Bytes of weights stored by the layer."""
    return (
        dims.kernel_h * dims.kernel_w * dims.in_channels * dims.out_channels * dims.dtype_bytes
    )


def layer_multiplications(dims: LayerDims) -> int:
    """Scalar multiplications needed to compute the layer's output map."""
    return (
        dims.out_h * dims.out_w * dims.kernel_h * dims.kernel_w
        * dims.in_channels * dims.out_channels
    )


def layer_output_bytes(dims: LayerDims) -> int:
    """Bytes of the activation handed to the next consumer."""
    return dims.out_h * dims.out_w * dims.out_channels * dims.dtype_bytes


def profile_layer(index: int, dims: LayerDims) -> LayerProfile:
    return LayerProfile(
        index=index,
        memory_bytes=layer_memory_bytes(dims),
        multiplications=layer_multiplications(dims),
        output_bytes=layer_output_bytes(dims),
    )


def residual_targets(depth: int) -> List[int]:
    """Targets of the stride-2 shortcuts tiled every two layers: 3, 5, 7, ..."""
    return list(range(MIN_RESIDUAL_DEPTH, depth + 1, RESIDUAL_STRIDE))


def residual_blocks(layers: Sequence[LayerProfile]) -> List[ResidualEdge]:
    """Shortcuts of the residual template over ``layers``; empty below depth 3."""
    return [
        ResidualEdge(
            target=target,
            stride=RESIDUAL_STRIDE,
            payload_bytes=layers[target - RESIDUAL_STRIDE - 1].output_bytes,
        )
        for target in residual_targets(len(layers))
    ]


def build_model_from_template(
    template: Union[ModelTemplate, str],
    depth: int,
    width_profile: Union[WidthProfile, Sequence[LayerDims], None] = None,
    input_bytes: Optional[int] = None,
    name: Optional[str] = None,
) -> CnnModel:
    """
    Build a sequential or ResNet-style residual model of ``depth`` layers.

    Args:
        template: ``sequential`` (no shortcuts) or ``residual`` (stride-2
            shortcut into every odd layer from 3 on)
        depth: number of layers
        width_profile: a WidthProfile, or one LayerDims per layer
        input_bytes: source image size; defaults to the profile's image size

    Raises:
        ModelError: depth < 1, residual depth < 3, or too few explicit dims
    """
    template = ModelTemplate(template)
    if depth < 1:
        raise ModelError(f"Model depth must be at least 1, got {depth}")
    if template is ModelTemplate.RESIDUAL and depth < MIN_RESIDUAL_DEPTH:
        raise ModelError(
            f"Residual template needs depth >= {MIN_RESIDUAL_DEPTH} to hold a shortcut, "
            f"got {depth}"
        )

    if width_profile is None:
        width_profile = WidthProfile()

    if isinstance(width_profile, WidthProfile):
        dims = list(width_profile.iter_dims(depth))
        default_input = width_profile.input_bytes()
    else:
        dims = list(width_profile)[:depth]
        if len(dims) < depth:
            raise ModelError(
                f"Width profile lists {len(dims)} layers, model depth is {depth}"
            )
        first = dims[0]
        default_input = first.out_h * first.out_w * first.in_channels * first.dtype_bytes

    layers = [profile_layer(index, d) for index, d in enumerate(dims, start=1)]

    edges = residual_blocks(layers) if template is ModelTemplate.RESIDUAL else []

    return CnnModel(
        name=name or f"{template.value}-{depth}",
        input_bytes=default_input if input_bytes is None else input_bytes,
        layers=layers,
        residual_edges=edges,
    )


def validate_model(model: CnnModel) -> List[Violation]:
    """Every invariant breach of ``model``; an empty list means ok."""
    violations: List[Violation] = []

    for position, layer in enumerate(model.layers, start=1):
        if layer.index != position:
            violations.append(Violation(
                kind=ViolationKind.BAD_LAYER_INDEX,
                message=f"layer at position {position} carries index {layer.index}",
                layer=position,
            ))

    seen_targets = set()
    for edge in model.residual_edges:
        if edge.target in seen_targets:
            violations.append(Violation(
                kind=ViolationKind.DUPLICATE_TARGET,
                message=f"duplicate residual target {edge.target}",
                layer=edge.target,
            ))
            continue
        seen_targets.add(edge.target)

        if edge.target > model.depth or edge.target < 1:
            violations.append(Violation(
                kind=ViolationKind.BAD_STRIDE,
                message=f"edge target {edge.target} outside layers 1..{model.depth}",
                layer=edge.target,
            ))
            continue
        if edge.stride < 1:
            violations.append(Violation(
                kind=ViolationKind.BAD_STRIDE,
                message=f"edge into layer {edge.target} has stride {edge.stride} < 1",
                layer=edge.target,
            ))
            continue
        if edge.source < 1:
            violations.append(Violation(
                kind=ViolationKind.BAD_STRIDE,
                message="edge source before layer 1",
                layer=edge.target,
            ))
            continue

        expected = model.layer(edge.source).output_bytes
        if edge.payload_bytes != expected:
            violations.append(Violation(
                kind=ViolationKind.PAYLOAD_MISMATCH,
                message=(
                    f"payload mismatch: edge {edge.source}->{edge.target} carries "
                    f"{edge.payload_bytes} bytes, layer {edge.source} outputs {expected}"
                ),
                layer=edge.target,
            ))

    if violations:
        logger.debug("Model failed validation", model=model.name, violations=len(violations))
    return violations


def model_to_dict(model: CnnModel) -> dict:
    """The interchange schema: name, input_bytes, layers, residual_edges."""
    return {
        "name": model.name,
        "input_bytes": model.input_bytes,
        "layers": [
            {
                "memory_bytes": layer.memory_bytes,
                "multiplications": layer.multiplications,
                "output_bytes": layer.output_bytes,
            }
            for layer in model.layers
        ],
        "residual_edges": [
            {"target": edge.target, "stride": edge.stride} for edge in model.residual_edges
        ],
    }


def dump_model(model: CnnModel, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n", encoding="utf-8")


def load_model(path: Union[str, Path]) -> CnnModel:
    return load_json_file(path, CnnModel)


def ensure_valid_model(model: CnnModel, request_id: Optional[int] = None) -> None:
    """
    Raises:
        ModelError: when ``validate_model`` reports any violation
    """
    violations = validate_model(model)
    if violations:
        where = f"request {request_id}: " if request_id is not None else ""
        raise ModelError(
            f"{where}model '{model.name}' is invalid: {violations[0].message}",
            context=f"{len(violations)} violation(s)",
        )
