"""CNN model type definitions: layer dimensions, cost profiles, residual edges."""

from enum import Enum
from functools import cached_property
from typing import Any, Dict, Iterator, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

DEFAULT_DTYPE_BYTES = 4


class ModelTemplate(str, Enum):
    """CNN topology templates."""
    SEQUENTIAL = "sequential"
    RESIDUAL = "residual"


class LayerDims(BaseModel):
    """Shape of a convolutional or dense layer, input to the cost formulas."""
    model_config = ConfigDict(frozen=True)

    kernel_h: int = Field(ge=1)
    kernel_w: int = Field(ge=1)
    in_channels: int = Field(ge=1)
    out_channels: int = Field(ge=1)
    out_h: int = Field(ge=1)
    out_w: int = Field(ge=1)
    dtype_bytes: int = Field(default=DEFAULT_DTYPE_BYTES, ge=1)

    @classmethod
    def dense(
        cls, in_features: int, out_features: int, dtype_bytes: int = DEFAULT_DTYPE_BYTES
    ) -> "LayerDims":
        """Dense layer: 1x1 kernel and 1x1 output map over neuron counts."""
        return cls(
            kernel_h=1,
            kernel_w=1,
            in_channels=in_features,
            out_channels=out_features,
            out_h=1,
            out_w=1,
            dtype_bytes=dtype_bytes,
        )


class LayerProfile(BaseModel):
    """Per-layer cost profile: weights in memory, multiplications, activation size."""
    model_config = ConfigDict(frozen=True)

    index: int = Field(ge=1)
    memory_bytes: int = Field(ge=0)
    multiplications: int = Field(ge=1)
    output_bytes: int = Field(ge=1)


class ResidualEdge(BaseModel):
    """Shortcut from layer ``target - stride`` into layer ``target``."""
    model_config = ConfigDict(frozen=True)

    target: int
    stride: int
    payload_bytes: int

    @property
    def source(self) -> int:
        return self.target - self.stride


class CnnModel(BaseModel):
    """Ordered layer profiles plus residual shortcut edges."""
    model_config = ConfigDict(frozen=True)

    name: str = "custom"
    input_bytes: int = Field(default=0, ge=0)
    layers: List[LayerProfile]
    residual_edges: List[ResidualEdge] = Field(default_factory=list)

    @model_validator(mode="before")
    @classmethod
    def _fill_interchange_defaults(cls, data: Any) -> Any:
        # Model files omit layer indices and shortcut payloads
        if not isinstance(data, dict):
            return data
        layers = data.get("layers") or []
        filled_layers = []
        for position, layer in enumerate(layers, start=1):
            if isinstance(layer, dict) and "index" not in layer:
                layer = {**layer, "index": position}
            filled_layers.append(layer)
        filled_edges = []
        for edge in data.get("residual_edges") or []:
            if isinstance(edge, dict) and "payload_bytes" not in edge:
                source = edge.get("target", 0) - edge.get("stride", 0)
                payload = 0
                if 1 <= source <= len(filled_layers):
                    producer = filled_layers[source - 1]
                    payload = (
                        producer.get("output_bytes", 0)
                        if isinstance(producer, dict)
                        else producer.output_bytes
                    )
                edge = {**edge, "payload_bytes": payload}
            filled_edges.append(edge)
        return {**data, "layers": filled_layers, "residual_edges": filled_edges}

    @property
    def depth(self) -> int:
        return len(self.layers)

    def layer(self, index: int) -> LayerProfile:
        """Return the 1-based layer ``index``."""
        return self.layers[index - 1]

    def edge_into(self, target: int) -> Optional[ResidualEdge]:
        """Residual edge terminating at ``target``, if any."""
        return self.edges_by_target.get(target)

    def shortcut_indicator(self, target: int, stride: int) -> int:
        """1 when a shortcut of ``stride`` ends at ``target``, else 0."""
        edge = self.edge_into(target)
        return int(edge is not None and edge.stride == stride)

    @cached_property
    def edges_by_target(self) -> Dict[int, ResidualEdge]:
        return {edge.target: edge for edge in self.residual_edges}

    def with_residual_edges(self, edges: List[ResidualEdge]) -> "CnnModel":
        """Copy of this model with a different shortcut set."""
        return CnnModel(
            name=self.name,
            input_bytes=self.input_bytes,
            layers=list(self.layers),
            residual_edges=list(edges),
        )


class WidthProfile(BaseModel):
    """Generator of per-layer dimensions for template models.

    Layers are 3x3 same-padding convolutions. Every ``stage_length`` layers the
    channel count doubles (up to ``max_channels``) and the feature map halves
    (down to 1x1). ``stage_length = 0`` keeps every layer after the first
    identical.
    """
    model_config = ConfigDict(frozen=True)

    image_size: int = Field(default=64, ge=1)
    image_channels: int = Field(default=3, ge=1)
    base_channels: int = Field(default=64, ge=1)
    kernel: int = Field(default=3, ge=1)
    stage_length: int = Field(default=4, ge=0)
    max_channels: int = Field(default=512, ge=1)
    dtype_bytes: int = Field(default=DEFAULT_DTYPE_BYTES, ge=1)

    def input_bytes(self) -> int:
        """Size of the captured image fed to layer 1."""
        return self.image_size * self.image_size * self.image_channels * self.dtype_bytes

    def iter_dims(self, depth: int) -> Iterator[LayerDims]:
        in_channels = self.image_channels
        channels = self.base_channels
        size = self.image_size
        for position in range(depth):
            if self.stage_length and position and position % self.stage_length == 0:
                channels = min(channels * 2, self.max_channels)
                size = max(size // 2, 1)
            yield LayerDims(
                kernel_h=self.kernel,
                kernel_w=self.kernel,
                in_channels=in_channels,
                out_channels=channels,
                out_h=size,
                out_w=size,
                dtype_bytes=self.dtype_bytes,
            )
            in_channels = channels
