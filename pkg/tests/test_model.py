"""Tests for CNN cost profiles, templates and model validation."""

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from swarm_infer.model import (
    build_model_from_template,
    dump_model,
    ensure_valid_model,
    layer_memory_bytes,
    layer_multiplications,
    layer_output_bytes,
    load_model,
    model_to_dict,
    residual_targets,
    validate_model,
)
from swarm_infer.types import (
    CnnModel,
    InputFileError,
    LayerDims,
    LayerProfile,
    ModelError,
    ModelTemplate,
    ResidualEdge,
    ViolationKind,
    WidthProfile,
)

dims_fields = st.integers(min_value=1, max_value=64)


def conv(kernel, in_channels, out_channels, out_size=1, dtype_bytes=4):
    return LayerDims(
        kernel_h=kernel,
        kernel_w=kernel,
        in_channels=in_channels,
        out_channels=out_channels,
        out_h=out_size,
        out_w=out_size,
        dtype_bytes=dtype_bytes,
    )


class TestCostFormulas:
    """Test per-layer memory, multiplication and output sizes."""

    def test_memory_single_kernel(self):
        """A single 3x3 float kernel stores 36 bytes."""
        assert layer_memory_bytes(conv(3, 1, 1)) == 36

    def test_memory_identity_scale(self):
        """A 1x1 one-byte layer stores 1 byte."""
        assert layer_memory_bytes(conv(1, 1, 1, dtype_bytes=1)) == 1

    def test_memory_wide_layer(self):
        """3x3, 64 -> 128 channels, float weights."""
        assert layer_memory_bytes(conv(3, 64, 128)) == 294912

    def test_multiplications_trivial(self):
        """1x1 kernel on a 1x1 map needs one multiplication."""
        assert layer_multiplications(conv(1, 1, 1)) == 1

    def test_multiplications_small_map(self):
        """Four output positions with 9 MACs each."""
        assert layer_multiplications(conv(3, 1, 1, out_size=2)) == 36

    def test_multiplications_wide_layer(self):
        """3x3, 64 -> 128 channels over a 56x56 map."""
        assert layer_multiplications(conv(3, 64, 128, out_size=56)) == 231211008

    def test_output_bytes(self):
        """Activation volume is out_h * out_w * out_channels * dtype."""
        assert layer_output_bytes(conv(3, 64, 128, out_size=56)) == 56 * 56 * 128 * 4

    def test_dense_layer(self):
        """Dense layers are 1x1 kernels over neuron counts."""
        dense = LayerDims.dense(512, 10)
        assert layer_memory_bytes(dense) == 512 * 10 * 4
        assert layer_multiplications(dense) == 5120
        assert layer_output_bytes(dense) == 40

    def test_dims_must_be_positive(self):
        """Zero-sized dimensions are rejected at construction."""
        with pytest.raises(ValueError):
            conv(0, 1, 1)

    @given(
        base=st.tuples(dims_fields, dims_fields, dims_fields, dims_fields, dims_fields),
        field=st.integers(min_value=0, max_value=4),
        bump=st.integers(min_value=1, max_value=16),
    )
    def test_costs_monotone_in_every_field(self, base, field, bump):
        """Growing any dimension never shrinks memory or multiplications."""
        kernel, in_channels, out_channels, out_size, dtype_bytes = base
        grown = list(base)
        grown[field] += bump
        small = conv(kernel, in_channels, out_channels, out_size, dtype_bytes)
        large = conv(*grown)
        assert layer_memory_bytes(large) >= layer_memory_bytes(small)
        assert layer_multiplications(large) >= layer_multiplications(small)


class TestTemplates:
    """Test template model construction."""

    def test_sequential_has_no_shortcuts(self):
        """Sequential template: depth layers, no residual edges."""
        model = build_model_from_template("sequential", 5)
        assert model.depth == 5
        assert model.residual_edges == []
        assert [layer.index for layer in model.layers] == [1, 2, 3, 4, 5]

    def test_residual_tiling(self):
        """Residual template: stride-2 shortcuts into layers 3 and 5."""
        model = build_model_from_template(ModelTemplate.RESIDUAL, 5)
        assert [(e.target, e.stride) for e in model.residual_edges] == [(3, 2), (5, 2)]
        assert model.shortcut_indicator(3, 2) == 1
        assert model.shortcut_indicator(4, 2) == 0
        assert model.edge_into(5).source == 3

    def test_residual_targets(self):
        """Targets tile every two layers from 3."""
        assert residual_targets(2) == []
        assert residual_targets(8) == [3, 5, 7]

    def test_zero_depth_rejected(self):
        """Depth 0 is an error."""
        with pytest.raises(ModelError):
            build_model_from_template("sequential", 0)

    def test_shallow_residual_rejected(self):
        """A residual model needs room for one shortcut."""
        with pytest.raises(ModelError):
            build_model_from_template("residual", 2)

    @pytest.mark.parametrize("depth", [3, 4, 9, 17])
    def test_templates_share_layer_profiles(self, depth):
        """Sequential and residual twins differ only in residual edges."""
        sequential = build_model_from_template("sequential", depth)
        residual = build_model_from_template("residual", depth)
        assert sequential.layers == residual.layers
        assert sequential.input_bytes == residual.input_bytes
        assert residual.residual_edges

    @pytest.mark.parametrize("template", ["sequential", "residual"])
    @pytest.mark.parametrize("depth", [3, 5, 12, 34])
    def test_templates_validate(self, template, depth):
        """Template models have no violations."""
        assert validate_model(build_model_from_template(template, depth)) == []

    def test_width_profile_stages(self):
        """Channels double and maps halve every stage."""
        profile = WidthProfile(image_size=32, base_channels=16, stage_length=2)
        dims = list(profile.iter_dims(5))
        assert [d.out_channels for d in dims] == [16, 16, 32, 32, 64]
        assert [d.out_h for d in dims] == [32, 32, 16, 16, 8]
        assert dims[0].in_channels == 3

    def test_explicit_dims(self):
        """An explicit dims list replaces the width profile."""
        dims = [conv(3, 3, 8, out_size=4), conv(3, 8, 8, out_size=4)]
        model = build_model_from_template("sequential", 2, dims)
        assert model.layer(2).memory_bytes == 3 * 3 * 8 * 8 * 4
        assert model.input_bytes == 4 * 4 * 3 * 4

    def test_too_few_explicit_dims(self):
        """Fewer explicit dims than depth is an error."""
        with pytest.raises(ModelError):
            build_model_from_template("sequential", 3, [conv(3, 3, 8)])


class TestValidation:
    """Test validate_model violation reporting."""

    @staticmethod
    def _layers(n):
        return [
            LayerProfile(index=j, memory_bytes=10, multiplications=100, output_bytes=10 * j)
            for j in range(1, n + 1)
        ]

    def test_valid_model(self):
        """A plain 5-layer model is ok."""
        assert validate_model(CnnModel(layers=self._layers(5))) == []

    def test_stride_equal_to_target(self):
        """An edge whose source would be layer 0 is reported."""
        model = CnnModel(
            layers=self._layers(3),
            residual_edges=[ResidualEdge(target=2, stride=2, payload_bytes=10)],
        )
        violations = validate_model(model)
        assert [v.message for v in violations] == ["edge source before layer 1"]

    def test_payload_mismatch(self):
        """A payload different from the source layer's output is reported."""
        model = CnnModel(
            layers=self._layers(3),
            residual_edges=[ResidualEdge(target=3, stride=2, payload_bytes=999)],
        )
        violations = validate_model(model)
        assert len(violations) == 1
        assert violations[0].kind is ViolationKind.PAYLOAD_MISMATCH
        assert violations[0].message.startswith("payload mismatch")

    def test_duplicate_target(self):
        """Two shortcuts into the same layer are reported."""
        model = CnnModel(
            layers=self._layers(4),
            residual_edges=[
                ResidualEdge(target=3, stride=2, payload_bytes=10),
                ResidualEdge(target=3, stride=1, payload_bytes=20),
            ],
        )
        kinds = [v.kind for v in validate_model(model)]
        assert ViolationKind.DUPLICATE_TARGET in kinds

    def test_ensure_valid_raises(self):
        """ensure_valid_model turns violations into a ModelError."""
        model = CnnModel(
            layers=self._layers(3),
            residual_edges=[ResidualEdge(target=3, stride=2, payload_bytes=1)],
        )
        with pytest.raises(ModelError) as exc_info:
            ensure_valid_model(model, request_id=4)
        assert "request 4" in str(exc_info.value)


class TestModelFiles:
    """Test the model interchange format."""

    def test_round_trip(self, tmp_path):
        """A dumped template model loads back equal."""
        model = build_model_from_template("residual", 7)
        path = tmp_path / "model.json"
        dump_model(model, path)
        assert load_model(path) == model

    def test_schema_fields(self):
        """The schema carries no indices and no edge payloads."""
        data = model_to_dict(build_model_from_template("residual", 3))
        assert set(data) == {"name", "input_bytes", "layers", "residual_edges"}
        assert set(data["layers"][0]) == {"memory_bytes", "multiplications", "output_bytes"}
        assert data["residual_edges"] == [{"target": 3, "stride": 2}]

    def test_payload_filled_from_layers(self, tmp_path):
        """Edge payloads are taken from the source layer's output size."""
        path = tmp_path / "model.json"
        path.write_text(json.dumps({
            "name": "tiny",
            "input_bytes": 100,
            "layers": [
                {"memory_bytes": 1, "multiplications": 1, "output_bytes": 7},
                {"memory_bytes": 1, "multiplications": 1, "output_bytes": 8},
                {"memory_bytes": 1, "multiplications": 1, "output_bytes": 9},
            ],
            "residual_edges": [{"target": 3, "stride": 2}],
        }))
        model = load_model(path)
        assert model.residual_edges[0].payload_bytes == 7
        assert validate_model(model) == []

    def test_bad_field_named(self, tmp_path):
        """A malformed layer names the file and the offending field."""
        path = tmp_path / "broken.json"
        path.write_text(json.dumps({
            "layers": [{"memory_bytes": 1, "multiplications": "many", "output_bytes": 1}],
        }))
        with pytest.raises(InputFileError) as exc_info:
            load_model(path)
        assert exc_info.value.field == "layers.0.multiplications"
        assert "broken.json" in str(exc_info.value)

    def test_malformed_json(self, tmp_path):
        """Invalid JSON text is an input error naming the file."""
        path = tmp_path / "garbage.json"
        path.write_text("{not json")
        with pytest.raises(InputFileError) as exc_info:
            load_model(path)
        assert exc_info.value.path == str(path)
