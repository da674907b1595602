"""Tests for swarm generation and link lookups."""

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from swarm_infer.network import (
    build_swarm,
    distance_rate,
    link_rate,
    load_swarm,
    scale_rates,
    source_rate,
)
from swarm_infer.types import InputFileError, NodeBudgets, RateModel, RateModelKind, SwarmError

from tests.conftest import make_swarm


class TestBuildSwarm:
    """Test seeded swarm generation."""

    def test_single_node(self):
        """One node, one source."""
        swarm = build_swarm(1, 1, seed=7)
        assert swarm.n_nodes == 1
        assert swarm.n_sources == 1
        assert source_rate(swarm, 0, 0) > 0

    def test_deterministic(self):
        """Same inputs and seed give byte-identical swarms."""
        first = build_swarm(6, 2, seed=11)
        second = build_swarm(6, 2, seed=11)
        assert first.model_dump_json() == second.model_dump_json()

    def test_seed_changes_positions(self):
        """Different seeds draw different positions."""
        assert build_swarm(4, seed=1).nodes[0].position != build_swarm(4, seed=2).nodes[0].position

    def test_distance_rates_clamped(self):
        """Every ordered pair rate lies within the clamp bounds."""
        model = RateModel()
        swarm = build_swarm(30, 1, rate_model=model, seed=1)
        pairs = [
            link_rate(swarm, i, k)
            for i in range(30)
            for k in range(30)
            if i != k
        ]
        assert len(pairs) == 870
        assert all(model.rate_min <= rate <= model.rate_max for rate in pairs)

    def test_distance_rates_symmetric(self):
        """The distance model is symmetric."""
        swarm = build_swarm(8, seed=3)
        for i in range(8):
            for k in range(8):
                if i != k:
                    assert link_rate(swarm, i, k) == link_rate(swarm, k, i)

    def test_uniform_rates_in_range(self):
        """Uniform draws stay within [low, high]."""
        model = RateModel(kind=RateModelKind.UNIFORM, low=1e5, high=2e5)
        swarm = build_swarm(5, 2, rate_model=model, seed=4)
        for i in range(5):
            for k in range(5):
                if i != k:
                    assert 1e5 <= link_rate(swarm, i, k) <= 2e5
            assert 1e5 <= source_rate(swarm, 1, i) <= 2e5

    def test_explicit_rates(self):
        """Explicit matrices are used as given."""
        model = RateModel(
            kind=RateModelKind.EXPLICIT,
            node_rates=[[0, 1e6], [2e6, 0]],
            source_rates=[[3e6, 4e6]],
        )
        swarm = build_swarm(2, 1, rate_model=model)
        assert link_rate(swarm, 0, 1) == 1e6
        assert link_rate(swarm, 1, 0) == 2e6
        assert source_rate(swarm, 0, 1) == 4e6

    def test_explicit_size_mismatch(self):
        """Explicit matrices must match the node count."""
        model = RateModel(
            kind=RateModelKind.EXPLICIT,
            node_rates=[[0, 1e6], [1e6, 0]],
            source_rates=[[1e6, 1e6]],
        )
        with pytest.raises(SwarmError):
            build_swarm(3, 1, rate_model=model)

    @pytest.mark.parametrize("node_rates,source_rates", [
        ([[0.0], [1e6, 0.0]], [[1e6, 1e6]]),
        ([[0.0, 1e6], [1e6, 0.0]], [[1e6]]),
    ])
    def test_explicit_ragged_rows(self, node_rates, source_rates):
        """Rows shorter than the node count are swarm errors."""
        model = RateModel(
            kind=RateModelKind.EXPLICIT, node_rates=node_rates, source_rates=source_rates
        )
        with pytest.raises(SwarmError, match="row"):
            build_swarm(2, 1, rate_model=model)

    def test_budgets_applied(self):
        """Every node gets the requested budgets."""
        budgets = NodeBudgets(mem_budget=123, compute_budget=456, mult_per_sec=7.0)
        swarm = build_swarm(3, budgets=budgets)
        assert {(n.mem_budget, n.compute_budget, n.mult_per_sec) for n in swarm.nodes} == {
            (123, 456, 7.0)
        }

    def test_default_budgets(self):
        """Defaults model a Raspberry Pi class node."""
        node = build_swarm(1).nodes[0]
        assert node.mult_per_sec == 560e6
        assert node.mem_budget == 250_000_000
        assert node.compute_budget == 1_000_000_000

    @pytest.mark.parametrize("n_nodes,n_sources,area", [(0, 1, 10.0), (2, 0, 10.0), (2, 1, 0.0)])
    def test_rejects_bad_parameters(self, n_nodes, n_sources, area):
        """No nodes, no sources or a non-positive area are errors."""
        with pytest.raises(SwarmError):
            build_swarm(n_nodes, n_sources, area_size=area)


class TestLookups:
    """Test link and source rate lookups."""

    def test_stored_rate(self):
        """link_rate returns the stored entry."""
        swarm = make_swarm(3, node_rate=1e6)
        assert link_rate(swarm, 1, 2) == 1e6

    def test_self_link_rejected(self):
        """A node has no link to itself."""
        swarm = make_swarm(2)
        with pytest.raises(SwarmError) as exc_info:
            link_rate(swarm, 1, 1)
        assert exc_info.value.code == "SELF_LINK"

    @pytest.mark.parametrize("i,k", [(-1, 0), (0, 5)])
    def test_unknown_node(self, i, k):
        """Unknown node ids are errors."""
        with pytest.raises(SwarmError):
            link_rate(make_swarm(2), i, k)

    def test_unknown_source(self):
        """Unknown source ids are errors."""
        with pytest.raises(SwarmError):
            source_rate(make_swarm(2), 3, 0)

    def test_scale_rates(self):
        """Scaling multiplies every link and source rate."""
        swarm = scale_rates(make_swarm(2, node_rate=1e6), 10)
        assert link_rate(swarm, 0, 1) == 1e7
        assert source_rate(swarm, 0, 0) == 1e7


class TestDistanceModel:
    """Test the clamped inverse-distance rate."""

    @given(
        near=st.floats(min_value=0.0, max_value=5000.0),
        gap=st.floats(min_value=0.0, max_value=5000.0),
    )
    def test_closer_never_slower(self, near, gap):
        """Moving nodes closer never lowers the rate."""
        model = RateModel()
        assert distance_rate(near, model) >= distance_rate(near + gap, model)

    def test_colocated_is_fastest(self):
        """Zero distance maps to the maximum rate."""
        model = RateModel()
        assert distance_rate(0.0, model) == model.rate_max

    def test_reference_point(self):
        """At the reference distance the rate equals the reference rate."""
        model = RateModel()
        assert distance_rate(model.distance_ref, model) == pytest.approx(model.rate_ref)


class TestSwarmFiles:
    """Test loading swarm files."""

    def test_nodes_and_rates_only(self, tmp_path):
        """Sources default from the source rate rows."""
        path = tmp_path / "swarm.json"
        path.write_text(json.dumps({
            "nodes": [
                {"id": 0, "mem_budget": 10, "compute_budget": 10, "mult_per_sec": 1.0},
                {"id": 1, "mem_budget": 10, "compute_budget": 10, "mult_per_sec": 1.0},
            ],
            "links": {"node_rates": [[0, 5], [5, 0]], "source_rates": [[1, 2], [3, 4]]},
        }))
        swarm = load_swarm(path)
        assert swarm.n_sources == 2
        assert source_rate(swarm, 1, 0) == 3

    def test_missing_pair_rejected(self, tmp_path):
        """A rate matrix not covering every node is an input error."""
        path = tmp_path / "swarm.json"
        path.write_text(json.dumps({
            "nodes": [
                {"id": 0, "mem_budget": 10, "compute_budget": 10, "mult_per_sec": 1.0},
                {"id": 1, "mem_budget": 10, "compute_budget": 10, "mult_per_sec": 1.0},
            ],
            "links": {"node_rates": [[0]], "source_rates": [[1]]},
        }))
        with pytest.raises(InputFileError):
            load_swarm(path)

    def test_round_trip(self, tmp_path):
        """A generated swarm survives JSON."""
        swarm = build_swarm(4, 2, seed=5)
        path = tmp_path / "swarm.json"
        path.write_text(swarm.model_dump_json())
        assert load_swarm(path) == swarm
