import math

import numpy as np
import pytest

from zdlab.field import (Deployment, adjacency_matrix, coop_probability,
                         cooperator_ratio, evaluate, node_delta,
                         objective_from_mask)
from zdlab.game import PayoffScale
from zdlab.graphs import Graph, generate

SCALE = PayoffScale(2, 1, 3)  # r(n) = 2n + 3


class TestNodeDelta:
    def test_reference_points(self):
        # regular neighbors only: defection premium of one unit
        assert node_delta(0, True, SCALE) == pytest.approx(-1.0)
        # one ZD neighbor plus regulars: menu gap cancels the premium
        assert node_delta(1, True, SCALE) == pytest.approx(0.0)
        # one ZD neighbor, nothing else
        assert node_delta(1, False, SCALE) == pytest.approx(1.0)
        # two ZD neighbors plus regulars: r(3)=9 gives 9/3 - 1 + 1
        assert node_delta(2, True, SCALE) == pytest.approx(3.0)
        # no games at all
        assert node_delta(0, False, SCALE) == pytest.approx(0.0)

    def test_monotone_in_zd_neighbors(self):
        deltas = [node_delta(z, True, SCALE) for z in range(8)]
        assert deltas == sorted(deltas)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            node_delta(-1, True, SCALE)

    def test_coop_probability(self):
        assert coop_probability(0.0) == 0.5
        assert coop_probability(-1.0) == pytest.approx(1 / (1 + math.e))
        assert coop_probability(1.0) == pytest.approx(math.e / (1 + math.e))
        assert coop_probability(3.0) == pytest.approx(0.95257, abs=1e-5)


class TestEvaluate:
    def test_star_hub(self):
        dep = Deployment(generate("star", 80), frozenset({0}), SCALE)
        result = evaluate(dep)
        leaf_q = math.e / (1 + math.e)
        assert result.objective == pytest.approx(79 * leaf_q)
        assert result.mean_regular == pytest.approx(leaf_q)
        assert set(result.nodes) == set(range(1, 80))

    def test_ring_single_zd(self):
        dep = Deployment(generate("ring", 6), frozenset({0}), SCALE)
        result = evaluate(dep)
        assert result.nodes[1].coop_prob == pytest.approx(0.5)
        assert result.nodes[5].coop_prob == pytest.approx(0.5)
        for far in (2, 3, 4):
            assert result.nodes[far].coop_prob == pytest.approx(1 / (1 + math.e))
        assert result.objective == pytest.approx(1.0 + 3 / (1 + math.e))

    def test_zd_nodes_excluded_from_objective(self):
        g = generate("ring", 6)
        empty = evaluate(Deployment(g, frozenset(), SCALE))
        assert empty.objective == pytest.approx(6 / (1 + math.e))
        full = evaluate(Deployment(g, frozenset(range(6)), SCALE))
        assert full.objective == 0.0
        assert math.isnan(full.mean_regular)

    def test_deployment_validation(self):
        with pytest.raises(ValueError):
            Deployment(generate("ring", 6), frozenset({6}), SCALE)


class TestRatios:
    def test_expected_counts_zd_as_cooperators(self):
        dep = Deployment(generate("star", 5), frozenset({0}), SCALE)
        leaf_q = math.e / (1 + math.e)
        assert cooperator_ratio(dep) == pytest.approx((1 + 4 * leaf_q) / 5)

    def test_monte_carlo_reproducible_and_converges(self):
        dep = Deployment(generate("mesh", 20, seed=1), frozenset({0, 3}), SCALE)
        mc1 = cooperator_ratio(dep, "monte_carlo", rounds=500, seed=42)
        mc2 = cooperator_ratio(dep, "monte_carlo", rounds=500, seed=42)
        assert mc1 == mc2
        expected = cooperator_ratio(dep)
        assert abs(mc1 - expected) < 0.05

    def test_bad_arguments(self):
        dep = Deployment(generate("ring", 4), frozenset({0}), SCALE)
        with pytest.raises(ValueError):
            cooperator_ratio(dep, "bogus")
        with pytest.raises(ValueError):
            cooperator_ratio(dep, "monte_carlo", rounds=0)


class TestMaskObjective:
    def test_matches_evaluate_on_random_deployments(self):
        rng = np.random.default_rng(8)
        for seed in range(4):
            g = generate("mesh", 15, seed=seed)
            adj = adjacency_matrix(g)
            for _ in range(10):
                k = int(rng.integers(1, 8))
                nodes = rng.choice(15, size=k, replace=False)
                mask = np.zeros(15, dtype=bool)
                mask[nodes] = True
                dep = Deployment(g, frozenset(nodes.tolist()), SCALE)
                assert objective_from_mask(adj, mask, SCALE) == pytest.approx(
                    evaluate(dep).objective)

    def test_adjacency_matrix(self):
        adj = adjacency_matrix(Graph.from_edges(3, [(0, 1)]))
        assert adj.tolist() == [[False, True, False],
                                [True, False, False],
                                [False, False, False]]
