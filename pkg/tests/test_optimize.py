import pytest

from zdlab.field import Deployment, evaluate
from zdlab.game import PayoffScale
from zdlab.graphs import generate
from zdlab.optimize import (ExhaustiveCapError, GAConfig, optimize_exhaustive,
                            optimize_ga)

SCALE = PayoffScale(2, 1, 3)
FAST = GAConfig(population_size=40, generations=40, seed=0)


class TestExhaustive:
    def test_star_picks_hub(self):
        dep, score = optimize_exhaustive(generate("star", 12), 1, SCALE)
        assert dep.zd_nodes == {0}
        assert score == pytest.approx(evaluate(dep).objective)

    def test_lexicographic_tie_break(self):
        # every single node on a ring scores the same; smallest id wins
        dep, _ = optimize_exhaustive(generate("ring", 8), 1, SCALE)
        assert dep.zd_nodes == {0}

    def test_beats_every_other_subset(self):
        g = generate("mesh", 9, seed=7)
        from itertools import combinations
        dep, score = optimize_exhaustive(g, 2, SCALE)
        best = max(evaluate(Deployment(g, frozenset(sub), SCALE)).objective
                   for sub in combinations(range(9), 2))
        assert score == pytest.approx(best)

    def test_cap(self):
        with pytest.raises(ExhaustiveCapError):
            optimize_exhaustive(generate("mesh", 60, seed=0), 30, SCALE,
                                cap=1000)

    def test_bad_k(self):
        with pytest.raises(ValueError):
            optimize_exhaustive(generate("ring", 5), 0, SCALE)


class TestGA:
    def test_star_hub_found(self):
        dep, score, history = optimize_ga(generate("star", 40), 1, SCALE, FAST)
        assert dep.zd_nodes == {0}
        assert score == pytest.approx(evaluate(dep).objective)

    def test_history_nondecreasing(self):
        _, _, history = optimize_ga(generate("mesh", 25, seed=2), 3, SCALE,
                                    FAST)
        assert len(history) == FAST.generations
        assert all(b >= a - 1e-12 for a, b in zip(history, history[1:]))

    def test_exact_k_nodes(self):
        for k in (1, 3, 6):
            dep, _, _ = optimize_ga(generate("mesh", 20, seed=4), k, SCALE,
                                    FAST)
            assert len(dep.zd_nodes) == k

    def test_deterministic_per_seed(self):
        g = generate("mesh", 20, seed=9)
        a = optimize_ga(g, 3, SCALE, FAST)
        b = optimize_ga(g, 3, SCALE, FAST)
        assert a[0].zd_nodes == b[0].zd_nodes and a[1] == b[1]

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_exhaustive_on_small_graphs(self, seed):
        g = generate("mesh", 12, seed=seed)
        _, exact = optimize_exhaustive(g, 2, SCALE)
        _, found, _ = optimize_ga(g, 2, SCALE,
                                  GAConfig(population_size=40, generations=60,
                                           seed=seed))
        assert found >= 0.99 * exact

    def test_bad_k(self):
        with pytest.raises(ValueError):
            optimize_ga(generate("ring", 5), 5, SCALE, FAST)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            GAConfig(population_size=1)
        with pytest.raises(ValueError):
            GAConfig(crossover_rate=1.5)
        with pytest.raises(ValueError):
            GAConfig(elitism_count=-1)
