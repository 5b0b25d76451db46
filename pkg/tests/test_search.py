import numpy as np
import pytest
from scipy import stats

from aetf.gf2 import FrameShape
from aetf.search import (
    GaConfig,
    _elitist_batch,
    crossover,
    elitist_replace,
    fitness,
    init_population,
    mutate,
    run_ga,
    select_pairs,
)
from aetf.spectra import IndexSet, difference_spectrum, gds_target, is_difference_set

from conftest import all_subsets

CFG = GaConfig()


class KeyRng:
    """Stand-in generator: ``random`` returns fixed keys, everything else delegates."""

    def __init__(self, keys):
        self.keys = np.asarray(keys, dtype=float)
        self._rng = np.random.default_rng(0)

    def random(self, size=None):
        return self.keys.reshape(size).copy()

    def __getattr__(self, name):
        return getattr(self._rng, name)


class TestConfig:
    def test_defaults(self):
        assert (CFG.crossover_prob, CFG.mutation_prob, CFG.weight_peak, CFG.weight_rest) == (0.9, 0.1, 1.0, 1e-4)

    @pytest.mark.parametrize("kw", [dict(population_size=7), dict(crossover_prob=1.5),
                                    dict(mutation_prob=-0.1), dict(weight_rest=-1.0),
                                    dict(max_generations=0)])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            GaConfig(**kw)


class TestFitness:
    shape = FrameShape(6, 3)

    def test_exact_match_is_zero(self):
        t = gds_target(self.shape)
        assert fitness(t.values, t, CFG) == 0

    def test_peak_deviation(self):
        t = gds_target(self.shape)
        lam = t.values.copy()
        lam[self.shape.n_minus] += 1
        assert fitness(lam, t, CFG) == pytest.approx(1.0001, abs=1e-12)

    def test_off_peak_deviation(self):
        t = gds_target(self.shape)
        lam = t.values.copy()
        lam[2] += 2
        assert fitness(lam, t, CFG) == pytest.approx(4e-4, abs=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            fitness(np.zeros(4), gds_target(self.shape), CFG)


class TestInitPopulation:
    def test_full_set(self, rng):
        shape = FrameShape(8, 8)
        pop = init_population(shape, GaConfig(population_size=10), rng)
        assert all(s.indices == tuple(range(8)) for s in pop)

    def test_cardinality(self, rng):
        shape = FrameShape(64, 20)
        pop = init_population(shape, GaConfig(population_size=100), rng)
        assert len(pop) == 100
        assert all(len(set(s.indices)) == 20 and max(s.indices) < 64 for s in pop)

    def test_deterministic(self):
        shape = FrameShape(64, 20)
        a = init_population(shape, CFG, np.random.default_rng(5))
        b = init_population(shape, CFG, np.random.default_rng(5))
        assert a == b

    def test_uniform_membership(self):
        # each index should be a member with probability M / N+
        shape = FrameShape(16, 4)
        pop = init_population(shape, GaConfig(population_size=2000), np.random.default_rng(1))
        counts = np.bincount(np.concatenate([s.as_array() for s in pop]), minlength=16)
        assert stats.chisquare(counts).pvalue > 1e-3


class TestSelectPairs:
    def _pop(self, k):
        shape = FrameShape(8, 2)
        return [IndexSet((i, i + 1), shape) for i in range(k)]

    def test_pair_count(self, rng):
        pop = self._pop(6)
        pairs = select_pairs(pop, np.ones(6), CFG, rng)
        assert len(pairs) == 3 and all(len(p) == 2 for p in pairs)

    def test_uniform_when_equal(self, rng):
        pop = self._pop(6)
        hits = []
        for _ in range(1667):
            for a, b in select_pairs(pop, np.full(6, 2.0), CFG, rng):
                hits += [a.indices[0], b.indices[0]]
        assert len(hits) >= 10_000
        assert stats.chisquare(np.bincount(hits, minlength=6)).pvalue > 1e-3

    def test_inverse_proportional(self, rng):
        pop = self._pop(2)
        hits = []
        for _ in range(10_000):
            (a, b), = select_pairs(pop, np.array([1.0, 3.0]), CFG, rng)
            hits += [a.indices[0], b.indices[0]]
        counts = np.bincount(hits, minlength=2)
        # expected 3:1, binomial sd of the fraction is ~0.003
        assert counts[0] / counts.sum() == pytest.approx(0.75, abs=0.015)

    def test_zero_fitness_dominates(self, rng):
        pop = self._pop(4)
        pairs = select_pairs(pop, np.array([1.0, 0.0, 2.0, 1.0]), CFG, rng)
        assert all(a.indices[0] == 1 and b.indices[0] == 1 for a, b in pairs)


class TestCrossover:
    def test_identical_parents(self, rng):
        p = IndexSet((1, 4, 6), FrameShape(8, 3))
        assert crossover(p, p, rng) == (p, p)

    def test_worked_example(self):
        shape = FrameShape(8, 2)
        p1, p2 = IndexSet((2, 3), shape), IndexSet((3, 5), shape)
        keys = np.full(8, 0.5)
        keys[[3, 2, 5]] = [0.1, 0.2, 0.3]  # shuffled union reads (3, 2, 5)
        c1, c2 = crossover(p1, p2, KeyRng(keys))
        assert c1.indices == (2, 3)
        assert c2.indices == (2, 5)

    def test_children_drawn_from_union(self, rng):
        shape = FrameShape(64, 12)
        for _ in range(200):
            p1, p2 = init_population(shape, GaConfig(population_size=2), rng)
            c1, c2 = crossover(p1, p2, rng)
            union = set(p1) | set(p2)
            assert len(c1) == len(c2) == 12
            assert set(c1) <= union and set(c2) <= union
            assert set(c1) | set(c2) == union

    def test_shape_mismatch(self, rng):
        with pytest.raises(ValueError):
            crossover(IndexSet((1,), FrameShape(4, 1)), IndexSet((1,), FrameShape(8, 1)), rng)


class TestMutate:
    def test_full_set_unchanged(self, rng):
        s = IndexSet(tuple(range(4)), FrameShape(4, 4))
        assert mutate(s, GaConfig(mutation_prob=1.0), rng) == s

    def test_outcomes_enumerated(self, rng):
        s = IndexSet((1, 2, 3), FrameShape(4, 3))
        allowed = {(0, 2, 3), (0, 1, 3), (0, 1, 2)}
        seen = {mutate(s, GaConfig(mutation_prob=1.0), rng).indices for _ in range(300)}
        assert seen == allowed

    def test_zero_probability_is_identity(self, rng):
        cfg = GaConfig(mutation_prob=0.0)
        for s in init_population(FrameShape(32, 9), GaConfig(population_size=50), rng):
            assert mutate(s, cfg, rng) == s

    def test_single_swap(self, rng):
        cfg = GaConfig(mutation_prob=1.0)
        for s in init_population(FrameShape(64, 20), GaConfig(population_size=100), rng):
            out = mutate(s, cfg, rng)
            assert len(out) == 20 and len(set(s) - set(out)) == 1


class TestElitistReplace:
    def test_quartet_kernel(self):
        rows = [np.array([[i]]) for i in range(4)]  # p1, p2, c1, c2 tagged 0..3
        fits = [np.array([0.5]), np.array([3.0]), np.array([1.0]), np.array([2.0])]
        kept, kf = _elitist_batch(*rows, *fits)
        assert kept[0, :, 0].tolist() == [0, 2]
        assert kf[0].tolist() == [0.5, 1.0]

    def test_children_preferred_on_ties(self):
        rows = [np.array([[i]]) for i in range(4)]
        same = [np.array([1.0])] * 4
        kept, _ = _elitist_batch(*rows, *same)
        assert kept[0, :, 0].tolist() == [2, 3]

    def _by_fitness(self, shape):
        target = gds_target(shape)
        sets = sorted(all_subsets(shape.n_plus, shape.m_rows),
                      key=lambda s: fitness(difference_spectrum(s), target, CFG))
        return sets, target

    def test_children_dominate(self):
        sets, target = self._by_fitness(FrameShape(6, 3))
        best, worst = sets[:2], sets[-2:]
        c1, c2 = elitist_replace(worst[0], worst[1], best[0], best[1], target, CFG)
        assert {c1, c2} == set(best)

    def test_parents_dominate(self):
        sets, target = self._by_fitness(FrameShape(6, 3))
        best, worst = sets[:2], sets[-2:]
        p = elitist_replace(best[0], best[1], worst[0], worst[1], target, CFG)
        assert set(p) == set(best)


class TestRunGa:
    @staticmethod
    def exhaustive_ds(n_plus, m):
        return {s.indices for s in all_subsets(n_plus, m) if is_difference_set(s)}

    def test_four_three(self):
        ds = self.exhaustive_ds(4, 3)
        assert len(ds) == 4
        r = run_ga(FrameShape(4, 3), GaConfig(rng_seed=3))
        assert r.converged and r.best_fitness == 0 and r.best_set.indices in ds

    def test_eight_seven(self):
        ds = self.exhaustive_ds(8, 7)
        assert len(ds) == 8
        r = run_ga(FrameShape(8, 7), GaConfig(rng_seed=1))
        assert r.best_fitness == 0 and r.best_set.indices in ds

    def test_unreachable_threshold_runs_all_generations(self):
        cfg = GaConfig(max_generations=25, success_threshold=0.0, population_size=20)
        r = run_ga(FrameShape(6, 3), cfg)
        assert r.generations_run == 25 and len(r.fitness_history) == 26
        assert not r.converged

    @pytest.mark.parametrize("n, m, seed", [(24, 15, 0), (40, 13, 1), (17, 15, 2)])
    def test_history_non_increasing_and_consistent(self, n, m, seed):
        shape = FrameShape(n, m)
        r = run_ga(shape, GaConfig(max_generations=300, rng_seed=seed))
        h = r.fitness_history
        assert np.all(np.diff(h) <= 0)
        assert r.best_fitness == h[-1]
        recomputed = fitness(difference_spectrum(r.best_set), gds_target(shape), CFG)
        assert recomputed == pytest.approx(r.best_fitness, abs=1e-9)

    def test_deterministic(self):
        cfg = GaConfig(max_generations=150, rng_seed=11)
        a = run_ga(FrameShape(48, 21), cfg)
        b = run_ga(FrameShape(48, 21), cfg)
        assert a.best_set == b.best_set
        assert np.array_equal(a.fitness_history, b.fitness_history)

    def test_zero_fitness_means_difference_set(self):
        r = run_ga(FrameShape(16, 6), GaConfig(rng_seed=4))
        assert r.best_fitness == 0 and is_difference_set(r.best_set)

    def test_non_integer_target_never_zero(self):
        # gds target at N=6, M=3 has 0.6 at N-; even counts cannot reach it
        r = run_ga(FrameShape(6, 3), GaConfig(max_generations=200))
        assert r.best_fitness >= 0.36 - 1e-12
