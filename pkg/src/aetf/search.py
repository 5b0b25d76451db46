"""Genetic search for index sets whose difference spectrum matches a GDS target.

Individuals are fixed-cardinality subsets of ``[0, N+)``. Crossover and
mutation both preserve the cardinality, so every individual stays a valid
M-subset for the whole run. Internally a population is an ``(P, M)`` int
array of sorted indices; the public single-individual operators are thin
wrappers over the batched kernels used by :func:`run_ga`.
"""

from dataclasses import dataclass, field

import numpy as np

from .gf2 import FrameShape
from .spectra import IndexSet, difference_spectra, gds_target

SELECTION_EPS = 1e-12


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 100
    max_generations: int = 2000
    crossover_prob: float = 0.9
    mutation_prob: float = 0.1
    weight_peak: float = 1.0
    weight_rest: float = 1e-4
    rng_seed: int = 0
    success_threshold: float = 1e-9

    def __post_init__(self):
        if self.population_size < 2 or self.population_size % 2:
            raise ValueError("population_size must be a positive even integer")
        if self.max_generations < 1:
            raise ValueError("max_generations must be positive")
        for name in ("crossover_prob", "mutation_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.weight_peak < 0 or self.weight_rest < 0:
            raise ValueError("fitness weights must be nonnegative")
        if self.success_threshold < 0:
            raise ValueError("success_threshold must be nonnegative")


@dataclass
class GaResult:
    best_set: IndexSet
    best_fitness: float
    fitness_history: np.ndarray = field(repr=False)
    generations_run: int
    converged: bool


def fitness(spectrum, target, cfg):
    """Weighted squared distance to the target; lower is fitter."""
    lam = np.asarray(spectrum, dtype=float)
    ref = np.asarray(getattr(target, "values", target), dtype=float)
    if lam.shape[-1] != ref.shape[-1]:
        raise ValueError(f"spectrum length {lam.shape[-1]} != target length {ref.shape[-1]}")
    peak = ref.shape[-1] // 2
    d = lam - ref
    out = cfg.weight_peak * d[..., peak] ** 2 + cfg.weight_rest * np.sum(d * d, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def _masks(pop, n_plus):
    masks = np.zeros((pop.shape[0], n_plus), dtype=np.int64)
    np.put_along_axis(masks, pop, 1, axis=1)
    return masks


def _population_fitness(pop, n_plus, target, cfg):
    return fitness(difference_spectra(_masks(pop, n_plus)), target, cfg)


def _init_batch(shape, size, rng):
    keys = rng.random((size, shape.n_plus))
    return np.sort(np.argsort(keys, axis=1)[:, : shape.m_rows], axis=1)


def _crossover_batch(p1, p2, n_plus, rng):
    m = p1.shape[1]
    union = (_masks(p1, n_plus) | _masks(p2, n_plus)).astype(bool)
    keys = rng.random(union.shape)
    keys[~union] = 2.0
    order = np.argsort(keys, axis=1, kind="stable")
    size = union.sum(axis=1)
    c1 = order[:, :m]
    tail = (size - m)[:, None] + np.arange(m)[None, :]
    c2 = np.take_along_axis(order, tail, axis=1)
    return np.sort(c1, axis=1), np.sort(c2, axis=1)


def _mutate_batch(pop, n_plus, prob, rng):
    b, m = pop.shape
    fire = rng.random(b) < prob
    if m >= n_plus or not fire.any():
        return pop
    drop = rng.integers(0, m, size=b)
    keys = rng.random((b, n_plus))
    np.put_along_axis(keys, pop, 2.0, axis=1)
    add = np.argmin(keys, axis=1)
    out = pop.copy()
    rows = np.flatnonzero(fire)
    out[rows, drop[rows]] = add[rows]
    return np.sort(out, axis=1)


def _select_batch(fit, n_pairs, rng):
    w = 1.0 / (np.asarray(fit, dtype=float) + SELECTION_EPS)
    return rng.choice(len(w), size=(n_pairs, 2), replace=True, p=w / w.sum())


def _elitist_batch(p1, p2, c1, c2, f_p1, f_p2, f_c1, f_c2):
    # candidate order encodes the tie-break: children first, then input order
    cand = np.stack([c1, c2, p1, p2], axis=1)
    fits = np.stack([f_c1, f_c2, f_p1, f_p2], axis=1)
    order = np.argsort(fits, axis=1, kind="stable")[:, :2]
    rows = np.arange(len(order))[:, None]
    return cand[rows, order], fits[rows, order]


def init_population(shape, cfg, rng):
    if shape.m_rows > shape.n_plus:
        raise ValueError(f"cannot draw {shape.m_rows} distinct indices from {shape.n_plus}")
    pop = _init_batch(shape, cfg.population_size, rng)
    return [IndexSet(tuple(row), shape) for row in pop]


def select_pairs(population, fitnesses, cfg, rng):
    """Draw ``len(population) // 2`` parent pairs with replacement.

    Individual ``i`` is picked with probability proportional to
    ``1 / (fitness_i + 1e-12)``.
    """
    if not population:
        raise ValueError("population is empty")
    idx = _select_batch(fitnesses, len(population) // 2, rng)
    return [(population[a], population[b]) for a, b in idx]


def crossover(p1, p2, rng):
    """Size-preserving crossover: shuffle the union, take the first and last M."""
    if p1.shape != p2.shape:
        raise ValueError("parents must share a shape")
    shape = p1.shape
    c1, c2 = _crossover_batch(p1.as_array()[None], p2.as_array()[None], shape.n_plus, rng)
    return IndexSet(tuple(c1[0]), shape), IndexSet(tuple(c2[0]), shape)


def mutate(s, cfg, rng):
    """With probability ``cfg.mutation_prob`` swap one member for one non-member."""
    out = _mutate_batch(s.as_array()[None], s.shape.n_plus, cfg.mutation_prob, rng)
    return IndexSet(tuple(out[0]), s.shape)


def elitist_replace(p1, p2, c1, c2, target, cfg):
    """Keep the two fittest of the quartet, preferring children on ties."""
    quartet = [p1, p2, c1, c2]
    n_plus = p1.shape.n_plus
    f = _population_fitness(np.stack([q.as_array() for q in quartet]), n_plus, target, cfg)
    cand = [c1, c2, p1, p2]
    fc = [f[2], f[3], f[0], f[1]]
    order = sorted(range(4), key=lambda i: fc[i])
    return cand[order[0]], cand[order[1]]


def run_ga(shape, cfg=None, target=None):
    """Search for a GDS of ``shape``; deterministic given ``cfg.rng_seed``.

    Besides the per-pair elitism, the best individual found so far is copied
    over the worst newcomer whenever selection missed it, so the recorded
    best fitness never increases.
    """
    cfg = cfg or GaConfig()
    if not isinstance(shape, FrameShape):
        raise TypeError("shape must be a FrameShape")
    if shape.m_rows > shape.n_plus:
        raise ValueError(f"cannot draw {shape.m_rows} distinct indices from {shape.n_plus}")
    target = target if target is not None else gds_target(shape)
    n_plus = shape.n_plus
    n_pairs = cfg.population_size // 2
    rng = np.random.default_rng(cfg.rng_seed)

    pop = _init_batch(shape, cfg.population_size, rng)
    fit = _population_fitness(pop, n_plus, target, cfg)
    best = int(np.argmin(fit))
    best_ind, best_fit = pop[best].copy(), float(fit[best])
    history = [best_fit]

    generations = 0
    while generations < cfg.max_generations and best_fit > cfg.success_threshold:
        pairs = _select_batch(fit, n_pairs, rng)
        p1, p2 = pop[pairs[:, 0]], pop[pairs[:, 1]]
        f1, f2 = fit[pairs[:, 0]], fit[pairs[:, 1]]
        x1, x2 = _crossover_batch(p1, p2, n_plus, rng)
        do = (rng.random(n_pairs) < cfg.crossover_prob)[:, None]
        c1 = np.where(do, x1, p1)
        c2 = np.where(do, x2, p2)
        c1 = _mutate_batch(c1, n_plus, cfg.mutation_prob, rng)
        c2 = _mutate_batch(c2, n_plus, cfg.mutation_prob, rng)
        fc = _population_fitness(np.concatenate([c1, c2]), n_plus, target, cfg)
        kept, kept_fit = _elitist_batch(p1, p2, c1, c2, f1, f2, fc[:n_pairs], fc[n_pairs:])
        pop = kept.reshape(-1, shape.m_rows)
        fit = kept_fit.reshape(-1)

        i = int(np.argmin(fit))
        if fit[i] < best_fit:
            best_ind, best_fit = pop[i].copy(), float(fit[i])
        elif fit[i] > best_fit:
            worst = int(np.argmax(fit))
            pop[worst], fit[worst] = best_ind, best_fit
        history.append(best_fit)
        generations += 1

    return GaResult(
        best_set=IndexSet(tuple(best_ind), shape),
        best_fitness=best_fit,
        fitness_history=np.asarray(history),
        generations_run=generations,
        converged=best_fit <= cfg.success_threshold,
    )
