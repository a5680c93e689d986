"""Evolutionary searches: Gray-coded genetic algorithm and a (mu+lambda) ES."""

import math

import numpy as np

from .base import optimizer


# -- genetic algorithm -------------------------------------------------------

def gray_to_binary(bits: np.ndarray) -> np.ndarray:
    """Convert Gray-coded bit groups (last axis) to plain binary."""
    return np.bitwise_xor.accumulate(bits.astype(np.uint8), axis=-1)


def binary_to_real(binary: np.ndarray, lower: float, upper: float) -> np.ndarray:
    """Map plain-binary bit groups (last axis, MSB first) affinely onto [lower, upper]."""
    nbits = binary.shape[-1]
    place = 2.0 ** np.arange(nbits - 1, -1, -1)
    ints = binary @ place
    return lower + (upper - lower) * ints / (2.0**nbits - 1.0)


def decode(chromosomes: np.ndarray, bits_per_dim: int, lower: float, upper: float) -> np.ndarray:
    """Decode ``(n, bits_per_dim * D)`` Gray chromosomes into ``(n, D)`` points."""
    chromosomes = np.atleast_2d(chromosomes)
    n = chromosomes.shape[0]
    groups = chromosomes.reshape(n, -1, bits_per_dim)
    return binary_to_real(gray_to_binary(groups), lower, upper)


def encode(points: np.ndarray, bits_per_dim: int, lower: float, upper: float) -> np.ndarray:
    """Inverse of :func:`decode` up to quantisation (nearest level)."""
    points = np.atleast_2d(points)
    levels = 2**bits_per_dim - 1
    ints = np.rint((points - lower) / (upper - lower) * levels).astype(np.int64)
    gray = ints ^ (ints >> 1)
    shifts = np.arange(bits_per_dim - 1, -1, -1)
    bits = (gray[..., None] >> shifts) & 1
    return bits.reshape(points.shape[0], -1).astype(bool)


def binary_tournament(fitness: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Indices of ``n`` winners; equal fitness goes to the lower index."""
    pairs = rng.integers(0, len(fitness), (n, 2))
    a, b = pairs[:, 0], pairs[:, 1]
    fa, fb = fitness[a], fitness[b]
    return np.where(fa < fb, a, np.where(fb < fa, b, np.minimum(a, b)))


def one_point_crossover(p1: np.ndarray, p2: np.ndarray, rate: float,
                        rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    n, length = p1.shape
    do_cross = rng.random(n) < rate
    cut = rng.integers(1, length, n) if length > 1 else np.ones(n, dtype=int)
    head = (np.arange(length)[None, :] < cut[:, None]) | ~do_cross[:, None]
    return np.where(head, p1, p2), np.where(head, p2, p1)


@optimizer("ga")
def genetic_algorithm(objective, domain, config, rng):
    """Generational GA with binary tournaments, one-point crossover and bit flips."""
    bits = config.ga_bits_per_dim
    length = bits * domain.dimensions
    size = config.population_size
    mutation = config.ga_mutation_rate
    if mutation is None:
        mutation = 1.0 / length

    population = rng.random((size, length)) < 0.5
    fitness = objective.evaluate_batch(decode(population, bits, domain.lower, domain.upper))
    while True:
        chosen = population[binary_tournament(fitness, size, rng)]
        mates = np.roll(chosen, -1, axis=0)  # odd sizes pair the last parent with the first
        c1, c2 = one_point_crossover(chosen[0::2], mates[0::2], config.ga_crossover_rate, rng)
        children = np.empty_like(chosen)
        children[0::2] = c1
        children[1::2] = c2[: size // 2]
        children ^= rng.random(children.shape) < mutation
        population = children
        fitness = objective.evaluate_batch(decode(population, bits, domain.lower, domain.upper))


# -- evolution strategies ----------------------------------------------------

def es_learning_rates(dimensions: int, config) -> tuple[float, float]:
    tau = config.es_tau if config.es_tau is not None else 1.0 / math.sqrt(2.0 * math.sqrt(dimensions))
    tau_prime = (config.es_tau_prime if config.es_tau_prime is not None
                 else 1.0 / math.sqrt(2.0 * dimensions))
    return tau, tau_prime


def es_offspring(points, steps, tau, tau_prime, domain, rng):
    """Lognormal self-adaptation of per-coordinate steps, then Gaussian mutation."""
    n, dims = points.shape
    common = rng.standard_normal((n, 1))
    own = rng.standard_normal((n, dims))
    new_steps = steps * np.exp(tau_prime * common + tau * own)
    new_points = domain.clip(points + new_steps * rng.standard_normal((n, dims)))
    return new_points, new_steps


@optimizer("es")
def evolution_strategies(objective, domain, config, rng):
    """(mu+lambda)-ES; parents drawn uniformly, best ``mu`` of the union survive."""
    size = config.population_size
    mu = config.es_mu if config.es_mu is not None else max(1, (3 * size) // 5)
    lam = max(1, size - mu)
    tau, tau_prime = es_learning_rates(domain.dimensions, config)

    points = domain.sample(rng, mu)
    steps = np.full((mu, domain.dimensions), config.es_initial_step_fraction * domain.width)
    fitness = objective.evaluate_batch(points)
    while True:
        parents = rng.integers(0, mu, lam)
        kids, kid_steps = es_offspring(points[parents], steps[parents], tau, tau_prime, domain, rng)
        kid_fitness = objective.evaluate_batch(kids)
        pool_f = np.concatenate([fitness, kid_fitness])
        keep = np.argsort(pool_f, kind="stable")[:mu]
        points = np.concatenate([points, kids])[keep]
        steps = np.concatenate([steps, kid_steps])[keep]
        fitness = pool_f[keep]
