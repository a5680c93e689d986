"""Harmony search."""

import numpy as np

from .base import draw, optimizer

_BLOCK = 512


def compose_harmony(memory, consider, member, shift, fresh, domain):
    """Build harmonies coordinate-wise from pre-drawn random numbers.

    ``memory`` is ``(runs, size, D)``; the other arrays are ``(runs, D)``.
    Coordinates marked in ``consider`` are copied from memory row
    ``member[..., d]`` plus the pitch ``shift`` (zero where no adjustment
    was drawn) and clipped to the domain; the rest come from ``fresh``.
    """
    runs, _, dims = memory.shape
    recalled = memory[np.arange(runs)[:, None], member, np.arange(dims)[None, :]]
    recalled = np.clip(recalled + shift, domain.lower, domain.upper)
    return np.where(consider, recalled, fresh)


@optimizer("hs", lockstep=True)
def harmony_search(objective, domain, config, rngs):
    """One new harmony per evaluation; it replaces the worst member iff strictly better.

    The memory starts as the best ``population_size`` of
    ``hs_init_factor * population_size`` uniform samples.
    """
    size = config.population_size
    dims = domain.dimensions
    bandwidth = config.hs_bandwidth if config.hs_bandwidth is not None else 0.1 * config.range_param
    rows = np.arange(len(rngs))

    pool = draw(rngs, lambda r: domain.sample(r, max(size, config.hs_init_factor * size)))
    pool_f = objective.evaluate_runs(pool)
    keep = np.argsort(pool_f, axis=1, kind="stable")[:, :size]
    memory = pool[rows[:, None], keep]
    memory_f = pool_f[rows[:, None], keep]
    worst = np.argmax(memory_f, axis=1)

    def block(r):
        shape = (_BLOCK, dims)
        consider = r.random(shape) < config.hs_consideration_rate
        member = r.integers(0, size, shape)
        adjust = r.random(shape) < config.hs_adjust_rate
        shift = np.where(adjust, bandwidth * r.uniform(-1.0, 1.0, shape), 0.0)
        return consider, member, shift, domain.sample(r, _BLOCK)

    while True:
        consider, member, shift, fresh = (np.stack(parts) for parts in zip(*map(block, rngs)))
        for t in range(_BLOCK):
            harmony = compose_harmony(memory, consider[:, t], member[:, t], shift[:, t],
                                      fresh[:, t], domain)
            f = objective.evaluate_runs(harmony[:, None, :])[:, 0]
            better = f < memory_f[rows, worst]
            if better.any():
                hit = rows[better]
                memory[hit, worst[hit]] = harmony[hit]
                memory_f[hit, worst[hit]] = f[hit]
                worst[hit] = np.argmax(memory_f[hit], axis=1)
